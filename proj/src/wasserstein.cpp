#include "gapcert/wasserstein.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace gapcert {
namespace detail {
namespace {

// Basis tree for the transportation simplex: nodes 0..m-1 are rows,
// m..m+n-1 are columns; basic cells are edges.
struct BasisTree {
  int m, n;
  std::vector<std::vector<int>> adj;  // node -> incident basic-cell ids
  std::vector<int> cell_row, cell_col;

  BasisTree(int m_, int n_) : m(m_), n(n_), adj(static_cast<std::size_t>(m_ + n_)) {}

  int add(int i, int j) {
    const int id = static_cast<int>(cell_row.size());
    cell_row.push_back(i);
    cell_col.push_back(j);
    adj[static_cast<std::size_t>(i)].push_back(id);
    adj[static_cast<std::size_t>(m + j)].push_back(id);
    return id;
  }

  void replace(int id, int i, int j) {
    auto drop = [&](int node) {
      auto& v = adj[static_cast<std::size_t>(node)];
      v.erase(std::find(v.begin(), v.end(), id));
    };
    drop(cell_row[static_cast<std::size_t>(id)]);
    drop(m + cell_col[static_cast<std::size_t>(id)]);
    cell_row[static_cast<std::size_t>(id)] = i;
    cell_col[static_cast<std::size_t>(id)] = j;
    adj[static_cast<std::size_t>(i)].push_back(id);
    adj[static_cast<std::size_t>(m + j)].push_back(id);
  }

  int other_node(int id, int node) const {
    const int r = cell_row[static_cast<std::size_t>(id)];
    const int c = m + cell_col[static_cast<std::size_t>(id)];
    return node == r ? c : r;
  }
};

}  // namespace

std::pair<Mat, Real> solve_transportation(Vec supply, Vec demand, const Mat& cost) {
  const int m = static_cast<int>(supply.size());
  const int n = static_cast<int>(demand.size());
  if (cost.rows() != m || cost.cols() != n)
    throw InvalidInput("solve_transportation: cost shape mismatch");
  if (m == 0 || n == 0) throw InvalidInput("solve_transportation: empty marginal");
  const Real sa = supply.sum();
  const Real sb = demand.sum();
  if (!(sa > 0) || !(sb > 0) || std::abs(sa - sb) > 1e-9 * std::max(sa, sb))
    throw InvalidInput("solve_transportation: unbalanced marginals");
  demand *= sa / sb;

  Mat x = Mat::Zero(m, n);
  BasisTree tree(m, n);

  // Northwest-corner start: exactly m + n - 1 basic cells, zero fills allowed.
  {
    Vec ra = supply, rb = demand;
    int i = 0, j = 0;
    for (int count = 0; count < m + n - 1; ++count) {
      const Real q = std::min(ra[i], rb[j]);
      x(i, j) = q;
      tree.add(i, j);
      ra[i] -= q;
      rb[j] -= q;
      if (count == m + n - 2) break;
      const bool can_down = i + 1 < m;
      const bool can_right = j + 1 < n;
      if (can_down && (ra[i] <= rb[j] || !can_right))
        ++i;
      else
        ++j;
    }
  }

  const Real scale = 1.0 + cost.cwiseAbs().maxCoeff();
  const Real opt_tol = 1e-11 * scale;
  const int num_nodes = m + n;
  std::vector<Real> potential(static_cast<std::size_t>(num_nodes));
  std::vector<int> parent_cell(static_cast<std::size_t>(num_nodes));
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(num_nodes));

  const long max_iters = 200L * m * n + 2000;
  const long bland_after = 20L * m * n + 500;
  for (long iter = 0;; ++iter) {
    if (iter > max_iters) throw InternalError("solve_transportation: pivot limit exceeded");

    // Potentials from the basis tree (root at row 0, potential 0).
    order.clear();
    std::vector<char> seen(static_cast<std::size_t>(num_nodes), 0);
    potential[0] = 0.0;
    seen[0] = 1;
    order.push_back(0);
    for (std::size_t q = 0; q < order.size(); ++q) {
      const int node = order[q];
      for (int id : tree.adj[static_cast<std::size_t>(node)]) {
        const int next = tree.other_node(id, node);
        if (seen[static_cast<std::size_t>(next)]) continue;
        seen[static_cast<std::size_t>(next)] = 1;
        const int r = tree.cell_row[static_cast<std::size_t>(id)];
        const int c = tree.cell_col[static_cast<std::size_t>(id)];
        potential[static_cast<std::size_t>(next)] =
            cost(r, c) - potential[static_cast<std::size_t>(node)];
        order.push_back(next);
      }
    }
    if (order.size() != static_cast<std::size_t>(num_nodes))
      throw InternalError("solve_transportation: basis not spanning");

    // Entering cell: most negative reduced cost (Bland fallback late).
    int ei = -1, ej = -1;
    Real best = -opt_tol;
    const bool bland = iter > bland_after;
    for (int i = 0; i < m && (!bland || ei < 0); ++i)
      for (int j = 0; j < n; ++j) {
        const Real rc = cost(i, j) - potential[static_cast<std::size_t>(i)] -
                        potential[static_cast<std::size_t>(m + j)];
        if (rc < best) {
          best = rc;
          ei = i;
          ej = j;
          if (bland) break;
        }
      }
    if (ei < 0) break;  // optimal

    // Unique tree path from row ei to column ej.
    std::fill(seen.begin(), seen.end(), 0);
    std::vector<int> frontier{ei};
    seen[static_cast<std::size_t>(ei)] = 1;
    parent_cell[static_cast<std::size_t>(ei)] = -1;
    const int target = m + ej;
    for (std::size_t q = 0; q < frontier.size() && !seen[static_cast<std::size_t>(target)]; ++q) {
      const int node = frontier[q];
      for (int id : tree.adj[static_cast<std::size_t>(node)]) {
        const int next = tree.other_node(id, node);
        if (seen[static_cast<std::size_t>(next)]) continue;
        seen[static_cast<std::size_t>(next)] = 1;
        parent_cell[static_cast<std::size_t>(next)] = id;
        frontier.push_back(next);
      }
    }
    if (!seen[static_cast<std::size_t>(target)])
      throw InternalError("solve_transportation: disconnected basis");

    // Walk back col ej -> row ei; path cells alternate -,+ starting with -.
    std::vector<int> minus_cells, plus_cells;
    {
      int node = target;
      bool minus = true;
      while (node != ei) {
        const int id = parent_cell[static_cast<std::size_t>(node)];
        (minus ? minus_cells : plus_cells).push_back(id);
        node = tree.other_node(id, node);
        minus = !minus;
      }
    }

    Real theta = std::numeric_limits<Real>::infinity();
    int leaving = -1;
    for (int id : minus_cells) {
      const int r = tree.cell_row[static_cast<std::size_t>(id)];
      const int c = tree.cell_col[static_cast<std::size_t>(id)];
      if (x(r, c) < theta - 0.0) {
        theta = x(r, c);
        leaving = id;
      }
    }
    if (leaving < 0) throw InternalError("solve_transportation: no leaving cell");

    x(ei, ej) += theta;
    for (int id : plus_cells)
      x(tree.cell_row[static_cast<std::size_t>(id)], tree.cell_col[static_cast<std::size_t>(id)]) += theta;
    for (int id : minus_cells)
      x(tree.cell_row[static_cast<std::size_t>(id)], tree.cell_col[static_cast<std::size_t>(id)]) -= theta;
    x(tree.cell_row[static_cast<std::size_t>(leaving)],
      tree.cell_col[static_cast<std::size_t>(leaving)]) = 0.0;
    tree.replace(leaving, ei, ej);
  }

  x = x.cwiseMax(0.0);
  return {x, (x.array() * cost.array()).sum()};
}

}  // namespace detail

namespace {

void require_same_space(const DiscreteDistribution& nu1, const DiscreteDistribution& nu2,
                        const Metric* metric) {
  if (metric) {
    if (nu1.max_point() >= metric->size() || nu2.max_point() >= metric->size())
      throw InvalidInput("distribution support outside the metric point set");
  }
}

TransportPlan trivial_metric_plan(const DiscreteDistribution& nu1,
                                  const DiscreteDistribution& nu2) {
  // Shared mass stays in place; the rest moves at unit cost. Cost = TV/2.
  std::vector<int> pts;
  std::merge(nu1.support.begin(), nu1.support.end(), nu2.support.begin(), nu2.support.end(),
             std::back_inserter(pts));
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const int k = static_cast<int>(pts.size());

  Vec w1 = Vec::Zero(k), w2 = Vec::Zero(k);
  for (int a = 0; a < k; ++a) {
    w1[a] = nu1.mass_at(pts[static_cast<std::size_t>(a)]);
    w2[a] = nu2.mass_at(pts[static_cast<std::size_t>(a)]);
  }
  Vec common = w1.cwiseMin(w2);
  Vec r1 = w1 - common, r2 = w2 - common;

  TransportPlan plan;
  plan.support1 = pts;
  plan.support2 = pts;
  plan.plan = Mat::Zero(k, k);
  plan.plan.diagonal() = common;
  // Residuals matched greedily; any coupling of them costs the same.
  int j = 0;
  for (int i = 0; i < k; ++i) {
    Real rem = r1[i];
    while (rem > kMassTol && j < k) {
      const Real q = std::min(rem, r2[j]);
      plan.plan(i, j) += q;
      rem -= q;
      r2[j] -= q;
      if (r2[j] <= kMassTol) ++j;
    }
  }
  plan.cost = (w1 - w2).cwiseAbs().sum() / 2.0;
  return plan;
}

}  // namespace

TransportPlan w1_exact(const DiscreteDistribution& nu1, const DiscreteDistribution& nu2,
                       const Metric& metric) {
  require_same_space(nu1, nu2, &metric);
  if (metric.is_trivial()) return trivial_metric_plan(nu1, nu2);

  const int m = nu1.size(), n = nu2.size();
  Mat cost(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      cost(i, j) = metric(nu1.support[static_cast<std::size_t>(i)],
                          nu2.support[static_cast<std::size_t>(j)]);

  auto [x, value] = detail::solve_transportation(nu1.weights, nu2.weights, cost);
  TransportPlan plan;
  plan.support1 = nu1.support;
  plan.support2 = nu2.support;
  plan.plan = std::move(x);
  plan.cost = value;
  return plan;
}

Real tv_distance(const DiscreteDistribution& nu1, const DiscreteDistribution& nu2) {
  require_same_space(nu1, nu2, nullptr);
  Real tv = 0.0;
  std::size_t i = 0, j = 0;
  while (i < nu1.support.size() || j < nu2.support.size()) {
    const int a = i < nu1.support.size() ? nu1.support[i] : std::numeric_limits<int>::max();
    const int b = j < nu2.support.size() ? nu2.support[j] : std::numeric_limits<int>::max();
    if (a < b) {
      tv += nu1.weights[static_cast<Index>(i++)];
    } else if (b < a) {
      tv += nu2.weights[static_cast<Index>(j++)];
    } else {
      tv += std::abs(nu1.weights[static_cast<Index>(i++)] - nu2.weights[static_cast<Index>(j++)]);
    }
  }
  return tv;
}

Real dual_lower_bound(const DiscreteDistribution& nu1, const DiscreteDistribution& nu2,
                      const Metric& metric, const Vec& f) {
  require_same_space(nu1, nu2, &metric);
  if (f.size() < metric.size()) throw InvalidInput("dual_lower_bound: f not defined on the space");

  std::vector<int> pts;
  std::merge(nu1.support.begin(), nu1.support.end(), nu2.support.begin(), nu2.support.end(),
             std::back_inserter(pts));
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  Real lip = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const Real d = metric(pts[i], pts[j]);
      if (d > 0.0) lip = std::max(lip, std::abs(f[pts[i]] - f[pts[j]]) / d);
    }
  if (lip == 0.0) return 0.0;

  Real integral = 0.0;
  for (int p : pts) integral += f[p] * (nu1.mass_at(p) - nu2.mass_at(p));
  return integral / lip;
}

Vec lipschitz_vector(const Vec& f, const StateSpace& space,
                     const std::vector<Metric>& site_metrics) {
  const int nsites = space.num_sites();
  if (static_cast<int>(site_metrics.size()) != nsites)
    throw InvalidInput("lipschitz_vector: one metric per site required");
  if (f.size() != static_cast<Index>(space.size()))
    throw InvalidInput("lipschitz_vector: table size mismatch");

  Vec delta = Vec::Zero(nsites);
  for (int i = 0; i < nsites; ++i) {
    const int r = space.radix(i);
    const Metric& d = site_metrics[static_cast<std::size_t>(i)];
    for (std::size_t a = 0; a < space.size(); ++a) {
      if (space.coord(a, i) != 0) continue;
      for (int u = 0; u < r; ++u) {
        const Real fu = f[static_cast<Index>(space.with_coord(a, i, u))];
        for (int v = u + 1; v < r; ++v) {
          const Real duv = d(u, v);
          if (duv <= 0.0) continue;  // 0/0 pairs skipped
          const Real fv = f[static_cast<Index>(space.with_coord(a, i, v))];
          delta[i] = std::max(delta[i], std::abs(fv - fu) / duv);
        }
      }
    }
  }
  return delta;
}

Real product_w1(const Vec& table1, const Vec& table2, const StateSpace& space,
                const std::vector<Metric>& site_metrics, std::size_t cap) {
  if (space.size() > cap) throw SizeLimit("product_w1: state space exceeds cap");
  if (table1.size() != static_cast<Index>(space.size()) || table2.size() != table1.size())
    throw InvalidInput("product_w1: table size mismatch");
  if (static_cast<int>(site_metrics.size()) != space.num_sites())
    throw InvalidInput("product_w1: one metric per site required");

  auto support_of = [](const Vec& t) {
    std::vector<int> s;
    for (Index a = 0; a < t.size(); ++a) {
      if (t[a] < -1e-12) throw InvalidInput("product_w1: negative weight");
      if (t[a] > 1e-15) s.push_back(static_cast<int>(a));
    }
    if (s.empty()) throw InvalidInput("product_w1: empty table");
    return s;
  };
  const std::vector<int> s1 = support_of(table1), s2 = support_of(table2);

  Vec a(static_cast<Index>(s1.size())), b(static_cast<Index>(s2.size()));
  for (std::size_t i = 0; i < s1.size(); ++i) a[static_cast<Index>(i)] = table1[s1[i]];
  for (std::size_t j = 0; j < s2.size(); ++j) b[static_cast<Index>(j)] = table2[s2[j]];
  const Real sa = a.sum(), sb = b.sum();
  if (std::abs(sa - 1.0) > 1e-9 || std::abs(sb - 1.0) > 1e-9)
    throw InvalidInput("product_w1: tables must be normalized");
  a /= sa;
  b /= sb;

  Mat cost(static_cast<Index>(s1.size()), static_cast<Index>(s2.size()));
  for (std::size_t i = 0; i < s1.size(); ++i)
    for (std::size_t j = 0; j < s2.size(); ++j) {
      Real d = 0.0;
      for (int k = 0; k < space.num_sites(); ++k)
        d += site_metrics[static_cast<std::size_t>(k)](
            space.coord(static_cast<std::size_t>(s1[i]), k),
            space.coord(static_cast<std::size_t>(s2[j]), k));
      cost(static_cast<Index>(i), static_cast<Index>(j)) = d;
    }

  return detail::solve_transportation(a, b, cost).second;
}

}  // namespace gapcert
