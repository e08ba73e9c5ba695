#include "oracles.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace gapcert::testing {

namespace {

struct BasisEnumerator {
  int m, n;
  const Mat& cost;
  const Vec& supply;
  const Vec& demand;
  std::vector<int> chosen;
  std::vector<int> parent;  // union-find over m + n nodes
  Real best = std::numeric_limits<Real>::infinity();

  BasisEnumerator(const Vec& s, const Vec& d, const Mat& c)
      : m(static_cast<int>(s.size())), n(static_cast<int>(d.size())), cost(c), supply(s),
        demand(d) {}

  int find(int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }

  void solve_basis() {
    // Triangular solve by repeated leaf elimination.
    std::vector<Real> rs(supply.data(), supply.data() + m);
    std::vector<Real> cs(demand.data(), demand.data() + n);
    std::vector<int> row_deg(m, 0), col_deg(n, 0);
    std::vector<char> used(chosen.size(), 0);
    for (int cell : chosen) {
      ++row_deg[cell / n];
      ++col_deg[cell % n];
    }
    Real total = 0.0;
    for (std::size_t done = 0; done < chosen.size(); ++done) {
      int pick = -1;
      for (std::size_t k = 0; k < chosen.size(); ++k) {
        if (used[k]) continue;
        const int i = chosen[k] / n, j = chosen[k] % n;
        if (row_deg[i] == 1 || col_deg[j] == 1) {
          pick = static_cast<int>(k);
          break;
        }
      }
      if (pick < 0) return;  // cyclic (should not happen for spanning trees)
      used[pick] = 1;
      const int i = chosen[pick] / n, j = chosen[pick] % n;
      const Real q = row_deg[i] == 1 ? rs[i] : cs[j];
      if (q < -1e-9) return;  // infeasible vertex
      total += q * cost(i, j);
      rs[i] -= q;
      cs[j] -= q;
      --row_deg[i];
      --col_deg[j];
    }
    best = std::min(best, total);
  }

  void recurse(int next_cell, int picked) {
    if (picked == m + n - 1) {
      solve_basis();
      return;
    }
    const int cells = m * n;
    if (cells - next_cell < m + n - 1 - picked) return;
    for (int cell = next_cell; cell < cells; ++cell) {
      const int i = cell / n, j = m + cell % n;
      const int ri = find(i), rj = find(j);
      if (ri == rj) continue;  // cycle
      std::vector<int> saved = parent;
      parent[ri] = rj;
      chosen.push_back(cell);
      recurse(cell + 1, picked + 1);
      chosen.pop_back();
      parent = saved;
    }
  }

  Real run() {
    parent.resize(m + n);
    std::iota(parent.begin(), parent.end(), 0);
    recurse(0, 0);
    return best;
  }
};

}  // namespace

Real transport_bruteforce(const Vec& supply, const Vec& demand, const Mat& cost) {
  if (supply.size() + demand.size() > 11)
    throw std::runtime_error("transport_bruteforce: problem too large for enumeration");
  BasisEnumerator enumerator(supply, demand, cost);
  return enumerator.run();
}

Mat expm_oracle(const Mat& M) { return M.exp(); }

Real quartic_second_moment(Real a, Real b, Real halfwidth, int points) {
  const Vec x = Vec::LinSpaced(points, -halfwidth, halfwidth);
  Vec logw = -(a * x.array().pow(4) - b * x.array().square());
  logw.array() -= logw.maxCoeff();
  Vec w = logw.array().exp();
  w[0] /= 2.0;
  w[points - 1] /= 2.0;  // trapezoid ends
  return (x.array().square() * w.array()).sum() / w.sum();
}

SpinModel random_ising_chain(int sites, Real beta_max, TestRng& rng) {
  std::vector<long> ids(static_cast<std::size_t>(sites));
  std::iota(ids.begin(), ids.end(), 0L);
  std::vector<SubsetCoupling> couplings;
  for (int k = 0; k + 1 < sites; ++k)
    couplings.push_back({{static_cast<long>(k), static_cast<long>(k + 1)},
                         rng.uniform(-beta_max, beta_max)});
  return make_ising(ids, couplings);
}

SpinModel random_ising_star(int leaves, Real beta_max, TestRng& rng) {
  std::vector<long> ids(static_cast<std::size_t>(leaves) + 1);
  std::iota(ids.begin(), ids.end(), 0L);
  std::vector<SubsetCoupling> couplings;
  for (int k = 1; k <= leaves; ++k)
    couplings.push_back({{0L, static_cast<long>(k)}, rng.uniform(-beta_max, beta_max)});
  return make_ising(ids, couplings);
}

SpinModel random_potts_chain(int sites, int colors, Real j_max, TestRng& rng) {
  std::vector<long> ids(static_cast<std::size_t>(sites));
  std::iota(ids.begin(), ids.end(), 0L);
  std::vector<std::pair<long, long>> edges;
  for (int k = 0; k + 1 < sites; ++k) edges.emplace_back(k, k + 1);
  return make_potts(ids, colors, edges, rng.uniform(0.1, j_max));
}

SpinModel random_free_product(int sites, int max_points, TestRng& rng) {
  std::vector<Vec> marginals;
  for (int k = 0; k < sites; ++k)
    marginals.push_back(random_distribution(2 + rng.uniform_int(max_points - 1), rng));
  return make_free_product(marginals);
}

Vec random_distribution(int n, TestRng& rng) {
  Vec w(n);
  for (int k = 0; k < n; ++k) w[k] = 0.05 + rng.uniform(0.0, 1.0);
  return w / w.sum();
}

Vec random_table(Index size, TestRng& rng) {
  Vec f(size);
  for (Index k = 0; k < size; ++k) f[k] = rng.uniform(-1.0, 1.0);
  return f;
}

}  // namespace gapcert::testing
