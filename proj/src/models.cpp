#include "gapcert/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace gapcert {

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Ising: return "ising";
    case ModelKind::PottsAF: return "potts_af";
    case ModelKind::GaussianPair: return "gaussian_pair";
    case ModelKind::Phi4Grid: return "phi4_grid";
    case ModelKind::FreeProduct: return "free_product";
  }
  return "unknown";
}

SpinModel::SpinModel(ModelKind kind, std::vector<long> site_ids, std::vector<SpinSpace> spins,
                     std::vector<InteractionTerm> terms)
    : kind_(kind), site_ids_(std::move(site_ids)), spins_(std::move(spins)), terms_(std::move(terms)) {
  if (spins_.empty()) throw InvalidInput("SpinModel: at least one site required");
  if (site_ids_.size() != spins_.size())
    throw InvalidInput("SpinModel: one site id per spin space required");
  {
    std::vector<long> ids = site_ids_;
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
      throw InvalidInput("SpinModel: duplicate site ids");
  }
  std::vector<int> radices;
  radices.reserve(spins_.size());
  for (const SpinSpace& s : spins_) {
    if (s.size() < 1 || s.size() != s.metric.size())
      throw InvalidInput("SpinModel: spin values/metric size mismatch");
    radices.push_back(s.size());
  }
  space_ = StateSpace(std::move(radices));

  terms_by_site_.assign(spins_.size(), {});
  for (std::size_t t = 0; t < terms_.size(); ++t) {
    const InteractionTerm& term = terms_[t];
    if (term.sites.empty()) throw InvalidInput("SpinModel: empty interaction term");
    std::size_t table = 1;
    int prev = -1;
    for (int s : term.sites) {
      if (s <= prev || s >= num_sites())
        throw InvalidInput("SpinModel: term sites must be ascending window indexes");
      prev = s;
      table *= static_cast<std::size_t>(space_.radix(s));
      terms_by_site_[static_cast<std::size_t>(s)].push_back(static_cast<int>(t));
    }
    if (term.logw.size() != static_cast<Index>(table))
      throw InvalidInput("SpinModel: term table size mismatch");
  }
}

std::vector<Metric> SpinModel::site_metrics() const {
  std::vector<Metric> out;
  out.reserve(spins_.size());
  for (const SpinSpace& s : spins_) out.push_back(s.metric);
  return out;
}

Real SpinModel::term_logw(const InteractionTerm& term, std::size_t state) const {
  std::size_t idx = 0, stride = 1;
  for (int s : term.sites) {
    idx += static_cast<std::size_t>(space_.coord(state, s)) * stride;
    stride *= static_cast<std::size_t>(space_.radix(s));
  }
  return term.logw[static_cast<Index>(idx)];
}

DiscreteDistribution SpinModel::conditional(int site, std::size_t state) const {
  if (site < 0 || site >= num_sites()) throw InvalidInput("conditional: site out of range");
  const int r = space_.radix(site);
  Vec logw = Vec::Zero(r);
  for (int v = 0; v < r; ++v) {
    const std::size_t s = space_.with_coord(state, site, v);
    for (int t : terms_by_site_[static_cast<std::size_t>(site)])
      logw[v] += term_logw(terms_[static_cast<std::size_t>(t)], s);
  }
  const Real top = logw.maxCoeff();
  Vec w = (logw.array() - top).exp();
  w /= w.sum();
  return DiscreteDistribution::from_weights(w, 1e-6);
}

Vec SpinModel::joint_table(std::size_t cap) const {
  if (space_.size() > cap) throw SizeLimit("joint_table: state space exceeds cap");
  Vec logw = Vec::Zero(static_cast<Index>(space_.size()));
  for (const InteractionTerm& term : terms_)
    for (std::size_t a = 0; a < space_.size(); ++a)
      logw[static_cast<Index>(a)] += term_logw(term, a);
  const Real top = logw.maxCoeff();
  Vec w = (logw.array() - top).exp();
  return w / w.sum();
}

StateSpace SpinModel::block_space(const std::vector<int>& block) const {
  std::vector<int> radices;
  radices.reserve(block.size());
  int prev = -1;
  for (int s : block) {
    if (s <= prev || s >= num_sites())
      throw InvalidInput("block sites must be ascending window indexes");
    prev = s;
    radices.push_back(space_.radix(s));
  }
  return StateSpace(std::move(radices));
}

Vec SpinModel::conditional_block(const std::vector<int>& block, std::size_t state,
                                 std::size_t cap) const {
  const StateSpace sub = block_space(block);
  if (sub.size() > cap) throw SizeLimit("conditional_block: block exceeds cap");

  // Terms not touching the block cancel in the conditional.
  std::vector<int> relevant;
  for (std::size_t t = 0; t < terms_.size(); ++t) {
    const auto& sites = terms_[t].sites;
    bool touches = false;
    for (int s : sites)
      if (std::binary_search(block.begin(), block.end(), s)) touches = true;
    if (touches) relevant.push_back(static_cast<int>(t));
  }

  Vec logw = Vec::Zero(static_cast<Index>(sub.size()));
  for (std::size_t z = 0; z < sub.size(); ++z) {
    std::size_t s = state;
    for (std::size_t k = 0; k < block.size(); ++k)
      s = space_.with_coord(s, block[k], sub.coord(z, static_cast<int>(k)));
    for (int t : relevant) logw[static_cast<Index>(z)] += term_logw(terms_[static_cast<std::size_t>(t)], s);
  }
  const Real top = logw.maxCoeff();
  Vec w = (logw.array() - top).exp();
  return w / w.sum();
}

// ---- Builders -----------------------------------------------------------

namespace {

int window_index(const std::vector<long>& sites, long id) {
  auto it = std::find(sites.begin(), sites.end(), id);
  return it == sites.end() ? -1 : static_cast<int>(it - sites.begin());
}

[[noreturn]] void missing_boundary(long id) {
  std::ostringstream msg;
  msg << "missing boundary value for exterior site " << id;
  throw InvalidInput(msg.str());
}

}  // namespace

SpinModel make_ising(const std::vector<long>& sites, const std::vector<SubsetCoupling>& couplings,
                     const std::map<long, Real>& boundary) {
  Vec pm(2);
  pm << -1.0, 1.0;
  std::vector<SpinSpace> spins(sites.size(), SpinSpace{pm, Metric::trivial(2)});

  for (const auto& [id, v] : boundary) {
    if (std::abs(std::abs(v) - 1.0) > kMassTol) {
      std::ostringstream msg;
      msg << "ising: boundary value at site " << id << " must be -1 or +1";
      throw InvalidInput(msg.str());
    }
    if (window_index(sites, id) >= 0) {
      std::ostringstream msg;
      msg << "ising: boundary site " << id << " is inside the window";
      throw InvalidInput(msg.str());
    }
  }

  std::vector<InteractionTerm> terms;
  for (const SubsetCoupling& cpl : couplings) {
    if (cpl.sites.empty()) throw InvalidInput("ising coupling needs at least one site");
    {
      std::vector<long> ids = cpl.sites;
      std::sort(ids.begin(), ids.end());
      if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
        throw InvalidInput("ising coupling repeats a site");
    }
    if (cpl.J == 0.0) continue;

    std::vector<int> interior;
    Real ext_factor = 1.0;
    for (long id : cpl.sites) {
      const int w = window_index(sites, id);
      if (w >= 0) {
        interior.push_back(w);
      } else {
        auto it = boundary.find(id);
        if (it == boundary.end()) missing_boundary(id);
        ext_factor *= it->second;
      }
    }
    if (interior.empty()) continue;  // constant term
    std::sort(interior.begin(), interior.end());

    InteractionTerm term;
    term.sites = interior;
    const std::size_t table = std::size_t{1} << interior.size();
    term.logw = Vec::Zero(static_cast<Index>(table));
    for (std::size_t z = 0; z < table; ++z) {
      Real prod = ext_factor;
      for (std::size_t k = 0; k < interior.size(); ++k)
        prod *= ((z >> k) & 1u) ? 1.0 : -1.0;
      term.logw[static_cast<Index>(z)] = cpl.J * prod;
    }
    terms.push_back(std::move(term));
  }
  return SpinModel(ModelKind::Ising, sites, std::move(spins), std::move(terms));
}

SpinModel make_potts(const std::vector<long>& sites, int n_colors,
                     const std::vector<std::pair<long, long>>& edges, Real J,
                     const std::map<long, int>& boundary) {
  if (n_colors < 2) throw InvalidInput("potts: at least two colors required");
  if (!(J > 0.0)) throw InvalidInput("potts: J must be positive");
  Vec colors(n_colors);
  for (int c = 0; c < n_colors; ++c) colors[c] = c + 1;
  std::vector<SpinSpace> spins(sites.size(), SpinSpace{colors, Metric::trivial(n_colors)});

  for (const auto& [id, c] : boundary)
    if (c < 1 || c > n_colors) throw InvalidInput("potts: boundary color out of range");

  std::vector<InteractionTerm> terms;
  for (const auto& [ida, idb] : edges) {
    if (ida == idb) throw InvalidInput("potts: self edge");
    const int wa = window_index(sites, ida);
    const int wb = window_index(sites, idb);
    auto boundary_color = [&](long id) {
      auto it = boundary.find(id);
      if (it == boundary.end()) missing_boundary(id);
      return it->second - 1;
    };
    if (wa < 0 && wb < 0) continue;  // fully exterior edge, constant
    InteractionTerm term;
    if (wa >= 0 && wb >= 0) {
      const int lo = std::min(wa, wb), hi = std::max(wa, wb);
      term.sites = {lo, hi};
      term.logw = Vec::Zero(static_cast<Index>(n_colors) * n_colors);
      for (int a = 0; a < n_colors; ++a)
        for (int b = 0; b < n_colors; ++b)
          term.logw[a + n_colors * b] = (a == b) ? -J : 0.0;
    } else {
      const int w = wa >= 0 ? wa : wb;
      const int ext = boundary_color(wa >= 0 ? idb : ida);
      term.sites = {w};
      term.logw = Vec::Zero(n_colors);
      term.logw[ext] = -J;
    }
    terms.push_back(std::move(term));
  }
  return SpinModel(ModelKind::PottsAF, sites, std::move(spins), std::move(terms));
}

SpinModel make_free_product(const std::vector<Vec>& marginals,
                            const std::vector<std::optional<Vec>>& values) {
  if (marginals.empty()) throw InvalidInput("free product: at least one site required");
  if (!values.empty() && values.size() != marginals.size())
    throw InvalidInput("free product: one value list per site when given");

  std::vector<SpinSpace> spins;
  std::vector<InteractionTerm> terms;
  std::vector<long> sites;
  for (std::size_t i = 0; i < marginals.size(); ++i) {
    const Vec& w = marginals[i];
    if (w.size() < 1) throw InvalidInput("free product: empty marginal");
    const Real total = w.sum();
    if (!(total > 0) || w.minCoeff() < -kMassTol || std::abs(total - 1.0) > 1e-9)
      throw InvalidInput("free product: marginal weights must be nonnegative and sum to one");
    Vec vals;
    if (!values.empty() && values[i]) {
      vals = *values[i];
      if (vals.size() != w.size()) throw InvalidInput("free product: value list size mismatch");
    } else {
      vals = Vec::LinSpaced(w.size(), 0.0, static_cast<Real>(w.size() - 1));
    }
    spins.push_back(SpinSpace{vals, Metric::trivial(static_cast<int>(w.size()))});

    InteractionTerm term;
    term.sites = {static_cast<int>(i)};
    term.logw = (w.array() / total).max(1e-300).log().matrix();
    terms.push_back(std::move(term));
    sites.push_back(static_cast<long>(i));
  }
  return SpinModel(ModelKind::FreeProduct, sites, std::move(spins), std::move(terms));
}

Metric quartic_grid(Real a, int points, std::optional<Real> halfwidth) {
  if (!(a > 0.0)) throw InvalidInput("quartic grid: a must be positive");
  if (points < 16) throw InvalidInput("quartic grid: at least 16 points required");
  const Real X = halfwidth.value_or(std::max(4.0, std::pow(40.0 / a, 0.25)));
  if (!(X > 0.0)) throw InvalidInput("quartic grid: halfwidth must be positive");
  return Metric::from_line_embedding(Vec::LinSpaced(points, -X, X));
}

std::pair<DiscreteDistribution, Real> phi4_single_site(Real a, Real b, const Metric& grid) {
  if (!(a > 0.0)) throw InvalidInput("phi4: a must be positive");
  if (!grid.embedding()) throw InvalidInput("phi4: grid metric must carry an embedding");
  const Vec& x = *grid.embedding();
  const Index n = x.size();
  if (n < 2) throw InvalidInput("phi4: grid too small");
  for (Index k = 0; k + 1 < n; ++k)
    if (!(x[k] < x[k + 1])) throw InvalidInput("phi4: grid points must be increasing");
  for (Index k = 0; k < n; ++k)
    if (std::abs(x[k] + x[n - 1 - k]) > 1e-12 * (1.0 + std::abs(x[n - 1])))
      throw InvalidInput("phi4: grid must be symmetric about 0");

  Vec trapz(n);
  trapz[0] = (x[1] - x[0]) / 2.0;
  trapz[n - 1] = (x[n - 1] - x[n - 2]) / 2.0;
  for (Index k = 1; k + 1 < n; ++k) trapz[k] = (x[k + 1] - x[k - 1]) / 2.0;

  Vec expo = -(a * x.array().pow(4) - b * x.array().square());
  expo.array() -= expo.maxCoeff();
  Vec w = expo.array().exp() * trapz.array();
  w /= w.sum();

  const Real sigma2 = x.array().square().matrix().dot(w);
  return {DiscreteDistribution::from_weights(w, 1e-6), sigma2};
}

SpinModel make_phi4(const std::vector<long>& sites, Real a, Real b,
                    const std::map<long, Real>& offset_couplings, const Metric& grid,
                    const std::map<long, Real>& boundary) {
  auto [m, sigma2] = phi4_single_site(a, b, grid);
  (void)sigma2;
  const Vec& x = *grid.embedding();
  std::vector<SpinSpace> spins(sites.size(), SpinSpace{x, grid});

  for (const auto& [k, J] : offset_couplings) {
    (void)J;
    if (k <= 0) throw InvalidInput("phi4: couplings are keyed by positive offsets");
  }
  for (const auto& [ext_id, val] : boundary) {
    (void)val;
    if (window_index(sites, ext_id) >= 0) {
      std::ostringstream msg;
      msg << "phi4: boundary site " << ext_id << " is inside the window";
      throw InvalidInput(msg.str());
    }
  }

  const Vec logm = m.dense(static_cast<int>(x.size())).array().max(1e-300).log();

  std::vector<InteractionTerm> terms;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    InteractionTerm term;
    term.sites = {static_cast<int>(i)};
    term.logw = logm;
    // Boundary pairs fold into a linear single-site tilt.
    Real tilt = 0.0;
    for (const auto& [ext_id, val] : boundary) {
      const long k = std::abs(ext_id - sites[i]);
      auto it = offset_couplings.find(k);
      if (it != offset_couplings.end()) tilt += it->second * val;
    }
    if (tilt != 0.0) term.logw += (tilt * x.array()).matrix();
    terms.push_back(std::move(term));
  }
  for (std::size_t i = 0; i < sites.size(); ++i)
    for (std::size_t j = i + 1; j < sites.size(); ++j) {
      const long k = std::abs(sites[j] - sites[i]);
      auto it = offset_couplings.find(k);
      if (it == offset_couplings.end() || it->second == 0.0) continue;
      InteractionTerm term;
      term.sites = {static_cast<int>(i), static_cast<int>(j)};
      const Index n = x.size();
      term.logw = Vec::Zero(n * n);
      for (Index u = 0; u < n; ++u)
        for (Index v = 0; v < n; ++v) term.logw[u + n * v] = it->second * x[u] * x[v];
      terms.push_back(std::move(term));
    }
  return SpinModel(ModelKind::Phi4Grid, sites, std::move(spins), std::move(terms));
}

}  // namespace gapcert
