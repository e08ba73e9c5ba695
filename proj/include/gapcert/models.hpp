#pragma once

#include "gapcert/distribution.hpp"
#include "gapcert/metric.hpp"
#include "gapcert/state_space.hpp"
#include "gapcert/types.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gapcert {

/// One site's finite spin space: a numeric value per point (spin labels,
/// colors, grid coordinates) plus the ground metric.
struct SpinSpace {
  Vec values;
  Metric metric;
  int size() const { return static_cast<int>(values.size()); }
};

enum class ModelKind { Ising, PottsAF, GaussianPair, Phi4Grid, FreeProduct };

std::string to_string(ModelKind kind);

/// Local log-weight contribution over a subset of window sites. The table is
/// indexed mixed-radix little-endian in the order of `sites`.
struct InteractionTerm {
  std::vector<int> sites;  // window site indexes, ascending
  Vec logw;
};

/// Finite-window spin model with enumerable configurations. The Boltzmann
/// weight of a configuration is exp(sum of term log-weights); single-site
/// reference measures and boundary contributions are folded into the terms.
class SpinModel {
 public:
  SpinModel(ModelKind kind, std::vector<long> site_ids, std::vector<SpinSpace> spins,
            std::vector<InteractionTerm> terms);

  ModelKind kind() const { return kind_; }
  int num_sites() const { return static_cast<int>(spins_.size()); }
  const std::vector<long>& site_ids() const { return site_ids_; }
  const SpinSpace& spin(int site) const { return spins_[static_cast<std::size_t>(site)]; }
  const StateSpace& space() const { return space_; }
  const std::vector<InteractionTerm>& terms() const { return terms_; }

  std::vector<Metric> site_metrics() const;

  /// Heat-bath kernel at `site` given the rest of the configuration (the
  /// coordinate at `site` itself is ignored).
  DiscreteDistribution conditional(int site, std::size_t state) const;

  /// Normalized joint table over the whole window.
  Vec joint_table(std::size_t cap = kJointCap) const;

  /// Conditional distribution of the sites in `block` given the others, as a
  /// table over the block's mixed-radix substates (little-endian in block
  /// order).
  Vec conditional_block(const std::vector<int>& block, std::size_t state,
                        std::size_t cap = kJointCap) const;

  StateSpace block_space(const std::vector<int>& block) const;

 private:
  Real term_logw(const InteractionTerm& term, std::size_t state) const;

  ModelKind kind_;
  std::vector<long> site_ids_;
  std::vector<SpinSpace> spins_;
  std::vector<InteractionTerm> terms_;
  StateSpace space_;
  std::vector<std::vector<int>> terms_by_site_;
};

/// Two-site model with unit-variance jointly Gaussian spins and correlation
/// rho; conditionals are kept in closed form instead of on a grid.
struct GaussianPair {
  Real rho;

  explicit GaussianPair(Real rho_) : rho(rho_) {
    if (!(std::abs(rho_) < 1.0)) throw InvalidInput("GaussianPair: |rho| must be < 1");
  }

  /// Conditional law of one coordinate given the other's value.
  std::pair<Real, Real> conditional_mean_var(Real other) const {
    return {rho * other, 1.0 - rho * rho};
  }

  /// Action of the heat-bath generator on linear functions a*x1 + b*x2,
  /// in the coefficient basis.
  Mat linear_restriction() const {
    Mat op(2, 2);
    op << -1.0, rho, rho, -1.0;
    return op;
  }

  /// Single-site Poincare constant of the conditionals.
  Real lambda0() const { return 1.0 / (1.0 - rho * rho); }
};

// ---- Model builders ----------------------------------------------------

struct SubsetCoupling {
  std::vector<long> sites;  // site ids (may include boundary sites)
  Real J = 0.0;
};

/// Spins in {-1,+1}; Boltzmann weight exp(sum_S J(S) * prod_{i in S} x_i).
/// Couplings touching sites outside `sites` pick their values from
/// `boundary` (site id -> spin value in {-1,+1}).
SpinModel make_ising(const std::vector<long>& sites, const std::vector<SubsetCoupling>& couplings,
                     const std::map<long, Real>& boundary = {});

/// Antiferromagnetic Potts: colors {1..n_colors}, per-edge weight
/// exp(-J * 1{x_i = x_j}) with J > 0 penalizing equal neighbor colors.
SpinModel make_potts(const std::vector<long>& sites, int n_colors,
                     const std::vector<std::pair<long, long>>& edges, Real J,
                     const std::map<long, int>& boundary = {});

/// Independent sites with prescribed marginals (trivial per-site metric
/// unless values are supplied, which only label the points).
SpinModel make_free_product(const std::vector<Vec>& marginals,
                            const std::vector<std::optional<Vec>>& values = {});

/// Uniform grid of `points` grid points on [-halfwidth, halfwidth] with the
/// line metric |x - y|. Default halfwidth max(4, (40/a)^{1/4}) keeps the
/// truncated single-site tail mass below 1e-12.
Metric quartic_grid(Real a, int points, std::optional<Real> halfwidth = {});

/// Single-site reference measure m proportional to exp(-(a x^4 - b x^2)) on
/// the grid with trapezoid weighting, and its variance.
std::pair<DiscreteDistribution, Real> phi4_single_site(Real a, Real b, const Metric& grid);

/// Scalar-field chain on integer sites with pair weight
/// exp(J(|i-j|) x_i x_j) and the single-site reference measure above.
/// `offset_couplings` maps positive offsets k to J(k); boundary maps exterior
/// integer sites to real spin values (snapped to the nearest grid point).
SpinModel make_phi4(const std::vector<long>& sites, Real a, Real b,
                    const std::map<long, Real>& offset_couplings, const Metric& grid,
                    const std::map<long, Real>& boundary = {});

}  // namespace gapcert
