#pragma once

#include "gapcert/dobrushin.hpp"
#include "gapcert/models.hpp"
#include "gapcert/state_space.hpp"
#include "gapcert/types.hpp"

#include <optional>
#include <vector>

namespace gapcert {

/// Dense Markov generator over the mixed-radix encoded state space, with the
/// stationary table when known. Rows sum to zero; off-diagonal entries are
/// nonnegative.
struct GeneratorMatrix {
  Mat L;
  Vec mu;  // empty when unknown
  StateSpace space;
  int num_sites = 0;
  bool reversible = false;
};

/// Heat-bath generator: each site resamples from its conditional at rate 1.
GeneratorMatrix build_generator(const SpinModel& model, std::size_t cap = kJointCap);

/// Smallest nonzero eigenvalue of -L, via the similarity transform that makes
/// a reversible generator symmetric. Requires strictly positive mu.
Real exact_spectral_gap(const GeneratorMatrix& gen);

/// e^{tL} f by uniformization: L = n(P - I) with P stochastic, Poisson-
/// weighted powers truncated with tail mass below 1e-13. Preserves constants
/// and the range of f.
Vec semigroup_apply(const GeneratorMatrix& gen, const Vec& f, Real t);

/// e^{tM} by a shifted nonnegative power series with tail control and
/// repeated squaring. For M with nonnegative off-diagonal entries the result
/// is entrywise nonnegative.
Mat matexp_small(const Mat& M, Real t);

struct ContractionRow {
  Real t = 0.0;
  int site = 0;
  Real delta_actual = 0.0;
  Real delta_bound = 0.0;
  Real margin = 0.0;  // bound - actual
};

struct ContractionAggregate {
  Real t = 0.0;
  Real sum_actual = 0.0, sum_bound = 0.0;
  Real max_actual = 0.0, max_bound = 0.0;
};

struct ContractionReport {
  std::vector<ContractionRow> rows;
  std::vector<ContractionAggregate> aggregates;
  Real worst_margin = 0.0;
  bool pass(Real tol = kIneqTol) const { return worst_margin >= -tol; }
};

/// Checks the per-site oscillation decay of the semigroup against the
/// matrix-exponential bound with the model's interdependence matrix, plus the
/// aggregated row/column-norm forms.
ContractionReport check_contraction(const SpinModel& model, const DobrushinMatrix& matrix,
                                    const Vec& f, const std::vector<Real>& t_grid,
                                    std::size_t cap = kJointCap);

/// Local jump-rate family: member (S, J_S) holds, for every full
/// configuration x, a finite nonnegative measure on the substates of S.
struct JumpRateFamily {
  struct Member {
    std::vector<int> sites;  // window site indexes, ascending
    Mat rates;               // |space| rows, |E^S| columns
  };
  StateSpace space;
  std::vector<Metric> metrics;
  std::vector<Member> members;
};

/// Block heat-bath family: each listed block resamples from its conditional
/// at rate 1 (singleton blocks recover the plain heat-bath dynamics).
JumpRateFamily heat_bath_family(const SpinModel& model,
                                const std::vector<std::vector<int>>& blocks,
                                std::size_t cap = kJointCap);

struct IPSConstants {
  Mat c_exact;                    // aggregated from the per-member LP constants
  Mat c_tv;                       // aggregated from the TV/2 bounds (NaN entries when unavailable)
  std::vector<Vec> member_exact;  // per member: c_S(j) over j
  std::vector<Vec> member_tv;
  Real eta = 0.0;
  bool mass_uniform = true;             // J_S(x, E^S) independent of x for all S
  std::vector<int> nonuniform_members;  // members whose total mass varies with x
  bool exact_available = true;          // false when some member exceeded the LP cap
};

/// Optimal per-member constants (exact when the block fits the LP cap, with
/// the TV/2 bound alongside for trivial metrics), their row aggregation, and
/// the minimal total jump rate eta.
IPSConstants ips_constants(const JumpRateFamily& family, std::size_t lp_cap = kBlockLpCap);

/// Assembles the generator of the family; conservative, reversibility not
/// assumed (mu left empty).
GeneratorMatrix build_ips_generator(const JumpRateFamily& family, std::size_t cap = kJointCap);

/// Oscillation decay of the family semigroup against e^{-t(eta I - C)}.
ContractionReport check_ips_contraction(const JumpRateFamily& family, const Mat& C, Real eta,
                                        const Vec& f, const std::vector<Real>& t_grid,
                                        std::size_t cap = kJointCap);

struct DecayRow {
  Real t = 0.0;
  Real lhs = 0.0, rhs = 0.0, margin = 0.0;
};

struct InvariantDecayReport {
  bool unique = false;
  int multiplicity = 1;
  Vec invariant;
  std::vector<DecayRow> rows;
  Real worst_margin = 0.0;
  bool pass(Real tol = kIneqTol) const { return unique && worst_margin >= -tol; }
};

/// Transport decay of P_t(x0, .) toward the invariant measure against the
/// rate eta - |C|_1 and the invariant first moment of the product metric.
InvariantDecayReport invariant_w1_decay(const JumpRateFamily& family, const Mat& C, Real eta,
                                        std::size_t x0, const std::vector<Real>& t_grid,
                                        std::size_t product_cap = kProductCap);

}  // namespace gapcert
