#pragma once

#include "gapcert/models.hpp"
#include "gapcert/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace gapcert {

/// Interdependence matrix of a model: entry (i,j) is the largest Wasserstein
/// move of the conditional at site i per unit ground distance at site j, over
/// all configuration pairs agreeing off j.
struct DobrushinMatrix {
  Mat C;
  std::string metric_tag;

  /// Maximizing configuration pair for an entry: the shared configuration
  /// (as a full state with the coordinate at j arbitrary) and the two values
  /// taken at j.
  struct Witness {
    std::size_t base_state = 0;
    int value_a = 0;
    int value_b = 0;
  };
  std::vector<std::optional<Witness>> witness;  // row-major, optional
};

/// Exhaustive evaluation over all boundary configurations and value pairs.
DobrushinMatrix interdependence_matrix(const SpinModel& model, bool record_witness = false);

/// Closed form for the Gaussian pair under the Euclidean metric.
DobrushinMatrix interdependence_matrix(const GaussianPair& model);

/// Spectral radius of a nonnegative square matrix: dense eigensolve up to
/// `dense_threshold`, shifted power iteration on I + C above it.
Real spectral_radius(const Mat& C, int dense_threshold = 64);

/// (max column sum, max row sum).
std::pair<Real, Real> matrix_norms(const Mat& C);

struct GapCertificate {
  Real r_sp = 0.0;
  Real norm1 = 0.0;
  Real norminf = 0.0;
  Real lambda1_bound = 0.0;  // 1 - r_sp
  bool valid = false;        // r_sp < 1
  std::optional<Real> lambda0;
  std::optional<Real> lambda1_grad_bound;  // lambda0 * (1 - r_sp)
};

GapCertificate gap_certificate(const DobrushinMatrix& matrix, std::optional<Real> lambda0 = {});
GapCertificate gap_certificate(const SpinModel& model, std::optional<Real> lambda0 = {});
/// For the Gaussian pair, lambda0 defaults to its closed-form value.
GapCertificate gap_certificate(const GaussianPair& model, std::optional<Real> lambda0 = {});

/// One named constant of a closed-form bound report. The tag names the
/// serialized report field; `valid` carries the applicability flag when the
/// constant comes with a condition.
struct BoundValue {
  std::string tag;
  Real value = 0.0;
  std::optional<bool> valid;
  std::string note;
};

struct BoundReport {
  std::string family;
  std::vector<std::pair<std::string, Real>> params;
  std::vector<BoundValue> values;

  const BoundValue* find(const std::string& tag) const;
  Real value_of(const std::string& tag) const;
};

/// Interaction-family bound for two-valued spin systems:
/// r = max_i sum_{S containing i} (|S| - 1) tanh|J(S)|.
Real ising_r_bound(const std::vector<SubsetCoupling>& couplings);

/// Antiferromagnet color-count bound: per-edge entry bound 1/(N - 2d) and
/// norm bound 2d/(N - 2d), applicable for N > 2d, certifying for N > 4d,
/// independent of the interaction strength.
BoundReport potts_bound(int n_colors, int lattice_dim);

/// Sphere-valued pair-interaction family constants, parameterized by sphere
/// dimension p and total coupling strength gamma.
BoundReport nvector_bounds(int p, Real gamma);

/// Scalar-field chain constants from the single-site variance sigma^2 and the
/// summed couplings gamma = sum_k |J(k)| (offsets counted with both signs).
BoundReport phi4_bounds(Real a, Real b, const std::vector<std::pair<long, Real>>& offset_couplings,
                        const Metric& grid, std::optional<Real> K0 = {});

}  // namespace gapcert
