#pragma once

#include "gapcert/dobrushin.hpp"
#include "gapcert/models.hpp"
#include "gapcert/types.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gapcert {

struct EntropyValue {
  Real value = 0.0;
  bool finite = true;  // false when nu charges a mu-null state
  bool absolutely_continuous = true;
};

/// sum nu(a) log(nu(a)/mu(a)) with 0 log 0 = 0; +infinity flag when nu
/// charges a state of zero mu-mass.
EntropyValue relative_entropy(const Vec& nu, const Vec& mu);

/// (I - C)^{-1} for a nonnegative matrix with spectral radius below one.
Mat neumann_inverse(const Mat& C);

struct TransportCheck {
  std::string tag;
  Real lhs = 0.0, rhs = 0.0;
  Real margin = 0.0;  // rhs - lhs
  bool vacuous = false;
  std::map<std::string, Real> constants;
};

struct AprioriResult {
  std::optional<TransportCheck> mean_difference;  // eq_4_1
  std::optional<TransportCheck> product_w1;       // eq_4_2
  std::string skip_reason;                        // set when a norm condition failed
};

/// Dobrushin a-priori estimates for a test measure nu (full table): the
/// duality form needs a test function f and r_sp(C) < 1; the transport form
/// needs |C|_1 < 1. Conditionals of nu come from exact marginalization.
AprioriResult apriori_check(const SpinModel& model, const DobrushinMatrix& matrix, const Vec& nu,
                            const std::optional<Vec>& f, std::size_t product_cap = kProductCap);

/// Product-metric transport inequality against sqrt(2 K |T| h(nu/mu)) /
/// (1 - |C|_1). K defaults to (max site diameter)^2 / 4 for bounded metrics.
std::vector<TransportCheck> t1_check(const SpinModel& model, const DobrushinMatrix& matrix,
                                     const std::vector<Vec>& nus, std::optional<Real> K = {},
                                     std::size_t product_cap = kProductCap);

/// Exact moment-generating-function bound for lambda * (F - mean F) against
/// exp(lambda^2 K |T| alpha^2 / (2 (1-|C|_1)^2)), alpha = max_i delta_i(F).
std::vector<TransportCheck> hoeffding_check(const SpinModel& model, const DobrushinMatrix& matrix,
                                            const Vec& F, const std::vector<Real>& lambda_grid,
                                            std::optional<Real> K = {});

/// Normalized CLT-style functional sum_i (f(x_i) - mean f(x_i)) / sqrt(|T|)
/// from a per-point observable shared across sites.
Vec clt_functional(const SpinModel& model, const Vec& site_f, const Vec& mu);

/// MGF bound for the CLT functional: exp(lambda^2 (b-a)^2 / (8 (1-|C|_1)^2))
/// where [a, b] is the range of the per-site observable.
std::vector<TransportCheck> hoeffding_clt_check(const SpinModel& model,
                                                const DobrushinMatrix& matrix, const Vec& site_f,
                                                const std::vector<Real>& lambda_grid);

/// Exponentially tilted test measures nu_lambda proportional to
/// exp(lambda F) mu; always absolutely continuous w.r.t. mu.
std::vector<Vec> tilted_family(const Vec& mu, const Vec& F, const std::vector<Real>& lambdas);

}  // namespace gapcert
