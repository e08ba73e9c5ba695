#include "gapcert/transport.hpp"

#include "gapcert/wasserstein.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>

namespace gapcert {

EntropyValue relative_entropy(const Vec& nu, const Vec& mu) {
  if (nu.size() != mu.size()) throw InvalidInput("relative_entropy: table size mismatch");
  EntropyValue out;
  Real h = 0.0;
  for (Index a = 0; a < nu.size(); ++a) {
    if (nu[a] < -1e-12 || mu[a] < -1e-12)
      throw InvalidInput("relative_entropy: negative weight");
    if (nu[a] <= 0.0) continue;  // 0 log 0 = 0
    if (mu[a] <= 0.0) {
      out.finite = false;
      out.absolutely_continuous = false;
      out.value = std::numeric_limits<Real>::infinity();
      return out;
    }
    h += nu[a] * std::log(nu[a] / mu[a]);
  }
  out.value = std::max(h, 0.0);
  return out;
}

Mat neumann_inverse(const Mat& C) {
  const Real r = spectral_radius(C);
  if (!(r < 1.0)) throw InvalidInput("neumann_inverse: spectral radius must be below one");
  const Index n = C.rows();
  return (Mat::Identity(n, n) - C).partialPivLu().solve(Mat::Identity(n, n));
}

namespace {

// E^nu of W1 between the model's conditional and nu's conditional at site j.
Real expected_conditional_w1(const SpinModel& model, const Vec& nu, int j) {
  const StateSpace& space = model.space();
  const Metric& metric = model.spin(j).metric;
  const int rj = space.radix(j);
  Real acc = 0.0;
  for (std::size_t base = 0; base < space.size(); ++base) {
    if (space.coord(base, j) != 0) continue;
    Real slice = 0.0;
    Vec w(rj);
    for (int v = 0; v < rj; ++v) {
      w[v] = nu[static_cast<Index>(space.with_coord(base, j, v))];
      slice += w[v];
    }
    if (slice <= 0.0) continue;  // nu-null slice contributes nothing
    const DiscreteDistribution nuj = DiscreteDistribution::from_weights(w / slice, 1e-6);
    const DiscreteDistribution muj = model.conditional(j, base);
    const Real w1 = metric.is_trivial() ? tv_distance(muj, nuj) / 2.0
                                        : w1_exact(muj, nuj, metric).cost;
    acc += slice * w1;
  }
  return acc;
}

Real default_K(const SpinModel& model) {
  Real dmax = 0.0;
  for (int i = 0; i < model.num_sites(); ++i)
    dmax = std::max(dmax, model.spin(i).metric.diameter());
  if (!std::isfinite(dmax)) throw InvalidInput("transport checks: unbounded metric needs explicit K");
  return dmax * dmax / 4.0;
}

}  // namespace

AprioriResult apriori_check(const SpinModel& model, const DobrushinMatrix& matrix, const Vec& nu,
                            const std::optional<Vec>& f, std::size_t product_cap) {
  const StateSpace& space = model.space();
  if (nu.size() != static_cast<Index>(space.size()))
    throw InvalidInput("apriori_check: table size mismatch");
  const Vec mu = model.joint_table();
  const int n = model.num_sites();

  AprioriResult result;
  const Real r_sp = spectral_radius(matrix.C);
  const auto [norm1, norminf] = matrix_norms(matrix.C);
  (void)norminf;

  Vec cond_w1(n);
  for (int j = 0; j < n; ++j) cond_w1[j] = expected_conditional_w1(model, nu, j);

  if (f) {
    if (r_sp < 1.0) {
      const Mat D = neumann_inverse(matrix.C);
      const Vec delta_f = lipschitz_vector(*f, space, model.site_metrics());
      TransportCheck check;
      check.tag = "eq_4_1";
      check.lhs = std::abs(f->dot(mu - nu));
      check.rhs = delta_f.transpose() * D * cond_w1;
      check.margin = check.rhs - check.lhs;
      check.constants = {{"r_sp", r_sp}};
      result.mean_difference = check;
    } else {
      result.skip_reason = "r_sp(C) >= 1: duality-form estimate skipped";
    }
  }

  if (norm1 < 1.0) {
    TransportCheck check;
    check.tag = "eq_4_2";
    check.lhs = product_w1(mu, nu, space, model.site_metrics(), product_cap);
    check.rhs = cond_w1.sum() / (1.0 - norm1);
    check.margin = check.rhs - check.lhs;
    check.constants = {{"norm1", norm1}};
    result.product_w1 = check;
  } else if (result.skip_reason.empty()) {
    result.skip_reason = "|C|_1 >= 1: transport-form estimate skipped";
  }
  return result;
}

std::vector<TransportCheck> t1_check(const SpinModel& model, const DobrushinMatrix& matrix,
                                     const std::vector<Vec>& nus, std::optional<Real> K,
                                     std::size_t product_cap) {
  const Real norm1 = matrix_norms(matrix.C).first;
  if (!(norm1 < 1.0)) throw InvalidInput("t1_check: |C|_1 must be below one");
  const Real k_val = K ? *K : default_K(model);
  const Vec mu = model.joint_table();
  const Real nsites = static_cast<Real>(model.num_sites());

  std::vector<TransportCheck> checks;
  for (const Vec& nu : nus) {
    TransportCheck check;
    check.tag = "eq_4_5";
    check.constants = {{"K", k_val}, {"T", nsites}, {"norm1", norm1}};
    const EntropyValue h = relative_entropy(nu, mu);
    if (!h.finite) {
      check.lhs = product_w1(nu, mu, model.space(), model.site_metrics(), product_cap);
      check.rhs = std::numeric_limits<Real>::infinity();
      check.margin = std::numeric_limits<Real>::infinity();
      check.vacuous = true;  // infinite entropy: holds vacuously
    } else {
      check.lhs = product_w1(nu, mu, model.space(), model.site_metrics(), product_cap);
      check.rhs = std::sqrt(2.0 * k_val * nsites * h.value) / (1.0 - norm1);
      check.margin = check.rhs - check.lhs;
    }
    checks.push_back(std::move(check));
  }
  return checks;
}

std::vector<TransportCheck> hoeffding_check(const SpinModel& model, const DobrushinMatrix& matrix,
                                            const Vec& F, const std::vector<Real>& lambda_grid,
                                            std::optional<Real> K) {
  const Real norm1 = matrix_norms(matrix.C).first;
  if (!(norm1 < 1.0)) throw InvalidInput("hoeffding_check: |C|_1 must be below one");
  const Real k_val = K ? *K : default_K(model);
  const Vec mu = model.joint_table();
  const Real alpha = lipschitz_vector(F, model.space(), model.site_metrics()).maxCoeff();
  const Real mean = mu.dot(F);
  const Real nsites = static_cast<Real>(model.num_sites());

  std::vector<TransportCheck> checks;
  for (Real lambda : lambda_grid) {
    TransportCheck check;
    check.tag = "eq_4_6";
    check.constants = {{"K", k_val}, {"T", nsites}, {"norm1", norm1},
                       {"alpha", alpha}, {"lambda", lambda}};
    check.lhs = mu.dot((lambda * (F.array() - mean)).exp().matrix());
    const Real denom = 1.0 - norm1;
    check.rhs = std::exp(lambda * lambda * k_val * nsites * alpha * alpha / (2.0 * denom * denom));
    check.margin = check.rhs - check.lhs;
    checks.push_back(std::move(check));
  }
  return checks;
}

Vec clt_functional(const SpinModel& model, const Vec& site_f, const Vec& mu) {
  const StateSpace& space = model.space();
  const int n = model.num_sites();
  for (int i = 0; i < n; ++i)
    if (site_f.size() < space.radix(i))
      throw InvalidInput("clt_functional: observable not defined on every spin value");

  // Per-site means under the joint marginals.
  Vec site_mean = Vec::Zero(n);
  for (std::size_t a = 0; a < space.size(); ++a)
    for (int i = 0; i < n; ++i) site_mean[i] += mu[static_cast<Index>(a)] * site_f[space.coord(a, i)];

  Vec F = Vec::Zero(static_cast<Index>(space.size()));
  const Real scale = 1.0 / std::sqrt(static_cast<Real>(n));
  for (std::size_t a = 0; a < space.size(); ++a) {
    Real v = 0.0;
    for (int i = 0; i < n; ++i) v += site_f[space.coord(a, i)] - site_mean[i];
    F[static_cast<Index>(a)] = v * scale;
  }
  return F;
}

std::vector<TransportCheck> hoeffding_clt_check(const SpinModel& model,
                                                const DobrushinMatrix& matrix, const Vec& site_f,
                                                const std::vector<Real>& lambda_grid) {
  const Real norm1 = matrix_norms(matrix.C).first;
  if (!(norm1 < 1.0)) throw InvalidInput("hoeffding_clt_check: |C|_1 must be below one");
  const Vec mu = model.joint_table();
  const Vec F = clt_functional(model, site_f, mu);
  const Real mean = mu.dot(F);

  Real lo = std::numeric_limits<Real>::infinity(), hi = -lo;
  for (int i = 0; i < model.num_sites(); ++i)
    for (int v = 0; v < model.space().radix(i); ++v) {
      lo = std::min(lo, site_f[v]);
      hi = std::max(hi, site_f[v]);
    }
  const Real range = hi - lo;

  std::vector<TransportCheck> checks;
  for (Real lambda : lambda_grid) {
    TransportCheck check;
    check.tag = "eq_4_6_clt";
    check.constants = {{"range", range}, {"norm1", norm1}, {"lambda", lambda}};
    check.lhs = mu.dot((lambda * (F.array() - mean)).exp().matrix());
    const Real denom = 1.0 - norm1;
    check.rhs = std::exp(lambda * lambda * range * range / (8.0 * denom * denom));
    check.margin = check.rhs - check.lhs;
    checks.push_back(std::move(check));
  }
  return checks;
}

std::vector<Vec> tilted_family(const Vec& mu, const Vec& F, const std::vector<Real>& lambdas) {
  if (mu.size() != F.size()) throw InvalidInput("tilted_family: table size mismatch");
  if (mu.minCoeff() <= 0.0) throw InvalidInput("tilted_family: mu must be strictly positive");
  std::vector<Vec> out;
  out.reserve(lambdas.size());
  for (Real lambda : lambdas) {
    Vec logw = (lambda * F.array() + mu.array().log()).matrix();
    logw.array() -= logw.maxCoeff();
    Vec w = logw.array().exp();
    out.push_back(w / w.sum());
  }
  return out;
}

}  // namespace gapcert
