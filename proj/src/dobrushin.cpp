#include "gapcert/dobrushin.hpp"

#include "gapcert/wasserstein.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace gapcert {

DobrushinMatrix interdependence_matrix(const SpinModel& model, bool record_witness) {
  const int n = model.num_sites();
  const StateSpace& space = model.space();

  DobrushinMatrix out;
  out.C = Mat::Zero(n, n);
  bool all_trivial = true;
  for (int i = 0; i < n; ++i)
    if (!model.spin(i).metric.is_trivial()) all_trivial = false;
  out.metric_tag = all_trivial ? "trivial" : "embedded";
  if (record_witness) out.witness.assign(static_cast<std::size_t>(n) * n, std::nullopt);

  for (int i = 0; i < n; ++i) {
    const Metric& metric_i = model.spin(i).metric;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const Metric& metric_j = model.spin(j).metric;
      const int rj = space.radix(j);
      Real best = 0.0;
      std::optional<DobrushinMatrix::Witness> best_witness;

      // All shared configurations: states with canonical coordinates at i, j.
      for (std::size_t base = 0; base < space.size(); ++base) {
        if (space.coord(base, i) != 0 || space.coord(base, j) != 0) continue;
        for (int b = 0; b < rj; ++b) {
          const DiscreteDistribution nu1 = model.conditional(i, space.with_coord(base, j, b));
          for (int b2 = b + 1; b2 < rj; ++b2) {
            const Real d = metric_j(b, b2);
            if (d <= 0.0) continue;  // 0/0 ratios skipped
            const DiscreteDistribution nu2 = model.conditional(i, space.with_coord(base, j, b2));
            const Real w = metric_i.is_trivial() ? tv_distance(nu1, nu2) / 2.0
                                                 : w1_exact(nu1, nu2, metric_i).cost;
            const Real ratio = w / d;
            if (ratio > best) {
              best = ratio;
              if (record_witness) best_witness = DobrushinMatrix::Witness{base, b, b2};
            }
          }
        }
      }
      out.C(i, j) = best;
      if (record_witness)
        out.witness[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) +
                    static_cast<std::size_t>(j)] = best_witness;
    }
  }
  return out;
}

DobrushinMatrix interdependence_matrix(const GaussianPair& model) {
  DobrushinMatrix out;
  out.C = Mat::Zero(2, 2);
  // Translation identity: W1 between same-variance Gaussians is the mean gap.
  out.C(0, 1) = out.C(1, 0) = std::abs(model.rho);
  out.metric_tag = "euclidean";
  return out;
}

Real spectral_radius(const Mat& C, int dense_threshold) {
  const Index n = C.rows();
  if (n == 0 || C.cols() != n) throw InvalidInput("spectral_radius: square matrix required");
  if (C.minCoeff() < 0.0) throw InvalidInput("spectral_radius: matrix must be nonnegative");
  if (n == 1) return C(0, 0);

  if (n <= dense_threshold) {
    Eigen::EigenSolver<Mat> solver(C, /*computeEigenvectors=*/false);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
  }

  // Shifted power iteration: I + C is nonnegative with positive diagonal, so
  // the Collatz-Wielandt brackets close in on its Perron root.
  Vec v = Vec::Ones(n) / std::sqrt(static_cast<Real>(n));
  Real lo = 0.0, hi = 0.0;
  for (int iter = 0; iter < 200000; ++iter) {
    Vec w = v + C * v;
    lo = std::numeric_limits<Real>::infinity();
    hi = 0.0;
    for (Index k = 0; k < n; ++k) {
      const Real ratio = w[k] / v[k];
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    if (hi - lo <= 1e-13 * std::max(1.0, hi)) break;
    v = w / w.norm();
  }
  return (lo + hi) / 2.0 - 1.0;
}

std::pair<Real, Real> matrix_norms(const Mat& C) {
  if (C.rows() != C.cols()) throw InvalidInput("matrix_norms: square matrix required");
  const Real norm1 = C.cwiseAbs().colwise().sum().maxCoeff();
  const Real norminf = C.cwiseAbs().rowwise().sum().maxCoeff();
  return {norm1, norminf};
}

GapCertificate gap_certificate(const DobrushinMatrix& matrix, std::optional<Real> lambda0) {
  GapCertificate cert;
  cert.r_sp = spectral_radius(matrix.C);
  std::tie(cert.norm1, cert.norminf) = matrix_norms(matrix.C);
  cert.lambda1_bound = 1.0 - cert.r_sp;
  cert.valid = cert.r_sp < 1.0;
  cert.lambda0 = lambda0;
  if (lambda0) cert.lambda1_grad_bound = *lambda0 * (1.0 - cert.r_sp);
  return cert;
}

GapCertificate gap_certificate(const SpinModel& model, std::optional<Real> lambda0) {
  return gap_certificate(interdependence_matrix(model), lambda0);
}

GapCertificate gap_certificate(const GaussianPair& model, std::optional<Real> lambda0) {
  if (!lambda0) lambda0 = model.lambda0();
  return gap_certificate(interdependence_matrix(model), lambda0);
}

const BoundValue* BoundReport::find(const std::string& tag) const {
  for (const BoundValue& v : values)
    if (v.tag == tag) return &v;
  return nullptr;
}

Real BoundReport::value_of(const std::string& tag) const {
  const BoundValue* v = find(tag);
  if (!v) throw InvalidInput("BoundReport: unknown tag " + tag);
  return v->value;
}

Real ising_r_bound(const std::vector<SubsetCoupling>& couplings) {
  std::vector<long> sites;
  for (const SubsetCoupling& cpl : couplings)
    for (long id : cpl.sites) sites.push_back(id);
  std::sort(sites.begin(), sites.end());
  sites.erase(std::unique(sites.begin(), sites.end()), sites.end());

  Real r = 0.0;
  for (long i : sites) {
    Real row = 0.0;
    for (const SubsetCoupling& cpl : couplings) {
      if (std::find(cpl.sites.begin(), cpl.sites.end(), i) == cpl.sites.end()) continue;
      row += static_cast<Real>(cpl.sites.size() - 1) * std::tanh(std::abs(cpl.J));
    }
    r = std::max(r, row);
  }
  return r;
}

BoundReport potts_bound(int n_colors, int lattice_dim) {
  if (n_colors < 2 || lattice_dim < 1)
    throw InvalidInput("potts_bound: need n_colors >= 2 and lattice_dim >= 1");
  BoundReport report;
  report.family = "potts_af";
  report.params = {{"colors", static_cast<Real>(n_colors)},
                   {"lattice_dim", static_cast<Real>(lattice_dim)}};
  const int N = n_colors, d = lattice_dim;
  const bool applicable = N > 2 * d;
  const Real edge = applicable ? 1.0 / static_cast<Real>(N - 2 * d)
                               : std::numeric_limits<Real>::quiet_NaN();
  const Real norm = applicable ? 2.0 * d / static_cast<Real>(N - 2 * d)
                               : std::numeric_limits<Real>::quiet_NaN();
  report.values.push_back({"ex_5_2_cij_bound", edge, applicable,
                           applicable ? "per adjacent pair, interior degree 2d"
                                      : "inapplicable: colors <= 2*dim"});
  report.values.push_back({"ex_5_2_norm_bound", norm, N > 4 * d,
                           "independent of the interaction strength J"});
  return report;
}

BoundReport nvector_bounds(int p, Real gamma) {
  if (p < 1 || gamma < 0.0) throw InvalidInput("nvector_bounds: need p >= 1 and gamma >= 0");
  BoundReport report;
  report.family = "nvector";
  report.params = {{"p", static_cast<Real>(p)}, {"gamma", gamma}};

  const Real pi2_8 = std::numbers::pi * std::numbers::pi / 8.0;
  const Real t = pi2_8 * (static_cast<Real>(p) - 1.0 - gamma);
  const Real lambda0 = std::abs(t) < 1e-12 ? 1.0 : t / (1.0 - std::exp(-t));
  report.values.push_back({"eq_5_2_lambda0", lambda0, {}, "single-site Poincare constant"});

  const Real K0 = std::min(2.0 * pi2_8, std::exp(2.0 * gamma) / static_cast<Real>(p));
  report.values.push_back({"eq_5_4_K0", K0, {}, "single-site transport constant"});

  const Real sigmaE2 = std::min(1.0, 1.0 / lambda0);
  const Real sigmaE = std::sqrt(sigmaE2);
  report.values.push_back({"eq_5_6_sigmaE2", sigmaE2, {}, "variance bound, Euclidean metric"});

  const Real sqrt_p1 = std::sqrt(static_cast<Real>(p) + 1.0);
  const Real cond_5_7 = sqrt_p1 / sigmaE;
  report.values.push_back(
      {"eq_5_7_gamma_max", cond_5_7, gamma < cond_5_7, "gap bounds require gamma below this"});

  const Real gap = 1.0 - gamma * sigmaE / sqrt_p1;
  report.values.push_back({"eq_5_8_lambda1_lower", gap, gamma < cond_5_7, ""});
  report.values.push_back({"eq_5_8_lambda1_grad_lower", gap * lambda0, gamma < cond_5_7, ""});

  report.values.push_back({"eq_5_5_cij_factor", sigmaE / sqrt_p1, {},
                           "per-pair entry bound factor on |J(i-j)|"});

  const Real cond_5_9 = std::sqrt((static_cast<Real>(p) + 1.0) * lambda0);
  report.values.push_back({"eq_5_9_gamma_max", cond_5_9, gamma < cond_5_9,
                           "transport constant requires gamma below this"});

  const Real denom = cond_5_9 - gamma;
  const Real Ktilde = gamma < cond_5_9
                          ? K0 * lambda0 * (static_cast<Real>(p) + 1.0) / (denom * denom)
                          : std::numeric_limits<Real>::quiet_NaN();
  report.values.push_back({"eq_5_10_Ktilde", Ktilde, gamma < cond_5_9, "per-site factor of |T|"});

  const Real a_513 = (8.0 / (std::numbers::pi * std::numbers::pi)) *
                     (static_cast<Real>(p) - 1.0) / (static_cast<Real>(p) + 1.0);
  const Real cond_5_13 = 2.0 / (1.0 + std::sqrt(1.0 + 4.0 * a_513)) * (static_cast<Real>(p) - 1.0);
  report.values.push_back(
      {"eq_5_13_gamma_max", cond_5_13, gamma < cond_5_13, "sufficient for the gap condition"});

  const Real be = static_cast<Real>(p) - 1.0 - 2.0 * gamma;
  report.values.push_back(
      {"eq_5_14_curvature_gap", be, be > 0.0, "comparison curvature criterion"});
  return report;
}

BoundReport phi4_bounds(Real a, Real b, const std::vector<std::pair<long, Real>>& offset_couplings,
                        const Metric& grid, std::optional<Real> K0) {
  auto [m, sigma2] = phi4_single_site(a, b, grid);
  (void)m;

  Real gamma = 0.0;
  for (const auto& [k, J] : offset_couplings) {
    if (k <= 0) throw InvalidInput("phi4_bounds: couplings are keyed by positive offsets");
    gamma += 2.0 * std::abs(J);  // both signs of each offset
  }

  BoundReport report;
  report.family = "phi4_grid";
  report.params = {{"a", a}, {"b", b}, {"grid_points", static_cast<Real>(grid.size())}};

  report.values.push_back({"eq_5_17_sigma2", sigma2, {}, "single-site variance"});
  const bool cond = gamma < 1.0 / sigma2;
  report.values.push_back({"eq_5_18_gamma", gamma, cond, "requires gamma < 1/sigma^2, strict"});
  report.values.push_back({"eq_5_19_lambda1_lower", 1.0 - sigma2 * gamma, cond, ""});
  report.values.push_back({"eq_5_21_cij_factor", sigma2, {},
                           "per-pair entry bound factor on |J(i-j)|"});
  for (const auto& [k, J] : offset_couplings)
    report.values.push_back({"eq_5_21_cij_bound_offset_" + std::to_string(k),
                             sigma2 * std::abs(J), {}, ""});
  if (K0) {
    const Real denom = 1.0 - gamma * sigma2;
    report.values.push_back({"eq_5_20_Ktilde",
                             cond ? *K0 / (denom * denom) : std::numeric_limits<Real>::quiet_NaN(),
                             cond, "per-site factor of |T|"});
  } else {
    report.values.push_back({"eq_5_20_Ktilde", std::numeric_limits<Real>::quiet_NaN(), false,
                             "single-site transport constant K0 not supplied"});
  }
  return report;
}

}  // namespace gapcert
