#include "gapcert/glauber.hpp"

#include "gapcert/simplex.hpp"
#include "gapcert/wasserstein.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <tuple>

namespace gapcert {

namespace {

void check_generator(const GeneratorMatrix& gen) {
  const Index n = gen.L.rows();
  const Real scale = 1.0 + gen.L.cwiseAbs().maxCoeff();
  for (Index a = 0; a < n; ++a) {
    if (std::abs(gen.L.row(a).sum()) > 1e-10 * scale)
      throw InternalError("generator row does not sum to zero");
    for (Index b = 0; b < n; ++b)
      if (a != b && gen.L(a, b) < -1e-12 * scale)
        throw InternalError("negative off-diagonal generator entry");
  }
  if (gen.mu.size() == n) {
    const Real residual = (gen.mu.transpose() * gen.L).cwiseAbs().maxCoeff();
    if (residual > 1e-8) throw InternalError("generator stationarity residual too large");
  }
}

}  // namespace

GeneratorMatrix build_generator(const SpinModel& model, std::size_t cap) {
  const StateSpace& space = model.space();
  if (space.size() > cap) throw SizeLimit("build_generator: state space exceeds cap");
  const auto n = static_cast<Index>(space.size());

  GeneratorMatrix gen;
  gen.space = space;
  gen.num_sites = model.num_sites();
  gen.reversible = true;
  gen.L = Mat::Zero(n, n);
  for (std::size_t a = 0; a < space.size(); ++a) {
    for (int i = 0; i < model.num_sites(); ++i) {
      const DiscreteDistribution cond = model.conditional(i, a);
      const int cur = space.coord(a, i);
      Real stay = 0.0;
      for (int k = 0; k < cond.size(); ++k) {
        const int v = cond.support[static_cast<std::size_t>(k)];
        const Real w = cond.weights[k];
        if (v == cur) {
          stay = w;
        } else {
          gen.L(static_cast<Index>(a), static_cast<Index>(space.with_coord(a, i, v))) += w;
        }
      }
      gen.L(static_cast<Index>(a), static_cast<Index>(a)) += stay - 1.0;
    }
  }
  gen.mu = model.joint_table(cap);
  check_generator(gen);
  return gen;
}

Real exact_spectral_gap(const GeneratorMatrix& gen) {
  const Index n = gen.L.rows();
  if (n < 2) throw InvalidInput("exact_spectral_gap: need at least two states");
  if (!gen.reversible || gen.mu.size() != n)
    throw UnsupportedModel("exact_spectral_gap: reversible generator with stationary table required");
  if (gen.mu.minCoeff() <= 0.0)
    throw UnsupportedModel("exact_spectral_gap: stationary table must be strictly positive");

  const Vec sqrt_mu = gen.mu.cwiseSqrt();
  Mat sym = sqrt_mu.asDiagonal() * gen.L * sqrt_mu.cwiseInverse().asDiagonal();
  const Real scale = 1.0 + sym.cwiseAbs().maxCoeff();
  if ((sym - sym.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale)
    throw UnsupportedModel("exact_spectral_gap: generator is not reversible");
  sym = ((sym + sym.transpose()) / 2.0).eval();

  Eigen::SelfAdjointEigenSolver<Mat> solver(sym);
  const Vec& evals = solver.eigenvalues();  // ascending, top ~ 0
  if (std::abs(evals[n - 1]) > 1e-8 * scale)
    throw InternalError("exact_spectral_gap: zero eigenvalue missing");
  return -evals[n - 2];
}

Vec semigroup_apply(const GeneratorMatrix& gen, const Vec& f, Real t) {
  if (t < 0.0) throw InvalidInput("semigroup_apply: time must be nonnegative");
  const Index n = gen.L.rows();
  if (f.size() != n) throw InvalidInput("semigroup_apply: table size mismatch");
  if (t == 0.0) return f;

  const Real rate = std::max(-gen.L.diagonal().minCoeff(), 0.0);
  if (rate == 0.0) return f;
  Real lambda = rate * t;
  if (lambda > 600.0) {  // keep the leading Poisson weight representable
    const Vec half = semigroup_apply(gen, f, t / 2.0);
    return semigroup_apply(gen, half, t / 2.0);
  }

  const Mat P = Mat::Identity(n, n) + gen.L / rate;
  Vec acc = Vec::Zero(n);
  Vec pk = f;
  Real weight = std::exp(-lambda);
  Real cumulative = weight;
  acc += weight * pk;
  const long kmax = static_cast<long>(lambda + 20.0 * std::sqrt(lambda + 1.0) + 60.0);
  for (long k = 1; k <= kmax; ++k) {
    pk = P * pk;
    weight *= lambda / static_cast<Real>(k);
    acc += weight * pk;
    cumulative += weight;
    if (cumulative >= 1.0 - 1e-13 && static_cast<Real>(k) >= lambda) break;
  }
  if (cumulative < 1.0 - 1e-12)
    throw InternalError("semigroup_apply: truncation tail too large");
  return acc;
}

Mat matexp_small(const Mat& M, Real t) {
  const Index n = M.rows();
  if (n == 0 || M.cols() != n) throw InvalidInput("matexp_small: square matrix required");
  if (n > 512) throw SizeLimit("matexp_small: matrix too large");

  Mat B = t * M;
  const Real shift = std::max(0.0, -B.diagonal().minCoeff());
  B.diagonal().array() += shift;

  Real norm = B.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  while (norm > 4.0 && squarings < 60) {
    norm /= 2.0;
    ++squarings;
  }
  B /= std::pow(2.0, squarings);

  Mat result = Mat::Identity(n, n);
  Mat term = Mat::Identity(n, n);
  Real term_norm = 1.0;
  for (int k = 1; k <= 200; ++k) {
    term = (term * B / static_cast<Real>(k)).eval();
    result += term;
    term_norm *= norm / static_cast<Real>(k);
    const Real ratio = norm / static_cast<Real>(k + 2);
    if (ratio < 1.0 && term_norm / (1.0 - ratio) < 1e-17) break;
  }
  for (int s = 0; s < squarings; ++s) result = (result * result).eval();
  return std::exp(-shift) * result;
}

namespace {

ContractionReport contraction_against(const GeneratorMatrix& gen,
                                      const std::vector<Metric>& metrics, const Mat& decay_arg,
                                      const Vec& f, const std::vector<Real>& t_grid,
                                      bool with_aggregates, Real norm1, Real norminf) {
  const Vec delta_f = lipschitz_vector(f, gen.space, metrics);
  ContractionReport report;
  report.worst_margin = std::numeric_limits<Real>::infinity();

  for (Real t : t_grid) {
    if (t < 0.0) throw InvalidInput("contraction check: negative time");
    const Vec ptf = semigroup_apply(gen, f, t);
    const Vec delta_t = lipschitz_vector(ptf, gen.space, metrics);
    const Mat decay = matexp_small(decay_arg, t);
    const Vec bound = decay.transpose() * delta_f;  // bound_j = sum_i delta_i E_ij

    for (int j = 0; j < gen.num_sites; ++j) {
      ContractionRow row;
      row.t = t;
      row.site = j;
      row.delta_actual = delta_t[j];
      row.delta_bound = bound[j];
      row.margin = bound[j] - delta_t[j];
      report.worst_margin = std::min(report.worst_margin, row.margin);
      report.rows.push_back(row);
    }
    if (with_aggregates) {
      ContractionAggregate agg;
      agg.t = t;
      agg.sum_actual = delta_t.sum();
      agg.sum_bound = std::exp(-t * (1.0 - norminf)) * delta_f.sum();
      agg.max_actual = delta_t.maxCoeff();
      agg.max_bound = std::exp(-t * (1.0 - norm1)) * delta_f.maxCoeff();
      report.worst_margin = std::min(report.worst_margin, agg.sum_bound - agg.sum_actual);
      report.worst_margin = std::min(report.worst_margin, agg.max_bound - agg.max_actual);
      report.aggregates.push_back(agg);
    }
  }
  return report;
}

}  // namespace

ContractionReport check_contraction(const SpinModel& model, const DobrushinMatrix& matrix,
                                    const Vec& f, const std::vector<Real>& t_grid,
                                    std::size_t cap) {
  const GeneratorMatrix gen = build_generator(model, cap);
  const auto [norm1, norminf] = matrix_norms(matrix.C);
  const Index n = matrix.C.rows();
  const Mat arg = matrix.C - Mat::Identity(n, n);  // e^{-t(I-C)}
  return contraction_against(gen, model.site_metrics(), arg, f, t_grid, true, norm1, norminf);
}

JumpRateFamily heat_bath_family(const SpinModel& model,
                                const std::vector<std::vector<int>>& blocks, std::size_t cap) {
  const StateSpace& space = model.space();
  if (space.size() > cap) throw SizeLimit("heat_bath_family: state space exceeds cap");

  JumpRateFamily family;
  family.space = space;
  family.metrics = model.site_metrics();
  for (const std::vector<int>& block : blocks) {
    JumpRateFamily::Member member;
    member.sites = block;
    const StateSpace sub = model.block_space(block);
    member.rates = Mat::Zero(static_cast<Index>(space.size()), static_cast<Index>(sub.size()));
    for (std::size_t a = 0; a < space.size(); ++a)
      member.rates.row(static_cast<Index>(a)) = model.conditional_block(block, a, cap).transpose();
    family.members.push_back(std::move(member));
  }
  return family;
}

IPSConstants ips_constants(const JumpRateFamily& family, std::size_t lp_cap) {
  const StateSpace& space = family.space;
  const int nsites = space.num_sites();
  const auto nstates = static_cast<Index>(space.size());

  bool all_trivial = true;
  for (const Metric& m : family.metrics)
    if (!m.is_trivial()) all_trivial = false;

  IPSConstants constants;
  constants.c_exact = Mat::Zero(nsites, nsites);
  constants.c_tv = all_trivial ? Mat::Zero(nsites, nsites)
                               : Mat::Constant(nsites, nsites,
                                               std::numeric_limits<Real>::quiet_NaN());

  for (std::size_t m = 0; m < family.members.size(); ++m) {
    const auto& member = family.members[m];
    const Index block_states = member.rates.cols();

    // Total-mass table and its uniformity.
    const Vec mass = member.rates.rowwise().sum();
    if ((mass.maxCoeff() - mass.minCoeff()) > 1e-10 * (1.0 + mass.maxCoeff())) {
      constants.mass_uniform = false;
      constants.nonuniform_members.push_back(static_cast<int>(m));
    }

    // Substate coordinate decoding for the block.
    std::vector<int> radices;
    for (int s : member.sites) radices.push_back(space.radix(s));
    const StateSpace sub(radices);

    const bool lp_feasible = static_cast<std::size_t>(block_states) <= lp_cap;
    if (!lp_feasible && !all_trivial)
      throw UnsupportedModel("ips_constants: block exceeds the LP cap and no TV bound applies");
    constants.exact_available = constants.exact_available && lp_feasible;

    // Constraint system of the member's oscillation program: variables
    // (g over block substates, s_i per block site), constraints
    // +-(g_u - g_v) <= s_i d_i(u_i, v_i) and sum_i s_i <= 1.
    Mat A;
    Vec rhs;
    std::vector<bool> nonneg;
    const int nblock = static_cast<int>(member.sites.size());
    if (lp_feasible) {
      std::vector<std::tuple<int, int, int>> pairs;  // (u, v, block site)
      for (int bi = 0; bi < nblock; ++bi) {
        const Metric& d = family.metrics[static_cast<std::size_t>(member.sites[bi])];
        for (Index u = 0; u < block_states; ++u) {
          if (sub.coord(static_cast<std::size_t>(u), bi) != 0) continue;
          const int r = sub.radix(bi);
          for (int a = 0; a < r; ++a)
            for (int b = a + 1; b < r; ++b) {
              if (d(a, b) <= 0.0) continue;
              pairs.emplace_back(
                  static_cast<int>(sub.with_coord(static_cast<std::size_t>(u), bi, a)),
                  static_cast<int>(sub.with_coord(static_cast<std::size_t>(u), bi, b)), bi);
            }
        }
      }
      const int nvars = static_cast<int>(block_states) + nblock;
      const int nrows = 2 * static_cast<int>(pairs.size()) + 1;
      A = Mat::Zero(nrows, nvars);
      rhs = Vec::Zero(nrows);
      int r = 0;
      for (const auto& [u, v, bi] : pairs) {
        const Metric& d = family.metrics[static_cast<std::size_t>(member.sites[bi])];
        const Real duv =
            d(sub.coord(static_cast<std::size_t>(u), bi), sub.coord(static_cast<std::size_t>(v), bi));
        A(r, u) = 1.0;
        A(r, v) = -1.0;
        A(r, static_cast<int>(block_states) + bi) = -duv;
        ++r;
        A(r, u) = -1.0;
        A(r, v) = 1.0;
        A(r, static_cast<int>(block_states) + bi) = -duv;
        ++r;
      }
      A.row(r).segment(block_states, nblock).setOnes();
      rhs[r] = 1.0;
      nonneg.assign(static_cast<std::size_t>(nvars), false);
      for (int k = 0; k < nblock; ++k)
        nonneg[static_cast<std::size_t>(block_states) + static_cast<std::size_t>(k)] = true;
    }

    Vec exact = Vec::Zero(nsites);
    Vec tvb = Vec::Constant(nsites, std::numeric_limits<Real>::quiet_NaN());
    if (all_trivial) tvb.setZero();

    for (int j = 0; j < nsites; ++j) {
      const Metric& dj = family.metrics[static_cast<std::size_t>(j)];
      const int rj = space.radix(j);
      Real best_exact = 0.0, best_tv = 0.0;
      for (Index base = 0; base < nstates; ++base) {
        if (space.coord(static_cast<std::size_t>(base), j) != 0) continue;
        for (int b = 0; b < rj; ++b) {
          const auto xa = static_cast<Index>(space.with_coord(static_cast<std::size_t>(base), j, b));
          for (int b2 = b + 1; b2 < rj; ++b2) {
            const Real d = dj(b, b2);
            if (d <= 0.0) continue;
            const auto xb =
                static_cast<Index>(space.with_coord(static_cast<std::size_t>(base), j, b2));
            const Vec diff = (member.rates.row(xa) - member.rates.row(xb)).transpose();
            const Real l1 = diff.cwiseAbs().sum();
            if (l1 < 1e-15) continue;
            if (all_trivial) best_tv = std::max(best_tv, l1 / 2.0 / d);
            if (std::abs(diff.sum()) > 1e-10 * (1.0 + mass.maxCoeff())) {
              best_exact = std::numeric_limits<Real>::infinity();
              continue;
            }
            if (lp_feasible) {
              Vec obj = Vec::Zero(A.cols());
              obj.head(block_states) = diff;
              const LpResult lp = lp_maximize(A, rhs, obj, nonneg);
              if (lp.status != LpStatus::Optimal)
                throw InternalError("ips_constants: oscillation program failed");
              best_exact = std::max(best_exact, lp.value / d);
            }
          }
        }
      }
      if (!lp_feasible) best_exact = best_tv;
      exact[j] = best_exact;
      if (all_trivial) tvb[j] = best_tv;
    }
    constants.member_exact.push_back(exact);
    constants.member_tv.push_back(tvb);
  }

  for (std::size_t m = 0; m < family.members.size(); ++m)
    for (int i : family.members[m].sites) {
      constants.c_exact.row(i) += constants.member_exact[m].transpose();
      if (all_trivial) constants.c_tv.row(i) += constants.member_tv[m].transpose();
    }

  // eta: minimal total jump rate over sites and configurations.
  constants.eta = std::numeric_limits<Real>::infinity();
  for (int i = 0; i < nsites; ++i) {
    Vec total = Vec::Zero(nstates);
    for (const auto& member : family.members)
      if (std::find(member.sites.begin(), member.sites.end(), i) != member.sites.end())
        total += member.rates.rowwise().sum();
    constants.eta = std::min(constants.eta, total.minCoeff());
  }
  return constants;
}

GeneratorMatrix build_ips_generator(const JumpRateFamily& family, std::size_t cap) {
  const StateSpace& space = family.space;
  if (space.size() > cap) throw SizeLimit("build_ips_generator: state space exceeds cap");
  const auto n = static_cast<Index>(space.size());

  GeneratorMatrix gen;
  gen.space = space;
  gen.num_sites = space.num_sites();
  gen.reversible = false;
  gen.L = Mat::Zero(n, n);

  for (const auto& member : family.members) {
    std::vector<int> radices;
    for (int s : member.sites) radices.push_back(space.radix(s));
    const StateSpace sub(radices);
    for (Index a = 0; a < n; ++a) {
      for (Index z = 0; z < member.rates.cols(); ++z) {
        std::size_t target = static_cast<std::size_t>(a);
        for (std::size_t k = 0; k < member.sites.size(); ++k)
          target = space.with_coord(target, member.sites[k],
                                    sub.coord(static_cast<std::size_t>(z), static_cast<int>(k)));
        if (static_cast<Index>(target) == a) continue;  // mass on the current substate is inert
        const Real rate = member.rates(a, z);
        gen.L(a, static_cast<Index>(target)) += rate;
        gen.L(a, a) -= rate;
      }
    }
  }
  check_generator(gen);
  return gen;
}

ContractionReport check_ips_contraction(const JumpRateFamily& family, const Mat& C, Real eta,
                                        const Vec& f, const std::vector<Real>& t_grid,
                                        std::size_t cap) {
  const GeneratorMatrix gen = build_ips_generator(family, cap);
  const Mat arg = C - eta * Mat::Identity(C.rows(), C.cols());  // e^{-t(eta I - C)}
  return contraction_against(gen, family.metrics, arg, f, t_grid, false, 0.0, 0.0);
}

InvariantDecayReport invariant_w1_decay(const JumpRateFamily& family, const Mat& C, Real eta,
                                        std::size_t x0, const std::vector<Real>& t_grid,
                                        std::size_t product_cap) {
  const GeneratorMatrix gen = build_ips_generator(family, product_cap);
  const auto n = gen.L.rows();
  if (x0 >= static_cast<std::size_t>(n)) throw InvalidInput("invariant_w1_decay: bad initial state");

  InvariantDecayReport report;

  Eigen::FullPivLU<Mat> lu(gen.L.transpose());
  lu.setThreshold(1e-9);
  const Mat kernel = lu.kernel();
  report.multiplicity = static_cast<int>(kernel.cols());
  if (report.multiplicity != 1) {
    report.unique = false;
    return report;
  }
  Vec mu = kernel.col(0);
  if (mu.sum() < 0) mu = -mu;
  if (mu.minCoeff() < -1e-9 * mu.cwiseAbs().maxCoeff())
    throw InternalError("invariant_w1_decay: signed kernel vector");
  mu = mu.cwiseMax(0.0);
  mu /= mu.sum();
  if ((mu.transpose() * gen.L).cwiseAbs().maxCoeff() > 1e-8)
    throw InternalError("invariant_w1_decay: invariant residual too large");
  report.unique = true;
  report.invariant = mu;

  const Real norm1 = matrix_norms(C).first;
  // Invariant first moment of the product metric from the initial state.
  Real moment = 0.0;
  for (Index y = 0; y < n; ++y) {
    Real d = 0.0;
    for (int k = 0; k < gen.num_sites; ++k)
      d += family.metrics[static_cast<std::size_t>(k)](
          gen.space.coord(x0, k), gen.space.coord(static_cast<std::size_t>(y), k));
    moment += mu[y] * d;
  }

  report.worst_margin = std::numeric_limits<Real>::infinity();
  for (Real t : t_grid) {
    const Mat Pt = matexp_small(gen.L, t);
    Vec row = Pt.row(static_cast<Index>(x0)).transpose();
    if (row.minCoeff() < -1e-9) throw InternalError("invariant_w1_decay: negative transition mass");
    row = row.cwiseMax(0.0);
    row /= row.sum();
    DecayRow r;
    r.t = t;
    r.lhs = product_w1(row, mu, gen.space, family.metrics, product_cap);
    r.rhs = std::exp(-t * (eta - norm1)) * moment;
    r.margin = r.rhs - r.lhs;
    report.worst_margin = std::min(report.worst_margin, r.margin);
    report.rows.push_back(r);
  }
  return report;
}

}  // namespace gapcert
