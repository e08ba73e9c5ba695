#pragma once

// Test-side oracles, independent of the library's solver paths:
//  - transportation optimum by exhaustive basis (spanning-tree) enumeration,
//  - dense matrix exponential from Eigen's Pade scaling-and-squaring,
//  - single-site quartic moments by high-resolution trapezoid quadrature,
//  - deterministic random model generators for the randomized suites.

#include "gapcert/models.hpp"
#include "gapcert/sampler.hpp"
#include "gapcert/types.hpp"

#include <vector>

namespace gapcert::testing {

/// Exact transportation optimum: enumerates every spanning-tree basis of the
/// bipartite supply/demand graph, solves each triangular system, and keeps
/// the cheapest feasible vertex. Sizes are capped (m + n <= 11).
Real transport_bruteforce(const Vec& supply, const Vec& demand, const Mat& cost);

/// Dense matrix exponential oracle (Pade + scaling and squaring).
Mat expm_oracle(const Mat& M);

/// Second moment of exp(-(a x^4 - b x^2)) on [-X, X] by trapezoid quadrature
/// with `points` nodes.
Real quartic_second_moment(Real a, Real b, Real halfwidth, int points);

// ---- Deterministic random generators for the randomized suites ----------

struct TestRng {
  Rng rng;
  explicit TestRng(std::uint64_t seed) : rng(seed) {}
  Real uniform(Real lo, Real hi) { return lo + (hi - lo) * rng.uniform01(); }
  int uniform_int(int n) { return rng.uniform_int(n); }
};

/// Nearest-neighbor chain with couplings drawn uniformly from [-beta_max, beta_max].
SpinModel random_ising_chain(int sites, Real beta_max, TestRng& rng);

/// Star: site 0 coupled to each leaf.
SpinModel random_ising_star(int leaves, Real beta_max, TestRng& rng);

SpinModel random_potts_chain(int sites, int colors, Real j_max, TestRng& rng);

SpinModel random_free_product(int sites, int max_points, TestRng& rng);

/// Strictly positive random distribution over n points.
Vec random_distribution(int n, TestRng& rng);

/// Random table over `size` states with entries in [-1, 1].
Vec random_table(Index size, TestRng& rng);

}  // namespace gapcert::testing
