#pragma once

#include "gapcert/distribution.hpp"
#include "gapcert/metric.hpp"
#include "gapcert/state_space.hpp"
#include "gapcert/types.hpp"

#include <vector>

namespace gapcert {

/// Optimal coupling between two finitely supported distributions. Row sums
/// reproduce the first marginal, column sums the second; cost is the
/// transported mass weighted by the ground distance.
struct TransportPlan {
  std::vector<int> support1;
  std::vector<int> support2;
  Mat plan;  // |support1| x |support2|
  Real cost = 0.0;
};

namespace detail {

/// Exact solver for the balanced transportation problem
///   min sum_ij cost(i,j) x(i,j)  s.t.  row sums = supply, col sums = demand,
/// by primal pivoting on the basis tree. Supplies/demands must be positive
/// and balanced within 1e-9 (demands are rescaled to match exactly).
std::pair<Mat, Real> solve_transportation(Vec supply, Vec demand, const Mat& cost);

}  // namespace detail

/// Minimal-cost coupling between nu1 and nu2 under the given ground metric.
/// The trivial metric is special-cased: the cost is half the total variation
/// distance and the plan keeps the shared mass in place.
TransportPlan w1_exact(const DiscreteDistribution& nu1, const DiscreteDistribution& nu2,
                       const Metric& metric);

/// sum_a |nu1(a) - nu2(a)| over the union of supports.
Real tv_distance(const DiscreteDistribution& nu1, const DiscreteDistribution& nu2);

/// Normalized dual witness value: integral of f against (nu1 - nu2), divided
/// by the Lipschitz seminorm of f on the union of supports (0 for constant f).
/// Never exceeds the optimal transport cost.
Real dual_lower_bound(const DiscreteDistribution& nu1, const DiscreteDistribution& nu2,
                      const Metric& metric, const Vec& f);

/// Per-site oscillation coefficients of a function given as a full table over
/// the product space: entry i is the largest |f(y) - f(x)| / d(y_i, x_i) over
/// configuration pairs differing only at site i (0/0 pairs skipped).
Vec lipschitz_vector(const Vec& f, const StateSpace& space,
                     const std::vector<Metric>& site_metrics);

/// Exact W1 between two full state tables under the additive product metric
/// d(x,y) = sum_i d_i(x_i, y_i), solved as one transportation problem.
Real product_w1(const Vec& table1, const Vec& table2, const StateSpace& space,
                const std::vector<Metric>& site_metrics, std::size_t cap = kProductCap);

}  // namespace gapcert
