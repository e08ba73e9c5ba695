#include "gapcert/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gapcert {

DiscreteDistribution DiscreteDistribution::make(std::vector<int> support, Vec weights, Real tol) {
  if (support.size() != static_cast<std::size_t>(weights.size()))
    throw InvalidInput("DiscreteDistribution: support/weight size mismatch");
  if (support.empty()) throw InvalidInput("DiscreteDistribution: empty support");

  std::vector<std::size_t> order(support.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return support[a] < support[b]; });

  Real total = 0.0;
  for (Index k = 0; k < weights.size(); ++k) {
    if (!std::isfinite(weights[k]) || weights[k] < -kMassTol)
      throw InvalidInput("DiscreteDistribution: weights must be finite and nonnegative");
    total += weights[k];
  }
  if (std::abs(total - 1.0) > tol)
    throw InvalidInput("DiscreteDistribution: weights do not sum to one");

  DiscreteDistribution d;
  std::vector<Real> kept;
  int prev = -1;
  for (std::size_t k : order) {
    if (prev == support[k]) throw InvalidInput("DiscreteDistribution: duplicate support point");
    prev = support[k];
    if (weights[static_cast<Index>(k)] <= 0.0) continue;  // degenerate atoms dropped
    d.support.push_back(support[k]);
    kept.push_back(weights[static_cast<Index>(k)]);
  }
  if (kept.empty()) throw InvalidInput("DiscreteDistribution: all atoms have zero weight");
  d.weights = Eigen::Map<const Vec>(kept.data(), static_cast<Index>(kept.size())) / total;
  return d;
}

DiscreteDistribution DiscreteDistribution::from_weights(const Vec& w, Real tol) {
  std::vector<int> support(static_cast<std::size_t>(w.size()));
  std::iota(support.begin(), support.end(), 0);
  return make(std::move(support), w, tol);
}

DiscreteDistribution DiscreteDistribution::delta(int point) {
  DiscreteDistribution d;
  d.support = {point};
  d.weights = Vec::Ones(1);
  return d;
}

int DiscreteDistribution::max_point() const { return support.back(); }

Real DiscreteDistribution::mass_at(int point) const {
  auto it = std::lower_bound(support.begin(), support.end(), point);
  if (it == support.end() || *it != point) return 0.0;
  return weights[static_cast<Index>(it - support.begin())];
}

Vec DiscreteDistribution::dense(int n) const {
  Vec w = Vec::Zero(n);
  for (std::size_t k = 0; k < support.size(); ++k) {
    if (support[k] >= n) throw InvalidInput("DiscreteDistribution: point outside space");
    w[support[k]] = weights[static_cast<Index>(k)];
  }
  return w;
}

}  // namespace gapcert
