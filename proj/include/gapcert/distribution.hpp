#pragma once

#include "gapcert/types.hpp"

#include <vector>

namespace gapcert {

/// Finitely supported probability distribution over the point set of a
/// Metric. Support indices are distinct and ascending; weights are strictly
/// positive and sum to one.
struct DiscreteDistribution {
  std::vector<int> support;
  Vec weights;

  /// Builds from (support, weights); drops nonpositive atoms, rejects weight
  /// sums further than `tol` from one and renormalizes the remainder.
  static DiscreteDistribution make(std::vector<int> support, Vec weights, Real tol = 1e-9);

  /// Dense weights over points 0..w.size()-1.
  static DiscreteDistribution from_weights(const Vec& w, Real tol = 1e-9);

  static DiscreteDistribution delta(int point);

  int size() const { return static_cast<int>(support.size()); }
  int max_point() const;
  Real mass_at(int point) const;

  /// Dense weight vector over points 0..n-1.
  Vec dense(int n) const;
};

}  // namespace gapcert
