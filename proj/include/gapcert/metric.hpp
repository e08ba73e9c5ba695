#pragma once

#include "gapcert/types.hpp"

#include <optional>

namespace gapcert {

/// Pairwise ground distance on a finite labeled point set. Either the trivial
/// 0/1 metric or an explicit symmetric table, optionally carrying a real
/// embedding per point (used by model builders).
class Metric {
 public:
  enum class Kind { Trivial, Table };

  static Metric trivial(int n);
  /// Full table; validates zero diagonal, symmetry, nonnegativity and the
  /// triangle inequality (n is capped to keep the O(n^3) check affordable).
  static Metric from_table(Mat d, std::optional<Vec> embedding = {});
  /// d(a,b) = |p_a - p_b|. Valid by construction, no triangle check.
  static Metric from_line_embedding(Vec points);

  Kind kind() const { return kind_; }
  bool is_trivial() const { return kind_ == Kind::Trivial; }
  int size() const { return n_; }

  Real operator()(int a, int b) const {
    if (kind_ == Kind::Trivial) return a == b ? 0.0 : 1.0;
    return table_(a, b);
  }

  Real diameter() const;

  const std::optional<Vec>& embedding() const { return embedding_; }

 private:
  Metric() = default;
  Kind kind_ = Kind::Trivial;
  int n_ = 0;
  Mat table_;
  std::optional<Vec> embedding_;
};

}  // namespace gapcert
