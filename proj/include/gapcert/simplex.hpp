#pragma once

#include "gapcert/types.hpp"

#include <vector>

namespace gapcert {

enum class LpStatus { Optimal, Unbounded, Infeasible };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Real value = 0.0;
  Vec x;
};

/// Maximize c.x subject to A x <= b, with x_k >= 0 where nonneg[k] and free
/// otherwise. Dense two-phase tableau simplex with Bland's rule; intended for
/// the small certificate-side programs this library solves (tens of rows).
LpResult lp_maximize(const Mat& A, const Vec& b, const Vec& c, const std::vector<bool>& nonneg);

}  // namespace gapcert
