#include "gapcert/simplex.hpp"

#include <cmath>
#include <limits>

namespace gapcert {
namespace {

constexpr Real kPivotTol = 1e-11;

// Tableau for min obj.x over {A x = b >= 0, x >= 0} with a known starting
// basis. Rows 0..R-1 hold constraints, row R the reduced-cost line.
struct Tableau {
  Mat t;                   // (R+1) x (C+1); last column is the RHS
  std::vector<int> basis;  // basic variable per row

  int rows() const { return static_cast<int>(t.rows()) - 1; }
  int cols() const { return static_cast<int>(t.cols()) - 1; }

  void pivot(int r, int c) {
    t.row(r) /= t(r, c);
    for (int k = 0; k < static_cast<int>(t.rows()); ++k) {
      if (k == r) continue;
      const Real factor = t(k, c);
      if (factor != 0.0) t.row(k) -= factor * t.row(r);
    }
    basis[static_cast<std::size_t>(r)] = c;
  }

  // Bland's rule; `allowed` masks columns that may enter. Returns false when
  // the program is unbounded in the current direction.
  bool solve(const std::vector<char>& allowed) {
    const int R = rows(), C = cols();
    for (long iter = 0; iter < 10000L * (R + C) + 10000; ++iter) {
      int enter = -1;
      for (int c = 0; c < C; ++c) {
        if (!allowed[static_cast<std::size_t>(c)]) continue;
        if (t(R, c) < -kPivotTol) {
          enter = c;
          break;
        }
      }
      if (enter < 0) return true;

      int leave = -1;
      Real best_ratio = std::numeric_limits<Real>::infinity();
      for (int r = 0; r < R; ++r) {
        const Real a = t(r, enter);
        if (a <= kPivotTol) continue;
        const Real ratio = t(r, C) / a;
        if (ratio < best_ratio - kPivotTol ||
            (ratio < best_ratio + kPivotTol && leave >= 0 &&
             basis[static_cast<std::size_t>(r)] < basis[static_cast<std::size_t>(leave)])) {
          best_ratio = ratio;
          leave = r;
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
    throw InternalError("lp_maximize: pivot limit exceeded");
  }
};

}  // namespace

LpResult lp_maximize(const Mat& A, const Vec& b, const Vec& c, const std::vector<bool>& nonneg) {
  const int R = static_cast<int>(A.rows());
  const int N = static_cast<int>(A.cols());
  if (b.size() != R || c.size() != N || static_cast<int>(nonneg.size()) != N)
    throw InvalidInput("lp_maximize: shape mismatch");

  // Column layout: split/nonneg originals, then slacks, then artificials.
  std::vector<int> pos_col(static_cast<std::size_t>(N)), neg_col(static_cast<std::size_t>(N), -1);
  int nc = 0;
  for (int k = 0; k < N; ++k) {
    pos_col[static_cast<std::size_t>(k)] = nc++;
    if (!nonneg[static_cast<std::size_t>(k)]) neg_col[static_cast<std::size_t>(k)] = nc++;
  }
  const int slack0 = nc;
  nc += R;
  std::vector<int> art_col(static_cast<std::size_t>(R), -1);
  int num_art = 0;
  for (int r = 0; r < R; ++r)
    if (b[r] < 0.0) art_col[static_cast<std::size_t>(r)] = nc + num_art++;
  const int C = nc + num_art;

  Tableau tab;
  tab.t = Mat::Zero(R + 1, C + 1);
  tab.basis.assign(static_cast<std::size_t>(R), -1);
  for (int r = 0; r < R; ++r) {
    const Real sign = b[r] < 0.0 ? -1.0 : 1.0;
    for (int k = 0; k < N; ++k) {
      tab.t(r, pos_col[static_cast<std::size_t>(k)]) = sign * A(r, k);
      if (neg_col[static_cast<std::size_t>(k)] >= 0)
        tab.t(r, neg_col[static_cast<std::size_t>(k)]) = -sign * A(r, k);
    }
    tab.t(r, slack0 + r) = sign;  // slack of the original <= row
    tab.t(r, C) = sign * b[r];
    if (art_col[static_cast<std::size_t>(r)] >= 0) {
      tab.t(r, art_col[static_cast<std::size_t>(r)]) = 1.0;
      tab.basis[static_cast<std::size_t>(r)] = art_col[static_cast<std::size_t>(r)];
    } else {
      tab.basis[static_cast<std::size_t>(r)] = slack0 + r;
    }
  }

  std::vector<char> allowed(static_cast<std::size_t>(C), 1);

  if (num_art > 0) {
    // Phase 1: minimize the sum of artificials (bottom row carries c - z).
    for (int r = 0; r < R; ++r) {
      const int ac = art_col[static_cast<std::size_t>(r)];
      if (ac >= 0) tab.t(R, ac) = 1.0;
    }
    for (int r = 0; r < R; ++r)
      if (art_col[static_cast<std::size_t>(r)] >= 0) tab.t.row(R) -= tab.t.row(r);
    if (!tab.solve(allowed)) throw InternalError("lp_maximize: phase 1 unbounded");
    if (tab.t(R, C) < -1e-8) return {LpStatus::Infeasible, 0.0, Vec()};
    // Artificials may stay basic at zero; just bar them from re-entering.
    for (int r = 0; r < R; ++r)
      if (art_col[static_cast<std::size_t>(r)] >= 0)
        allowed[static_cast<std::size_t>(art_col[static_cast<std::size_t>(r)])] = 0;
  }

  // Phase 2: minimize -c.x expressed in the current basis.
  tab.t.row(R).setZero();
  for (int k = 0; k < N; ++k) {
    tab.t(R, pos_col[static_cast<std::size_t>(k)]) = -c[k];
    if (neg_col[static_cast<std::size_t>(k)] >= 0) tab.t(R, neg_col[static_cast<std::size_t>(k)]) = c[k];
  }
  for (int r = 0; r < R; ++r) {
    const int bv = tab.basis[static_cast<std::size_t>(r)];
    const Real coef = tab.t(R, bv);
    if (coef != 0.0) tab.t.row(R) -= coef * tab.t.row(r);
  }
  if (!tab.solve(allowed)) return {LpStatus::Unbounded, 0.0, Vec()};

  Vec x = Vec::Zero(N);
  for (int r = 0; r < R; ++r) {
    const int bv = tab.basis[static_cast<std::size_t>(r)];
    const Real val = tab.t(r, C);
    for (int k = 0; k < N; ++k) {
      if (bv == pos_col[static_cast<std::size_t>(k)]) x[k] += val;
      if (bv == neg_col[static_cast<std::size_t>(k)]) x[k] -= val;
    }
  }
  return {LpStatus::Optimal, c.dot(x), x};
}

}  // namespace gapcert
