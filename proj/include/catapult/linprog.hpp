#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"

namespace catapult {

// Phase-1 simplex feasibility: find x >= 0 with A x = b, or report that none
// exists. Minimizes the sum of artificial slacks with Bland's smallest-index
// pivoting rule, which rules out cycling. This is a decision procedure, not a
// heuristic: the outcome certifies (in)feasibility of the linear system up to
// the pivot tolerance.
inline std::optional<Vec> nonneg_solution(Mat A, Vec b, double tol = 1e-9) {
  const int m = A.rows;
  const int n = A.cols;
  if (static_cast<int>(b.size()) != m)
    fail(errc::dimension_mismatch, "nonneg_solution: rhs size mismatch");

  // Make every right-hand side nonnegative so artificials start feasible.
  for (int i = 0; i < m; ++i) {
    if (b[i] < 0) {
      b[i] = -b[i];
      for (int j = 0; j < n; ++j) A(i, j) = -A(i, j);
    }
  }

  // Tableau: columns [original n | artificial m | rhs], rows [m | cost].
  const int cols = n + m + 1;
  Mat t(m + 1, cols);
  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) t(i, j) = A(i, j);
    t(i, n + i) = 1.0;
    t(i, cols - 1) = b[i];
    basis[i] = n + i;
  }
  // Reduced costs for min(sum of artificials) after eliminating the basic
  // artificial columns: cost row = - sum of constraint rows on the original
  // columns, and -(sum b) in the rhs cell (the negated objective value).
  for (int j = 0; j < n; ++j) {
    double s = 0;
    for (int i = 0; i < m; ++i) s += t(i, j);
    t(m, j) = -s;
  }
  {
    double s = 0;
    for (int i = 0; i < m; ++i) s += t(i, cols - 1);
    t(m, cols - 1) = -s;
  }

  const double pivot_tol = 1e-11;
  const long max_pivots = 50000L + 200L * (m + n);
  for (long it = 0;; ++it) {
    if (it > max_pivots) fail(errc::max_iter_exceeded, "nonneg_solution: pivot cap reached");
    // Bland: entering column = smallest index with negative reduced cost.
    int enter = -1;
    for (int j = 0; j < n + m; ++j) {
      if (t(m, j) < -tol) {
        enter = j;
        break;
      }
    }
    if (enter < 0) break;  // optimal
    // Ratio test; ties broken by smallest basis variable (Bland).
    int leave = -1;
    double best = 0;
    for (int i = 0; i < m; ++i) {
      if (t(i, enter) > pivot_tol) {
        const double ratio = t(i, cols - 1) / t(i, enter);
        if (leave < 0 || ratio < best - 1e-15 ||
            (std::abs(ratio - best) <= 1e-15 && basis[i] < basis[leave])) {
          leave = i;
          best = ratio;
        }
      }
    }
    if (leave < 0) break;  // unbounded in the artificial objective: cannot happen, stop
    // Pivot.
    const double p = t(leave, enter);
    for (int j = 0; j < cols; ++j) t(leave, j) /= p;
    for (int i = 0; i <= m; ++i) {
      if (i == leave) continue;
      const double f = t(i, enter);
      if (f == 0.0) continue;
      for (int j = 0; j < cols; ++j) t(i, j) -= f * t(leave, j);
    }
    basis[leave] = enter;
  }

  const double objective = -t(m, cols - 1);
  if (objective > tol) return std::nullopt;

  Vec x(n, 0.0);
  for (int i = 0; i < m; ++i)
    if (basis[i] < n) x[basis[i]] = t(i, cols - 1);
  return x;
}

// Homogeneous separation feasibility: find w with y_i (w . x_i) >= 1 for all
// rows, or report none exists. The margin constant 1 is scale-free because w
// is unconstrained. Free w is split as u - v with u, v >= 0 and the >=
// turned into equality with surplus variables s >= 0:
//
//   y_i x_i . (u - v) - s_i = 1,   u, v, s >= 0.
inline std::optional<Vec> find_separator(const Mat& x, const Vec& y) {
  const int n = x.rows;
  const int d = x.cols;
  Mat a(n, 2 * d + n);
  Vec b(n, 1.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) {
      a(i, j) = y[i] * x(i, j);
      a(i, d + j) = -y[i] * x(i, j);
    }
    a(i, 2 * d + i) = -1.0;
  }
  auto z = nonneg_solution(std::move(a), std::move(b));
  if (!z) return std::nullopt;
  Vec w(d);
  for (int j = 0; j < d; ++j) w[j] = (*z)[j] - (*z)[d + j];
  return w;
}

}  // namespace catapult
