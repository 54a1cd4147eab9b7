#pragma once

#include <cmath>
#include <functional>

#include "errors.hpp"

namespace catapult {

struct ScalarBracket {
  double lo = 0.0;
  double hi = 0.0;
};

// Plain bisection. Deterministic: midpoint rule, no secant acceleration, so
// results are bit-stable across platforms. Succeeds when either |f(x)| <= tol
// or the bracket width shrinks below tol.
inline double bisect_root(const std::function<double(double)>& f, ScalarBracket bracket,
                          double tol = 1e-12, int max_iter = 200) {
  if (!(bracket.lo < bracket.hi)) fail(errc::config_invalid, "bisect_root: lo must be < hi");
  if (!(tol > 0)) fail(errc::config_invalid, "bisect_root: tol must be positive");
  double flo = f(bracket.lo);
  double fhi = f(bracket.hi);
  if (flo == 0.0) return bracket.lo;
  if (fhi == 0.0) return bracket.hi;
  if ((flo > 0) == (fhi > 0))
    fail(errc::no_sign_change, "bisect_root: no sign change over bracket");
  for (int it = 0; it < max_iter; ++it) {
    const double mid = 0.5 * (bracket.lo + bracket.hi);
    const double fmid = f(mid);
    if (std::abs(fmid) <= tol || (bracket.hi - bracket.lo) <= tol) return mid;
    if ((fmid > 0) == (flo > 0)) {
      bracket.lo = mid;
      flo = fmid;
    } else {
      bracket.hi = mid;
    }
  }
  const double width = bracket.hi - bracket.lo;
  if (width <= tol) return 0.5 * (bracket.lo + bracket.hi);
  fail(errc::max_iter_exceeded, "bisect_root: iteration budget exhausted");
}

}  // namespace catapult
