#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "errors.hpp"
#include "loss.hpp"

namespace catapult {

// Phase function for the degenerate scalar predictor map w' = w - eta L'(w):
//
//   phi(x) = eta L'(x) - 2x
//
// where L is the degenerate loss (cosh for exponential, |w|/2 + log(1+e^-|w|)
// for logistic). For w != 0 the next iterate satisfies |w'| > |w| exactly when
// phi(|w|) > 0: the step -eta L'(w) always points toward the origin, so the
// magnitude can only grow by overshooting past -w, i.e. eta L'(|w|) > 2|w|.
inline double phi(LossKind kind, double eta, double x) {
  if (!(eta > 0)) fail(errc::config_invalid, "phi: eta must be positive");
  return eta * degenerate_loss_grad(kind, x) - 2.0 * x;
}

// Phase function for the two-layer degenerate scalar map, written in the
// coordinates where the control parameter multiplies tilde_f directly:
//
//   phi_lambda(x) = eta*lambda*tilde_f(x) - (eta^2/m)*x*tilde_f(x)^2 - 2x
//
// with tilde_f(x) = sinh(x) (exponential) or sinh(x)/(1+cosh(x)) = tanh(x/2)
// (logistic). Its sign at x = f_t decides whether the next step overshoots
// past -f_t and hence raises the degenerate loss.
//
// Overflow: for the exponential branch sinh(x)^2 can exceed the double range
// (|x| beyond roughly 355). Whenever the quadratic term overflows it also
// dominates the linear one, because (eta/m)|x| sinh|x| >> lambda at that
// scale for any representable lambda, so the value is returned as -inf for
// x > 0 (+inf for x < 0) instead of letting inf - inf produce a NaN.
inline double phi_lambda(LossKind kind, double eta, double lambda, int m, double x) {
  if (!(eta > 0)) fail(errc::config_invalid, "phi_lambda: eta must be positive");
  if (m < 1) fail(errc::config_invalid, "phi_lambda: m must be at least 1");
  const double t = tilde_f(kind, x);
  const double quad = (eta * eta / static_cast<double>(m)) * x * t * t;
  if (!std::isfinite(quad)) {
    return x > 0 ? -std::numeric_limits<double>::infinity()
                 : std::numeric_limits<double>::infinity();
  }
  return eta * lambda * t - quad - 2.0 * x;
}

// Sign regions of phi_lambda on [0, +inf). The positive set is Ph2; the
// negative component adjacent to 0 is Ph1 and the negative component
// reaching +inf is Ph3. When the positive set is empty the whole half-line
// is one negative component and it is labelled Ph1 (the regime where the
// degenerate loss decreases monotonically). Points where phi_lambda is zero
// to within tolerance are labelled Boundary.
enum class Region { Ph1, Ph2, Ph3, Boundary };

inline const char* to_string(Region r) {
  switch (r) {
    case Region::Ph1: return "Ph1";
    case Region::Ph2: return "Ph2";
    case Region::Ph3: return "Ph3";
    case Region::Boundary: return "Boundary";
  }
  return "Unknown";
}

namespace detail {

// Upper end of the scan interval used by region_of: beyond it phi_lambda is
// provably negative, so the unbounded negative component is fully accounted
// for. Exponential: eta*lambda*sinh(t) < (eta^2/m)*t*sinh(t)^2 once
// sinh(t) > lambda*m/eta and t >= 1. Logistic: |tilde_f| < 1, so
// phi_lambda <= eta*lambda - 2t < 0 once t > eta*lambda. The cap at 750
// is harmless for the exponential branch: past ~710 sinh overflows and
// phi_lambda is already reported as -inf.
inline double scan_limit(LossKind kind, double eta, double lambda, int m, double x) {
  double limit = std::max(50.0, 2.0 * std::abs(x));
  if (kind == LossKind::Exponential) {
    const double s = std::max(lambda, 0.0) * static_cast<double>(m) / eta;
    const double turn = std::isfinite(s) ? std::asinh(s) + 1.0 : 750.0;
    limit = std::max(limit, turn);
  } else {
    limit = std::max(limit, eta * std::max(lambda, 0.0));
  }
  return std::min(limit, 750.0);
}

}  // namespace detail

inline Region region_of(LossKind kind, double eta, double lambda, int m, double x) {
  const double ax = std::abs(x);  // phi_lambda is odd, so regions mirror in x
  const double here = phi_lambda(kind, eta, lambda, m, ax);
  if (std::abs(here) <= 1e-12 * (1.0 + ax)) return Region::Boundary;
  if (here > 0) return Region::Ph2;

  // phi_lambda(ax) < 0: decide Ph1 vs Ph3 by locating the positive set.
  const double limit = detail::scan_limit(kind, eta, lambda, m, ax);
  const int n = 8192;
  const double step = limit / n;
  double first_pos = -1.0, last_pos = -1.0;
  double best_val = -std::numeric_limits<double>::infinity();
  double best_t = 0.0;
  for (int i = 1; i <= n; ++i) {
    const double t = i * step;
    const double v = phi_lambda(kind, eta, lambda, m, t);
    if (v > 0) {
      if (first_pos < 0) first_pos = t;
      last_pos = t;
    }
    if (v > best_val) {
      best_val = v;
      best_t = t;
    }
  }
  if (first_pos < 0 && best_val > -std::numeric_limits<double>::infinity()) {
    // No grid point was positive. A hump narrower than the grid spacing can
    // still exist near the tangency lambda; refine the maximum locally by
    // ternary search before concluding the positive set is empty.
    double lo = std::max(best_t - step, 0.0);
    double hi = std::min(best_t + step, limit);
    for (int it = 0; it < 200 && hi - lo > 1e-13 * (1.0 + hi); ++it) {
      const double m1 = lo + (hi - lo) / 3.0;
      const double m2 = hi - (hi - lo) / 3.0;
      if (phi_lambda(kind, eta, lambda, m, m1) < phi_lambda(kind, eta, lambda, m, m2))
        lo = m1;
      else
        hi = m2;
    }
    const double t = 0.5 * (lo + hi);
    if (phi_lambda(kind, eta, lambda, m, t) > 0) first_pos = last_pos = t;
  }

  if (first_pos < 0) return Region::Ph1;       // positive set empty
  if (ax < first_pos) return Region::Ph1;      // below the positive hump
  if (ax > last_pos) return Region::Ph3;       // beyond it, tail to +inf
  return Region::Ph1;                          // interior gap: treat as Ph1
}

// Exact loss-increase predicate for the two-layer degenerate scalar map in
// NTK coordinates, where one gradient step reads
//
//   f' = f - eta*lambda*g + (eta^2/m)*f*g^2,   g = dL/df (degenerate loss)
//
// and lambda is the NTK eigenvalue (||a||^2 + ||w2||^2)/m. The degenerate
// loss is even and strictly increasing in |f|, so L(f') > L(f) iff
// |f'| > |f|, which splits into two disjoint overshoot branches:
//
//   f' beyond -f  <=>  eta*lambda*g - (eta^2/m)*f*g^2 - 2f > 0   (f > 0)
//   f' beyond +f  <=>  lambda < (eta/m)*f*g
//
// The first branch equals phi_lambda > 0 after absorbing the normalization
// of g into the control parameter: for the exponential loss g = sinh(f) =
// tilde_f and the identification is (lambda, m) as is; for the logistic loss
// g = tanh(f/2)/2 = tilde_f/2, which matches phi_lambda evaluated at
// (lambda/2, 4m). The second branch is vanishingly rare (it needs lambda
// below (eta/m)*f*g) but is kept so the predicate is an exact iff.
inline bool next_step_increases_loss(LossKind kind, double eta, double lambda_ntk, int m,
                                     double f) {
  if (m < 1) fail(errc::config_invalid, "next_step_increases_loss: m must be at least 1");
  const double x = std::abs(f);
  if (x == 0.0) return false;
  const double g = degenerate_loss_grad(kind, x);
  if (!std::isfinite(g)) return true;  // already past the representable range
  double overshoot_neg;
  if (kind == LossKind::Exponential) {
    overshoot_neg = phi_lambda(kind, eta, lambda_ntk, m, x);
  } else {
    overshoot_neg = phi_lambda(kind, eta, 0.5 * lambda_ntk, 4 * m, x);
  }
  if (overshoot_neg > 0) return true;
  return lambda_ntk < (eta / static_cast<double>(m)) * x * g;
}

}  // namespace catapult
