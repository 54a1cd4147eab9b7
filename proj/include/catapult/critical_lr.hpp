#pragma once

#include <cmath>

#include "errors.hpp"
#include "loss.hpp"
#include "roots.hpp"

namespace catapult {

// Limit of the critical learning rate as the degenerate initial weight tends
// to zero: 2w/sinh(w) -> 2 and 4w/tanh(w/2) -> 8.
inline double critical_lr_limit(LossKind kind) {
  return kind == LossKind::Exponential ? 2.0 : 8.0;
}

// Learning rate at which the degenerate scalar map w' = w - eta L'(w) has the
// exact period-2 orbit w0 -> -w0 -> w0. Solving w0 - eta L'(w0) = -w0 gives
//
//   exponential:  eta_c = 2 w0 / sinh(w0)
//   logistic:     eta_c = 2 w0 / (tanh(w0/2)/2) = 4 w0 / tanh(w0/2)
//
// Both expressions are even in w0. The returned value is checked against the
// defining oscillation condition L'(w0) = -L'(w0 - eta L'(w0)) before being
// handed back; the check failing would mean a broken libm, not bad input.
inline double critical_lr(LossKind kind, double w0) {
  if (!std::isfinite(w0)) fail(errc::config_invalid, "critical_lr: w0 must be finite");
  if (w0 == 0.0)
    fail(errc::degenerate_input,
         "critical_lr: w0 = 0 has no finite-orbit critical rate; use critical_lr_limit");
  const double g0 = degenerate_loss_grad(kind, w0);
  if (!std::isfinite(g0)) fail(errc::config_invalid, "critical_lr: L'(w0) overflows");
  const double eta = 2.0 * w0 / g0;
  const double residual = g0 + degenerate_loss_grad(kind, w0 - eta * g0);
  if (std::abs(residual) > 1e-12 * (1.0 + std::abs(g0)))
    fail(errc::no_convergence, "critical_lr: fixed-point verification failed");
  return eta;
}

// Independent estimate of the same quantity by bisecting the oscillation
// condition in eta, used as a cross-check on the closed form. With w = |w0|,
// h(eta) = L'(w - eta L'(w)) + L'(w) is strictly decreasing in eta, positive
// at 0 and negative at 4w/L'(w), so the root is bracketed.
inline double critical_lr_bisect(LossKind kind, double w0, double tol = 1e-12) {
  if (!std::isfinite(w0)) fail(errc::config_invalid, "critical_lr_bisect: w0 must be finite");
  if (w0 == 0.0) fail(errc::degenerate_input, "critical_lr_bisect: w0 = 0");
  const double w = std::abs(w0);
  const double gw = degenerate_loss_grad(kind, w);
  if (!std::isfinite(gw)) fail(errc::config_invalid, "critical_lr_bisect: L'(w0) overflows");
  auto h = [&](double eta) { return degenerate_loss_grad(kind, w - eta * gw) + gw; };
  return bisect_root(h, ScalarBracket{0.0, 4.0 * w / gw}, tol);
}

// Inverse map: the initial weight whose critical learning rate equals a given
// value. For the exponential loss eta_c(w0) = 2w0/sinh(w0) decreases from 2
// to 0 on w0 > 0, so targets must lie in (0, 2); for the logistic loss
// eta_c(w0) = 4w0/tanh(w0/2) increases from 8, so targets must exceed 8.
inline double invert_critical_lr(LossKind kind, double eta_target, double tol = 1e-12) {
  if (kind == LossKind::Exponential) {
    if (!(eta_target > 0.0 && eta_target < 2.0))
      fail(errc::config_invalid, "invert_critical_lr: exponential target must lie in (0, 2)");
  } else {
    if (!(eta_target > 8.0))
      fail(errc::config_invalid, "invert_critical_lr: logistic target must exceed 8");
  }
  auto h = [&](double w) { return critical_lr(kind, w) - eta_target; };
  // eta_c spans the admissible range monotonically on (0, inf); 700 keeps
  // sinh finite and is far beyond any realistic initial weight.
  double hi = kind == LossKind::Exponential ? 700.0 : 1.0;
  if (kind == LossKind::Logistic) {
    while (critical_lr(kind, hi) < eta_target && hi < 1e6) hi *= 2.0;
  }
  return bisect_root(h, ScalarBracket{1e-8, hi}, tol);
}

// Strictly positive solution of the logistic oscillation condition
// -w = w - eta L'(w), i.e. 4w = eta tanh(w/2). Expanding tanh near zero
// shows a positive root exists exactly when eta > 8; below that threshold
// only w = 0 solves it. The root is bracketed by (0, eta/4 + 1] because
// tanh < 1 makes the right side fall below 4w there.
inline double oscillation_fixed_point(double eta) {
  if (!(eta > 8.0))
    fail(errc::no_positive_root,
         "oscillation_fixed_point: positive root requires eta > 8");
  auto g = [&](double w) { return eta * std::tanh(0.5 * w) - 4.0 * w; };
  // w = 0 solves the condition trivially; start the bracket just above it,
  // where g is still positive (slope eta/2 - 4 > 0), to isolate the
  // positive root.
  const double root = bisect_root(g, ScalarBracket{1e-12, 0.25 * eta + 1.0}, 1e-14);
  if (std::abs(g(root)) > 1e-10)
    fail(errc::no_convergence, "oscillation_fixed_point: residual above 1e-10");
  return root;
}

}  // namespace catapult
