#pragma once

#include <cmath>

#include "errors.hpp"
#include "loss.hpp"
#include "trajectory.hpp"

namespace catapult {

// Reduced two-variable state of two-layer training on a degenerate pair:
// the network output f on the shared feature vector and the top NTK
// eigenvalue lam. lam stays nonnegative whenever the state corresponds to an
// actual network, being a sum of squares over m.
struct ScalarState {
  double f = 0;
  double lam = 0;
  long step = 0;
};

// One step of the reduced map,
//
//   f'   = f   - eta*lam*tf + (eta^2/m)*f*tf^2
//   lam' = lam - (4*eta/m)*f*tf + (eta^2/m)*lam*tf^2,      tf = tilde_f(f).
//
// Derivation sketch (degenerate pair, unit-norm shared feature x, labels
// +1/-1, f(x) = m^{-1/2} w2.(w1 x)): both samples produce the same gradient
// contribution up to the label sign, so with a = w1 x the full update is
//   a'  = a  - eta*g(f)*m^{-1/2} w2,
//   w2' = w2 - eta*g(f)*m^{-1/2} a,
// where g is the derivative of the degenerate loss in f. Writing
// f = m^{-1/2} w2.a and lam = (||a||^2 + ||w2||^2)/m (the top NTK
// eigenvalue) and expanding the products gives exactly the two lines above
// with tf = g for the exponential loss, where g(f) = sinh(f) = tilde_f(f).
//
// For the logistic loss g(f) = tanh(f/2)/2 = tilde_f(f)/2, and substituting
// g = tf/2 shows the same two lines hold in the rescaled variables
// lam_paper = lam/2 with width parameter 4m. scalar_step applies the lines
// verbatim; run_scalar performs that change of variables so its recorded
// lam always equals the NTK eigenvalue of the equivalent full network.
//
// A direct consequence used by tests and detectors:
//   lam' - lam = (eta/m) * tf * (eta*lam*tf - 4f).
inline ScalarState scalar_step(LossKind kind, const ScalarState& s, double eta, int m) {
  if (!(eta > 0)) fail(errc::config_invalid, "scalar_step: eta must be positive");
  if (m < 1) fail(errc::config_invalid, "scalar_step: m must be at least 1");
  const double tf = tilde_f(kind, s.f);
  const double md = static_cast<double>(m);
  ScalarState next;
  next.f = s.f - eta * s.lam * tf + (eta * eta / md) * s.f * tf * tf;
  next.lam = s.lam - (4.0 * eta / md) * s.f * tf + (eta * eta / md) * s.lam * tf * tf;
  next.step = s.step + 1;
  return next;
}

// Same step with s.lam in NTK normalization for either loss. The logistic
// change of variables (halve lam, quadruple m) is exact in floating point
// because the factors are powers of two.
inline ScalarState scalar_step_ntk(LossKind kind, const ScalarState& s, double eta, int m) {
  if (kind == LossKind::Exponential) return scalar_step(kind, s, eta, m);
  ScalarState reduced{s.f, 0.5 * s.lam, s.step};
  reduced = scalar_step(kind, reduced, eta, 4 * m);
  return ScalarState{reduced.f, 2.0 * reduced.lam, reduced.step};
}

// Runs the reduced map in NTK coordinates: s0.lam is the top NTK eigenvalue
// and the recorded lambda column stays in that normalization for either
// loss. Terminal semantics mirror the full runs on degenerate data: the
// global loss floor is 1 (exponential) or log 2 (logistic), converged when
// the loss is within 1e-8 of it.
inline Trajectory run_scalar(LossKind kind, ScalarState s0, double eta, int m,
                             long max_steps) {
  if (max_steps < 1) fail(errc::config_invalid, "run_scalar: max_steps must be >= 1");
  ScalarState s{s0.f, s0.lam, 0};
  const double floor = degenerate_floor(kind);

  Trajectory traj;
  auto record = [&](double loss) {
    TrajectoryRecord r;
    r.step = s.step;
    r.loss = loss;
    r.grad_norm = std::abs(degenerate_loss_grad(kind, s.f));
    r.w_norm = std::numeric_limits<double>::quiet_NaN();
    r.f = s.f;
    r.lambda = s.lam;
    traj.records.push_back(r);
  };

  double loss = degenerate_loss(kind, s.f);
  record(loss);
  double prev_loss = loss;
  double f2 = s.f, lam2 = s.lam, f1 = s.f, lam1 = s.lam;  // two- and one-step history

  if (std::abs(loss - floor) <= 1e-8) {
    traj.terminal = Terminal::Converged;
    return traj;
  }
  for (long t = 1; t <= max_steps; ++t) {
    f2 = f1;
    lam2 = lam1;
    f1 = s.f;
    lam1 = s.lam;
    s = scalar_step_ntk(kind, s, eta, m);

    if (!std::isfinite(s.f) || !std::isfinite(s.lam) || blown_up(s.f)) {
      TrajectoryRecord r;
      r.step = s.step;
      r.loss = std::numeric_limits<double>::infinity();
      r.grad_norm = std::numeric_limits<double>::quiet_NaN();
      r.w_norm = std::numeric_limits<double>::quiet_NaN();
      r.f = s.f;
      r.lambda = s.lam;
      traj.records.push_back(r);
      traj.terminal = Terminal::Diverged;
      return traj;
    }
    loss = degenerate_loss(kind, s.f);
    record(loss);
    if (blown_up(loss) || loss > 1e12) {
      traj.terminal = Terminal::Diverged;
      return traj;
    }
    if (std::abs(loss - floor) <= 1e-8) {
      traj.terminal = Terminal::Converged;
      return traj;
    }
    if (t >= 2) {
      const double df = s.f - f2;
      const double dl = s.lam - lam2;
      if (std::sqrt(df * df + dl * dl) <= 1e-9) {
        traj.terminal = Terminal::Oscillating;
        return traj;
      }
    }
    if (std::abs(loss - prev_loss) < 1e-14) {
      traj.terminal = Terminal::Saturated;
      return traj;
    }
    prev_loss = loss;
  }
  traj.terminal = Terminal::StepLimit;
  return traj;
}

}  // namespace catapult
