#pragma once

#include <cmath>
#include <vector>

#include "critical_lr.hpp"
#include "dataset.hpp"
#include "errors.hpp"
#include "linalg.hpp"
#include "loss.hpp"
#include "trajectory.hpp"

namespace catapult {

// Linear predictor f(x) = w.x trained on the empirical risk
// L(w) = (1/n) sum_i loss(y_i w.x_i).

struct PredictorState {
  Vec w;
  long step = 0;
};

inline double predictor_margin(const Dataset& data, const Vec& w, int i) {
  double u = 0;
  for (int k = 0; k < data.d(); ++k) u += w[k] * data.features(i, k);
  return u * data.labels[i];
}

// Overflow surfaces as an infinite return value (the caller's divergence
// signal), never as an exception.
inline double predictor_loss(const Dataset& data, LossKind kind, const Vec& w) {
  if (static_cast<int>(w.size()) != data.d())
    fail(errc::dimension_mismatch, "predictor_loss: w dimension mismatch");
  double acc = 0;
  for (int i = 0; i < data.n(); ++i) acc += loss_margin(kind, predictor_margin(data, w, i));
  return acc / data.n();
}

inline Vec predictor_grad(const Dataset& data, LossKind kind, const Vec& w) {
  if (static_cast<int>(w.size()) != data.d())
    fail(errc::dimension_mismatch, "predictor_grad: w dimension mismatch");
  Vec g(data.d(), 0.0);
  for (int i = 0; i < data.n(); ++i) {
    const double lp = loss_grad_margin(kind, predictor_margin(data, w, i));
    const double c = lp * data.labels[i] / data.n();
    for (int k = 0; k < data.d(); ++k) g[k] += c * data.features(i, k);
  }
  return g;
}

inline PredictorState gd_step_predictor(const Dataset& data, LossKind kind,
                                        const PredictorState& state, double eta) {
  if (!(eta > 0)) fail(errc::config_invalid, "gd_step_predictor: eta must be positive");
  const Vec g = predictor_grad(data, kind, state.w);
  PredictorState next;
  next.w = state.w;
  axpy(-eta, g, next.w);
  next.step = state.step + 1;
  return next;
}

// Full gradient-descent run. Terminal labels, checked in this order at each
// step: Converged (grad_norm <= tol), Diverged (overflow anywhere or loss
// beyond 1e12), Oscillating (state matches the state two steps earlier
// within 1e-9 in L2 while the gradient is still large), Saturated (per-step
// loss change below 1e-14 with a still-large gradient), StepLimit.
inline Trajectory run_predictor(const Dataset& data, LossKind kind, const Vec& w0,
                                double eta, long max_steps, double tol) {
  if (max_steps < 1) fail(errc::config_invalid, "run_predictor: max_steps must be >= 1");
  if (!(tol > 0)) fail(errc::config_invalid, "run_predictor: tol must be positive");
  validate_dataset(data);

  Trajectory traj;
  PredictorState state{w0, 0};
  Vec prev2 = w0, prev1 = w0;  // states two and one steps back

  auto record = [&](double loss, double gnorm) {
    TrajectoryRecord r;
    r.step = state.step;
    r.loss = loss;
    r.grad_norm = gnorm;
    r.w_norm = norm2(state.w);
    double f = 0;
    for (int k = 0; k < data.d(); ++k) f += state.w[k] * data.features(0, k);
    r.f = f;
    traj.records.push_back(r);
  };

  double loss = predictor_loss(data, kind, state.w);
  Vec g = predictor_grad(data, kind, state.w);
  double gnorm = norm2(g);
  record(loss, gnorm);
  double prev_loss = loss;

  if (gnorm <= tol) {
    traj.terminal = Terminal::Converged;
    return traj;
  }

  for (long t = 1; t <= max_steps; ++t) {
    PredictorState next;
    next.w = state.w;
    axpy(-eta, g, next.w);
    next.step = t;
    prev2 = prev1;
    prev1 = state.w;
    state = std::move(next);

    bool overflow = false;
    for (double v : state.w) overflow = overflow || blown_up(v);
    loss = overflow ? std::numeric_limits<double>::infinity()
                    : predictor_loss(data, kind, state.w);
    if (overflow || blown_up(loss) || loss > 1e12) {
      record(loss, std::numeric_limits<double>::quiet_NaN());
      traj.terminal = Terminal::Diverged;
      return traj;
    }
    g = predictor_grad(data, kind, state.w);
    gnorm = norm2(g);
    record(loss, gnorm);

    if (gnorm <= tol) {
      traj.terminal = Terminal::Converged;
      return traj;
    }
    if (t >= 2) {
      Vec diff = state.w;
      axpy(-1.0, prev2, diff);
      if (norm2(diff) <= 1e-9) {
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

// Extreme eigenvalues of the empirical Hessian
//   H(w) = (1/n) sum_i loss''(y_i w.x_i) x_i x_i^T
// over a deterministic grid with ||w||_inf <= region_radius. beta is the
// largest eigenvalue seen (smoothness constant), alpha the smallest (strong
// convexity; near zero for separable data since loss'' decays along the
// margin direction). The true constants are suprema/infima over a region;
// this samples a finite grid of a stated ball, which is all downstream
// consumers need. Radius zero collapses the grid to {0}. The tensor grid is
// only materialized for d <= 3; higher dimensions scan each axis separately.
struct ConvexityEstimate {
  double alpha = 0;
  double beta = 0;
};

inline ConvexityEstimate estimate_convexity(const Dataset& data, LossKind kind,
                                            double region_radius, int grid) {
  if (region_radius < 0) fail(errc::config_invalid, "estimate_convexity: radius < 0");
  if (grid < 2 && region_radius > 0)
    fail(errc::config_invalid, "estimate_convexity: grid must be >= 2");
  validate_dataset(data);
  const int d = data.d();

  std::vector<Vec> points;
  Vec axis;
  if (region_radius == 0) {
    axis = {0.0};
  } else {
    axis.resize(grid);
    for (int i = 0; i < grid; ++i)
      axis[i] = -region_radius + 2.0 * region_radius * i / (grid - 1);
  }
  if (d <= 3) {
    Vec w(d, 0.0);
    // tensor product over up to three axes
    const int g = static_cast<int>(axis.size());
    const long total = static_cast<long>(std::pow(g, d));
    for (long idx = 0; idx < total; ++idx) {
      long rest = idx;
      for (int k = 0; k < d; ++k) {
        w[k] = axis[rest % g];
        rest /= g;
      }
      points.push_back(w);
    }
  } else {
    points.emplace_back(d, 0.0);
    for (int k = 0; k < d; ++k) {
      for (double v : axis) {
        Vec w(d, 0.0);
        w[k] = v;
        points.push_back(w);
      }
    }
  }

  ConvexityEstimate est;
  est.alpha = std::numeric_limits<double>::infinity();
  est.beta = -std::numeric_limits<double>::infinity();
  Mat h(d, d);
  for (const Vec& w : points) {
    std::fill(h.data.begin(), h.data.end(), 0.0);
    for (int i = 0; i < data.n(); ++i) {
      const double c = loss_hess_margin(kind, predictor_margin(data, w, i)) / data.n();
      for (int r = 0; r < d; ++r)
        for (int s = 0; s < d; ++s) h(r, s) += c * data.features(i, r) * data.features(i, s);
    }
    const Vec ev = jacobi_eigenvalues(h);
    est.alpha = std::min(est.alpha, ev.front());
    est.beta = std::max(est.beta, ev.back());
  }
  return est;
}

// Trichotomy labels of the predictor dynamics.
enum class PredictorRegime { MonotoneDecrease, Oscillate, MonotoneIncrease };

inline const char* to_string(PredictorRegime r) {
  switch (r) {
    case PredictorRegime::MonotoneDecrease: return "MonotoneDecrease";
    case PredictorRegime::Oscillate: return "Oscillate";
    case PredictorRegime::MonotoneIncrease: return "MonotoneIncrease";
  }
  return "Unknown";
}

// Labels a run by the sign pattern of per-step loss changes (tolerance 1e-12
// per step). An Oscillating terminal wins outright: at the period-2 orbit the
// loss differences are all inside the tolerance band. Mixed signs on
// degenerate data fall back to the scalar trichotomy (compare eta with the
// critical rate: below -> decrease; above -> the exponential loss explodes
// while the bounded logistic gradient settles into the period-2 orbit).
// Mixed signs on any other data are not covered by the scalar theory and are
// reported as an error rather than forced into a label.
inline PredictorRegime classify_predictor_regime(const Dataset& data, LossKind kind,
                                                 const Vec& w0, double eta,
                                                 long max_steps = 2000, double tol = 1e-9) {
  const Trajectory traj = run_predictor(data, kind, w0, eta, max_steps, tol);
  if (traj.terminal == Terminal::Oscillating) return PredictorRegime::Oscillate;

  bool any_up = false, any_down = false;
  for (std::size_t i = 1; i < traj.records.size(); ++i) {
    const double delta = traj.records[i].loss - traj.records[i - 1].loss;
    if (std::isnan(delta)) continue;
    if (delta > 1e-12) any_up = true;
    if (delta < -1e-12) any_down = true;
  }
  if (traj.terminal == Terminal::Diverged && !any_down) return PredictorRegime::MonotoneIncrease;
  if (!any_up) return PredictorRegime::MonotoneDecrease;
  if (!any_down) return PredictorRegime::MonotoneIncrease;

  const bool degenerate =
      classify_separation(data).condition == SeparationCondition::Degenerate;
  if (!degenerate)
    fail(errc::inconclusive,
         "classify_predictor_regime: mixed loss changes on non-degenerate data");
  // Degenerate data: defer to the scalar trichotomy. The effective scalar
  // initial weight is the first-sample output w0.x_0 (all samples share the
  // feature vector up to sign conventions).
  double f0 = 0;
  for (int k = 0; k < data.d(); ++k) f0 += w0[k] * data.features(0, k);
  const double eta_c =
      f0 == 0.0 ? critical_lr_limit(kind) : critical_lr(kind, f0);
  if (eta < eta_c) return PredictorRegime::MonotoneDecrease;
  if (kind == LossKind::Exponential) return PredictorRegime::MonotoneIncrease;
  return PredictorRegime::Oscillate;
}

}  // namespace catapult
