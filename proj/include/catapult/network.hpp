#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "dataset.hpp"
#include "errors.hpp"
#include "linalg.hpp"
#include "loss.hpp"
#include "rng.hpp"
#include "scalar_map.hpp"
#include "trajectory.hpp"

namespace catapult {

// One-hidden-layer linear network f(x) = m^{-1/2} w2.(w1 x), trained on
// L = (1/n) sum_i loss(y_i f(x_i)) over both layers simultaneously.
struct NetworkState {
  Mat w1;  // m x d
  Vec w2;  // m
  int m = 0;
  long step = 0;
};

// All entries i.i.d. N(0, sigma_w2). Same seed, same state, on any platform:
// the generator is a fixed mt19937_64 + Box-Muller pipeline, filling w1
// row-major and then w2. A zero variance request is treated as the 1e-300
// floor so the limit "all weights zero" stays expressible without a special
// case.
inline NetworkState init_network(int m, int d, double sigma_w2, unsigned long seed) {
  if (m < 1 || d < 1) fail(errc::config_invalid, "init_network: need m >= 1, d >= 1");
  if (!(sigma_w2 >= 0)) fail(errc::config_invalid, "init_network: sigma_w2 must be >= 0");
  const double stddev = std::sqrt(std::max(sigma_w2, 1e-300));
  GaussianRng rng(seed);
  NetworkState s;
  s.m = m;
  s.w1 = Mat(m, d);
  for (double& v : s.w1.data) v = stddev * rng.normal();
  s.w2.resize(m);
  for (double& v : s.w2) v = stddev * rng.normal();
  return s;
}

inline double forward(const NetworkState& s, const Vec& x) {
  if (x.size() != s.w1.cols)
    fail(errc::dimension_mismatch, "forward: input dimension mismatch");
  const Vec a = matvec(s.w1, x);
  return dot(s.w2, a) / std::sqrt(static_cast<double>(s.m));
}

inline Vec dataset_row(const Dataset& data, int i) {
  Vec x(data.d());
  for (int k = 0; k < data.d(); ++k) x[k] = data.features(i, k);
  return x;
}

inline double network_loss(const Dataset& data, LossKind kind, const NetworkState& s) {
  double acc = 0;
  for (int i = 0; i < data.n(); ++i)
    acc += loss_margin(kind, data.labels[i] * forward(s, dataset_row(data, i)));
  return acc / data.n();
}

namespace detail {

// Shared per-step quantities: hidden activations a_i = w1 x_i, outputs f_i,
// and the two gradient blocks in factored form. The w1 gradient is the
// rank-1 matrix outer(w2, v) with v_k = sum_i c_i x_ik, the w2 gradient is
// b_j = sum_i c_i a_ij, where c_i = loss'(y_i f_i) y_i / (n sqrt(m)).
struct NetworkGradient {
  Vec v;  // d, rank-1 factor paired with w2
  Vec b;  // m
  double norm = 0;
  bool finite = true;
};

inline NetworkGradient network_gradient(const Dataset& data, LossKind kind,
                                        const NetworkState& s,
                                        std::vector<Vec>* activations = nullptr) {
  const int n = data.n();
  const int d = data.d();
  const double root_m = std::sqrt(static_cast<double>(s.m));
  NetworkGradient g;
  g.v.assign(d, 0.0);
  g.b.assign(s.m, 0.0);
  if (activations) activations->clear();
  for (int i = 0; i < n; ++i) {
    const Vec x = dataset_row(data, i);
    Vec a = matvec(s.w1, x);
    const double f = dot(s.w2, a) / root_m;
    if (!std::isfinite(f)) {
      g.finite = false;
      return g;
    }
    const double c = loss_grad_margin(kind, data.labels[i] * f) * data.labels[i] /
                     (n * root_m);
    for (int k = 0; k < d; ++k) g.v[k] += c * x[k];
    axpy(c, a, g.b);
    if (activations) activations->push_back(std::move(a));
  }
  const double nv = norm2(g.v);
  const double nw2 = norm2(s.w2);
  g.norm = std::sqrt(nv * nv * nw2 * nw2 + dot(g.b, g.b));
  g.finite = std::isfinite(g.norm);
  return g;
}

}  // namespace detail

// Simultaneous gradient step on both layers, everything evaluated at the
// pre-update state (updating the layers one after the other would couple
// them through the already-moved weights and break the reduced-map
// equivalence).
inline NetworkState gd_step_network(const Dataset& data, LossKind kind,
                                    const NetworkState& s, double eta) {
  if (!(eta > 0)) fail(errc::config_invalid, "gd_step_network: eta must be positive");
  const auto g = detail::network_gradient(data, kind, s);
  NetworkState next;
  next.m = s.m;
  next.step = s.step + 1;
  next.w1 = s.w1;
  next.w2 = s.w2;
  for (int j = 0; j < s.m; ++j) {
    const double c = eta * s.w2[j];
    for (int k = 0; k < static_cast<int>(s.w1.cols); ++k) next.w1(j, k) -= c * g.v[k];
  }
  axpy(-eta, g.b, next.w2);
  return next;
}

// Normalized NTK of the current state:
//   Theta_ab = (1/(m n)) [ (w1 x_a).(w1 x_b) + ||w2||^2 (x_a.x_b) ].
inline Mat ntk_matrix(const NetworkState& s, const Dataset& data) {
  const int n = data.n();
  std::vector<Vec> a(n);
  for (int i = 0; i < n; ++i) a[i] = matvec(s.w1, dataset_row(data, i));
  const double w2sq = dot(s.w2, s.w2);
  Mat theta(n, n);
  const double scale = 1.0 / (static_cast<double>(s.m) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      double xx = 0;
      for (int k = 0; k < data.d(); ++k) xx += data.features(i, k) * data.features(j, k);
      const double val = scale * (dot(a[i], a[j]) + w2sq * xx);
      theta(i, j) = val;
      theta(j, i) = val;
    }
  }
  return theta;
}

// Largest NTK eigenvalue. n = 1 and n = 2 use closed forms; larger n runs
// deterministic power iteration (tol 1e-12, 10^4 iterations) on the dense
// matrix, which is sound here because the NTK is positive semidefinite, so
// its top eigenvalue is also the dominant one.
inline double ntk_top_eigenvalue(const NetworkState& s, const Dataset& data) {
  const Mat theta = ntk_matrix(s, data);
  const int n = theta.rows;
  if (n == 1) return theta(0, 0);
  if (n == 2) {
    const double a = theta(0, 0), b = theta(0, 1), c = theta(1, 1);
    return 0.5 * (a + c) + std::sqrt(0.25 * (a - c) * (a - c) + b * b);
  }
  auto apply = [&](const Vec& in) { return matvec(theta, in); };
  const auto r = power_iteration(apply, static_cast<std::size_t>(n), 1e-12, 10000);
  if (!r.converged)
    fail(errc::no_convergence,
         "ntk_top_eigenvalue: power iteration residual " + format_double(r.residual));
  return r.value;
}

inline bool has_degenerate_pair(const Dataset& data) {
  for (int i = 0; i < data.n(); ++i) {
    for (int j = i + 1; j < data.n(); ++j) {
      if (data.labels[i] != -data.labels[j]) continue;
      bool same = true;
      for (int k = 0; k < data.d() && same; ++k)
        same = std::abs(data.features(i, k) - data.features(j, k)) <= 1e-12;
      if (same) return true;
    }
  }
  return false;
}

struct NetworkRun {
  Trajectory trajectory;
  NetworkState state;  // final parameters (last finite state on divergence)
};

// Full training run. Records loss, full-parameter gradient norm, parameter
// norm, the output f on the first sample, and the top NTK eigenvalue at
// every step. Convergence criterion: on data containing a degenerate pair,
// loss within 1e-8 of the global floor (1 or log 2); otherwise gradient
// norm <= grad_tol (1e-6 by default). Other terminals follow the predictor
// conventions (Diverged past 1e12 or on overflow, Oscillating via the 2-step
// full-parameter recurrence at 1e-9, Saturated below 1e-14 loss change).
inline NetworkRun run_network(const Dataset& data, LossKind kind, NetworkState state,
                              double eta, long max_steps, double grad_tol = 1e-6) {
  if (max_steps < 1) fail(errc::config_invalid, "run_network: max_steps must be >= 1");
  validate_dataset(data);
  const bool degenerate = has_degenerate_pair(data);
  const double floor = degenerate_floor(kind);

  NetworkRun run;
  Trajectory& traj = run.trajectory;
  const Vec x0 = dataset_row(data, 0);

  auto param_norm = [&](const NetworkState& s) {
    double acc = dot(s.w2, s.w2);
    for (double v : s.w1.data) acc += v * v;
    return std::sqrt(acc);
  };
  auto record = [&](const NetworkState& s, double loss, double gnorm) {
    TrajectoryRecord r;
    r.step = s.step;
    r.loss = loss;
    r.grad_norm = gnorm;
    r.w_norm = param_norm(s);
    r.f = forward(s, x0);
    r.lambda = ntk_top_eigenvalue(s, data);
    traj.records.push_back(r);
  };
  auto converged = [&](double loss, double gnorm) {
    return degenerate ? std::abs(loss - floor) <= 1e-8 : gnorm <= grad_tol;
  };

  // Parameter snapshots for the 2-step recurrence check.
  auto flat = [&](const NetworkState& s) {
    Vec p = s.w1.data;
    p.insert(p.end(), s.w2.begin(), s.w2.end());
    return p;
  };
  Vec prev2 = flat(state), prev1 = prev2;

  double loss = network_loss(data, kind, state);
  auto grad = detail::network_gradient(data, kind, state);
  record(state, loss, grad.norm);
  double prev_loss = loss;
  if (converged(loss, grad.norm)) {
    traj.terminal = Terminal::Converged;
    run.state = std::move(state);
    return run;
  }

  for (long t = 1; t <= max_steps; ++t) {
    prev2 = std::move(prev1);
    prev1 = flat(state);
    NetworkState next = gd_step_network(data, kind, state, eta);

    bool overflow = false;
    for (double v : next.w1.data) overflow = overflow || blown_up(v);
    for (double v : next.w2) overflow = overflow || blown_up(v);
    loss = overflow ? std::numeric_limits<double>::infinity()
                    : network_loss(data, kind, next);
    if (overflow || blown_up(loss) || loss > 1e12) {
      TrajectoryRecord r;
      r.step = next.step;
      r.loss = std::numeric_limits<double>::infinity();
      r.grad_norm = std::numeric_limits<double>::quiet_NaN();
      r.w_norm = std::numeric_limits<double>::quiet_NaN();
      traj.records.push_back(r);
      traj.terminal = Terminal::Diverged;
      run.state = std::move(state);  // last finite state
      return run;
    }
    state = std::move(next);
    grad = detail::network_gradient(data, kind, state);
    record(state, loss, grad.norm);

    if (converged(loss, grad.norm)) {
      traj.terminal = Terminal::Converged;
      break;
    }
    if (t >= 2) {
      Vec diff = flat(state);
      axpy(-1.0, prev2, diff);
      if (norm2(diff) <= 1e-9) {
        traj.terminal = Terminal::Oscillating;
        break;
      }
    }
    if (std::abs(loss - prev_loss) < 1e-14) {
      traj.terminal = Terminal::Saturated;
      break;
    }
    prev_loss = loss;
    if (t == max_steps) traj.terminal = Terminal::StepLimit;
  }
  run.state = std::move(state);
  return run;
}

// Maximum over matched steps of |f_full - f_scalar| + |lam_full - lam_scalar|
// between full-parameter training and the reduced map, both started from the
// same (f0, lam0) read off the given network state. The invariance of the
// reduced map under padding zero input coordinates makes this work for any
// degenerate pair with a unit-norm shared feature.
inline double scalar_full_equivalence(const Dataset& data, LossKind kind,
                                      const NetworkState& state0, double eta,
                                      long steps) {
  validate_dataset(data);
  if (!has_degenerate_pair(data) || data.n() != 2)
    fail(errc::data_invalid, "scalar_full_equivalence: need exactly a degenerate pair");
  double x_norm = 0;
  for (int k = 0; k < data.d(); ++k)
    x_norm += data.features(0, k) * data.features(0, k);
  if (std::abs(x_norm - 1.0) > 1e-12)
    fail(errc::data_invalid,
         "scalar_full_equivalence: shared feature must have unit norm");

  NetworkState full = state0;
  ScalarState s{forward(full, dataset_row(data, 0)),
                ntk_top_eigenvalue(full, data), 0};
  double max_err = 0;
  for (long t = 0;; ++t) {
    const double f_full = forward(full, dataset_row(data, 0));
    const double lam_full = ntk_top_eigenvalue(full, data);
    if (!std::isfinite(f_full) || !std::isfinite(s.f))
      fail(errc::no_convergence,
           "scalar_full_equivalence: diverged at step " + std::to_string(t));
    max_err = std::max(max_err, std::abs(f_full - s.f) + std::abs(lam_full - s.lam));
    if (t == steps) break;
    full = gd_step_network(data, kind, full, eta);
    s = scalar_step_ntk(kind, s, eta, full.m);
  }
  return max_err;
}

}  // namespace catapult
