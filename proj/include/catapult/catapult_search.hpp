#pragma once

#include <cmath>
#include <optional>

#include "dataset.hpp"
#include "loss.hpp"
#include "network.hpp"
#include "scalar_map.hpp"

namespace catapult {

// Lightweight catapult probe of the reduced map (NTK coordinates), cheap
// enough to scan thousands of learning rates: follows (f, lam) until the
// degenerate loss either reaches its floor or blows past the overflow guard.
struct ProbeResult {
  bool rose = false;       // loss strictly increased on the first step(s)
  bool converged = false;  // reached the floor within 1e-9
  double lambda_ratio = std::numeric_limits<double>::quiet_NaN();
  long steps = 0;
};

inline ProbeResult probe_scalar_catapult(LossKind kind, double f0, double lam0,
                                         double eta, int m, long max_steps = 2000) {
  ProbeResult res;
  ScalarState s{f0, lam0, 0};
  const double floor = degenerate_floor(kind);
  double prev_loss = degenerate_loss(kind, s.f);
  bool in_prefix = true;
  for (long t = 1; t <= max_steps; ++t) {
    s = scalar_step_ntk(kind, s, eta, m);
    if (!std::isfinite(s.f) || std::abs(s.f) > 40.0) {
      res.steps = t;
      return res;  // diverged (or far beyond any return for these losses)
    }
    const double loss = degenerate_loss(kind, s.f);
    if (in_prefix && loss > prev_loss + 1e-12) res.rose = true;
    if (loss <= prev_loss) in_prefix = false;
    prev_loss = loss;
    if (std::abs(loss - floor) <= 1e-9) {
      res.converged = true;
      res.lambda_ratio = s.lam / lam0;
      res.steps = t;
      return res;
    }
  }
  res.steps = max_steps;
  return res;
}

struct CatapultCandidate {
  unsigned long seed = 0;
  double eta = 0;
  double f0 = 0;
  double lambda0 = 0;
  double probed_ratio = 1.0;
};

// Searches seeds and learning rates for a deep catapult of the two-layer
// degenerate dynamics: an eta whose run rises first, converges to the floor,
// and ends with lambda below ratio_cap of its initial value. Strategy per
// seed: keep inits whose scalar state is moderately activated
// (|f0|/sqrt(lambda0) in [0.7, 1.6]), coarse-scan eta at step 5e-4 over
// [lo, hi]/lambda0, then refine the best window at step 2e-6 - the deep
// exponential windows are thin in eta at large width m because each step
// moves lambda by O(1/m). The probe itself decides (rise + floor + ratio);
// callers confirm the winner on the full parameter dynamics, which match
// the reduced map exactly on degenerate unit-norm data.
inline std::optional<CatapultCandidate> find_catapult_candidate(
    LossKind kind, int m, double sigma_w2, const Dataset& degenerate_data,
    unsigned long seed_lo, unsigned long seed_hi, double ratio_cap = 0.895,
    double eta_lo_scale = 1.2, double eta_hi_scale = 4.2) {
  const int d = degenerate_data.d();
  for (unsigned long seed = seed_lo; seed <= seed_hi; ++seed) {
    const NetworkState state = init_network(m, d, sigma_w2, seed);
    const double f0 = forward(state, dataset_row(degenerate_data, 0));
    const double lam0 = ntk_top_eigenvalue(state, degenerate_data);
    const double activation = std::abs(f0) / std::sqrt(lam0);
    if (activation < 0.7 || activation > 1.6) continue;

    const double eta_min = eta_lo_scale / lam0;
    const double eta_max = eta_hi_scale / lam0;
    double best_eta = -1.0;
    double best_ratio = 1.0;
    for (double eta = eta_min; eta <= eta_max; eta += 5e-4) {
      const auto probe = probe_scalar_catapult(kind, f0, lam0, eta, m);
      if (probe.rose && probe.converged && probe.lambda_ratio < best_ratio) {
        best_ratio = probe.lambda_ratio;
        best_eta = eta;
      }
    }
    if (best_eta < 0 || best_ratio > 0.97) continue;

    // Fine pass around the most promising coarse point.
    double fine_eta = best_eta;
    double fine_ratio = best_ratio;
    for (double eta = best_eta - 6e-4; eta <= best_eta + 6e-4; eta += 2e-6) {
      if (eta <= 0) continue;
      const auto probe = probe_scalar_catapult(kind, f0, lam0, eta, m);
      if (probe.rose && probe.converged && probe.lambda_ratio < fine_ratio) {
        fine_ratio = probe.lambda_ratio;
        fine_eta = eta;
      }
    }
    if (fine_ratio >= ratio_cap) continue;

    CatapultCandidate cand;
    cand.seed = seed;
    cand.eta = fine_eta;
    cand.f0 = f0;
    cand.lambda0 = lam0;
    cand.probed_ratio = fine_ratio;
    return cand;
  }
  return std::nullopt;
}

}  // namespace catapult
