#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "loss.hpp"
#include "trajectory.hpp"

namespace catapult {

// Catapult verdict for one degenerate-data trajectory. A catapult run rises
// first, then relaxes monotonically to the global loss floor while the NTK
// eigenvalue drops below its initial value.
struct CatapultReport {
  bool is_catapult = false;
  std::optional<long> T;  // last step of the initial loss-increase prefix
  double lambda_init = std::numeric_limits<double>::quiet_NaN();
  double lambda_final = std::numeric_limits<double>::quiet_NaN();
  bool bound_ok = false;  // tail lambda <= 4 f / (eta tilde_f), with slack
  bool borderline = false;  // some decision sat inside the tolerance band
  std::string reason;  // failed checks, empty when is_catapult
};

namespace detail {

inline void add_reason(std::string& reason, const char* what) {
  if (!reason.empty()) reason += "; ";
  reason += what;
}

}  // namespace detail

// Decision rule, with slack band rel 1e-9 / abs 1e-12 on every comparison
// (runs landing inside a band are flagged borderline):
//   T       = last step of the maximal strictly-increasing loss prefix
//             starting at step 0 (absent when the first step already
//             decreases).
//   (a) the prefix is nonempty: the loss strictly rose on some step <= T;
//   (b) |f| is non-increasing from step T+1 on;
//   (c) lambda is non-increasing from step T+1 on (the T -> T+1 transition
//       itself is deliberately unconstrained: right at the peak either order
//       of |f_T|, |f_{T+1}| can occur);
//   (d) the run converged to the degenerate global floor (1 or log 2,
//       within 1e-8);
//   plus lambda_final < lambda_init.
// bound_ok separately checks the tail inequality lambda <= (4/eta) f/tilde_f
// + 1e-9 over the last 10% of records (at least 10).
inline CatapultReport detect_catapult(const Trajectory& traj, double eta, LossKind kind) {
  CatapultReport rep;
  const auto& rec = traj.records;
  if (rec.size() < 2) {
    rep.reason = "trajectory too short";
    return rep;
  }
  rep.lambda_init = rec.front().lambda;
  rep.lambda_final = traj.last_finite().lambda;

  auto slack = [](double ref) { return std::max(1e-12, 1e-9 * std::abs(ref)); };

  // Initial maximal loss-increase prefix.
  std::size_t peak = 0;
  while (peak + 1 < rec.size() && std::isfinite(rec[peak + 1].loss) &&
         rec[peak + 1].loss > rec[peak].loss + slack(rec[peak].loss))
    ++peak;
  if (peak + 1 < rec.size() && std::isfinite(rec[peak + 1].loss) &&
      std::abs(rec[peak + 1].loss - rec[peak].loss) <= slack(rec[peak].loss))
    rep.borderline = true;
  if (peak >= 1) rep.T = rec[peak].step;

  bool ok = true;
  if (traj.terminal == Terminal::Diverged) {
    detail::add_reason(rep.reason, "Diverged");
    ok = false;
  }
  if (!rep.T) {
    detail::add_reason(rep.reason, "no initial loss rise");
    ok = false;
  }

  // (b) and (c) from the step after the peak onward.
  for (std::size_t t = peak + 1; ok && t + 1 < rec.size(); ++t) {
    if (!std::isfinite(rec[t + 1].loss)) break;
    if (std::abs(rec[t + 1].f) > std::abs(rec[t].f) + slack(rec[t].f)) {
      detail::add_reason(rep.reason, "|f| increased after T+1");
      ok = false;
    }
    if (rec[t + 1].lambda > rec[t].lambda + slack(rec[t].lambda)) {
      detail::add_reason(rep.reason, "lambda increased after T+1");
      ok = false;
    }
  }

  const double floor = degenerate_floor(kind);
  if (traj.terminal != Terminal::Converged ||
      std::abs(traj.last_finite().loss - floor) > 1e-8) {
    detail::add_reason(rep.reason, "did not converge to the global floor");
    ok = false;
  }

  if (!(rep.lambda_final < rep.lambda_init)) {
    detail::add_reason(rep.reason, "lambda_final not below lambda_init");
    ok = false;
  } else if (rep.lambda_final >= rep.lambda_init - slack(rep.lambda_init)) {
    rep.borderline = true;
  }

  // Tail bound check (independent of the catapult verdict).
  std::size_t tail = std::max<std::size_t>(10, rec.size() / 10);
  tail = std::min(tail, rec.size());
  bool any_lambda = false;
  bool bound = true;
  for (std::size_t t = rec.size() - tail; t < rec.size(); ++t) {
    if (!std::isfinite(rec[t].lambda) || !std::isfinite(rec[t].f)) continue;
    any_lambda = true;
    const double cap = (4.0 / eta) * tilde_ratio(kind, rec[t].f) + 1e-9;
    if (rec[t].lambda > cap) bound = false;
  }
  rep.bound_ok = any_lambda && bound;
  if (!any_lambda) detail::add_reason(rep.reason, "no lambda recorded");

  rep.is_catapult = ok;
  if (ok) rep.reason.clear();
  return rep;
}

}  // namespace catapult
