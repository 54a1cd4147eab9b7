#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace catapult {

// Error taxonomy. Numeric blow-up during a trajectory is *not* an error:
// it is recorded as a Diverged terminal so phase classifiers can consume it.
// Exceptions are reserved for contract violations and environment failures.
enum class errc {
  config_invalid,     // bad arguments / malformed config (CLI exit 2)
  io_failure,         // missing or unwritable files (CLI exit 3)
  data_invalid,       // dataset violates a precondition (CLI exit 4)
  no_sign_change,     // bisection bracket does not straddle a root
  max_iter_exceeded,  // iteration budget exhausted without meeting tolerance
  degenerate_input,   // e.g. critical_lr at w0 = 0 (use the limit variant)
  no_positive_root,   // oscillation fixed point requested below threshold
  no_convergence,     // eigen iteration failed to settle
  no_bracket,         // sweep shows no phase transition to bisect
  dimension_mismatch,
  generation_failed,  // synthetic dataset resampling budget exhausted
  inconclusive,       // mixed-sign trajectory on non-degenerate data
};

class error : public std::runtime_error {
public:
  error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  errc code() const noexcept { return code_; }

private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw error(code, what); }

// Divergence threshold: any intermediate magnitude beyond this is treated as
// blown up even before it reaches infinity, so classification is deterministic.
inline constexpr double kOverflowLimit = 1e300;

inline bool blown_up(double x) { return !std::isfinite(x) || std::abs(x) > kOverflowLimit; }

}  // namespace catapult
