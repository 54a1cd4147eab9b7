#pragma once

#include <cmath>
#include <string>

#include "errors.hpp"

namespace catapult {

enum class LossKind { Exponential, Logistic };

inline const char* to_string(LossKind k) {
  return k == LossKind::Exponential ? "exponential" : "logistic";
}

// l(u): per-margin loss. The logistic branch avoids exp overflow by using
// log1p(exp(-u)) for u >= 0 and -u + log1p(exp(u)) for u < 0.
inline double loss_margin(LossKind kind, double u) {
  if (kind == LossKind::Exponential) return std::exp(-u);
  return u >= 0 ? std::log1p(std::exp(-u)) : -u + std::log1p(std::exp(u));
}

// l'(u); logistic kept in sigmoid form so it stays bounded: -sigma(-u).
inline double loss_grad_margin(LossKind kind, double u) {
  if (kind == LossKind::Exponential) return -std::exp(-u);
  return u >= 0 ? -std::exp(-u) / (1.0 + std::exp(-u)) : -1.0 / (1.0 + std::exp(u));
}

// l''(u) = sigma(u) sigma(-u) for logistic; strictly positive for both kinds.
inline double loss_hess_margin(LossKind kind, double u) {
  if (kind == LossKind::Exponential) return std::exp(-u);
  const double e = std::exp(-std::abs(u));
  const double denom = (1.0 + e) * (1.0 + e);
  return e / denom;
}

// Two points with the same feature and opposite labels collapse the empirical
// risk to an even scalar function of the margin w:
//   exponential: (e^w + e^-w)/2 = cosh w, floor 1
//   logistic:    (log(1+e^-w) + log(1+e^w))/2 = log(2 + 2 cosh w)/2, floor log 2
inline double degenerate_loss(LossKind kind, double w) {
  if (kind == LossKind::Exponential) return std::cosh(w);
  // log(2 + 2cosh w)/2 = |w|/2 + log1p(e^-|w|), stable for large |w|.
  const double a = std::abs(w);
  return 0.5 * a + std::log1p(std::exp(-a));
}

inline double degenerate_floor(LossKind kind) {
  return kind == LossKind::Exponential ? 1.0 : std::log(2.0);
}

// d/dw of degenerate_loss: sinh w (exponential) or tanh(w/2)/2 (logistic).
inline double degenerate_loss_grad(LossKind kind, double w) {
  if (kind == LossKind::Exponential) return std::sinh(w);
  return 0.5 * std::tanh(0.5 * w);
}

// The odd function driving the reduced scalar dynamics:
// sinh f (exponential) or sinh f / (1 + cosh f) = tanh(f/2) (logistic).
// The tanh form is the numerically stable one and is bounded by 1.
// The exponential branch may overflow for |f| beyond ~710; the non-finite
// value is the divergence signal and callers map it to a Diverged terminal
// (see blown_up) instead of letting NaNs propagate silently.
inline double tilde_f(LossKind kind, double f) {
  if (kind == LossKind::Exponential) return std::sinh(f);
  return std::tanh(0.5 * f);
}

// f / tilde_f(f), extended continuously through f = 0 (limits 1 and 2).
// Used by the tail bound lambda <= 4 f / (eta f~), whose right-hand side is
// (4/eta) * tilde_ratio; the series keeps it accurate for tiny f.
inline double tilde_ratio(LossKind kind, double f) {
  const double a = std::abs(f);
  if (kind == LossKind::Exponential) {
    if (a < 1e-4) {
      const double f2 = f * f;
      return 1.0 - f2 / 6.0 + 7.0 * f2 * f2 / 360.0;
    }
    return f / std::sinh(f);
  }
  if (a < 1e-4) {
    const double f2 = f * f;
    return 2.0 + f2 / 6.0 - f2 * f2 / 360.0;
  }
  return f / std::tanh(0.5 * f);
}

}  // namespace catapult
