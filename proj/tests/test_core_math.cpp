#include <cmath>

#include "catch_amalgamated.hpp"

#include "catapult/catapult.hpp"

using namespace catapult;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("per-margin loss values and stability", "[loss]") {
  REQUIRE(loss_margin(LossKind::Exponential, 0.0) == 1.0);
  REQUIRE_THAT(loss_margin(LossKind::Logistic, 0.0), WithinRel(std::log(2.0), 1e-15));
  REQUIRE_THAT(loss_margin(LossKind::Exponential, -1.0), WithinRel(std::exp(1.0), 1e-15));

  // Large positive margins must not overflow the logistic branch.
  REQUIRE(loss_margin(LossKind::Logistic, 1000.0) >= 0.0);
  REQUIRE(loss_margin(LossKind::Logistic, 1000.0) < 1e-300);
  REQUIRE_THAT(loss_margin(LossKind::Logistic, -1000.0), WithinRel(1000.0, 1e-12));

  REQUIRE(loss_grad_margin(LossKind::Exponential, 0.0) == -1.0);
  REQUIRE(loss_grad_margin(LossKind::Logistic, 0.0) == -0.5);
  REQUIRE_THAT(loss_grad_margin(LossKind::Logistic, 50.0),
               WithinRel(-1.928749847963917783e-22, 1e-12));
  REQUIRE_THAT(loss_grad_margin(LossKind::Logistic, -1000.0), WithinRel(-1.0, 1e-12));

  REQUIRE(loss_hess_margin(LossKind::Exponential, 0.0) == 1.0);
  REQUIRE(loss_hess_margin(LossKind::Logistic, 0.0) == 0.25);
  REQUIRE_THAT(loss_hess_margin(LossKind::Logistic, 10.0),
               WithinRel(4.539580773595167103e-5, 1e-12));
  REQUIRE(loss_hess_margin(LossKind::Logistic, -40.0) > 0.0);
}

TEST_CASE("degenerate closed forms", "[loss]") {
  REQUIRE_THAT(degenerate_loss(LossKind::Exponential, 1.0),
               WithinRel(1.543080634815243778, 1e-15));
  REQUIRE_THAT(degenerate_loss(LossKind::Logistic, 1.0),
               WithinRel(0.813261687518222834, 1e-15));
  REQUIRE(degenerate_floor(LossKind::Exponential) == 1.0);
  REQUIRE(degenerate_floor(LossKind::Logistic) == std::log(2.0));

  // Even in w, floor attained only at 0, stable at large |w|.
  for (double w : {0.3, 1.7, 40.0, 900.0}) {
    REQUIRE(degenerate_loss(LossKind::Logistic, w) ==
            degenerate_loss(LossKind::Logistic, -w));
    REQUIRE(degenerate_loss(LossKind::Logistic, w) > std::log(2.0));
  }
  REQUIRE_THAT(degenerate_loss(LossKind::Logistic, 900.0), WithinRel(450.0, 1e-12));

  REQUIRE_THAT(degenerate_loss_grad(LossKind::Exponential, 1.0),
               WithinRel(1.175201193643801457, 1e-15));
  REQUIRE_THAT(degenerate_loss_grad(LossKind::Logistic, 1.0),
               WithinRel(0.231058578630004879, 1e-15));
  REQUIRE(degenerate_loss_grad(LossKind::Exponential, 0.0) == 0.0);
}

TEST_CASE("tilde_f and the continuous ratio extension", "[loss]") {
  REQUIRE(tilde_f(LossKind::Exponential, 0.7) == std::sinh(0.7));
  REQUIRE(tilde_f(LossKind::Logistic, 0.7) == std::tanh(0.35));

  // Limits through f = 0.
  REQUIRE(tilde_ratio(LossKind::Exponential, 0.0) == 1.0);
  REQUIRE(tilde_ratio(LossKind::Logistic, 0.0) == 2.0);

  // The series and direct branches must agree across the switchover: one ulp
  // apart in the argument, so any visible jump is a branch mismatch.
  for (LossKind kind : {LossKind::Exponential, LossKind::Logistic}) {
    const double below = tilde_ratio(kind, std::nextafter(1e-4, 0.0));
    const double above = tilde_ratio(kind, 1e-4);
    REQUIRE(std::abs(below - above) < 1e-12);
  }
  REQUIRE_THAT(tilde_ratio(LossKind::Exponential, 2.0),
               WithinRel(2.0 / std::sinh(2.0), 1e-15));
}

TEST_CASE("phi sign decides scalar magnitude growth", "[phase]") {
  // w' = w - eta L'(w) on the degenerate loss; |w'| > |w| iff phi(|w|) > 0.
  for (LossKind kind : {LossKind::Exponential, LossKind::Logistic}) {
    for (double eta : {0.5, 1.0, 1.9, 2.1, 3.0, 8.5, 12.0}) {
      for (double w : {-2.0, -1.0, -0.5, -0.1, 0.1, 0.5, 1.0, 2.0}) {
        const double wn = w - eta * degenerate_loss_grad(kind, w);
        const double p = phi(kind, eta, std::abs(w));
        if (std::abs(p) < 1e-9) continue;  // too close to the boundary to call
        REQUIRE((std::abs(wn) > std::abs(w)) == (p > 0));
      }
    }
  }
  REQUIRE_THROWS_AS(phi(LossKind::Exponential, 0.0, 1.0), error);
}

TEST_CASE("phi_lambda matches independently computed values", "[phase]") {
  REQUIRE_THAT(phi_lambda(LossKind::Exponential, 10.0, 0.4, 1000, 1.0),
               WithinRel(2.562694990021024247, 1e-13));
  REQUIRE_THAT(phi_lambda(LossKind::Logistic, 10.0, 0.1, 100, 2.0),
               WithinRel(-4.398457160816182973, 1e-13));

  // Odd in x.
  const double plus = phi_lambda(LossKind::Exponential, 2.0, 1.0, 10, 0.8);
  const double minus = phi_lambda(LossKind::Exponential, 2.0, 1.0, 10, -0.8);
  REQUIRE_THAT(plus, WithinAbs(-minus, 1e-15));

  // Far past the sinh overflow point the quadratic term dominates: the value
  // must come back as a signed infinity, not NaN.
  const double far = phi_lambda(LossKind::Exponential, 1.0, 1.0, 10, 400.0);
  REQUIRE(std::isinf(far));
  REQUIRE(far < 0);
  REQUIRE(phi_lambda(LossKind::Exponential, 1.0, 1.0, 10, -400.0) > 0);
}

TEST_CASE("region taxonomy of the phase function", "[phase]") {
  // Exponential, eta*lambda < 2 but a positive hump exists at moderate x
  // because sinh outgrows 2x before the quadratic term takes over.
  const LossKind e = LossKind::Exponential;
  REQUIRE(region_of(e, 0.5, 1.0, 1000, 0.5) == Region::Ph1);
  REQUIRE(region_of(e, 0.5, 1.0, 1000, 5.0) == Region::Ph2);
  REQUIRE(region_of(e, 0.5, 1.0, 1000, 10.0) == Region::Ph3);

  // Logistic with eta*lambda/2 < 2: phi_lambda < 0 on the whole half line,
  // which is one Ph1 component by convention.
  REQUIRE(region_of(LossKind::Logistic, 10.0, 0.1, 100, 2.0) == Region::Ph1);
  // Logistic with eta*lambda/2 > 2: positive from 0 out to where the bounded
  // tilde_f loses to 2x, negative tail beyond.
  REQUIRE(region_of(LossKind::Logistic, 100.0, 0.1, 100, 0.01) == Region::Ph2);
  REQUIRE(region_of(LossKind::Logistic, 100.0, 0.1, 100, 6.0) == Region::Ph3);

  // Mirrors in x.
  REQUIRE(region_of(e, 0.5, 1.0, 1000, -5.0) == Region::Ph2);
}

TEST_CASE("next_step_increases_loss is an exact predicate", "[phase]") {
  for (LossKind kind : {LossKind::Exponential, LossKind::Logistic}) {
    for (double eta : {0.5, 2.0, 5.0, 9.0, 12.0}) {
      for (double lam : {0.5, 1.0, 2.0}) {
        for (double f : {-2.0, -1.0, -0.5, -0.01, 0.01, 0.5, 1.0, 2.0}) {
          for (int m : {1, 10, 1000}) {
            ScalarState s{f, lam, 0};
            const ScalarState next = scalar_step_ntk(kind, s, eta, m);
            const double gap = std::abs(next.f) - std::abs(f);
            if (std::abs(gap) < 1e-12 * (1.0 + std::abs(f))) continue;
            const bool grew = gap > 0;
            REQUIRE(next_step_increases_loss(kind, eta, lam, m, f) == grew);
          }
        }
      }
    }
  }
}

TEST_CASE("critical learning rate closed forms", "[critical]") {
  REQUIRE_THAT(critical_lr(LossKind::Exponential, 1.0),
               WithinRel(1.701836256478643090, 1e-14));
  REQUIRE_THAT(critical_lr(LossKind::Logistic, 1.0),
               WithinRel(8.655813654954611395, 1e-14));
  REQUIRE(critical_lr(LossKind::Exponential, -1.0) ==
          critical_lr(LossKind::Exponential, 1.0));

  REQUIRE(critical_lr_limit(LossKind::Exponential) == 2.0);
  REQUIRE(critical_lr_limit(LossKind::Logistic) == 8.0);

  // Small-w0 behavior approaches the limits from the right side.
  REQUIRE_THAT(critical_lr(LossKind::Logistic, 1e-3), WithinAbs(8.0, 1e-4));
  REQUIRE(critical_lr(LossKind::Exponential, 1e-3) < 2.0);
  REQUIRE(critical_lr(LossKind::Logistic, 1e-3) > 8.0);

  REQUIRE_THROWS_AS(critical_lr(LossKind::Exponential, 0.0), error);
  try {
    critical_lr(LossKind::Exponential, 0.0);
  } catch (const error& e) {
    REQUIRE(e.code() == errc::degenerate_input);
  }
}

TEST_CASE("closed form agrees with bisection", "[critical]") {
  for (LossKind kind : {LossKind::Exponential, LossKind::Logistic}) {
    for (double w0 : {0.1, 0.5, 1.0, 2.0, 3.5}) {
      const double closed = critical_lr(kind, w0);
      const double bis = critical_lr_bisect(kind, w0);
      REQUIRE(std::abs(closed - bis) <= 1e-10 * (1.0 + closed));
    }
  }
}

TEST_CASE("inverting the critical rate", "[critical]") {
  const double w_exp = invert_critical_lr(LossKind::Exponential, 1.66843);
  REQUIRE_THAT(w_exp, WithinAbs(1.061667037516358773, 1e-10));
  REQUIRE_THAT(critical_lr(LossKind::Exponential, w_exp), WithinAbs(1.66843, 1e-10));

  const double w_log = invert_critical_lr(LossKind::Logistic, 8.485);
  REQUIRE_THAT(w_log, WithinAbs(0.858127059228142728, 1e-10));
  REQUIRE_THAT(critical_lr(LossKind::Logistic, w_log), WithinAbs(8.485, 1e-10));

  REQUIRE_THROWS_AS(invert_critical_lr(LossKind::Exponential, 2.5), error);
  REQUIRE_THROWS_AS(invert_critical_lr(LossKind::Logistic, 7.0), error);
}

TEST_CASE("oscillation fixed point of the logistic map", "[critical]") {
  const double w85 = oscillation_fixed_point(8.5);
  REQUIRE_THAT(w85, WithinAbs(0.871459671686325823, 1e-12));
  // Defining equation 4w = eta tanh(w/2).
  REQUIRE(std::abs(8.5 * std::tanh(0.5 * w85) - 4.0 * w85) < 1e-10);

  REQUIRE_THAT(oscillation_fixed_point(12.0), WithinAbs(2.575678909920331086, 1e-11));
  REQUIRE(oscillation_fixed_point(9.0) < oscillation_fixed_point(10.0));

  try {
    oscillation_fixed_point(8.0);
    FAIL("expected no_positive_root");
  } catch (const error& e) {
    REQUIRE(e.code() == errc::no_positive_root);
  }
}

TEST_CASE("bisection root finder", "[roots]") {
  auto f = [](double x) { return x * x * x - 2.0; };
  const double r = bisect_root(f, ScalarBracket{0.0, 2.0}, 1e-13);
  REQUIRE_THAT(r, WithinAbs(std::cbrt(2.0), 1e-12));

  // Exact endpoint roots short-circuit.
  auto g = [](double x) { return x; };
  REQUIRE(bisect_root(g, ScalarBracket{0.0, 1.0}, 1e-13) == 0.0);

  try {
    bisect_root([](double) { return 1.0; }, ScalarBracket{0.0, 1.0}, 1e-13);
    FAIL("expected no_sign_change");
  } catch (const error& e) {
    REQUIRE(e.code() == errc::no_sign_change);
  }
  REQUIRE_THROWS_AS(bisect_root(g, ScalarBracket{1.0, 0.0}, 1e-13), error);
}
