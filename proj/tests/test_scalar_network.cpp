#include <cmath>
#include <cstdint>

#include "catch_amalgamated.hpp"

#include "catapult/catapult.hpp"

using namespace catapult;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("init_network draws reproducible gaussian layers", "[network]") {
  const NetworkState a = init_network(200, 50, 0.5, 42);
  const NetworkState b = init_network(200, 50, 0.5, 42);
  REQUIRE(a.w1.data == b.w1.data);
  REQUIRE(a.w2 == b.w2);

  const NetworkState c = init_network(200, 50, 0.5, 43);
  REQUIRE(a.w1.data != c.w1.data);

  // 10200 i.i.d. N(0, 0.5) draws: sample mean near 0, variance near 0.5.
  double sum = 0, sum2 = 0;
  std::size_t cnt = 0;
  for (double v : a.w1.data) sum += v, sum2 += v * v, ++cnt;
  for (double v : a.w2) sum += v, sum2 += v * v, ++cnt;
  const double mean = sum / static_cast<double>(cnt);
  const double var = sum2 / static_cast<double>(cnt) - mean * mean;
  REQUIRE(std::abs(mean) < 0.03);
  REQUIRE(std::abs(var - 0.5) < 0.05);

  REQUIRE_THROWS_AS(init_network(0, 3, 0.5, 1), error);
  REQUIRE_THROWS_AS(init_network(4, 0, 0.5, 1), error);
  REQUIRE_THROWS_AS(init_network(4, 3, -0.5, 1), error);
}

TEST_CASE("forward is linear in the input", "[network]") {
  const NetworkState s = init_network(16, 3, 1.0, 5);
  const Vec x{0.3, -1.2, 0.7};
  const Vec y{1.1, 0.4, -0.6};
  Vec z(3);
  for (int k = 0; k < 3; ++k) z[k] = 2.0 * x[k] - 0.5 * y[k];
  const double lhs = forward(s, z);
  const double rhs = 2.0 * forward(s, x) - 0.5 * forward(s, y);
  REQUIRE_THAT(lhs, WithinAbs(rhs, 1e-12));

  REQUIRE_THROWS_AS(forward(s, Vec{1.0, 2.0}), error);
}

TEST_CASE("reduced two-variable step", "[scalar]") {
  // Exponential map at f = lam = 1/2, eta = 1, m = 5: with tf = tanh(1/2),
  //   f'   = 1/2 - tf/2 + tf^2/10,
  //   lam' = 1/2 - 2 tf/5 + tf^2/10.
  const ScalarState s0{0.5, 0.5, 0};
  const ScalarState s1 = scalar_step(LossKind::Exponential, s0, 1.0, 5);
  REQUIRE_THAT(s1.f, WithinRel(0.2666063789938885081, 1e-14));
  REQUIRE_THAT(s1.lam, WithinRel(0.3187159095432632443, 1e-14));
  REQUIRE(s1.step == 1);

  REQUIRE_THROWS_AS(scalar_step(LossKind::Exponential, s0, 0.0, 5), error);
  REQUIRE_THROWS_AS(scalar_step(LossKind::Exponential, s0, 1.0, 0), error);
}

TEST_CASE("one-step lambda change identity", "[scalar]") {
  // lam' - lam = (eta/m) tf (eta lam tf - 4 f) for either loss.
  for (LossKind kind : {LossKind::Exponential, LossKind::Logistic}) {
    for (double f : {-2.0, -0.3, 0.01, 0.8, 3.5}) {
      for (double lam : {0.2, 1.0, 4.0}) {
        for (double eta : {0.3, 1.7}) {
          const int m = 7;
          const ScalarState next = scalar_step(kind, ScalarState{f, lam, 0}, eta, m);
          const double tf = tilde_f(kind, f);
          const double predicted = (eta / m) * tf * (eta * lam * tf - 4.0 * f);
          const double got = next.lam - lam;
          REQUIRE(std::abs(got - predicted) <= 1e-13 * (1.0 + std::abs(predicted)));
        }
      }
    }
  }
}

TEST_CASE("NTK normalization wrapper is an exact change of variables", "[scalar]") {
  const ScalarState s0{0.8, 1.6, 3};

  // Exponential: identical map.
  const ScalarState e1 = scalar_step_ntk(LossKind::Exponential, s0, 0.9, 12);
  const ScalarState e2 = scalar_step(LossKind::Exponential, s0, 0.9, 12);
  REQUIRE(e1.f == e2.f);
  REQUIRE(e1.lam == e2.lam);

  // Logistic: halve lam, quadruple m, then double lam back. The scale
  // factors are powers of two so the equality is bitwise.
  const ScalarState l1 = scalar_step_ntk(LossKind::Logistic, s0, 3.0, 12);
  ScalarState manual{s0.f, 0.5 * s0.lam, s0.step};
  manual = scalar_step(LossKind::Logistic, manual, 3.0, 48);
  REQUIRE(l1.f == manual.f);
  REQUIRE(l1.lam == 2.0 * manual.lam);
}

TEST_CASE("reduced map reproduces the three rate regimes", "[scalar]") {
  const ScalarState s0{0.3, 1.0, 0};

  // Small rate: monotone decrease onto the floor, lambda barely moves.
  const Trajectory lazy = run_scalar(LossKind::Exponential, s0, 1.0, 10, 4000);
  REQUIRE(lazy.terminal == Terminal::Converged);
  for (std::size_t i = 1; i < lazy.records.size(); ++i)
    REQUIRE(lazy.records[i].loss <= lazy.records[i - 1].loss + 1e-12);
  REQUIRE_THAT(lazy.last_finite().lambda, WithinRel(0.9727299102560014, 1e-9));

  // Catapult window: the loss spikes first, then the run converges with a
  // visibly smaller lambda.
  const Trajectory cat = run_scalar(LossKind::Exponential, s0, 2.3, 10, 4000);
  REQUIRE(cat.terminal == Terminal::Converged);
  double peak = 0;
  for (const auto& r : cat.records) peak = std::max(peak, r.loss);
  REQUIRE(peak > cat.records.front().loss + 1e-3);
  REQUIRE_THAT(cat.last_finite().lambda, WithinRel(0.5842041565, 1e-6));
  REQUIRE(cat.last_finite().lambda < 0.9 * cat.records.front().lambda);

  // Too large: blow-up.
  const Trajectory big = run_scalar(LossKind::Exponential, s0, 4.0, 10, 4000);
  REQUIRE(big.terminal == Terminal::Diverged);

  // Logistic catapult with the same shape of evidence.
  const Trajectory lcat = run_scalar(LossKind::Logistic, ScalarState{0.6, 2.0, 0}, 4.5, 10, 6000);
  REQUIRE(lcat.terminal == Terminal::Converged);
  peak = 0;
  for (const auto& r : lcat.records) peak = std::max(peak, r.loss);
  REQUIRE(peak > lcat.records.front().loss + 1e-3);
  REQUIRE_THAT(lcat.last_finite().lambda, WithinRel(1.4752818019, 1e-6));
}

TEST_CASE("full gradient step matches the flat gradient", "[network]") {
  for (auto id : {ExampleId::Ex3, ExampleId::Ex4}) {
    const Dataset data = example_dataset(id);
    for (LossKind kind : {LossKind::Exponential, LossKind::Logistic}) {
      const NetworkState s = init_network(3, data.d(), 0.7, 11);
      const Vec g = network_gradient_flat(data, kind, s);
      const double eta = 0.4;
      const NetworkState next = gd_step_network(data, kind, s, eta);
      const int m = s.m, d = data.d();
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < d; ++j)
          REQUIRE_THAT(next.w1(i, j), WithinAbs(s.w1(i, j) - eta * g[i * d + j], 1e-14));
      for (int i = 0; i < m; ++i)
        REQUIRE_THAT(next.w2[i], WithinAbs(s.w2[i] - eta * g[m * d + i], 1e-14));
      REQUIRE(next.step == s.step + 1);
    }
  }
}

TEST_CASE("NTK matrix closed form and top eigenvalue", "[network]") {
  const Dataset ex4 = example_dataset(ExampleId::Ex4);
  const NetworkState s = init_network(3, ex4.d(), 0.9, 21);

  // The kernel of the mean loss over n samples carries a 1/(m n) scale:
  // K(x, x') = (|w2|^2 (x . x') + (w1 x) . (w1 x')) / (m n).
  const Mat K = ntk_matrix(s, ex4);
  REQUIRE(K.rows == static_cast<std::size_t>(ex4.n()));
  REQUIRE(K.cols == K.rows);
  double w2sq = dot(s.w2, s.w2);
  for (int a = 0; a < ex4.n(); ++a) {
    const Vec xa = dataset_row(ex4, a);
    const Vec ha = matvec(s.w1, xa);
    for (int b = 0; b < ex4.n(); ++b) {
      const Vec xb = dataset_row(ex4, b);
      const Vec hb = matvec(s.w1, xb);
      const double expect = (w2sq * dot(xa, xb) + dot(ha, hb)) / (s.m * ex4.n());
      REQUIRE_THAT(K(a, b), WithinAbs(expect, 1e-12));
    }
  }

  // Top eigenvalue agrees with a dense Jacobi diagonalization.
  Mat Kc = K;
  const Vec eigs = jacobi_eigenvalues(Kc);
  REQUIRE_THAT(ntk_top_eigenvalue(s, ex4), WithinAbs(eigs.back(), 1e-9));

  // One point: the eigenvalue is the single diagonal entry.
  Dataset one;
  one.features = Mat(1, 2);
  one.features(0, 0) = 0.6;
  one.features(0, 1) = -0.8;
  one.labels = {1.0};
  one.name = "one-point";
  const Mat K1 = ntk_matrix(s, one);
  REQUIRE(ntk_top_eigenvalue(s, one) == K1(0, 0));

  // Degenerate pair: 2x2 case against Jacobi as well.
  const Dataset ex1 = example_dataset(ExampleId::Ex1);
  const NetworkState s1 = init_network(5, 1, 0.5, 8);
  Mat K2 = ntk_matrix(s1, ex1);
  const Vec eigs2 = jacobi_eigenvalues(K2);
  REQUIRE_THAT(ntk_top_eigenvalue(s1, ex1), WithinAbs(eigs2.back(), 1e-9));
}

TEST_CASE("wide random initialization concentrates lambda near 2 sigma^2", "[network]") {
  const Dataset ex3 = example_dataset(ExampleId::Ex3);
  const NetworkState s = init_network(2000, ex3.d(), 0.5, 7);
  const double lam0 = ntk_top_eigenvalue(s, ex3);
  REQUIRE(std::abs(lam0 - 1.0) < 0.1);

  // A moderate rate lands on the degenerate floor.
  const NetworkRun run = run_network(ex3, LossKind::Exponential, s, 1.0, 3000);
  REQUIRE(run.trajectory.terminal == Terminal::Converged);
  REQUIRE(std::abs(run.trajectory.last_finite().loss - 1.0) <= 1e-6);
}

TEST_CASE("full training tracks the reduced map on degenerate pairs", "[network]") {
  for (auto id : {ExampleId::Ex1, ExampleId::Ex3}) {
    const Dataset data = example_dataset(id);
    for (std::uint64_t seed : {1ULL, 2ULL}) {
      const NetworkState s_exp = init_network(100, data.d(), 0.5, seed);
      REQUIRE(scalar_full_equivalence(data, LossKind::Exponential, s_exp, 0.5, 100) <= 1e-10);
      const NetworkState s_log = init_network(100, data.d(), 0.5, seed + 50);
      REQUIRE(scalar_full_equivalence(data, LossKind::Logistic, s_log, 2.0, 100) <= 1e-10);
    }
  }
}

TEST_CASE("equivalence preconditions", "[network]") {
  Dataset scaled;
  scaled.features = Mat(2, 1);
  scaled.features(0, 0) = 2.0;
  scaled.features(1, 0) = 2.0;
  scaled.labels = {1.0, -1.0};
  scaled.name = "scaled-pair";
  const NetworkState s = init_network(10, 1, 0.5, 1);
  try {
    scalar_full_equivalence(scaled, LossKind::Exponential, s, 0.5, 10);
    FAIL("expected data_invalid");
  } catch (const error& e) {
    REQUIRE(e.code() == errc::data_invalid);
  }

  const Dataset ex2 = example_dataset(ExampleId::Ex2);
  REQUIRE_THROWS_AS(
      scalar_full_equivalence(ex2, LossKind::Exponential, init_network(10, 1, 0.5, 1), 0.5, 10),
      error);
}

TEST_CASE("separable data trains the loss toward zero", "[network]") {
  const Dataset sep = synthetic_two_class(8, 3, SeparationCondition::LinearlySeparable, 4);
  const NetworkState s = init_network(64, 3, 0.5, 2);
  const NetworkRun run = run_network(sep, LossKind::Exponential, s, 0.3, 400);
  const double first = run.trajectory.records.front().loss;
  const double last = run.trajectory.last_finite().loss;
  REQUIRE(last < 0.5 * first);
  REQUIRE(std::isfinite(last));
}
