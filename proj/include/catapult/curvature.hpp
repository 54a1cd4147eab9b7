#pragma once

#include <cmath>
#include <vector>

#include "dataset.hpp"
#include "errors.hpp"
#include "linalg.hpp"
#include "loss.hpp"
#include "network.hpp"

namespace catapult {

// Curvature of the training loss with respect to all parameters, flattened
// as w1 row-major followed by w2 (dimension m*d + m).

inline Vec network_gradient_flat(const Dataset& data, LossKind kind,
                                 const NetworkState& s) {
  const auto g = detail::network_gradient(data, kind, s);
  const int d = s.w1.cols;
  Vec out(static_cast<std::size_t>(s.m) * d + s.m);
  for (int j = 0; j < s.m; ++j)
    for (int k = 0; k < d; ++k) out[static_cast<std::size_t>(j) * d + k] = s.w2[j] * g.v[k];
  for (int j = 0; j < s.m; ++j) out[static_cast<std::size_t>(s.m) * d + j] = g.b[j];
  return out;
}

// Analytic Hessian-vector product. With u_i = y_i f(x_i), the Hessian of
// L = (1/n) sum_i loss(u_i) splits per sample into a Gauss-Newton part
// loss''(u_i) grad f_i grad f_i^T (y_i^2 = 1) and a curvature part
// loss'(u_i) y_i Hess f_i, where f is bilinear in (w1, w2) so Hess f_i only
// couples the layers. Writing a_i = w1 x_i and J_i(v) = (w2.(V1 x_i) +
// v2.a_i)/sqrt(m) (the directional derivative of f_i along v = (V1, v2)):
//
//   (Hv)_w1 = outer(w2, p) + outer(v2, q),     p = sum_i alpha_i x_i,
//   (Hv)_w2 = sum_i alpha_i a_i + V1 q,        q = sum_i beta_i x_i,
//
// with alpha_i = loss''(u_i) J_i(v) / (n sqrt(m)) and
// beta_i = loss'(u_i) y_i / (n sqrt(m)).
inline Vec hessian_vector_product(const Dataset& data, LossKind kind,
                                  const NetworkState& s, const Vec& v) {
  const int m = s.m;
  const int d = s.w1.cols;
  const int n = data.n();
  if (static_cast<int>(v.size()) != m * d + m)
    fail(errc::dimension_mismatch, "hessian_vector_product: bad vector length");
  const double root_m = std::sqrt(static_cast<double>(m));

  // Views into the flat input vector.
  auto v1 = [&](int j, int k) { return v[static_cast<std::size_t>(j) * d + k]; };
  auto v2 = [&](int j) { return v[static_cast<std::size_t>(m) * d + j]; };

  Vec p(d, 0.0), q(d, 0.0);
  Vec hw2(m, 0.0);
  for (int i = 0; i < n; ++i) {
    const Vec x = dataset_row(data, i);
    Vec a = matvec(s.w1, x);
    Vec v1x(m, 0.0);
    for (int j = 0; j < m; ++j) {
      double acc = 0;
      for (int k = 0; k < d; ++k) acc += v1(j, k) * x[k];
      v1x[j] = acc;
    }
    const double f = dot(s.w2, a) / root_m;
    const double u = data.labels[i] * f;
    double jv = (dot(s.w2, v1x)) / root_m;
    for (int j = 0; j < m; ++j) jv += v2(j) * a[j] / root_m;
    const double alpha = loss_hess_margin(kind, u) * jv / (n * root_m);
    const double beta = loss_grad_margin(kind, u) * data.labels[i] / (n * root_m);
    for (int k = 0; k < d; ++k) {
      p[k] += alpha * x[k];
      q[k] += beta * x[k];
    }
    axpy(alpha, a, hw2);
  }

  Vec out(v.size(), 0.0);
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < d; ++k)
      out[static_cast<std::size_t>(j) * d + k] = s.w2[j] * p[k] + v2(j) * q[k];
  for (int j = 0; j < m; ++j) {
    double acc = hw2[j];
    for (int k = 0; k < d; ++k) acc += v1(j, k) * q[k];
    out[static_cast<std::size_t>(m) * d + j] = acc;
  }
  return out;
}

// Largest-magnitude Hessian eigenvalue by deterministic power iteration on
// the analytic product (all-ones start, relative Rayleigh tolerance 1e-10).
inline double hessian_top_eigenvalue(const Dataset& data, LossKind kind,
                                     const NetworkState& s) {
  const std::size_t dim = static_cast<std::size_t>(s.m) * s.w1.cols + s.m;
  if (dim > 1000000) fail(errc::config_invalid, "hessian_top_eigenvalue: too many parameters");
  auto apply = [&](const Vec& v) { return hessian_vector_product(data, kind, s, v); };
  const auto r = power_iteration(apply, dim, 1e-10, 10000);
  if (!r.converged)
    fail(errc::no_convergence,
         "hessian_top_eigenvalue: power iteration residual " + format_double(r.residual));
  return r.value;
}

struct CurvatureSample {
  double top_hessian = 0;
  double top_ntk = 0;
  double ratio = std::numeric_limits<double>::quiet_NaN();
  long at_step = 0;
  bool converged = false;
};

// At a global minimum of the degenerate problem (f = 0 on the shared
// feature) both samples sit at margin 0 with identical gradients, so the
// cross-layer Hessian part cancels between the opposite labels and only the
// Gauss-Newton part loss''(0) grad f grad f^T survives. Its top eigenvalue
// is loss''(0) ||grad f||^2 = loss''(0) (||a||^2 + ||w2||^2)/m, which equals
// loss''(0) times the top NTK eigenvalue: ratio exactly 1 for the
// exponential loss (loss'' = exp at 0) and 1/4 for the logistic. Away from
// the minimum the relation degrades by O(f); the sample is flagged
// unconverged when |f| > 1e-6 instead of failing.
inline CurvatureSample check_hessian_ntk_relation(const Dataset& data, LossKind kind,
                                                  const NetworkState& s) {
  validate_dataset(data);
  if (!has_degenerate_pair(data))
    fail(errc::data_invalid, "check_hessian_ntk_relation: data must be degenerate");
  CurvatureSample sample;
  sample.at_step = s.step;
  sample.converged = std::abs(forward(s, dataset_row(data, 0))) <= 1e-6;
  sample.top_hessian = hessian_top_eigenvalue(data, kind, s);
  sample.top_ntk = ntk_top_eigenvalue(s, data);
  if (sample.top_ntk > 1e-15) sample.ratio = sample.top_hessian / sample.top_ntk;
  return sample;
}

}  // namespace catapult
