#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "errors.hpp"

namespace catapult {

using Vec = std::vector<double>;

// Dense row-major matrix. Small and boring on purpose: everything in this
// project is either tiny (n x n kernels, n <= a few dozen) or streamed
// through matrix-free operators, so no BLAS dependency is warranted.
struct Mat {
  std::size_t rows = 0;
  std::size_t cols = 0;
  Vec data;

  Mat() = default;
  Mat(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

inline double dot(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) fail(errc::dimension_mismatch, "dot: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

inline void axpy(double alpha, const Vec& x, Vec& y) {
  if (x.size() != y.size()) fail(errc::dimension_mismatch, "axpy: size mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline void scale(Vec& x, double alpha) {
  for (auto& v : x) v *= alpha;
}

inline Vec matvec(const Mat& m, const Vec& x) {
  if (m.cols != x.size()) fail(errc::dimension_mismatch, "matvec: size mismatch");
  Vec y(m.rows, 0.0);
  for (std::size_t i = 0; i < m.rows; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < m.cols; ++j) s += m(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

// All eigenvalues of a symmetric matrix by cyclic Jacobi rotations,
// returned in ascending order. Deterministic; adequate for the small dense
// matrices used as oracles and kernel fallbacks (n up to a few hundred).
inline Vec jacobi_eigenvalues(Mat a, int max_sweeps = 100, double tol = 1e-14) {
  if (a.rows != a.cols) fail(errc::dimension_mismatch, "jacobi: matrix not square");
  const std::size_t n = a.rows;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    if (off < tol * tol) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  Vec ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

struct PowerIterationResult {
  double value = 0.0;   // dominant eigenvalue (largest magnitude, signed)
  Vec vector;           // corresponding unit eigenvector
  int iterations = 0;
  bool converged = false;
  double residual = 0.0;  // |lambda_k - lambda_{k-1}| / max(1, |lambda_k|)
};

// Matrix-free power iteration with a deterministic all-ones start vector and
// a relative Rayleigh-quotient stopping rule. The operator must be symmetric;
// the returned value is the eigenvalue of largest magnitude (sign preserved).
inline PowerIterationResult power_iteration(const std::function<Vec(const Vec&)>& apply,
                                            std::size_t dim, double tol = 1e-12,
                                            int max_iter = 10000) {
  PowerIterationResult out;
  Vec v(dim, 1.0);
  scale(v, 1.0 / norm2(v));
  double prev = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    Vec w = apply(v);
    const double rayleigh = dot(v, w);
    const double wn = norm2(w);
    if (wn < 1e-300) {  // operator annihilates the iterate: eigenvalue 0
      out.value = 0.0;
      out.vector = v;
      out.iterations = it;
      out.converged = true;
      return out;
    }
    scale(w, 1.0 / wn);
    out.residual = std::abs(rayleigh - prev) / std::max(1.0, std::abs(rayleigh));
    if (it > 1 && out.residual <= tol) {
      out.value = rayleigh;
      out.vector = w;
      out.iterations = it;
      out.converged = true;
      return out;
    }
    prev = rayleigh;
    v = std::move(w);
    out.iterations = it;
  }
  out.value = prev;
  out.vector = v;
  return out;
}

}  // namespace catapult
