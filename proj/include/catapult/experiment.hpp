#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "csv.hpp"
#include "dataset.hpp"
#include "errors.hpp"
#include "linalg.hpp"
#include "loss.hpp"
#include "rng.hpp"

namespace catapult {

// Deep-linear demo architectures for the image pipeline: 2 weight layers
// without bias, or 3 weight layers with bias. Hidden and output
// contractions carry the wide-network 1/sqrt(width) factor, so at depth 2
// without bias the map coincides with the two-layer analysis network
// f = w2 . (w1 x) / sqrt(m).
struct MlpConfig {
  int depth = 2;  // number of weight layers, 2 or 3
  int width = 500;
  double sigma_w2 = 0.5;  // output-layer weight variance
  bool bias = false;
  double sigma_b2 = 0.01;  // bias variance when bias is enabled
  unsigned long seed = 0;
};

struct Mlp {
  MlpConfig cfg;
  int d = 0;
  std::vector<Mat> w;  // w[0]: width x d, middle: width x width, last: 1 x width
  std::vector<Vec> b;  // parallel to w; empty vectors when bias is off
};

inline Mlp init_mlp(const MlpConfig& cfg, int d) {
  if (cfg.depth != 2 && cfg.depth != 3)
    fail(errc::config_invalid, "mlp: depth must be 2 or 3");
  if (cfg.width < 1) fail(errc::config_invalid, "mlp: width must be >= 1");
  if (d < 1) fail(errc::config_invalid, "mlp: input dimension must be >= 1");
  if (!(cfg.sigma_w2 >= 0) || !(cfg.sigma_b2 >= 0))
    fail(errc::config_invalid, "mlp: variances must be >= 0");

  Mlp net;
  net.cfg = cfg;
  net.d = d;
  GaussianRng rng(cfg.seed);
  const std::size_t m = static_cast<std::size_t>(cfg.width);
  auto layer = [&](std::size_t rows, std::size_t cols, double stddev) {
    Mat w(rows, cols);
    w.data = rng.normal_vector(rows * cols, stddev);
    return w;
  };
  net.w.push_back(layer(m, static_cast<std::size_t>(d), 1.0));
  if (cfg.depth == 3) net.w.push_back(layer(m, m, 1.0));
  net.w.push_back(layer(1, m, std::sqrt(cfg.sigma_w2)));
  const double sb = std::sqrt(cfg.sigma_b2);
  for (int l = 0; l < cfg.depth; ++l) {
    const std::size_t rows = net.w[static_cast<std::size_t>(l)].rows;
    net.b.push_back(cfg.bias ? rng.normal_vector(rows, sb) : Vec(rows, 0.0));
  }
  return net;
}

namespace detail {

struct MlpActivations {
  std::vector<Vec> h;  // h[l] = output of layer l, h.back() has size 1
};

inline double mlp_forward(const Mlp& net, const Vec& x, MlpActivations* acts = nullptr) {
  const double inv = 1.0 / std::sqrt(double(net.cfg.width));
  Vec h = matvec(net.w[0], x);
  for (std::size_t j = 0; j < h.size(); ++j) h[j] += net.b[0][j];
  if (acts) acts->h.push_back(h);
  for (std::size_t l = 1; l < net.w.size(); ++l) {
    Vec next = matvec(net.w[l], h);
    for (std::size_t j = 0; j < next.size(); ++j) next[j] = next[j] * inv + net.b[l][j];
    h = std::move(next);
    if (acts) acts->h.push_back(h);
  }
  return h[0];
}

}  // namespace detail

inline double mlp_loss(const Mlp& net, const Dataset& data, LossKind kind) {
  double acc = 0;
  for (int i = 0; i < data.n(); ++i) {
    const Vec x = dataset_row(data, i);
    acc += loss_margin(kind, data.labels[static_cast<std::size_t>(i)] *
                                 detail::mlp_forward(net, x));
  }
  return acc / double(data.n());
}

inline double mlp_accuracy(const Mlp& net, const Dataset& data) {
  if (data.n() == 0) return std::numeric_limits<double>::quiet_NaN();
  int hits = 0;
  for (int i = 0; i < data.n(); ++i) {
    const Vec x = dataset_row(data, i);
    const double f = detail::mlp_forward(net, x);
    const double pred = f >= 0 ? 1.0 : -1.0;
    if (pred == data.labels[static_cast<std::size_t>(i)]) ++hits;
  }
  return double(hits) / double(data.n());
}

// One full-batch gradient step on the mean margin loss. Backpropagation
// through the linear stack: with c_i = loss'(y_i f_i) y_i / n, the output
// layer receives c_i h_last / sqrt(m) and each earlier delta is pulled back
// through the same scaled contraction that produced its activation.
inline void mlp_gd_step(Mlp& net, const Dataset& data, LossKind kind, double eta) {
  const double inv = 1.0 / std::sqrt(double(net.cfg.width));
  const std::size_t layers = net.w.size();
  std::vector<Mat> gw;
  std::vector<Vec> gb;
  for (std::size_t l = 0; l < layers; ++l) {
    gw.emplace_back(net.w[l].rows, net.w[l].cols);
    gb.emplace_back(net.w[l].rows, 0.0);
  }

  for (int i = 0; i < data.n(); ++i) {
    const Vec x = dataset_row(data, i);
    detail::MlpActivations acts;
    const double f = detail::mlp_forward(net, x, &acts);
    const double y = data.labels[static_cast<std::size_t>(i)];
    const double c = loss_grad_margin(kind, y * f) * y / double(data.n());

    // delta starts at the output scalar and walks backward.
    Vec delta(1, c);
    for (std::size_t l = layers; l-- > 0;) {
      const Vec& input = l == 0 ? x : acts.h[l - 1];
      const double s = l == 0 ? 1.0 : inv;  // first layer is unscaled
      Mat& g = gw[l];
      for (std::size_t r = 0; r < g.rows; ++r) {
        const double dr = delta[r] * s;
        gb[l][r] += delta[r];  // bias is added after the 1/sqrt(m) scaling
        for (std::size_t k = 0; k < g.cols; ++k) g(r, k) += dr * input[k];
      }
      if (l == 0) break;
      Vec prev(net.w[l].cols, 0.0);
      for (std::size_t r = 0; r < net.w[l].rows; ++r)
        for (std::size_t k = 0; k < net.w[l].cols; ++k)
          prev[k] += net.w[l](r, k) * delta[r] * s;
      delta = std::move(prev);
    }
  }

  for (std::size_t l = 0; l < layers; ++l) {
    for (std::size_t k = 0; k < gw[l].data.size(); ++k)
      net.w[l].data[k] -= eta * gw[l].data[k];
    if (net.cfg.bias)
      for (std::size_t r = 0; r < gb[l].size(); ++r) net.b[l][r] -= eta * gb[l][r];
  }
}

struct DemoRow {
  double eta = 0;
  long steps_run = 0;
  double final_loss = std::numeric_limits<double>::quiet_NaN();
  double train_accuracy = std::numeric_limits<double>::quiet_NaN();
  double test_accuracy = std::numeric_limits<double>::quiet_NaN();
};

// Trains one learning rate for a fixed number of steps, optionally followed
// by an annealing phase of extra steps at the low rate 0.01, and reports
// train/test accuracy. Stops early if the loss leaves the finite range.
inline DemoRow run_demo_once(const Dataset& train, const Dataset& test, LossKind kind,
                             const MlpConfig& cfg, double eta, long steps, bool anneal,
                             long anneal_steps = 500, double anneal_eta = 0.01) {
  if (steps < 0) fail(errc::config_invalid, "demo: steps must be >= 0");
  Mlp net = init_mlp(cfg, train.d());
  DemoRow row;
  row.eta = eta;
  long done = 0;
  auto phase = [&](double rate, long count) {
    for (long t = 0; t < count; ++t) {
      if (!std::isfinite(mlp_loss(net, train, kind))) return;
      mlp_gd_step(net, train, kind, rate);
      ++done;
    }
  };
  phase(eta, steps);
  if (anneal) phase(anneal_eta, anneal_steps);
  row.steps_run = done;
  row.final_loss = mlp_loss(net, train, kind);
  row.train_accuracy = mlp_accuracy(net, train);
  row.test_accuracy = mlp_accuracy(net, test);
  return row;
}

inline std::string demo_csv(const std::vector<DemoRow>& rows) {
  std::string out = "eta,steps_run,final_loss,train_accuracy,test_accuracy\n";
  for (const DemoRow& r : rows) {
    out += format_double(r.eta);
    out += ',';
    out += std::to_string(r.steps_run);
    out += ',';
    out += format_double(r.final_loss);
    out += ',';
    out += format_double(r.train_accuracy);
    out += ',';
    out += format_double(r.test_accuracy);
    out += '\n';
  }
  return out;
}

}  // namespace catapult
