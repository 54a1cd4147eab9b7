#pragma once

#include <cstdlib>
#include <ctime>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "cifar10.hpp"
#include "dataset.hpp"
#include "errors.hpp"
#include "loss.hpp"

namespace catapult {

// Flat parameter record shared by every command. A config file carries the
// same keys as the command-line flags; flags override file values. Exactly
// one dataset selector (example, synthetic, or cifar path) must be set for
// commands that consume data.
struct RunConfig {
  std::string command = "simulate";

  std::string example;    // ex1..ex4
  std::string synthetic;  // degenerate | separable | nonseparable
  int synth_n = 16;
  int synth_d = 2;
  unsigned long synth_seed = 1;
  std::string cifar_path;
  int cifar_class_a = 1;  // automobile -> +1
  int cifar_class_b = 5;  // dog -> -1
  int cifar_max_per_class = 1024;

  std::string loss = "exp";  // exp | log
  double eta = 0.5;
  std::vector<double> etas;  // explicit grid for sweep / hessian-check
  double eta_min = 0;        // or a uniform grid [eta_min, eta_max] with
  double eta_max = 0;        // eta_points entries
  int eta_points = 0;
  long steps = 2000;
  std::string stop = "fixed";  // fixed | physical | gradtol
  double stop_value = 0;       // physical duration or gradient tolerance

  std::optional<double> w0;  // run the scalar predictor instead of a network
  int m = 1000;
  double sigma_w2 = 0.5;
  unsigned long seed = 0;

  double tol = 1e-3;  // boundary bisection width

  int n_train = 256;  // cifar-demo subset sizes (total, split across classes)
  int n_test = 128;
  int depth = 2;       // 2 = no-bias two-layer, 3 = three-layer with bias
  int demo_width = 500;
  bool anneal = false;

  std::string out_dir;        // empty = $CATAPULT_OUT_DIR or "."
  std::string format = "csv";  // csv | svg | table
};

inline nlohmann::ordered_json config_to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["command"] = c.command;
  j["example"] = c.example;
  j["synthetic"] = c.synthetic;
  j["synth_n"] = c.synth_n;
  j["synth_d"] = c.synth_d;
  j["synth_seed"] = c.synth_seed;
  j["cifar_path"] = c.cifar_path;
  j["cifar_class_a"] = c.cifar_class_a;
  j["cifar_class_b"] = c.cifar_class_b;
  j["cifar_max_per_class"] = c.cifar_max_per_class;
  j["loss"] = c.loss;
  j["eta"] = c.eta;
  j["etas"] = c.etas;
  j["eta_min"] = c.eta_min;
  j["eta_max"] = c.eta_max;
  j["eta_points"] = c.eta_points;
  j["steps"] = c.steps;
  j["stop"] = c.stop;
  j["stop_value"] = c.stop_value;
  if (c.w0)
    j["w0"] = *c.w0;
  else
    j["w0"] = nullptr;
  j["m"] = c.m;
  j["sigma_w2"] = c.sigma_w2;
  j["seed"] = c.seed;
  j["tol"] = c.tol;
  j["n_train"] = c.n_train;
  j["n_test"] = c.n_test;
  j["depth"] = c.depth;
  j["demo_width"] = c.demo_width;
  j["anneal"] = c.anneal;
  j["out_dir"] = c.out_dir;
  j["format"] = c.format;
  return j;
}

inline RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig c;
  if (!j.is_object()) fail(errc::config_invalid, "config: top level must be an object");
  c.command = j.value("command", c.command);
  c.example = j.value("example", c.example);
  c.synthetic = j.value("synthetic", c.synthetic);
  c.synth_n = j.value("synth_n", c.synth_n);
  c.synth_d = j.value("synth_d", c.synth_d);
  c.synth_seed = j.value("synth_seed", c.synth_seed);
  c.cifar_path = j.value("cifar_path", c.cifar_path);
  c.cifar_class_a = j.value("cifar_class_a", c.cifar_class_a);
  c.cifar_class_b = j.value("cifar_class_b", c.cifar_class_b);
  c.cifar_max_per_class = j.value("cifar_max_per_class", c.cifar_max_per_class);
  c.loss = j.value("loss", c.loss);
  c.eta = j.value("eta", c.eta);
  c.etas = j.value("etas", c.etas);
  c.eta_min = j.value("eta_min", c.eta_min);
  c.eta_max = j.value("eta_max", c.eta_max);
  c.eta_points = j.value("eta_points", c.eta_points);
  c.steps = j.value("steps", c.steps);
  c.stop = j.value("stop", c.stop);
  c.stop_value = j.value("stop_value", c.stop_value);
  if (j.contains("w0") && !j["w0"].is_null()) c.w0 = j["w0"].get<double>();
  c.m = j.value("m", c.m);
  c.sigma_w2 = j.value("sigma_w2", c.sigma_w2);
  c.seed = j.value("seed", c.seed);
  c.tol = j.value("tol", c.tol);
  c.n_train = j.value("n_train", c.n_train);
  c.n_test = j.value("n_test", c.n_test);
  c.depth = j.value("depth", c.depth);
  c.demo_width = j.value("demo_width", c.demo_width);
  c.anneal = j.value("anneal", c.anneal);
  c.out_dir = j.value("out_dir", c.out_dir);
  c.format = j.value("format", c.format);
  return c;
}

inline std::string serialize_config(const RunConfig& c) { return config_to_json(c).dump(2) + "\n"; }

inline RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::io_failure, "config: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(errc::config_invalid, std::string("config: parse error in ") + path + ": " + e.what());
  }
  return config_from_json(j);
}

inline LossKind loss_from_string(const std::string& s) {
  if (s == "exp" || s == "exponential") return LossKind::Exponential;
  if (s == "log" || s == "logistic") return LossKind::Logistic;
  fail(errc::config_invalid, "loss must be exp or log, got '" + s + "'");
}

inline const char* loss_to_string(LossKind kind) {
  return kind == LossKind::Exponential ? "exp" : "log";
}

inline std::string default_out_dir() {
  const char* env = std::getenv("CATAPULT_OUT_DIR");
  return (env && *env) ? env : ".";
}

inline std::string resolve_out_dir(const RunConfig& c) {
  return c.out_dir.empty() ? default_out_dir() : c.out_dir;
}

// Resolves the single dataset selector. Synthetic names accept a few
// obvious aliases; the CIFAR path loads the automobile/dog pairing unless
// overridden.
inline Dataset dataset_from_config(const RunConfig& c) {
  const int chosen =
      int(!c.example.empty()) + int(!c.synthetic.empty()) + int(!c.cifar_path.empty());
  if (chosen != 1)
    fail(errc::config_invalid,
         "config: exactly one of example / synthetic / cifar_path must be set");
  if (!c.example.empty()) return example_dataset(parse_example_id(c.example));
  if (!c.synthetic.empty()) {
    SeparationCondition cond;
    if (c.synthetic == "degenerate")
      cond = SeparationCondition::Degenerate;
    else if (c.synthetic == "separable" || c.synthetic == "linearly-separable")
      cond = SeparationCondition::LinearlySeparable;
    else if (c.synthetic == "nonseparable" || c.synthetic == "non-separable")
      cond = SeparationCondition::NonSeparable;
    else
      fail(errc::config_invalid,
           "config: synthetic must be degenerate, separable, or nonseparable");
    return synthetic_two_class(c.synth_n, c.synth_d, cond, c.synth_seed);
  }
  return load_cifar10_pair(c.cifar_path, c.cifar_class_a, c.cifar_class_b,
                           c.cifar_max_per_class);
}

// Learning-rate grid for sweep-style commands: an explicit list wins,
// otherwise a uniform grid over [eta_min, eta_max].
inline std::vector<double> eta_grid_from_config(const RunConfig& c) {
  if (!c.etas.empty()) return c.etas;
  if (c.eta_points >= 2 && c.eta_max > c.eta_min && c.eta_min > 0) {
    std::vector<double> grid(static_cast<std::size_t>(c.eta_points));
    for (int i = 0; i < c.eta_points; ++i)
      grid[static_cast<std::size_t>(i)] =
          c.eta_min + (c.eta_max - c.eta_min) * double(i) / double(c.eta_points - 1);
    return grid;
  }
  fail(errc::config_invalid,
       "config: provide --etas or --eta-min/--eta-max/--eta-points for a grid");
}

inline std::string iso_timestamp_utc() {
  std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
#if defined(_WIN32)
  gmtime_s(&tm_utc, &now);
#else
  gmtime_r(&now, &tm_utc);
#endif
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(errc::io_failure, "cannot open " + path + " for writing");
  out << content;
  if (!out) fail(errc::io_failure, "write failed for " + path);
}

}  // namespace catapult
