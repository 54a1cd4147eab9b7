#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "catapult/catapult.hpp"

namespace fs = std::filesystem;
using namespace catapult;

namespace {

// Exit taxonomy: 0 ok, 2 config/usage, 3 I/O, 4 data.
int exit_code_for(const error& e) {
  switch (e.code()) {
    case errc::io_failure: return 3;
    case errc::data_invalid:
    case errc::generation_failed: return 4;
    default: return 2;
  }
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
  const std::string dir = resolve_out_dir(cfg);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(errc::io_failure, "cannot create output directory " + dir);
  return dir + "/" + name;
}

long steps_budget(const RunConfig& cfg, double eta) {
  if (cfg.steps < 1) fail(errc::config_invalid, "steps must be >= 1");
  if (cfg.stop == "fixed" || cfg.stop == "gradtol") return cfg.steps;
  if (cfg.stop == "physical") {
    const double c = cfg.stop_value > 0 ? cfg.stop_value : 50.0;
    const double t = std::ceil(c / eta);
    return static_cast<long>(std::clamp(t, 1.0, 10000000.0));
  }
  fail(errc::config_invalid, "stop must be fixed, physical, or gradtol");
}

StopRule stop_rule_from(const RunConfig& cfg) {
  if (cfg.stop == "fixed") return StopRule::fixed_steps(cfg.steps);
  if (cfg.stop == "physical")
    return StopRule::physical_time(cfg.stop_value > 0 ? cfg.stop_value : 50.0);
  if (cfg.stop == "gradtol")
    return StopRule::grad_tol(cfg.stop_value > 0 ? cfg.stop_value : 1e-6);
  fail(errc::config_invalid, "stop must be fixed, physical, or gradtol");
}

SweepConfig sweep_config_from(const RunConfig& cfg, Dataset data, LossKind kind) {
  SweepConfig sc;
  sc.dataset = std::move(data);
  sc.kind = kind;
  sc.m = cfg.m;
  sc.d = sc.dataset.d();
  sc.sigma_w2 = cfg.sigma_w2;
  sc.seed = cfg.seed;
  sc.eta_grid = eta_grid_from_config(cfg);
  sc.max_steps = cfg.steps;
  sc.stop_rule = stop_rule_from(cfg);
  sc.predictor_w0 = cfg.w0;
  return sc;
}

int cmd_simulate(const RunConfig& cfg) {
  const Dataset data = dataset_from_config(cfg);
  const LossKind kind = loss_from_string(cfg.loss);
  if (!(cfg.eta > 0)) fail(errc::config_invalid, "simulate: eta must be positive");
  const long steps = steps_budget(cfg, cfg.eta);

  Trajectory traj;
  if (cfg.w0) {
    const double tol = (cfg.stop == "gradtol" && cfg.stop_value > 0) ? cfg.stop_value : 1e-9;
    Vec w0(static_cast<std::size_t>(data.d()), *cfg.w0);
    traj = run_predictor(data, kind, w0, cfg.eta, steps, tol);
    write_predictor_csv(traj, out_path(cfg, "trajectory.csv"));
  } else {
    const double gtol = (cfg.stop == "gradtol" && cfg.stop_value > 0) ? cfg.stop_value : 1e-6;
    NetworkState s0 = init_network(cfg.m, data.d(), cfg.sigma_w2, cfg.seed);
    NetworkRun run = run_network(data, kind, std::move(s0), cfg.eta, steps, gtol);
    traj = std::move(run.trajectory);
    write_network_csv(traj, out_path(cfg, "trajectory.csv"));
  }

  nlohmann::ordered_json meta;
  meta["kind"] = loss_to_string(kind);
  meta["m"] = cfg.m;
  meta["d"] = data.d();
  meta["sigma_w2"] = cfg.sigma_w2;
  meta["eta"] = cfg.eta;
  meta["seed"] = cfg.seed;
  meta["dataset_name"] = data.name;
  meta["terminal"] = to_string(traj.terminal);
  meta["mode"] = cfg.w0 ? "predictor" : "network";
  if (cfg.w0) meta["w0"] = *cfg.w0;
  meta["timestamp"] = iso_timestamp_utc();
  write_text_file(out_path(cfg, "metadata.json"), meta.dump(2) + "\n");

  std::cout << "terminal=" << to_string(traj.terminal) << " steps=" << traj.back().step
            << " final_loss=" << format_double(traj.last_finite().loss) << "\n";
  return 0;
}

int cmd_critical_lr(const RunConfig& cfg) {
  RunConfig local = cfg;
  if (local.example.empty() && local.synthetic.empty() && local.cifar_path.empty())
    local.example = "ex1";  // the canonical degenerate pair
  const Dataset data = dataset_from_config(local);
  const SeparationCertificate cert = classify_separation(data);
  if (cert.condition != SeparationCondition::Degenerate)
    fail(errc::config_invalid,
         "critical-lr requires degenerate data (identical features, opposite labels); got " +
             std::string(to_string(cert.condition)));
  if (data.d() != 1)
    fail(errc::config_invalid, "critical-lr requires a d=1 dataset");
  if (!cfg.w0) fail(errc::config_invalid, "critical-lr requires --w0");

  const LossKind kind = loss_from_string(cfg.loss);
  const double w0 = *cfg.w0;
  const double closed = critical_lr(kind, w0);
  const double bisected = critical_lr_bisect(kind, w0);
  const double residual = std::abs(closed - bisected);

  nlohmann::ordered_json j;
  j["kind"] = loss_to_string(kind);
  j["w0"] = w0;
  j["eta_critical"] = closed;
  j["eta_critical_bisected"] = bisected;
  j["bisection_residual"] = residual;
  j["small_w0_limit"] = critical_lr_limit(kind);
  std::cout << "eta_critical = " << format_double(closed) << " (bisection residual "
            << format_double(residual) << ")\n";

  if (kind == LossKind::Logistic && !cfg.etas.empty()) {
    // Above the threshold 8 the degenerate map has a period-2 amplitude w*
    // solving 4 w = eta tanh(w / 2); report it per requested eta.
    nlohmann::ordered_json fps = nlohmann::ordered_json::array();
    for (double eta : cfg.etas) {
      nlohmann::ordered_json entry;
      entry["eta"] = eta;
      if (eta > 8.0) {
        const double ws = oscillation_fixed_point(eta);
        entry["w_star"] = ws;
        std::cout << "w_star(" << format_double(eta) << ") = " << format_double(ws) << "\n";
      } else {
        entry["w_star"] = nullptr;
        std::cout << "w_star(" << format_double(eta) << ") : none (eta <= 8)\n";
      }
      fps.push_back(entry);
    }
    j["oscillation_fixed_points"] = fps;
  }
  write_text_file(out_path(cfg, "critical_lr.json"), j.dump(2) + "\n");
  return 0;
}

int cmd_sweep(const RunConfig& cfg) {
  const Dataset data = dataset_from_config(cfg);
  const LossKind kind = loss_from_string(cfg.loss);
  const SweepConfig sc = sweep_config_from(cfg, data, kind);
  const SweepResult res = run_sweep(sc);
  for (const std::string& a : res.anomalies) std::cerr << "warning: " << a << "\n";

  PhaseBoundaries pb;  // zeros draw no boundary lines in the SVG
  write_text_file(out_path(cfg, "sweep.csv"), emit_report(res, pb, ReportFormat::CSV));
  if (cfg.format == "svg") {
    try {
      pb = find_boundaries(sc, cfg.tol);
    } catch (const error&) {
      // A grid without both transitions still gets its chart, just unmarked.
    }
    write_text_file(out_path(cfg, "sweep.svg"), emit_report(res, pb, ReportFormat::SVG));
  } else if (cfg.format == "table") {
    write_text_file(out_path(cfg, "table.txt"),
                    emit_report(res, pb, ReportFormat::TableSummary));
  } else if (cfg.format != "csv") {
    fail(errc::config_invalid, "format must be csv, svg, or table");
  }

  int lazy = 0, cat = 0, div = 0;
  for (const SweepRow& r : res.rows) {
    if (r.phase == Phase::Lazy) ++lazy;
    if (r.phase == Phase::Catapult) ++cat;
    if (r.phase == Phase::Divergent) ++div;
  }
  std::cout << "sweep: " << lazy << " lazy, " << cat << " catapult, " << div
            << " divergent\n";
  return 0;
}

int cmd_boundaries(const RunConfig& cfg) {
  const Dataset data = dataset_from_config(cfg);
  const LossKind kind = loss_from_string(cfg.loss);
  const SweepConfig sc = sweep_config_from(cfg, data, kind);
  const PhaseBoundaries pb = find_boundaries(sc, cfg.tol);

  nlohmann::ordered_json j;
  j["eta0"] = pb.eta0;
  j["eta0_bracket"] = {pb.eta0_bracket.lo, pb.eta0_bracket.hi};
  j["eta1"] = pb.eta1;
  j["eta1_bracket"] = {pb.eta1_bracket.lo, pb.eta1_bracket.hi};
  j["monotone"] = pb.monotone;
  j["note"] = pb.note;
  j["tol"] = cfg.tol;
  write_text_file(out_path(cfg, "boundaries.json"), j.dump(2) + "\n");
  std::cout << "eta0 = " << format_double(pb.eta0) << " [" << format_double(pb.eta0_bracket.lo)
            << ", " << format_double(pb.eta0_bracket.hi) << "]\n"
            << "eta1 = " << format_double(pb.eta1) << " [" << format_double(pb.eta1_bracket.lo)
            << ", " << format_double(pb.eta1_bracket.hi) << "]\n";
  if (!pb.note.empty()) std::cout << "note: " << pb.note << "\n";
  return 0;
}

int cmd_hessian_check(const RunConfig& cfg) {
  const Dataset data = dataset_from_config(cfg);
  const LossKind kind = loss_from_string(cfg.loss);
  const std::vector<double> etas = eta_grid_from_config(cfg);
  const Vec x0 = dataset_row(data, 0);

  std::string csv = "eta,top_ntk,top_hessian,ratio,converged\n";
  auto field = [](double v) { return std::isnan(v) ? std::string() : format_double(v); };
  int converged_rows = 0;
  for (double eta : etas) {
    NetworkState s = init_network(cfg.m, data.d(), cfg.sigma_w2, cfg.seed);
    // Train past the loss-floor stopping point: the at-minimum identity
    // needs |f| itself small, so iterate until the output is at 1e-7.
    for (long t = 0; t < cfg.steps; ++t) {
      const double f = forward(s, x0);
      if (!std::isfinite(f) || std::abs(f) <= 1e-7) break;
      s = gd_step_network(data, kind, s, eta);
    }
    CurvatureSample sample;
    if (std::isfinite(forward(s, x0))) {
      sample = check_hessian_ntk_relation(data, kind, s);
    } else {
      sample.at_step = s.step;  // diverged: no finite curvature to report
      sample.top_ntk = sample.top_hessian = std::numeric_limits<double>::quiet_NaN();
    }
    csv += format_double(eta) + "," + field(sample.top_ntk) + "," +
           field(sample.top_hessian) + "," + field(sample.ratio) + "," +
           (sample.converged ? "1" : "0") + "\n";
    if (sample.converged) ++converged_rows;
  }
  write_text_file(out_path(cfg, "hessian.csv"), csv);
  std::cout << "hessian-check: " << converged_rows << " of " << etas.size()
            << " rows converged\n";
  return 0;
}

int cmd_cifar_demo(const RunConfig& cfg) {
  if (cfg.cifar_path.empty()) fail(errc::config_invalid, "cifar-demo requires --cifar");
  if (cfg.n_train < 2 || cfg.n_train % 2 != 0 || cfg.n_test < 0 || cfg.n_test % 2 != 0)
    fail(errc::config_invalid,
         "cifar-demo: n-train must be even and >= 2, n-test even and >= 0 "
         "(subsets are class-balanced)");
  const int per_train = cfg.n_train / 2;
  const int per_test = cfg.n_test / 2;
  const Dataset all = load_cifar10_pair(cfg.cifar_path, cfg.cifar_class_a, cfg.cifar_class_b,
                                        per_train + per_test);

  // Split per class in record order: the first per_train of each class train,
  // the next per_test of each class test.
  int seen_pos = 0, seen_neg = 0;
  std::vector<int> train_idx, test_idx;
  for (int i = 0; i < all.n(); ++i) {
    int& seen = all.labels[static_cast<std::size_t>(i)] > 0 ? seen_pos : seen_neg;
    if (seen < per_train)
      train_idx.push_back(i);
    else if (seen < per_train + per_test)
      test_idx.push_back(i);
    ++seen;
  }
  if (seen_pos < per_train + per_test || seen_neg < per_train + per_test)
    fail(errc::data_invalid,
         "cifar-demo: subset sizes unavailable: need " + std::to_string(per_train + per_test) +
             " per class, have " + std::to_string(seen_pos) + " / " + std::to_string(seen_neg));

  auto take = [&](const std::vector<int>& idx, const std::string& tag) {
    Dataset sub;
    sub.name = all.name + ":" + tag;
    sub.features = Mat(idx.size(), static_cast<std::size_t>(all.d()));
    sub.labels.resize(idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r) {
      sub.labels[r] = all.labels[static_cast<std::size_t>(idx[r])];
      for (int k = 0; k < all.d(); ++k)
        sub.features(r, static_cast<std::size_t>(k)) =
            all.features(static_cast<std::size_t>(idx[r]), static_cast<std::size_t>(k));
    }
    return sub;
  };
  const Dataset train = take(train_idx, "train");
  const Dataset test = take(test_idx, "test");

  const LossKind kind = loss_from_string(cfg.loss);
  if (cfg.stop == "gradtol")
    fail(errc::config_invalid, "cifar-demo supports fixed or physical stopping only");
  MlpConfig mc;
  mc.depth = cfg.depth;
  mc.width = cfg.demo_width;
  mc.sigma_w2 = cfg.sigma_w2;
  mc.bias = cfg.depth == 3;
  mc.sigma_b2 = 0.01;
  mc.seed = cfg.seed;

  std::vector<double> etas = cfg.etas.empty() ? std::vector<double>{cfg.eta} : cfg.etas;
  std::vector<DemoRow> rows;
  for (double eta : etas)
    rows.push_back(
        run_demo_once(train, test, kind, mc, eta, steps_budget(cfg, eta), cfg.anneal));
  write_text_file(out_path(cfg, "cifar_demo.csv"), demo_csv(rows));
  write_text_file(out_path(cfg, "run_config.json"), serialize_config(cfg));
  std::cout << "cifar-demo: " << rows.size() << " learning rates, train n=" << train.n()
            << ", test n=" << test.n() << "\n";
  return 0;
}

void add_common_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--config", [&cfg](const std::vector<std::string>&) { return true; },
                  "JSON config file (already merged; flags override its values)");
  sub->add_option("--example", cfg.example, "built-in example dataset: ex1, ex2, ex3, ex4");
  sub->add_option("--synthetic", cfg.synthetic,
                  "synthetic dataset: degenerate, separable, nonseparable");
  sub->add_option("--synth-n", cfg.synth_n, "synthetic sample count");
  sub->add_option("--synth-d", cfg.synth_d, "synthetic dimension");
  sub->add_option("--synth-seed", cfg.synth_seed, "synthetic generator seed");
  sub->add_option("--cifar", cfg.cifar_path, "CIFAR-10 batch file or directory");
  sub->add_option("--class-a", cfg.cifar_class_a, "positive CIFAR class (default automobile)");
  sub->add_option("--class-b", cfg.cifar_class_b, "negative CIFAR class (default dog)");
  sub->add_option("--max-per-class", cfg.cifar_max_per_class, "CIFAR per-class cap");
  sub->add_option("--loss", cfg.loss, "loss: exp or log");
  sub->add_option("--eta", cfg.eta, "learning rate");
  sub->add_option_function<std::vector<double>>(
         "--etas", [&cfg](const std::vector<double>& v) { cfg.etas = v; },
         "explicit learning-rate list")
      ->delimiter(',');
  sub->add_option("--eta-min", cfg.eta_min, "uniform grid lower edge");
  sub->add_option("--eta-max", cfg.eta_max, "uniform grid upper edge");
  sub->add_option("--eta-points", cfg.eta_points, "uniform grid size");
  sub->add_option("--steps", cfg.steps, "step budget");
  sub->add_option("--stop", cfg.stop, "stop rule: fixed, physical, gradtol");
  sub->add_option("--stop-value", cfg.stop_value,
                  "physical duration (steps = ceil(value/eta)) or gradient tolerance");
  sub->add_option_function<double>(
      "--w0", [&cfg](const double& v) { cfg.w0 = v; },
      "scalar predictor start (switches simulate/sweep to predictor mode)");
  sub->add_option("--m", cfg.m, "hidden width");
  sub->add_option("--sigma-w2", cfg.sigma_w2, "weight variance");
  sub->add_option("--seed", cfg.seed, "init seed");
  sub->add_option("--tol", cfg.tol, "boundary bracket width");
  sub->add_option("--n-train", cfg.n_train, "cifar-demo train subset size (total)");
  sub->add_option("--n-test", cfg.n_test, "cifar-demo test subset size (total)");
  sub->add_option("--depth", cfg.depth, "cifar-demo depth: 2 (no bias) or 3 (with bias)");
  sub->add_option("--width", cfg.demo_width, "cifar-demo hidden width");
  sub->add_flag("--anneal", cfg.anneal, "after the main phase, 500 extra steps at eta=0.01");
  sub->add_option("--out", cfg.out_dir, "output directory (default $CATAPULT_OUT_DIR or .)");
  sub->add_option("--format", cfg.format, "sweep artifact: csv, svg, table");
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  // First pass: merge an optional config file so that explicit flags win.
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    std::string path;
    if (arg == "--config" && i + 1 < argc)
      path = argv[i + 1];
    else if (arg.rfind("--config=", 0) == 0)
      path = arg.substr(9);
    if (!path.empty()) {
      try {
        cfg = load_config_file(path);
      } catch (const error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
      }
    }
  }

  CLI::App app{"gradient-descent phase laboratory: linear predictors and two-layer "
               "linear networks under exponential/logistic loss"};
  app.require_subcommand(1);
  CLI::App* s_sim = app.add_subcommand("simulate", "one training run, trajectory CSV + metadata");
  CLI::App* s_clr = app.add_subcommand("critical-lr", "closed-form critical learning rate + checks");
  CLI::App* s_swp = app.add_subcommand("sweep", "learning-rate phase sweep");
  CLI::App* s_bnd = app.add_subcommand("boundaries", "bisect lazy/catapult/divergent boundaries");
  CLI::App* s_hes = app.add_subcommand("hessian-check", "top Hessian vs top NTK at convergence");
  CLI::App* s_cif = app.add_subcommand("cifar-demo", "small-subset image pipeline demo");
  for (CLI::App* sub : {s_sim, s_clr, s_swp, s_bnd, s_hes, s_cif}) add_common_options(sub, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (s_sim->parsed()) return cmd_simulate(cfg);
    if (s_clr->parsed()) return cmd_critical_lr(cfg);
    if (s_swp->parsed()) return cmd_sweep(cfg);
    if (s_bnd->parsed()) return cmd_boundaries(cfg);
    if (s_hes->parsed()) return cmd_hessian_check(cfg);
    if (s_cif->parsed()) return cmd_cifar_demo(cfg);
  } catch (const error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
