#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "catapult_search.hpp"
#include "dataset.hpp"
#include "detect.hpp"
#include "network.hpp"
#include "predictor.hpp"
#include "roots.hpp"
#include "trajectory.hpp"

namespace catapult {

// Learning-rate phase of one training run. Lazy: loss decreases monotonically
// and the top NTK eigenvalue is retained. Catapult: loss rises first, then
// relaxes to the global floor at reduced curvature. Divergent: everything
// else, including true blow-up and the bounded oscillation/saturation that
// replaces blow-up above the stable band for the logistic loss.
enum class Phase { Lazy, Catapult, Divergent };

inline const char* to_string(Phase p) {
  switch (p) {
    case Phase::Lazy: return "Lazy";
    case Phase::Catapult: return "Catapult";
    case Phase::Divergent: return "Divergent";
  }
  return "Unknown";
}

// When to stop a run: a fixed step count, a fixed physical time c meaning
// ceil(c / eta) steps (so larger learning rates get fewer steps), or a
// gradient-norm tolerance with max_steps as the cap.
enum class StopKind { FixedSteps, PhysicalTime, GradTol };

struct StopRule {
  StopKind kind = StopKind::FixedSteps;
  double value = 2000;

  static StopRule fixed_steps(long t) { return {StopKind::FixedSteps, double(t)}; }
  static StopRule physical_time(double c) { return {StopKind::PhysicalTime, c}; }
  static StopRule grad_tol(double tol) { return {StopKind::GradTol, tol}; }
};

struct SweepConfig {
  Dataset dataset;
  LossKind kind = LossKind::Exponential;
  int m = 1000;
  int d = 1;
  double sigma_w2 = 0.5;
  unsigned long seed = 0;
  std::vector<double> eta_grid;  // strictly increasing, all positive
  long max_steps = 2000;
  StopRule stop_rule{};
  // When set, the sweep runs plain gradient descent on a linear predictor
  // started at w0 * ones(d) instead of a two-layer network. This is the
  // network-free sanity path: on degenerate data the divergence boundary of
  // the scalar map has the closed form 2 w0 / sinh(w0) (exponential loss).
  std::optional<double> predictor_w0;
};

struct SweepRow {
  double eta = 0;
  Phase phase = Phase::Lazy;
  double final_loss = std::numeric_limits<double>::quiet_NaN();
  // NaN means absent: Divergent rows carry no final eigenvalue, predictor
  // rows have no NTK channel at all.
  double final_lambda = std::numeric_limits<double>::quiet_NaN();
  double lambda_init = std::numeric_limits<double>::quiet_NaN();
  long steps_run = 0;
  unsigned long seed = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;            // grid order
  std::vector<Trajectory> trajectories;  // parallel to rows
  std::vector<std::string> anomalies;    // e.g. Divergent labels not a suffix
};

inline void validate_sweep_config(const SweepConfig& cfg) {
  validate_dataset(cfg.dataset);
  if (cfg.eta_grid.empty())
    fail(errc::config_invalid, "sweep: eta_grid must be non-empty");
  for (std::size_t i = 0; i < cfg.eta_grid.size(); ++i) {
    if (!(cfg.eta_grid[i] > 0) || !std::isfinite(cfg.eta_grid[i]))
      fail(errc::config_invalid, "sweep: eta_grid entries must be positive finite");
    if (i > 0 && !(cfg.eta_grid[i] > cfg.eta_grid[i - 1]))
      fail(errc::config_invalid, "sweep: eta_grid must be strictly increasing");
  }
  if (cfg.max_steps < 1) fail(errc::config_invalid, "sweep: max_steps must be >= 1");
  switch (cfg.stop_rule.kind) {
    case StopKind::FixedSteps:
      if (!(cfg.stop_rule.value >= 1))
        fail(errc::config_invalid, "sweep: FixedSteps needs a step count >= 1");
      break;
    case StopKind::PhysicalTime:
      if (!(cfg.stop_rule.value > 0))
        fail(errc::config_invalid, "sweep: PhysicalTime needs a positive duration");
      break;
    case StopKind::GradTol:
      if (!(cfg.stop_rule.value > 0))
        fail(errc::config_invalid, "sweep: GradTol needs a positive tolerance");
      break;
  }
  if (!cfg.predictor_w0) {
    if (cfg.m < 1) fail(errc::config_invalid, "sweep: width m must be >= 1");
    if (cfg.d != cfg.dataset.d())
      fail(errc::config_invalid, "sweep: d does not match the dataset dimension");
    if (!(cfg.sigma_w2 >= 0) || !std::isfinite(cfg.sigma_w2))
      fail(errc::config_invalid, "sweep: sigma_w2 must be finite and >= 0");
  }
}

namespace detail {

inline long steps_for(const SweepConfig& cfg, double eta) {
  switch (cfg.stop_rule.kind) {
    case StopKind::FixedSteps:
      return std::min<long>(cfg.max_steps, std::llround(cfg.stop_rule.value));
    case StopKind::PhysicalTime: {
      const long t = static_cast<long>(std::ceil(cfg.stop_rule.value / eta));
      return std::clamp<long>(t, 1, cfg.max_steps);
    }
    case StopKind::GradTol:
      return cfg.max_steps;
  }
  return cfg.max_steps;
}

// Labeling cascade. Divergent if the run blew up; Catapult on the full
// rise-then-relax verdict; Lazy if the loss never increased by more than
// 1e-12 per step and the final eigenvalue stayed within 5% of its initial
// value. Anything left over (bounded oscillation, saturation, partial
// catapults that missed the floor) falls through to Divergent so the three
// labels partition the grid; such runs sit past the stable band.
inline Phase label_run(const Trajectory& traj, double eta, LossKind kind) {
  if (traj.terminal == Terminal::Diverged) return Phase::Divergent;
  if (detect_catapult(traj, eta, kind).is_catapult) return Phase::Catapult;
  bool monotone = true;
  for (std::size_t t = 0; t + 1 < traj.records.size(); ++t) {
    if (traj.records[t + 1].loss > traj.records[t].loss + 1e-12) {
      monotone = false;
      break;
    }
  }
  const double li = traj.front().lambda;
  const double lf = traj.last_finite().lambda;
  // Runs without an NTK channel (scalar predictor mode) skip the retention
  // clause: monotone descent alone is lazy there.
  const bool lambda_ok =
      (std::isnan(li) || std::isnan(lf)) ? true : std::abs(lf - li) <= 0.05 * li;
  if (monotone && lambda_ok) return Phase::Lazy;
  return Phase::Divergent;
}

struct OneRun {
  SweepRow row;
  Trajectory traj;
};

inline OneRun run_one(const SweepConfig& cfg, const std::optional<NetworkState>& init,
                      double eta) {
  OneRun out;
  const long steps = steps_for(cfg, eta);
  if (cfg.predictor_w0) {
    const double tol = cfg.stop_rule.kind == StopKind::GradTol ? cfg.stop_rule.value : 1e-9;
    Vec w0(static_cast<std::size_t>(cfg.dataset.d()), *cfg.predictor_w0);
    out.traj = run_predictor(cfg.dataset, cfg.kind, w0, eta, steps, tol);
  } else {
    const double gtol = cfg.stop_rule.kind == StopKind::GradTol ? cfg.stop_rule.value : 1e-6;
    NetworkRun nr = run_network(cfg.dataset, cfg.kind, *init, eta, steps, gtol);
    out.traj = std::move(nr.trajectory);
  }

  SweepRow& row = out.row;
  const Trajectory& traj = out.traj;
  row.eta = eta;
  row.phase = label_run(traj, eta, cfg.kind);
  const TrajectoryRecord& fin = traj.last_finite();
  row.final_loss = fin.loss;
  row.final_lambda =
      row.phase == Phase::Divergent ? std::numeric_limits<double>::quiet_NaN() : fin.lambda;
  row.lambda_init = traj.front().lambda;
  row.steps_run = traj.back().step;
  row.seed = cfg.seed;
  return out;
}

}  // namespace detail

// Runs the full learning-rate grid from one shared initial state (identical
// seed across eta, so phase boundaries are properties of eta and not of
// init noise). Rows come back in grid order regardless of scheduling.
inline SweepResult run_sweep(const SweepConfig& cfg) {
  validate_sweep_config(cfg);
  std::optional<NetworkState> init;
  if (!cfg.predictor_w0) init = init_network(cfg.m, cfg.d, cfg.sigma_w2, cfg.seed);

  const long n = static_cast<long>(cfg.eta_grid.size());
  SweepResult res;
  res.rows.resize(cfg.eta_grid.size());
  res.trajectories.resize(cfg.eta_grid.size());
  std::exception_ptr first_error;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (long i = 0; i < n; ++i) {
    try {
      detail::OneRun one = detail::run_one(cfg, init, cfg.eta_grid[i]);
      res.rows[i] = one.row;
      res.trajectories[i] = std::move(one.traj);
    } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
      if (!first_error) first_error = std::current_exception();
    }
  }
  if (first_error) std::rethrow_exception(first_error);

  // On degenerate data divergence is monotone in eta, so Divergent labels
  // must form a suffix of the grid; anything else is flagged, not assumed,
  // since general data carries no such guarantee.
  if (has_degenerate_pair(cfg.dataset)) {
    bool seen_divergent = false;
    for (const SweepRow& row : res.rows) {
      if (row.phase == Phase::Divergent) {
        seen_divergent = true;
      } else if (seen_divergent) {
        res.anomalies.push_back(
            "Divergent labels do not form a suffix of the eta grid on degenerate data");
        break;
      }
    }
  }
  return res;
}

struct BoundaryBracket {
  double lo = 0;
  double hi = 0;
  double mid() const { return 0.5 * (lo + hi); }
  double width() const { return hi - lo; }
};

struct PhaseBoundaries {
  double eta0 = 0;  // Lazy <-> Catapult transition (bracket midpoint)
  double eta1 = 0;  // Catapult <-> Divergent transition (bracket midpoint)
  BoundaryBracket eta0_bracket;
  BoundaryBracket eta1_bracket;
  bool monotone = true;  // grid labels were monotone for both transitions
  std::string note;      // diagnostics when they were not
};

// Label bisection of the two transitions, using the same initial state and
// labeling rule as run_sweep. eta0 separates {Lazy} from the rest; eta1
// separates {Lazy, Catapult} from Divergent. Labels are discrete and may be
// noisy near a transition, so the result is always a bracket (of width <=
// tol); when the grid labels are non-monotone the first flip is refined and
// the result flagged instead of trusted as a sharp point. In predictor mode
// no run is ever labeled Catapult, so both brackets collapse onto the single
// stability boundary and eta0 == eta1 up to tol.
inline PhaseBoundaries find_boundaries(const SweepConfig& cfg, double tol) {
  if (!(tol > 0) || !std::isfinite(tol))
    fail(errc::config_invalid, "find_boundaries: tol must be positive");
  const SweepResult sweep = run_sweep(cfg);
  std::optional<NetworkState> init;
  if (!cfg.predictor_w0) init = init_network(cfg.m, cfg.d, cfg.sigma_w2, cfg.seed);

  auto phase_at = [&](double eta) { return detail::run_one(cfg, init, eta).row.phase; };

  PhaseBoundaries pb;
  auto bracket_for = [&](auto in_lo_class, const char* name) {
    std::optional<std::size_t> flip;
    bool monotone_here = true;
    for (std::size_t i = 0; i + 1 < sweep.rows.size(); ++i) {
      const bool a = in_lo_class(sweep.rows[i].phase);
      const bool b = in_lo_class(sweep.rows[i + 1].phase);
      if (a && !b) {
        if (!flip)
          flip = i;
        else
          monotone_here = false;  // a second crossing
      }
      if (!a && b) monotone_here = false;  // label came back
    }
    if (!flip)
      fail(errc::no_bracket,
           std::string("find_boundaries: grid shows no ") + name + " transition");
    if (!monotone_here) {
      pb.monotone = false;
      if (!pb.note.empty()) pb.note += "; ";
      pb.note += std::string("non-monotone labels across the ") + name + " transition";
    }
    double lo = cfg.eta_grid[*flip];
    double hi = cfg.eta_grid[*flip + 1];
    for (int it = 0; hi - lo > tol && it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (in_lo_class(phase_at(mid)))
        lo = mid;
      else
        hi = mid;
    }
    return BoundaryBracket{lo, hi};
  };

  pb.eta0_bracket =
      bracket_for([](Phase p) { return p == Phase::Lazy; }, "Lazy to non-Lazy");
  pb.eta1_bracket =
      bracket_for([](Phase p) { return p != Phase::Divergent; }, "non-Divergent to Divergent");
  pb.eta0 = pb.eta0_bracket.mid();
  pb.eta1 = pb.eta1_bracket.mid();
  if (pb.eta1 < pb.eta0 - tol) {
    pb.monotone = false;
    if (!pb.note.empty()) pb.note += "; ";
    pb.note += "eta1 resolved below eta0";
  }
  return pb;
}

enum class ReportFormat { CSV, SVG, TableSummary };

namespace detail {

inline std::string sweep_csv(const SweepResult& sweep) {
  std::string out = "eta,phase,final_loss,final_lambda,lambda_init,steps_run,seed\n";
  auto field = [](double v) { return std::isnan(v) ? std::string() : format_double(v); };
  for (const SweepRow& row : sweep.rows) {
    out += format_double(row.eta);
    out += ',';
    out += to_string(row.phase);
    out += ',';
    out += field(row.final_loss);
    out += ',';
    out += field(row.final_lambda);
    out += ',';
    out += field(row.lambda_init);
    out += ',';
    out += std::to_string(row.steps_run);
    out += ',';
    out += std::to_string(row.seed);
    out += '\n';
  }
  return out;
}

inline std::string svg_report(const SweepResult& sweep, const PhaseBoundaries& bounds) {
  // Two panels: per-eta loss curves on a log10 axis, and the final top NTK
  // eigenvalue against eta with the two boundaries as dashed verticals.
  const double px = 60, py = 40, pw = 380, ph = 320;   // loss panel
  const double qx = 540, qy = 40, qw = 380, qh = 320;  // lambda panel

  long max_step = 1;
  double ly_min = 1e300, ly_max = -1e300;
  std::vector<std::vector<std::pair<double, double>>> curves;
  for (const Trajectory& traj : sweep.trajectories) {
    std::vector<std::pair<double, double>> pts;
    for (const TrajectoryRecord& r : traj.records) {
      if (!std::isfinite(r.loss)) continue;
      const double v = std::log10(std::max(r.loss, 1e-16));
      pts.emplace_back(double(r.step), v);
      max_step = std::max(max_step, r.step);
      ly_min = std::min(ly_min, v);
      ly_max = std::max(ly_max, v);
    }
    curves.push_back(std::move(pts));
  }
  if (ly_max - ly_min < 1e-12) {
    ly_min -= 0.5;
    ly_max += 0.5;
  }

  double ex_min = sweep.rows.front().eta, ex_max = sweep.rows.back().eta;
  if (ex_max - ex_min < 1e-12) {
    ex_min -= 0.5;
    ex_max += 0.5;
  }
  double lam_min = 1e300, lam_max = -1e300;
  for (const SweepRow& row : sweep.rows) {
    for (double v : {row.final_lambda, row.lambda_init}) {
      if (std::isnan(v)) continue;
      lam_min = std::min(lam_min, v);
      lam_max = std::max(lam_max, v);
    }
  }
  if (lam_min > lam_max) {  // no eigenvalue data at all (predictor sweep)
    lam_min = 0;
    lam_max = 1;
  }
  if (lam_max - lam_min < 1e-12) {
    lam_min -= 0.5;
    lam_max += 0.5;
  }

  auto lx = [&](double step) { return px + pw * step / double(max_step); };
  auto ly = [&](double v) { return py + ph * (ly_max - v) / (ly_max - ly_min); };
  auto qxm = [&](double eta) { return qx + qw * (eta - ex_min) / (ex_max - ex_min); };
  auto qym = [&](double v) { return qy + qh * (lam_max - v) / (lam_max - lam_min); };

  std::ostringstream s;
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"960\" height=\"420\" "
       "viewBox=\"0 0 960 420\">\n"
    << "<rect x=\"0\" y=\"0\" width=\"960\" height=\"420\" fill=\"white\"/>\n";

  // Loss panel frame and curves: exactly one polyline per eta.
  s << "<text x=\"" << px << "\" y=\"" << py - 12
    << "\" font-size=\"13\" font-family=\"sans-serif\">loss vs step (log10)</text>\n";
  s << "<line x1=\"" << px << "\" y1=\"" << py + ph << "\" x2=\"" << px + pw << "\" y2=\""
    << py + ph << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << px << "\" y1=\"" << py << "\" x2=\"" << px << "\" y2=\"" << py + ph
    << "\" stroke=\"black\"/>\n";
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const int hue = int(360.0 * double(i) / double(std::max<std::size_t>(curves.size(), 1)));
    s << "<polyline fill=\"none\" stroke=\"hsl(" << hue << ",70%,40%)\" stroke-width=\"1\" "
      << "points=\"";
    for (const auto& [st, v] : curves[i]) s << format_double(lx(st)) << ',' << format_double(ly(v)) << ' ';
    s << "\"/>\n";
  }
  s << "<text x=\"" << px << "\" y=\"" << py + ph + 16
    << "\" font-size=\"11\" font-family=\"sans-serif\">0</text>\n"
    << "<text x=\"" << px + pw - 30 << "\" y=\"" << py + ph + 16
    << "\" font-size=\"11\" font-family=\"sans-serif\">" << max_step << "</text>\n";

  // Eigenvalue panel: init curve dashed gray, final curve solid with markers,
  // boundaries as dashed verticals.
  s << "<text x=\"" << qx << "\" y=\"" << qy - 12
    << "\" font-size=\"13\" font-family=\"sans-serif\">top NTK eigenvalue vs learning "
       "rate</text>\n";
  s << "<line x1=\"" << qx << "\" y1=\"" << qy + qh << "\" x2=\"" << qx + qw << "\" y2=\""
    << qy + qh << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << qx << "\" y1=\"" << qy << "\" x2=\"" << qx << "\" y2=\"" << qy + qh
    << "\" stroke=\"black\"/>\n";
  auto path_of = [&](auto value_of) {
    std::string d;
    bool started = false;
    for (const SweepRow& row : sweep.rows) {
      const double v = value_of(row);
      if (std::isnan(v)) continue;
      d += started ? " L " : "M ";
      d += format_double(qxm(row.eta)) + " " + format_double(qym(v));
      started = true;
    }
    return d;
  };
  const std::string init_path = path_of([](const SweepRow& r) { return r.lambda_init; });
  if (!init_path.empty())
    s << "<path fill=\"none\" stroke=\"gray\" stroke-dasharray=\"2 3\" d=\"" << init_path
      << "\"/>\n";
  const std::string final_path = path_of([](const SweepRow& r) { return r.final_lambda; });
  if (!final_path.empty())
    s << "<path fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" d=\"" << final_path
      << "\"/>\n";
  for (const SweepRow& row : sweep.rows) {
    if (std::isnan(row.final_lambda)) continue;
    s << "<circle cx=\"" << format_double(qxm(row.eta)) << "\" cy=\""
      << format_double(qym(row.final_lambda)) << "\" r=\"2.5\" fill=\"steelblue\"/>\n";
  }
  for (double b : {bounds.eta0, bounds.eta1}) {
    if (b < ex_min || b > ex_max) continue;
    s << "<line x1=\"" << format_double(qxm(b)) << "\" y1=\"" << qy << "\" x2=\""
      << format_double(qxm(b)) << "\" y2=\"" << qy + qh
      << "\" stroke=\"green\" stroke-dasharray=\"5 3\"/>\n";
  }
  s << "<text x=\"" << qx << "\" y=\"" << qy + qh + 16
    << "\" font-size=\"11\" font-family=\"sans-serif\">" << format_double(ex_min)
    << "</text>\n"
    << "<text x=\"" << qx + qw - 40 << "\" y=\"" << qy + qh + 16
    << "\" font-size=\"11\" font-family=\"sans-serif\">" << format_double(ex_max)
    << "</text>\n";
  s << "</svg>\n";
  return s.str();
}

// Catapult existence for summary purposes, looser than the full verdict of
// detect_catapult and applicable to non-degenerate data: the loss peaked
// strictly above its start somewhere in the interior, the run ended within
// 1e-4 of the dataset's own floor, and the eigenvalue ended below its start.
inline bool catapult_existence(const Trajectory& traj, double floor) {
  const auto& rec = traj.records;
  if (rec.size() < 3 || traj.terminal == Terminal::Diverged) return false;
  std::size_t arg = 0;
  double peak = rec[0].loss;
  std::size_t last_finite_idx = 0;
  for (std::size_t i = 0; i < rec.size(); ++i) {
    if (!std::isfinite(rec[i].loss)) continue;
    last_finite_idx = i;
    if (rec[i].loss > peak) {
      peak = rec[i].loss;
      arg = i;
    }
  }
  const bool rose =
      peak > rec[0].loss + 1e-9 * (1.0 + std::abs(rec[0].loss)) && arg < last_finite_idx;
  const TrajectoryRecord& fin = traj.last_finite();
  const bool near_floor = std::abs(fin.loss - floor) <= 1e-4;
  const bool lambda_drop = fin.lambda < rec[0].lambda;
  return rose && near_floor && lambda_drop;
}

// Global minimum of the mean margin loss over a scalar weight (d = 1 data
// whose loss actually attains a minimum, e.g. a non-separable sample set).
// The derivative is nondecreasing by convexity, so a sign-change bracket
// plus bisection lands on the unique stationary point.
inline double predictor_floor_1d(const Dataset& data, LossKind kind) {
  if (data.d() != 1) fail(errc::config_invalid, "predictor_floor_1d: needs d == 1");
  auto dloss = [&](double w) {
    double acc = 0;
    for (int i = 0; i < data.n(); ++i) {
      const double yx = data.labels[i] * data.features(i, 0);
      acc += loss_grad_margin(kind, w * yx) * yx;
    }
    return acc / double(data.n());
  };
  double lo = -1, hi = 1;
  for (int it = 0; (dloss(lo) > 0 || dloss(hi) < 0) && it < 60; ++it) {
    lo *= 2;
    hi *= 2;
  }
  const double w = bisect_root(dloss, {lo, hi}, 1e-13);
  Vec wv{w};
  return predictor_loss(data, kind, wv);
}

}  // namespace detail

// Condition-by-loss catapult existence table. Each condition row is decided
// from actual training runs: a fixed-seed learning-rate grid for the
// separable control and the attained-minimum datasets, and a probe-guided
// search over seeds and learning rates for the degenerate pair (whose
// convergent catapult windows are thin in eta at larger widths). The
// non-separable row holds when any dataset of that condition exhibits one.
inline std::string table_summary() {
  auto grid_existence = [&](const Dataset& data, LossKind kind, int m, double sigma_w2,
                            unsigned long seed, double floor, long steps) {
    const NetworkState state0 = init_network(m, data.d(), sigma_w2, seed);
    const double lam0 = ntk_top_eigenvalue(state0, data);
    const int points = 48;
    const double lo = 0.4 / lam0, hi = 12.0 / lam0;
    for (int i = 0; i < points; ++i) {
      const double eta = lo * std::pow(hi / lo, double(i) / double(points - 1));
      const NetworkRun run = run_network(data, kind, state0, eta, steps);
      if (detail::catapult_existence(run.trajectory, floor)) return true;
    }
    return false;
  };

  auto degenerate_existence = [&](LossKind kind) {
    const Dataset ex1 = example_dataset(ExampleId::Ex1);
    const int m = 100;
    const double sigma_w2 = kind == LossKind::Exponential ? 0.5 : 1.0;
    const double lo_scale = kind == LossKind::Exponential ? 1.2 : 8.05;
    const double hi_scale = kind == LossKind::Exponential ? 4.2 : 16.0;
    const auto cand = find_catapult_candidate(kind, m, sigma_w2, ex1, 1, 60, 0.97,
                                              lo_scale, hi_scale);
    if (!cand) return false;
    const NetworkState state0 = init_network(m, ex1.d(), sigma_w2, cand->seed);
    const NetworkRun run = run_network(ex1, kind, state0, cand->eta, 4000);
    return detail::catapult_existence(run.trajectory, degenerate_floor(kind));
  };

  const Dataset control = synthetic_two_class(20, 2, SeparationCondition::LinearlySeparable, 101);
  const Dataset ex2 = example_dataset(ExampleId::Ex2);
  const Dataset ex4 = example_dataset(ExampleId::Ex4);

  bool sep[2], dgn[2], nsp[2];
  const LossKind kinds[2] = {LossKind::Exponential, LossKind::Logistic};
  for (int k = 0; k < 2; ++k) {
    const LossKind kind = kinds[k];
    sep[k] = grid_existence(control, kind, 100, 0.5, 3, 0.0, 2000);
    dgn[k] = degenerate_existence(kind);
    const double ex2_floor = detail::predictor_floor_1d(ex2, kind);
    // The four-point set has an unattained infimum (loss decreases forever
    // along one direction), so its reachable floor for the existence test is
    // the infimum itself; runs converging near it with an eigenvalue drop
    // still certify the condition.
    const double ex4_floor = kind == LossKind::Exponential ? 0.5 : std::log(2.0) / 2.0;
    nsp[k] = grid_existence(ex2, kind, 100, 0.5, 3, ex2_floor, 3000) ||
             grid_existence(ex4, kind, 100, 0.5, 3, ex4_floor, 3000);
  }

  auto mark = [](bool v) { return v ? "✓" : "✗"; };
  std::string out;
  out += "catapult existence by separation condition\n";
  out += "\n";
  out += "condition            exponential  logistic\n";
  auto row = [&](const char* label, bool a, bool b) {
    std::string line = label;
    while (line.size() < 21) line += ' ';
    line += mark(a);
    line += std::string(12, ' ');
    line += mark(b);
    out += line + "\n";
  };
  row("linearly separable", sep[0], sep[1]);
  row("degenerate", dgn[0], dgn[1]);
  row("non-separable", nsp[0], nsp[1]);
  return out;
}

// Renders a finished sweep. CSV rows appear in grid order with empty fields
// for absent eigenvalues; the SVG is a standalone two-panel chart; the table
// summary reruns the condition battery and ignores the passed sweep beyond
// the non-emptiness check.
inline std::string emit_report(const SweepResult& sweep, const PhaseBoundaries& bounds,
                               ReportFormat format) {
  if (sweep.rows.empty()) fail(errc::config_invalid, "emit_report: empty sweep");
  switch (format) {
    case ReportFormat::CSV: return detail::sweep_csv(sweep);
    case ReportFormat::SVG: return detail::svg_report(sweep, bounds);
    case ReportFormat::TableSummary: return table_summary();
  }
  fail(errc::config_invalid, "emit_report: unknown format");
}

}  // namespace catapult
