#pragma once

#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "csv.hpp"
#include "errors.hpp"

namespace catapult {

// How a gradient-descent run ended. Divergence is a recorded outcome, not an
// exception: sweeps need to chart it like any other label.
enum class Terminal { Converged, Oscillating, Saturated, Diverged, StepLimit };

inline const char* to_string(Terminal t) {
  switch (t) {
    case Terminal::Converged: return "Converged";
    case Terminal::Oscillating: return "Oscillating";
    case Terminal::Saturated: return "Saturated";
    case Terminal::Diverged: return "Diverged";
    case Terminal::StepLimit: return "StepLimit";
  }
  return "Unknown";
}

// One sampled point of a trajectory. The last two fields only apply to some
// dynamics and stay NaN otherwise: f is the network/predictor output on the
// first sample and lambda the top NTK eigenvalue (two-layer runs only).
struct TrajectoryRecord {
  long step = 0;
  double loss = 0;
  double grad_norm = 0;
  double w_norm = 0;
  double f = std::numeric_limits<double>::quiet_NaN();
  double lambda = std::numeric_limits<double>::quiet_NaN();
};

struct Trajectory {
  std::vector<TrajectoryRecord> records;  // steps strictly increasing from 0
  Terminal terminal = Terminal::StepLimit;

  const TrajectoryRecord& front() const { return records.front(); }
  const TrajectoryRecord& back() const { return records.back(); }
  // Last record with a finite loss (skips a trailing divergence marker).
  const TrajectoryRecord& last_finite() const {
    for (auto it = records.rbegin(); it != records.rend(); ++it)
      if (std::isfinite(it->loss)) return *it;
    return records.front();
  }
};

inline void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(errc::io_failure, "write_trajectory_csv: cannot open " + path);
  out << "step,loss,grad_norm,w_norm,f,lambda\n";
  for (const auto& r : traj.records) {
    out << r.step << ',' << format_double(r.loss) << ',' << format_double(r.grad_norm)
        << ',' << format_double(r.w_norm) << ',' << format_double(r.f) << ','
        << format_double(r.lambda) << "\n";
  }
  if (!out) fail(errc::io_failure, "write_trajectory_csv: write failed for " + path);
}

// Column set for linear-predictor runs (no width, no NTK channel).
inline void write_predictor_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(errc::io_failure, "write_predictor_csv: cannot open " + path);
  out << "step,loss,grad_norm,w_norm\n";
  for (const auto& r : traj.records) {
    out << r.step << ',' << format_double(r.loss) << ',' << format_double(r.grad_norm)
        << ',' << format_double(r.w_norm) << "\n";
  }
  if (!out) fail(errc::io_failure, "write_predictor_csv: write failed for " + path);
}

// Column set for two-layer runs: output on the first sample and the top NTK
// eigenvalue are the observables the phase diagnostics consume.
inline void write_network_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(errc::io_failure, "write_network_csv: cannot open " + path);
  out << "step,loss,f,lambda_ntk\n";
  for (const auto& r : traj.records) {
    out << r.step << ',' << format_double(r.loss) << ',' << format_double(r.f) << ','
        << format_double(r.lambda) << "\n";
  }
  if (!out) fail(errc::io_failure, "write_network_csv: write failed for " + path);
}

}  // namespace catapult
