#pragma once

#include <functional>
#include <map>
#include <string>

#include "mbgk/integrate.hpp"
#include "mbgk/scenario.hpp"

namespace mbgk {

struct RunOptions {
  int threads = 0;  // 0 = auto
  int verbosity = 0;
};

struct RunStats {
  long steps = 0;
  long retries = 0;
  double t_reached = 0.0;
  double wall_seconds = 0.0;
  double dt_min = 0.0, dt_max = 0.0;
  std::map<int, long> gst_iteration_histogram;  // per-cell-solve sweep counts
  double max_momentum_drift = 0.0;  // worst per-stage moment-solve drift
  double max_energy_drift = 0.0;
  double min_temperature_source = 0.0;
  double lambda_initial = 0.0, lambda_final = 0.0;
  std::vector<double> mass_initial, mass_final;  // per species, domain totals
};

struct RunResult {
  ChuState state;
  RunStats stats;
};

using SnapshotCallback = std::function<void(long step, double t, const ChuState&)>;

/// Advance the scenario to t_final with the configured integrator and step
/// rule (fixed 0.9 * advection limit for IMEX, adaptive stiff limit for the
/// explicit scheme), recording per-step diagnostics.
RunResult run(const ScenarioConfig& cfg, const RunOptions& opt,
              const SnapshotCallback& snapshot = {});

}  // namespace mbgk
