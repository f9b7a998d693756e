#pragma once

#include <string>

#include "mbgk/runner.hpp"

namespace mbgk {

/// Header row of the moment-profile table for this scenario (tab-separated):
/// x, then n/u/T per species, then mixture totals, then exact-Riemann overlay
/// columns when the scenario declares one.
std::string profile_header(const ScenarioConfig& cfg);

/// Mixture totals used in the profile: n = sum n_i, u mass-weighted, and the
/// energy-consistent temperature T = (2 sum E_i - rho |u|^2) / (3 n).
struct MixtureMoments {
  double n = 0, u = 0, T = 0;
};
MixtureMoments mixture_totals(const SpeciesSet& sp, const MomentState& cell);

/// Write per-cell moment profiles (one row per spatial cell). `time` is used
/// to sample the exact-Riemann overlay when enabled; overlay columns assume
/// unit particle mass (number density == mass density).
void write_profile(const std::string& path, const ScenarioConfig& cfg,
                   const ChuState& state, double time);

/// Flat key-value run summary.
void write_summary(const std::string& path, const ScenarioConfig& cfg,
                   const std::string& config_path, const RunStats& stats);

/// Canonically serialized copy of the config (round-trips through load_config).
void write_config_copy(const std::string& path, const ScenarioConfig& cfg);

/// Exact-Riemann profile on the scenario's spatial grid at the given time.
void write_sod_exact(const std::string& path, const ScenarioConfig& cfg, double time);

}  // namespace mbgk
