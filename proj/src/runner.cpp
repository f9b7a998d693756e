#include "mbgk/runner.hpp"

#include <chrono>
#include <cmath>

#include "mbgk/errors.hpp"

namespace mbgk {

namespace {

std::vector<double> species_masses(const ChuState& st, const VelocityGrid& vgrid,
                                   const SpatialGrid& grid) {
  std::vector<double> total(st.species());
  for (int i = 0; i < st.species(); ++i)
    total[i] = st.g[i].sum() * vgrid.weight() * grid.dx();
  return total;
}

}  // namespace

RunResult run(const ScenarioConfig& cfg, const RunOptions& opt,
              const SnapshotCallback& snapshot) {
  const auto errors = validate(cfg);
  if (!errors.empty())
    throw Error(ErrorCategory::config_validate, "run: invalid config: " + errors.front());

  const SpeciesSet sp = make_species(cfg);
  const SpatialGrid grid = make_spatial_grid(cfg);
  const VelocityGrid vgrid = make_velocity_grid(cfg);

  const ImexTableau tableau = ImexTableau::ars222();
  if (tableau.consistency_error() > 1e-12)
    throw_invariant("run: IMEX tableau fails its consistency self-test");

  RunResult out;
  out.state = initial_state(cfg);
  RunStats& stats = out.stats;
  stats.dt_min = std::numeric_limits<double>::infinity();
  stats.min_temperature_source = std::numeric_limits<double>::infinity();
  stats.mass_initial = species_masses(out.state, vgrid, grid);
  stats.lambda_initial = max_total_frequency(sp, moments_from_chu(sp, out.state, vgrid));

  const double t_final = *cfg.t_final;
  const double eps = *cfg.epsilon;
  const bool imex = *cfg.integrator == ScenarioConfig::Integrator::imex;
  const StepControl ctrl;
  const double dt_imex = ctrl.safety * StepControl::imex_limit(grid, vgrid);

  double t = 0.0;
  double lambda_now = stats.lambda_initial;
  const auto t0 = std::chrono::steady_clock::now();
  const double t_eps = 1e-12 * std::max(1.0, t_final);

  while (t < t_final - t_eps) {
    double dt;
    if (imex) {
      dt = dt_imex;
    } else {
      lambda_now = max_total_frequency(sp, moments_from_chu(sp, out.state, vgrid));
      dt = ctrl.safety * StepControl::explicit_limit(eps, grid, vgrid, lambda_now);
    }
    dt = std::min(dt, t_final - t);

    StepDiagnostics diag;
    if (imex) {
      diag = imex_step(out.state, dt, eps, tableau, grid, vgrid, sp, cfg.gst, opt.threads);
    } else {
      diag = explicit_step(out.state, dt, eps, grid, vgrid, sp, opt.threads);
    }

    t += diag.dt_used;
    ++stats.steps;
    if (diag.retried) ++stats.retries;
    stats.dt_min = std::min(stats.dt_min, diag.dt_used);
    stats.dt_max = std::max(stats.dt_max, diag.dt_used);
    stats.max_momentum_drift = std::max(stats.max_momentum_drift, diag.max_momentum_drift);
    stats.max_energy_drift = std::max(stats.max_energy_drift, diag.max_energy_drift);
    stats.min_temperature_source =
        std::min(stats.min_temperature_source, diag.min_temperature_source);
    if (imex) ++stats.gst_iteration_histogram[diag.max_gst_iterations];

    if (snapshot && cfg.output.cadence > 0 && stats.steps % cfg.output.cadence == 0)
      snapshot(stats.steps, t, out.state);
  }

  stats.t_reached = t;
  stats.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  stats.mass_final = species_masses(out.state, vgrid, grid);
  stats.lambda_final = max_total_frequency(sp, moments_from_chu(sp, out.state, vgrid));
  if (!std::isfinite(stats.dt_min)) stats.dt_min = 0.0;
  if (!std::isfinite(stats.min_temperature_source)) stats.min_temperature_source = 0.0;
  return out;
}

}  // namespace mbgk
