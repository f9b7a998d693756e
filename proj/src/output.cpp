#include "mbgk/output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "mbgk/errors.hpp"
#include "mbgk/oracle.hpp"

namespace mbgk {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCategory::io, "cannot write to " + path);
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

RiemannState overlay_sample(const ScenarioConfig& cfg, double x, double time) {
  const RiemannState left{cfg.overlay.rho_l, cfg.overlay.u_l, cfg.overlay.p_l};
  const RiemannState right{cfg.overlay.rho_r, cfg.overlay.u_r, cfg.overlay.p_r};
  if (time <= 0.0) return x <= 0.0 ? left : right;
  return sod_exact(left, right, cfg.overlay.gamma, x / time);
}

}  // namespace

std::string profile_header(const ScenarioConfig& cfg) {
  std::string h = "x";
  for (const auto& s : cfg.species) h += "\tn_" + s.name + "\tu_" + s.name + "\tT_" + s.name;
  h += "\tn_total\tu_mixture\tT_mixture";
  if (cfg.overlay.enabled) h += "\tn_exact\tu_exact\tT_exact";
  return h;
}

MixtureMoments mixture_totals(const SpeciesSet& sp, const MomentState& cell) {
  MixtureMoments m;
  const VectorXd rho = cell.rho(sp);
  m.n = cell.n().sum();
  m.u = rho.dot(cell.u().col(0)) / rho.sum();
  const double e_total = 0.5 * rho.dot(cell.s()) + 1.5 * cell.n().dot(cell.T());
  m.T = (2.0 * e_total - rho.sum() * m.u * m.u) / (3.0 * m.n);
  return m;
}

void write_profile(const std::string& path, const ScenarioConfig& cfg,
                   const ChuState& state, double time) {
  const SpeciesSet sp = make_species(cfg);
  const SpatialGrid grid = make_spatial_grid(cfg);
  const VelocityGrid vgrid = make_velocity_grid(cfg);

  auto out = open_out(path);
  out << profile_header(cfg) << "\n";
  for (int k = 0; k < grid.cells(); ++k) {
    const MomentState cell = cell_moments_from_chu(sp, state, vgrid, k);
    // Chu closure carries the full 3-D energy: report T in the slab physics.
    const double x = grid.center(k);
    out << num(x);
    for (int i = 0; i < cell.count(); ++i)
      out << "\t" << num(cell.n()(i)) << "\t" << num(cell.u()(i, 0)) << "\t"
          << num(cell.T()(i));
    const MixtureMoments mix = mixture_totals(sp, cell);
    out << "\t" << num(mix.n) << "\t" << num(mix.u) << "\t" << num(mix.T);
    if (cfg.overlay.enabled) {
      const RiemannState ex = overlay_sample(cfg, x, time);
      out << "\t" << num(ex.rho) << "\t" << num(ex.u) << "\t" << num(ex.p / ex.rho);
    }
    out << "\n";
  }
}

void write_summary(const std::string& path, const ScenarioConfig& cfg,
                   const std::string& config_path, const RunStats& stats) {
  auto out = open_out(path);
  out << "config " << config_path << "\n";
  if (!cfg.title.empty()) out << "title \"" << cfg.title << "\"\n";
  out << "integrator "
      << (*cfg.integrator == ScenarioConfig::Integrator::imex ? "imex" : "explicit") << "\n";
  out << "steps " << stats.steps << "\n";
  out << "retries " << stats.retries << "\n";
  out << "t_reached " << num(stats.t_reached) << "\n";
  out << "wall_seconds " << num(stats.wall_seconds) << "\n";
  out << "dt_min " << num(stats.dt_min) << "\n";
  out << "dt_max " << num(stats.dt_max) << "\n";
  out << "max_momentum_drift " << num(stats.max_momentum_drift) << "\n";
  out << "max_energy_drift " << num(stats.max_energy_drift) << "\n";
  out << "min_temperature_source " << num(stats.min_temperature_source) << "\n";
  out << "lambda_initial " << num(stats.lambda_initial) << "\n";
  out << "lambda_final " << num(stats.lambda_final) << "\n";
  std::string histo;
  for (const auto& [iters, count] : stats.gst_iteration_histogram) {
    if (!histo.empty()) histo += ",";
    histo += std::to_string(iters) + ":" + std::to_string(count);
  }
  out << "gst_iterations_histogram " << (histo.empty() ? "-" : histo) << "\n";
  for (size_t i = 0; i < stats.mass_initial.size(); ++i) {
    const std::string& name = cfg.species[i].name;
    const double drift =
        std::abs(stats.mass_final[i] - stats.mass_initial[i]) / stats.mass_initial[i];
    out << "mass_initial_" << name << " " << num(stats.mass_initial[i]) << "\n";
    out << "mass_final_" << name << " " << num(stats.mass_final[i]) << "\n";
    out << "mass_drift_rel_" << name << " " << num(drift) << "\n";
  }
}

void write_config_copy(const std::string& path, const ScenarioConfig& cfg) {
  open_out(path) << canonical_text(cfg);
}

void write_sod_exact(const std::string& path, const ScenarioConfig& cfg, double time) {
  if (!cfg.overlay.enabled)
    throw Error(ErrorCategory::config_validate,
                "sod-exact requires a sod_overlay block in the scenario");
  const SpatialGrid grid = make_spatial_grid(cfg);
  auto out = open_out(path);
  out << "x\tn_exact\tu_exact\tT_exact\n";
  for (int k = 0; k < grid.cells(); ++k) {
    const double x = grid.center(k);
    const RiemannState ex = overlay_sample(cfg, x, time);
    out << num(x) << "\t" << num(ex.rho) << "\t" << num(ex.u) << "\t"
        << num(ex.p / ex.rho) << "\n";
  }
}

}  // namespace mbgk
