#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mbgk/gst.hpp"
#include "mbgk/kinetic.hpp"
#include "mbgk/transport.hpp"

namespace mbgk {

/// Scenario configuration, read from the plain-text format documented in the
/// README (format_version 1). Values are in whatever consistent unit system
/// the scenario declares; the solver is unit-agnostic.
struct ScenarioConfig {
  struct Species {
    std::string name;
    double mass = 0.0;
    double diameter = 0.0;
  };
  struct RegionInit {
    double density = 0.0;
    double velocity = 0.0;
    double temperature = 0.0;
  };
  struct Region {
    double x_from = 0.0, x_to = 0.0;
    std::vector<RegionInit> init;  // one entry per species, config order
  };
  struct Output {
    std::string directory = "out";
    int cadence = 0;  // snapshot every N steps; 0 = final state only
  };
  struct SodOverlay {
    bool enabled = false;
    double gamma = 5.0 / 3.0;
    double rho_l = 0, u_l = 0, p_l = 0;
    double rho_r = 0, u_r = 0, p_r = 0;
  };
  enum class Integrator { imex, explicit_rk };

  int format_version = 1;
  std::string title;
  std::vector<Species> species;
  double x_min = 0, x_max = 0;
  int nx = 0;
  double v_min = 0, v_max = 0;
  int nv = 0;
  BoundaryKind boundary = BoundaryKind::periodic;
  std::optional<double> epsilon;
  std::optional<double> t_final;
  std::optional<Integrator> integrator;
  GstConfig gst;
  double density_floor = 0.0;  // applied at initialization only
  std::vector<Region> regions;
  Output output;
  SodOverlay overlay;
};

/// Parse without semantic validation; throws config_parse with line context.
ScenarioConfig parse_config(const std::string& text, const std::string& origin);

/// Semantic validation; returns one message per offending field (empty = valid).
std::vector<std::string> validate(const ScenarioConfig& cfg);

/// Read, parse and validate; throws config_parse or config_validate.
ScenarioConfig load_config(const std::string& path);

/// Canonical serialization: load_config(canonical_text(cfg)) reproduces cfg
/// byte-for-byte under re-serialization.
std::string canonical_text(const ScenarioConfig& cfg);

SpeciesSet make_species(const ScenarioConfig& cfg);
SpatialGrid make_spatial_grid(const ScenarioConfig& cfg);
VelocityGrid make_velocity_grid(const ScenarioConfig& cfg);

/// Piecewise-constant Maxwellian initialization of the Chu pair:
/// g = M^(1)(n, u, T/m), h = 2 (T/m) g, with the optional trace-density floor.
ChuState initial_state(const ScenarioConfig& cfg);

}  // namespace mbgk
