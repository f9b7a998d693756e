#include "mbgk/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mbgk/errors.hpp"

namespace mbgk {

namespace {

struct Token {
  std::string text;
  int line;
  bool quoted;
};

std::vector<Token> tokenize(const std::string& text, const std::string& origin) {
  std::vector<Token> out;
  int line = 1;
  size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n') {
      ++line;
      ++i;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
    } else if (c == '{' || c == '}') {
      out.push_back({std::string(1, c), line, false});
      ++i;
    } else if (c == '"') {
      const size_t start = ++i;
      while (i < text.size() && text[i] != '"' && text[i] != '\n') ++i;
      if (i >= text.size() || text[i] != '"')
        throw Error(ErrorCategory::config_parse,
                    origin + ":" + std::to_string(line) + ": unterminated string");
      out.push_back({text.substr(start, i - start), line, true});
      ++i;
    } else {
      const size_t start = i;
      while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) &&
             text[i] != '{' && text[i] != '}' && text[i] != '#')
        ++i;
      out.push_back({text.substr(start, i - start), line, false});
    }
  }
  return out;
}

class Parser {
public:
  Parser(std::vector<Token> tokens, std::string origin)
      : tokens_(std::move(tokens)), origin_(std::move(origin)) {}

  bool done() const { return pos_ >= tokens_.size(); }

  const Token& peek() const {
    if (done()) fail_at_end("unexpected end of file");
    return tokens_[pos_];
  }

  Token next() {
    const Token& t = peek();
    ++pos_;
    return t;
  }

  std::string word(const char* what) {
    const Token t = next();
    if (t.text == "{" || t.text == "}")
      fail(t, std::string("expected ") + what + ", got '" + t.text + "'");
    return t.text;
  }

  double number(const char* what) {
    const Token t = next();
    char* end = nullptr;
    const double v = std::strtod(t.text.c_str(), &end);
    if (t.quoted || end == t.text.c_str() || *end != '\0')
      fail(t, std::string("expected a number for ") + what + ", got '" + t.text + "'");
    return v;
  }

  int integer(const char* what) {
    const double v = number(what);
    const int iv = static_cast<int>(v);
    if (static_cast<double>(iv) != v)
      fail(tokens_[pos_ - 1], std::string("expected an integer for ") + what);
    return iv;
  }

  void expect(const char* tok) {
    const Token t = next();
    if (t.text != tok) fail(t, std::string("expected '") + tok + "', got '" + t.text + "'");
  }

  [[noreturn]] void fail(const Token& t, const std::string& msg) const {
    throw Error(ErrorCategory::config_parse,
                origin_ + ":" + std::to_string(t.line) + ": " + msg);
  }

  [[noreturn]] void fail_at_end(const std::string& msg) const {
    throw Error(ErrorCategory::config_parse, origin_ + ": " + msg);
  }

private:
  std::vector<Token> tokens_;
  std::string origin_;
  size_t pos_ = 0;
};

int species_index(const ScenarioConfig& cfg, const std::string& name) {
  for (size_t i = 0; i < cfg.species.size(); ++i)
    if (cfg.species[i].name == name) return static_cast<int>(i);
  return -1;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

ScenarioConfig parse_config(const std::string& text, const std::string& origin) {
  Parser p(tokenize(text, origin), origin);
  ScenarioConfig cfg;

  while (!p.done()) {
    const Token key = p.next();
    if (key.text == "format_version") {
      cfg.format_version = p.integer("format_version");
    } else if (key.text == "title") {
      cfg.title = p.word("title");
    } else if (key.text == "species") {
      ScenarioConfig::Species s;
      s.name = p.word("species name");
      p.expect("{");
      while (p.peek().text != "}") {
        const Token k = p.next();
        if (k.text == "mass") s.mass = p.number("mass");
        else if (k.text == "diameter") s.diameter = p.number("diameter");
        else p.fail(k, "unknown species key '" + k.text + "'");
      }
      p.expect("}");
      cfg.species.push_back(s);
    } else if (key.text == "grid") {
      p.expect("{");
      while (p.peek().text != "}") {
        const Token k = p.next();
        if (k.text == "x") {
          cfg.x_min = p.number("x range");
          cfg.x_max = p.number("x range");
          cfg.nx = p.integer("nx");
        } else if (k.text == "v") {
          cfg.v_min = p.number("v range");
          cfg.v_max = p.number("v range");
          cfg.nv = p.integer("nv");
        } else if (k.text == "boundary") {
          const std::string b = p.word("boundary kind");
          if (b == "periodic") cfg.boundary = BoundaryKind::periodic;
          else if (b == "reflective") cfg.boundary = BoundaryKind::reflective;
          else p.fail(k, "boundary must be 'periodic' or 'reflective'");
        } else {
          p.fail(k, "unknown grid key '" + k.text + "'");
        }
      }
      p.expect("}");
    } else if (key.text == "epsilon") {
      cfg.epsilon = p.number("epsilon");
    } else if (key.text == "t_final") {
      cfg.t_final = p.number("t_final");
    } else if (key.text == "density_floor") {
      cfg.density_floor = p.number("density_floor");
    } else if (key.text == "integrator") {
      const std::string v = p.word("integrator");
      if (v == "imex") cfg.integrator = ScenarioConfig::Integrator::imex;
      else if (v == "explicit") cfg.integrator = ScenarioConfig::Integrator::explicit_rk;
      else p.fail(key, "integrator must be 'imex' or 'explicit'");
    } else if (key.text == "gst") {
      p.expect("{");
      while (p.peek().text != "}") {
        const Token k = p.next();
        if (k.text == "tol") {
          if (p.peek().text == "auto") {
            p.next();
            cfg.gst.tol = -1.0;
          } else {
            cfg.gst.tol = p.number("gst tol");
          }
        } else if (k.text == "max_iter") {
          cfg.gst.max_iter = p.integer("gst max_iter");
        } else if (k.text == "contraction_target") {
          cfg.gst.contraction_target = p.number("gst contraction_target");
        } else {
          p.fail(k, "unknown gst key '" + k.text + "'");
        }
      }
      p.expect("}");
    } else if (key.text == "region") {
      ScenarioConfig::Region r;
      r.x_from = p.number("region start");
      r.x_to = p.number("region end");
      r.init.assign(cfg.species.size(), {});
      std::vector<bool> seen(cfg.species.size(), false);
      p.expect("{");
      while (p.peek().text != "}") {
        const Token name = p.next();
        const int idx = species_index(cfg, name.text);
        if (idx < 0) p.fail(name, "unknown species '" + name.text + "' in region");
        ScenarioConfig::RegionInit init;
        p.expect("{");
        while (p.peek().text != "}") {
          const Token k = p.next();
          if (k.text == "density") init.density = p.number("density");
          else if (k.text == "velocity") init.velocity = p.number("velocity");
          else if (k.text == "temperature") init.temperature = p.number("temperature");
          else p.fail(k, "unknown region key '" + k.text + "'");
        }
        p.expect("}");
        r.init[idx] = init;
        seen[idx] = true;
      }
      p.expect("}");
      for (size_t i = 0; i < seen.size(); ++i)
        if (!seen[i])
          throw Error(ErrorCategory::config_parse,
                      origin + ":" + std::to_string(key.line) + ": region misses species '" +
                          cfg.species[i].name + "'");
      cfg.regions.push_back(std::move(r));
    } else if (key.text == "output") {
      p.expect("{");
      while (p.peek().text != "}") {
        const Token k = p.next();
        if (k.text == "directory") cfg.output.directory = p.word("output directory");
        else if (k.text == "cadence") cfg.output.cadence = p.integer("output cadence");
        else p.fail(k, "unknown output key '" + k.text + "'");
      }
      p.expect("}");
    } else if (key.text == "sod_overlay") {
      cfg.overlay.enabled = true;
      p.expect("{");
      while (p.peek().text != "}") {
        const Token k = p.next();
        if (k.text == "gamma") cfg.overlay.gamma = p.number("gamma");
        else if (k.text == "left") {
          cfg.overlay.rho_l = p.number("left rho");
          cfg.overlay.u_l = p.number("left u");
          cfg.overlay.p_l = p.number("left p");
        } else if (k.text == "right") {
          cfg.overlay.rho_r = p.number("right rho");
          cfg.overlay.u_r = p.number("right u");
          cfg.overlay.p_r = p.number("right p");
        } else {
          p.fail(k, "unknown sod_overlay key '" + k.text + "'");
        }
      }
      p.expect("}");
    } else {
      p.fail(key, "unknown top-level key '" + key.text + "'");
    }
  }
  return cfg;
}

std::vector<std::string> validate(const ScenarioConfig& cfg) {
  std::vector<std::string> errors;
  auto err = [&](const std::string& field, const std::string& msg) {
    errors.push_back(field + ": " + msg);
  };

  if (cfg.format_version != 1) err("format_version", "unsupported version");
  if (cfg.species.empty()) err("species", "at least one species required");
  for (size_t i = 0; i < cfg.species.size(); ++i) {
    const auto& s = cfg.species[i];
    if (s.name.empty()) err("species", "unnamed species");
    if (!(s.mass > 0)) err("species " + s.name + ".mass", "must be positive");
    if (!(s.diameter > 0)) err("species " + s.name + ".diameter", "must be positive");
    for (size_t j = i + 1; j < cfg.species.size(); ++j)
      if (cfg.species[j].name == s.name) err("species " + s.name, "duplicate name");
  }

  if (cfg.nx < 4) err("grid.x", "need at least 4 spatial cells");
  if (!(cfg.x_max > cfg.x_min)) err("grid.x", "empty spatial range");
  if (cfg.nv < 2) err("grid.v", "need at least 2 velocity points");
  if (!(cfg.v_max > cfg.v_min)) err("grid.v", "empty velocity range");
  if (cfg.boundary == BoundaryKind::reflective &&
      std::abs(cfg.v_min + cfg.v_max) > 1e-12 * std::max(std::abs(cfg.v_min), std::abs(cfg.v_max)))
    err("grid.boundary", "reflective walls require a velocity grid symmetric about 0");

  if (!cfg.epsilon) err("epsilon", "missing");
  else if (!(*cfg.epsilon > 0)) err("epsilon", "must be positive");
  if (!cfg.t_final) err("t_final", "missing");
  else if (!(*cfg.t_final >= 0)) err("t_final", "must be nonnegative");
  if (!cfg.integrator) err("integrator", "missing");

  if (cfg.gst.max_iter < 1) err("gst.max_iter", "must be >= 1");
  if (!(cfg.gst.contraction_target > 0 && cfg.gst.contraction_target < 1))
    err("gst.contraction_target", "must lie in (0,1)");
  if (cfg.density_floor < 0) err("density_floor", "must be nonnegative");

  if (cfg.regions.empty()) {
    err("region", "at least one region required");
  } else {
    auto sorted = cfg.regions;
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return a.x_from < b.x_from; });
    const double tol = 1e-12 * (cfg.x_max - cfg.x_min);
    if (std::abs(sorted.front().x_from - cfg.x_min) > tol)
      err("region", "regions must start at the domain boundary");
    if (std::abs(sorted.back().x_to - cfg.x_max) > tol)
      err("region", "regions must end at the domain boundary");
    for (size_t i = 0; i + 1 < sorted.size(); ++i)
      if (std::abs(sorted[i].x_to - sorted[i + 1].x_from) > tol)
        err("region", "regions must tile the domain without gaps or overlaps");
    for (const auto& r : cfg.regions) {
      if (!(r.x_to > r.x_from)) err("region", "empty region");
      for (size_t i = 0; i < r.init.size(); ++i) {
        const double n_eff = std::max(r.init[i].density, cfg.density_floor);
        if (!(n_eff > 0))
          err("region." + cfg.species[i].name + ".density", "must be positive (or floored)");
        if (!(r.init[i].temperature > 0))
          err("region." + cfg.species[i].name + ".temperature", "must be positive");
      }
    }
  }

  if (cfg.overlay.enabled) {
    if (!(cfg.overlay.gamma > 1)) err("sod_overlay.gamma", "must exceed 1");
    if (!(cfg.overlay.rho_l > 0 && cfg.overlay.p_l > 0))
      err("sod_overlay.left", "density and pressure must be positive");
    if (!(cfg.overlay.rho_r > 0 && cfg.overlay.p_r > 0))
      err("sod_overlay.right", "density and pressure must be positive");
  }
  return errors;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCategory::io, "cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  ScenarioConfig cfg = parse_config(buf.str(), path);
  const auto errors = validate(cfg);
  if (!errors.empty()) {
    std::string joined = "invalid config " + path + ":";
    for (const auto& e : errors) joined += "\n  " + e;
    throw Error(ErrorCategory::config_validate, joined);
  }
  return cfg;
}

std::string canonical_text(const ScenarioConfig& cfg) {
  std::ostringstream os;
  os << "format_version " << cfg.format_version << "\n";
  if (!cfg.title.empty()) os << "title \"" << cfg.title << "\"\n";
  os << "\n";
  for (const auto& s : cfg.species)
    os << "species " << s.name << " { mass " << fmt(s.mass) << "  diameter "
       << fmt(s.diameter) << " }\n";
  os << "\ngrid {\n";
  os << "  x " << fmt(cfg.x_min) << " " << fmt(cfg.x_max) << " " << cfg.nx << "\n";
  os << "  v " << fmt(cfg.v_min) << " " << fmt(cfg.v_max) << " " << cfg.nv << "\n";
  os << "  boundary "
     << (cfg.boundary == BoundaryKind::periodic ? "periodic" : "reflective") << "\n";
  os << "}\n\n";
  if (cfg.epsilon) os << "epsilon " << fmt(*cfg.epsilon) << "\n";
  if (cfg.t_final) os << "t_final " << fmt(*cfg.t_final) << "\n";
  if (cfg.integrator)
    os << "integrator "
       << (*cfg.integrator == ScenarioConfig::Integrator::imex ? "imex" : "explicit")
       << "\n";
  if (cfg.density_floor != 0.0) os << "density_floor " << fmt(cfg.density_floor) << "\n";
  os << "\ngst {\n";
  if (cfg.gst.tol < 0)
    os << "  tol auto\n";
  else
    os << "  tol " << fmt(cfg.gst.tol) << "\n";
  os << "  max_iter " << cfg.gst.max_iter << "\n";
  os << "  contraction_target " << fmt(cfg.gst.contraction_target) << "\n";
  os << "}\n";
  for (const auto& r : cfg.regions) {
    os << "\nregion " << fmt(r.x_from) << " " << fmt(r.x_to) << " {\n";
    for (size_t i = 0; i < r.init.size(); ++i)
      os << "  " << cfg.species[i].name << " { density " << fmt(r.init[i].density)
         << "  velocity " << fmt(r.init[i].velocity) << "  temperature "
         << fmt(r.init[i].temperature) << " }\n";
    os << "}\n";
  }
  os << "\noutput {\n  directory " << cfg.output.directory << "\n  cadence "
     << cfg.output.cadence << "\n}\n";
  if (cfg.overlay.enabled) {
    os << "\nsod_overlay {\n";
    os << "  gamma " << fmt(cfg.overlay.gamma) << "\n";
    os << "  left " << fmt(cfg.overlay.rho_l) << " " << fmt(cfg.overlay.u_l) << " "
       << fmt(cfg.overlay.p_l) << "\n";
    os << "  right " << fmt(cfg.overlay.rho_r) << " " << fmt(cfg.overlay.u_r) << " "
       << fmt(cfg.overlay.p_r) << "\n";
    os << "}\n";
  }
  return os.str();
}

SpeciesSet make_species(const ScenarioConfig& cfg) {
  const int N = static_cast<int>(cfg.species.size());
  std::vector<std::string> names(N);
  VectorXd mass(N), diam(N);
  for (int i = 0; i < N; ++i) {
    names[i] = cfg.species[i].name;
    mass(i) = cfg.species[i].mass;
    diam(i) = cfg.species[i].diameter;
  }
  return SpeciesSet(std::move(names), std::move(mass), std::move(diam));
}

SpatialGrid make_spatial_grid(const ScenarioConfig& cfg) {
  return SpatialGrid(cfg.x_min, cfg.x_max, cfg.nx, cfg.boundary);
}

VelocityGrid make_velocity_grid(const ScenarioConfig& cfg) {
  return VelocityGrid(cfg.v_min, cfg.v_max, cfg.nv);
}

ChuState initial_state(const ScenarioConfig& cfg) {
  const SpatialGrid grid = make_spatial_grid(cfg);
  const VelocityGrid vgrid = make_velocity_grid(cfg);
  const int N = static_cast<int>(cfg.species.size());
  ChuState st = ChuState::zeros(N, vgrid.size(), grid.cells());

  for (int k = 0; k < grid.cells(); ++k) {
    const double x = grid.center(k);
    const ScenarioConfig::Region* region = nullptr;
    for (const auto& r : cfg.regions)
      if (x >= r.x_from && x <= r.x_to) {
        region = &r;
        break;
      }
    if (!region)
      throw Error(ErrorCategory::config_validate,
                  "no region covers cell center x = " + std::to_string(x));
    for (int i = 0; i < N; ++i) {
      const auto& init = region->init[i];
      const double n = std::max(init.density, cfg.density_floor);
      const double theta = init.temperature / cfg.species[i].mass;
      const VectorXd g = maxwellian_1d(n, init.velocity, theta, vgrid);
      st.g[i].col(k) = g.array();
      st.h[i].col(k) = 2.0 * theta * g.array();
    }
  }
  return st;
}

}  // namespace mbgk
