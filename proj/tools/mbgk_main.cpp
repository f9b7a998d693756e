// Command-line front end: run scenarios, validate configs, and emit the exact
// Riemann reference profile.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "mbgk/errors.hpp"
#include "mbgk/output.hpp"
#include "mbgk/runner.hpp"

namespace fs = std::filesystem;
using namespace mbgk;

namespace {

int exit_code_for(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::config_parse: return 2;
    case ErrorCategory::config_validate: return 3;
    case ErrorCategory::io: return 4;
    default: return 5;
  }
}

std::string resolve_output_dir(const ScenarioConfig& cfg, const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("MBGK_OUTPUT_DIR"); env && *env) return env;
  return cfg.output.directory;
}

int cmd_run(const std::string& config_path, const std::string& out_flag, int threads,
            int verbosity) {
  ScenarioConfig cfg = load_config(config_path);
  const std::string out_dir = resolve_output_dir(cfg, out_flag);
  fs::create_directories(out_dir);

  RunOptions opt;
  opt.threads = threads;
  opt.verbosity = verbosity;

  SnapshotCallback snapshot = [&](long step, double t, const ChuState& st) {
    char name[64];
    std::snprintf(name, sizeof(name), "profile_%08ld.tsv", step);
    write_profile((fs::path(out_dir) / name).string(), cfg, st, t);
    if (verbosity > 0)
      std::cout << "snapshot step=" << step << " t=" << t << "\n";
  };

  const RunResult result = run(cfg, opt, snapshot);

  write_profile((fs::path(out_dir) / "profile_final.tsv").string(), cfg, result.state,
                result.stats.t_reached);
  write_summary((fs::path(out_dir) / "summary.txt").string(), cfg, config_path,
                result.stats);
  write_config_copy((fs::path(out_dir) / "config.cfg").string(), cfg);

  if (verbosity >= 0)
    std::cout << "completed " << result.stats.steps << " steps to t = "
              << result.stats.t_reached << " in " << result.stats.wall_seconds
              << " s; outputs in " << out_dir << "\n";
  return 0;
}

int cmd_validate(const std::string& config_path) {
  std::ifstream in(config_path);
  if (!in) throw Error(ErrorCategory::io, "cannot open config file: " + config_path);
  std::stringstream buf;
  buf << in.rdbuf();
  const ScenarioConfig cfg = parse_config(buf.str(), config_path);
  const auto errors = validate(cfg);
  if (errors.empty()) {
    std::cout << config_path << ": valid\n";
    return 0;
  }
  for (const auto& e : errors) std::cerr << config_path << ": " << e << "\n";
  return exit_code_for(ErrorCategory::config_validate);
}

int cmd_sod_exact(const std::string& config_path, const std::string& out_flag) {
  ScenarioConfig cfg = load_config(config_path);
  const std::string out_dir = resolve_output_dir(cfg, out_flag);
  fs::create_directories(out_dir);
  const std::string path = (fs::path(out_dir) / "sod_exact.tsv").string();
  write_sod_exact(path, cfg, *cfg.t_final);
  std::cout << "wrote " << path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-species BGK slab solver"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  int threads = 0;
  int verbosity = 0;

  auto add_common = [&](CLI::App* sub, bool with_outputs) {
    sub->add_option("config", config_path, "scenario config file")->required();
    if (with_outputs) {
      sub->add_option("-o,--output-dir", out_dir,
                      "output directory (overrides MBGK_OUTPUT_DIR and the config)");
    }
  };

  CLI::App* run_cmd = app.add_subcommand("run", "advance a scenario to t_final");
  add_common(run_cmd, true);
  run_cmd->add_option("--threads", threads, "data-parallel width (0 = auto)");
  run_cmd->add_flag_function("-v,--verbose", [&](int n) { verbosity = n; },
                             "per-snapshot progress output");

  CLI::App* validate_cmd = app.add_subcommand("validate", "check a config file");
  add_common(validate_cmd, false);

  CLI::App* sod_cmd =
      app.add_subcommand("sod-exact", "emit the exact Riemann profile for a scenario");
  add_common(sod_cmd, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(run_cmd)) return cmd_run(config_path, out_dir, threads, verbosity);
    if (app.got_subcommand(validate_cmd)) return cmd_validate(config_path);
    if (app.got_subcommand(sod_cmd)) return cmd_sod_exact(config_path, out_dir);
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.category()) << ": " << e.what() << "\n";
    return exit_code_for(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 5;
  }
  return 1;
}
