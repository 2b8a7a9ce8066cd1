// hkbnet: simulate and analyse networks of heterogeneous HKB oscillators.
//
//   hkbnet run      <config>   trajectory, phases, sync report and bounds
//   hkbnet sweep    <config>   one row per grid cell in sweep.csv
//   hkbnet bounds   <config>   bounds.csv only (a pilot run supplies p_M, v_M)
//   hkbnet validate <config>   structural diagnostics
//
// Exit status: 0 ok, 1 other failure, 2 invalid configuration, 3 divergence.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "hkbnet/csv.hpp"
#include "hkbnet/errors.hpp"
#include "hkbnet/runner.hpp"

namespace {

enum Exit { kOk = 0, kFailure = 1, kInvalidConfig = 2, kDiverged = 3 };

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<double> dt;
  std::optional<double> duration;
  unsigned threads = 0;
};

hkbnet::RunConfig load(const std::string& source, const Overrides& o) {
  hkbnet::RunConfig cfg = std::filesystem::exists(source) ? hkbnet::load_config(source)
                                                          : hkbnet::preset(source);
  if (o.seed) cfg.seed = *o.seed;
  if (o.out_dir) cfg.out_dir = *o.out_dir;
  if (o.dt) cfg.dt = *o.dt;
  if (o.duration) cfg.duration = *o.duration;
  return cfg;
}

void print_diagnostics(const std::vector<hkbnet::Diagnostic>& diags) {
  for (const auto& d : diags) {
    std::cerr << (d.severity == hkbnet::Diagnostic::Severity::Error ? "error: " : "warning: ") << d.field
              << ": " << d.message << '\n';
  }
}

int cmd_run(const hkbnet::RunConfig& cfg) {
  const auto result = hkbnet::run(cfg);
  hkbnet::write_run_outputs(result, cfg.out_dir);
  std::cout << "rho_g_mean " << hkbnet::csv::real(result.report.rho_g_mean) << "\nrho_g_std "
            << hkbnet::csv::real(result.report.rho_g_std) << '\n';
  if (result.report.entrainment) {
    std::cout << "rho_E_mean " << hkbnet::csv::real(result.report.entrainment->mean) << '\n';
  }
  std::cout << "wrote " << cfg.out_dir.string() << '\n';
  return kOk;
}

int cmd_sweep(const hkbnet::RunConfig& cfg, unsigned threads) {
  const auto diags = hkbnet::validate_config(cfg);
  if (hkbnet::has_errors(diags)) {
    print_diagnostics(diags);
    return kInvalidConfig;
  }
  const auto result = hkbnet::sweep(cfg, threads);
  std::filesystem::create_directories(cfg.out_dir);
  hkbnet::write_sweep_csv(result, cfg.out_dir / "sweep.csv");
  std::size_t failed = 0;
  for (const auto& c : result.cells) failed += c.status != "ok";
  std::cout << result.cells.size() << " cells, " << failed << " failed\nwrote "
            << (cfg.out_dir / "sweep.csv").string() << '\n';
  return kOk;
}

int cmd_bounds(const hkbnet::RunConfig& cfg) {
  const auto result = hkbnet::run(cfg);
  std::filesystem::create_directories(cfg.out_dir);
  hkbnet::write_bounds_csv(result.bounds, cfg.out_dir / "bounds.csv");
  for (const auto& [name, value] : result.bounds.rows) {
    std::cout << name << ' ' << hkbnet::csv::real(value) << '\n';
  }
  return kOk;
}

int cmd_validate(const hkbnet::RunConfig& cfg) {
  const auto diags = hkbnet::validate_config(cfg);
  print_diagnostics(diags);
  if (hkbnet::has_errors(diags)) return kInvalidConfig;
  std::cout << "ok\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heterogeneous HKB oscillator networks"};
  app.require_subcommand(1);

  Overrides o;
  std::string source;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", source, "YAML config file or preset name")->required();
    sub->add_option("--seed", o.seed, "Master seed");
    sub->add_option("--out-dir", o.out_dir, "Output directory");
    sub->add_option("--dt", o.dt, "Step size in seconds")->check(CLI::PositiveNumber);
    sub->add_option("--duration", o.duration, "Simulated time in seconds")->check(CLI::PositiveNumber);
  };
  auto* run = app.add_subcommand("run", "Simulate one configuration and write all outputs");
  auto* sweep = app.add_subcommand("sweep", "Run every cell of the configured grid");
  auto* bounds = app.add_subcommand("bounds", "Evaluate the synchronization bounds");
  auto* validate = app.add_subcommand("validate", "Check a configuration");
  for (auto* sub : {run, sweep, bounds, validate}) add_common(sub);
  sweep->add_option("--threads", o.threads, "Worker threads (0: all cores)");

  auto* presets = app.add_subcommand("presets", "List built-in presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (presets->parsed()) {
      for (const auto& name : hkbnet::preset_names()) std::cout << name << '\n';
      return kOk;
    }
    const auto cfg = load(source, o);
    if (run->parsed()) return cmd_run(cfg);
    if (sweep->parsed()) return cmd_sweep(cfg, o.threads);
    if (bounds->parsed()) return cmd_bounds(cfg);
    return cmd_validate(cfg);
  } catch (const hkbnet::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return kInvalidConfig;
  } catch (const hkbnet::DivergenceError& e) {
    std::cerr << e.what() << '\n';
    return kDiverged;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
}
