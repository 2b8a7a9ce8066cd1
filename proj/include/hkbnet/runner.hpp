#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hkbnet/bounds.hpp"
#include "hkbnet/dynamics.hpp"
#include "hkbnet/graph.hpp"
#include "hkbnet/metrics.hpp"
#include "hkbnet/phase.hpp"

namespace hkbnet {

struct TopologySpec {
  enum class Kind { Complete, Random, Inline };
  Kind kind = Kind::Complete;
  std::size_t n = 0;       // complete / random
  double weight = 1.0;     // complete
  double edge_prob = 0.6;  // random
  double weight_lo = 0.0;
  double weight_hi = 2.0;
  std::optional<Matrix> weights;  // inline
};

struct BoundsSpec {
  bool quad = true;
  Diag2 p{1.0, 1.0};
  double w11 = 1e-3;
  std::optional<double> w22;  // face-value override of gamma * P22
  Diag2 gamma_shape{1.0, 1.0};
  std::optional<double> z1_max;  // default: p_M of the run
  std::optional<double> z2_max;  // default: v_M of the run
};

struct SweepAxis {
  std::string field;
  std::vector<double> values;
};

enum class TrajectoryFormat { Long, Wide };

struct RunConfig {
  std::string name = "custom";
  TopologySpec topology;
  std::vector<OscillatorParams> params;
  std::vector<NodeState> initial;
  CouplingProtocol protocol = NoCoupling{};
  Entrainment entrainment;
  double duration = 200.0;
  double dt = 0.01;
  std::uint64_t seed = 1;
  std::filesystem::path out_dir = "out";
  TrajectoryFormat trajectory_format = TrajectoryFormat::Long;
  BoundsSpec bounds;
  std::vector<SweepAxis> sweep;
};

// ---------------------------------------------------------------------------
// Presets and fixtures
// ---------------------------------------------------------------------------

/// Six heterogeneous nodes of the rocking-chair replication.
[[nodiscard]] std::vector<OscillatorParams> rocking6_params();
[[nodiscard]] std::vector<NodeState> rocking6_initial();
/// Five nodes with a common gamma, used for the bound validation.
[[nodiscard]] std::vector<OscillatorParams> validation5_params();
[[nodiscard]] std::vector<NodeState> validation5_initial();
/// Weighted 5-node graph (6 edges, weights in (0, 2)) with lambda2(L_N) = 0.4112.
[[nodiscard]] Matrix validation5_weights();

[[nodiscard]] std::vector<std::string> preset_names();
/// Throws ConfigError for an unknown name.
[[nodiscard]] RunConfig preset(std::string_view name);

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

/// Parses a YAML run configuration. A top-level `preset:` key selects the
/// base configuration that the remaining keys override. Throws ConfigError
/// with the offending field and line.
[[nodiscard]] RunConfig parse_config(std::string_view text);
[[nodiscard]] RunConfig load_config(const std::filesystem::path& path);

/// Sets a scalar field addressed as `section.key` (e.g. `coupling.c2`,
/// `entrainment.frequency`). Setting an entrainment field enables the drive.
void set_scalar_field(RunConfig& cfg, std::string_view field, double value);

struct Diagnostic {
  enum class Severity { Warning, Error };
  Severity severity = Severity::Error;
  std::string field;
  std::string message;
};

/// Structural checks; never throws.
[[nodiscard]] std::vector<Diagnostic> validate_config(const RunConfig& cfg);
[[nodiscard]] bool has_errors(const std::vector<Diagnostic>& diags);

[[nodiscard]] Topology build_topology(const RunConfig& cfg);
[[nodiscard]] NetworkModel build_model(const RunConfig& cfg);

// ---------------------------------------------------------------------------
// Running
// ---------------------------------------------------------------------------

/// Ordered `quantity,value` rows; NaN marks a quantity that does not apply.
struct BoundsReport {
  std::vector<std::pair<std::string, double>> rows;

  [[nodiscard]] double get(std::string_view quantity) const;
};

[[nodiscard]] BoundsReport compute_bounds(const RunConfig& cfg, const Topology& topology,
                                          const Trajectory& pilot);

struct RunResult {
  RunConfig config;
  Trajectory trajectory;
  PhaseSeries phases;
  SyncReport report;
  BoundsReport bounds;
};

/// Simulates and analyses one configuration. Throws ConfigError when
/// validation reports errors and DivergenceError when integration fails.
[[nodiscard]] RunResult run(const RunConfig& cfg);

/// Writes trajectory.csv, phases.csv, sync_report.csv, rho_g_series.csv,
/// eta_series.csv and bounds.csv into `dir`.
void write_run_outputs(const RunResult& result, const std::filesystem::path& dir);
void write_bounds_csv(const BoundsReport& bounds, const std::filesystem::path& file);

struct SweepCell {
  std::vector<double> values;  // one per axis
  std::uint64_t seed = 0;
  double rho_g_mean = 0.0;
  double rho_g_std = 0.0;
  double rho_e = 0.0;  // NaN without entrainment
  std::string status = "ok";
};

struct SweepResult {
  std::vector<std::string> axes;
  std::vector<SweepCell> cells;  // row-major over the axes
};

/// Per-cell seed derived from the master seed and the cell index.
[[nodiscard]] std::uint64_t derive_cell_seed(std::uint64_t master, std::uint64_t index);

/// Runs every cell of the (at most two-axis) grid. Cells are independent and
/// may run on `threads` workers; results are in grid order regardless.
/// A diverging cell is recorded and the sweep continues.
[[nodiscard]] SweepResult sweep(const RunConfig& cfg, unsigned threads = 0);
void write_sweep_csv(const SweepResult& result, const std::filesystem::path& file);

}  // namespace hkbnet
