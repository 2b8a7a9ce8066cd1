#include "hkbnet/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

#include "hkbnet/csv.hpp"
#include "hkbnet/errors.hpp"

namespace hkbnet {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Fraction of the run, counted from the end, over which "late-time" eta is taken.
constexpr double kLateFraction = 0.25;

double flag(bool b) { return b ? 1.0 : 0.0; }

std::vector<double> initial_state(const RunConfig& cfg) {
  std::vector<double> x0;
  x0.reserve(2 * cfg.initial.size());
  for (const auto& s : cfg.initial) {
    x0.push_back(s.pos);
    x0.push_back(s.vel);
  }
  return x0;
}

void throw_if_invalid(const RunConfig& cfg) {
  for (const auto& d : validate_config(cfg)) {
    if (d.severity == Diagnostic::Severity::Error) throw ConfigError(d.field, d.message);
  }
}

double late_eta_max(const Trajectory& traj) {
  if (traj.nodes() < 2) return kNaN;
  const auto eta = tracking_error_norm(traj);
  const auto first = static_cast<std::size_t>(std::floor((1.0 - kLateFraction) * static_cast<double>(eta.size() - 1)));
  return *std::max_element(eta.begin() + static_cast<std::ptrdiff_t>(first), eta.end());
}

BoundsReport bounds_rows(const RunConfig& cfg, const Topology* topology, const Trajectory& pilot) {
  BoundsReport r;
  auto add = [&](std::string name, double v) { r.rows.emplace_back(std::move(name), v); };

  const std::size_t n = cfg.params.size();
  const auto ext = state_extrema(pilot);
  const double mb = m_bar(cfg.params, ext.p_max, ext.v_max);
  const auto avg = average_params(cfg.params);
  const auto* fsc = std::get_if<FullStateCoupling>(&cfg.protocol);
  const double c = fsc ? fsc->c : kNaN;

  add("n", static_cast<double>(n));
  add("topology_complete", topology ? flag(topology->is_complete()) : kNaN);

  double lambda2_ln = kNaN;
  if (topology) {
    add("lambda2_L", spectrum(laplacian(*topology)).lambda2);
    const auto ln = normalized_neighbor_spectrum(*topology);
    lambda2_ln = ln.lambda2;
    add("lambda2_LN", lambda2_ln);
    add("kron_lambda2", kron_lambda2(ln.eigenvalues, cfg.bounds.gamma_shape.d1, cfg.bounds.gamma_shape.d2));
  } else {
    add("lambda2_L", kNaN);
    add("lambda2_LN", kNaN);
    add("kron_lambda2", kNaN);
  }

  add("p_M", ext.p_max);
  add("v_M", ext.v_max);
  add("M_bar", mb);
  add("alpha_t", avg.alpha);
  add("beta_t", avg.beta);
  add("gamma_t", avg.gamma);
  add("omega_t", avg.omega);
  add("c", c);

  // Contraction window (unweighted complete graph, full-state coupling).
  const double z1 = cfg.bounds.z1_max.value_or(ext.p_max);
  const double z2 = cfg.bounds.z2_max.value_or(ext.v_max);
  add("z1_max", z1);
  add("z2_max", z2);
  if (n >= 2 && z1 > 0.0 && z2 > 0.0) {
    const auto w = contraction_window(avg, z1, z2, n);
    add("c_lo", w.c_lo);
    add("c_hi", w.c_hi);
    add("window_feasible", flag(w.feasible));
    add("c_lo_limit", w.c_lo_limit);
    add("c_hi_limit", w.c_hi_limit);
    add("window_feasible_limit", flag(w.feasible_limit));
    add("c_in_window", fsc ? flag(w.feasible && c > w.c_lo && c < w.c_hi) : kNaN);
  } else {
    for (const char* q : {"c_lo", "c_hi", "window_feasible", "c_lo_limit", "c_hi_limit", "window_feasible_limit",
                          "c_in_window"}) {
      add(q, kNaN);
    }
  }

  // QUAD-affine certificate.
  bool homogeneous = false;
  double gamma = kNaN;
  try {
    gamma = common_gamma(cfg.params);
    homogeneous = true;
  } catch (const BoundInapplicable&) {
  }
  add("gamma_homogeneous", flag(homogeneous));

  double c_bar = kNaN;
  double c_bar_inf = kNaN;
  double eps = kNaN;
  if (cfg.bounds.quad && homogeneous && topology && lambda2_ln > kZeroEigenvalueTol) {
    const auto& b = cfg.bounds;
    const Diag2 w{b.w11, b.w22.value_or(gamma * b.p.d2)};
    try {
      c_bar = quad_cbar(lambda2_ln, b.p, w, b.gamma_shape);
      c_bar_inf = quad_cbar_infimum(lambda2_ln, gamma, b.gamma_shape);
      if (fsc) eps = quad_epsilon(c, lambda2_ln, b.p, w, b.gamma_shape, mb, n);
    } catch (const BoundInapplicable&) {
    }
  }
  add("c_bar", c_bar);
  add("c_bar_infimum", c_bar_inf);
  add("epsilon", eps);
  add("eta_late_max", late_eta_max(pilot));
  return r;
}

}  // namespace

double BoundsReport::get(std::string_view quantity) const {
  for (const auto& [name, value] : rows) {
    if (name == quantity) return value;
  }
  throw InvalidArgument("no bounds quantity '" + std::string(quantity) + "'");
}

BoundsReport compute_bounds(const RunConfig& cfg, const Topology& topology, const Trajectory& pilot) {
  return bounds_rows(cfg, &topology, pilot);
}

RunResult run(const RunConfig& cfg) {
  throw_if_invalid(cfg);
  const NetworkModel model = build_model(cfg);
  const auto x0 = initial_state(cfg);

  RunResult result{cfg, integrate(model, x0, cfg.duration, cfg.dt), {}, {}, {}};
  result.phases = extract_phases(result.trajectory);
  result.report = compute_sync_report(result.trajectory, result.phases, cfg.entrainment);
  result.bounds = bounds_rows(cfg, model.topology ? &*model.topology : nullptr, result.trajectory);
  return result;
}

void write_bounds_csv(const BoundsReport& bounds, const std::filesystem::path& file) {
  auto out = csv::open(file);
  out << "quantity,value\n";
  for (const auto& [name, value] : bounds.rows) out << name << ',' << csv::real(value) << '\n';
}

void write_run_outputs(const RunResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto& traj = result.trajectory;
  const auto& ph = result.phases;
  const auto& rep = result.report;
  const std::size_t n = traj.nodes();

  {
    auto out = csv::open(dir / "trajectory.csv");
    if (result.config.trajectory_format == TrajectoryFormat::Long) {
      out << "t,node,pos,vel\n";
      for (std::size_t j = 0; j < traj.samples(); ++j) {
        const std::string t = csv::real(traj.time(j));
        for (std::size_t i = 0; i < n; ++i) {
          out << t << ',' << i + 1 << ',' << csv::real(traj.pos(j, i)) << ',' << csv::real(traj.vel(j, i)) << '\n';
        }
      }
    } else {
      out << 't';
      for (std::size_t i = 0; i < n; ++i) out << ",pos_" << i + 1 << ",vel_" << i + 1;
      out << '\n';
      for (std::size_t j = 0; j < traj.samples(); ++j) {
        out << csv::real(traj.time(j));
        for (std::size_t i = 0; i < n; ++i) out << ',' << csv::real(traj.pos(j, i)) << ',' << csv::real(traj.vel(j, i));
        out << '\n';
      }
    }
  }
  {
    auto out = csv::open(dir / "phases.csv");
    out << "t,node,theta\n";
    for (std::size_t j = 0; j < ph.samples(); ++j) {
      const std::string t = csv::real(ph.time(j));
      for (std::size_t i = 0; i < n; ++i) out << t << ',' << i + 1 << ',' << csv::real(ph(j, i)) << '\n';
    }
  }
  {
    auto out = csv::open(dir / "sync_report.csv");
    out << "metric,node_or_pair,value\n";
    for (std::size_t k = 0; k < rep.rho_k.size(); ++k) out << "rho_k," << k + 1 << ',' << csv::real(rep.rho_k[k]) << '\n';
    out << "rho_g_mean,all," << csv::real(rep.rho_g_mean) << '\n';
    out << "rho_g_std,all," << csv::real(rep.rho_g_std) << '\n';
    for (std::size_t a = 0; a < rep.dyadic.size(); ++a) {
      for (std::size_t b = a + 1; b < rep.dyadic.size(); ++b) {
        out << "rho_d," << a + 1 << '-' << b + 1 << ',' << csv::real(rep.dyadic[a][b]) << '\n';
      }
    }
    if (rep.entrainment) {
      for (std::size_t k = 0; k < rep.entrainment->per_node.size(); ++k) {
        out << "rho_E," << k + 1 << ',' << csv::real(rep.entrainment->per_node[k]) << '\n';
      }
      out << "rho_E_mean,all," << csv::real(rep.entrainment->mean) << '\n';
    }
    out << "indeterminate_samples,all," << rep.indeterminate_samples << '\n';
  }
  {
    auto out = csv::open(dir / "rho_g_series.csv");
    out << "t,rho_g\n";
    for (std::size_t j = 0; j < rep.rho_g_series.size(); ++j) {
      out << csv::real(ph.time(j)) << ',' << csv::real(rep.rho_g_series[j]) << '\n';
    }
  }
  {
    auto out = csv::open(dir / "eta_series.csv");
    out << "t,eta\n";
    for (std::size_t j = 0; j < rep.eta_series.size(); ++j) {
      out << csv::real(traj.time(j)) << ',' << csv::real(rep.eta_series[j]) << '\n';
    }
  }
  write_bounds_csv(result.bounds, dir / "bounds.csv");
}

std::uint64_t derive_cell_seed(std::uint64_t master, std::uint64_t index) {
  // splitmix64 finaliser over the combined key.
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

// A zero strength in a sweep cell means "uncoupled".
void normalize_protocol(RunConfig& cfg) {
  const bool off = std::visit(
      [](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, FullStateCoupling> || std::is_same_v<T, HkbCoupling>) {
          return p.c == 0.0;
        } else if constexpr (std::is_same_v<T, PartialStateCoupling>) {
          return p.c1 == 0.0 && p.c2 == 0.0;
        } else {
          return false;
        }
      },
      cfg.protocol);
  if (off) cfg.protocol = NoCoupling{};
}

SweepCell run_cell(const RunConfig& base, const std::optional<Topology>& topology,
                   const std::vector<double>& values, std::uint64_t seed) {
  SweepCell cell;
  cell.values = values;
  cell.seed = seed;
  cell.rho_g_mean = kNaN;
  cell.rho_g_std = kNaN;
  cell.rho_e = kNaN;

  RunConfig cfg = base;
  cfg.sweep.clear();
  try {
    for (std::size_t a = 0; a < values.size(); ++a) set_scalar_field(cfg, base.sweep[a].field, values[a]);
    normalize_protocol(cfg);
    throw_if_invalid(cfg);
    NetworkModel model;
    model.params = cfg.params;
    model.topology = topology;
    model.protocol = cfg.protocol;
    model.entrainment = cfg.entrainment;
    const auto traj = integrate(model, initial_state(cfg), cfg.duration, cfg.dt);
    const auto phases = extract_phases(traj);
    const auto rel = agent_relative_phase(phases);
    const auto summary = group_sync_summary(group_sync_series(rel));
    cell.rho_g_mean = summary.mean;
    cell.rho_g_std = summary.std;
    if (cfg.entrainment.enabled && cfg.entrainment.amplitude != 0.0) {
      cell.rho_e = entrainment_index(phases, cfg.entrainment).mean;
    }
  } catch (const DivergenceError& e) {
    cell.status = "diverged at step " + std::to_string(e.step());
  } catch (const Error& e) {
    cell.status = std::string("failed: ") + e.what();
  }
  return cell;
}

}  // namespace

SweepResult sweep(const RunConfig& cfg, unsigned threads) {
  if (cfg.sweep.empty()) throw ConfigError("sweep", "no sweep axes configured");
  if (cfg.sweep.size() > 2) throw ConfigError("sweep", "at most two axes are supported");
  for (const auto& axis : cfg.sweep) {
    if (axis.values.empty()) throw ConfigError("sweep", "axis '" + axis.field + "' has no values");
  }

  SweepResult result;
  for (const auto& axis : cfg.sweep) result.axes.push_back(axis.field);

  std::vector<std::vector<double>> grid;
  if (cfg.sweep.size() == 1) {
    for (double v : cfg.sweep[0].values) grid.push_back({v});
  } else {
    for (double v0 : cfg.sweep[0].values)
      for (double v1 : cfg.sweep[1].values) grid.push_back({v0, v1});
  }

  // One graph realization, drawn from the master seed, is shared by all cells.
  std::optional<Topology> topology;
  if (cfg.params.size() >= 2) topology = build_topology(cfg);

  result.cells.resize(grid.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(grid.size()));

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < grid.size(); k = next++) {
      result.cells[k] = run_cell(cfg, topology, grid[k], derive_cell_seed(cfg.seed, k));
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < threads; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return result;
}

void write_sweep_csv(const SweepResult& result, const std::filesystem::path& file) {
  auto out = csv::open(file);
  for (const auto& a : result.axes) out << a << ',';
  out << "seed,rho_g_mean,rho_g_std,rho_E,status\n";
  for (const auto& cell : result.cells) {
    for (double v : cell.values) out << csv::real(v) << ',';
    out << cell.seed << ',' << csv::real(cell.rho_g_mean) << ',' << csv::real(cell.rho_g_std) << ','
        << csv::real(cell.rho_e) << ',' << cell.status << '\n';
  }
}

}  // namespace hkbnet
