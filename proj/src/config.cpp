#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "hkbnet/errors.hpp"
#include "hkbnet/runner.hpp"

namespace hkbnet {

namespace {

int line_of(const YAML::Node& node) {
  const auto mark = node.Mark();
  return mark.is_null() ? 0 : mark.line + 1;
}

void expect_keys(const YAML::Node& map, const std::string& section, const std::set<std::string>& allowed) {
  if (!map.IsMap()) throw ConfigError(section, "expected a mapping", line_of(map));
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.contains(key)) {
      throw ConfigError(section.empty() ? key : section + "." + key, "unknown key", line_of(kv.first));
    }
  }
}

template <class T>
T scalar(const YAML::Node& node, const std::string& field) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(field, "invalid value", line_of(node));
  }
}

double real(const YAML::Node& node, const std::string& field) {
  const auto v = scalar<double>(node, field);
  if (!std::isfinite(v)) throw ConfigError(field, "must be finite", line_of(node));
  return v;
}

std::vector<double> real_list(const YAML::Node& node, const std::string& field) {
  if (!node.IsSequence()) throw ConfigError(field, "expected a list of numbers", line_of(node));
  std::vector<double> out;
  for (std::size_t i = 0; i < node.size(); ++i) {
    out.push_back(real(node[i], field + "[" + std::to_string(i) + "]"));
  }
  return out;
}

Diag2 diag2(const YAML::Node& node, const std::string& field) {
  const auto v = real_list(node, field);
  if (v.size() != 2) throw ConfigError(field, "expected two diagonal entries", line_of(node));
  return {v[0], v[1]};
}

Matrix parse_weights(const YAML::Node& node) {
  const std::string field = "topology.weights";
  std::vector<std::vector<double>> rows;
  if (node.IsSequence()) {
    for (std::size_t i = 0; i < node.size(); ++i) {
      rows.push_back(real_list(node[i], field + "[" + std::to_string(i) + "]"));
    }
  } else if (node.IsScalar()) {
    // Whitespace-separated rows, one per line.
    std::istringstream text(node.as<std::string>());
    std::string line;
    while (std::getline(text, line)) {
      std::istringstream cells(line);
      std::vector<double> row;
      std::string cell;
      while (cells >> cell) {
        try {
          std::size_t used = 0;
          row.push_back(std::stod(cell, &used));
          if (used != cell.size()) throw std::invalid_argument(cell);
        } catch (const std::exception&) {
          throw ConfigError(field, "bad matrix entry '" + cell + "'", line_of(node));
        }
      }
      if (!row.empty()) rows.push_back(std::move(row));
    }
  } else {
    throw ConfigError(field, "expected rows of numbers", line_of(node));
  }

  const std::size_t n = rows.size();
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n) {
      throw ConfigError(field, "row " + std::to_string(i + 1) + " has " + std::to_string(rows[i].size()) +
                                   " entries, expected " + std::to_string(n),
                        line_of(node));
    }
    for (std::size_t j = 0; j < n; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

void parse_topology(const YAML::Node& node, RunConfig& cfg) {
  expect_keys(node, "topology", {"kind", "n", "weight", "edge_prob", "weight_lo", "weight_hi", "weights"});
  auto& t = cfg.topology;
  if (node["kind"]) {
    const auto kind = scalar<std::string>(node["kind"], "topology.kind");
    if (kind == "complete") {
      t.kind = TopologySpec::Kind::Complete;
    } else if (kind == "random") {
      t.kind = TopologySpec::Kind::Random;
    } else if (kind == "inline") {
      t.kind = TopologySpec::Kind::Inline;
    } else {
      throw ConfigError("topology.kind", "expected complete, random or inline", line_of(node["kind"]));
    }
  }
  if (node["n"]) {
    const auto n = scalar<long>(node["n"], "topology.n");
    if (n < 2) throw ConfigError("topology.n", "must be at least 2", line_of(node["n"]));
    t.n = static_cast<std::size_t>(n);
  }
  if (node["weight"]) t.weight = real(node["weight"], "topology.weight");
  if (node["edge_prob"]) t.edge_prob = real(node["edge_prob"], "topology.edge_prob");
  if (node["weight_lo"]) t.weight_lo = real(node["weight_lo"], "topology.weight_lo");
  if (node["weight_hi"]) t.weight_hi = real(node["weight_hi"], "topology.weight_hi");
  if (node["weights"]) {
    t.weights = parse_weights(node["weights"]);
    if (!node["kind"]) t.kind = TopologySpec::Kind::Inline;
  }
  if (t.kind == TopologySpec::Kind::Inline && !t.weights) {
    throw ConfigError("topology.weights", "inline topology needs a weight matrix", line_of(node));
  }
}

void parse_nodes(const YAML::Node& node, RunConfig& cfg) {
  if (!node.IsSequence() || node.size() == 0) {
    throw ConfigError("nodes", "expected a nonempty list of nodes", line_of(node));
  }
  cfg.params.clear();
  cfg.initial.clear();
  for (std::size_t i = 0; i < node.size(); ++i) {
    const auto& nd = node[i];
    const std::string base = "nodes[" + std::to_string(i) + "]";
    expect_keys(nd, base, {"alpha", "beta", "gamma", "omega", "x0"});
    for (const char* key : {"alpha", "beta", "gamma", "omega"}) {
      if (!nd[key]) throw ConfigError(base + "." + key, "missing", line_of(nd));
    }
    OscillatorParams p{real(nd["alpha"], base + ".alpha"), real(nd["beta"], base + ".beta"),
                       real(nd["gamma"], base + ".gamma"), real(nd["omega"], base + ".omega")};
    NodeState x0{};
    if (nd["x0"]) {
      const auto v = real_list(nd["x0"], base + ".x0");
      if (v.size() != 2) throw ConfigError(base + ".x0", "expected [pos, vel]", line_of(nd["x0"]));
      x0 = {v[0], v[1]};
    }
    cfg.params.push_back(p);
    cfg.initial.push_back(x0);
  }
}

void parse_coupling(const YAML::Node& node, RunConfig& cfg) {
  expect_keys(node, "coupling", {"type", "c", "c1", "c2", "a", "b"});
  if (node["type"]) {
    const auto type = scalar<std::string>(node["type"], "coupling.type");
    if (type == "none") {
      cfg.protocol = NoCoupling{};
    } else if (type == "full") {
      cfg.protocol = FullStateCoupling{};
    } else if (type == "partial") {
      cfg.protocol = PartialStateCoupling{};
    } else if (type == "hkb") {
      cfg.protocol = HkbCoupling{};
    } else {
      throw ConfigError("coupling.type", "expected none, full, partial or hkb", line_of(node["type"]));
    }
  }
  for (const char* key : {"c", "c1", "c2", "a", "b"}) {
    if (node[key]) set_scalar_field(cfg, std::string("coupling.") + key, real(node[key], key));
  }
}

void parse_entrainment(const YAML::Node& node, RunConfig& cfg) {
  expect_keys(node, "entrainment", {"amplitude", "frequency", "enabled"});
  cfg.entrainment.enabled = true;
  if (node["amplitude"]) cfg.entrainment.amplitude = real(node["amplitude"], "entrainment.amplitude");
  if (node["frequency"]) cfg.entrainment.frequency = real(node["frequency"], "entrainment.frequency");
  if (node["enabled"]) cfg.entrainment.enabled = scalar<bool>(node["enabled"], "entrainment.enabled");
}

void parse_simulation(const YAML::Node& node, RunConfig& cfg) {
  expect_keys(node, "simulation", {"duration", "dt", "seed"});
  if (node["duration"]) cfg.duration = real(node["duration"], "simulation.duration");
  if (node["dt"]) cfg.dt = real(node["dt"], "simulation.dt");
  if (node["seed"]) cfg.seed = scalar<std::uint64_t>(node["seed"], "simulation.seed");
}

void parse_output(const YAML::Node& node, RunConfig& cfg) {
  expect_keys(node, "output", {"dir", "trajectory"});
  if (node["dir"]) cfg.out_dir = scalar<std::string>(node["dir"], "output.dir");
  if (node["trajectory"]) {
    const auto f = scalar<std::string>(node["trajectory"], "output.trajectory");
    if (f == "long") {
      cfg.trajectory_format = TrajectoryFormat::Long;
    } else if (f == "wide") {
      cfg.trajectory_format = TrajectoryFormat::Wide;
    } else {
      throw ConfigError("output.trajectory", "expected long or wide", line_of(node["trajectory"]));
    }
  }
}

void parse_bounds(const YAML::Node& node, RunConfig& cfg) {
  expect_keys(node, "bounds", {"quad", "P", "W11", "W22", "Gamma", "z1_max", "z2_max"});
  auto& b = cfg.bounds;
  if (node["quad"]) b.quad = scalar<bool>(node["quad"], "bounds.quad");
  if (node["P"]) b.p = diag2(node["P"], "bounds.P");
  if (node["W11"]) b.w11 = real(node["W11"], "bounds.W11");
  if (node["W22"]) b.w22 = real(node["W22"], "bounds.W22");
  if (node["Gamma"]) b.gamma_shape = diag2(node["Gamma"], "bounds.Gamma");
  if (node["z1_max"]) b.z1_max = real(node["z1_max"], "bounds.z1_max");
  if (node["z2_max"]) b.z2_max = real(node["z2_max"], "bounds.z2_max");
}

void parse_sweep(const YAML::Node& node, RunConfig& cfg) {
  if (!node.IsSequence()) throw ConfigError("sweep", "expected a list of axes", line_of(node));
  cfg.sweep.clear();
  for (std::size_t i = 0; i < node.size(); ++i) {
    const auto& ax = node[i];
    const std::string base = "sweep[" + std::to_string(i) + "]";
    expect_keys(ax, base, {"field", "values", "from", "to", "step"});
    if (!ax["field"]) throw ConfigError(base + ".field", "missing", line_of(ax));
    SweepAxis axis;
    axis.field = scalar<std::string>(ax["field"], base + ".field");
    if (ax["values"]) {
      axis.values = real_list(ax["values"], base + ".values");
    } else if (ax["from"] && ax["to"] && ax["step"]) {
      const double from = real(ax["from"], base + ".from");
      const double to = real(ax["to"], base + ".to");
      const double step = real(ax["step"], base + ".step");
      if (!(step > 0.0) || to < from) throw ConfigError(base, "range needs step > 0 and to >= from", line_of(ax));
      const auto count = static_cast<long>(std::floor((to - from) / step + 1e-9)) + 1;
      for (long k = 0; k < count; ++k) axis.values.push_back(from + static_cast<double>(k) * step);
    } else {
      throw ConfigError(base, "give either values or from/to/step", line_of(ax));
    }
    if (axis.values.empty()) throw ConfigError(base + ".values", "empty axis", line_of(ax));
    cfg.sweep.push_back(std::move(axis));
  }
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ConfigError("", e.msg, e.mark.line + 1);
  }
  if (root.IsNull()) throw ConfigError("", "empty configuration");
  expect_keys(root, "",
              {"preset", "name", "topology", "nodes", "coupling", "entrainment", "simulation", "output",
               "bounds", "sweep"});

  RunConfig cfg;
  if (root["preset"]) {
    const auto name = scalar<std::string>(root["preset"], "preset");
    try {
      cfg = preset(name);
    } catch (const ConfigError& e) {
      throw ConfigError("preset", e.what(), line_of(root["preset"]));
    }
  }
  if (root["name"]) cfg.name = scalar<std::string>(root["name"], "name");
  if (root["nodes"]) parse_nodes(root["nodes"], cfg);
  if (root["topology"]) parse_topology(root["topology"], cfg);
  if (root["coupling"]) parse_coupling(root["coupling"], cfg);
  if (root["entrainment"]) parse_entrainment(root["entrainment"], cfg);
  if (root["simulation"]) parse_simulation(root["simulation"], cfg);
  if (root["output"]) parse_output(root["output"], cfg);
  if (root["bounds"]) parse_bounds(root["bounds"], cfg);
  if (root["sweep"]) parse_sweep(root["sweep"], cfg);
  if (cfg.params.empty()) throw ConfigError("nodes", "no nodes given and no preset selected");
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void set_scalar_field(RunConfig& cfg, std::string_view field, double value) {
  auto bad_protocol = [&] {
    throw ConfigError(std::string(field), "not a parameter of the selected coupling protocol");
  };
  if (field == "coupling.c") {
    if (auto* p = std::get_if<FullStateCoupling>(&cfg.protocol)) {
      p->c = value;
    } else if (auto* h = std::get_if<HkbCoupling>(&cfg.protocol)) {
      h->c = value;
    } else {
      bad_protocol();
    }
  } else if (field == "coupling.c1" || field == "coupling.c2") {
    auto* p = std::get_if<PartialStateCoupling>(&cfg.protocol);
    if (!p) bad_protocol();
    (field == "coupling.c1" ? p->c1 : p->c2) = value;
  } else if (field == "coupling.a" || field == "coupling.b") {
    auto* h = std::get_if<HkbCoupling>(&cfg.protocol);
    if (!h) bad_protocol();
    (field == "coupling.a" ? h->a : h->b) = value;
  } else if (field == "entrainment.amplitude") {
    cfg.entrainment.amplitude = value;
    cfg.entrainment.enabled = true;
  } else if (field == "entrainment.frequency") {
    cfg.entrainment.frequency = value;
    cfg.entrainment.enabled = true;
  } else if (field == "simulation.duration") {
    cfg.duration = value;
  } else if (field == "simulation.dt") {
    cfg.dt = value;
  } else if (field == "topology.weight") {
    cfg.topology.weight = value;
  } else if (field == "topology.edge_prob") {
    cfg.topology.edge_prob = value;
  } else {
    throw ConfigError(std::string(field), "not a sweepable scalar field");
  }
}

namespace {

std::size_t topology_size(const RunConfig& cfg) {
  if (cfg.topology.kind == TopologySpec::Kind::Inline && cfg.topology.weights) {
    return cfg.topology.weights->rows();
  }
  return cfg.topology.n == 0 ? cfg.params.size() : cfg.topology.n;
}

}  // namespace

std::vector<Diagnostic> validate_config(const RunConfig& cfg) {
  std::vector<Diagnostic> out;
  auto error = [&](std::string field, std::string msg) {
    out.push_back({Diagnostic::Severity::Error, std::move(field), std::move(msg)});
  };
  auto warning = [&](std::string field, std::string msg) {
    out.push_back({Diagnostic::Severity::Warning, std::move(field), std::move(msg)});
  };

  const std::size_t n = cfg.params.size();
  const bool coupled = !std::holds_alternative<NoCoupling>(cfg.protocol);
  if (n == 0) error("nodes", "no nodes");
  if (cfg.initial.size() != n) {
    error("nodes", "got " + std::to_string(cfg.initial.size()) + " initial states for " + std::to_string(n) +
                       " nodes");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = cfg.params[i];
    if (!std::isfinite(p.alpha) || !std::isfinite(p.beta) || !std::isfinite(p.gamma) || !std::isfinite(p.omega)) {
      error("nodes[" + std::to_string(i) + "]", "non-finite parameter");
    }
  }

  const auto& t = cfg.topology;
  const std::size_t tn = topology_size(cfg);
  if (tn != n) {
    error("topology", "graph has " + std::to_string(tn) + " nodes but " + std::to_string(n) + " are configured");
  }
  if (coupled && n < 2) error("topology", "coupling needs at least two nodes");

  bool graph_ok = true;
  if (t.kind == TopologySpec::Kind::Inline) {
    if (!t.weights) {
      error("topology.weights", "missing weight matrix");
      graph_ok = false;
    } else {
      const Matrix& w = *t.weights;
      for (std::size_t i = 0; i < w.rows(); ++i) {
        if (w(i, i) != 0.0) {
          error("topology.weights", "nonzero diagonal at node " + std::to_string(i + 1));
          graph_ok = false;
        }
        for (std::size_t j = 0; j < w.cols(); ++j) {
          if (!std::isfinite(w(i, j)) || w(i, j) < 0.0) {
            error("topology.weights",
                  "weight (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ") must be finite and >= 0");
            graph_ok = false;
          }
        }
      }
      if (!w.is_symmetric(0.0)) {
        error("topology.weights", "matrix is not symmetric");
        graph_ok = false;
      }
      if (graph_ok && w.rows() >= 2 && !Topology(w).is_connected()) {
        if (coupled) {
          error("topology.weights", "graph is not connected");
        } else {
          warning("topology.weights", "graph is not connected");
        }
      }
    }
  } else if (t.kind == TopologySpec::Kind::Complete) {
    if (!(t.weight > 0.0) || !std::isfinite(t.weight)) error("topology.weight", "must be positive");
  } else {
    if (!(t.edge_prob > 0.0 && t.edge_prob <= 1.0)) error("topology.edge_prob", "must lie in (0, 1]");
    if (!(t.weight_lo >= 0.0 && t.weight_hi > t.weight_lo)) {
      error("topology.weight_lo", "need 0 <= weight_lo < weight_hi");
    }
  }

  try {
    validate_protocol(cfg.protocol);
  } catch (const InvalidArgument& e) {
    error("coupling", e.what());
  }

  if (cfg.entrainment.enabled) {
    if (!std::isfinite(cfg.entrainment.amplitude)) error("entrainment.amplitude", "must be finite");
    if (!(cfg.entrainment.frequency > 0.0) || !std::isfinite(cfg.entrainment.frequency)) {
      error("entrainment.frequency", "must be positive");
    }
  }

  if (!(cfg.duration > 0.0) || !(cfg.dt > 0.0) || cfg.dt > cfg.duration) {
    error("simulation", "need 0 < dt <= duration");
  } else {
    const double steps = cfg.duration / cfg.dt;
    if (std::abs(steps - std::round(steps)) > 1e-6) error("simulation.dt", "dt does not divide the duration");
  }

  if (cfg.bounds.quad && n > 0) {
    try {
      (void)common_gamma(cfg.params);
    } catch (const BoundInapplicable&) {
      warning("bounds.quad", "gamma differs across nodes; the QUAD bound does not apply");
    }
    const auto& b = cfg.bounds;
    if (!(b.p.d1 > 0.0 && b.p.d2 > 0.0)) error("bounds.P", "entries must be positive");
    if (!(b.w11 > 0.0)) error("bounds.W11", "must be positive");
    if (b.w22 && !(*b.w22 > 0.0)) error("bounds.W22", "must be positive");
    if (!(b.gamma_shape.d1 > 0.0 && b.gamma_shape.d2 > 0.0)) error("bounds.Gamma", "entries must be positive");
  }
  if (cfg.bounds.z1_max && !(*cfg.bounds.z1_max > 0.0)) error("bounds.z1_max", "must be positive");
  if (cfg.bounds.z2_max && !(*cfg.bounds.z2_max > 0.0)) error("bounds.z2_max", "must be positive");

  if (cfg.sweep.size() > 2) error("sweep", "at most two axes are supported");
  for (std::size_t a = 0; a < cfg.sweep.size(); ++a) {
    const auto& axis = cfg.sweep[a];
    const std::string field = "sweep[" + std::to_string(a) + "]";
    if (axis.values.empty()) error(field, "empty axis");
    RunConfig probe = cfg;
    try {
      set_scalar_field(probe, axis.field, axis.values.empty() ? 0.0 : axis.values.front());
    } catch (const ConfigError& e) {
      error(field + ".field", e.what());
    }
  }
  return out;
}

bool has_errors(const std::vector<Diagnostic>& diags) {
  return std::any_of(diags.begin(), diags.end(),
                     [](const Diagnostic& d) { return d.severity == Diagnostic::Severity::Error; });
}

Topology build_topology(const RunConfig& cfg) {
  const auto& t = cfg.topology;
  switch (t.kind) {
    case TopologySpec::Kind::Complete:
      return complete_graph(topology_size(cfg), t.weight);
    case TopologySpec::Kind::Random:
      return random_weighted_graph(topology_size(cfg), t.edge_prob, t.weight_lo, t.weight_hi, cfg.seed);
    case TopologySpec::Kind::Inline:
      if (!t.weights) throw ConfigError("topology.weights", "missing weight matrix");
      return Topology(*t.weights);
  }
  throw ConfigError("topology.kind", "unknown topology kind");
}

NetworkModel build_model(const RunConfig& cfg) {
  NetworkModel model;
  model.params = cfg.params;
  if (cfg.params.size() >= 2) model.topology = build_topology(cfg);
  model.protocol = cfg.protocol;
  model.entrainment = cfg.entrainment;
  return model;
}

}  // namespace hkbnet
