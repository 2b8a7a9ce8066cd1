#include <algorithm>
#include <functional>
#include <map>

#include "hkbnet/errors.hpp"
#include "hkbnet/runner.hpp"

namespace hkbnet {

std::vector<OscillatorParams> rocking6_params() {
  return {
      {0.46, 1.16, 0.58, 0.31},
      {0.37, 1.20, 1.84, 0.52},
      {0.34, 1.73, 0.62, 0.37},
      {0.17, 0.31, 1.86, 0.41},
      {0.76, 0.76, 1.40, 0.85},
      {0.25, 0.86, 0.56, 0.62},
  };
}

std::vector<NodeState> rocking6_initial() {
  return {{-1.4, 0.3}, {1.0, 0.2}, {-1.8, -0.3}, {0.2, -0.2}, {1.5, 0.1}, {-0.8, -0.1}};
}

std::vector<OscillatorParams> validation5_params() {
  return {
      {0.46, 1.16, 0.58, 0.16},
      {0.37, 1.20, 0.58, 0.26},
      {0.34, 1.73, 0.58, 0.18},
      {0.17, 0.31, 0.58, 0.21},
      {0.76, 0.76, 0.58, 0.27},
  };
}

std::vector<NodeState> validation5_initial() {
  return {{-1.4, 0.3}, {1.0, 0.2}, {-1.8, -0.3}, {0.2, -0.2}, {1.5, 0.1}};
}

Matrix validation5_weights() {
  // Drawn with edge probability 0.6 and weights in (0, 2), then rescaled and
  // rounded so that lambda2(L_N) = 0.41116.
  constexpr double w[5][5] = {
      {0.00, 1.70, 1.00, 0.20, 0.53},
      {1.70, 0.00, 0.79, 0.00, 0.00},
      {1.00, 0.79, 0.00, 0.76, 0.00},
      {0.20, 0.00, 0.76, 0.00, 0.00},
      {0.53, 0.00, 0.00, 0.00, 0.00},
  };
  Matrix m(5, 5);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j) m(i, j) = w[i][j];
  return m;
}

namespace {

// {first/den, ..., last/den}
std::vector<double> grid(int first, int last, double den) {
  std::vector<double> v;
  for (int k = first; k <= last; ++k) v.push_back(k / den);
  return v;
}

RunConfig rocking6(std::string name, CouplingProtocol proto) {
  RunConfig cfg;
  cfg.name = std::move(name);
  cfg.topology.kind = TopologySpec::Kind::Complete;
  cfg.topology.n = 6;
  cfg.topology.weight = 1.0;
  cfg.params = rocking6_params();
  cfg.initial = rocking6_initial();
  cfg.protocol = proto;
  // Heterogeneous gamma: only the contraction window applies.
  cfg.bounds.quad = false;
  return cfg;
}

RunConfig validation5(std::string name, CouplingProtocol proto) {
  RunConfig cfg;
  cfg.name = std::move(name);
  cfg.topology.kind = TopologySpec::Kind::Inline;
  cfg.topology.weights = validation5_weights();
  cfg.params = validation5_params();
  cfg.initial = validation5_initial();
  cfg.protocol = proto;
  cfg.bounds.quad = true;
  cfg.bounds.p = {0.077, 0.077};
  cfg.bounds.w11 = 0.001;
  cfg.bounds.w22 = 0.045;
  return cfg;
}

using Factory = std::function<RunConfig()>;

const std::map<std::string, Factory, std::less<>>& registry() {
  static const std::map<std::string, Factory, std::less<>> presets = {
      {"rocking6", [] { return rocking6("rocking6", FullStateCoupling{0.15}); }},
      {"rocking6-nc", [] { return rocking6("rocking6-nc", NoCoupling{}); }},
      {"rocking6-fsc", [] { return rocking6("rocking6-fsc", FullStateCoupling{0.15}); }},
      {"rocking6-psc", [] { return rocking6("rocking6-psc", PartialStateCoupling{0.15, 0.15}); }},
      {"rocking6-hkb", [] { return rocking6("rocking6-hkb", HkbCoupling{-1.0, -1.0, 0.15}); }},
      {"rocking6-entrained",
       [] {
         auto cfg = rocking6("rocking6-entrained", FullStateCoupling{0.15});
         cfg.entrainment = {0.3, 0.5, true};
         return cfg;
       }},
      {"rocking6-fsc-sweep",
       [] {
         auto cfg = rocking6("rocking6-fsc-sweep", FullStateCoupling{0.15});
         cfg.sweep = {{"coupling.c", grid(1, 30, 100.0)}};
         return cfg;
       }},
      {"rocking6-psc-c1-sweep",
       [] {
         auto cfg = rocking6("rocking6-psc-c1-sweep", PartialStateCoupling{0.15, 0.0});
         cfg.sweep = {{"coupling.c1", grid(1, 30, 100.0)}};
         return cfg;
       }},
      {"rocking6-psc-c2-sweep",
       [] {
         auto cfg = rocking6("rocking6-psc-c2-sweep", PartialStateCoupling{0.0, 0.15});
         cfg.sweep = {{"coupling.c2", grid(1, 30, 100.0)}};
         return cfg;
       }},
      {"rocking6-hkb-sweep",
       [] {
         auto cfg = rocking6("rocking6-hkb-sweep", HkbCoupling{-1.0, -1.0, 0.15});
         cfg.sweep = {{"coupling.c", grid(1, 30, 100.0)}};
         return cfg;
       }},
      {"rocking6-entrainment-grid",
       [] {
         auto cfg = rocking6("rocking6-entrainment-grid", FullStateCoupling{0.15});
         cfg.entrainment = {0.3, 0.5, true};
         cfg.sweep = {{"entrainment.frequency", grid(1, 9, 10.0)},
                      {"entrainment.amplitude", grid(1, 6, 20.0)}};
         return cfg;
       }},
      {"validation5", [] { return validation5("validation5", FullStateCoupling{1.45}); }},
      {"validation5-weak", [] { return validation5("validation5-weak", FullStateCoupling{0.07}); }},
      {"validation5-psc", [] { return validation5("validation5-psc", PartialStateCoupling{0.1, 0.1}); }},
      {"validation5-hkb", [] { return validation5("validation5-hkb", HkbCoupling{-1.0, -1.0, 0.1}); }},
  };
  return presets;
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [name, _] : registry()) names.push_back(name);
  return names;
}

RunConfig preset(std::string_view name) {
  const auto& reg = registry();
  const auto it = reg.find(name);
  if (it == reg.end()) throw ConfigError("preset", "unknown preset '" + std::string(name) + "'");
  return it->second();
}

}  // namespace hkbnet
