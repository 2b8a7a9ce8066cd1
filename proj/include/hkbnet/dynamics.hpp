#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "hkbnet/graph.hpp"

namespace hkbnet {

/// Per-node HKB parameters: damping (alpha * pos^2 + beta * vel^2 - gamma) * vel
/// and restoring force omega^2 * pos. gamma > 0 gives a persistent oscillation.
struct OscillatorParams {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double omega = 1.0;  // rad/s

  friend bool operator==(const OscillatorParams&, const OscillatorParams&) = default;
};

struct NodeState {
  double pos = 0.0;
  double vel = 0.0;

  friend bool operator==(const NodeState&, const NodeState&) = default;
};

struct NoCoupling {};
/// Diffusive coupling on both position and velocity.
struct FullStateCoupling {
  double c = 0.0;
};
/// Diffusive coupling entering the acceleration only.
struct PartialStateCoupling {
  double c1 = 0.0;  // position mismatch gain
  double c2 = 0.0;  // velocity mismatch gain
};
/// Multi-node extension of the classic HKB interaction [a + b dpos^2] dvel.
struct HkbCoupling {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

using CouplingProtocol = std::variant<NoCoupling, FullStateCoupling, PartialStateCoupling, HkbCoupling>;

/// Throws InvalidArgument when the strengths are out of range. Partial-state
/// coupling accepts one zero gain (single-channel sweeps), not both.
void validate_protocol(const CouplingProtocol& proto);

/// Additive sinusoidal drive A sin(omega t) on every node's acceleration.
struct Entrainment {
  double amplitude = 0.0;
  double frequency = 1.0;  // rad/s
  bool enabled = false;

  [[nodiscard]] double signal(double t) const;
};

[[nodiscard]] NodeState hkb_field(NodeState s, const OscillatorParams& p);

/// Coupling increment for node i given all node states.
[[nodiscard]] NodeState coupling_term(std::size_t i, std::span<const NodeState> states,
                                      const Topology& topology, const CouplingProtocol& proto);

/// Everything needed to evaluate the network vector field. The topology may be
/// omitted only for uncoupled models (which then also allow a single node).
struct NetworkModel {
  std::vector<OscillatorParams> params;
  std::optional<Topology> topology;
  CouplingProtocol protocol = NoCoupling{};
  Entrainment entrainment{};

  [[nodiscard]] std::size_t size() const noexcept { return params.size(); }
};

/// Flat state layout: [pos_1, vel_1, pos_2, vel_2, ...]. Throws
/// DivergenceError(step 0) on non-finite input.
void network_rhs(double t, std::span<const double> x, const NetworkModel& model, std::span<double> dxdt);
[[nodiscard]] std::vector<double> network_rhs(double t, std::span<const double> x,
                                              const NetworkModel& model);

/// Uniformly sampled network trajectory; sample j is at time j * dt.
class Trajectory {
 public:
  Trajectory() = default;
  Trajectory(std::size_t nodes, double dt, std::size_t samples);

  [[nodiscard]] std::size_t nodes() const noexcept { return nodes_; }
  [[nodiscard]] std::size_t samples() const noexcept { return samples_; }
  [[nodiscard]] double dt() const noexcept { return dt_; }
  [[nodiscard]] double time(std::size_t j) const noexcept { return static_cast<double>(j) * dt_; }
  [[nodiscard]] double duration() const noexcept {
    return samples_ == 0 ? 0.0 : time(samples_ - 1);
  }

  [[nodiscard]] double pos(std::size_t j, std::size_t i) const { return data_[(j * nodes_ + i) * 2]; }
  [[nodiscard]] double vel(std::size_t j, std::size_t i) const { return data_[(j * nodes_ + i) * 2 + 1]; }
  [[nodiscard]] std::span<const double> sample(std::size_t j) const {
    return {data_.data() + j * nodes_ * 2, nodes_ * 2};
  }
  std::span<double> sample(std::size_t j) { return {data_.data() + j * nodes_ * 2, nodes_ * 2}; }

  [[nodiscard]] std::vector<double> position_series(std::size_t i) const;
  [[nodiscard]] std::vector<double> velocity_series(std::size_t i) const;

  friend bool operator==(const Trajectory&, const Trajectory&) = default;

 private:
  std::size_t nodes_ = 0;
  std::size_t samples_ = 0;
  double dt_ = 0.0;
  std::vector<double> data_;
};

inline constexpr double kDivergenceLimit = 1e6;

/// Classical fixed-step RK4 over [0, duration]; every step is stored, so the
/// result has round(duration / dt) + 1 samples. Throws DivergenceError when a
/// component becomes non-finite or exceeds kDivergenceLimit in magnitude.
[[nodiscard]] Trajectory integrate(const NetworkModel& model, std::span<const double> x0,
                                   double duration, double dt);

struct StateExtrema {
  std::vector<double> pos_max;  // per node sup |pos|
  std::vector<double> vel_max;  // per node sup |vel|
  double p_max = 0.0;
  double v_max = 0.0;
};

[[nodiscard]] StateExtrema state_extrema(const Trajectory& traj);

}  // namespace hkbnet
