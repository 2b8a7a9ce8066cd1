#include "hkbnet/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hkbnet/errors.hpp"

namespace hkbnet {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool all_finite(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace

void validate_protocol(const CouplingProtocol& proto) {
  std::visit(overloaded{
                 [](const NoCoupling&) {},
                 [](const FullStateCoupling& p) {
                   if (!(p.c > 0.0)) throw InvalidArgument("full-state coupling needs c > 0");
                 },
                 [](const PartialStateCoupling& p) {
                   if (!(p.c1 >= 0.0 && p.c2 >= 0.0) || !(p.c1 + p.c2 > 0.0)) {
                     throw InvalidArgument("partial-state coupling needs c1, c2 >= 0, not both zero");
                   }
                 },
                 [](const HkbCoupling& p) {
                   if (!(p.c > 0.0)) throw InvalidArgument("HKB coupling needs c > 0");
                   if (!std::isfinite(p.a) || !std::isfinite(p.b)) {
                     throw InvalidArgument("HKB coupling a, b must be finite");
                   }
                 },
             },
             proto);
}

double Entrainment::signal(double t) const {
  if (!enabled) return 0.0;
  return amplitude * std::sin(frequency * t);
}

NodeState hkb_field(NodeState s, const OscillatorParams& p) {
  const double damping = p.alpha * s.pos * s.pos + p.beta * s.vel * s.vel - p.gamma;
  return {s.vel, -damping * s.vel - p.omega * p.omega * s.pos};
}

NodeState coupling_term(std::size_t i, std::span<const NodeState> states, const Topology& topology,
                        const CouplingProtocol& proto) {
  const std::size_t n = states.size();
  const NodeState xi = states[i];
  const double inv_ni = 1.0 / static_cast<double>(topology.neighbor_count(i));

  return std::visit(
      overloaded{
          [](const NoCoupling&) { return NodeState{}; },
          [&](const FullStateCoupling& p) {
            double sp = 0.0;
            double sv = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
              const double a = topology.weight(i, j);
              if (a == 0.0) continue;
              sp += a * (xi.pos - states[j].pos);
              sv += a * (xi.vel - states[j].vel);
            }
            return NodeState{-p.c * inv_ni * sp, -p.c * inv_ni * sv};
          },
          [&](const PartialStateCoupling& p) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
              const double a = topology.weight(i, j);
              if (a == 0.0) continue;
              s += a * (p.c1 * (xi.pos - states[j].pos) + p.c2 * (xi.vel - states[j].vel));
            }
            return NodeState{0.0, -inv_ni * s};
          },
          [&](const HkbCoupling& p) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
              const double a = topology.weight(i, j);
              if (a == 0.0) continue;
              const double dp = xi.pos - states[j].pos;
              s += a * (p.a + p.b * dp * dp) * (xi.vel - states[j].vel);
            }
            return NodeState{0.0, p.c * inv_ni * s};
          },
      },
      proto);
}

void network_rhs(double t, std::span<const double> x, const NetworkModel& model, std::span<double> dxdt) {
  const std::size_t n = model.size();
  if (x.size() != 2 * n || dxdt.size() != 2 * n) {
    throw InvalidArgument("state vector length must be 2n");
  }
  if (!all_finite(x)) throw DivergenceError(0, t);

  const bool coupled = !std::holds_alternative<NoCoupling>(model.protocol);
  if (coupled && !model.topology) throw InvalidArgument("coupled model requires a topology");
  std::vector<NodeState> states(n);
  for (std::size_t i = 0; i < n; ++i) states[i] = {x[2 * i], x[2 * i + 1]};
  const bool forced = model.entrainment.enabled && model.entrainment.amplitude != 0.0;
  const double zeta = forced ? model.entrainment.signal(t) : 0.0;

  for (std::size_t i = 0; i < n; ++i) {
    NodeState f = hkb_field(states[i], model.params[i]);
    if (coupled) {
      const NodeState u = coupling_term(i, states, *model.topology, model.protocol);
      f.pos += u.pos;
      f.vel += u.vel;
    }
    if (forced) f.vel += zeta;
    dxdt[2 * i] = f.pos;
    dxdt[2 * i + 1] = f.vel;
  }
}

std::vector<double> network_rhs(double t, std::span<const double> x, const NetworkModel& model) {
  std::vector<double> out(x.size());
  network_rhs(t, x, model, out);
  return out;
}

Trajectory::Trajectory(std::size_t nodes, double dt, std::size_t samples)
    : nodes_(nodes), samples_(samples), dt_(dt), data_(nodes * samples * 2, 0.0) {}

std::vector<double> Trajectory::position_series(std::size_t i) const {
  std::vector<double> s(samples_);
  for (std::size_t j = 0; j < samples_; ++j) s[j] = pos(j, i);
  return s;
}

std::vector<double> Trajectory::velocity_series(std::size_t i) const {
  std::vector<double> s(samples_);
  for (std::size_t j = 0; j < samples_; ++j) s[j] = vel(j, i);
  return s;
}

Trajectory integrate(const NetworkModel& model, std::span<const double> x0, double duration, double dt) {
  const std::size_t n = model.size();
  if (n == 0) throw InvalidArgument("model has no nodes");
  if (x0.size() != 2 * n) throw InvalidArgument("initial state length must be 2n");
  if (!(duration > 0.0) || !(dt > 0.0) || dt > duration) {
    throw InvalidArgument("integration needs 0 < dt <= duration");
  }
  if (model.topology && model.topology->size() != n) {
    throw InvalidArgument("topology size does not match parameter count");
  }
  validate_protocol(model.protocol);

  const double steps_real = duration / dt;
  const auto steps = static_cast<std::size_t>(std::llround(steps_real));
  if (std::abs(steps_real - static_cast<double>(steps)) > 1e-6) {
    throw InvalidArgument("dt must divide the duration");
  }

  const std::size_t dim = 2 * n;
  Trajectory traj(n, dt, steps + 1);
  std::copy(x0.begin(), x0.end(), traj.sample(0).begin());

  std::vector<double> x(x0.begin(), x0.end());
  std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
  const double half = 0.5 * dt;

  for (std::size_t step = 0; step < steps; ++step) {
    const double t = static_cast<double>(step) * dt;
    try {
      network_rhs(t, x, model, k1);
      for (std::size_t d = 0; d < dim; ++d) tmp[d] = x[d] + half * k1[d];
      network_rhs(t + half, tmp, model, k2);
      for (std::size_t d = 0; d < dim; ++d) tmp[d] = x[d] + half * k2[d];
      network_rhs(t + half, tmp, model, k3);
      for (std::size_t d = 0; d < dim; ++d) tmp[d] = x[d] + dt * k3[d];
      network_rhs(t + dt, tmp, model, k4);
    } catch (const DivergenceError&) {
      throw DivergenceError(step + 1, t + dt);
    }
    for (std::size_t d = 0; d < dim; ++d) {
      x[d] += dt / 6.0 * (k1[d] + 2.0 * k2[d] + 2.0 * k3[d] + k4[d]);
      if (!std::isfinite(x[d]) || std::abs(x[d]) > kDivergenceLimit) {
        throw DivergenceError(step + 1, t + dt);
      }
    }
    std::copy(x.begin(), x.end(), traj.sample(step + 1).begin());
  }
  return traj;
}

StateExtrema state_extrema(const Trajectory& traj) {
  if (traj.samples() == 0) throw InvalidArgument("empty trajectory");
  StateExtrema e;
  e.pos_max.assign(traj.nodes(), 0.0);
  e.vel_max.assign(traj.nodes(), 0.0);
  for (std::size_t j = 0; j < traj.samples(); ++j) {
    for (std::size_t i = 0; i < traj.nodes(); ++i) {
      e.pos_max[i] = std::max(e.pos_max[i], std::abs(traj.pos(j, i)));
      e.vel_max[i] = std::max(e.vel_max[i], std::abs(traj.vel(j, i)));
    }
  }
  e.p_max = *std::max_element(e.pos_max.begin(), e.pos_max.end());
  e.v_max = *std::max_element(e.vel_max.begin(), e.vel_max.end());
  return e;
}

}  // namespace hkbnet
