#include "hkbnet/metrics.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "hkbnet/errors.hpp"

namespace hkbnet {

namespace {

std::complex<double> unit_phasor(double angle) { return {std::cos(angle), std::sin(angle)}; }

double clamp_unit(double v) { return v > 1.0 ? 1.0 : v; }

}  // namespace

ClusterPhase cluster_phase(std::span<const double> phases_at_t) {
  if (phases_at_t.empty()) throw InvalidArgument("cluster phase needs at least one agent");
  std::complex<double> sum{0.0, 0.0};
  for (double theta : phases_at_t) sum += unit_phasor(theta);
  ClusterPhase cp;
  cp.order = sum / static_cast<double>(phases_at_t.size());
  if (std::abs(cp.order) < kIndeterminateOrderTol) {
    cp.indeterminate = true;
    cp.angle = 0.0;
  } else {
    cp.angle = std::atan2(cp.order.imag(), cp.order.real());
  }
  return cp;
}

RelativePhases agent_relative_phase(const PhaseSeries& phases) {
  RelativePhases rel;
  rel.nodes = phases.nodes();
  rel.samples = phases.samples();
  rel.phi.assign(rel.nodes * rel.samples, 0.0);
  rel.valid.assign(rel.samples, true);
  std::vector<std::complex<double>> sums(rel.nodes, {0.0, 0.0});

  for (std::size_t j = 0; j < rel.samples; ++j) {
    const ClusterPhase cp = cluster_phase(phases.at(j));
    if (cp.indeterminate) {
      rel.valid[j] = false;
      ++rel.excluded;
    }
    for (std::size_t k = 0; k < rel.nodes; ++k) {
      const double phi = wrap_angle(phases(j, k) - cp.angle);
      rel.phi[j * rel.nodes + k] = phi;
      if (!cp.indeterminate) sums[k] += unit_phasor(phi);
    }
  }

  const std::size_t used = rel.samples - rel.excluded;
  rel.mean_phasor.resize(rel.nodes);
  rel.mean_angle.resize(rel.nodes);
  for (std::size_t k = 0; k < rel.nodes; ++k) {
    rel.mean_phasor[k] = used > 0 ? sums[k] / static_cast<double>(used) : std::complex<double>{};
    rel.mean_angle[k] = std::atan2(rel.mean_phasor[k].imag(), rel.mean_phasor[k].real());
  }
  return rel;
}

double agent_sync_degree(std::complex<double> mean_phasor) { return clamp_unit(std::abs(mean_phasor)); }

std::vector<double> group_sync_series(const RelativePhases& rel) {
  std::vector<double> rho(rel.samples);
  const double inv_n = 1.0 / static_cast<double>(rel.nodes);
  for (std::size_t j = 0; j < rel.samples; ++j) {
    std::complex<double> sum{0.0, 0.0};
    for (std::size_t k = 0; k < rel.nodes; ++k) sum += unit_phasor(rel.at(j, k) - rel.mean_angle[k]);
    rho[j] = clamp_unit(std::abs(sum) * inv_n);
  }
  return rho;
}

GroupSyncSummary group_sync_summary(std::span<const double> rho_g) {
  if (rho_g.empty()) throw InvalidArgument("empty group synchronization series");
  const double n = static_cast<double>(rho_g.size());
  GroupSyncSummary s;
  s.mean = std::accumulate(rho_g.begin(), rho_g.end(), 0.0) / n;
  double var = 0.0;
  for (double r : rho_g) var += (r - s.mean) * (r - s.mean);
  s.std = std::sqrt(var / n);
  return s;
}

double dyadic_sync(const PhaseSeries& phases, std::size_t k, std::size_t k2) {
  if (k == k2) throw InvalidArgument("dyadic synchronization needs two distinct agents");
  if (k >= phases.nodes() || k2 >= phases.nodes()) throw InvalidArgument("agent index out of range");
  if (phases.samples() == 0) throw InvalidArgument("empty phase series");
  std::complex<double> sum{0.0, 0.0};
  for (std::size_t j = 0; j < phases.samples(); ++j) sum += unit_phasor(phases(j, k) - phases(j, k2));
  return clamp_unit(std::abs(sum) / static_cast<double>(phases.samples()));
}

std::vector<std::vector<double>> dyadic_matrix(const PhaseSeries& phases) {
  const std::size_t n = phases.nodes();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 1.0));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) d[a][b] = d[b][a] = dyadic_sync(phases, a, b);
  }
  return d;
}

EntrainmentIndex entrainment_index(const PhaseSeries& phases, const Entrainment& ent) {
  if (!ent.enabled || ent.amplitude == 0.0) {
    throw InvalidArgument("entrainment index undefined without an entrainment signal");
  }
  const std::size_t n = phases.nodes();
  std::vector<std::complex<double>> sums(n, {0.0, 0.0});
  for (std::size_t j = 0; j < phases.samples(); ++j) {
    // A sin(w t) = A cos(w t - pi/2); a negative amplitude shifts by pi.
    double ref = ent.frequency * phases.time(j) - std::numbers::pi / 2.0;
    if (ent.amplitude < 0.0) ref += std::numbers::pi;
    ref = wrap_angle(ref);
    for (std::size_t k = 0; k < n; ++k) sums[k] += unit_phasor(phases(j, k) - ref);
  }
  EntrainmentIndex idx;
  idx.per_node.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    idx.per_node[k] = clamp_unit(std::abs(sums[k]) / static_cast<double>(phases.samples()));
  }
  idx.mean = std::accumulate(idx.per_node.begin(), idx.per_node.end(), 0.0) / static_cast<double>(n);
  return idx;
}

std::vector<double> tracking_error_norm(const Trajectory& traj) {
  const std::size_t n = traj.nodes();
  if (n < 2) throw InvalidArgument("tracking error needs at least two nodes");
  std::vector<double> eta(traj.samples());
  for (std::size_t j = 0; j < traj.samples(); ++j) {
    double mean_p = 0.0;
    double mean_v = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      mean_p += traj.pos(j, i);
      mean_v += traj.vel(j, i);
    }
    mean_p /= static_cast<double>(n);
    mean_v /= static_cast<double>(n);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double ep = traj.pos(j, i) - mean_p;
      const double ev = traj.vel(j, i) - mean_v;
      s += ep * ep + ev * ev;
    }
    eta[j] = std::sqrt(s);
  }
  return eta;
}

SyncReport compute_sync_report(const Trajectory& traj, const PhaseSeries& phases, const Entrainment& ent) {
  SyncReport r;
  const RelativePhases rel = agent_relative_phase(phases);
  r.indeterminate_samples = rel.excluded;
  r.rho_k.resize(rel.nodes);
  for (std::size_t k = 0; k < rel.nodes; ++k) r.rho_k[k] = agent_sync_degree(rel.mean_phasor[k]);
  r.rho_g_series = group_sync_series(rel);
  const GroupSyncSummary s = group_sync_summary(r.rho_g_series);
  r.rho_g_mean = s.mean;
  r.rho_g_std = s.std;
  if (phases.nodes() >= 2) r.dyadic = dyadic_matrix(phases);
  if (ent.enabled && ent.amplitude != 0.0) r.entrainment = entrainment_index(phases, ent);
  if (traj.nodes() >= 2) r.eta_series = tracking_error_norm(traj);
  return r;
}

}  // namespace hkbnet
