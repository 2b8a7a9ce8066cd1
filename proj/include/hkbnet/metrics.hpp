#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "hkbnet/dynamics.hpp"
#include "hkbnet/phase.hpp"

namespace hkbnet {

inline constexpr double kIndeterminateOrderTol = 1e-12;

/// Kuramoto order parameter of one time slice.
struct ClusterPhase {
  std::complex<double> order;  // q' = mean of exp(i theta_k)
  double angle = 0.0;          // q; 0 when indeterminate
  bool indeterminate = false;  // |q'| below kIndeterminateOrderTol
};

[[nodiscard]] ClusterPhase cluster_phase(std::span<const double> phases_at_t);

/// Relative phases phi_k(t) = theta_k(t) - q(t) and their time averages.
struct RelativePhases {
  std::size_t nodes = 0;
  std::size_t samples = 0;
  std::vector<double> phi;      // samples x nodes, wrapped to (-pi, pi]
  std::vector<bool> valid;      // false where q(t) is indeterminate
  std::size_t excluded = 0;     // number of indeterminate samples
  std::vector<std::complex<double>> mean_phasor;  // per node
  std::vector<double> mean_angle;                 // per node

  [[nodiscard]] double at(std::size_t j, std::size_t k) const { return phi[j * nodes + k]; }
};

/// Indeterminate samples are left out of the time averages.
[[nodiscard]] RelativePhases agent_relative_phase(const PhaseSeries& phases);

[[nodiscard]] double agent_sync_degree(std::complex<double> mean_phasor);

/// rho_g(t) for every sample. Because q(t) cancels in the sum, indeterminate
/// samples still have a well-defined value.
[[nodiscard]] std::vector<double> group_sync_series(const RelativePhases& rel);

struct GroupSyncSummary {
  double mean = 0.0;
  double std = 0.0;  // population normalisation
};

[[nodiscard]] GroupSyncSummary group_sync_summary(std::span<const double> rho_g);

[[nodiscard]] double dyadic_sync(const PhaseSeries& phases, std::size_t k, std::size_t k2);

/// Full symmetric pair matrix; the diagonal is set to 1 and carries no meaning.
[[nodiscard]] std::vector<std::vector<double>> dyadic_matrix(const PhaseSeries& phases);

struct EntrainmentIndex {
  std::vector<double> per_node;
  double mean = 0.0;
};

/// Phase locking to A sin(omega t), whose phase is taken analytically as
/// omega t - pi/2. Throws InvalidArgument for a disabled or zero-amplitude drive.
[[nodiscard]] EntrainmentIndex entrainment_index(const PhaseSeries& phases, const Entrainment& ent);

/// eta(t): Euclidean norm of the stacked deviations from the node average.
[[nodiscard]] std::vector<double> tracking_error_norm(const Trajectory& traj);

struct SyncReport {
  std::vector<double> rho_k;
  std::vector<double> rho_g_series;
  double rho_g_mean = 0.0;
  double rho_g_std = 0.0;
  std::vector<std::vector<double>> dyadic;
  std::optional<EntrainmentIndex> entrainment;
  std::vector<double> eta_series;
  std::size_t indeterminate_samples = 0;
};

[[nodiscard]] SyncReport compute_sync_report(const Trajectory& traj, const PhaseSeries& phases,
                                             const Entrainment& ent = {});

}  // namespace hkbnet
