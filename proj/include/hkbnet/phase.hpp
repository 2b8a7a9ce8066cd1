#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "hkbnet/dynamics.hpp"

namespace hkbnet {

/// In-place iterative radix-2 FFT; size must be a power of two. `inverse`
/// applies the 1/N normalisation.
void fft_radix2(std::span<std::complex<double>> data, bool inverse = false);

/// Analytic signal of a real series.
///
/// The series is mean-centered, zero-padded to the next power of two and
/// transformed; negative-frequency bins are zeroed, positive ones doubled, DC
/// and Nyquist kept. The inverse transform is truncated back to the input
/// length, so the real part reproduces the centered input.
[[nodiscard]] std::vector<std::complex<double>> analytic_signal(std::span<const double> samples);

/// Four-quadrant angle of the analytic signal, in (-pi, pi].
[[nodiscard]] std::vector<double> instantaneous_phase(std::span<const double> samples);

/// Wraps an angle into (-pi, pi].
[[nodiscard]] double wrap_angle(double a);

/// Phases of all nodes on the trajectory's sampling grid.
class PhaseSeries {
 public:
  PhaseSeries() = default;
  PhaseSeries(std::size_t nodes, double dt, std::size_t samples)
      : nodes_(nodes), samples_(samples), dt_(dt), data_(nodes * samples, 0.0) {}

  [[nodiscard]] std::size_t nodes() const noexcept { return nodes_; }
  [[nodiscard]] std::size_t samples() const noexcept { return samples_; }
  [[nodiscard]] double dt() const noexcept { return dt_; }
  [[nodiscard]] double time(std::size_t j) const noexcept { return static_cast<double>(j) * dt_; }

  [[nodiscard]] double operator()(std::size_t j, std::size_t i) const { return data_[j * nodes_ + i]; }
  double& operator()(std::size_t j, std::size_t i) { return data_[j * nodes_ + i]; }
  [[nodiscard]] std::span<const double> at(std::size_t j) const {
    return {data_.data() + j * nodes_, nodes_};
  }

  friend bool operator==(const PhaseSeries&, const PhaseSeries&) = default;

 private:
  std::size_t nodes_ = 0;
  std::size_t samples_ = 0;
  double dt_ = 0.0;
  std::vector<double> data_;
};

/// Builds a PhaseSeries from per-node series (outer index: node).
[[nodiscard]] PhaseSeries phase_series_from(std::span<const std::vector<double>> per_node, double dt);

/// Hilbert phases of every node's position component.
[[nodiscard]] PhaseSeries extract_phases(const Trajectory& traj);

}  // namespace hkbnet
