#include "hkbnet/phase.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "hkbnet/errors.hpp"

namespace hkbnet {

void fft_radix2(std::span<std::complex<double>> data, bool inverse) {
  const std::size_t n = data.size();
  if (n == 0 || !std::has_single_bit(n)) throw InvalidArgument("FFT size must be a power of two");

  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }

  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double angle = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
    const std::size_t half = len / 2;
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        // Twiddles from the exact angle rather than by repeated multiplication.
        const std::complex<double> w = std::polar(1.0, angle * static_cast<double>(k));
        const std::complex<double> u = data[start + k];
        const std::complex<double> v = data[start + k + half] * w;
        data[start + k] = u + v;
        data[start + k + half] = u - v;
      }
    }
  }

  if (inverse) {
    const double scale = 1.0 / static_cast<double>(n);
    for (auto& z : data) z *= scale;
  }
}

std::vector<std::complex<double>> analytic_signal(std::span<const double> samples) {
  const std::size_t m = samples.size();
  if (m < 4) {
    throw DegenerateSignalError("analytic signal needs at least 4 samples, got " + std::to_string(m));
  }
  const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(m);
  const std::size_t padded = std::bit_ceil(m);

  std::vector<std::complex<double>> bins(padded, {0.0, 0.0});
  for (std::size_t i = 0; i < m; ++i) bins[i] = samples[i] - mean;
  fft_radix2(bins);

  const std::size_t nyquist = padded / 2;
  for (std::size_t k = 1; k < nyquist; ++k) bins[k] *= 2.0;
  for (std::size_t k = nyquist + 1; k < padded; ++k) bins[k] = 0.0;

  fft_radix2(bins, true);
  bins.resize(m);
  return bins;
}

double wrap_angle(double a) {
  double w = std::remainder(a, 2.0 * std::numbers::pi);
  if (w <= -std::numbers::pi) w += 2.0 * std::numbers::pi;
  return w;
}

std::vector<double> instantaneous_phase(std::span<const double> samples) {
  if (samples.size() >= 2) {
    const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
    if (*lo == *hi) throw DegenerateSignalError("phase undefined for a constant series");
  }
  const auto z = analytic_signal(samples);
  std::vector<double> phase(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    double a = std::atan2(z[i].imag(), z[i].real());
    if (a <= -std::numbers::pi) a = std::numbers::pi;
    phase[i] = a;
  }
  return phase;
}

PhaseSeries phase_series_from(std::span<const std::vector<double>> per_node, double dt) {
  if (per_node.empty()) throw InvalidArgument("no phase series given");
  const std::size_t samples = per_node.front().size();
  PhaseSeries out(per_node.size(), dt, samples);
  for (std::size_t i = 0; i < per_node.size(); ++i) {
    if (per_node[i].size() != samples) throw InvalidArgument("phase series lengths differ");
    for (std::size_t j = 0; j < samples; ++j) out(j, i) = per_node[i][j];
  }
  return out;
}

PhaseSeries extract_phases(const Trajectory& traj) {
  PhaseSeries out(traj.nodes(), traj.dt(), traj.samples());
  for (std::size_t i = 0; i < traj.nodes(); ++i) {
    const auto theta = instantaneous_phase(traj.position_series(i));
    for (std::size_t j = 0; j < theta.size(); ++j) out(j, i) = theta[j];
  }
  return out;
}

}  // namespace hkbnet
