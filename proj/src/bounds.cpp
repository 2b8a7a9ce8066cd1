#include "hkbnet/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "hkbnet/errors.hpp"

namespace hkbnet {

AveragedParams average_params(std::span<const OscillatorParams> params) {
  if (params.empty()) throw InvalidArgument("no node parameters to average");
  AveragedParams avg;
  for (const auto& p : params) {
    avg.alpha += p.alpha;
    avg.beta += p.beta;
    avg.gamma += p.gamma;
    avg.omega += p.omega;
  }
  const double n = static_cast<double>(params.size());
  avg.alpha /= n;
  avg.beta /= n;
  avg.gamma /= n;
  avg.omega /= n;
  return avg;
}

ContractionWindow contraction_window(const AveragedParams& avg, double z1_max, double z2_max,
                                     std::size_t n) {
  if (n < 2) throw InvalidArgument("contraction window needs N >= 2");
  if (!(z1_max > 0.0) || !(z2_max > 0.0)) throw InvalidArgument("virtual state bounds must be positive");
  const double threshold = 2.0 * avg.alpha * z1_max * z2_max + avg.omega * avg.omega + avg.gamma;
  const double ratio = static_cast<double>(n - 1) / static_cast<double>(n);
  ContractionWindow w;
  w.c_lo = ratio * threshold;
  w.c_hi = ratio;
  w.feasible = w.c_lo < w.c_hi;
  w.c_lo_limit = threshold;
  w.c_hi_limit = 1.0;
  w.feasible_limit = threshold < 1.0;
  return w;
}

Matrix2 virtual_jacobian(NodeState z, const AveragedParams& avg, double c_hat, std::size_t n) {
  const double cn = c_hat * static_cast<double>(n);
  Matrix2 j{};
  j[0][0] = -cn;
  j[0][1] = 1.0;
  j[1][0] = -(2.0 * avg.alpha * z.vel * z.pos + avg.omega * avg.omega);
  j[1][1] = -avg.alpha * z.pos * z.pos - 3.0 * avg.beta * z.vel * z.vel - cn + avg.gamma;
  return j;
}

double common_gamma(std::span<const OscillatorParams> params, double tol) {
  if (params.empty()) throw InvalidArgument("no node parameters");
  const double g = params.front().gamma;
  for (const auto& p : params) {
    if (std::abs(p.gamma - g) > tol) {
      throw BoundInapplicable("QUAD bound requires identical gamma on every node");
    }
  }
  return g;
}

namespace {

void check_quad_inputs(double lambda2_ln, Diag2 p, Diag2 w, Diag2 gamma_shape) {
  if (!(p.d1 > 0.0) || !(p.d2 > 0.0)) throw InvalidArgument("P must be positive diagonal");
  if (!(w.d1 > 0.0)) throw InvalidArgument("W11 must be positive");
  if (!(gamma_shape.d1 > 0.0) || !(gamma_shape.d2 > 0.0)) {
    throw BoundInapplicable("coupling shape Gamma must be positive definite diagonal");
  }
  if (!(lambda2_ln > kZeroEigenvalueTol)) {
    throw BoundInapplicable("lambda2(L_N) vanishes: topology is disconnected");
  }
}

}  // namespace

double quad_cbar(double lambda2_ln, Diag2 p, Diag2 w, Diag2 gamma_shape) {
  check_quad_inputs(lambda2_ln, p, w, gamma_shape);
  const double pg = std::min(p.d1 * gamma_shape.d1, p.d2 * gamma_shape.d2);
  return w.max() / (lambda2_ln * pg);
}

double quad_cbar(const Topology& t, double gamma, Diag2 p, double w11, Diag2 gamma_shape) {
  const double lambda2 = normalized_neighbor_spectrum(t).lambda2;
  return quad_cbar(lambda2, p, Diag2{w11, gamma * p.d2}, gamma_shape);
}

double quad_cbar_infimum(double lambda2_ln, double gamma, Diag2 gamma_shape) {
  check_quad_inputs(lambda2_ln, Diag2{}, Diag2{}, gamma_shape);
  return std::max(gamma, 0.0) / (lambda2_ln * gamma_shape.d2);
}

double quad_epsilon(double c, double lambda2_ln, Diag2 p, Diag2 w, Diag2 gamma_shape, double m_bar,
                    std::size_t n) {
  check_quad_inputs(lambda2_ln, p, w, gamma_shape);
  const double pg = std::min(p.d1 * gamma_shape.d1, p.d2 * gamma_shape.d2);
  const double d_eps = c * lambda2_ln * pg - w.max();
  if (!(d_eps > 0.0)) {
    throw BoundInapplicable("coupling strength below c_bar: error bound does not apply");
  }
  return std::sqrt(static_cast<double>(n)) * m_bar * p.max() / d_eps;
}

double quad_epsilon(double c, const Topology& t, double gamma, Diag2 p, double w11, Diag2 gamma_shape,
                    double m_bar) {
  const double lambda2 = normalized_neighbor_spectrum(t).lambda2;
  return quad_epsilon(c, lambda2, p, Diag2{w11, gamma * p.d2}, gamma_shape, m_bar, t.size());
}

double m_bar(std::span<const OscillatorParams> params, double p_max, double v_max) {
  double alpha_m = 0.0;
  double beta_m = 0.0;
  double omega_m = 0.0;
  for (const auto& p : params) {
    alpha_m = std::max(alpha_m, std::abs(p.alpha));
    beta_m = std::max(beta_m, std::abs(p.beta));
    omega_m = std::max(omega_m, std::abs(p.omega));
  }
  return (1.0 + alpha_m * p_max * p_max + beta_m * v_max * v_max) * v_max + omega_m * omega_m * p_max;
}

}  // namespace hkbnet
