#pragma once

#include <array>
#include <cstddef>
#include <span>

#include "hkbnet/dynamics.hpp"
#include "hkbnet/graph.hpp"

namespace hkbnet {

/// Arithmetic means of the node parameters.
struct AveragedParams {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double omega = 0.0;
};

[[nodiscard]] AveragedParams average_params(std::span<const OscillatorParams> params);

// ---------------------------------------------------------------------------
// Contraction (virtual system) window, valid for unweighted complete graphs
// with full-state coupling.
// ---------------------------------------------------------------------------

struct ContractionWindow {
  double c_lo = 0.0;
  double c_hi = 0.0;
  bool feasible = false;
  // Large-N limit, where (N - 1) / N -> 1.
  double c_lo_limit = 0.0;
  double c_hi_limit = 1.0;
  bool feasible_limit = false;
};

/// Coupling window ((N-1)/N)(2 a z1 z2 + w^2 + g) < c < (N-1)/N. An empty
/// window is reported through `feasible`, not an exception; nonpositive
/// z-bounds throw InvalidArgument.
[[nodiscard]] ContractionWindow contraction_window(const AveragedParams& avg, double z1_max,
                                                   double z2_max, std::size_t n);

using Matrix2 = std::array<std::array<double, 2>, 2>;

/// Jacobian of the averaged virtual system at z, with c_hat = c / (N - 1).
[[nodiscard]] Matrix2 virtual_jacobian(NodeState z, const AveragedParams& avg, double c_hat,
                                       std::size_t n);

// ---------------------------------------------------------------------------
// QUAD-affine Lyapunov bound for full-state (or diagonal-Gamma) coupling.
// ---------------------------------------------------------------------------

struct Diag2 {
  double d1 = 1.0;
  double d2 = 1.0;

  [[nodiscard]] double min() const noexcept { return d1 < d2 ? d1 : d2; }
  [[nodiscard]] double max() const noexcept { return d1 < d2 ? d2 : d1; }
};

/// Common gamma of all nodes; BoundInapplicable when the nodes disagree.
[[nodiscard]] double common_gamma(std::span<const OscillatorParams> params, double tol = 1e-12);

/// c_bar = max(W11, W22) / (lambda2(L_N) * min_j P_jj Gamma_jj), with W22 taken
/// as given. This is the form used when W is supplied at face value.
[[nodiscard]] double quad_cbar(double lambda2_ln, Diag2 p, Diag2 w, Diag2 gamma_shape);

/// Same with the tie W22 = gamma * P22 and lambda2 from the topology.
[[nodiscard]] double quad_cbar(const Topology& t, double gamma, Diag2 p, double w11, Diag2 gamma_shape);

/// Infimum of c_bar over P and W11 > 0: gamma / (lambda2(L_N) * Gamma22),
/// approached as W11 -> 0 with P11 Gamma11 >= P22 Gamma22.
[[nodiscard]] double quad_cbar_infimum(double lambda2_ln, double gamma, Diag2 gamma_shape);

/// eps = sqrt(N) M_bar max(P11, P22) / d_eps with
/// d_eps = c lambda2(L_N) min_j P_jj Gamma_jj - max(W11, W22).
/// BoundInapplicable when d_eps <= 0.
[[nodiscard]] double quad_epsilon(double c, double lambda2_ln, Diag2 p, Diag2 w, Diag2 gamma_shape,
                                  double m_bar, std::size_t n);
[[nodiscard]] double quad_epsilon(double c, const Topology& t, double gamma, Diag2 p, double w11,
                                  Diag2 gamma_shape, double m_bar);

/// Uniform bound on the affine remainders:
/// (1 + alpha_M p_M^2 + beta_M v_M^2) v_M + omega_M^2 p_M.
[[nodiscard]] double m_bar(std::span<const OscillatorParams> params, double p_max, double v_max);

struct QuadCertificate {
  Diag2 p;
  Diag2 w;
  Diag2 gamma_shape;
  double lambda2_ln = 0.0;
  double c_bar = 0.0;
  double epsilon = 0.0;
  bool has_epsilon = false;
};

}  // namespace hkbnet
