#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "hkbnet/bounds.hpp"
#include "hkbnet/errors.hpp"
#include "hkbnet/metrics.hpp"
#include "hkbnet/runner.hpp"

using namespace hkbnet;

namespace {

// Averaged virtual system with full-state coupling, without the input terms
// (they do not depend on z).
std::array<double, 2> virtual_field(double z1, double z2, const AveragedParams& a, double c_hat, std::size_t n) {
  const double cn = c_hat * static_cast<double>(n);
  return {z2 - cn * z1, -(a.alpha * z1 * z1 + a.beta * z2 * z2 - a.gamma) * z2 - a.omega * a.omega * z1 - cn * z2};
}

// Largest value over the last quarter of the run.
double late_max(const std::vector<double>& eta) {
  return *std::max_element(eta.begin() + static_cast<std::ptrdiff_t>(3 * eta.size() / 4), eta.end());
}

}  // namespace

TEST(AveragedParams, Means) {
  const auto a = average_params(rocking6_params());
  EXPECT_NEAR(a.alpha, (0.46 + 0.37 + 0.34 + 0.17 + 0.76 + 0.25) / 6, 1e-15);
  EXPECT_NEAR(a.gamma, (0.58 + 1.84 + 0.62 + 1.86 + 1.40 + 0.56) / 6, 1e-15);
  EXPECT_NEAR(a.omega, (0.31 + 0.52 + 0.37 + 0.41 + 0.85 + 0.62) / 6, 1e-15);
  EXPECT_THROW((void)average_params(std::vector<OscillatorParams>{}), InvalidArgument);
}

TEST(ContractionWindow, HandExample) {
  const AveragedParams a{0.0, 0.0, 0.05, 0.1};
  const auto w = contraction_window(a, 1.0, 1.0, 6);
  EXPECT_NEAR(w.c_lo, 5.0 / 6.0 * (0.01 + 0.05), 1e-15);
  EXPECT_NEAR(w.c_lo, 0.05, 1e-15);
  EXPECT_NEAR(w.c_hi, 5.0 / 6.0, 1e-15);
  EXPECT_TRUE(w.feasible);
  EXPECT_NEAR(w.c_lo_limit, 0.06, 1e-15);
  EXPECT_EQ(w.c_hi_limit, 1.0);
  EXPECT_TRUE(w.feasible_limit);
}

TEST(ContractionWindow, TableAveragesAreInfeasible) {
  const auto a = average_params(rocking6_params());
  const auto w = contraction_window(a, 1.0, 1.0, 6);
  EXPECT_GT(w.c_lo, 1.0);
  EXPECT_LT(w.c_hi, 1.0);
  EXPECT_FALSE(w.feasible);
  EXPECT_FALSE(w.feasible_limit);
}

TEST(ContractionWindow, Errors) {
  const AveragedParams a{0.1, 0.1, 0.1, 0.1};
  EXPECT_THROW((void)contraction_window(a, 0.0, 1.0, 4), InvalidArgument);
  EXPECT_THROW((void)contraction_window(a, 1.0, -1.0, 4), InvalidArgument);
  EXPECT_THROW((void)contraction_window(a, 1.0, 1.0, 1), InvalidArgument);
}

TEST(ContractionWindow, PropertyNonemptyIffThresholdBelowOne) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 0.6);
  for (int trial = 0; trial < 1000; ++trial) {
    const AveragedParams a{u(rng), u(rng), u(rng), u(rng)};
    const double z1 = 0.05 + u(rng);
    const double z2 = 0.05 + u(rng);
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 20);
    const auto w = contraction_window(a, z1, z2, n);
    const double threshold = 2 * a.alpha * z1 * z2 + a.omega * a.omega + a.gamma;
    EXPECT_LT(w.c_hi, 1.0);
    EXPECT_EQ(w.feasible, threshold < 1.0);
    EXPECT_EQ(w.feasible_limit, threshold < 1.0);
  }
}

TEST(VirtualJacobian, Origin) {
  const AveragedParams a{0.4, 1.0, 0.6, 0.5};
  const auto j = virtual_jacobian({0.0, 0.0}, a, 0.2, 6);
  EXPECT_DOUBLE_EQ(j[0][0], -1.2);
  EXPECT_EQ(j[0][1], 1.0);
  EXPECT_DOUBLE_EQ(j[1][0], -0.25);
  EXPECT_DOUBLE_EQ(j[1][1], 0.6 - 1.2);
  // c_hat N > gamma makes both diagonal entries negative at the origin.
  EXPECT_LT(j[0][0], 0.0);
  EXPECT_LT(j[1][1], 0.0);
}

TEST(VirtualJacobian, MatchesFiniteDifferences) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_real_distribution<double> pu(0.0, 1.5);
  const double h = 1e-5;
  for (int trial = 0; trial < 100; ++trial) {
    const AveragedParams a{pu(rng), pu(rng), pu(rng), pu(rng)};
    const double c_hat = 0.3 * pu(rng);
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 6);
    const double z1 = u(rng);
    const double z2 = u(rng);
    const auto j = virtual_jacobian({z1, z2}, a, c_hat, n);
    const auto f1p = virtual_field(z1 + h, z2, a, c_hat, n);
    const auto f1m = virtual_field(z1 - h, z2, a, c_hat, n);
    const auto f2p = virtual_field(z1, z2 + h, a, c_hat, n);
    const auto f2m = virtual_field(z1, z2 - h, a, c_hat, n);
    for (int r = 0; r < 2; ++r) {
      EXPECT_NEAR(j[r][0], (f1p[r] - f1m[r]) / (2 * h), 1e-6);
      EXPECT_NEAR(j[r][1], (f2p[r] - f2m[r]) / (2 * h), 1e-6);
    }
  }
}

TEST(QuadCbar, PrintedValidationValue) {
  const double c_bar = quad_cbar(0.4112, {0.077, 0.077}, {0.001, 0.045}, {1.0, 1.0});
  EXPECT_NEAR(c_bar, 1.4211, 5e-4);
  EXPECT_NEAR(c_bar, 0.045 / (0.4112 * 0.077), 1e-12);
}

TEST(QuadCbar, TiedW22UsesGammaTimesP22) {
  const Topology t(validation5_weights());
  const double l2 = normalized_neighbor_spectrum(t).lambda2;
  const double c_bar = quad_cbar(t, 0.58, {0.077, 0.077}, 0.001, {1.0, 1.0});
  EXPECT_NEAR(c_bar, 0.58 * 0.077 / (l2 * 0.077), 1e-12);
}

TEST(QuadCbar, InfimumForIdentityShapes) {
  const Topology t(validation5_weights());
  const double l2 = normalized_neighbor_spectrum(t).lambda2;
  const double gamma = 0.58;
  EXPECT_NEAR(quad_cbar_infimum(l2, gamma, {1.0, 1.0}), gamma / l2, 1e-15);
  // P = I, W11 -> 0+ approaches the infimum from above.
  const double at_tiny_w11 = quad_cbar(t, gamma, {1.0, 1.0}, 1e-9, {1.0, 1.0});
  EXPECT_NEAR(at_tiny_w11, gamma / l2, 1e-12);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.01, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    EXPECT_GE(quad_cbar(t, gamma, {u(rng), u(rng)}, u(rng), {1.0, 1.0}) + 1e-12, gamma / l2);
  }
}

TEST(QuadCbar, InvariantUnderScalingOfPAndW11) {
  const Topology t(validation5_weights());
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.01, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Diag2 p{u(rng), u(rng)};
    const double w11 = u(rng);
    const Diag2 g{u(rng), u(rng)};
    const double k = u(rng) * 10.0;
    const double a = quad_cbar(t, 0.58, p, w11, g);
    const double b = quad_cbar(t, 0.58, {k * p.d1, k * p.d2}, k * w11, g);
    EXPECT_NEAR(a, b, 1e-12 * a);
  }
}

TEST(QuadCbar, Errors) {
  EXPECT_THROW((void)quad_cbar(0.4, {0.0, 1.0}, {0.1, 0.1}, {1, 1}), InvalidArgument);
  EXPECT_THROW((void)quad_cbar(0.4, {1.0, 1.0}, {0.0, 0.1}, {1, 1}), InvalidArgument);
  EXPECT_THROW((void)quad_cbar(0.0, {1.0, 1.0}, {0.1, 0.1}, {1, 1}), BoundInapplicable);
  EXPECT_THROW((void)quad_cbar(0.4, {1.0, 1.0}, {0.1, 0.1}, {0.0, 1}), BoundInapplicable);
}

TEST(QuadEpsilon, Properties) {
  const Diag2 p{0.077, 0.077};
  const Diag2 w{0.001, 0.045};
  const Diag2 g{1.0, 1.0};
  const double l2 = 0.4112;
  const double e1 = quad_epsilon(1.45, l2, p, w, g, 7.6, 5);
  const double d = 1.45 * l2 * 0.077 - 0.045;
  EXPECT_NEAR(e1, std::sqrt(5.0) * 7.6 * 0.077 / d, 1e-9 * e1);
  EXPECT_DOUBLE_EQ(quad_epsilon(1.45, l2, p, w, g, 15.2, 5), 2.0 * e1);
  double prev = e1;
  for (double c : {2.0, 4.0, 10.0, 100.0, 1e4}) {
    const double e = quad_epsilon(c, l2, p, w, g, 7.6, 5);
    EXPECT_LT(e, prev);
    prev = e;
  }
  EXPECT_LT(prev, 0.01);
  EXPECT_THROW((void)quad_epsilon(1.0, l2, p, w, g, 7.6, 5), BoundInapplicable);
}

TEST(MBar, Examples) {
  EXPECT_NEAR(m_bar(validation5_params(), 2.6, 0.96), 7.6, 0.05);
  const double expected = (1 + 0.76 * 6.76 + 1.73 * 0.9216) * 0.96 + 0.27 * 0.27 * 2.6;
  EXPECT_NEAR(m_bar(validation5_params(), 2.6, 0.96), expected, 1e-12);
  const std::vector<OscillatorParams> zero(3, {0.0, 0.0, 0.0, 0.0});
  EXPECT_DOUBLE_EQ(m_bar(zero, 1.7, 0.4), 0.4);
  EXPECT_EQ(m_bar(validation5_params(), 0.0, 0.0), 0.0);
}

TEST(CommonGamma, HomogeneityRequired) {
  EXPECT_DOUBLE_EQ(common_gamma(validation5_params()), 0.58);
  EXPECT_THROW((void)common_gamma(rocking6_params()), BoundInapplicable);
}

// Conservative direction only: when the sufficient condition holds, the
// simulated error must respect the bound.
TEST(BoundsSoundness, ContractionWindowInstances) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int checked = 0;
  for (int trial = 0; trial < 200 && checked < 10; ++trial) {
    const std::size_t n = 3 + static_cast<std::size_t>(trial % 3);
    NetworkModel m;
    for (std::size_t i = 0; i < n; ++i) m.params.push_back({0.2 * u(rng), 0.2 * u(rng), 0.05 + 0.15 * u(rng), 0.1 + 0.3 * u(rng)});
    m.topology = complete_graph(n);
    std::vector<double> x0;
    for (std::size_t i = 0; i < 2 * n; ++i) x0.push_back(2.0 * u(rng) - 1.0);
    const auto avg = average_params(m.params);
    const double ratio = static_cast<double>(n - 1) / static_cast<double>(n);
    // Pick c in the middle of the window implied by the pilot's bounds.
    double c = 0.5 * ratio;
    m.protocol = FullStateCoupling{c};
    const auto pilot = integrate(m, x0, 100.0, 0.01);
    const auto ext = state_extrema(pilot);
    const auto w = contraction_window(avg, ext.p_max, ext.v_max, n);
    if (!w.feasible || c <= w.c_lo || c >= w.c_hi) continue;
    ++checked;
    // Heterogeneous nodes only synchronize up to a bounded error, so the
    // check is relative to the same network without coupling.
    NetworkModel free = m;
    free.protocol = NoCoupling{};
    const double coupled = late_max(tracking_error_norm(pilot));
    const double uncoupled = late_max(tracking_error_norm(integrate(free, x0, 100.0, 0.01)));
    EXPECT_LT(coupled, 0.25 * uncoupled) << "trial " << trial;
  }
  EXPECT_GE(checked, 5);
}

TEST(BoundsSoundness, QuadInstances) {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 3 + static_cast<std::size_t>(trial % 3);
    const double gamma = 0.2 + 0.6 * u(rng);
    NetworkModel m;
    for (std::size_t i = 0; i < n; ++i) m.params.push_back({u(rng), u(rng), gamma, 0.1 + 0.5 * u(rng)});
    m.topology = random_weighted_graph(n, 0.6, 0.1, 2.0, 100 + static_cast<std::uint64_t>(trial));
    std::vector<double> x0;
    for (std::size_t i = 0; i < 2 * n; ++i) x0.push_back(2.0 * u(rng) - 1.0);
    const double l2 = normalized_neighbor_spectrum(*m.topology).lambda2;
    const Diag2 p{1.0, 1.0};
    const Diag2 w{1e-3, gamma};
    const double c_bar = quad_cbar(l2, p, w, {1.0, 1.0});
    const double c = 1.5 * c_bar;
    m.protocol = FullStateCoupling{c};
    const auto traj = integrate(m, x0, 100.0, 0.01);
    const auto ext = state_extrema(traj);
    const double eps = quad_epsilon(c, l2, p, w, {1.0, 1.0}, m_bar(m.params, ext.p_max, ext.v_max), n);
    EXPECT_LT(late_max(tracking_error_norm(traj)), eps) << "trial " << trial;
  }
}
