#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "hkbnet/errors.hpp"
#include "hkbnet/graph.hpp"
#include "hkbnet/runner.hpp"

using namespace hkbnet;

namespace {

// Number of eigenvalues of the symmetric matrix s below x, from the signs of
// the pivots of s - xI (Sylvester's law of inertia).
int count_below(const Matrix& s, double x) {
  const std::size_t n = s.rows();
  std::vector<double> a(s.data().begin(), s.data().end());
  for (std::size_t i = 0; i < n; ++i) a[i * n + i] -= x;
  int neg = 0;
  for (std::size_t k = 0; k < n; ++k) {
    double piv = a[k * n + k];
    if (piv == 0.0) piv = 1e-300;
    if (piv < 0.0) ++neg;
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = a[i * n + k] / piv;
      for (std::size_t j = k; j < n; ++j) a[i * n + j] -= f * a[k * n + j];
    }
  }
  return neg;
}

// Eigenvalues of a nonsymmetric matrix M with diag(d) M symmetric, obtained by
// bisection on the inertia of the similar symmetric matrix.
std::vector<double> brute_force_eigenvalues(const Matrix& m, const std::vector<double>& d) {
  const std::size_t n = m.rows();
  Matrix s(n, n);
  double radius = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      s(i, j) = std::sqrt(d[i]) * m(i, j) / std::sqrt(d[j]);
      row += std::abs(m(i, j));
    }
    radius = std::max(radius, row);
  }
  // Symmetrize exactly; the product above is symmetric up to rounding.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) s(i, j) = s(j, i) = 0.5 * (s(i, j) + s(j, i));

  std::vector<double> eig(n);
  for (std::size_t k = 0; k < n; ++k) {
    double lo = -radius - 1.0;
    double hi = radius + 1.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (count_below(s, mid) > static_cast<int>(k)) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    eig[k] = 0.5 * (lo + hi);
  }
  return eig;
}

Topology path3() {
  Matrix w(3, 3);
  w(0, 1) = w(1, 0) = 1.0;
  w(1, 2) = w(2, 1) = 1.0;
  return Topology(w);
}

}  // namespace

TEST(Topology, RejectsMalformedMatrices) {
  Matrix asym(3, 3);
  asym(0, 1) = 1.0;
  EXPECT_THROW(Topology{asym}, InvalidArgument);

  Matrix loop(2, 2);
  loop(0, 0) = 1.0;
  EXPECT_THROW(Topology{loop}, InvalidArgument);

  Matrix neg(2, 2);
  neg(0, 1) = neg(1, 0) = -1.0;
  EXPECT_THROW(Topology{neg}, InvalidArgument);

  EXPECT_THROW(Topology{Matrix(2, 3)}, InvalidArgument);
  EXPECT_THROW(Topology{Matrix(1, 1)}, InvalidArgument);
}

TEST(Topology, NeighborCountsAreCounts) {
  Matrix w(3, 3);
  w(0, 1) = w(1, 0) = 0.5;
  w(0, 2) = w(2, 0) = 2.0;
  const Topology t(w);
  EXPECT_EQ(t.neighbor_count(0), 2u);
  EXPECT_EQ(t.neighbor_count(1), 1u);
  EXPECT_DOUBLE_EQ(t.weighted_degree(0), 2.5);
}

TEST(CompleteGraph, Construction) {
  const auto t = complete_graph(4, 2.0);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(t.weight(i, j), i == j ? 0.0 : 2.0);
  }
  const Matrix l = laplacian(t);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(l(i, i), 6.0);
  EXPECT_TRUE(t.is_complete());
  EXPECT_TRUE(t.is_connected());

  const auto two = complete_graph(2);
  EXPECT_EQ(two.weight(0, 1), 1.0);
  EXPECT_THROW((void)complete_graph(1), InvalidArgument);
  EXPECT_THROW((void)complete_graph(3, 0.0), InvalidArgument);
}

TEST(Laplacian, ThreeNodeComplete) {
  const Matrix l = laplacian(complete_graph(3));
  const double expected[3][3] = {{2, -1, -1}, {-1, 2, -1}, {-1, -1, 2}};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(l(i, j), expected[i][j]);
}

TEST(Spectrum, AnalyticCases) {
  const auto id = spectrum(Matrix::identity(3));
  for (double e : id.eigenvalues) EXPECT_NEAR(e, 1.0, 1e-14);

  const auto k4 = spectrum(laplacian(complete_graph(4)));
  const std::vector<double> expect4{0, 4, 4, 4};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(k4.eigenvalues[i], expect4[i], 1e-12);

  const auto k6 = spectrum(laplacian(complete_graph(6)));
  EXPECT_NEAR(k6.eigenvalues[0], 0.0, 1e-12);
  for (std::size_t i = 1; i < 6; ++i) EXPECT_NEAR(k6.eigenvalues[i], 6.0, 1e-12);

  const auto p3 = spectrum(laplacian(path3()));
  EXPECT_NEAR(p3.eigenvalues[0], 0.0, 1e-12);
  EXPECT_NEAR(p3.eigenvalues[1], 1.0, 1e-12);
  EXPECT_NEAR(p3.eigenvalues[2], 3.0, 1e-12);
  EXPECT_NEAR(p3.lambda2, 1.0, 1e-12);
}

TEST(Spectrum, RejectsNonsymmetricWithoutSimilarity) {
  const Matrix ln = normalized_neighbor_laplacian(path3());
  EXPECT_THROW((void)spectrum(ln), InvalidArgument);
  const std::vector<double> wrong{1.0, 1.0, 1.0};
  EXPECT_THROW((void)spectrum(ln, std::span<const double>(wrong)), InvalidArgument);
}

TEST(NormalizedLaplacian, CompleteGraph) {
  const Topology t = complete_graph(6);
  const Matrix ln = normalized_neighbor_laplacian(t);
  const Matrix l = laplacian(t);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) EXPECT_DOUBLE_EQ(ln(i, j), l(i, j) / 5.0);
  const auto s = normalized_neighbor_spectrum(t);
  EXPECT_NEAR(s.eigenvalues[0], 0.0, 1e-12);
  for (std::size_t i = 1; i < 6; ++i) EXPECT_NEAR(s.eigenvalues[i], 1.2, 1e-12);
}

TEST(NormalizedLaplacian, TwoNodes) {
  const Matrix ln = normalized_neighbor_laplacian(complete_graph(2));
  EXPECT_EQ(ln(0, 0), 1.0);
  EXPECT_EQ(ln(0, 1), -1.0);
  EXPECT_NEAR(normalized_neighbor_spectrum(complete_graph(2)).lambda2, 2.0, 1e-12);
}

TEST(NormalizedLaplacian, IsolatedNodeThrows) {
  Matrix w(3, 3);
  w(0, 1) = w(1, 0) = 1.0;
  EXPECT_THROW((void)normalized_neighbor_laplacian(Topology(w)), InvalidArgument);
}

TEST(NormalizedLaplacian, FixtureGraph) {
  const Topology t(validation5_weights());
  ASSERT_TRUE(t.is_connected());
  const auto s = normalized_neighbor_spectrum(t);
  EXPECT_NEAR(s.eigenvalues[0], 0.0, 1e-10);
  EXPECT_NEAR(s.lambda2, 0.4112, 5e-5);
}

TEST(KronLambda2, ExcludingKernelCopies) {
  const Topology t(validation5_weights());
  const double l2 = normalized_neighbor_spectrum(t).lambda2;
  EXPECT_NEAR(kron_lambda2(t, 0.077, 0.077), l2 * 0.077, 1e-12);
  EXPECT_NEAR(kron_lambda2(t, 0.077, 0.077), 0.031662, 5e-6);
  EXPECT_NEAR(kron_lambda2(t, 1.0, 1.0), l2, 1e-12);
}

TEST(KronLambda2, FullMultiset) {
  const Topology t(validation5_weights());
  EXPECT_NEAR(kron_lambda2(t, 1.0, 1.0, false), 0.0, 1e-10);
  // Two-node unit graph with diag(1, 2): {0, 0, 2, 4}.
  const std::vector<double> eig{0.0, 2.0};
  EXPECT_NEAR(kron_lambda2(eig, 1.0, 2.0, false), 0.0, 1e-12);
  EXPECT_NEAR(kron_lambda2(eig, 1.0, 2.0, true), 2.0, 1e-12);
}

TEST(RandomGraph, DeterministicAndConnected) {
  const auto a = random_weighted_graph(5, 0.6, 0.0, 2.0, 42);
  const auto b = random_weighted_graph(5, 0.6, 0.0, 2.0, 42);
  EXPECT_EQ(a.weights(), b.weights());
  EXPECT_TRUE(a.is_connected());
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 5; ++j) {
      EXPECT_GE(a.weight(i, j), 0.0);
      EXPECT_LE(a.weight(i, j), 2.0);
    }
  }
  const auto c = random_weighted_graph(5, 0.6, 0.0, 2.0, 43);
  EXPECT_NE(a.weights(), c.weights());
}

TEST(RandomGraph, ForcedSingleEdge) {
  for (std::uint64_t seed : {1u, 2u, 99u}) {
    const auto t = random_weighted_graph(2, 1.0, 1.0, 1.0 + 1e-12, seed);
    EXPECT_NEAR(t.weight(0, 1), 1.0, 1e-11);
  }
}

TEST(RandomGraph, Errors) {
  EXPECT_THROW((void)random_weighted_graph(5, 0.0, 0.0, 2.0, 1), GenerationError);
  EXPECT_THROW((void)random_weighted_graph(5, 1.5, 0.0, 2.0, 1), InvalidArgument);
  EXPECT_THROW((void)random_weighted_graph(5, 0.5, 2.0, 1.0, 1), InvalidArgument);
  EXPECT_THROW((void)random_weighted_graph(1, 0.5, 0.0, 1.0, 1), InvalidArgument);
}

// Random graphs that may be disconnected, for the connectivity cross-check.
Topology arbitrary_graph(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix w(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (u(rng) < 0.35) w(i, j) = w(j, i) = 0.1 + 2.0 * u(rng);
    }
  }
  return Topology(w);
}

TEST(LaplacianProperty, RowSumsPsdAndConnectivity) {
  std::mt19937_64 rng(7);
  int connected = 0;
  int disconnected = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + trial % 7;
    const Topology t = arbitrary_graph(n, rng);
    const Matrix l = laplacian(t);
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += l(i, j);
      EXPECT_NEAR(s, 0.0, 1e-12);
    }
    const auto eig = spectrum(l).eigenvalues;
    EXPECT_GE(eig.front(), -1e-10);
    const auto zeros = std::count_if(eig.begin(), eig.end(), [](double e) { return e < kZeroEigenvalueTol; });
    EXPECT_EQ(zeros == 1, t.is_connected()) << "trial " << trial;
    (t.is_connected() ? connected : disconnected)++;
  }
  EXPECT_GT(connected, 20);
  EXPECT_GT(disconnected, 20);
}

TEST(LaplacianProperty, NormalizedSpectrumMatchesBruteForce) {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    const std::size_t n = 2 + seed % 5;
    const Topology t = random_weighted_graph(n, 0.6, 0.1, 2.0, seed);
    const Matrix ln = normalized_neighbor_laplacian(t);
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = static_cast<double>(t.neighbor_count(i));
    const auto oracle = brute_force_eigenvalues(ln, d);
    const auto eig = normalized_neighbor_spectrum(t).eigenvalues;
    ASSERT_EQ(eig.size(), n);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(eig[i], oracle[i], 1e-8) << "seed " << seed;
  }
}

TEST(LaplacianProperty, KronLambda2MatchesFullProduct) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.01, 3.0);
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const std::size_t n = 2 + seed % 4;
    const Topology t = random_weighted_graph(n, 0.7, 0.1, 2.0, seed);
    const double d1 = u(rng);
    const double d2 = u(rng);
    const Matrix ln = normalized_neighbor_laplacian(t);
    const std::vector<double> dd{d1, d2};
    const Matrix prod = kronecker(ln, Matrix::diagonal(dd));
    // diag(N) (x) diag(1/d) symmetrizes L_N (x) D.
    std::vector<double> sim;
    for (std::size_t i = 0; i < n; ++i) {
      sim.push_back(static_cast<double>(t.neighbor_count(i)) / d1);
      sim.push_back(static_cast<double>(t.neighbor_count(i)) / d2);
    }
    const auto full = spectrum(prod, std::span<const double>(sim)).eigenvalues;
    EXPECT_NEAR(kron_lambda2(t, d1, d2, false), full[1], 1e-9);
    // Excluding the two kernel copies leaves the third element.
    EXPECT_NEAR(kron_lambda2(t, d1, d2, true), full[2], 1e-9);
  }
}
