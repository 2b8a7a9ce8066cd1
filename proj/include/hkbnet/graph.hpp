#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace hkbnet {

/// Dense row-major real matrix. Everything in this library is at most a few
/// dozen rows, so no attempt is made at blocking or sparsity.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> d);

  [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
  [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
  [[nodiscard]] bool square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  [[nodiscard]] std::span<const double> data() const noexcept { return data_; }
  [[nodiscard]] std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }

  [[nodiscard]] bool is_symmetric(double tol = 0.0) const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

[[nodiscard]] Matrix kronecker(const Matrix& a, const Matrix& b);

/// Simple undirected weighted graph, stored as its adjacency (weight) matrix.
/// Construction validates symmetry, zero diagonal and nonnegative weights.
class Topology {
 public:
  explicit Topology(Matrix weights);

  [[nodiscard]] std::size_t size() const noexcept { return weights_.rows(); }
  [[nodiscard]] double weight(std::size_t i, std::size_t j) const { return weights_(i, j); }
  [[nodiscard]] const Matrix& weights() const noexcept { return weights_; }

  /// Number of nodes j with a_ij > 0 (a count, not the weighted degree).
  [[nodiscard]] std::size_t neighbor_count(std::size_t i) const { return neighbor_counts_[i]; }
  [[nodiscard]] std::span<const std::size_t> neighbor_counts() const noexcept {
    return neighbor_counts_;
  }
  [[nodiscard]] double weighted_degree(std::size_t i) const;

  /// Breadth-first reachability from node 0.
  [[nodiscard]] bool is_connected() const;
  /// True when every off-diagonal weight equals the same positive value.
  [[nodiscard]] bool is_complete() const;

 private:
  Matrix weights_;
  std::vector<std::size_t> neighbor_counts_;
};

/// Complete graph on n nodes with every edge weight equal to `weight`.
[[nodiscard]] Topology complete_graph(std::size_t n, double weight = 1.0);

inline constexpr int kMaxGraphAttempts = 1000;

/// Erdos-Renyi style graph: each unordered pair is an edge with probability
/// `edge_prob`, with weight uniform in [weight_lo, weight_hi]. Redraws until
/// connected, at most kMaxGraphAttempts times. Zero-weight draws count as absent.
[[nodiscard]] Topology random_weighted_graph(std::size_t n, double edge_prob, double weight_lo,
                                             double weight_hi, std::uint64_t seed);

/// l_ii = sum_k a_ik, l_ij = -a_ij.
[[nodiscard]] Matrix laplacian(const Topology& t);

/// Rows of the Laplacian divided by the neighbor count N_i.
[[nodiscard]] Matrix normalized_neighbor_laplacian(const Topology& t);

struct SpectrumResult {
  std::vector<double> eigenvalues;  // ascending
  double lambda2 = 0.0;
  int sweeps = 0;
};

inline constexpr double kZeroEigenvalueTol = 1e-8;

/// Eigenvalues of a real matrix with real spectrum.
///
/// Symmetric input goes straight to cyclic Jacobi. A nonsymmetric matrix M is
/// accepted only together with `similarity_diag` = diag(d) such that
/// diag(d) * M is symmetric (for L_N this is the neighbor counts); the
/// spectrum is then computed from the symmetric D^{1/2} M D^{-1/2}.
[[nodiscard]] SpectrumResult spectrum(const Matrix& m,
                                      std::optional<std::span<const double>> similarity_diag = {});

/// Convenience: spectrum of L_N using the neighbor-count similarity.
[[nodiscard]] SpectrumResult normalized_neighbor_spectrum(const Topology& t);

/// Second-smallest eigenvalue of L_N (x) diag(d1, d2), from the product spectrum
/// {lambda_i(L_N) * d_j} given the eigenvalues of L_N.
///
/// With `exclude_kernel_copies` (default) the products built from the null
/// eigenvalues of L_N are dropped and the smallest remaining product is
/// returned, i.e. lambda_2(L_N) * min(d1, d2) for a connected graph. Without
/// it, the second-smallest element of the full 2n multiset is returned, which
/// is 0 for any graph because the null eigenvalue appears twice.
[[nodiscard]] double kron_lambda2(std::span<const double> ln_eigenvalues, double d1, double d2,
                                  bool exclude_kernel_copies = true);
[[nodiscard]] double kron_lambda2(const Topology& t, double d1, double d2,
                                  bool exclude_kernel_copies = true);

}  // namespace hkbnet
