#include "hkbnet/graph.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <random>
#include <string>

#include "hkbnet/errors.hpp"

namespace hkbnet {

namespace {

constexpr int kMaxJacobiSweeps = 100;

// Uniform double in [0, 1) from the top 53 bits; unlike
// std::uniform_real_distribution this is identical across standard libraries.
double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

double frobenius_norm(const Matrix& a) {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return std::sqrt(s);
}

// Cyclic Jacobi on a symmetric matrix; returns ascending eigenvalues.
SpectrumResult jacobi_eigenvalues(Matrix a) {
  const std::size_t n = a.rows();
  SpectrumResult out;
  const double scale = frobenius_norm(a);
  const double target = 1e-13 * scale;

  int sweep = 0;
  while (off_diagonal_norm(a) > target) {
    if (sweep == kMaxJacobiSweeps) {
      throw NumericalError("Jacobi eigenvalue iteration did not converge", sweep);
    }
    ++sweep;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
      }
    }
  }

  out.eigenvalues.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.eigenvalues[i] = a(i, i);
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end());
  out.lambda2 = n >= 2 ? out.eigenvalues[1] : out.eigenvalues.front();
  out.sweeps = sweep;
  return out;
}

}  // namespace

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> d) {
  Matrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

bool Matrix::is_symmetric(double tol) const {
  if (!square()) return false;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = i + 1; j < cols_; ++j)
      if (std::abs((*this)(i, j) - (*this)(j, i)) > tol) return false;
  return true;
}

Matrix kronecker(const Matrix& a, const Matrix& b) {
  Matrix k(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      for (std::size_t p = 0; p < b.rows(); ++p)
        for (std::size_t q = 0; q < b.cols(); ++q)
          k(i * b.rows() + p, j * b.cols() + q) = a(i, j) * b(p, q);
  return k;
}

Topology::Topology(Matrix weights) : weights_(std::move(weights)) {
  const std::size_t n = weights_.rows();
  if (!weights_.square()) throw InvalidArgument("adjacency matrix must be square");
  if (n < 2) throw InvalidArgument("topology needs at least 2 nodes, got " + std::to_string(n));
  neighbor_counts_.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (weights_(i, i) != 0.0) {
      throw InvalidArgument("self-loop at node " + std::to_string(i + 1));
    }
    for (std::size_t j = 0; j < n; ++j) {
      const double w = weights_(i, j);
      if (!std::isfinite(w) || w < 0.0) {
        throw InvalidArgument("weights must be finite and nonnegative");
      }
      if (w != weights_(j, i)) {
        throw InvalidArgument("adjacency matrix not symmetric at (" + std::to_string(i + 1) +
                              "," + std::to_string(j + 1) + ")");
      }
      if (w > 0.0) ++neighbor_counts_[i];
    }
  }
}

double Topology::weighted_degree(std::size_t i) const {
  double s = 0.0;
  for (double w : weights_.row(i)) s += w;
  return s;
}

bool Topology::is_connected() const {
  const std::size_t n = size();
  std::vector<bool> seen(n, false);
  std::queue<std::size_t> frontier;
  frontier.push(0);
  seen[0] = true;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    const std::size_t i = frontier.front();
    frontier.pop();
    for (std::size_t j = 0; j < n; ++j) {
      if (!seen[j] && weights_(i, j) > 0.0) {
        seen[j] = true;
        ++reached;
        frontier.push(j);
      }
    }
  }
  return reached == n;
}

bool Topology::is_complete() const {
  const double w0 = weights_(0, 1);
  if (w0 <= 0.0) return false;
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j = 0; j < size(); ++j)
      if (i != j && weights_(i, j) != w0) return false;
  return true;
}

Topology complete_graph(std::size_t n, double weight) {
  if (n < 2) throw InvalidArgument("complete graph needs n >= 2, got " + std::to_string(n));
  if (!(weight > 0.0)) throw InvalidArgument("complete graph weight must be positive");
  Matrix w(n, n, weight);
  for (std::size_t i = 0; i < n; ++i) w(i, i) = 0.0;
  return Topology(std::move(w));
}

Topology random_weighted_graph(std::size_t n, double edge_prob, double weight_lo,
                               double weight_hi, std::uint64_t seed) {
  if (n < 2) throw InvalidArgument("random graph needs n >= 2, got " + std::to_string(n));
  if (!(edge_prob >= 0.0 && edge_prob <= 1.0)) {
    throw InvalidArgument("edge probability must lie in [0, 1]");
  }
  if (!(weight_lo >= 0.0 && weight_hi > weight_lo)) {
    throw InvalidArgument("weight range must satisfy 0 <= lo < hi");
  }
  std::mt19937_64 rng(seed);
  for (int attempt = 1; attempt <= kMaxGraphAttempts; ++attempt) {
    Matrix w(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double u = unit_uniform(rng);
        const double v = unit_uniform(rng);
        if (u < edge_prob) {
          w(i, j) = w(j, i) = weight_lo + (weight_hi - weight_lo) * v;
        }
      }
    }
    Topology t(std::move(w));
    if (t.is_connected()) return t;
  }
  throw GenerationError(kMaxGraphAttempts);
}

Matrix laplacian(const Topology& t) {
  const std::size_t n = t.size();
  Matrix l(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) l(i, j) = -t.weight(i, j);
    }
    l(i, i) = t.weighted_degree(i);
  }
  return l;
}

Matrix normalized_neighbor_laplacian(const Topology& t) {
  Matrix l = laplacian(t);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto ni = t.neighbor_count(i);
    if (ni == 0) throw InvalidArgument("node " + std::to_string(i + 1) + " has no neighbors");
    for (std::size_t j = 0; j < t.size(); ++j) l(i, j) /= static_cast<double>(ni);
  }
  return l;
}

SpectrumResult spectrum(const Matrix& m, std::optional<std::span<const double>> similarity_diag) {
  if (!m.square() || m.rows() == 0) throw InvalidArgument("spectrum needs a nonempty square matrix");
  const std::size_t n = m.rows();
  if (!similarity_diag) {
    if (!m.is_symmetric(1e-12 * std::max(1.0, frobenius_norm(m)))) {
      throw InvalidArgument("nonsymmetric matrix requires a symmetrizing diagonal");
    }
    return jacobi_eigenvalues(m);
  }

  const auto d = *similarity_diag;
  if (d.size() != n) throw InvalidArgument("similarity diagonal has wrong length");
  std::vector<double> root(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(d[i] > 0.0)) throw InvalidArgument("similarity diagonal must be positive");
    root[i] = std::sqrt(d[i]);
  }
  // D^{1/2} M D^{-1/2}
  Matrix s(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) s(i, j) = root[i] * m(i, j) / root[j];
  if (!s.is_symmetric(1e-10 * std::max(1.0, frobenius_norm(s)))) {
    throw InvalidArgument("similarity diagonal does not symmetrize the matrix");
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) s(i, j) = s(j, i) = 0.5 * (s(i, j) + s(j, i));
  return jacobi_eigenvalues(std::move(s));
}

SpectrumResult normalized_neighbor_spectrum(const Topology& t) {
  const auto counts = t.neighbor_counts();
  std::vector<double> d(counts.begin(), counts.end());
  return spectrum(normalized_neighbor_laplacian(t), std::span<const double>(d));
}

double kron_lambda2(std::span<const double> ln_eigenvalues, double d1, double d2,
                    bool exclude_kernel_copies) {
  if (d1 < 0.0 || d2 < 0.0) throw InvalidArgument("Kronecker factor must be nonnegative");
  std::vector<double> products;
  products.reserve(2 * ln_eigenvalues.size());
  for (double lam : ln_eigenvalues) {
    if (exclude_kernel_copies && std::abs(lam) < kZeroEigenvalueTol) continue;
    products.push_back(lam * d1);
    products.push_back(lam * d2);
  }
  if (products.empty()) return 0.0;
  std::sort(products.begin(), products.end());
  if (exclude_kernel_copies) return products.front();
  return products.size() >= 2 ? products[1] : products.front();
}

double kron_lambda2(const Topology& t, double d1, double d2, bool exclude_kernel_copies) {
  return kron_lambda2(normalized_neighbor_spectrum(t).eigenvalues, d1, d2, exclude_kernel_copies);
}

}  // namespace hkbnet
