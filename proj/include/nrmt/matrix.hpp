#pragma once

// Matrix representations for the three symmetry classes, the trace
// convention (half trace for quaternion self-dual matrices), Gaussian
// sampling and the external field.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "nrmt/errors.hpp"
#include "nrmt/rng.hpp"

namespace nrmt {

using cplx = std::complex<double>;

template <class T>
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::span<T> data() { return data_; }
  std::span<const T> data() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using RealMatrix = DenseMatrix<double>;
using ComplexMatrix = DenseMatrix<cplx>;

/// Dyson index with the derived gamma (determinant power) and zeta
/// (supermatrix block size) parameters.
class SymmetryClass {
 public:
  static SymmetryClass from_beta(int beta) {
    if (beta != 1 && beta != 2 && beta != 4) {
      throw DomainError("Dyson index must be 1, 2 or 4, got " + std::to_string(beta));
    }
    return SymmetryClass(beta);
  }
  static SymmetryClass orthogonal() { return SymmetryClass(1); }
  static SymmetryClass unitary() { return SymmetryClass(2); }
  static SymmetryClass symplectic() { return SymmetryClass(4); }

  int beta() const { return beta_; }
  int gamma() const { return beta_ == 4 ? 2 : 1; }
  int zeta() const { return beta_ == 2 ? 2 : 4; }
  bool operator==(const SymmetryClass&) const = default;

 private:
  explicit SymmetryClass(int beta) : beta_(beta) {}
  int beta_;
};

/// Number of independent real matrix elements, N + (beta/2) N (N - 1).
inline int degrees_of_freedom(SymmetryClass cls, int n) {
  if (n < 1) throw DomainError("matrix dimension must be positive");
  return n + cls.beta() * n * (n - 1) / 2;
}

/// Diagonal external field H0. For beta = 4 each entry stands for a
/// Kramers pair.
class ExternalField {
 public:
  ExternalField() = default;
  explicit ExternalField(std::vector<double> entries) : entries_(std::move(entries)) {
    for (double e : entries_) {
      if (!std::isfinite(e)) throw DomainError("external field entries must be finite");
    }
    min_gap_ = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < entries_.size(); ++i)
      for (std::size_t j = i + 1; j < entries_.size(); ++j)
        min_gap_ = std::min(min_gap_, std::abs(entries_[i] - entries_[j]));
  }
  static ExternalField zero(int n) { return ExternalField(std::vector<double>(n, 0.0)); }

  const std::vector<double>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  double operator[](std::size_t i) const { return entries_[i]; }
  /// min |H0_n - H0_m| over n != m; infinity for a single entry.
  double min_gap() const { return min_gap_; }
  bool distinct(double tol = 0.0) const { return min_gap_ > tol; }
  double spread() const {
    if (entries_.empty()) return 0.0;
    auto [lo, hi] = std::minmax_element(entries_.begin(), entries_.end());
    return *hi - *lo;
  }

 private:
  std::vector<double> entries_;
  double min_gap_ = std::numeric_limits<double>::infinity();
};

/// A random matrix with its symmetry structure. beta = 1 stores a real
/// symmetric N x N matrix, beta = 2 a complex Hermitian N x N matrix and
/// beta = 4 a complex 2N x 2N matrix built from 2 x 2 quaternion blocks.
class RandomMatrix {
 public:
  RandomMatrix(SymmetryClass cls, int n)
      : cls_(cls), n_(n) {
    if (n < 1) throw DomainError("matrix dimension must be positive");
    if (cls.beta() == 1) {
      storage_ = RealMatrix(n, n);
    } else {
      const std::size_t dim = cls.beta() == 4 ? 2 * n : n;
      storage_ = ComplexMatrix(dim, dim);
    }
  }

  SymmetryClass symmetry() const { return cls_; }
  int n() const { return n_; }
  std::size_t storage_dim() const { return cls_.beta() == 4 ? 2 * n_ : n_; }
  bool is_real() const { return std::holds_alternative<RealMatrix>(storage_); }
  RealMatrix& real() { return std::get<RealMatrix>(storage_); }
  const RealMatrix& real() const { return std::get<RealMatrix>(storage_); }
  ComplexMatrix& complex() { return std::get<ComplexMatrix>(storage_); }
  const ComplexMatrix& complex() const { return std::get<ComplexMatrix>(storage_); }

  void scale(double s) {
    std::visit([s](auto& m) {
      for (auto& x : m.data()) x *= s;
    }, storage_);
  }

  /// Adds alpha * other in place (same symmetry and size).
  void add_scaled(const RandomMatrix& other, double alpha) {
    if (!(other.cls_ == cls_) || other.n_ != n_) throw DomainError("matrix shape mismatch");
    std::visit([&](auto& m) {
      using M = std::decay_t<decltype(m)>;
      const auto& o = std::get<M>(other.storage_);
      auto dst = m.data();
      auto src = o.data();
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += alpha * src[i];
    }, storage_);
  }

  /// Adds the diagonal field; for beta = 4 both members of each Kramers
  /// pair receive the same entry.
  void add_field(const ExternalField& field) {
    if (field.size() != static_cast<std::size_t>(n_)) {
      throw DomainError("external field length does not match N");
    }
    std::visit([&](auto& m) {
      const int rep = cls_.beta() == 4 ? 2 : 1;
      for (int i = 0; i < n_; ++i)
        for (int r = 0; r < rep; ++r) m(rep * i + r, rep * i + r) += field[i];
    }, storage_);
  }

 private:
  SymmetryClass cls_;
  int n_;
  std::variant<RealMatrix, ComplexMatrix> storage_;
};

/// Tr H^2 with Tr = tr for beta = 1, 2 and Tr = tr / 2 for beta = 4.
inline double trace_norm_sq(const RandomMatrix& h) {
  double s = 0.0;
  if (h.is_real()) {
    for (double x : h.real().data()) s += x * x;
  } else {
    for (const cplx& x : h.complex().data()) s += std::norm(x);
  }
  return h.symmetry().beta() == 4 ? 0.5 * s : s;
}

namespace detail {

// Quaternion q0 + q1 i + q2 j + q3 k as the 2 x 2 complex block
// [[q0 + i q1, q2 + i q3], [-q2 + i q3, q0 - i q1]].
inline void put_quaternion(ComplexMatrix& m, std::size_t bi, std::size_t bj, double q0, double q1,
                           double q2, double q3) {
  const std::size_t r = 2 * bi, c = 2 * bj;
  m(r, c) = {q0, q1};
  m(r, c + 1) = {q2, q3};
  m(r + 1, c) = {-q2, q3};
  m(r + 1, c + 1) = {q0, -q1};
  // self-dual partner block is the quaternion conjugate, i.e. the adjoint
  m(c, r) = {q0, -q1};
  m(c, r + 1) = {-q2, -q3};
  m(c + 1, r) = {q2, -q3};
  m(c + 1, r + 1) = {q0, q1};
}

}  // namespace detail

/// Draws H with density proportional to exp(-(beta / 4 v^2) Tr H^2).
inline RandomMatrix sample_gaussian(SymmetryClass cls, int n, double v, Rng& rng) {
  if (!(v > 0.0)) throw DomainError("Gaussian variance parameter must be positive");
  RandomMatrix h(cls, n);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double v2 = v * v;
  switch (cls.beta()) {
    case 1: {
      auto& m = h.real();
      const double sd_diag = std::sqrt(2.0 * v2), sd_off = v;
      for (int i = 0; i < n; ++i) {
        m(i, i) = sd_diag * normal(rng);
        for (int j = i + 1; j < n; ++j) m(i, j) = m(j, i) = sd_off * normal(rng);
      }
      break;
    }
    case 2: {
      auto& m = h.complex();
      const double sd_diag = v, sd_off = v / std::sqrt(2.0);
      for (int i = 0; i < n; ++i) {
        m(i, i) = sd_diag * normal(rng);
        for (int j = i + 1; j < n; ++j) {
          const double re = sd_off * normal(rng);
          const double im = sd_off * normal(rng);
          m(i, j) = {re, im};
          m(j, i) = {re, -im};
        }
      }
      break;
    }
    default: {
      auto& m = h.complex();
      const double sd_diag = v / std::sqrt(2.0), sd_off = v / 2.0;
      for (int i = 0; i < n; ++i) {
        const double d = sd_diag * normal(rng);
        m(2 * i, 2 * i) = d;
        m(2 * i + 1, 2 * i + 1) = d;
        for (int j = i + 1; j < n; ++j) {
          const double q0 = sd_off * normal(rng);
          const double q1 = sd_off * normal(rng);
          const double q2 = sd_off * normal(rng);
          const double q3 = sd_off * normal(rng);
          detail::put_quaternion(m, i, j, q0, q1, q2, q3);
        }
      }
      break;
    }
  }
  return h;
}

}  // namespace nrmt
