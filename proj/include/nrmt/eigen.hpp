#pragma once

// Dense Hermitian eigensolver: Householder reduction to real symmetric
// tridiagonal form followed by implicit-shift QL. Cyclic Jacobi is kept as
// a fallback when QL fails to converge.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <type_traits>
#include <vector>

#include "nrmt/errors.hpp"
#include "nrmt/matrix.hpp"

namespace nrmt {

template <class T>
struct HermitianEigen {
  std::vector<double> values;  // ascending
  DenseMatrix<T> vectors;      // columns; empty unless requested
};

namespace detail {

template <class T>
double re(const T& x) {
  if constexpr (std::is_same_v<T, double>) {
    return x;
  } else {
    return x.real();
  }
}

template <class T>
T conj_of(const T& x) {
  if constexpr (std::is_same_v<T, double>) {
    return x;
  } else {
    return std::conj(x);
  }
}

template <class T>
double abs2(const T& x) {
  if constexpr (std::is_same_v<T, double>) {
    return x * x;
  } else {
    return std::norm(x);
  }
}

// Implicit QL on a symmetric tridiagonal matrix (diagonal d, subdiagonal
// e[0..n-2]). When z is non-null its columns are rotated along. Returns
// false if some eigenvalue needs more than 50 sweeps.
inline bool tridiagonal_ql(std::vector<double>& d, std::vector<double>& e, RealMatrix* z) {
  const int n = static_cast<int>(d.size());
  if (n == 0) return true;
  e.resize(n, 0.0);
  e[n - 1] = 0.0;
  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
      }
      if (m != l) {
        if (++iter > 50) return false;
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + (g >= 0.0 ? std::abs(r) : -std::abs(r)));
        double s = 1.0, c = 1.0, p = 0.0;
        int i;
        for (i = m - 1; i >= l; --i) {
          double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          if (z) {
            for (int k = 0; k < n; ++k) {
              f = (*z)(k, i + 1);
              (*z)(k, i + 1) = s * (*z)(k, i) + c * f;
              (*z)(k, i) = c * (*z)(k, i) - s * f;
            }
          }
        }
        if (r == 0.0 && i >= l) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
  return true;
}

// Householder reduction of Hermitian a (overwritten) to tridiagonal form.
// On return d holds the diagonal, e the (complex) subdiagonal, and q (if
// requested) the accumulated unitary with a = q t q^dagger.
template <class T>
void householder_tridiagonalize(DenseMatrix<T>& a, std::vector<double>& d, std::vector<T>& e,
                                DenseMatrix<T>* q) {
  const std::size_t n = a.rows();
  std::vector<T> v(n), p(n), w(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double xnorm2 = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) xnorm2 += abs2(a(i, k));
    const double xnorm = std::sqrt(xnorm2);
    if (xnorm == 0.0) continue;
    const T x0 = a(k + 1, k);
    const double ax0 = std::sqrt(abs2(x0));
    const T phase = ax0 > 0.0 ? x0 / ax0 : T(1);
    const T alpha = -phase * xnorm;
    // v = x - alpha e1, normalized
    std::fill(v.begin(), v.end(), T(0));
    for (std::size_t i = k + 1; i < n; ++i) v[i] = a(i, k);
    v[k + 1] -= alpha;
    double vnorm2 = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) vnorm2 += abs2(v[i]);
    if (vnorm2 == 0.0) continue;
    const double vinv = 1.0 / std::sqrt(vnorm2);
    for (std::size_t i = k + 1; i < n; ++i) v[i] *= vinv;
    // p = A22 v, K = v^dagger p (real), w = p - K v
    for (std::size_t i = k + 1; i < n; ++i) {
      T s(0);
      for (std::size_t j = k + 1; j < n; ++j) s += a(i, j) * v[j];
      p[i] = s;
    }
    double kk = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) kk += re(conj_of(v[i]) * p[i]);
    for (std::size_t i = k + 1; i < n; ++i) w[i] = p[i] - kk * v[i];
    // A22 <- A22 - 2 (v w^dagger + w v^dagger)
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j)
        a(i, j) -= 2.0 * (v[i] * conj_of(w[j]) + w[i] * conj_of(v[j]));
    // column/row k become alpha e1
    a(k + 1, k) = alpha;
    a(k, k + 1) = conj_of(alpha);
    for (std::size_t i = k + 2; i < n; ++i) {
      a(i, k) = T(0);
      a(k, i) = T(0);
    }
    if (q) {
      // q <- q (I - 2 v v^dagger)
      for (std::size_t r = 0; r < n; ++r) {
        T s(0);
        for (std::size_t j = k + 1; j < n; ++j) s += (*q)(r, j) * v[j];
        for (std::size_t j = k + 1; j < n; ++j) (*q)(r, j) -= 2.0 * s * conj_of(v[j]);
      }
    }
  }
  d.resize(n);
  e.assign(n > 0 ? n - 1 : 0, T(0));
  for (std::size_t i = 0; i < n; ++i) d[i] = re(a(i, i));
  for (std::size_t i = 0; i + 1 < n; ++i) e[i] = a(i + 1, i);
}

// Cyclic Jacobi for Hermitian matrices.
template <class T>
bool jacobi_hermitian(DenseMatrix<T> a, std::vector<double>& values, DenseMatrix<T>* vecs) {
  const std::size_t n = a.rows();
  if (vecs) *vecs = DenseMatrix<T>::identity(n);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0, diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      diag += abs2(a(i, i));
      for (std::size_t j = i + 1; j < n; ++j) off += abs2(a(i, j));
    }
    if (off <= 1e-32 * std::max(diag, 1e-300)) {
      values.resize(n);
      for (std::size_t i = 0; i < n; ++i) values[i] = re(a(i, i));
      return true;
    }
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double mag = std::sqrt(abs2(a(p, q)));
        if (mag == 0.0) continue;
        const T u = a(p, q) / mag;
        const double tau = (re(a(q, q)) - re(a(p, p))) / (2.0 * mag);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // J: J_pp = c, J_pq = s u, J_qp = -s conj(u), J_qq = c; a <- J^dagger a J
        for (std::size_t k = 0; k < n; ++k) {
          const T akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * conj_of(u) * akq;
          a(k, q) = s * u * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const T apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * u * aqk;
          a(q, k) = s * conj_of(u) * apk + c * aqk;
        }
        if (vecs) {
          for (std::size_t k = 0; k < n; ++k) {
            const T vkp = (*vecs)(k, p), vkq = (*vecs)(k, q);
            (*vecs)(k, p) = c * vkp - s * conj_of(u) * vkq;
            (*vecs)(k, q) = s * u * vkp + c * vkq;
          }
        }
      }
    }
  }
  return false;
}

template <class T>
void sort_eigen(HermitianEigen<T>& out, bool with_vectors) {
  const std::size_t n = out.values.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](auto i, auto j) { return out.values[i] < out.values[j]; });
  std::vector<double> vals(n);
  for (std::size_t i = 0; i < n; ++i) vals[i] = out.values[idx[i]];
  out.values = std::move(vals);
  if (with_vectors) {
    DenseMatrix<T> v(n, n);
    for (std::size_t c = 0; c < n; ++c)
      for (std::size_t r = 0; r < n; ++r) v(r, c) = out.vectors(r, idx[c]);
    out.vectors = std::move(v);
  }
}

}  // namespace detail

/// Eigen decomposition of a Hermitian (or real symmetric) matrix. Only the
/// lower triangle's Hermitian partner structure is assumed, not checked.
template <class T>
HermitianEigen<T> hermitian_eigen(DenseMatrix<T> a, bool with_vectors = false) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw DomainError("eigensolver needs a square matrix");
  HermitianEigen<T> out;
  if (n == 0) return out;
  const DenseMatrix<T> original = a;
  DenseMatrix<T> q;
  if (with_vectors) q = DenseMatrix<T>::identity(n);
  std::vector<double> d;
  std::vector<T> e;
  detail::householder_tridiagonalize(a, d, e, with_vectors ? &q : nullptr);

  // unitary diagonal similarity making the subdiagonal real and nonnegative
  std::vector<double> er(n, 0.0);
  std::vector<T> phase(n, T(1));
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double m = std::sqrt(detail::abs2(e[i]));
    er[i] = m;
    phase[i + 1] = m > 0.0 ? phase[i] * (e[i] / m) : phase[i];
  }
  RealMatrix z;
  if (with_vectors) z = RealMatrix::identity(n);
  if (!detail::tridiagonal_ql(d, er, with_vectors ? &z : nullptr)) {
    if (!detail::jacobi_hermitian(original, out.values,
                                  with_vectors ? &out.vectors : nullptr)) {
      throw NumericError("eigensolver failed to converge");
    }
    detail::sort_eigen(out, with_vectors);
    return out;
  }
  out.values = std::move(d);
  if (with_vectors) {
    out.vectors = DenseMatrix<T>(n, n);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) {
        T s(0);
        for (std::size_t j = 0; j < n; ++j) s += q(r, j) * phase[j] * z(j, c);
        out.vectors(r, c) = s;
      }
  }
  detail::sort_eigen(out, with_vectors);
  return out;
}

/// Eigenvalues of H, ascending. For beta = 4 the Kramers-degenerate pairs
/// are collapsed so exactly N values are returned.
inline std::vector<double> eigenvalues(const RandomMatrix& h) {
  std::vector<double> raw = h.is_real() ? hermitian_eigen(h.real()).values
                                        : hermitian_eigen(h.complex()).values;
  if (h.symmetry().beta() != 4) return raw;
  std::vector<double> out(raw.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = 0.5 * (raw[2 * i] + raw[2 * i + 1]);
  return out;
}

/// Raw 2N eigenvalues for beta = 4 (for degeneracy diagnostics); same as
/// eigenvalues() otherwise.
inline std::vector<double> raw_eigenvalues(const RandomMatrix& h) {
  return h.is_real() ? hermitian_eigen(h.real()).values : hermitian_eigen(h.complex()).values;
}

}  // namespace nrmt
