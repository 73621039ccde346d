#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "nrmt/errors.hpp"
#include "nrmt/quad.hpp"

namespace nrmt {

/// ln Gamma(x) for x > 0 (Lanczos, g = 7, nine terms; about 15 digits).
inline double ln_gamma(double x) {
  if (!(x > 0.0)) throw DomainError("ln_gamma requires a positive argument");
  static constexpr std::array<double, 9> kCoef = {
      0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
      771.32342877765313,      -176.61502916214059,   12.507343278686905,
      -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};
  if (x < 0.5) {
    // reflection keeps the series in its accurate range
    return std::log(M_PI / std::sin(M_PI * x)) - ln_gamma(1.0 - x);
  }
  const double xm = x - 1.0;
  double sum = kCoef[0];
  for (int i = 1; i < 9; ++i) sum += kCoef[i] / (xm + i);
  const double t = xm + 7.5;
  return 0.5 * std::log(2.0 * M_PI) + (xm + 0.5) * std::log(t) - t + std::log(sum);
}

inline double gamma_fn(double x) { return std::exp(ln_gamma(x)); }

/// Rising factorial (x)_n = x (x+1) ... (x+n-1).
inline double rising_factorial(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x + i;
  return r;
}

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// Physicists' Hermite polynomial H_m(z) by the three-term recurrence.
inline double hermite_phys(int m, double z) {
  if (m < 0) throw DomainError("Hermite degree must be nonnegative");
  double h0 = 1.0;
  if (m == 0) return h0;
  double h1 = 2.0 * z;
  for (int k = 1; k < m; ++k) {
    const double h2 = 2.0 * z * h1 - 2.0 * k * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

/// ln D_p(z) for negative order p, from
///   D_{-a}(z) = exp(-z^2/4) / Gamma(a) * int_0^inf t^(a-1) exp(-z t - t^2/2) dt.
/// The integrand is scaled by its maximum so that large |z| and a do not
/// overflow or underflow.
inline double log_parabolic_cylinder_D(double p, double z) {
  if (!(p < 0.0)) {
    throw UnsupportedError("parabolic_cylinder_D is implemented for negative orders only");
  }
  const double a = -p;
  auto phase = [&](double t) { return (a - 1.0) * std::log(t) - z * t - 0.5 * t * t; };
  QuadratureSpec spec;
  spec.abs_tol = 1e-300;
  spec.rel_tol = 1e-13;
  double log_scale = 0.0;
  double peak = 0.0;
  if (a > 1.0) {
    peak = 0.5 * (-z + std::sqrt(z * z + 4.0 * (a - 1.0)));
    log_scale = phase(peak);
  }
  auto integrand = [&](double t) {
    if (t <= 0.0) return 0.0;
    return std::exp(phase(t) - log_scale);
  };
  QuadratureResult total;
  if (a > 1.0) {
    const double width = 1.0 / std::sqrt((a - 1.0) / (peak * peak) + 1.0);
    total = integrate_finite(integrand, 0.0, peak, spec);
    const auto tail = integrate_semi_infinite(integrand, peak, spec, {}, 4.0 * width);
    total.value += tail.value;
  } else {
    // t^(a-1) endpoint behaviour at zero
    const double width = z > 0.0 ? std::min(1.0, 1.0 / z) : std::max(1.0, -z);
    total = integrate_semi_infinite(integrand, 0.0, spec, {a, 1.0}, width);
  }
  return -0.25 * z * z + log_scale + std::log(total.value) - ln_gamma(a);
}

inline double parabolic_cylinder_D(double p, double z) {
  return std::exp(log_parabolic_cylinder_D(p, z));
}

/// Table of elementary symmetric polynomials e_0..e_n of a value list,
/// grown one value at a time by e_m(v + {x}) = e_m(v) + x e_{m-1}(v).
class SymmetricPolyTable {
 public:
  SymmetricPolyTable() : table_{1.0} {}
  explicit SymmetricPolyTable(std::span<const double> values) : SymmetricPolyTable() {
    for (double v : values) add(v);
  }

  void add(double x) {
    values_.push_back(x);
    table_.push_back(0.0);
    for (std::size_t m = table_.size() - 1; m > 0; --m) table_[m] += x * table_[m - 1];
  }

  /// e_m; zero for m beyond the number of values.
  double operator[](std::size_t m) const { return m < table_.size() ? table_[m] : 0.0; }
  std::size_t size() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& table() const { return table_; }

 private:
  std::vector<double> values_;
  std::vector<double> table_;
};

inline double elementary_symmetric(std::span<const double> values, int m) {
  if (m < 0 || static_cast<std::size_t>(m) > values.size()) {
    throw DomainError("elementary_symmetric: order out of range");
  }
  return SymmetricPolyTable(values)[static_cast<std::size_t>(m)];
}

}  // namespace nrmt
