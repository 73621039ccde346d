#pragma once

// k-point correlation functions: the unitary Gaussian ensemble in an
// external field as a kernel determinant, the norm-dependent unitary
// ensemble as its spread mixture, and the generic-beta rescaling formula
// driven by a Gaussian-ensemble oracle.

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "nrmt/densities.hpp"
#include "nrmt/errors.hpp"
#include "nrmt/kernel.hpp"
#include "nrmt/spread.hpp"

namespace nrmt {

/// Determinant of a small dense matrix by partial-pivot elimination.
inline double determinant(std::vector<double> a, std::size_t k) {
  double det = 1.0;
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < k; ++r)
      if (std::abs(a[r * k + c]) > std::abs(a[piv * k + c])) piv = r;
    if (a[piv * k + c] == 0.0) return 0.0;
    if (piv != c) {
      for (std::size_t j = 0; j < k; ++j) std::swap(a[c * k + j], a[piv * k + j]);
      det = -det;
    }
    det *= a[c * k + c];
    for (std::size_t r = c + 1; r < k; ++r) {
      const double f = a[r * k + c] / a[c * k + c];
      for (std::size_t j = c; j < k; ++j) a[r * k + j] -= f * a[c * k + j];
    }
  }
  return det;
}

namespace detail {

inline void check_points(std::span<const double> points, std::size_t n) {
  if (points.empty()) throw DomainError("need at least one point (k >= 1)");
  if (points.size() > n) throw DomainError("k must not exceed N");
}

}  // namespace detail

/// R_k = det[C_N(x_p, x_q)] for H0 + alpha H, H unitary Gaussian, at
/// kernel variance t alpha^2 = `variance`. The points are sorted first (a
/// simultaneous row and column permutation), so R_k is symmetric in its
/// arguments bit for bit, not only up to rounding. A field with all entries
/// equal uses the shifted Hermite kernel; a partly degenerate one throws.
inline double corr_gue(std::span<const double> points, double variance, const ExternalField& field) {
  detail::check_points(points, field.size());
  const KernelContext ctx(field, variance);
  std::vector<double> x(points.begin(), points.end());
  std::sort(x.begin(), x.end());
  const std::size_t k = x.size();
  std::vector<double> m(k * k);
  const auto& h = field.entries();
  const bool equal = h.size() > 1 && std::all_of(h.begin(), h.end(), [&](double e) { return e == h.front(); });
  for (std::size_t p = 0; p < k; ++p)
    for (std::size_t q = 0; q < k; ++q)
      m[p * k + q] = equal ? kernel_gue_limit(ctx.n(), variance, x[p] - h.front(), x[q] - h.front())
                           : kernel_closed_form(ctx, x[p], x[q]);
  return determinant(std::move(m), k);
}

/// R_k of the norm-dependent unitary ensemble: int dt f(t) det[C_N(t alpha^2)].
/// No (2 pi t)^(-k) factor: the exact N = 1 case and int R_1 = N fix the
/// normalization to this form.
inline double corr_tue(std::span<const double> points, const SpreadFunction& spread, double alpha,
                       const ExternalField& field) {
  if (!(alpha > 0.0)) throw DomainError("coupling alpha must be positive");
  detail::check_points(points, field.size());
  auto g = [&](double t) { return corr_gue(points, t * alpha * alpha, field); };
  return mix_general(spread, 2, g).value;
}

inline double corr_tue(std::span<const double> points, const NormDensity& density, double alpha,
                       const ExternalField& field) {
  if (density.beta() != 2) throw UnsupportedError("corr_tue needs beta = 2");
  if (field.size() != static_cast<std::size_t>(density.n())) {
    throw DomainError("external field length does not match N");
  }
  SpreadFunction spread;
  try {
    spread = spread_for_family(density);
  } catch (const UnavailableError& e) {
    throw UnavailableError(std::string(e.what()) +
                           "; estimate the correlation functions by Monte Carlo (mc-validate)");
  }
  return corr_tue(points, spread, alpha, field);
}

/// R_k^(G beta)(y_1..y_k; field') of the Gaussian ensemble with v^2 = 1/2
/// at the coupling alpha baked into the oracle.
using GaussianOracle = std::function<double(std::span<const double>, const ExternalField&)>;

/// Analytic oracle for beta = 2: kernel variance alpha^2 / 2.
inline GaussianOracle gue_oracle(double alpha) {
  return [alpha](std::span<const double> y, const ExternalField& f) {
    return corr_gue(y, 0.5 * alpha * alpha, f);
  };
}

/// int dt f(t) (2t)^(-k/2) R_k^(G beta)(x / sqrt(2t); alpha, H0 / sqrt(2t)).
/// Oracles that are only piecewise smooth (interpolated histograms) need a
/// looser `spec` than the default.
inline double corr_rescaled_generic(std::span<const double> points, const SpreadFunction& spread,
                                    const ExternalField& field, const GaussianOracle& oracle,
                                    int beta = 2,
                                    const QuadratureSpec& spec = detail::spread_quadrature()) {
  if (points.empty()) throw DomainError("need at least one point (k >= 1)");
  const std::size_t k = points.size();
  std::vector<double> y(k);
  std::vector<double> h(field.size());
  auto g = [&](double t) {
    const double r = 1.0 / std::sqrt(2.0 * t);
    for (std::size_t i = 0; i < k; ++i) y[i] = points[i] * r;
    for (std::size_t i = 0; i < h.size(); ++i) h[i] = field[i] * r;
    return std::pow(r, static_cast<double>(k)) * oracle(y, ExternalField(h));
  };
  return mix_general(spread, beta, g, 0.2, spec).value;
}

}  // namespace nrmt
