#pragma once

// Correlation kernel of the unitary Gaussian ensemble in a diagonal
// external field: closed form, two independent quadrature oracles and the
// degenerate-field (pure GUE) limit. Variance s2 = t alpha^2 throughout.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "nrmt/errors.hpp"
#include "nrmt/matrix.hpp"
#include "nrmt/quad.hpp"
#include "nrmt/specfun.hpp"

namespace nrmt {

class KernelContext {
 public:
  KernelContext(ExternalField field, double variance, double gap_tol_rel = 1e-8)
      : field_(std::move(field)), variance_(variance) {
    if (!(variance > 0.0) || !std::isfinite(variance)) {
      throw DomainError("kernel variance t alpha^2 must be positive");
    }
    if (field_.size() == 0) throw DomainError("external field must have at least one entry");
    gap_tol_ = gap_tol_rel * std::max(std::sqrt(variance), field_.spread());
  }

  int n() const { return static_cast<int>(field_.size()); }
  double variance() const { return variance_; }
  double sigma() const { return std::sqrt(variance_); }
  const ExternalField& field() const { return field_; }
  double min_gap() const { return field_.min_gap(); }
  double gap_tol() const { return gap_tol_; }
  bool distinct() const { return field_.distinct(gap_tol_); }

 private:
  ExternalField field_;
  double variance_;
  double gap_tol_;
};

namespace detail {

inline long double gauss_density_ld(long double x, long double var) {
  return std::exp(-x * x / (2.0L * var)) / std::sqrt(2.0L * static_cast<long double>(M_PI) * var);
}

}  // namespace detail

/// C_N(x_p, x_q) = sum_n G(x_p - h_n) sum_{m<N} (s2/2)^(m/2) H_m((x_q - h_n)/sqrt(2 s2))
///                 e_m({1/(h_n - h_m')}_{m' != n}),
/// with G the centred Gaussian density of variance s2. Accumulated in
/// long double because the reciprocals grow as the field entries approach
/// each other.
inline double kernel_closed_form(const KernelContext& ctx, double xp, double xq) {
  if (!ctx.distinct()) {
    throw DegenerateFieldError("external field entries closer than the gap tolerance; use "
                               "kernel_gue_limit or separate the entries");
  }
  const int n = ctx.n();
  const auto& h = ctx.field().entries();
  const long double var = ctx.variance();
  const long double scale = std::sqrt(var / 2.0L);
  const long double root2var = std::sqrt(2.0L * var);
  long double total = 0.0L;
  std::vector<long double> e(n);
  for (int i = 0; i < n; ++i) {
    // elementary symmetric polynomials of the reciprocals
    std::fill(e.begin(), e.end(), 0.0L);
    e[0] = 1.0L;
    int count = 0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const long double r = 1.0L / (static_cast<long double>(h[i]) - h[j]);
      ++count;
      for (int m = count; m >= 1; --m) e[m] += r * e[m - 1];
    }
    const long double z = (static_cast<long double>(xq) - h[i]) / root2var;
    long double hm_prev = 1.0L, hm = 2.0L * z;
    long double inner = e[0];
    long double pw = 1.0L;
    for (int m = 1; m < n; ++m) {
      pw *= scale;
      if (m >= 2) {
        const long double next = 2.0L * z * hm - 2.0L * (m - 1) * hm_prev;
        hm_prev = hm;
        hm = next;
      }
      inner += pw * hm * e[m];
    }
    total += detail::gauss_density_ld(static_cast<long double>(xp) - h[i], var) * inner;
  }
  return static_cast<double>(total);
}

/// Oracle with the s1 integral done by the delta reduction and the s2
/// integral by quadrature. The s2 contour is shifted by -i x_q (the
/// integrand is entire with Gaussian decay), which turns the weight into
/// exp(-s^2 / 2 s2):
///   C = sum_n G(x_p - h_n) (2 pi s2)^(-1/2) int ds exp(-s^2/2 s2)
///         Re prod_{m' != n} (1 + (x_q - h_n + i s) / (h_n - h_m')).
inline double kernel_oracle_semi(const KernelContext& ctx, double xp, double xq) {
  const int n = ctx.n();
  const auto& h = ctx.field().entries();
  const double var = ctx.variance();
  const double sig = ctx.sigma();
  QuadratureSpec spec;
  spec.abs_tol = 1e-300;
  spec.rel_tol = 1e-12;
  spec.max_evals = 400000;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const double weight = std::exp(-(xp - h[i]) * (xp - h[i]) / (2.0 * var)) /
                          std::sqrt(2.0 * M_PI * var);
    if (weight == 0.0) continue;
    auto integrand = [&](double s) {
      std::complex<double> prod(1.0, 0.0);
      const std::complex<double> shift(xq - h[i], s);
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        prod *= 1.0 + shift / (h[i] - h[j]);
      }
      return std::exp(-s * s / (2.0 * var)) * prod.real();
    };
    const double integral = integrate_real_line(integrand, 0.0, spec, sig).value;
    total += weight * integral / std::sqrt(2.0 * M_PI * var);
  }
  return total;
}

struct EpsOracleResult {
  double value;                   // extrapolated to eps -> 0
  std::array<double, 3> raw;      // at eps, eps/2, eps/4
  std::array<double, 3> eps;
};

/// The literal double integral at finite imaginary increment eps:
///   C_eps = -1/(2 pi^2 s2) int ds1 ds2 exp((i s2 - x_q)^2/2 s2 - (s1 - x_p)^2/2 s2) / (s1 - i s2)
///           (F(s1 - i eps) - F(s1 + i eps)) / 2i,   F(z) = prod_n (i s2 - h_n)/(z - h_n).
inline double kernel_eps_raw(const KernelContext& ctx, double xp, double xq, double eps) {
  if (!(eps > 0.0)) throw DomainError("eps must be positive");
  const double var = ctx.variance();
  const double sig = ctx.sigma();
  // The Jacobian 1/(s1 - i s2) is singular at the origin; a field entry
  // there adds eps log(eps) terms that defeat the extrapolation. The kernel
  // is translation covariant, so evaluate in a frame where every entry
  // keeps a distance of sig/4 from the origin.
  std::vector<double> h = ctx.field().entries();
  auto clearance = [&](double a) {
    double m = std::numeric_limits<double>::infinity();
    for (double x : h) m = std::min(m, std::abs(x - a));
    return m;
  };
  double shift = 0.0;
  if (clearance(0.0) < 0.25 * sig) {
    double best = clearance(0.0);
    for (int k = 1; k <= 200 && best < 0.25 * sig; ++k)
      for (double a : {k * 0.05 * sig, -k * 0.05 * sig})
        if (clearance(a) > best) {
          best = clearance(a);
          shift = a;
        }
  }
  for (double& x : h) x -= shift;
  xp -= shift;
  xq -= shift;
  QuadratureSpec inner_spec;
  inner_spec.abs_tol = 1e-14;
  inner_spec.rel_tol = 1e-10;
  inner_spec.max_evals = 2000000;
  QuadratureSpec outer_spec = inner_spec;
  outer_spec.abs_tol = 1e-13;
  outer_spec.rel_tol = 1e-8;

  double lo = xp, hi = xp;
  for (double x : h) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  lo -= 12.0 * sig;
  hi += 12.0 * sig;
  std::vector<double> breaks(h.begin(), h.end());
  breaks.push_back(0.0);
  // resolve the Lorentzians of width eps around each pole
  for (double x : h) {
    for (double k : {-30.0, -3.0, 3.0, 30.0}) breaks.push_back(x + k * eps);
  }
  const std::complex<double> I(0.0, 1.0);

  auto inner = [&](double s2) {
    const std::complex<double> a = I * s2;
    const std::complex<double> gq = std::exp((a - xq) * (a - xq) / (2.0 * var));
    auto f = [&](double s1) {
      std::complex<double> fm(1.0, 0.0), fp(1.0, 0.0);
      for (double hn : h) {
        fm *= (a - hn) / (std::complex<double>(s1, -eps) - hn);
        fp *= (a - hn) / (std::complex<double>(s1, eps) - hn);
      }
      const std::complex<double> im_part = (fm - fp) / (2.0 * I);
      const std::complex<double> val = gq * std::exp(-(s1 - xp) * (s1 - xp) / (2.0 * var)) /
                                       (std::complex<double>(s1, -s2)) * im_part;
      return val.real();
    };
    // the integrand carries the factor |gq|, which sets its roundoff floor
    QuadratureSpec spec = inner_spec;
    spec.abs_tol *= std::max(1.0, std::abs(gq));
    return integrate_with_breaks(f, lo, hi, breaks, spec).value;
  };
  auto outer = [&](double s2) { return inner(s2); };
  // integrand in s2 decays like exp(-s2^2 / 2 s2var); split at 0
  const double val = integrate_with_breaks(outer, -12.0 * sig - std::abs(xq), 12.0 * sig + std::abs(xq),
                                           {0.0}, outer_spec)
                         .value;
  return -val / (2.0 * M_PI * M_PI * var);
}

/// eps-regularized oracle extrapolated quadratically in eps over
/// eps, eps/2, eps/4 (eps relative to sqrt(variance)).
inline EpsOracleResult kernel_oracle_eps(const KernelContext& ctx, double xp, double xq,
                                         double eps_rel = 1e-2) {
  EpsOracleResult r{};
  for (int i = 0; i < 3; ++i) {
    r.eps[i] = eps_rel * ctx.sigma() / static_cast<double>(1 << i);
    r.raw[i] = kernel_eps_raw(ctx, xp, xq, r.eps[i]);
  }
  // Richardson for c0 + c1 eps + c2 eps^2 with ratio 2
  const double r1a = 2.0 * r.raw[1] - r.raw[0];
  const double r1b = 2.0 * r.raw[2] - r.raw[1];
  r.value = (4.0 * r1b - r1a) / 3.0;
  return r;
}

/// Kernel at a fully degenerate field H0 = 0:
///   G(x_p) sum_{k<N} He_k(x_p/s) He_k(x_q/s) / k!,   s = sqrt(variance).
/// This is the limit of kernel_closed_form; it differs from the symmetric
/// Hermite kernel by the factor sqrt(G(x_p)/G(x_q)), which cancels in
/// every determinant.
inline double kernel_gue_limit(int n, double variance, double xp, double xq) {
  if (n < 1) throw DomainError("N must be positive");
  if (!(variance > 0.0)) throw DomainError("variance must be positive");
  const long double s = std::sqrt(static_cast<long double>(variance));
  const long double a = xp / s, b = xq / s;
  // normalized probabilists' Hermite: p_k = He_k / sqrt(k!)
  long double pa_prev = 0.0L, pa = 1.0L, pb_prev = 0.0L, pb = 1.0L;
  long double sum = 1.0L;
  for (int k = 1; k < n; ++k) {
    const long double na = (a * pa - std::sqrt(static_cast<long double>(k - 1)) * pa_prev) /
                           std::sqrt(static_cast<long double>(k));
    const long double nb = (b * pb - std::sqrt(static_cast<long double>(k - 1)) * pb_prev) /
                           std::sqrt(static_cast<long double>(k));
    pa_prev = pa;
    pa = na;
    pb_prev = pb;
    pb = nb;
    sum += pa * pb;
  }
  return static_cast<double>(detail::gauss_density_ld(xp, variance) * sum);
}

}  // namespace nrmt
