#pragma once

// Norm-dependent density families P(u), u = Tr H^2: normalization fixed by
// the zeroth moment, radial moments, Fourier transform, and the angular
// Vandermonde integral.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "nrmt/errors.hpp"
#include "nrmt/matrix.hpp"
#include "nrmt/quad.hpp"
#include "nrmt/specfun.hpp"

namespace nrmt {

/// exp(-(beta / 4 v^2) u)
struct Gaussian {
  double v;
};
/// Theta(a1 - u)
struct BoundTrace {
  double a1;
};
/// delta(a1 - u)
struct FixedTrace {
  double a1;
};
/// u^m exp(-a1 u)
struct GaussMonomial {
  double a1;
  int m;
};
/// exp(-a1 u - a2 u^2)
struct GaussQuartic {
  double a1;
  double a2;
};
/// (1 + kappa u / Lambda)^(1 / (1 - q)), Lambda = 1/(q - 1) - mu/2
struct NonExtensive {
  double q;
  double kappa;
};
/// Tabulated shape on an increasing grid, monotone-cubic interpolated and
/// zero outside the grid.
struct GridDensity {
  std::vector<double> u;
  std::vector<double> values;
};

using DensityFamily =
    std::variant<Gaussian, BoundTrace, FixedTrace, GaussMonomial, GaussQuartic, NonExtensive,
                 GridDensity>;

inline std::string family_name(const DensityFamily& f) {
  static const char* names[] = {"gaussian",       "bound-trace",   "fixed-trace", "gauss-monomial",
                                "gauss-quartic", "non-extensive", "grid"};
  return names[f.index()];
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

enum class MomentMethod { analytic_quadrature, monte_carlo };

struct MomentReport {
  int nu = 0;
  double value = 0.0;
  MomentMethod method = MomentMethod::analytic_quadrature;
  double err_est = 0.0;
};

namespace detail {

// Fritsch-Carlson monotone cubic Hermite interpolant.
class MonotoneCubic {
 public:
  MonotoneCubic() = default;
  MonotoneCubic(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n) throw DomainError("grid density needs at least two nodes");
    for (std::size_t i = 1; i < n; ++i)
      if (!(x_[i] > x_[i - 1])) throw DomainError("grid must be strictly increasing");
    std::vector<double> h(n - 1), delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      h[i] = x_[i + 1] - x_[i];
      delta[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    slope_.assign(n, 0.0);
    slope_[0] = delta[0];
    slope_[n - 1] = delta[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (delta[i - 1] * delta[i] > 0.0) {
        const double w1 = 2.0 * h[i] + h[i - 1];
        const double w2 = h[i] + 2.0 * h[i - 1];
        slope_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
      }
    }
    // endpoint slopes must not overshoot
    for (std::size_t e : {std::size_t{0}, n - 1}) {
      const double d = e == 0 ? delta[0] : delta[n - 2];
      if (slope_[e] * d <= 0.0) slope_[e] = 0.0;
      if (std::abs(slope_[e]) > 3.0 * std::abs(d)) slope_[e] = 3.0 * d;
    }
  }

  double operator()(double t) const {
    if (x_.empty() || t < x_.front() || t > x_.back()) return 0.0;
    auto it = std::upper_bound(x_.begin(), x_.end(), t);
    std::size_t i = it == x_.end() ? x_.size() - 2 : static_cast<std::size_t>(it - x_.begin()) - 1;
    if (i >= x_.size() - 1) i = x_.size() - 2;
    const double h = x_[i + 1] - x_[i];
    const double s = (t - x_[i]) / h;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
    const double h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s);
    const double h11 = s * s * (s - 1);
    return std::max(0.0, h00 * y_[i] + h10 * h * slope_[i] + h01 * y_[i + 1] +
                             h11 * h * slope_[i + 1]);
  }

  const std::vector<double>& nodes() const { return x_; }
  const std::vector<double>& values() const { return y_; }

 private:
  std::vector<double> x_, y_, slope_;
};

inline QuadratureSpec density_quadrature() {
  QuadratureSpec s;
  s.abs_tol = 1e-300;
  s.rel_tol = 1e-13;
  s.max_evals = 2000000;
  return s;
}

}  // namespace detail

/// A density family bound to a symmetry class and dimension, with its
/// normalization a0 fixed by M_0 = 1. Immutable after construction.
class NormDensity {
 public:
  NormDensity(DensityFamily family, SymmetryClass cls, int n)
      : family_(std::move(family)), cls_(cls), n_(n), mu_(degrees_of_freedom(cls, n)) {
    validate();
    if (auto* g = std::get_if<GridDensity>(&family_)) grid_ = detail::MonotoneCubic(g->u, g->values);
    log_a0_ = compute_log_a0();
    a0_ = std::exp(log_a0_);
  }

  const DensityFamily& family() const { return family_; }
  SymmetryClass symmetry() const { return cls_; }
  int beta() const { return cls_.beta(); }
  int n() const { return n_; }
  int mu() const { return mu_; }
  double half_mu() const { return 0.5 * mu_; }
  double a0() const { return a0_; }
  double log_a0() const { return log_a0_; }
  bool is_point_mass() const { return std::holds_alternative<FixedTrace>(family_); }

  /// Lambda = 1/(q - 1) - mu/2 for the non-extensive family.
  double lambda() const {
    const auto& ne = std::get<NonExtensive>(family_);
    return 1.0 / (ne.q - 1.0) - half_mu();
  }

  /// Unnormalized shape; a fixed-trace density has none.
  double shape(double u) const {
    if (u < 0.0) return 0.0;
    return std::visit(overloaded{
        [&](const Gaussian& g) { return std::exp(-beta() * u / (4.0 * g.v * g.v)); },
        [&](const BoundTrace& b) { return u <= b.a1 ? 1.0 : 0.0; },
        [&](const FixedTrace&) -> double {
          throw PointMassError(
              "fixed-trace density is a point mass; use moments or transforms instead");
        },
        [&](const GaussMonomial& g) {
          return (g.m == 0 ? 1.0 : std::pow(u, g.m)) * std::exp(-g.a1 * u);
        },
        [&](const GaussQuartic& g) { return std::exp(-g.a1 * u - g.a2 * u * u); },
        [&](const NonExtensive& ne) {
          return std::pow(1.0 + ne.kappa * u / lambda(), 1.0 / (1.0 - ne.q));
        },
        [&](const GridDensity&) { return grid_(u); }},
        family_);
  }

  /// P(u) = a0 * shape(u).
  double eval(double u) const {
    if (u < 0.0) throw DomainError("P(u) is defined for u >= 0");
    return a0_ * shape(u);
  }

  /// Upper end of the support (infinity if unbounded).
  double support_end() const {
    return std::visit(overloaded{
        [](const BoundTrace& b) { return b.a1; },
        [](const FixedTrace& f) { return f.a1; },
        [](const GridDensity& g) { return g.u.back(); },
        [](const auto&) { return std::numeric_limits<double>::infinity(); }},
        family_);
  }

  /// Points where the shape is not smooth.
  std::vector<double> breakpoints() const {
    if (auto* g = std::get_if<GridDensity>(&family_)) return g->u;
    if (std::isfinite(support_end())) return {support_end()};
    return {};
  }

  /// Typical size of u under the radial density u^(mu/2 - 1) P(u).
  double scale() const {
    const double h = half_mu();
    return std::visit(overloaded{
        [&](const Gaussian& g) { return h * 4.0 * g.v * g.v / beta(); },
        [&](const BoundTrace& b) { return b.a1; },
        [&](const FixedTrace& f) { return f.a1; },
        [&](const GaussMonomial& g) { return (h + g.m) / g.a1; },
        [&](const GaussQuartic& g) {
          return (-g.a1 + std::sqrt(g.a1 * g.a1 + 4.0 * g.a2 * h)) / (2.0 * g.a2);
        },
        [&](const NonExtensive& ne) {
          const double lam = lambda();
          return h * lam / ne.kappa / std::max(lam, 1.0);
        },
        [&](const GridDensity& g) { return 0.5 * g.u.back(); }},
        family_);
  }

  /// Endpoint power of a power-law tail u^(p - 1) shape(u) in the mapped
  /// semi-infinite variable, or 1 for faster-than-power decay. Throws if
  /// the integral diverges.
  double tail_power(double p) const {
    if (auto* ne = std::get_if<NonExtensive>(&family_)) {
      const double tp = 1.0 / (ne->q - 1.0) - p;
      if (!(tp > 0.0)) throw DivergenceError("integral diverges: power-law tail too heavy");
      return tp;
    }
    return 1.0;
  }

  /// int_0^inf u^(p - 1) shape(u + w) du by quadrature.
  QuadratureResult shifted_radial_integral(double p, double w) const {
    if (is_point_mass()) throw PointMassError("fixed-trace radial integrals are analytic");
    const auto spec = detail::density_quadrature();
    auto integrand = [&](double u) {
      if (u <= 0.0) return 0.0;
      const double s = shape(u + w);
      return s == 0.0 ? 0.0 : std::pow(u, p - 1.0) * s;
    };
    const double end = support_end();
    if (std::isfinite(end)) {
      if (w >= end) return {};
      std::vector<double> breaks;
      for (double b : breakpoints()) breaks.push_back(b - w);
      QuadratureResult head = integrate_finite(integrand, 0.0, std::min(end - w, first_break(breaks)),
                                               spec, EndpointBehavior{p, 1.0});
      const double start = std::min(end - w, first_break(breaks));
      if (start < end - w) {
        const auto rest = integrate_with_breaks(integrand, start, end - w, breaks, spec);
        head.value += rest.value;
        head.err_est += rest.err_est;
      }
      return head;
    }
    return integrate_semi_infinite(integrand, 0.0, spec, EndpointBehavior{p, tail_power(p)},
                                   scale());
  }

  /// M_nu = (pi/2)^(mu/2) 2^(N/2) / Gamma(mu/2) int u^(nu + mu/2 - 1) P(u) du.
  MomentReport moment(int nu) const {
    if (nu < 0) throw DomainError("moment order must be nonnegative");
    MomentReport r;
    r.nu = nu;
    if (auto* f = std::get_if<FixedTrace>(&family_)) {
      r.value = std::pow(f->a1, nu);
      return r;
    }
    QuadratureResult q;
    try {
      q = shifted_radial_integral(nu + half_mu(), 0.0);
    } catch (const DivergenceError&) {
      throw DivergenceError("moment M_" + std::to_string(nu) + " does not exist for " +
                            family_name(family_));
    }
    const double pref = std::exp(radial_log_prefactor() + log_a0_);
    r.value = pref * q.value;
    r.err_est = pref * q.err_est;
    return r;
  }

  /// log of (pi/2)^(mu/2) 2^(N/2) / Gamma(mu/2).
  double radial_log_prefactor() const {
    return half_mu() * std::log(M_PI / 2.0) + 0.5 * n_ * std::log(2.0) - ln_gamma(half_mu());
  }

  /// (1/sqrt(2 pi)) int_0^inf P(u) exp(i y u) du.
  std::complex<double> fourier_transform(double y) const {
    const double inv = 1.0 / std::sqrt(2.0 * M_PI);
    if (auto* f = std::get_if<FixedTrace>(&family_)) {
      return inv * a0_ * std::exp(std::complex<double>(0.0, y * f->a1));
    }
    QuadratureSpec spec;
    spec.abs_tol = 1e-14 * std::max(a0_, 1e-300);
    spec.rel_tol = 1e-11;
    spec.max_evals = 2000000;
    auto re_part = [&](double u) { return eval(u) * std::cos(y * u); };
    auto im_part = [&](double u) { return eval(u) * std::sin(y * u); };
    const double end = support_end();
    if (std::isfinite(end)) {
      return {integrate_with_breaks(re_part, 0.0, end, breakpoints(), spec).value * inv,
              integrate_with_breaks(im_part, 0.0, end, breakpoints(), spec).value * inv};
    }
    const double tp = tail_power(1.0);
    return {integrate_semi_infinite(re_part, 0.0, spec, {1.0, tp}, scale()).value * inv,
            integrate_semi_infinite(im_part, 0.0, spec, {1.0, tp}, scale()).value * inv};
  }

  /// Fraction of the normalization integral carried by the last 5% of a
  /// grid density's range (tail diagnostic); zero for analytic families.
  double grid_tail_mass_fraction() const {
    const auto* g = std::get_if<GridDensity>(&family_);
    if (!g) return 0.0;
    const double lo = g->u.front(), hi = g->u.back();
    const double cut = hi - 0.05 * (hi - lo);
    auto integrand = [&](double u) { return std::pow(u, half_mu() - 1.0) * shape(u); };
    const auto spec = detail::density_quadrature();
    const double total = integrate_with_breaks(integrand, 0.0, hi, g->u, spec).value;
    const double tail = integrate_with_breaks(integrand, cut, hi, g->u, spec).value;
    return total > 0.0 ? tail / total : 0.0;
  }

 private:
  static double first_break(const std::vector<double>& breaks) {
    double b = std::numeric_limits<double>::infinity();
    for (double x : breaks)
      if (x > 0.0) b = std::min(b, x);
    return b;
  }

  void validate() const {
    auto positive = [](double x, const char* what) {
      if (!(x > 0.0) || !std::isfinite(x)) {
        throw DomainError(std::string(what) + " must be real and positive");
      }
    };
    std::visit(overloaded{
        [&](const Gaussian& g) { positive(g.v, "v"); },
        [&](const BoundTrace& b) { positive(b.a1, "a1"); },
        [&](const FixedTrace& f) { positive(f.a1, "a1"); },
        [&](const GaussMonomial& g) {
          positive(g.a1, "a1");
          if (g.m < 0) throw DomainError("monomial power m must be >= 0");
        },
        [&](const GaussQuartic& g) {
          positive(g.a1, "a1");
          positive(g.a2, "a2");
        },
        [&](const NonExtensive& ne) {
          positive(ne.kappa, "kappa");
          const double qmax = 1.0 + 2.0 / mu_;
          if (!(ne.q > 1.0)) throw DomainError("non-extensive q must exceed 1");
          if (!(ne.q < qmax)) {
            throw NonNormalizableError("non-extensive q must be below q_max = 1 + 2/mu = " +
                                       std::to_string(qmax) + " (Lambda <= 0)");
          }
        },
        [&](const GridDensity& g) {
          if (g.u.size() != g.values.size() || g.u.size() < 2) {
            throw DomainError("grid density needs matching u and value lists of length >= 2");
          }
          if (g.u.front() < 0.0) throw DomainError("grid density nodes must be >= 0");
          for (double v : g.values)
            if (!(v >= 0.0)) throw DomainError("grid density values must be nonnegative");
        }},
        family_);
  }

  double compute_log_a0() const {
    const double lp = radial_log_prefactor();
    if (auto* f = std::get_if<FixedTrace>(&family_)) {
      return -lp - (half_mu() - 1.0) * std::log(f->a1);
    }
    const QuadratureResult q = shifted_radial_integral(half_mu(), 0.0);
    if (!(q.value > 0.0) || !std::isfinite(q.value)) {
      throw NonNormalizableError("normalization integral is not finite and positive");
    }
    return -lp - std::log(q.value);
  }

  DensityFamily family_;
  SymmetryClass cls_;
  int n_;
  int mu_;
  detail::MonotoneCubic grid_;
  double log_a0_ = 0.0;
  double a0_ = 0.0;
};

inline double eval_P(const DensityFamily& family, SymmetryClass cls, int n, double u) {
  return NormDensity(family, cls, n).eval(u);
}

inline double normalize(const DensityFamily& family, SymmetryClass cls, int n) {
  return NormDensity(family, cls, n).a0();
}

inline MomentReport moment(const DensityFamily& family, SymmetryClass cls, int n, int nu) {
  return NormDensity(family, cls, n).moment(nu);
}

inline std::complex<double> fourier_transform_P(const DensityFamily& family, SymmetryClass cls,
                                                int n, double y) {
  return NormDensity(family, cls, n).fourier_transform(y);
}

/// int |Delta_N(e)|^beta dOmega over the unit sphere in N dimensions:
///   pi^(N/2) prod_n Gamma(1 + n beta/2)
///     / [2^(beta N (N-1)/4 - 1) Gamma(1 + beta/2)^N Gamma(mu/2)].
inline double angular_integral_constant(SymmetryClass cls, int n) {
  const double b = cls.beta();
  const int mu = degrees_of_freedom(cls, n);
  double lg = 0.5 * n * std::log(M_PI);
  for (int k = 1; k <= n; ++k) lg += ln_gamma(1.0 + k * b / 2.0);
  lg -= (b * n * (n - 1) / 4.0 - 1.0) * std::log(2.0);
  lg -= n * ln_gamma(1.0 + b / 2.0);
  lg -= ln_gamma(0.5 * mu);
  return std::exp(lg);
}

}  // namespace nrmt
