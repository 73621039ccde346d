#pragma once

// Transformation between ordinary space and superspace: the superspace
// density Q(w), w = trg sigma^2, its closed forms per family, the inverse
// transformation for even mu, and the eigenvalue-superspace density.

#include <cmath>
#include <functional>
#include <string>

#include "nrmt/densities.hpp"
#include "nrmt/errors.hpp"
#include "nrmt/quad.hpp"
#include "nrmt/specfun.hpp"
#include "nrmt/spread.hpp"

namespace nrmt {

/// c = 2^(k(k-1)) for beta = 2 and 2^(k(4k-3)/2) for beta = 1, 4.
inline double normalization_constant_c(SymmetryClass cls, int k) {
  if (k < 1) throw DomainError("superspace dimension k must be >= 1");
  const double e = cls.beta() == 2 ? k * (k - 1.0) : 0.5 * k * (4.0 * k - 3.0);
  return std::exp2(e);
}

enum class SuperMode { analytic, numeric };

/// Q(w) = c 2^(N/2) (pi/2)^(mu/2) / Gamma(mu/2) int_0^inf P(u + w) u^(mu/2 - 1) du.
inline double superspace_density_numeric(const NormDensity& d, int k, double w) {
  if (!(w >= 0.0)) throw DomainError("numeric superspace density needs w >= 0");
  const double c = normalization_constant_c(d.symmetry(), k);
  const double h = d.half_mu();
  if (auto* f = std::get_if<FixedTrace>(&d.family())) {
    if (w > f->a1) return 0.0;
    if (w == f->a1) return h == 1.0 ? c : 0.0;
    return c * std::exp(d.log_a0() + d.radial_log_prefactor() + (h - 1.0) * std::log(f->a1 - w));
  }
  if (w >= d.support_end()) return 0.0;
  QuadratureResult r;
  try {
    r = d.shifted_radial_integral(h, w);
  } catch (const DivergenceError& e) {
    throw NonNormalizableError(std::string("superspace integral diverges: ") + e.what());
  }
  return c * std::exp(d.log_a0() + d.radial_log_prefactor()) * r.value;
}

/// Same integral on a fixed composite Gauss-Legendre rule in the mapped
/// variable u = S x / (1 - x) (or u = (end - w) x on bounded supports).
/// The nodes do not adapt to w, so the quadrature error is itself a smooth
/// function of w; this is the form to differentiate numerically.
inline double superspace_density_numeric_smooth(const NormDensity& d, int k, double w,
                                                int panels = 64) {
  if (d.is_point_mass()) return superspace_density_numeric(d, k, w);
  if (!(w >= 0.0)) throw DomainError("numeric superspace density needs w >= 0");
  const double c = normalization_constant_c(d.symmetry(), k);
  const double h = d.half_mu();
  const double end = d.support_end();
  const bool bounded = std::isfinite(end);
  if (bounded && w >= end) return 0.0;
  const double len = bounded ? end - w : d.scale();
  const auto& rule = detail::gauss_legendre_20();
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = static_cast<double>(p) / panels;
    const double half = 0.5 / panels;
    for (const auto& [x0, wt] : rule) {
      const double x = lo + half * (1.0 + x0);
      double u, jac;
      if (bounded) {
        u = len * x;
        jac = len;
      } else {
        u = len * x / (1.0 - x);
        jac = len / ((1.0 - x) * (1.0 - x));
      }
      const double sh = d.shape(u + w);
      if (sh != 0.0) sum += half * wt * jac * std::pow(u, h - 1.0) * sh;
    }
  }
  return c * std::exp(d.log_a0() + d.radial_log_prefactor()) * sum;
}

/// Closed forms of Q(w) for the six analytic families with the number of
/// degrees of freedom passed explicitly as half_mu (the formal mu -> 0
/// reduction is exercised through this entry point).
inline double superspace_closed_form(const DensityFamily& family, SymmetryClass cls, int k,
                                     double half_mu, double w) {
  const double c = normalization_constant_c(cls, k);
  const double h = half_mu;
  const double beta = cls.beta();
  return std::visit(overloaded{
      [&](const Gaussian& g) { return c * std::exp(-beta * w / (4.0 * g.v * g.v)); },
      [&](const BoundTrace& b) {
        return w >= b.a1 ? 0.0 : c * std::pow((b.a1 - w) / b.a1, h);
      },
      [&](const FixedTrace& f) {
        if (w > f.a1) return 0.0;
        return c * std::pow((f.a1 - w) / f.a1, h - 1.0);
      },
      [&](const GaussMonomial& g) {
        const double x = g.a1 * w;
        double s = 0.0;
        for (int mp = 0; mp <= g.m; ++mp) {
          s += binomial(g.m, mp) * std::exp(ln_gamma(g.m - mp + h) - ln_gamma(g.m + h)) *
               std::pow(x, mp);
        }
        return c * std::exp(-x) * s;
      },
      [&](const GaussQuartic& g) {
        const double r = std::sqrt(2.0 * g.a2);
        const double z0 = g.a1 / r;
        return c * std::exp(-0.5 * g.a1 * w - 0.5 * g.a2 * w * w +
                            log_parabolic_cylinder_D(-h, z0 + r * w) -
                            log_parabolic_cylinder_D(-h, z0));
      },
      [&](const NonExtensive& ne) {
        const double lam = 1.0 / (ne.q - 1.0) - h;
        return c * std::pow(1.0 + ne.kappa * w / lam, -lam);
      },
      [&](const GridDensity&) -> double {
        throw UnsupportedError("grid densities have no closed-form superspace density");
      }},
      family);
}

inline double superspace_density_analytic(const NormDensity& d, int k, double w) {
  return superspace_closed_form(d.family(), d.symmetry(), k, d.half_mu(), w);
}

inline double superspace_density(const NormDensity& d, int k, double w, SuperMode mode) {
  return mode == SuperMode::analytic ? superspace_density_analytic(d, k, w)
                                     : superspace_density_numeric(d, k, w);
}

/// P(u) = (-1)^(mu/2) / (c 2^(N/2)) (2/pi)^(mu/2) d^(mu/2) Q / du^(mu/2).
/// `step` is the initial finite-difference step; the stencil reaches
/// mu/4 steps on either side of u.
inline double invert_transform(const std::function<double(double)>& q, SymmetryClass cls, int n,
                               int k, double u, double step) {
  const int mu = degrees_of_freedom(cls, n);
  if (mu % 2 != 0) {
    throw UnsupportedError("inversion needs even mu (odd mu would need fractional derivatives)");
  }
  const int order = mu / 2;
  if (order > kMaxDerivativeOrder) {
    throw UnsupportedError("inversion needs a derivative of order " + std::to_string(order) +
                           ", above the cap of 8");
  }
  const double c = normalization_constant_c(cls, k);
  const double deriv = differentiate_n(q, u, order, step);
  const double sign = order % 2 == 0 ? 1.0 : -1.0;
  return sign * deriv / c * std::exp(-0.5 * n * std::log(2.0) + order * std::log(2.0 / M_PI));
}

/// Default finite-difference step for inverting at u: the stencil stays
/// inside (0, support end) and the step does not exceed the local decay
/// length |Q / Q'| of the superspace density.
inline double inversion_step(const NormDensity& d, double u, int k = 1) {
  const double half_width = 0.25 * d.mu();
  double room = u;
  if (std::isfinite(d.support_end())) room = std::min(room, d.support_end() - u);
  const double geometric = 0.9 * room / half_width;
  auto q = [&](double w) { return superspace_density_numeric_smooth(d, k, w); };
  const double slope = std::abs(differentiate_n(q, u, 1, 0.5 * geometric));
  const double decay = slope > 0.0 ? std::abs(q(u)) / slope : geometric;
  return std::min(geometric, decay);
}

/// Eigenvalue-superspace density for beta = 2 with mu' = N^2 - 2k:
///   Q_E(w) = 2^(N/2) pi^(mu'/2) / Gamma(mu'/2) int_0^inf P(u + w) u^(mu'/2 - 1) du.
inline double eigen_superspace_density(const NormDensity& d, int k, double w) {
  if (d.beta() != 2) throw UnsupportedError("eigenvalue superspace density needs beta = 2");
  const int n = d.n();
  const int mup = n * n - 2 * k;
  if (mup <= 0) throw DomainError("eigenvalue superspace density needs N^2 > 2k");
  if (!(w >= 0.0)) throw DomainError("eigenvalue superspace density needs w >= 0");
  const double hp = 0.5 * mup;
  const double log_pref = 0.5 * n * std::log(2.0) + hp * std::log(M_PI) - ln_gamma(hp) + d.log_a0();
  if (auto* f = std::get_if<FixedTrace>(&d.family())) {
    if (w > f->a1) return 0.0;
    if (w == f->a1) return hp == 1.0 ? std::exp(log_pref) : 0.0;
    return std::exp(log_pref + (hp - 1.0) * std::log(f->a1 - w));
  }
  if (w >= d.support_end()) return 0.0;
  return std::exp(log_pref) * d.shifted_radial_integral(hp, w).value;
}

/// int f(t) c exp(-beta w / 4 t) dt.
inline double mix_check_superspace(const SpreadFunction& spread, SymmetryClass cls, int k,
                                   double w) {
  return mix_power_exponential(spread, cls.beta(), normalization_constant_c(cls, k), 0.0, w).value;
}

}  // namespace nrmt
