#pragma once

// Spread functions f(t): a norm-dependent density written as a mixture of
// Gaussian ensembles with variance parameter t.

#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "nrmt/densities.hpp"
#include "nrmt/errors.hpp"
#include "nrmt/quad.hpp"
#include "nrmt/specfun.hpp"

namespace nrmt {

/// f(t) = delta(t - t0)
struct PointMass {
  double t0;
};

/// Signed measure supported at one point, acting on test functions through
/// derivatives in the precision lambda = beta / (4 t):
///   int f(t) phi(t) dt = sum_j coeffs[j] (d/dlambda)^j phi(beta / (4 lambda)) at lambda0.
struct DerivativeAtoms {
  double t0;
  double lambda0;
  std::vector<double> coeffs;
};

/// Inverse-gamma density b^s / Gamma(s) t^(-s - 1) exp(-b / t).
struct InverseGamma {
  double shape;
  double scale;
};

/// Tabulated f on an increasing t-grid, monotone-cubic interpolated.
struct GridFunction {
  std::vector<double> t;
  std::vector<double> values;
};

using SpreadFunction = std::variant<PointMass, DerivativeAtoms, InverseGamma, GridFunction>;

inline std::string spread_name(const SpreadFunction& s) {
  static const char* names[] = {"point-mass", "derivative-atoms", "inverse-gamma", "grid"};
  return names[s.index()];
}

/// Spread of the Gaussian, non-extensive and Gauss-monomial families.
inline SpreadFunction spread_for_family(const NormDensity& d) {
  const double beta = d.beta();
  return std::visit(overloaded{
      [&](const Gaussian& g) -> SpreadFunction { return PointMass{g.v * g.v}; },
      [&](const NonExtensive& ne) -> SpreadFunction {
        const double lam = d.lambda();
        return InverseGamma{lam, beta * lam / (4.0 * ne.kappa)};
      },
      [&](const GaussMonomial& g) -> SpreadFunction {
        const double t0 = beta / (4.0 * g.a1);
        if (g.m == 0) return PointMass{t0};
        // u^m e^{-a1 u} = (-d/da1)^m e^{-a1 u}, expanded by Leibniz against the
        // lambda-dependent Gaussian prefactor
        const double h = d.half_mu();
        const double log_k = 0.5 * d.n() * std::log(2.0) + h * std::log(M_PI / 2.0) + d.log_a0();
        DerivativeAtoms atoms{t0, g.a1, std::vector<double>(g.m + 1)};
        for (int j = 0; j <= g.m; ++j) {
          const double mag = std::exp(log_k + (j - h - g.m) * std::log(g.a1)) * binomial(g.m, j) *
                             rising_factorial(h, g.m - j);
          atoms.coeffs[j] = (j % 2 == 0) ? mag : -mag;
        }
        return atoms;
      },
      [&](const auto&) -> SpreadFunction {
        throw UnavailableError("no closed-form spread function for the " +
                               family_name(d.family()) + " family");
      }},
      d.family());
}

struct MixResult {
  double value = 0.0;
  bool tail_truncated = false;
};

namespace detail {

inline QuadratureSpec spread_quadrature() {
  QuadratureSpec s;
  s.abs_tol = 1e-300;
  s.rel_tol = 1e-12;
  s.max_evals = 400000;
  return s;
}

// int f(t) g(t) dt for the continuous spreads.
template <class G>
MixResult integrate_continuous(const SpreadFunction& spread, G&& g,
                               const QuadratureSpec& spec = spread_quadrature()) {
  if (auto* ig = std::get_if<InverseGamma>(&spread)) {
    // s = 1/t is Gamma(shape, rate = scale)
    const double log_norm = ig->shape * std::log(ig->scale) - ln_gamma(ig->shape);
    auto integrand = [&](double s) {
      if (s <= 0.0) return 0.0;
      const double w = std::exp(log_norm + (ig->shape - 1.0) * std::log(s) - ig->scale * s);
      return w == 0.0 ? 0.0 : w * g(1.0 / s);
    };
    return {integrate_semi_infinite(integrand, 0.0, spec,
                                    EndpointBehavior{ig->shape, 1.0}, ig->shape / ig->scale)
                .value,
            false};
  }
  const auto& grid = std::get<GridFunction>(spread);
  MonotoneCubic f(grid.t, grid.values);
  auto integrand = [&](double t) {
    const double v = f(t);
    return v == 0.0 ? 0.0 : v * g(t);
  };
  const double value =
      integrate_with_breaks(integrand, grid.t.front(), grid.t.back(), grid.t, spec)
          .value;
  return {value, true};
}

}  // namespace detail

/// int f(t) A lambda^p exp(-lambda y) dt, lambda = beta / (4 t). Point
/// masses and derivative atoms are evaluated in closed form.
inline MixResult mix_power_exponential(const SpreadFunction& spread, int beta, double amplitude,
                                       double p, double y) {
  auto kernel = [&](double lambda) {
    return amplitude * std::pow(lambda, p) * std::exp(-lambda * y);
  };
  if (auto* pm = std::get_if<PointMass>(&spread)) return {kernel(beta / (4.0 * pm->t0)), false};
  if (auto* at = std::get_if<DerivativeAtoms>(&spread)) {
    // (d/dlambda)^j [lambda^p e^{-lambda y}]
    //   = sum_i C(j, i) p (p-1)...(p-i+1) lambda^(p-i) (-y)^(j-i) e^{-lambda y}
    const double lam = at->lambda0;
    double total = 0.0;
    for (std::size_t j = 0; j < at->coeffs.size(); ++j) {
      double dj = 0.0;
      double falling = 1.0;
      for (std::size_t i = 0; i <= j; ++i) {
        dj += binomial(static_cast<int>(j), static_cast<int>(i)) * falling *
              std::pow(lam, p - static_cast<double>(i)) *
              std::pow(-y, static_cast<double>(j - i));
        falling *= p - static_cast<double>(i);
      }
      total += at->coeffs[j] * dj;
    }
    return {amplitude * std::exp(-lam * y) * total, false};
  }
  return detail::integrate_continuous(spread, [&](double t) { return kernel(beta / (4.0 * t)); });
}

/// int f(t) g(t) dt for a general test function g. Derivative atoms use
/// numerical differentiation in lambda with initial step `h_lambda`
/// (relative to lambda0); continuous spreads use `spec`.
template <class G>
MixResult mix_general(const SpreadFunction& spread, int beta, G&& g, double h_lambda = 0.2,
                      const QuadratureSpec& spec = detail::spread_quadrature()) {
  if (auto* pm = std::get_if<PointMass>(&spread)) return {g(pm->t0), false};
  if (auto* at = std::get_if<DerivativeAtoms>(&spread)) {
    auto in_lambda = [&](double lam) { return g(beta / (4.0 * lam)); };
    double total = 0.0;
    for (std::size_t j = 0; j < at->coeffs.size(); ++j) {
      total += at->coeffs[j] *
               differentiate_n(in_lambda, at->lambda0, static_cast<int>(j), h_lambda * at->lambda0);
    }
    return {total, false};
  }
  return detail::integrate_continuous(spread, g, spec);
}

/// Total mass int f(t) dt.
inline double spread_mass(const SpreadFunction& spread) {
  return mix_power_exponential(spread, 4, 1.0, 0.0, 0.0).value;
}

/// int f(t) 2^(-N/2) (beta / 2 pi t)^(mu/2) exp(-beta u / 4 t) dt, which
/// reproduces P(u).
inline MixResult mix_reproduce(const SpreadFunction& spread, const NormDensity& d, double u) {
  const double h = d.half_mu();
  const double amp = std::exp(-0.5 * d.n() * std::log(2.0) + h * std::log(2.0 / M_PI));
  return mix_power_exponential(spread, d.beta(), amp, h, u);
}

}  // namespace nrmt
