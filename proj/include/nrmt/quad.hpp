#pragma once

// Adaptive Gauss-Kronrod quadrature on finite and semi-infinite ranges,
// fixed Gauss-Legendre panel rules, and Richardson-extrapolated finite
// differences of order up to 8.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "nrmt/errors.hpp"

namespace nrmt {

enum class QuadratureRule { adaptive, gauss_legendre_panels };

struct QuadratureSpec {
  QuadratureRule rule = QuadratureRule::adaptive;
  double abs_tol = 1e-13;
  double rel_tol = 1e-11;
  std::size_t max_evals = 400000;
};

struct QuadratureResult {
  double value = 0.0;
  double err_est = 0.0;
  std::size_t evals = 0;
};

/// Power-law endpoint behaviour: the integrand is taken to behave like
/// (u - a)^(left_power - 1) near a and (b - u)^(right_power - 1) near b.
/// A power of 1 means regular.
struct EndpointBehavior {
  double left_power = 1.0;
  double right_power = 1.0;
};

namespace detail {

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
inline constexpr std::array<double, 11> kXgk21 = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
inline constexpr std::array<double, 11> kWgk21 = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr std::array<double, 5> kWg10 = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Panel {
  double a, b, value, err;
  bool operator<(const Panel& o) const { return err < o.err; }
};

template <class F>
Panel gk21(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double resk = fc * kWgk21[10];
  double resg = 0.0;
  for (int j = 0; j < 10; ++j) {
    const double dx = h * kXgk21[j];
    const double f1 = f(c - dx);
    const double f2 = f(c + dx);
    resk += kWgk21[j] * (f1 + f2);
    if (j % 2 == 1) resg += kWg10[j / 2] * (f1 + f2);
  }
  const double value = resk * h;
  double err = std::abs((resk - resg) * h);
  // roundoff floor relative to the magnitude of the panel estimate
  err = std::max(err, 50.0 * std::numeric_limits<double>::epsilon() * std::abs(value));
  return {a, b, value, err};
}

template <class F>
QuadratureResult adaptive_gk(F& f, double a, double b, const QuadratureSpec& spec) {
  std::priority_queue<Panel> heap;
  Panel first = gk21(f, a, b);
  std::size_t evals = 21;
  double total = first.value;
  double total_err = first.err;
  heap.push(first);
  double frozen_val = 0.0;
  double frozen_err = 0.0;
  auto tolerance = [&] { return std::max(spec.abs_tol, spec.rel_tol * std::abs(total)); };
  while (total_err > tolerance()) {
    if (heap.empty()) break;
    if (evals + 42 > spec.max_evals) {
      throw NonConvergenceError("adaptive quadrature exceeded its evaluation budget", total,
                                total_err);
    }
    Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b) ||
        (worst.b - worst.a) < 64.0 * std::numeric_limits<double>::epsilon() *
                                  std::max({std::abs(worst.a), std::abs(worst.b), 1e-250})) {
      // cannot be refined further
      frozen_val += worst.value;
      frozen_err += worst.err;
      continue;
    }
    Panel left = gk21(f, worst.a, mid);
    Panel right = gk21(f, mid, worst.b);
    evals += 42;
    total += left.value + right.value - worst.value;
    total_err += left.err + right.err - worst.err;
    heap.push(left);
    heap.push(right);
  }
  // re-sum to limit drift from the incremental updates
  double sum = frozen_val;
  double err = frozen_err;
  while (!heap.empty()) {
    sum += heap.top().value;
    err += heap.top().err;
    heap.pop();
  }
  if (!std::isfinite(sum)) {
    throw NumericError("quadrature produced a non-finite value");
  }
  return {sum, err, evals};
}

inline const std::vector<std::pair<double, double>>& gauss_legendre_20() {
  static const std::vector<std::pair<double, double>> rule = [] {
    constexpr int n = 20;
    std::vector<std::pair<double, double>> r(n);
    for (int i = 0; i < n; ++i) {
      double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      r[i] = {x, 2.0 / ((1.0 - x * x) * dp * dp)};
    }
    return r;
  }();
  return rule;
}

template <class F>
QuadratureResult gl_panels(F& f, double a, double b, const QuadratureSpec& spec) {
  const auto& rule = gauss_legendre_20();
  auto apply = [&](std::size_t panels) {
    double sum = 0.0;
    const double w = (b - a) / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p) {
      const double lo = a + w * static_cast<double>(p);
      const double c = lo + 0.5 * w;
      double s = 0.0;
      for (const auto& [x, wt] : rule) s += wt * f(c + 0.5 * w * x);
      sum += 0.5 * w * s;
    }
    return sum;
  };
  std::size_t panels = 1;
  std::size_t evals = 20;
  double prev = apply(panels);
  for (;;) {
    panels *= 2;
    evals += 20 * panels;
    const double cur = apply(panels);
    const double err = std::abs(cur - prev);
    if (err <= std::max(spec.abs_tol, spec.rel_tol * std::abs(cur))) {
      return {cur, err, evals};
    }
    if (evals + 40 * panels > spec.max_evals) {
      throw NonConvergenceError("Gauss-Legendre panel refinement exceeded its budget", cur, err);
    }
    prev = cur;
  }
}

template <class F>
QuadratureResult integrate_plain(F& f, double a, double b, const QuadratureSpec& spec) {
  if (spec.rule == QuadratureRule::gauss_legendre_panels) return gl_panels(f, a, b, spec);
  return adaptive_gk(f, a, b, spec);
}

inline QuadratureResult combine(const QuadratureResult& x, const QuadratureResult& y) {
  return {x.value + y.value, x.err_est + y.err_est, x.evals + y.evals};
}

}  // namespace detail

/// Integral of f over [a, b]. Endpoint power singularities declared in
/// `ends` are removed by the substitution u = a + (b - a) s^(1/p). The
/// attainable accuracy near a singular endpoint away from zero is limited
/// by the spacing of doubles there.
template <class F>
QuadratureResult integrate_finite(F&& f, double a, double b, const QuadratureSpec& spec = {},
                                  EndpointBehavior ends = {}) {
  if (!(a <= b)) throw DomainError("integrate_finite requires a <= b");
  if (!(spec.abs_tol > 0.0 && spec.rel_tol > 0.0)) {
    throw DomainError("quadrature tolerances must be positive");
  }
  if (!(ends.left_power > 0.0 && ends.right_power > 0.0)) {
    throw DomainError("endpoint powers must be positive");
  }
  if (a == b) return {};
  const bool left_sing = ends.left_power != 1.0;
  const bool right_sing = ends.right_power != 1.0;
  if (!left_sing && !right_sing) return detail::integrate_plain(f, a, b, spec);

  QuadratureSpec half = spec;
  half.max_evals = spec.max_evals / 2;
  const double m = 0.5 * (a + b);
  QuadratureResult lhs, rhs;
  if (left_sing) {
    const double p = ends.left_power;
    const double len = m - a;
    auto g = [&](double s) {
      if (s <= 0.0) return 0.0;
      const double sp = std::pow(s, 1.0 / p);
      const double u = a + len * sp;
      // the endpoint itself is not representable as a distinct node
      if (u == a) return 0.0;
      return f(u) * len / p * sp / s;
    };
    lhs = detail::integrate_plain(g, 0.0, 1.0, half);
  } else {
    lhs = detail::integrate_plain(f, a, m, half);
  }
  if (right_sing) {
    const double p = ends.right_power;
    const double len = b - m;
    auto g = [&](double s) {
      if (s <= 0.0) return 0.0;
      const double sp = std::pow(s, 1.0 / p);
      const double u = b - len * sp;
      if (u == b) return 0.0;
      return f(u) * len / p * sp / s;
    };
    rhs = detail::integrate_plain(g, 0.0, 1.0, half);
  } else {
    rhs = detail::integrate_plain(f, m, b, half);
  }
  return detail::combine(lhs, rhs);
}

/// Integral of f over [a, inf). The range [a, a + scale] is integrated
/// directly (honouring a left endpoint power), the remainder through
/// u = a + scale / t on t in (0, 1]. A power-law tail f ~ u^(-tau) shows up
/// as t^(tau - 2) in the mapped variable; `ends.right_power` = tau - 1
/// declares it so the substitution can remove it.
template <class F>
QuadratureResult integrate_semi_infinite(F&& f, double a, const QuadratureSpec& spec = {},
                                         EndpointBehavior ends = {}, double scale = 1.0) {
  if (!(scale > 0.0)) throw DomainError("semi-infinite scale must be positive");
  QuadratureSpec half = spec;
  half.max_evals = spec.max_evals / 2;
  const QuadratureResult head =
      integrate_finite(f, a, a + scale, half, EndpointBehavior{ends.left_power, 1.0});
  auto mapped = [&](double t) {
    if (t <= 0.0) return 0.0;
    const double fu = f(a + scale / t);
    if (fu == 0.0) return 0.0;
    return fu * scale / (t * t);
  };
  auto tail_piece = [&](double lo, double hi) {
    auto p = detail::gk21(mapped, lo, hi);
    return std::abs(p.value);
  };
  try {
    const QuadratureResult tail =
        integrate_finite(mapped, 0.0, 1.0, half, EndpointBehavior{ends.right_power, 1.0});
    return detail::combine(head, tail);
  } catch (const NonConvergenceError& e) {
    const double t1 = tail_piece(1e-6, 1e-3);
    const double t2 = tail_piece(1e-9, 1e-6);
    if (t2 > 0.5 * t1 && t1 > spec.abs_tol) {
      throw DivergenceError("integrand does not decay: tail contribution is not shrinking");
    }
    throw;
  } catch (const NumericError&) {
    throw DivergenceError("integrand does not decay: non-finite tail contribution");
  }
}

/// Integral over the whole real line, split at `center`.
template <class F>
QuadratureResult integrate_real_line(F&& f, double center = 0.0, const QuadratureSpec& spec = {},
                                     double scale = 1.0) {
  auto right = integrate_semi_infinite(f, center, spec, {}, scale);
  auto reflected = [&](double u) { return f(2.0 * center - u); };
  auto left = integrate_semi_infinite(reflected, center, spec, {}, scale);
  return detail::combine(left, right);
}

/// Integral over [a, b] split at sorted interior breakpoints; breakpoints
/// outside (a, b) are ignored.
template <class F>
QuadratureResult integrate_with_breaks(F&& f, double a, double b, std::vector<double> breaks,
                                       const QuadratureSpec& spec = {}) {
  std::sort(breaks.begin(), breaks.end());
  QuadratureResult total;
  double lo = a;
  for (double x : breaks) {
    if (x <= lo || x >= b) continue;
    total = detail::combine(total, integrate_finite(f, lo, x, spec));
    lo = x;
  }
  return detail::combine(total, integrate_finite(f, lo, b, spec));
}

struct DerivativeResult {
  double value = 0.0;
  double err_est = 0.0;
};

inline constexpr int kMaxDerivativeOrder = 8;

/// n-th derivative of f at x by central differences with Ridders-style
/// Richardson extrapolation starting from step h0. Orders above 8 are
/// rejected.
template <class F>
DerivativeResult differentiate_n_with_error(F&& f, double x, int n, double h0) {
  if (n < 0) throw DomainError("derivative order must be nonnegative");
  if (n > kMaxDerivativeOrder) {
    throw UnsupportedError("derivative order " + std::to_string(n) + " exceeds the cap of 8");
  }
  if (n == 0) return {f(x), 0.0};
  if (!(h0 > 0.0)) throw DomainError("initial step must be positive");

  std::array<double, kMaxDerivativeOrder + 1> binom{};
  binom[0] = 1.0;
  for (int j = 1; j <= n; ++j) binom[j] = binom[j - 1] * (n - j + 1) / j;
  auto central = [&](double h) {
    double s = 0.0;
    for (int j = 0; j <= n; ++j) {
      const double term = binom[j] * f(x + (0.5 * n - j) * h);
      s += (j % 2 == 0) ? term : -term;
    }
    return s / std::pow(h, n);
  };

  constexpr int kLevels = 12;
  constexpr double kShrink = 1.4;
  constexpr double kShrink2 = kShrink * kShrink;
  constexpr double kSafe = 2.0;
  double tab[kLevels][kLevels];
  double h = h0;
  tab[0][0] = central(h);
  DerivativeResult best{tab[0][0], std::numeric_limits<double>::max()};
  for (int i = 1; i < kLevels; ++i) {
    h /= kShrink;
    tab[0][i] = central(h);
    double fac = kShrink2;
    for (int j = 1; j <= i; ++j) {
      tab[j][i] = (tab[j - 1][i] * fac - tab[j - 1][i - 1]) / (fac - 1.0);
      fac *= kShrink2;
      const double e = std::max(std::abs(tab[j][i] - tab[j - 1][i]),
                                std::abs(tab[j][i] - tab[j - 1][i - 1]));
      if (e <= best.err_est) {
        best = {tab[j][i], e};
      }
    }
    // early levels can be dominated by a too-large starting step
    if (i >= 4 && std::abs(tab[i][i] - tab[i - 1][i - 1]) >= kSafe * best.err_est) break;
  }
  return best;
}

template <class F>
double differentiate_n(F&& f, double x, int n, double h0) {
  return differentiate_n_with_error(f, x, n, h0).value;
}

}  // namespace nrmt
