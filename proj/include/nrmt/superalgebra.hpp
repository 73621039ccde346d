#pragma once

// Finite Grassmann algebra with Berezin integration, and the boundary-term
// normalization check of a superspace density at k = 1, beta = 2.
//
// Generators come in pairs: pair p has chi_p = generator 2p and
// chi*_p = generator 2p + 1. A monomial is a bitmask read in increasing
// generator order. Conventions, pinned by the Gaussian check returning +1:
//   int dchi* dchi  chi chi* = +1,
//   sigma = [[a, eta*], [eta, i b]],  trg sigma^2 = a^2 + b^2 + 2 eta* eta,
//   measure da db dchi* dchi / (2 pi).

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "nrmt/errors.hpp"
#include "nrmt/quad.hpp"

namespace nrmt {

class GrassmannElement {
 public:
  using Monomial = std::uint32_t;

  explicit GrassmannElement(int n_generators = 0) : n_(n_generators) {
    if (n_generators < 0 || n_generators % 2 != 0 || n_generators > 16) {
      throw DomainError("number of Grassmann generators must be even and at most 16");
    }
  }

  static GrassmannElement scalar(int n_generators, double value) {
    GrassmannElement e(n_generators);
    e.add(0, value);
    return e;
  }

  static GrassmannElement generator(int n_generators, int index) {
    GrassmannElement e(n_generators);
    if (index < 0 || index >= n_generators) throw DomainError("generator index out of range");
    e.add(Monomial{1} << index, 1.0);
    return e;
  }
  static GrassmannElement chi(int n_generators, int pair) { return generator(n_generators, 2 * pair); }
  static GrassmannElement chi_star(int n_generators, int pair) { return generator(n_generators, 2 * pair + 1); }

  int generators() const { return n_; }
  const std::map<Monomial, double>& terms() const { return terms_; }
  double coefficient(Monomial m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? 0.0 : it->second;
  }
  double body() const { return coefficient(0); }
  GrassmannElement soul() const {
    GrassmannElement s = *this;
    s.terms_.erase(0);
    return s;
  }
  bool is_zero() const { return terms_.empty(); }
  bool is_even() const {
    for (const auto& [m, c] : terms_)
      if (std::popcount(m) % 2 != 0) return false;
    return true;
  }

  void add(Monomial m, double c) {
    if (c == 0.0) return;
    const double v = (terms_[m] += c);
    if (v == 0.0) terms_.erase(m);
  }

  GrassmannElement operator+(const GrassmannElement& o) const {
    check_same(o);
    GrassmannElement r = *this;
    for (const auto& [m, c] : o.terms_) r.add(m, c);
    return r;
  }
  GrassmannElement operator-(const GrassmannElement& o) const { return *this + o * -1.0; }
  GrassmannElement operator*(double s) const {
    GrassmannElement r(n_);
    for (const auto& [m, c] : terms_) r.add(m, c * s);
    return r;
  }

  /// Sign of moving monomial b past monomial a into canonical order.
  static int product_sign(Monomial a, Monomial b) {
    int swaps = 0;
    for (Monomial rest = b; rest; rest &= rest - 1) {
      const int j = std::countr_zero(rest);
      // generators of a with index above j must pass generator j
      swaps += std::popcount(a >> (j + 1));
    }
    return swaps % 2 == 0 ? 1 : -1;
  }

  GrassmannElement operator*(const GrassmannElement& o) const {
    check_same(o);
    GrassmannElement r(n_);
    for (const auto& [ma, ca] : terms_)
      for (const auto& [mb, cb] : o.terms_) {
        if (ma & mb) continue;
        r.add(ma | mb, product_sign(ma, mb) * ca * cb);
      }
    return r;
  }

  bool operator==(const GrassmannElement& o) const { return n_ == o.n_ && terms_ == o.terms_; }

  /// max |coefficient| of this - o
  double distance(const GrassmannElement& o) const {
    double d = 0.0;
    for (const auto& [m, c] : (*this - o).terms_) d = std::max(d, std::abs(c));
    return d;
  }

 private:
  void check_same(const GrassmannElement& o) const {
    if (o.n_ != n_) throw DomainError("Grassmann elements over different generator sets");
  }

  int n_;
  std::map<Monomial, double> terms_;
};

inline GrassmannElement grassmann_mul(const GrassmannElement& a, const GrassmannElement& b) { return a * b; }

/// f(s + nu) = sum_j f^(j)(s) nu^j / j!, given the derivatives f^(j)(s).
/// Exact: the series stops once nu^j vanishes.
inline GrassmannElement compose_with_derivatives(const std::vector<double>& derivs, const GrassmannElement& x) {
  const int n = x.generators();
  const GrassmannElement nu = x.soul();
  GrassmannElement out(n);
  GrassmannElement power = GrassmannElement::scalar(n, 1.0);
  double fact = 1.0;
  for (int j = 0; !power.is_zero(); ++j) {
    if (j > 0) {
      power = power * nu;
      fact *= j;
      if (power.is_zero()) break;
    }
    if (j >= static_cast<int>(derivs.size())) {
      throw UnsupportedError("composition needs derivative of order " + std::to_string(j));
    }
    out = out + power * (derivs[j] / fact);
  }
  return out;
}

/// Number of nonvanishing powers of the soul of x beyond the zeroth.
inline int nilpotency_order(const GrassmannElement& x) {
  const GrassmannElement nu = x.soul();
  GrassmannElement power = GrassmannElement::scalar(x.generators(), 1.0);
  int order = 0;
  for (;;) {
    power = power * nu;
    if (power.is_zero()) return order;
    ++order;
  }
}

/// f(body + soul) with the derivatives of f taken numerically (initial
/// step h0). Orders above the differentiation cap are refused.
inline GrassmannElement compose_scalar_function(const std::function<double(double)>& f, const GrassmannElement& x,
                                                double h0 = 0.1) {
  const int order = nilpotency_order(x);
  if (order > kMaxDerivativeOrder) {
    throw UnsupportedError("composition needs derivatives of order " + std::to_string(order) +
                           ", above the cap of " + std::to_string(kMaxDerivativeOrder));
  }
  std::vector<double> derivs(order + 1);
  const double s = x.body();
  derivs[0] = f(s);
  for (int j = 1; j <= order; ++j) derivs[j] = differentiate_n(f, s, j, h0);
  return compose_with_derivatives(derivs, x);
}

/// int dchi*_p dchi_p over the given pair: keeps the monomials containing
/// both generators, with int dchi* dchi chi chi* = +1, and removes them.
inline GrassmannElement berezin_integrate(const GrassmannElement& a, int pair) {
  const int n = a.generators();
  if (pair < 0 || 2 * pair + 1 >= n) throw DomainError("Grassmann pair out of range");
  using M = GrassmannElement::Monomial;
  const M c = M{1} << (2 * pair), cs = M{1} << (2 * pair + 1);
  GrassmannElement out(n);
  for (const auto& [m, coef] : a.terms()) {
    if (!(m & c) || !(m & cs)) continue;
    const M rest = m & ~(c | cs);
    // m = sign * (chi chi*) rest
    const int sign = GrassmannElement::product_sign(c | cs, rest);
    out.add(rest, sign * coef);
  }
  return out;
}

struct EwpsOptions {
  bool decays = true;
  std::vector<double> breaks;  // w values where Q is not smooth
  double scale = 1.0;          // decay length of Q in w
  QuadratureSpec spec = default_spec();

  static QuadratureSpec default_spec() {
    QuadratureSpec s;
    s.abs_tol = 1e-12;
    s.rel_tol = 1e-9;
    return s;
  }
};

/// int da db dchi* dchi / (2 pi) Q(trg sigma^2) for the k = 1, beta = 2
/// supermatrix; equals Q(0) when Q vanishes at infinity. The superfunction
/// is expanded in the nilpotent part, Berezin integrated, and the (a, b)
/// integral done in polar coordinates (the integrand depends on the radius
/// only).
inline double ewps_check(const std::function<double(double)>& q, const EwpsOptions& opt = {}) {
  if (!opt.decays) {
    throw BoundaryTermError("Q does not vanish at infinity; the radial integral keeps a boundary term there");
  }
  const double far = 1e6 * opt.scale;
  const double q0 = q(0.0);
  if (std::abs(q(far)) > 1e-8 * std::max(std::abs(q0), 1e-300)) {
    throw BoundaryTermError("Q(w) has not decayed at w = " + std::to_string(far) +
                            "; the radial integral keeps a boundary term there");
  }
  constexpr int kGen = 2;
  const GrassmannElement eta = GrassmannElement::chi(kGen, 0);
  const GrassmannElement eta_star = GrassmannElement::chi_star(kGen, 0);
  const GrassmannElement bilinear = eta_star * eta * 2.0;

  auto radial = [&](double r) {
    const double w = r * r;
    double h0 = 0.1 * opt.scale;
    for (double b : opt.breaks) {
      const double d = std::abs(w - b);
      if (d > 0.0) h0 = std::min(h0, 0.5 * d);
    }
    // central differences reach below w = 0; Q must extend smoothly there
    const GrassmannElement qx = compose_scalar_function(q, GrassmannElement::scalar(kGen, w) + bilinear, h0);
    const double g = berezin_integrate(qx, 0).body();
    // da db / (2 pi) -> r dr after the angular integral
    return g * r;
  };
  std::vector<double> rbreaks;
  for (double b : opt.breaks)
    if (b > 0.0) rbreaks.push_back(std::sqrt(b));
  std::sort(rbreaks.begin(), rbreaks.end());
  const double rs = std::sqrt(opt.scale);
  double total = 0.0;
  double lo = 0.0;
  for (double b : rbreaks) {
    total += integrate_finite(radial, lo, b, opt.spec).value;
    lo = b;
  }
  total += integrate_semi_infinite(radial, lo, opt.spec, {}, std::max(rs, lo)).value;
  return total;
}

}  // namespace nrmt
