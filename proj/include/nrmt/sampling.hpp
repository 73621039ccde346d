#pragma once

// Sampling of norm-dependent ensembles: the radius u = Tr H^2 is drawn by
// inverse CDF from u^(mu/2 - 1) P(u), the direction from a normalized
// Gaussian matrix.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <random>
#include <vector>

#include "nrmt/densities.hpp"
#include "nrmt/errors.hpp"
#include "nrmt/matrix.hpp"
#include "nrmt/quad.hpp"
#include "nrmt/rng.hpp"

namespace nrmt {

/// Inverse-CDF sampler for u = Tr H^2. The CDF is tabulated on an adaptive
/// grid in s = x^(mu/2), where x = u / (u + scale) on unbounded supports and
/// x = u / u_max on bounded ones; in s the radial density is finite at the
/// origin. Cubic Hermite interpolation with exact slopes is refined until
/// the midpoint error is below `tol`. A power-law tail is modelled exactly
/// on the last interval.
class RadialSampler {
 public:
  explicit RadialSampler(const NormDensity& density, double tol = 1e-8)
      : density_(density), tol_(tol) {
    if (density.is_point_mass()) {
      fixed_u_ = std::get<FixedTrace>(density.family()).a1;
      return;
    }
    half_mu_ = density.half_mu();
    const double end = density.support_end();
    bounded_ = std::isfinite(end);
    scale_ = bounded_ ? end : density.scale();
    if (auto* ne = std::get_if<NonExtensive>(&density.family())) {
      tail_exponent_ = 1.0 / (ne->q - 1.0) - half_mu_;
    }
    build();
  }

  bool is_exact() const { return fixed_u_ > 0.0; }
  std::size_t nodes() const { return s_.size(); }

  /// Maps a uniform variate to u.
  double quantile(double p) const {
    if (is_exact()) return fixed_u_;
    p = std::clamp(p, 0.0, 1.0);
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), p);
    std::size_t i = it == cdf_.begin() ? 0 : static_cast<std::size_t>(it - cdf_.begin()) - 1;
    if (i >= s_.size() - 1) i = s_.size() - 2;
    const bool last = i == s_.size() - 2;
    if (last && tail_exponent_ > 0.0) {
      // F = 1 - (1 - F_a) ((1 - s) / (1 - s_a))^tail
      const double rem = (1.0 - p) / (1.0 - cdf_[i]);
      const double s = 1.0 - (1.0 - s_[i]) * std::pow(std::max(rem, 0.0), 1.0 / tail_exponent_);
      return u_of_s(s);
    }
    double lo = s_[i], hi = s_[i + 1];
    double s = lo + (hi - lo) * (cdf_[i + 1] > cdf_[i] ? (p - cdf_[i]) / (cdf_[i + 1] - cdf_[i]) : 0.5);
    for (int it2 = 0; it2 < 100; ++it2) {
      const double f = interp(i, s) - p;
      if (f > 0.0) hi = s; else lo = s;
      const double d = slope_interp(i, s);
      double next = d > 0.0 ? s - f / d : 0.5 * (lo + hi);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - s) <= 1e-15 * std::max(1e-300, std::abs(s)) || hi - lo < 1e-16) {
        s = next;
        break;
      }
      s = next;
    }
    return u_of_s(s);
  }

  double sample(Rng& rng) const {
    if (is_exact()) return fixed_u_;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    return quantile(unif(rng));
  }

  /// CDF of u by direct quadrature; independent of the table, for tests.
  double cdf_by_quadrature(double u) const {
    if (is_exact()) return u >= fixed_u_ ? 1.0 : 0.0;
    return mass(0.0, std::min(u, bounded_ ? scale_ : u)) / total_;
  }

 private:
  double u_of_x(double x) const {
    if (bounded_) return scale_ * x;
    if (x >= 1.0) return std::numeric_limits<double>::infinity();
    return scale_ * x / (1.0 - x);
  }
  double u_of_s(double s) const { return u_of_x(std::pow(std::max(s, 0.0), 1.0 / half_mu_)); }

  double radial(double u) const {
    if (u <= 0.0) return 0.0;
    const double sh = density_.shape(u);
    return sh == 0.0 ? 0.0 : std::pow(u, half_mu_ - 1.0) * sh;
  }

  // dF/ds (unnormalized)
  double density_s(double s) const {
    const double inv = 1.0 / half_mu_;
    if (s <= 0.0) return std::pow(scale_, half_mu_) * inv * density_.shape(0.0);
    const double x = std::pow(s, inv);
    if (!bounded_ && x >= 1.0) return 0.0;
    const double dxds = inv * x / s;
    const double dudx = bounded_ ? scale_ : scale_ / ((1.0 - x) * (1.0 - x));
    return radial(u_of_x(x)) * dudx * dxds;
  }

  double mass(double ua, double ub) const {
    if (ub <= ua) return 0.0;
    QuadratureSpec spec;
    spec.abs_tol = 1e-300;
    spec.rel_tol = 1e-12;
    spec.max_evals = 200000;
    auto f = [&](double u) { return radial(u); };
    const EndpointBehavior ends{ua == 0.0 ? half_mu_ : 1.0, 1.0};
    if (std::isinf(ub)) {
      return integrate_semi_infinite(f, ua, spec,
                                     EndpointBehavior{ends.left_power,
                                                      tail_exponent_ > 0.0 ? tail_exponent_ : 1.0},
                                     std::max(scale_, ua))
          .value;
    }
    std::vector<double> breaks;
    for (double b : density_.breakpoints())
      if (b > ua && b < ub) breaks.push_back(b);
    if (breaks.empty()) return integrate_finite(f, ua, ub, spec, ends).value;
    double s = integrate_finite(f, ua, breaks.front(), spec, ends).value;
    s += integrate_with_breaks(f, breaks.front(), ub, breaks, spec).value;
    return s;
  }

  double interp(std::size_t i, double s) const {
    const double h = s_[i + 1] - s_[i];
    const double t = (s - s_[i]) / h;
    const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
    const double h10 = t * (1 - t) * (1 - t);
    const double h01 = t * t * (3 - 2 * t);
    const double h11 = t * t * (t - 1);
    return h00 * cdf_[i] + h10 * h * slope_[i] + h01 * cdf_[i + 1] + h11 * h * slope_[i + 1];
  }

  double slope_interp(std::size_t i, double s) const {
    const double h = s_[i + 1] - s_[i];
    const double t = (s - s_[i]) / h;
    const double d00 = 6 * t * t - 6 * t;
    const double d10 = 3 * t * t - 4 * t + 1;
    const double d01 = -6 * t * t + 6 * t;
    const double d11 = 3 * t * t - 2 * t;
    return (d00 * cdf_[i] + d01 * cdf_[i + 1]) / h + d10 * slope_[i] + d11 * slope_[i + 1];
  }

  struct Node {
    double s, f, g;  // position, cumulative mass, slope (unnormalized)
  };

  static double hermite(const Node& a, const Node& b, double s) {
    const double h = b.s - a.s;
    const double t = (s - a.s) / h;
    return (1 + 2 * t) * (1 - t) * (1 - t) * a.f + t * (1 - t) * (1 - t) * h * a.g +
           t * t * (3 - 2 * t) * b.f + t * t * (t - 1) * h * b.g;
  }

  void refine(const Node& a, const Node& b, double total_guess, int depth, std::vector<Node>& out) {
    const double m = 0.5 * (a.s + b.s);
    Node mid{m, a.f + mass(u_of_s(a.s), u_of_s(m)), density_s(m)};
    const double err = std::abs(hermite(a, b, m) - mid.f) / total_guess;
    if (err > tol_ && depth < 40) {
      refine(a, mid, total_guess, depth + 1, out);
      refine(mid, b, total_guess, depth + 1, out);
    } else {
      out.push_back(b);
    }
  }

  void build() {
    constexpr int kInitial = 32;
    const bool heavy = tail_exponent_ > 0.0;
    // heavy tails: the last interval [s_last, 1] is handled by the power model
    const int regular = heavy ? kInitial - 1 : kInitial;
    std::vector<Node> coarse;
    coarse.push_back({0.0, 0.0, density_s(0.0)});
    for (int i = 1; i <= regular; ++i) {
      const double s = static_cast<double>(i) / kInitial;
      const Node& prev = coarse.back();
      coarse.push_back({s, prev.f + mass(u_of_s(prev.s), u_of_s(s)), density_s(s)});
    }
    double tail_mass = 0.0;
    if (heavy) tail_mass = mass(u_of_s(coarse.back().s), std::numeric_limits<double>::infinity());
    total_ = coarse.back().f + tail_mass;
    if (!(total_ > 0.0) || !std::isfinite(total_)) {
      throw NonNormalizableError("radial density is not normalizable");
    }
    std::vector<Node> fine{coarse.front()};
    for (std::size_t i = 0; i + 1 < coarse.size(); ++i) refine(coarse[i], coarse[i + 1], total_, 0, fine);
    if (heavy) {
      // extend the power-law region only once its model is accurate
      for (int guard = 0; guard < 60; ++guard) {
        const Node& last = fine.back();
        const double s_mid = 0.5 * (last.s + 1.0);
        const double rem = total_ - last.f;
        const double exact = mass(u_of_s(s_mid), std::numeric_limits<double>::infinity());
        const double model = rem * std::pow((1.0 - s_mid) / (1.0 - last.s), tail_exponent_);
        if (std::abs(exact - model) / total_ <= tol_) break;
        const Node next{s_mid, total_ - exact, density_s(s_mid)};
        refine(last, next, total_, 0, fine);
      }
      fine.push_back({1.0, total_, 0.0});
    }
    s_.clear();
    cdf_.clear();
    slope_.clear();
    for (const Node& n : fine) {
      s_.push_back(n.s);
      cdf_.push_back(n.f / total_);
      slope_.push_back(n.g / total_);
    }
    cdf_.back() = 1.0;
  }

  NormDensity density_;
  double tol_;
  double fixed_u_ = 0.0;
  double half_mu_ = 1.0;
  bool bounded_ = false;
  double scale_ = 1.0;
  double tail_exponent_ = 0.0;
  double total_ = 1.0;
  std::vector<double> s_, cdf_, slope_;
};

/// Gaussian direction scaled to Tr H^2 = u.
inline RandomMatrix sample_with_radius(SymmetryClass cls, int n, double u, Rng& rng) {
  RandomMatrix h = sample_gaussian(cls, n, 1.0, rng);
  const double norm = trace_norm_sq(h);
  h.scale(std::sqrt(u / norm));
  return h;
}

inline RandomMatrix sample_norm_dependent(const RadialSampler& radial, SymmetryClass cls, int n,
                                          Rng& rng) {
  const double u = radial.sample(rng);
  return sample_with_radius(cls, n, u, rng);
}

inline RandomMatrix sample_norm_dependent(const NormDensity& density, Rng& rng) {
  RadialSampler radial(density);
  return sample_norm_dependent(radial, density.symmetry(), density.n(), rng);
}

}  // namespace nrmt
