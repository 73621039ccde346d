#include <gtest/gtest.h>

#include <cmath>

#include "nrmt/densities.hpp"

using namespace nrmt;

namespace {

const SymmetryClass kClasses[] = {SymmetryClass::orthogonal(), SymmetryClass::unitary(),
                                  SymmetryClass::symplectic()};

double log_K(SymmetryClass cls, int n) {
  const double h = 0.5 * degrees_of_freedom(cls, n);
  return h * std::log(M_PI / 2.0) + 0.5 * n * std::log(2.0) - std::lgamma(h);
}

// Closed-form M_nu for each analytic family (M_0 = 1 built in).
double moment_oracle(const DensityFamily& fam, SymmetryClass cls, int n, int nu) {
  const double h = 0.5 * degrees_of_freedom(cls, n);
  const double b = cls.beta();
  if (auto* g = std::get_if<Gaussian>(&fam))
    return std::exp(std::lgamma(nu + h) - std::lgamma(h)) * std::pow(4.0 * g->v * g->v / b, nu);
  if (auto* t = std::get_if<BoundTrace>(&fam)) return h / (nu + h) * std::pow(t->a1, nu);
  if (auto* f = std::get_if<FixedTrace>(&fam)) return std::pow(f->a1, nu);
  if (auto* m = std::get_if<GaussMonomial>(&fam))
    return std::exp(std::lgamma(nu + m->m + h) - std::lgamma(m->m + h)) * std::pow(m->a1, -nu);
  if (auto* ne = std::get_if<NonExtensive>(&fam)) {
    const double lam = 1.0 / (ne->q - 1.0) - h;
    return std::pow(lam / ne->kappa, nu) *
           std::exp(std::lgamma(nu + h) + std::lgamma(lam - nu) - std::lgamma(h) - std::lgamma(lam));
  }
  const auto& q = std::get<GaussQuartic>(fam);
  const double z = q.a1 / std::sqrt(2.0 * q.a2);
  auto log_i = [&](double s) {
    return std::lgamma(s) - 0.5 * s * std::log(2.0 * q.a2) + log_parabolic_cylinder_D(-s, z);
  };
  return std::exp(log_i(nu + h) - log_i(h));
}

std::vector<DensityFamily> analytic_families(SymmetryClass cls, int n) {
  const double h = 0.5 * degrees_of_freedom(cls, n);
  // Lambda = 5 keeps moments up to nu = 4 finite
  const double q = 1.0 + 1.0 / (h + 5.0);
  return {Gaussian{0.9}, BoundTrace{2.5}, FixedTrace{1.7}, GaussMonomial{1.3, 2},
          GaussQuartic{0.6, 0.2}, NonExtensive{q, 1.4}};
}

}  // namespace

TEST(Normalization, GaussianClosedForm) {
  for (auto cls : kClasses)
    for (int n : {1, 2, 3, 4, 6}) {
      const double v = 0.7, b = cls.beta();
      const double h = 0.5 * degrees_of_freedom(cls, n);
      const double log_ref = -0.5 * n * std::log(2.0) + h * std::log(b / (2.0 * M_PI * v * v));
      NormDensity d(Gaussian{v}, cls, n);
      EXPECT_NEAR(d.log_a0(), log_ref, 1e-11 * std::max(1.0, std::abs(log_ref)));
    }
}

TEST(Normalization, NonExtensiveClosedForm) {
  for (auto cls : kClasses)
    for (int n : {2, 3, 4}) {
      const double h = 0.5 * degrees_of_freedom(cls, n);
      const double lam = 2.5, kappa = 0.8;
      const double q = 1.0 + 1.0 / (lam + h);
      const double log_ref = std::lgamma(lam + h) - std::lgamma(lam) - log_K(cls, n) -
                             std::lgamma(h) - h * std::log(lam / kappa);
      NormDensity d(NonExtensive{q, kappa}, cls, n);
      EXPECT_NEAR(d.lambda(), lam, 1e-12);
      EXPECT_NEAR(d.log_a0(), log_ref, 1e-9 * std::max(1.0, std::abs(log_ref)));
    }
}

TEST(Normalization, ZerothMomentIsOne) {
  for (auto cls : kClasses)
    for (int n : {2, 3, 4})
      for (const auto& fam : analytic_families(cls, n))
        EXPECT_NEAR(NormDensity(fam, cls, n).moment(0).value, 1.0, 1e-10) << family_name(fam);
}

TEST(Moments, MatchClosedForms) {
  for (auto cls : kClasses)
    for (int n : {2, 3, 4})
      for (const auto& fam : analytic_families(cls, n)) {
        NormDensity d(fam, cls, n);
        for (int nu = 1; nu <= 4; ++nu) {
          const double ref = moment_oracle(fam, cls, n, nu);
          EXPECT_NEAR(d.moment(nu).value / ref, 1.0, 1e-8)
              << family_name(fam) << " beta=" << cls.beta() << " N=" << n << " nu=" << nu;
        }
      }
}

TEST(Moments, FixedTraceExact) {
  NormDensity d(FixedTrace{1.9}, SymmetryClass::unitary(), 3);
  for (int nu = 0; nu < 6; ++nu) EXPECT_NEAR(d.moment(nu).value, std::pow(1.9, nu), 1e-12);
}

TEST(Moments, HeavyTailMomentsDoNotExist) {
  const auto cls = SymmetryClass::unitary();
  const double h = 0.5 * degrees_of_freedom(cls, 2);
  NormDensity d(NonExtensive{1.0 + 1.0 / (h + 1.5), 1.0}, cls, 2);
  EXPECT_NO_THROW(d.moment(1));
  EXPECT_THROW(d.moment(2), DivergenceError);
}

TEST(Moments, GridDensityTracksItsSource) {
  const auto cls = SymmetryClass::unitary();
  GridDensity g;
  for (int i = 0; i <= 4000; ++i) {
    const double u = 40.0 * i / 4000.0;
    g.u.push_back(u);
    g.values.push_back(std::exp(-u / 2.0));
  }
  NormDensity grid(g, cls, 2);
  NormDensity exact(Gaussian{1.0}, cls, 2);
  EXPECT_NEAR(grid.moment(1).value / exact.moment(1).value, 1.0, 1e-6);
  EXPECT_LT(grid.grid_tail_mass_fraction(), 1e-6);
  EXPECT_EQ(grid.shape(41.0), 0.0);
}

TEST(Validation, Rejections) {
  const auto cls = SymmetryClass::orthogonal();
  EXPECT_THROW(NormDensity(Gaussian{-1.0}, cls, 2), DomainError);
  EXPECT_THROW(NormDensity(BoundTrace{0.0}, cls, 2), DomainError);
  EXPECT_THROW(NormDensity(GaussMonomial{1.0, -1}, cls, 2), DomainError);
  // mu = 3, q_max = 1 + 2/3
  EXPECT_THROW(NormDensity(NonExtensive{1.0 + 2.0 / 3.0, 1.0}, cls, 2), NonNormalizableError);
  EXPECT_THROW(NormDensity(NonExtensive{1.0, 1.0}, cls, 2), DomainError);
  NormDensity ft(FixedTrace{1.0}, cls, 2);
  EXPECT_THROW(ft.eval(1.0), PointMassError);
  NormDensity ga(Gaussian{1.0}, cls, 2);
  EXPECT_THROW(ga.eval(-0.1), DomainError);
}

TEST(Fourier, GaussianClosedForm) {
  const auto cls = SymmetryClass::symplectic();
  NormDensity d(Gaussian{1.2}, cls, 2);
  const double b = 4.0 / (4.0 * 1.2 * 1.2);
  for (double y : {0.0, 0.3, 2.0, -1.5}) {
    const auto ref = d.a0() / std::sqrt(2.0 * M_PI) / std::complex<double>(b, -y);
    const auto got = d.fourier_transform(y);
    EXPECT_LT(std::abs(got - ref) / std::abs(ref), 1e-9) << y;
  }
}

TEST(Fourier, BoundTraceClosedForm) {
  const auto cls = SymmetryClass::unitary();
  NormDensity d(BoundTrace{2.0}, cls, 2);
  const double y = 1.3;
  const auto ref = d.a0() / std::sqrt(2.0 * M_PI) *
                   (std::exp(std::complex<double>(0.0, 2.0 * y)) - 1.0) /
                   std::complex<double>(0.0, y);
  EXPECT_LT(std::abs(d.fourier_transform(y) - ref) / std::abs(ref), 1e-9);
}

TEST(AngularConstant, KnownValues) {
  EXPECT_NEAR(angular_integral_constant(SymmetryClass::unitary(), 2), 2.0 * M_PI, 1e-10);
  EXPECT_NEAR(angular_integral_constant(SymmetryClass::orthogonal(), 1), 2.0, 1e-12);
}

TEST(AngularConstant, CircleQuadratureForTwoDimensions) {
  // int_0^{2 pi} |cos t - sin t|^beta dt
  for (auto cls : kClasses) {
    const int steps = 200000;
    double s = 0.0;
    for (int i = 0; i < steps; ++i) {
      const double t = 2.0 * M_PI * (i + 0.5) / steps;
      s += std::pow(std::abs(std::cos(t) - std::sin(t)), cls.beta());
    }
    s *= 2.0 * M_PI / steps;
    EXPECT_NEAR(angular_integral_constant(cls, 2) / s, 1.0, 1e-8) << cls.beta();
  }
}

TEST(AngularConstant, SphereQuadratureForThreeDimensions) {
  // spherical coordinates on S^2
  for (auto cls : kClasses) {
    const int nt = 1000, np = 2000;
    double s = 0.0;
    for (int i = 0; i < nt; ++i) {
      const double th = M_PI * (i + 0.5) / nt;
      for (int j = 0; j < np; ++j) {
        const double ph = 2.0 * M_PI * (j + 0.5) / np;
        const double x = std::sin(th) * std::cos(ph), y = std::sin(th) * std::sin(ph),
                     z = std::cos(th);
        s += std::pow(std::abs((x - y) * (x - z) * (y - z)), cls.beta()) * std::sin(th);
      }
    }
    s *= (M_PI / nt) * (2.0 * M_PI / np);
    EXPECT_NEAR(angular_integral_constant(cls, 3) / s, 1.0, 1e-4) << cls.beta();
  }
}
