#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "nrmt/specfun.hpp"

using namespace nrmt;

namespace {

// Explicit power series H_n(x) = n! sum_k (-1)^k (2x)^(n-2k) / (k! (n-2k)!).
double hermite_series(int n, double x) {
  double s = 0.0;
  for (int k = 0; 2 * k <= n; ++k) {
    s += std::pow(-1.0, k) * std::pow(2.0 * x, n - 2 * k) /
         (std::tgamma(k + 1.0) * std::tgamma(n - 2 * k + 1.0));
  }
  return s * std::tgamma(n + 1.0);
}

double brute_force_esym(const std::vector<double>& v, int m) {
  double s = 0.0;
  const unsigned n = static_cast<unsigned>(v.size());
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (__builtin_popcount(mask) != m) continue;
    double p = 1.0;
    for (unsigned i = 0; i < n; ++i)
      if (mask & (1u << i)) p *= v[i];
    s += p;
  }
  return s;
}

// Composite Simpson on [0, T] with a very fine grid; independent of the
// adaptive machinery.
template <class F>
double simpson(F f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

}  // namespace

TEST(LnGamma, FactorialValues) {
  EXPECT_NEAR(ln_gamma(2.0), 0.0, 1e-14);
  EXPECT_NEAR(ln_gamma(0.5), 0.5723649429247001, 1e-13);
  EXPECT_NEAR(ln_gamma(5.0), std::log(24.0), 1e-13);
}

TEST(LnGamma, RelativeAccuracyAgainstStdTgamma) {
  for (double x = 0.5; x <= 170.0; x += 0.37) {
    const double ref = std::tgamma(x);
    EXPECT_LT(std::abs(std::exp(ln_gamma(x)) - ref) / ref, 1e-12) << x;
  }
  for (double x = 0.5; x <= 200.0; x += 0.53) {
    EXPECT_NEAR(ln_gamma(x), std::lgamma(x), 1e-12 * std::max(1.0, std::abs(std::lgamma(x)))) << x;
  }
}

TEST(LnGamma, FunctionalEquation) {
  for (double x = 0.1; x < 200.0; x *= 1.17) {
    EXPECT_NEAR(ln_gamma(x + 1.0), ln_gamma(x) + std::log(x), 1e-12 * std::max(1.0, ln_gamma(x)));
  }
}

TEST(LnGamma, RejectsNonpositive) {
  EXPECT_THROW(ln_gamma(0.0), DomainError);
  EXPECT_THROW(ln_gamma(-1.5), DomainError);
}

TEST(Hermite, BaseCasesAndRecurrenceValue) {
  EXPECT_EQ(hermite_phys(0, 3.7), 1.0);
  EXPECT_EQ(hermite_phys(1, 0.5), 1.0);
  EXPECT_DOUBLE_EQ(hermite_phys(2, 1.0), 2.0);
  EXPECT_NEAR(hermite_phys(4, 0.5), hermite_series(4, 0.5), 1e-12);
  EXPECT_NEAR(hermite_phys(4, 0.5), 1.0, 1e-12);  // 16z^4 - 48z^2 + 12
}

TEST(Hermite, MatchesSeriesForModerateDegrees) {
  for (int m = 0; m <= 20; ++m)
    for (double z : {-2.3, -0.4, 0.0, 0.9, 3.1}) {
      const double ref = hermite_series(m, z);
      EXPECT_NEAR(hermite_phys(m, z), ref, 1e-11 * std::max(1.0, std::abs(ref))) << m << " " << z;
    }
}

TEST(Hermite, RecurrenceIdentityHolds) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> zd(-10.0, 10.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double z = zd(rng);
    for (int m = 1; m < 60; ++m) {
      const double lhs = hermite_phys(m + 1, z);
      const double rhs = 2.0 * z * hermite_phys(m, z) - 2.0 * m * hermite_phys(m - 1, z);
      const double scale = std::abs(2.0 * z * hermite_phys(m, z)) + std::abs(2.0 * m * hermite_phys(m - 1, z));
      EXPECT_LE(std::abs(lhs - rhs), 1e-10 * std::max(scale, 1e-300));
    }
  }
}

TEST(ParabolicCylinder, OrderMinusOneAtZero) {
  // D_{-1}(0) = int_0^inf exp(-t^2/2) dt
  const double oracle = simpson([](double t) { return std::exp(-0.5 * t * t); }, 0.0, 40.0, 400000);
  EXPECT_NEAR(parabolic_cylinder_D(-1.0, 0.0), oracle, 1e-10);
  EXPECT_NEAR(parabolic_cylinder_D(-1.0, 0.0), std::sqrt(M_PI / 2.0), 1e-10);
}

TEST(ParabolicCylinder, OrderMinusTwoAgainstRefinedGrid) {
  const double coarse = simpson([](double t) { return t * std::exp(-0.5 * t * t); }, 0.0, 40.0, 200000);
  const double fine = simpson([](double t) { return t * std::exp(-0.5 * t * t); }, 0.0, 40.0, 400000);
  ASSERT_NEAR(coarse, fine, 1e-12);
  EXPECT_NEAR(parabolic_cylinder_D(-2.0, 0.0), fine, 1e-10);
}

TEST(ParabolicCylinder, ClosedFormOrderMinusOne) {
  // D_{-1}(z) = exp(z^2/4) sqrt(pi/2) erfc(z / sqrt 2)
  for (double z : {-5.0, -1.0, 0.3, 2.0, 6.0}) {
    const double ref = std::exp(0.25 * z * z) * std::sqrt(M_PI / 2.0) * std::erfc(z / std::sqrt(2.0));
    EXPECT_NEAR(parabolic_cylinder_D(-1.0, z) / ref, 1.0, 1e-9) << z;
  }
}

TEST(ParabolicCylinder, ContiguousRelation) {
  // D_{p+1}(z) - z D_p(z) + p D_{p-1}(z) = 0 for p + 1 < 0
  for (double a : {1.5, 2.0, 3.7, 8.0, 20.0, 60.0, 98.0})
    for (double z : {-20.0, -7.5, -1.0, 0.0, 0.8, 4.0, 12.0, 20.0}) {
      const double p = -a - 1.0;
      const double dp1 = parabolic_cylinder_D(p + 1.0, z);
      const double d0 = parabolic_cylinder_D(p, z);
      const double dm1 = parabolic_cylinder_D(p - 1.0, z);
      const double scale = std::abs(dp1) + std::abs(z * d0) + std::abs(p * dm1);
      EXPECT_LE(std::abs(dp1 - z * d0 + p * dm1), 1e-7 * scale) << a << " " << z;
    }
}

TEST(ParabolicCylinder, RejectsNonnegativeOrder) {
  EXPECT_THROW(parabolic_cylinder_D(0.0, 1.0), UnsupportedError);
  EXPECT_THROW(parabolic_cylinder_D(0.5, 1.0), UnsupportedError);
}

TEST(ElementarySymmetric, SmallCases) {
  const std::vector<double> v{2.0, 3.0};
  EXPECT_DOUBLE_EQ(elementary_symmetric(v, 0), 1.0);
  EXPECT_DOUBLE_EQ(elementary_symmetric(v, 1), 5.0);
  EXPECT_DOUBLE_EQ(elementary_symmetric(v, 2), 6.0);
  EXPECT_THROW(elementary_symmetric(v, 3), DomainError);
  EXPECT_THROW(elementary_symmetric(v, -1), DomainError);
}

TEST(ElementarySymmetric, AgreesWithSubsetEnumeration) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  for (int len = 0; len <= 12; ++len) {
    std::vector<double> v(len);
    for (auto& x : v) x = d(rng);
    for (int m = 0; m <= len; ++m) {
      const double ref = brute_force_esym(v, m);
      EXPECT_NEAR(elementary_symmetric(v, m), ref, 1e-12 * std::max(1.0, std::abs(ref)));
    }
  }
}

TEST(ElementarySymmetric, TableGrowthRecurrence) {
  const std::vector<double> v{0.3, -1.2, 2.5, 0.7};
  SymmetricPolyTable t(v);
  SymmetricPolyTable grown = t;
  grown.add(1.9);
  EXPECT_EQ(t[0], 1.0);
  EXPECT_EQ(t[5], 0.0);
  for (std::size_t m = 1; m <= 5; ++m) EXPECT_NEAR(grown[m], t[m] + 1.9 * t[m - 1], 1e-14);
}
