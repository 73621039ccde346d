#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "nrmt/montecarlo.hpp"

using namespace nrmt;

namespace {

McOptions options(std::uint64_t seed, int threads = 1) {
  McOptions o;
  o.seed = seed;
  o.threads = threads;
  return o;
}

double gauss(double x, double var) { return std::exp(-x * x / (2 * var)) / std::sqrt(2 * M_PI * var); }

}  // namespace

TEST(MonteCarlo, HistogramIndependentOfThreadCount) {
  EnsembleSpec spec(NormDensity(NonExtensive{1.2, 1.0}, SymmetryClass::unitary(), 2), 1.0,
                    ExternalField({-0.5, 0.5}));
  const auto layout = Histogram::uniform(-4, 4, 16);
  const auto a = empirical_density(spec, 5000, layout, options(7, 1));
  const auto b = empirical_density(spec, 5000, layout, options(7, 3));
  EXPECT_EQ(a.counts, b.counts);
  EXPECT_EQ(a.count_squares, b.count_squares);
  EXPECT_EQ(a.underflow, b.underflow);
  const auto c = empirical_density(spec, 5000, layout, options(8, 1));
  EXPECT_NE(a.counts, c.counts);
}

TEST(MonteCarlo, TotalMassIsN) {
  EnsembleSpec spec(NormDensity(Gaussian{1.0}, SymmetryClass::symplectic(), 3));
  const auto h = empirical_density(spec, 2000, Histogram::uniform(-1, 1, 10), options(3));
  EXPECT_DOUBLE_EQ(h.total_mass(), 3.0);
  EXPECT_GT(h.underflow + h.overflow, 0u);
}

TEST(MonteCarlo, ZeroCouplingGivesPointMasses) {
  EnsembleSpec spec(NormDensity(Gaussian{1.0}, SymmetryClass::orthogonal(), 2), 0.0,
                    ExternalField({-1.05, 0.95}));
  const auto h = empirical_density(spec, 500, Histogram::uniform(-2, 2, 4), options(1));
  EXPECT_EQ(h.counts[0] + h.counts[1] + h.counts[2] + h.counts[3], 1000u);
  EXPECT_EQ(h.counts[0], 500u);  // [-2, -1)
  EXPECT_EQ(h.counts[2], 500u);  // [0, 1)
  EXPECT_THROW(compare_density(h, [](double) { return 0.0; }), DomainError);
}

TEST(MonteCarlo, FixedTraceConstraintPerDraw) {
  for (auto cls : {SymmetryClass::orthogonal(), SymmetryClass::unitary(), SymmetryClass::symplectic()}) {
    NormDensity d(FixedTrace{2.5}, cls, 3);
    const RadialSampler radial(d);
    Rng rng = make_stream(11, 0);
    for (int i = 0; i < 50; ++i) {
      double s = 0.0;
      for (double x : eigenvalues(sample_norm_dependent(radial, cls, 3, rng))) s += x * x;
      EXPECT_NEAR(s, 2.5, 1e-12);
    }
  }
}

TEST(MonteCarlo, ScalarGaussianHistogram) {
  // N = 1 unitary: H is real with density proportional to exp(-H^2 / 2 v^2)
  const double v = 0.8, h0 = 0.3;
  EnsembleSpec spec(NormDensity(Gaussian{v}, SymmetryClass::unitary(), 1), 1.0, ExternalField({h0}));
  const auto hist = empirical_density(spec, 100000, Histogram::uniform(h0 - 3, h0 + 3, 30), options(5));
  const auto good = compare_density(hist, [&](double x) { return gauss(x - h0, v * v); });
  EXPECT_GT(good.chi2_per_dof, 0.5);
  EXPECT_LT(good.chi2_per_dof, 2.0);
  EXPECT_LT(good.sup_sigma, 4.0);
  // negative control: wrong variance
  const auto bad = compare_density(hist, [&](double x) { return gauss(x - h0, 1.2 * v * v); });
  EXPECT_GT(bad.chi2_per_dof, 3.0);
}

TEST(MonteCarlo, JackknifeOfSingletonsIsSampleStdError) {
  std::vector<BatchSum> b;
  std::vector<double> xs = {1.0, 4.0, 2.5, -0.5, 3.0, 0.25};
  double mean = 0.0;
  for (double x : xs) {
    b.push_back({x, 1});
    mean += x;
  }
  mean /= xs.size();
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double se = std::sqrt(ss / (xs.size() - 1) / xs.size());
  const auto e = jackknife_mean(b);
  EXPECT_NEAR(e.mean, mean, 1e-15);
  EXPECT_NEAR(e.std_error, se, 1e-14);
}

TEST(MonteCarlo, FixedTraceMomentsExact) {
  NormDensity d(FixedTrace{2.0}, SymmetryClass::unitary(), 3);
  for (int nu : {0, 1, 2}) {
    const auto e = empirical_moment(d, nu, 3000, options(2));
    EXPECT_NEAR(e.mean, std::pow(2.0, nu), 1e-12);
    EXPECT_LT(e.std_error, 1e-12);
  }
}

TEST(MonteCarlo, GaussianFirstMoment) {
  for (auto cls : {SymmetryClass::orthogonal(), SymmetryClass::unitary(), SymmetryClass::symplectic()}) {
    const double v = 1.1;
    NormDensity d(Gaussian{v}, cls, 3);
    const auto e = empirical_moment(d, 1, 20000, options(4));
    const double want = 2.0 * d.mu() * v * v / cls.beta();
    EXPECT_LT(std::abs(e.mean - want), 3.0 * e.std_error) << cls.beta();
  }
}

TEST(MonteCarlo, HeavyTailInflatesStdError) {
  const auto cls = SymmetryClass::unitary();
  const double h = 0.5 * 4;
  NormDensity heavy(NonExtensive{1.0 + 1.0 / (2.2 + h), 1.0}, cls, 2);
  NormDensity light(NonExtensive{1.0 + 1.0 / (10.0 + h), 1.0}, cls, 2);
  const auto eh = empirical_moment(heavy, 2, 20000, options(6));
  const auto el = empirical_moment(light, 2, 20000, options(6));
  EXPECT_GT(eh.std_error / eh.mean, 3.0 * el.std_error / el.mean);
}

TEST(MonteCarlo, AngularConstant) {
  EXPECT_NEAR(angular_integral_constant(SymmetryClass::unitary(), 2), 2 * M_PI, 1e-12);
  for (auto [beta, n] : {std::pair{1, 2}, std::pair{2, 2}, std::pair{4, 2}, std::pair{2, 3}}) {
    const auto cls = SymmetryClass::from_beta(beta);
    const auto e = empirical_angular_constant(cls, n, 100000, options(9));
    EXPECT_LT(std::abs(e.mean - angular_integral_constant(cls, n)), 3.0 * e.std_error)
        << beta << " " << n;
  }
}

TEST(MonteCarlo, HistogramOracleInterpolates) {
  auto h = std::make_shared<Histogram>(Histogram::uniform(0, 4, 4));
  // densities 1, 2, 3, 4 per unit width with one sample
  h->n_samples = 1;
  h->counts = {1, 2, 3, 4};
  h->count_squares = {1, 4, 9, 16};
  const auto oracle = histogram_oracle(h);
  const ExternalField zero({0.0});
  auto at = [&](double x) {
    const std::array<double, 1> y = {x};
    return oracle(y, zero);
  };
  EXPECT_DOUBLE_EQ(at(0.2), 1.0);
  EXPECT_DOUBLE_EQ(at(1.0), 1.5);
  EXPECT_DOUBLE_EQ(at(2.25), 2.75);
  EXPECT_DOUBLE_EQ(at(3.9), 4.0);
  EXPECT_EQ(at(-0.1), 0.0);
  EXPECT_EQ(at(4.0), 0.0);
  const std::array<double, 1> y = {1.0};
  EXPECT_THROW(oracle(y, ExternalField({0.5})), UnsupportedError);
}
