#include <gtest/gtest.h>

#include <cmath>

#include "nrmt/supertransform.hpp"

using namespace nrmt;

namespace {

const SymmetryClass kClasses[] = {SymmetryClass::orthogonal(), SymmetryClass::unitary(),
                                  SymmetryClass::symplectic()};

std::vector<DensityFamily> spread_families(SymmetryClass cls, int n) {
  const double h = 0.5 * degrees_of_freedom(cls, n);
  return {Gaussian{1.3}, NonExtensive{1.0 + 1.0 / (h + 3.0), 0.8}, GaussMonomial{1.1, 1},
          GaussMonomial{0.6, 4}};
}

}  // namespace

TEST(SpreadForFamily, Kinds) {
  const auto cls = SymmetryClass::unitary();
  const auto g = spread_for_family(NormDensity(Gaussian{1.3}, cls, 2));
  ASSERT_TRUE(std::holds_alternative<PointMass>(g));
  EXPECT_NEAR(std::get<PointMass>(g).t0, 1.69, 1e-15);
  const auto m0 = spread_for_family(NormDensity(GaussMonomial{2.0, 0}, cls, 2));
  ASSERT_TRUE(std::holds_alternative<PointMass>(m0));
  EXPECT_NEAR(std::get<PointMass>(m0).t0, 2.0 / 8.0, 1e-15);
  EXPECT_TRUE(std::holds_alternative<DerivativeAtoms>(
      spread_for_family(NormDensity(GaussMonomial{2.0, 2}, cls, 2))));
  EXPECT_TRUE(std::holds_alternative<InverseGamma>(
      spread_for_family(NormDensity(NonExtensive{1.2, 1.0}, cls, 2))));
  for (const DensityFamily& f :
       {DensityFamily{BoundTrace{1.0}}, DensityFamily{FixedTrace{1.0}},
        DensityFamily{GaussQuartic{1.0, 1.0}}})
    EXPECT_THROW(spread_for_family(NormDensity(f, cls, 2)), UnavailableError);
}

TEST(SpreadForFamily, UnitMass) {
  for (auto cls : kClasses)
    for (int n : {2, 3, 4})
      for (const auto& fam : spread_families(cls, n)) {
        const auto s = spread_for_family(NormDensity(fam, cls, n));
        EXPECT_NEAR(spread_mass(s), 1.0, 1e-8) << family_name(fam);
      }
}

TEST(MixReproduce, MatchesDensity) {
  for (auto cls : kClasses)
    for (int n : {2, 3, 4})
      for (const auto& fam : spread_families(cls, n)) {
        NormDensity d(fam, cls, n);
        const auto s = spread_for_family(d);
        const double m1 = d.moment(1).value;
        double pmax = 0.0;
        for (int i = 0; i < 20; ++i) pmax = std::max(pmax, d.eval(10.0 * m1 * i / 19.0));
        for (int i = 0; i < 20; ++i) {
          const double u = 10.0 * m1 * i / 19.0;
          const double p = d.eval(u);
          const auto r = mix_reproduce(s, d, u);
          EXPECT_FALSE(r.tail_truncated);
          if (p == 0.0) {
            EXPECT_NEAR(r.value, 0.0, 1e-10 * pmax);
          } else {
            EXPECT_NEAR(r.value / p, 1.0, 1e-6)
                << family_name(fam) << " beta=" << cls.beta() << " N=" << n << " u=" << u;
          }
        }
      }
}

TEST(MixReproduce, NonExtensiveAtOriginIsA0) {
  NormDensity d(NonExtensive{1.15, 2.0}, SymmetryClass::orthogonal(), 3);
  EXPECT_NEAR(mix_reproduce(spread_for_family(d), d, 0.0).value / d.a0(), 1.0, 1e-10);
}

TEST(MixReproduce, MonomialAtomsQuadratureFree) {
  NormDensity d(GaussMonomial{1.4, 1}, SymmetryClass::symplectic(), 2);
  const auto s = spread_for_family(d);
  for (double u : {0.1, 1.0, 3.0})
    EXPECT_NEAR(mix_reproduce(s, d, u).value / (d.a0() * u * std::exp(-1.4 * u)), 1.0, 1e-8);
}

TEST(MixReproduce, GridSpreadFlagsTruncation) {
  // inverse gamma tabulated on a finite grid
  GridFunction g;
  const double shape = 3.0, scale = 2.0;
  for (int i = 1; i <= 400; ++i) {
    const double t = 0.01 * i;
    g.t.push_back(t);
    g.values.push_back(std::exp(shape * std::log(scale) - std::lgamma(shape) -
                                (shape + 1.0) * std::log(t) - scale / t));
  }
  NormDensity d(Gaussian{1.0}, SymmetryClass::unitary(), 2);
  const auto r = mix_reproduce(SpreadFunction{g}, d, 0.5);
  EXPECT_TRUE(r.tail_truncated);
  EXPECT_GT(r.value, 0.0);
  EXPECT_NEAR(spread_mass(SpreadFunction{g}), 1.0, 2e-2);
}

TEST(MixCheckSuperspace, MatchesSuperspaceDensity) {
  for (auto cls : kClasses)
    for (int n : {2, 3, 4})
      for (const auto& fam : spread_families(cls, n)) {
        NormDensity d(fam, cls, n);
        const auto s = spread_for_family(d);
        for (int k : {1, 2}) {
          EXPECT_NEAR(mix_check_superspace(s, cls, k, 0.0) / normalization_constant_c(cls, k), 1.0,
                      1e-10);
          for (int i = 0; i < 20; ++i) {
            const double w = 2.0 * d.scale() * i / 19.0;
            const double q = superspace_density_numeric(d, k, w);
            EXPECT_NEAR(mix_check_superspace(s, cls, k, w) / q, 1.0, 1e-6)
                << family_name(fam) << " beta=" << cls.beta() << " N=" << n << " w=" << w;
          }
        }
      }
}

TEST(MixGeneral, AtomsAgreeWithClosedFormKernel) {
  NormDensity d(GaussMonomial{0.9, 3}, SymmetryClass::unitary(), 3);
  const auto s = spread_for_family(d);
  const double w = 0.7;
  auto g = [&](double t) { return std::exp(-2.0 * w / (4.0 * t)); };
  EXPECT_NEAR(mix_general(s, 2, g).value, mix_power_exponential(s, 2, 1.0, 0.0, w).value, 1e-7);
}
