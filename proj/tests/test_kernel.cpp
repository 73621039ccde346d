#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "nrmt/kernel.hpp"

using namespace nrmt;

namespace {

double gauss(double x, double var) { return std::exp(-x * x / (2 * var)) / std::sqrt(2 * M_PI * var); }

// Kernel by explicit subset sums with the standard library Hermite polynomials.
double kernel_by_subsets(const std::vector<double>& h, double var, double xp, double xq) {
  const int n = static_cast<int>(h.size());
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    std::vector<double> r;
    for (int j = 0; j < n; ++j)
      if (j != i) r.push_back(1.0 / (h[i] - h[j]));
    std::vector<double> e(n, 0.0);
    for (unsigned mask = 0; mask < (1u << r.size()); ++mask) {
      double prod = 1.0;
      int deg = 0;
      for (std::size_t b = 0; b < r.size(); ++b)
        if (mask & (1u << b)) {
          prod *= r[b];
          ++deg;
        }
      e[deg] += prod;
    }
    double inner = 0.0;
    for (int m = 0; m < n; ++m)
      inner += std::pow(var / 2, 0.5 * m) * std::hermite(m, (xq - h[i]) / std::sqrt(2 * var)) * e[m];
    total += gauss(xp - h[i], var) * inner;
  }
  return total;
}

const std::vector<std::vector<double>> kConfigs = {
    {0.0, 1.0, -0.7, 2.1}, {-1.5, 0.3, 0.8, 1.9}, {0.2, -0.4, 3.0, -2.2}};

std::vector<double> grid5(const std::vector<double>& h, double sig) {
  const auto [lo, hi] = std::minmax_element(h.begin(), h.end());
  std::vector<double> g;
  for (int i = 0; i < 5; ++i) g.push_back(*lo - sig + (*hi - *lo + 2 * sig) * i / 4.0);
  return g;
}

}  // namespace

TEST(Kernel, SingleLevelIsGaussian) {
  KernelContext ctx(ExternalField({0.4}), 0.7);
  for (double xp : {-2.0, 0.0, 0.4, 1.3})
    for (double xq : {-1.0, 0.5, 3.0}) EXPECT_NEAR(kernel_closed_form(ctx, xp, xq), gauss(xp - 0.4, 0.7), 1e-15);
}

TEST(Kernel, ClosedFormMatchesSubsetSums) {
  const std::vector<double> h = {-0.8, 0.35, 1.6};
  KernelContext ctx(ExternalField(h), 0.45);
  for (double xp : {-2.0, -0.5, 0.35, 1.0, 2.5})
    for (double xq : {-1.7, 0.0, 0.9, 2.0}) {
      const double want = kernel_by_subsets(h, 0.45, xp, xq);
      EXPECT_NEAR(kernel_closed_form(ctx, xp, xq), want, 1e-13 * std::max(1.0, std::abs(want)));
    }
}

TEST(Kernel, AgreesWithSemiOracle) {
  for (const auto& full : kConfigs)
    for (int n = 1; n <= 4; ++n)
      for (double var : {0.3, 1.2}) {
        std::vector<double> h(full.begin(), full.begin() + n);
        KernelContext ctx(ExternalField(h), var);
        const auto g = grid5(h, ctx.sigma());
        for (double xp : g)
          for (double xq : g) {
            const double c = kernel_closed_form(ctx, xp, xq);
            const double s = kernel_oracle_semi(ctx, xp, xq);
            EXPECT_LT(std::abs(c - s) / std::max(std::abs(c), 1e-300), 1e-6)
                << "N=" << n << " var=" << var << " at (" << xp << ", " << xq << ")";
          }
      }
}

TEST(Kernel, AgreesWithEpsOracle) {
  for (const std::vector<double>& h : {std::vector<double>{0.0, 1.0}, std::vector<double>{-0.6, 0.9},
                                       std::vector<double>{0.3}}) {
    KernelContext ctx(ExternalField(h), 0.5);
    for (double xp : {-0.5, 0.4, 1.2})
      for (double xq : {-0.3, 0.8}) {
        const double c = kernel_closed_form(ctx, xp, xq);
        const auto e = kernel_oracle_eps(ctx, xp, xq);
        EXPECT_LT(std::abs(c - e.value) / std::max(std::abs(c), 1e-300), 1e-3)
            << "at (" << xp << ", " << xq << ") raw " << e.raw[0];
      }
  }
}

TEST(Kernel, EpsOracleConvergesInEps) {
  KernelContext ctx(ExternalField({-0.6, 0.9}), 0.5);
  const double c = kernel_closed_form(ctx, 0.4, 0.8);
  const auto e = kernel_oracle_eps(ctx, 0.4, 0.8);
  // raw values approach the closed form as eps halves
  EXPECT_GT(std::abs(e.raw[0] - c), std::abs(e.raw[2] - c));
  EXPECT_LT(std::abs(e.value - c), std::abs(e.raw[2] - c));
}

TEST(Kernel, FieldPermutationInvariance) {
  const std::vector<double> h = {0.1, -1.2, 0.9, 2.4};
  std::vector<double> p = {2.4, 0.1, 0.9, -1.2};
  KernelContext a(ExternalField(h), 0.8), b(ExternalField(p), 0.8);
  for (double xp : {-1.0, 0.5, 2.0})
    for (double xq : {-0.4, 1.1}) {
      const double va = kernel_closed_form(a, xp, xq);
      EXPECT_NEAR(va, kernel_closed_form(b, xp, xq), 1e-13 * std::max(1.0, std::abs(va)));
    }
}

TEST(Kernel, TranslationAndScalingCovariance) {
  const std::vector<double> h = {-0.5, 0.2, 1.4};
  const double shift = 0.73, lam = 1.9;
  std::vector<double> ht, hs;
  for (double x : h) {
    ht.push_back(x + shift);
    hs.push_back(lam * x);
  }
  KernelContext base(ExternalField(h), 0.6), tr(ExternalField(ht), 0.6),
      sc(ExternalField(hs), 0.6 * lam * lam);
  for (double xp : {-1.0, 0.3, 1.5})
    for (double xq : {-0.2, 0.9}) {
      const double v = kernel_closed_form(base, xp, xq);
      EXPECT_NEAR(kernel_closed_form(tr, xp + shift, xq + shift), v, 1e-13);
      EXPECT_NEAR(lam * kernel_closed_form(sc, lam * xp, lam * xq), v, 1e-13);
    }
}

TEST(Kernel, DiagonalIntegratesToN) {
  const std::vector<std::vector<double>> fields = {
      {0.0, 1.0, -1.0, 2.0, -2.5, 3.1}, {0.1, 0.45, 0.9, 1.2, 1.75, 2.0}, {-3.0, -1.1, 0.0, 0.5, 4.0, 6.0}};
  QuadratureSpec spec;
  spec.rel_tol = 1e-10;
  for (const auto& full : fields)
    for (int n = 1; n <= 6; ++n)
      for (double var : {0.25, 2.0}) {
        std::vector<double> h(full.begin(), full.begin() + n);
        KernelContext ctx(ExternalField(h), var);
        auto f = [&](double x) { return kernel_closed_form(ctx, x, x); };
        const double total = integrate_with_breaks(f, -40.0, 40.0, h, spec).value;
        EXPECT_NEAR(total, n, 1e-3) << "N=" << n << " var=" << var;
      }
}

TEST(Kernel, ConfluentLimitIsLinear) {
  const int n = 5;
  const double var = 1.0;
  std::vector<double> dev;
  for (double eps : {1e-1, 1e-2, 1e-3}) {
    std::vector<double> h;
    for (int i = 0; i < n; ++i) h.push_back(eps * i);
    KernelContext ctx(ExternalField(h), var);
    double d = 0.0;
    for (int i = 0; i <= 12; ++i)
      for (int j = 0; j <= 12; ++j) {
        const double xp = -3.0 + 0.5 * i, xq = -3.0 + 0.5 * j;
        d = std::max(d, std::abs(kernel_closed_form(ctx, xp, xq) - kernel_gue_limit(n, var, xp, xq)));
      }
    dev.push_back(d);
  }
  for (int i = 0; i + 1 < 3; ++i) EXPECT_GE(std::log10(dev[i] / dev[i + 1]), 0.95) << dev[i];
}

TEST(Kernel, GueLimitMatchesHermiteSum) {
  // He_k(x) = 2^(-k/2) H_k(x / sqrt 2)
  const int n = 4;
  const double var = 0.8, s = std::sqrt(var);
  for (double xp : {-1.5, 0.2, 1.1})
    for (double xq : {-0.7, 0.9}) {
      double sum = 0.0;
      double fact = 1.0;
      for (int k = 0; k < n; ++k) {
        if (k > 0) fact *= k;
        sum += std::pow(2.0, -k) * std::hermite(k, xp / s / std::sqrt(2.0)) *
               std::hermite(k, xq / s / std::sqrt(2.0)) / fact;
      }
      EXPECT_NEAR(kernel_gue_limit(n, var, xp, xq), gauss(xp, var) * sum, 1e-14);
    }
}

TEST(Kernel, DegenerateFieldRejected) {
  KernelContext ctx(ExternalField({0.5, 0.5, 1.0}), 1.0);
  EXPECT_FALSE(ctx.distinct());
  EXPECT_THROW(kernel_closed_form(ctx, 0.0, 0.0), DegenerateFieldError);
  EXPECT_THROW(KernelContext(ExternalField({0.0}), 0.0), DomainError);
}
