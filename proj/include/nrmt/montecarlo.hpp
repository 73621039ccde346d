#pragma once

// Empirical validation: eigenvalue histograms, moment and angular-constant
// estimates, and comparison of histograms against analytic curves. Work is
// split into fixed batches, each with its own RNG stream keyed by the batch
// index; batch results are merged in index order, so the output is
// bit-identical for any number of worker threads.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "nrmt/correlations.hpp"
#include "nrmt/densities.hpp"
#include "nrmt/eigen.hpp"
#include "nrmt/errors.hpp"
#include "nrmt/matrix.hpp"
#include "nrmt/quad.hpp"
#include "nrmt/rng.hpp"
#include "nrmt/sampling.hpp"

namespace nrmt {

/// Worker count from NRMT_THREADS, else 1.
inline int default_thread_count() {
  if (const char* env = std::getenv("NRMT_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1 && v <= 256) return static_cast<int>(v);
  }
  return 1;
}

struct McOptions {
  std::uint64_t seed = 1;
  std::size_t batch_size = 1000;
  int threads = 0;  // 0: default_thread_count()
};

/// Runs fill(acc, rng, count) for every batch and returns the per-batch
/// accumulators in batch order.
template <class Acc, class Fill>
std::vector<Acc> run_batches(std::size_t n_samples, const McOptions& opt, const Acc& init, Fill&& fill) {
  if (opt.batch_size == 0) throw DomainError("batch size must be positive");
  const std::size_t n_batches = (n_samples + opt.batch_size - 1) / opt.batch_size;
  std::vector<Acc> out(n_batches, init);
  const int threads = std::max(1, std::min<int>(opt.threads > 0 ? opt.threads : default_thread_count(),
                                                static_cast<int>(std::max<std::size_t>(n_batches, 1))));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t b = next.fetch_add(1);
      if (b >= n_batches) return;
      try {
        Rng rng = make_stream(opt.seed, b);
        const std::size_t count = std::min(opt.batch_size, n_samples - b * opt.batch_size);
        fill(out[b], rng, count);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(n_batches);
        return;
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

/// H0 + alpha H with H drawn from a norm-dependent density.
struct EnsembleSpec {
  NormDensity density;
  double alpha = 1.0;
  ExternalField field;  // empty: H0 = 0

  EnsembleSpec(NormDensity d, double a = 1.0, ExternalField f = {})
      : density(std::move(d)), alpha(a), field(std::move(f)) {
    if (field.size() == 0) field = ExternalField::zero(density.n());
    if (field.size() != static_cast<std::size_t>(density.n())) {
      throw DomainError("external field length does not match N");
    }
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw DomainError("alpha must be finite and >= 0");
  }
};

/// Eigenvalue histogram normalized per matrix. Standard errors come from
/// the variance of the per-matrix bin counts, which accounts for level
/// repulsion (the counts are not Poisson).
struct Histogram {
  std::vector<double> edges;
  std::vector<std::uint64_t> counts;
  std::vector<std::uint64_t> count_squares;  // sum over matrices of (count in bin)^2
  std::uint64_t underflow = 0;
  std::uint64_t overflow = 0;
  std::uint64_t n_samples = 0;
  int levels = 0;
  bool degenerate = false;  // alpha = 0: the spectrum is the field itself

  static Histogram uniform(double lo, double hi, std::size_t bins) {
    if (!(hi > lo) || bins == 0) throw DomainError("histogram needs lo < hi and at least one bin");
    Histogram h;
    for (std::size_t i = 0; i <= bins; ++i)
      h.edges.push_back(i == bins ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins));
    h.counts.assign(bins, 0);
    h.count_squares.assign(bins, 0);
    return h;
  }

  std::size_t bins() const { return counts.size(); }
  double width(std::size_t i) const { return edges[i + 1] - edges[i]; }
  double center(std::size_t i) const { return 0.5 * (edges[i] + edges[i + 1]); }

  double density(std::size_t i) const {
    return static_cast<double>(counts[i]) / (static_cast<double>(n_samples) * width(i));
  }

  double std_error(std::size_t i) const {
    if (n_samples < 2) return std::numeric_limits<double>::infinity();
    const double n = static_cast<double>(n_samples);
    const double mean = static_cast<double>(counts[i]) / n;
    const double var = std::max(0.0, (static_cast<double>(count_squares[i]) / n - mean * mean) * n / (n - 1.0));
    return std::sqrt(var / n) / width(i);
  }

  /// Levels per matrix, counting those outside the range; equals N.
  double total_mass() const {
    std::uint64_t s = underflow + overflow;
    for (auto c : counts) s += c;
    return static_cast<double>(s) / static_cast<double>(n_samples);
  }

  void add_matrix(const std::vector<double>& eigs) {
    std::vector<std::size_t> idx;
    for (double x : eigs) {
      if (x < edges.front()) {
        ++underflow;
      } else if (x >= edges.back()) {
        ++overflow;
      } else {
        std::size_t i = static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), x) - edges.begin()) - 1;
        idx.push_back(std::min(i, bins() - 1));
      }
    }
    std::sort(idx.begin(), idx.end());
    for (std::size_t a = 0; a < idx.size();) {
      std::size_t b = a;
      while (b < idx.size() && idx[b] == idx[a]) ++b;
      const std::uint64_t c = b - a;
      counts[idx[a]] += c;
      count_squares[idx[a]] += c * c;
      a = b;
    }
    ++n_samples;
  }

  void merge(const Histogram& o) {
    for (std::size_t i = 0; i < bins(); ++i) {
      counts[i] += o.counts[i];
      count_squares[i] += o.count_squares[i];
    }
    underflow += o.underflow;
    overflow += o.overflow;
    n_samples += o.n_samples;
  }
};

inline RandomMatrix sample_spec(const EnsembleSpec& spec, const RadialSampler& radial, Rng& rng) {
  RandomMatrix h = sample_norm_dependent(radial, spec.density.symmetry(), spec.density.n(), rng);
  h.scale(spec.alpha);
  h.add_field(spec.field);
  return h;
}

/// Histogram of all eigenvalues of H0 + alpha H over n_samples draws.
inline Histogram empirical_density(const EnsembleSpec& spec, std::size_t n_samples, const Histogram& layout,
                                   const McOptions& opt = {}) {
  if (n_samples == 0) throw DomainError("need at least one sample");
  Histogram empty = layout;
  std::fill(empty.counts.begin(), empty.counts.end(), 0);
  std::fill(empty.count_squares.begin(), empty.count_squares.end(), 0);
  empty.underflow = empty.overflow = empty.n_samples = 0;
  empty.levels = spec.density.n();
  empty.degenerate = spec.alpha == 0.0;
  const RadialSampler radial(spec.density);
  auto parts = run_batches(n_samples, opt, empty, [&](Histogram& acc, Rng& rng, std::size_t count) {
    for (std::size_t s = 0; s < count; ++s) acc.add_matrix(eigenvalues(sample_spec(spec, radial, rng)));
  });
  Histogram total = empty;
  for (const auto& p : parts) total.merge(p);
  return total;
}

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
};

struct BatchSum {
  double sum = 0.0;
  std::size_t count = 0;
};

/// Delete-one-batch jackknife of the overall mean.
inline Estimate jackknife_mean(const std::vector<BatchSum>& batches) {
  double total = 0.0;
  std::size_t n = 0;
  for (const auto& b : batches) {
    total += b.sum;
    n += b.count;
  }
  Estimate e;
  e.mean = total / static_cast<double>(n);
  const std::size_t nb = batches.size();
  if (nb < 2) {
    e.std_error = std::numeric_limits<double>::infinity();
    return e;
  }
  std::vector<double> loo(nb);
  double loo_mean = 0.0;
  for (std::size_t i = 0; i < nb; ++i) {
    loo[i] = (total - batches[i].sum) / static_cast<double>(n - batches[i].count);
    loo_mean += loo[i];
  }
  loo_mean /= static_cast<double>(nb);
  double ss = 0.0;
  for (double v : loo) ss += (v - loo_mean) * (v - loo_mean);
  e.std_error = std::sqrt(ss * static_cast<double>(nb - 1) / static_cast<double>(nb));
  return e;
}

/// Sample mean of (Tr H^2)^nu, Tr H^2 computed from the sampled matrix.
inline Estimate empirical_moment(const NormDensity& density, int nu, std::size_t n_samples,
                                 const McOptions& opt = {}) {
  if (nu < 0) throw DomainError("moment order must be nonnegative");
  if (n_samples == 0) throw DomainError("need at least one sample");
  const RadialSampler radial(density);
  auto parts = run_batches(n_samples, opt, BatchSum{}, [&](BatchSum& acc, Rng& rng, std::size_t count) {
    for (std::size_t s = 0; s < count; ++s) {
      const RandomMatrix h = sample_norm_dependent(radial, density.symmetry(), density.n(), rng);
      acc.sum += std::pow(trace_norm_sq(h), nu);
    }
    acc.count = count;
  });
  return jackknife_mean(parts);
}

/// Both moments nu = 1, 2 from one set of draws.
inline std::pair<Estimate, Estimate> empirical_moments_12(const NormDensity& density, std::size_t n_samples,
                                                          const McOptions& opt = {}) {
  const RadialSampler radial(density);
  struct Acc {
    BatchSum m1, m2;
  };
  auto parts = run_batches(n_samples, opt, Acc{}, [&](Acc& acc, Rng& rng, std::size_t count) {
    for (std::size_t s = 0; s < count; ++s) {
      const double u = trace_norm_sq(sample_norm_dependent(radial, density.symmetry(), density.n(), rng));
      acc.m1.sum += u;
      acc.m2.sum += u * u;
    }
    acc.m1.count = acc.m2.count = count;
  });
  std::vector<BatchSum> a, b;
  for (const auto& p : parts) {
    a.push_back(p.m1);
    b.push_back(p.m2);
  }
  return {jackknife_mean(a), jackknife_mean(b)};
}

/// Surface area of the unit sphere times the mean of |Delta_N(e)|^beta over
/// uniform unit vectors e in R^N.
inline Estimate empirical_angular_constant(SymmetryClass cls, int n, std::size_t n_samples,
                                           const McOptions& opt = {}) {
  if (n < 2) throw DomainError("angular constant needs N >= 2");
  const double beta = cls.beta();
  const double area = 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n);
  auto parts = run_batches(n_samples, opt, BatchSum{}, [&](BatchSum& acc, Rng& rng, std::size_t count) {
    std::normal_distribution<double> gauss;
    std::vector<double> e(n);
    for (std::size_t s = 0; s < count; ++s) {
      double r2 = 0.0;
      for (double& x : e) {
        x = gauss(rng);
        r2 += x * x;
      }
      const double inv = 1.0 / std::sqrt(r2);
      double vd = 1.0;
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) vd *= std::abs(e[i] - e[j]) * inv;
      acc.sum += std::pow(vd, beta);
    }
    acc.count = count;
  });
  Estimate est = jackknife_mean(parts);
  est.mean *= area;
  est.std_error *= area;
  return est;
}

struct DensityComparison {
  double chi2_per_dof = 0.0;
  double sup_sigma = 0.0;          // max |observed - expected| / se
  std::size_t dof = 0;
  std::size_t empty_bins = 0;      // excluded from both statistics
  std::vector<double> expected;    // bin average of the analytic curve
  std::vector<double> studentized;
};

/// Compares a histogram with an analytic level density. `extra_se`, when
/// given, is a per-bin uncertainty of the analytic side (Monte Carlo
/// oracles) added in quadrature.
inline QuadratureSpec bin_quadrature() {
  QuadratureSpec spec;
  spec.rel_tol = 1e-9;
  spec.abs_tol = 1e-14;
  return spec;
}

inline DensityComparison compare_density(const Histogram& hist, const std::function<double(double)>& analytic,
                                         const std::function<double(std::size_t)>& extra_se = {},
                                         const QuadratureSpec& spec = bin_quadrature()) {
  if (hist.degenerate) {
    throw DomainError("alpha = 0: the spectrum is a set of point masses at the field entries; "
                      "compare bin masses against the field instead");
  }
  DensityComparison out;
  double chi2 = 0.0;
  for (std::size_t i = 0; i < hist.bins(); ++i) {
    const double expected = integrate_finite(analytic, hist.edges[i], hist.edges[i + 1], spec).value / hist.width(i);
    out.expected.push_back(expected);
    if (hist.counts[i] == 0) {
      ++out.empty_bins;
      out.studentized.push_back(0.0);
      continue;
    }
    double se = hist.std_error(i);
    if (extra_se) se = std::hypot(se, extra_se(i));
    const double z = (hist.density(i) - expected) / se;
    out.studentized.push_back(z);
    chi2 += z * z;
    out.sup_sigma = std::max(out.sup_sigma, std::abs(z));
    ++out.dof;
  }
  out.chi2_per_dof = out.dof > 0 ? chi2 / static_cast<double>(out.dof) : 0.0;
  return out;
}

/// k = 1 Gaussian-ensemble oracle read off a histogram of H0 = 0 samples:
/// linear interpolation between bin centres, zero outside the range. With
/// `standard_error` set it interpolates the per-bin standard errors instead.
inline GaussianOracle histogram_oracle(std::shared_ptr<const Histogram> hist, bool standard_error = false) {
  auto values = std::make_shared<std::vector<double>>();
  for (std::size_t i = 0; i < hist->bins(); ++i)
    values->push_back(standard_error ? hist->std_error(i) : hist->density(i));
  return [hist, values](std::span<const double> y, const ExternalField& field) {
    if (y.size() != 1) throw UnsupportedError("histogram oracle supports k = 1 only");
    for (std::size_t i = 0; i < field.size(); ++i)
      if (field[i] != 0.0) throw UnsupportedError("histogram oracle needs H0 = 0");
    const double x = y[0];
    const auto& e = hist->edges;
    if (x < e.front() || x >= e.back()) return 0.0;
    const std::size_t nb = hist->bins();
    if (x <= hist->center(0)) return (*values)[0];
    if (x >= hist->center(nb - 1)) return (*values)[nb - 1];
    std::size_t i = static_cast<std::size_t>(std::upper_bound(e.begin(), e.end(), x) - e.begin()) - 1;
    if (x < hist->center(i)) --i;
    const double t = (x - hist->center(i)) / (hist->center(i + 1) - hist->center(i));
    return (1.0 - t) * (*values)[i] + t * (*values)[i + 1];
  };
}

}  // namespace nrmt
