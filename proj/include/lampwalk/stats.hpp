#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "lampwalk/errors.hpp"
#include "lampwalk/rng.hpp"
#include "lampwalk/walk.hpp"

namespace lampwalk::stats {

// Compensated running sum (Neumaier). Exact for sums of moderate integers,
// and merge(a, b) of disjoint partitions matches a single serial pass over
// the same values in the same order within one compensation term.
struct DoubleDouble {
  double hi = 0, lo = 0;

  void add(double x) {
    const double s = hi + x;
    if (std::abs(hi) >= std::abs(x))
      lo += (hi - s) + x;
    else
      lo += (x - s) + hi;
    hi = s;
  }

  void add(const DoubleDouble& o) {
    add(o.hi);
    lo += o.lo;
  }

  double value() const { return hi + lo; }
};

// Power sums up to order 2 * pmax with compensated accumulation; mergeable.
class MomentAccumulator {
 public:
  explicit MomentAccumulator(int pmax = 2) : pmax_(pmax) {
    if (pmax < 1 || pmax > 4) throw ConfigError("moment order cap must be in 1..4");
    sums_.resize(2 * static_cast<std::size_t>(pmax));
  }

  void add(double x) {
    ++n_;
    double pw = 1;
    for (auto& s : sums_) {
      pw *= x;
      s.add(pw);
    }
  }

  void merge(const MomentAccumulator& o) {
    if (o.pmax_ != pmax_) throw ConfigError("cannot merge accumulators of different order");
    n_ += o.n_;
    for (std::size_t i = 0; i < sums_.size(); ++i) sums_[i].add(o.sums_[i]);
  }

  std::int64_t count() const { return n_; }
  int order_cap() const { return 2 * pmax_; }

  double raw_moment(int k) const {
    if (k < 1 || k > order_cap()) throw ConfigError("raw moment order out of range");
    if (n_ == 0) throw ConfigError("moment of an empty sample");
    return sums_[static_cast<std::size_t>(k) - 1].value() / static_cast<double>(n_);
  }

  double mean() const { return raw_moment(1); }

  // Central moment via the binomial expansion of the raw moments.
  double central_moment(int k) const {
    if (k < 2 || k > order_cap()) throw ConfigError("central moment order out of range");
    const double mu = mean();
    double acc = std::pow(-mu, k);  // j = 0 term
    double binom = 1;
    for (int j = 1; j <= k; ++j) {
      binom = binom * static_cast<double>(k - j + 1) / static_cast<double>(j);
      acc += binom * raw_moment(j) * std::pow(-mu, k - j);
    }
    return acc;
  }

  double variance() const {
    if (n_ < 2) throw ConfigError("variance needs at least two values");
    return central_moment(2) * static_cast<double>(n_) / static_cast<double>(n_ - 1);
  }

  double skewness() const {
    const double m2 = central_moment(2);
    if (m2 <= 0) throw ConfigError("skewness of a degenerate sample");
    return central_moment(3) / std::pow(m2, 1.5);
  }

  double excess_kurtosis() const {
    const double m2 = central_moment(2);
    if (m2 <= 0) throw ConfigError("kurtosis of a degenerate sample");
    return central_moment(4) / (m2 * m2) - 3.0;
  }

 private:
  int pmax_;
  std::int64_t n_ = 0;
  std::vector<DoubleDouble> sums_;
};

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// P(K <= x) for the Kolmogorov distribution, by its alternating series.
inline double kolmogorov_cdf(double x) {
  if (x <= 0) return 0;
  double sum = 0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-16) break;
  }
  return std::clamp(1.0 - 2.0 * sum, 0.0, 1.0);
}

struct KsResult {
  double stat = 0;  // sup-norm distance between the empirical and normal cdf
  double p = 0;     // finite-n corrected tail probability
};

// One-sample KS against the standard normal with fully specified parameters,
// p-value via the (sqrt(n) + 0.12 + 0.11 / sqrt(n)) small-sample correction.
inline KsResult ks_test_standard_normal(std::vector<double> z) {
  if (z.size() < 8) throw ConfigError("ks test needs at least 8 values");
  std::sort(z.begin(), z.end());
  const double n = static_cast<double>(z.size());
  double d = 0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double f = normal_cdf(z[i]);
    d = std::max(d, (static_cast<double>(i) + 1.0) / n - f);
    d = std::max(d, f - static_cast<double>(i) / n);
  }
  const double k = d * (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n));
  return {d, std::clamp(1.0 - kolmogorov_cdf(k), 0.0, 1.0)};
}

// Anderson-Darling statistic against the standard normal (statistic only).
inline double ad_stat_standard_normal(std::vector<double> z) {
  if (z.size() < 8) throw ConfigError("ad statistic needs at least 8 values");
  std::sort(z.begin(), z.end());
  const double n = static_cast<double>(z.size());
  double acc = 0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double lo = std::clamp(normal_cdf(z[i]), 1e-300, 1.0 - 1e-16);
    const double hi = std::clamp(normal_cdf(z[z.size() - 1 - i]), 1e-300, 1.0 - 1e-16);
    acc += (2.0 * static_cast<double>(i) + 1.0) * (std::log(lo) + std::log1p(-hi));
  }
  return -n - acc / n;
}

struct NormalityReport {
  std::int64_t n = 0;
  double mean = 0, variance = 0, skewness = 0, excess_kurtosis = 0;
  double ks_stat = 0, ks_p = 0, ad_stat = 0;
  bool ks_reject_1pct = false;
};

// Shape summary plus KS/AD against the standard normal for already
// standardized values.
inline NormalityReport normality_test(const std::vector<double>& z) {
  NormalityReport rep;
  rep.n = static_cast<std::int64_t>(z.size());
  MomentAccumulator acc(2);
  for (const double v : z) acc.add(v);
  rep.mean = acc.mean();
  rep.variance = acc.variance();
  rep.skewness = acc.skewness();
  rep.excess_kurtosis = acc.excess_kurtosis();
  const auto ks = ks_test_standard_normal(z);
  rep.ks_stat = ks.stat;
  rep.ks_p = ks.p;
  rep.ad_stat = ad_stat_standard_normal(z);
  rep.ks_reject_1pct = ks.p < 0.01;
  return rep;
}

struct HorizonStat {
  std::int64_t horizon = 0;
  std::int64_t count = 0;
  double mean = 0;
  double normalized = 0;  // mean / horizon
};

struct DriftEstimate {
  double speed = 0;  // normalized mean at the largest horizon
  double se = 0;     // standard error of that normalized mean
  double max_gap = 0;  // worst |normalized - speed| across the other horizons
  std::vector<HorizonStat> horizons;
};

// Escape speed from per-horizon samples of a subadditive length functional.
inline DriftEstimate estimate_drift(
    const std::vector<std::pair<std::int64_t, std::vector<std::int64_t>>>& by_horizon) {
  if (by_horizon.empty()) throw ConfigError("drift estimate needs at least one horizon");
  DriftEstimate est;
  for (const auto& [n, values] : by_horizon) {
    if (n < 1) throw ConfigError("drift horizons must be positive");
    if (values.size() < 2) throw ConfigError("drift estimate needs at least two samples per horizon");
    MomentAccumulator acc(1);
    DoubleDouble sq;
    for (const auto v : values) {
      acc.add(static_cast<double>(v));
      sq.add(static_cast<double>(v) * static_cast<double>(v));
    }
    const double mean = acc.mean();
    est.horizons.push_back({n, acc.count(), mean, mean / static_cast<double>(n)});
  }
  std::sort(est.horizons.begin(), est.horizons.end(),
            [](const HorizonStat& a, const HorizonStat& b) { return a.horizon < b.horizon; });
  const auto& top = est.horizons.back();
  est.speed = top.normalized;
  {
    const auto& [n, values] = *std::max_element(
        by_horizon.begin(), by_horizon.end(),
        [](const auto& a, const auto& b) { return a.first < b.first; });
    MomentAccumulator acc(2);
    for (const auto v : values) acc.add(static_cast<double>(v));
    est.se = std::sqrt(acc.variance() / static_cast<double>(values.size())) /
             static_cast<double>(n);
  }
  for (const auto& h : est.horizons)
    if (h.horizon != top.horizon) est.max_gap = std::max(est.max_gap, std::abs(h.normalized - est.speed));
  return est;
}

struct SigmaEstimate {
  double sigma = 0;  // sqrt(var(values) / horizon)
  bool degenerate = false;
};

inline SigmaEstimate estimate_sigma(std::int64_t horizon, const std::vector<std::int64_t>& values) {
  if (horizon < 1) throw ConfigError("sigma horizon must be positive");
  if (values.size() < 2) throw ConfigError("sigma estimate needs at least two samples");
  MomentAccumulator acc(2);
  for (const auto v : values) acc.add(static_cast<double>(v));
  const double var = acc.variance();
  if (var <= 0) return {0, true};
  return {std::sqrt(var / static_cast<double>(horizon)), false};
}

struct LineFit {
  double slope = 0, intercept = 0;
  double max_residual = 0;  // worst |fit - observed| in the fitted coordinates
};

// Least squares on (log x, log y); inputs must be positive.
inline LineFit fit_loglog(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw ConfigError("log-log fit needs at least two matched points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(xs.size());
  std::vector<double> lx(xs.size()), ly(ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0) || !(ys[i] > 0)) throw ConfigError("log-log fit needs positive data");
    lx[i] = std::log(xs[i]);
    ly[i] = std::log(ys[i]);
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-12) throw ConfigError("log-log fit abscissas are degenerate");
  LineFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  for (std::size_t i = 0; i < xs.size(); ++i)
    fit.max_residual = std::max(fit.max_residual,
                                std::abs(fit.intercept + fit.slope * lx[i] - ly[i]));
  return fit;
}

// Least squares through the origin: the best c with y ~ c * x.
inline double fit_through_origin(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.empty())
    throw ConfigError("through-origin fit needs matched nonempty data");
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += xs[i] * ys[i];
    sxx += xs[i] * xs[i];
  }
  if (sxx <= 0) throw ConfigError("through-origin fit abscissas are all zero");
  return sxy / sxx;
}

// Linear-interpolation quantile of an unsorted sample, q in [0, 1].
inline double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw ConfigError("quantile of an empty sample");
  if (!(q >= 0) || !(q <= 1)) throw ConfigError("quantile level must be in [0, 1]");
  std::sort(v.begin(), v.end());
  const double idx = q * static_cast<double>(v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(idx);
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = idx - static_cast<double>(lo);
  return v[lo] * (1 - frac) + v[hi] * frac;
}

inline double median_int(const std::vector<std::int64_t>& v) {
  std::vector<double> d(v.begin(), v.end());
  return quantile(std::move(d), 0.5);
}

struct DefectMomentRow {
  std::int64_t m = 0, n = 0;
  std::int64_t count = 0;
  std::vector<double> moments;  // E[defect^p] for each requested order
};

// Per-cell moments of the defect. Values are sorted before accumulation, so
// the result is invariant under any reordering of the records.
inline std::vector<DefectMomentRow> defect_moment_table(
    const std::vector<walk::DefectRecord>& records, const std::vector<int>& orders) {
  if (orders.empty()) throw ConfigError("moment table needs at least one order");
  for (const int p : orders)
    if (p < 1 || p > 8) throw ConfigError("moment orders must be in 1..8");
  std::map<std::pair<std::int64_t, std::int64_t>, std::vector<std::int64_t>> cells;
  for (const auto& r : records) cells[{r.m, r.n}].push_back(r.defect);
  std::vector<DefectMomentRow> rows;
  rows.reserve(cells.size());
  for (auto& [key, values] : cells) {
    std::sort(values.begin(), values.end());
    DefectMomentRow row;
    row.m = key.first;
    row.n = key.second;
    row.count = static_cast<std::int64_t>(values.size());
    for (const int p : orders) {
      DoubleDouble acc;
      for (const auto v : values) acc.add(std::pow(static_cast<double>(v), p));
      row.moments.push_back(acc.value() / static_cast<double>(values.size()));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

struct GrowthFit {
  int order = 0;            // moment order p
  double exponent = 0;      // log-log slope of the p-th moment against the gap n
  double intercept = 0;     // log-log intercept, for per-row residuals
  double coeff = 0;         // through-origin coefficient against log(m + n)^{2p}
  double max_residual = 0;  // worst |log fit - log moment|
};

// Growth of the defect moments across a table of (m, n) cells: power-law
// exponent in the gap, and the best constant in front of log(m + n)^{2p}.
inline std::vector<GrowthFit> fit_defect_growth(const std::vector<DefectMomentRow>& rows,
                                                const std::vector<int>& orders) {
  if (rows.size() < 2) throw ConfigError("growth fit needs at least two moment rows");
  std::vector<GrowthFit> fits;
  for (std::size_t pi = 0; pi < orders.size(); ++pi) {
    const int p = orders[pi];
    std::vector<double> ns, moments, logpows;
    for (const auto& row : rows) {
      if (pi >= row.moments.size()) throw ConfigError("moment row is missing a requested order");
      if (!(row.moments[pi] > 0)) continue;  // empty-defect cells carry no growth signal
      ns.push_back(static_cast<double>(row.n));
      moments.push_back(row.moments[pi]);
      logpows.push_back(std::pow(std::log(static_cast<double>(row.m + row.n)), 2 * p));
    }
    if (ns.size() < 2) throw ConfigError("growth fit needs at least two positive moments");
    const LineFit line = fit_loglog(ns, moments);
    GrowthFit fit;
    fit.order = p;
    fit.exponent = line.slope;
    fit.intercept = line.intercept;
    fit.max_residual = line.max_residual;
    fit.coeff = fit_through_origin(logpows, moments);
    fits.push_back(fit);
  }
  return fits;
}

// Standard normal draw; consumes exactly two uniforms.
inline double normal_sample(PhiloxRng& rng) {
  const double u1 = 1.0 - rng.next_unit();  // in (0, 1]
  const double u2 = rng.next_unit();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace lampwalk::stats
