#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hashrec/corpus.hpp"

namespace hashrec {

inline constexpr double kDefaultRecencyCapHours = 8760.0;  // one year

enum class ReuseKind { Individual, Social };

struct RecencySeries {
  ReuseKind kind = ReuseKind::Individual;
  std::vector<double> samples;  // hours, each in (0, cap_hours]
  double cap_hours = kDefaultRecencyCapHours;
};

namespace detail {

/// Walks every hashtag's events in time order. `on_event(event_index,
/// last_use)` sees only strictly earlier uses; `last_use[user]` is the
/// latest such timestamp, or 0 if none.
template <typename F>
void sweep_hashtags(const Corpus& corpus, F&& on_event) {
  auto events = corpus.events();
  std::vector<Timestamp> last_use(corpus.user_count(), 0);
  std::vector<UserId> touched;
  for (std::size_t h = 0; h < corpus.vocabulary().hashtags.size(); ++h) {
    auto list = corpus.events_of_hashtag(HashtagId(static_cast<std::uint32_t>(h)));
    std::size_t i = 0;
    while (i < list.size()) {
      std::size_t j = i;
      const Timestamp ts = events[list[i]].timestamp;
      while (j < list.size() && events[list[j]].timestamp == ts) ++j;
      for (std::size_t k = i; k < j; ++k) on_event(list[k], last_use);
      for (std::size_t k = i; k < j; ++k) {
        UserId u = events[list[k]].user;
        if (last_use[u.value] == 0) touched.push_back(u);
        last_use[u.value] = ts;
      }
      i = j;
    }
    for (UserId u : touched) last_use[u.value] = 0;
    touched.clear();
  }
}

}  // namespace detail

/// Time since the user's own latest earlier use of the same hashtag, one
/// sample per qualifying assignment.
inline RecencySeries individual_recency_series(const Corpus& corpus,
                                               double cap_hours = kDefaultRecencyCapHours) {
  RecencySeries series{ReuseKind::Individual, {}, cap_hours};
  auto events = corpus.events();
  detail::sweep_hashtags(corpus, [&](std::uint32_t e, const std::vector<Timestamp>& last) {
    const UsageEvent& ev = events[e];
    Timestamp prior = last[ev.user.value];
    if (prior == 0) return;
    double hours = static_cast<double>(ev.timestamp - prior) / kSecondsPerHour;
    if (hours <= cap_hours) series.samples.push_back(hours);
  });
  return series;
}

/// Time since the latest earlier use of the same hashtag by any followee.
inline RecencySeries social_recency_series(const Corpus& corpus,
                                           double cap_hours = kDefaultRecencyCapHours) {
  RecencySeries series{ReuseKind::Social, {}, cap_hours};
  auto events = corpus.events();
  detail::sweep_hashtags(corpus, [&](std::uint32_t e, const std::vector<Timestamp>& last) {
    const UsageEvent& ev = events[e];
    Timestamp prior = 0;
    for (UserId f : corpus.followees(ev.user)) prior = std::max(prior, last[f.value]);
    if (prior == 0) return;
    double hours = static_cast<double>(ev.timestamp - prior) / kSecondsPerHour;
    if (hours <= cap_hours) series.samples.push_back(hours);
  });
  return series;
}

struct Bin {
  std::int64_t hours = 0;
  std::int64_t count = 0;
  friend bool operator==(const Bin&, const Bin&) = default;
};

/// One-hour bins; a sample x lands in bin ceil(x), so bins run 1..cap.
inline std::vector<Bin> bin_hourly(std::span<const double> samples) {
  std::vector<std::int64_t> keys;
  keys.reserve(samples.size());
  for (double x : samples) keys.push_back(std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(x))));
  std::sort(keys.begin(), keys.end());
  std::vector<Bin> bins;
  for (std::int64_t k : keys) {
    if (bins.empty() || bins.back().hours != k)
      bins.push_back({k, 1});
    else
      ++bins.back().count;
  }
  return bins;
}

enum class AxisScale { LogLog, LogLinear };

/// Coefficient of determination of an OLS line through (bin, count) after
/// taking logs: both axes for LogLog, counts only for LogLinear.
inline double fit_linear_r2(std::span<const Bin> bins, AxisScale scale) {
  if (bins.size() < 3) throw std::invalid_argument("linear fit needs at least 3 non-empty bins");
  const auto n = static_cast<double>(bins.size());
  std::vector<double> xs, ys;
  for (const Bin& b : bins) {
    double x = static_cast<double>(b.hours);
    xs.push_back(scale == AxisScale::LogLog ? std::log(x) : x);
    ys.push_back(std::log(static_cast<double>(b.count)));
  }
  double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (syy == 0) return 1.0;  // flat counts are fitted exactly by a flat line
  if (sxx == 0) return 0.0;
  double r2 = (sxy * sxy) / (sxx * syy);
  return std::clamp(r2, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Power-law fitting

struct PowerLawFit {
  double x_min = 0;
  double alpha = 0;
  std::size_t tail_size = 0;
  double ks_distance = 0;
  bool low_confidence = false;  // fewer than 50 samples overall
};

inline constexpr std::size_t kLowConfidenceSamples = 50;

namespace detail {

/// KS distance between the empirical CDF of sorted `tail` and the fitted
/// power-law CDF. Tied values are treated as one jump.
inline double power_law_ks(std::span<const double> tail, double x_min, double alpha) {
  const auto n = static_cast<double>(tail.size());
  double d = 0;
  std::size_t i = 0;
  while (i < tail.size()) {
    std::size_t j = i;
    while (j < tail.size() && tail[j] == tail[i]) ++j;
    double model = 1.0 - std::pow(tail[i] / x_min, 1.0 - alpha);
    double below = static_cast<double>(i) / n;
    double upto = static_cast<double>(j) / n;
    d = std::max({d, std::abs(model - below), std::abs(upto - model)});
    i = j;
  }
  return d;
}

}  // namespace detail

/// Continuous MLE of the exponent for a fixed lower cutoff. `sorted` must be
/// ascending; only samples >= x_min are used.
inline PowerLawFit fit_power_law_fixed(std::span<const double> sorted, double x_min) {
  if (!(x_min > 0)) throw std::invalid_argument("x_min must be positive");
  auto first = std::lower_bound(sorted.begin(), sorted.end(), x_min);
  auto tail = sorted.subspan(static_cast<std::size_t>(first - sorted.begin()));
  double log_sum = 0;
  for (double x : tail) log_sum += std::log(x / x_min);
  if (tail.size() < 2 || log_sum <= 0)
    throw std::invalid_argument("power-law tail is degenerate at this x_min");
  PowerLawFit fit;
  fit.x_min = x_min;
  fit.tail_size = tail.size();
  fit.alpha = 1.0 + static_cast<double>(tail.size()) / log_sum;
  fit.ks_distance = detail::power_law_ks(tail, x_min, fit.alpha);
  fit.low_confidence = sorted.size() < kLowConfidenceSamples;
  return fit;
}

/// Chooses x_min among (at most `max_candidates`, quantile-thinned) distinct
/// sample values by minimum KS distance and returns the MLE exponent above it.
inline PowerLawFit fit_power_law(std::span<const double> samples, std::size_t max_candidates = 500) {
  if (samples.size() < 2) throw std::invalid_argument("power-law fit needs at least 2 samples");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  if (!(sorted.front() > 0)) throw std::invalid_argument("power-law samples must be positive");
  if (sorted.front() == sorted.back()) throw std::invalid_argument("all samples identical");

  // Candidate cutoffs: start index of each distinct value except the largest
  // (its tail would be a single repeated value).
  std::vector<std::size_t> starts;
  for (std::size_t i = 0; i < sorted.size(); ++i)
    if (i == 0 || sorted[i] != sorted[i - 1]) starts.push_back(i);
  starts.pop_back();
  if (max_candidates > 0 && starts.size() > max_candidates) {
    std::vector<std::size_t> thinned;
    for (std::size_t k = 0; k < max_candidates; ++k) {
      std::size_t idx = k * (starts.size() - 1) / (max_candidates - 1);
      if (thinned.empty() || thinned.back() != starts[idx]) thinned.push_back(starts[idx]);
    }
    starts = std::move(thinned);
  }

  // suffix[i] = sum of log(sorted[j]) for j >= i
  std::vector<double> suffix(sorted.size() + 1, 0.0);
  for (std::size_t i = sorted.size(); i-- > 0;) suffix[i] = suffix[i + 1] + std::log(sorted[i]);

  PowerLawFit best;
  best.ks_distance = std::numeric_limits<double>::infinity();
  std::span<const double> all(sorted);
  for (std::size_t start : starts) {
    const double x_min = sorted[start];
    const std::size_t n = sorted.size() - start;
    const double log_sum = suffix[start] - static_cast<double>(n) * std::log(x_min);
    if (n < 2 || !(log_sum > 0)) continue;
    const double alpha = 1.0 + static_cast<double>(n) / log_sum;
    const double d = detail::power_law_ks(all.subspan(start), x_min, alpha);
    if (d < best.ks_distance) best = {x_min, alpha, n, d, false};
  }
  if (!std::isfinite(best.ks_distance)) throw std::invalid_argument("no usable x_min candidate");
  best.low_confidence = samples.size() < kLowConfidenceSamples;
  return best;
}

struct LikelihoodRatio {
  double R = 0;                // sum of log(p_power / p_exp) over the tail; > 0 favours power law
  double normalized = 0;       // R / (sqrt(n) * sigma)
  double p_value = 1;          // two-sided, standard normal
  double exponential_rate = 0; // MLE rate of the shifted exponential
  std::size_t tail_size = 0;
};

/// Vuong-style comparison of the fitted power law against an exponential
/// fitted by MLE to the same tail (x >= x_min).
inline LikelihoodRatio loglik_ratio_power_vs_exp(std::span<const double> samples, const PowerLawFit& fit) {
  std::vector<double> tail;
  for (double x : samples)
    if (x >= fit.x_min) tail.push_back(x);
  if (tail.size() < 2) throw std::invalid_argument("likelihood ratio needs at least 2 tail samples");
  const auto n = static_cast<double>(tail.size());
  double mean = std::accumulate(tail.begin(), tail.end(), 0.0) / n;
  if (!(mean > fit.x_min)) throw std::invalid_argument("exponential fit is degenerate");
  const double rate = 1.0 / (mean - fit.x_min);

  std::vector<double> ratios;
  ratios.reserve(tail.size());
  const double log_norm_power = std::log((fit.alpha - 1.0) / fit.x_min);
  for (double x : tail) {
    double ln_power = log_norm_power - fit.alpha * std::log(x / fit.x_min);
    double ln_exp = std::log(rate) - rate * (x - fit.x_min);
    ratios.push_back(ln_power - ln_exp);
  }
  LikelihoodRatio out;
  out.tail_size = tail.size();
  out.exponential_rate = rate;
  out.R = std::accumulate(ratios.begin(), ratios.end(), 0.0);
  const double mu = out.R / n;
  double var = 0;
  for (double r : ratios) var += (r - mu) * (r - mu);
  var /= n;
  if (var <= 0) {
    out.normalized = out.R == 0 ? 0 : std::copysign(std::numeric_limits<double>::infinity(), out.R);
    out.p_value = out.R == 0 ? 1.0 : 0.0;
    return out;
  }
  out.normalized = out.R / std::sqrt(n * var);
  out.p_value = std::erfc(std::abs(out.R) / std::sqrt(2.0 * n * var));
  return out;
}

struct FitReport {
  ReuseKind kind = ReuseKind::Individual;
  std::size_t samples = 0;
  double r2_loglog = 0;
  double r2_loglinear = 0;
  PowerLawFit power;
  LikelihoodRatio ratio;
};

/// Full analysis of one series: R^2 of both linear fits, power-law fit and
/// the likelihood-ratio test.
inline FitReport analyze_series(const RecencySeries& series) {
  FitReport report;
  report.kind = series.kind;
  report.samples = series.samples.size();
  auto bins = bin_hourly(series.samples);
  report.r2_loglog = fit_linear_r2(bins, AxisScale::LogLog);
  report.r2_loglinear = fit_linear_r2(bins, AxisScale::LogLinear);
  report.power = fit_power_law(series.samples);
  report.ratio = loglik_ratio_power_vs_exp(series.samples, report.power);
  return report;
}

inline std::string_view to_string(ReuseKind k) {
  return k == ReuseKind::Individual ? "individual" : "social";
}

}  // namespace hashrec
