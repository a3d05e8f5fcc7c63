#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_set>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "hashrec/content.hpp"
#include "hashrec/corpus.hpp"
#include "hashrec/folkrank.hpp"
#include "hashrec/ranking.hpp"
#include "hashrec/recommend.hpp"

namespace hashrec {

inline constexpr std::size_t kCutoff = 10;

struct MetricSet {
  std::array<double, kCutoff> precision_at{};  // index k-1 holds P@k
  std::array<double, kCutoff> recall_at{};
  double f1_at_5 = 0;
  double mrr_at_10 = 0;
  double map_at_10 = 0;
  double ndcg_at_10 = 0;
};

/// Ranking quality of one prediction against the hashtags actually used.
/// MAP@10 is normalized by min(|relevant|, 10); nDCG uses binary gains with
/// a log2(i + 1) discount.
inline MetricSet metrics_for(const RankedList& predicted, std::span<const HashtagId> relevant) {
  if (relevant.empty()) throw std::invalid_argument("relevant set must not be empty");
  std::unordered_set<HashtagId> rel(relevant.begin(), relevant.end());
  std::unordered_set<HashtagId> seen;
  for (const auto& p : predicted)
    if (!seen.insert(p.hashtag).second) throw std::invalid_argument("predicted list has duplicates");

  MetricSet m;
  const auto n_rel = static_cast<double>(rel.size());
  std::size_t hits = 0;
  double dcg = 0, ap = 0;
  for (std::size_t i = 0; i < kCutoff; ++i) {
    bool hit = i < predicted.size() && rel.contains(predicted[i].hashtag);
    const auto rank = static_cast<double>(i + 1);
    if (hit) {
      ++hits;
      if (m.mrr_at_10 == 0) m.mrr_at_10 = 1.0 / rank;
      ap += static_cast<double>(hits) / rank;
      dcg += 1.0 / std::log2(rank + 1.0);
    }
    m.precision_at[i] = static_cast<double>(hits) / rank;
    m.recall_at[i] = static_cast<double>(hits) / n_rel;
  }
  const std::size_t ideal_hits = std::min(rel.size(), kCutoff);
  double idcg = 0;
  for (std::size_t i = 0; i < ideal_hits; ++i) idcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
  m.map_at_10 = ap / static_cast<double>(ideal_hits);
  m.ndcg_at_10 = dcg / idcg;
  const double p5 = m.precision_at[4], r5 = m.recall_at[4];
  m.f1_at_5 = (p5 + r5) > 0 ? 2.0 * p5 * r5 / (p5 + r5) : 0.0;
  return m;
}

/// Mean of each metric, summed in entry order.
inline MetricSet mean_metrics(std::span<const MetricSet> entries) {
  MetricSet avg;
  if (entries.empty()) return avg;
  for (const MetricSet& m : entries) {
    for (std::size_t k = 0; k < kCutoff; ++k) {
      avg.precision_at[k] += m.precision_at[k];
      avg.recall_at[k] += m.recall_at[k];
    }
    avg.f1_at_5 += m.f1_at_5;
    avg.mrr_at_10 += m.mrr_at_10;
    avg.map_at_10 += m.map_at_10;
    avg.ndcg_at_10 += m.ndcg_at_10;
  }
  const auto n = static_cast<double>(entries.size());
  for (std::size_t k = 0; k < kCutoff; ++k) {
    avg.precision_at[k] /= n;
    avg.recall_at[k] /= n;
  }
  avg.f1_at_5 /= n;
  avg.mrr_at_10 /= n;
  avg.map_at_10 /= n;
  avg.ndcg_at_10 /= n;
  return avg;
}

enum class Metric { F1At5, MrrAt10, MapAt10, NdcgAt10 };
inline constexpr std::array<Metric, 4> kSummaryMetrics = {Metric::F1At5, Metric::MrrAt10, Metric::MapAt10,
                                                          Metric::NdcgAt10};

inline std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::F1At5: return "f1_at_5";
    case Metric::MrrAt10: return "mrr_at_10";
    case Metric::MapAt10: return "map_at_10";
    case Metric::NdcgAt10: return "ndcg_at_10";
  }
  return "unknown";
}

inline double metric_value(const MetricSet& m, Metric which) {
  switch (which) {
    case Metric::F1At5: return m.f1_at_5;
    case Metric::MrrAt10: return m.mrr_at_10;
    case Metric::MapAt10: return m.map_at_10;
    case Metric::NdcgAt10: return m.ndcg_at_10;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Paired t-test

struct TTestResult {
  double t = 0;
  double p = 1;
  bool degenerate = false;  // zero variance of the differences with a non-zero mean
};

/// Two-sided paired t-test of a against b with n - 1 degrees of freedom.
inline TTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("paired samples differ in length");
  if (a.size() < 2) throw std::invalid_argument("paired t-test needs at least 2 pairs");
  const auto n = static_cast<double>(a.size());
  double mean = 0;
  for (std::size_t i = 0; i < a.size(); ++i) mean += a[i] - b[i];
  mean /= n;
  double ss = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i] - mean;
    ss += d * d;
  }
  const double sd = std::sqrt(ss / (n - 1.0));
  // Differences that agree to rounding error count as constant.
  if (sd <= 1e-15 * std::max(1.0, std::abs(mean))) {
    if (std::abs(mean) <= 1e-15) return {0.0, 1.0, false};
    return {std::copysign(std::numeric_limits<double>::infinity(), mean), 0.0, true};
  }
  TTestResult r;
  r.t = mean / (sd / std::sqrt(n));
  boost::math::students_t dist(n - 1.0);
  r.p = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.t))));
  return r;
}

// ---------------------------------------------------------------------------
// Experiments

enum class Algorithm { BllI, BllS, BllIS, BllISC, MpI, MrI, MpS, MrS, Mp, Cf, FolkRank, Sr };

inline constexpr std::array<Algorithm, 12> kAllAlgorithms = {
    Algorithm::MpI, Algorithm::MrI, Algorithm::BllI, Algorithm::MpS,      Algorithm::MrS, Algorithm::BllS,
    Algorithm::Mp,  Algorithm::FolkRank, Algorithm::Cf, Algorithm::BllIS, Algorithm::Sr,  Algorithm::BllISC};

inline std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::BllI: return "bll_i";
    case Algorithm::BllS: return "bll_s";
    case Algorithm::BllIS: return "bll_is";
    case Algorithm::BllISC: return "bll_isc";
    case Algorithm::MpI: return "mp_i";
    case Algorithm::MrI: return "mr_i";
    case Algorithm::MpS: return "mp_s";
    case Algorithm::MrS: return "mr_s";
    case Algorithm::Mp: return "mp";
    case Algorithm::Cf: return "cf";
    case Algorithm::FolkRank: return "folkrank";
    case Algorithm::Sr: return "sr";
  }
  return "unknown";
}

inline Algorithm parse_algorithm(std::string_view name) {
  for (Algorithm a : kAllAlgorithms)
    if (to_string(a) == name) return a;
  throw std::invalid_argument("unknown algorithm '" + std::string(name) + "'");
}

inline bool needs_text(Algorithm a) { return a == Algorithm::Sr || a == Algorithm::BllISC; }

/// Algorithms usable without tweet text, in reporting order.
inline std::vector<Algorithm> scenario1_algorithms() {
  std::vector<Algorithm> out;
  for (Algorithm a : kAllAlgorithms)
    if (!needs_text(a)) out.push_back(a);
  return out;
}

/// Dispatches one recommendation. `index` is required for text algorithms.
inline RankedList recommend(Algorithm algo, const Corpus& train, UserId u, Timestamp ts_ref,
                            std::string_view text, const ContentIndex* index, const RecommenderConfig& cfg) {
  if (needs_text(algo) && !index)
    throw std::invalid_argument(std::string(to_string(algo)) + " needs a content index");
  switch (algo) {
    case Algorithm::BllI: return bll_i(train, u, ts_ref, cfg);
    case Algorithm::BllS: return bll_s(train, u, ts_ref, cfg);
    case Algorithm::BllIS: return bll_is(train, u, ts_ref, cfg);
    case Algorithm::BllISC: return bll_isc(train, u, text, ts_ref, *index, cfg);
    case Algorithm::MpI: return mp_individual(train, u, ts_ref, cfg);
    case Algorithm::MrI: return mr_individual(train, u, ts_ref, cfg);
    case Algorithm::MpS: return mp_social(train, u, ts_ref, cfg);
    case Algorithm::MrS: return mr_social(train, u, ts_ref, cfg);
    case Algorithm::Mp: return mp_global(train, ts_ref, cfg);
    case Algorithm::Cf: return cf_user_based(train, u, ts_ref, cfg);
    case Algorithm::FolkRank: return folkrank(train, u, ts_ref, cfg);
    case Algorithm::Sr: return similarity_rank(text, *index, cfg);
  }
  return {};
}

struct ExperimentReport {
  Scenario scenario = Scenario::WithoutText;
  RecommenderConfig config;
  CorpusStats corpus_stats;
  CorpusStats train_stats;
  std::vector<Algorithm> algorithms;
  std::vector<TestEntry> entries;
  std::vector<std::vector<MetricSet>> per_entry;  // [algorithm][entry]
  std::vector<MetricSet> mean;                    // [algorithm]

  [[nodiscard]] std::size_t slot(Algorithm a) const {
    auto it = std::find(algorithms.begin(), algorithms.end(), a);
    if (it == algorithms.end()) throw std::out_of_range("algorithm not in report");
    return static_cast<std::size_t>(it - algorithms.begin());
  }
  [[nodiscard]] const MetricSet& mean_of(Algorithm a) const { return mean[slot(a)]; }
  [[nodiscard]] std::vector<double> series(Algorithm a, Metric m) const {
    std::vector<double> out;
    for (const MetricSet& e : per_entry[slot(a)]) out.push_back(metric_value(e, m));
    return out;
  }
};

namespace detail {

/// Runs fn(i) for i in [0, n) across worker threads; each index is handled
/// exactly once and results are written by index, so output order does not
/// depend on scheduling.
template <typename F>
void parallel_for(std::size_t n, std::size_t threads, F&& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (std::size_t t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < n; i += threads) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  pool.clear();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace detail

/// Leave-one-out evaluation: every algorithm scores every test entry with the
/// entry's timestamp as reference time; the entry's hashtags are the relevant
/// set. In the text scenario the query is the held-out text with its hashtag
/// tokens removed, and the content index covers the train split only.
inline ExperimentReport run_experiment(const Corpus& corpus, Scenario scenario,
                                       const std::vector<Algorithm>& algorithms, const RecommenderConfig& cfg,
                                       std::size_t threads = std::thread::hardware_concurrency()) {
  cfg.validate();
  if (algorithms.empty()) throw std::invalid_argument("no algorithms requested");
  for (Algorithm a : algorithms)
    if (scenario == Scenario::WithoutText && needs_text(a))
      throw std::invalid_argument(std::string(to_string(a)) + " needs tweet text; use scenario 2");

  Split split = leave_one_out_split(corpus, scenario);
  std::optional<ContentIndex> index;
  if (scenario == Scenario::WithText) index = ContentIndex::build(split.train, cfg.min_tf, cfg.min_df);

  ExperimentReport report;
  report.scenario = scenario;
  report.config = cfg;
  report.corpus_stats = corpus.stats();
  report.train_stats = split.train.stats();
  report.algorithms = algorithms;
  report.per_entry.assign(algorithms.size(), std::vector<MetricSet>(split.test.size()));

  detail::parallel_for(split.test.size(), threads, [&](std::size_t i) {
    const TestEntry& entry = split.test[i];
    const std::string query = strip_hashtag_tokens(entry.tweet.text);
    for (std::size_t a = 0; a < algorithms.size(); ++a) {
      RankedList list = recommend(algorithms[a], split.train, entry.user, entry.tweet.timestamp, query,
                                  index ? &*index : nullptr, cfg);
      report.per_entry[a][i] = metrics_for(list, entry.tweet.hashtags);
    }
  });
  for (const auto& entries : report.per_entry) report.mean.push_back(mean_metrics(entries));
  report.entries = std::move(split.test);
  return report;
}

}  // namespace hashrec
