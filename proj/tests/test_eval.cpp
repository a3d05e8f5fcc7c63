#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "fixture.hpp"
#include "hashrec/eval.hpp"
#include "hashrec/random.hpp"
#include "hashrec/synthetic.hpp"

using namespace hashrec;
using namespace hashrec::testing;

namespace {

RankedList ranked(std::initializer_list<std::uint32_t> ids) {
  RankedList out;
  double s = 1.0;
  for (auto id : ids) out.push_back({HashtagId(id), s /= 2});
  return out;
}

std::vector<HashtagId> tags(std::initializer_list<std::uint32_t> ids) {
  std::vector<HashtagId> out;
  for (auto id : ids) out.push_back(HashtagId(id));
  return out;
}

/// Student t density integrated with composite Simpson's rule; two-sided
/// tail probability P(|T| > t).
double t_two_sided_oracle(double t, double df) {
  auto density = [df](double x) {
    double c = std::exp(std::lgamma((df + 1) / 2) - std::lgamma(df / 2)) / std::sqrt(df * std::numbers::pi);
    return c * std::pow(1 + x * x / df, -(df + 1) / 2);
  };
  const double a = 0, b = std::abs(t);
  const int n = 200000;
  const double h = (b - a) / n;
  double s = density(a) + density(b);
  for (int i = 1; i < n; ++i) s += density(a + i * h) * (i % 2 ? 4 : 2);
  double central = s * h / 3;  // P(0 < T < |t|)
  return 1 - 2 * central;
}

Corpus eval_corpus(std::uint64_t seed) {
  GeneratorParams p;
  p.users = 40;
  p.events = 2500;
  p.followee_degree = 6;
  p.max_hashtags_per_tweet = 2;
  p.retweet_probability = 0.1;
  p.seed = seed;
  return generate_synthetic(p);
}

}  // namespace

TEST(Metrics, WorkedExamples) {
  MetricSet m = metrics_for(ranked({1}), tags({1}));
  EXPECT_EQ(m.precision_at[0], 1.0);
  EXPECT_EQ(m.mrr_at_10, 1.0);
  EXPECT_EQ(m.ndcg_at_10, 1.0);

  m = metrics_for(ranked({9, 1, 7}), tags({1}));
  EXPECT_EQ(m.mrr_at_10, 0.5);

  m = metrics_for(ranked({1, 9, 2}), tags({1, 2}));
  EXPECT_NEAR(m.map_at_10, (1.0 + 2.0 / 3.0) / 2.0, 1e-15);
  EXPECT_NEAR(m.precision_at[4], 0.4, 1e-15);
  EXPECT_NEAR(m.recall_at[4], 1.0, 1e-15);
  EXPECT_NEAR(m.f1_at_5, 2 * 0.4 / 1.4, 1e-15);
}

TEST(Metrics, EmptyListsAndErrors) {
  MetricSet m = metrics_for({}, tags({1}));
  EXPECT_EQ(m.f1_at_5, 0.0);
  EXPECT_EQ(m.mrr_at_10, 0.0);
  EXPECT_EQ(m.map_at_10, 0.0);
  EXPECT_EQ(m.ndcg_at_10, 0.0);
  EXPECT_THROW(metrics_for(ranked({1}), {}), std::invalid_argument);
  EXPECT_THROW(metrics_for(ranked({1, 1}), tags({1})), std::invalid_argument);
}

TEST(Metrics, PerfectRankingScoresOne) {
  for (std::uint32_t n = 1; n <= 14; ++n) {
    RankedList list;
    std::vector<HashtagId> rel;
    for (std::uint32_t i = 0; i < n; ++i) {
      list.push_back({HashtagId(i), 1.0});
      rel.push_back(HashtagId(i));
    }
    for (std::uint32_t pad = 100; pad < 105; ++pad) list.push_back({HashtagId(pad), 0.0});
    MetricSet m = metrics_for(list, rel);
    EXPECT_EQ(m.mrr_at_10, 1.0);
    EXPECT_EQ(m.map_at_10, 1.0);
    EXPECT_EQ(m.ndcg_at_10, 1.0);
  }
}

TEST(Metrics, RandomInvariants) {
  Rng r(2);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<std::uint32_t> pool(30);
    for (std::uint32_t i = 0; i < 30; ++i) pool[i] = i;
    RankedList list;
    std::size_t len = r.below(15);
    for (std::size_t i = 0; i < len; ++i) {
      std::size_t j = i + r.below(30 - i);
      std::swap(pool[i], pool[j]);
      list.push_back({HashtagId(pool[i]), 0});
    }
    std::vector<HashtagId> rel;
    for (std::uint32_t i = 0; i < 30; ++i)
      if (r.uniform() < 0.15) rel.push_back(HashtagId(i));
    if (rel.empty()) rel.push_back(HashtagId(0));
    MetricSet m = metrics_for(list, rel);
    for (std::size_t k = 1; k < kCutoff; ++k) {
      EXPECT_GE(m.recall_at[k], m.recall_at[k - 1]);
      EXPECT_GE(m.precision_at[k] * double(k + 1), m.precision_at[k - 1] * double(k) - 1e-12);
    }
    for (double v : {m.mrr_at_10, m.map_at_10, m.ndcg_at_10, m.f1_at_5}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(TTest, IdenticalAndDegenerate) {
  std::vector<double> a = {0.1, 0.5, 0.3, 0.9};
  TTestResult same = paired_t_test(a, a);
  EXPECT_EQ(same.t, 0.0);
  EXPECT_EQ(same.p, 1.0);
  EXPECT_FALSE(same.degenerate);

  std::vector<double> x(30), y(30);
  for (int i = 0; i < 30; ++i) {
    x[i] = 0.01 * i;
    y[i] = x[i] + 0.1;
  }
  TTestResult shift = paired_t_test(x, y);
  EXPECT_TRUE(shift.degenerate);
  EXPECT_EQ(shift.p, 0.0);
  EXPECT_LT(shift.t, 0);

  EXPECT_THROW(paired_t_test(std::vector<double>{1.0}, std::vector<double>{2.0}), std::invalid_argument);
  EXPECT_THROW(paired_t_test(a, std::vector<double>{1.0, 2.0}), std::invalid_argument);
}

TEST(TTest, MatchesNumericalIntegration) {
  Rng r(31);
  for (int trial = 0; trial < 5; ++trial) {
    std::size_t n = 10 + 15 * static_cast<std::size_t>(trial);
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = r.uniform();
      b[i] = a[i] + 0.05 + 0.3 * (r.uniform() - 0.5);
    }
    TTestResult res = paired_t_test(a, b);
    // Independent t statistic.
    double mean = 0, ss = 0;
    for (std::size_t i = 0; i < n; ++i) mean += (a[i] - b[i]) / double(n);
    for (std::size_t i = 0; i < n; ++i) ss += (a[i] - b[i] - mean) * (a[i] - b[i] - mean);
    double t = mean / std::sqrt(ss / double(n - 1) / double(n));
    EXPECT_NEAR(res.t, t, 1e-10);
    EXPECT_NEAR(res.p, t_two_sided_oracle(t, double(n - 1)), 1e-6);
  }
}

TEST(Experiment, SingleEntryAveragesEqualEntry) {
  CorpusBuilder b;
  b.seed("u").follow("u", "f");
  b.tweet("f", 0, "#x").tweet("u", 1, "#b").tweet("u", 2, "#a").tweet("u", 3, "#a #x");
  Corpus c = b.build();
  RecommenderConfig cfg;
  ExperimentReport r = run_experiment(c, Scenario::WithoutText, scenario1_algorithms(), cfg, 1);
  ASSERT_EQ(r.entries.size(), 1u);
  for (std::size_t a = 0; a < r.algorithms.size(); ++a) {
    EXPECT_EQ(r.mean[a].f1_at_5, r.per_entry[a][0].f1_at_5);
    EXPECT_EQ(r.mean[a].ndcg_at_10, r.per_entry[a][0].ndcg_at_10);
    EXPECT_EQ(r.mean[a].precision_at, r.per_entry[a][0].precision_at);
  }
  // bll_i recommends a, b; the relevant set is {a, x}.
  EXPECT_EQ(r.mean_of(Algorithm::BllI).precision_at[0], 1.0);
  EXPECT_EQ(r.mean_of(Algorithm::BllS).recall_at[0], 0.5);
}

TEST(Experiment, ScenarioOneRejectsTextAlgorithms) {
  Corpus c = eval_corpus(1);
  RecommenderConfig cfg;
  EXPECT_THROW(run_experiment(c, Scenario::WithoutText, {Algorithm::Sr}, cfg), std::invalid_argument);
  EXPECT_THROW(run_experiment(c, Scenario::WithoutText, {Algorithm::BllI, Algorithm::BllISC}, cfg),
               std::invalid_argument);
}

TEST(Experiment, AveragesAndDeterminism) {
  Corpus c = eval_corpus(2);
  RecommenderConfig cfg;
  auto algos = std::vector<Algorithm>(kAllAlgorithms.begin(), kAllAlgorithms.end());
  ExperimentReport one = run_experiment(c, Scenario::WithText, algos, cfg, 1);
  ExperimentReport many = run_experiment(c, Scenario::WithText, algos, cfg, 4);
  ASSERT_GT(one.entries.size(), 10u);
  for (const auto& e : one.entries) EXPECT_FALSE(e.tweet.is_retweet);
  for (std::size_t a = 0; a < algos.size(); ++a) {
    double sum = 0;
    for (const auto& m : one.per_entry[a]) sum += m.mrr_at_10;
    EXPECT_NEAR(one.mean[a].mrr_at_10, sum / double(one.entries.size()), 1e-12);
    EXPECT_EQ(one.mean[a].f1_at_5, many.mean[a].f1_at_5);
    EXPECT_EQ(one.mean[a].map_at_10, many.mean[a].map_at_10);
    EXPECT_EQ(one.mean[a].recall_at, many.mean[a].recall_at);
  }
}

TEST(Experiment, ScenarioOneHasAllNonContentAlgorithms) {
  Corpus c = eval_corpus(3);
  RecommenderConfig cfg;
  ExperimentReport r = run_experiment(c, Scenario::WithoutText, scenario1_algorithms(), cfg);
  EXPECT_EQ(r.mean.size(), 10u);
  for (Algorithm a : r.algorithms) EXPECT_FALSE(needs_text(a));
}

TEST(Experiment, BllBeatsGlobalPopularityOnRecencySkewedData) {
  GeneratorParams p;
  p.users = 150;
  p.events = 15000;
  p.generate_text = false;
  Corpus c = generate_synthetic(p);
  RecommenderConfig cfg;
  ExperimentReport r = run_experiment(c, Scenario::WithoutText, {Algorithm::Mp, Algorithm::BllIS}, cfg);
  EXPECT_GT(r.mean_of(Algorithm::BllIS).f1_at_5, r.mean_of(Algorithm::Mp).f1_at_5);
}

TEST(Algorithms, NamesRoundTrip) {
  for (Algorithm a : kAllAlgorithms) EXPECT_EQ(parse_algorithm(to_string(a)), a);
  EXPECT_THROW(parse_algorithm("tci"), std::invalid_argument);
}
