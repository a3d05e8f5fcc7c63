#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hashrec/config.hpp"
#include "hashrec/content.hpp"
#include "hashrec/eval.hpp"
#include "hashrec/io.hpp"
#include "hashrec/synthetic.hpp"
#include "hashrec/temporal.hpp"

namespace hashrec {

/// Collects the files of one command invocation under a single directory and
/// finishes with manifest.json. Each file is written to a temporary name and
/// renamed, so a partially written output never carries its final name.
class RunDirectory {
 public:
  explicit RunDirectory(std::filesystem::path root) : root_(std::move(root)) {
    std::filesystem::create_directories(root_);
  }

  [[nodiscard]] const std::filesystem::path& root() const { return root_; }

  void write(const std::string& name, const std::string& content) {
    const auto target = root_ / name;
    std::filesystem::create_directories(target.parent_path());
    const auto tmp = target.string() + ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary);
      if (!out) throw std::runtime_error("cannot write " + tmp);
      out << content;
      out.flush();
      if (!out) throw std::runtime_error("write failed: " + tmp);
    }
    std::filesystem::rename(tmp, target);
    files_[name] = {content.size(), fnv1a(content)};
  }

  void write_json(const std::string& name, const Json& j) { write(name, j.dump(2) + "\n"); }

  /// Records files written by other means (e.g. a corpus directory).
  void adopt(const std::string& name) {
    std::ifstream in(root_ / name, std::ios::binary);
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    files_[name] = {content.size(), fnv1a(content)};
  }

  void finish(const std::string& command, const Json& config) {
    Json outputs = Json::array();
    for (const auto& [name, info] : files_) {
      std::ostringstream hash;
      hash << std::hex << std::setw(16) << std::setfill('0') << info.second;
      outputs.push_back({{"file", name}, {"bytes", info.first}, {"fnv1a64", hash.str()}});
    }
    Json manifest{{"tool", "hashrec"}, {"command", command}, {"config", config}, {"outputs", outputs}};
    write_json("manifest.json", manifest);
  }

 private:
  static std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) h = (h ^ c) * 0x100000001b3ULL;
    return h;
  }

  std::filesystem::path root_;
  std::map<std::string, std::pair<std::size_t, std::uint64_t>> files_;
};

inline Corpus load_corpus(const RunConfig& rc, std::ostream& log) {
  if (rc.generator) return generate_synthetic(*rc.generator);
  IngestResult r = ingest(*rc.data);
  for (const auto& w : r.warnings) log << "warning: " << w << '\n';
  return std::move(r.corpus);
}

inline void write_corpus_into(RunDirectory& run, const Corpus& corpus) {
  write_corpus(corpus, run.root() / "corpus");
  for (const char* f : {"corpus/follows.tsv", "corpus/tweets.tsv", "corpus/seeds.txt"}) run.adopt(f);
  run.write_json("stats.json", stats_to_json(corpus.stats()));
}

// ---------------------------------------------------------------------------

inline void cmd_ingest(const CorpusPaths& paths, RunDirectory& run, std::ostream& log) {
  IngestResult r = ingest(paths);
  for (const auto& w : r.warnings) log << "warning: " << w << '\n';
  if (r.dropped_untagged) log << "dropped " << r.dropped_untagged << " tweets without hashtags\n";
  write_corpus_into(run, r.corpus);
  Json cfg{{"follows", paths.follows.string()}, {"tweets", paths.tweets.string()}};
  if (!paths.seeds.empty()) cfg["seeds"] = paths.seeds.string();
  run.finish("ingest", cfg);
}

inline void cmd_generate(const GeneratorParams& params, RunDirectory& run) {
  write_corpus_into(run, generate_synthetic(params));
  run.finish("generate", Json{{"generator", to_json(params)}});
}

namespace detail {

inline std::string bins_csv(const RecencySeries& series) {
  std::ostringstream out;
  out << "hours,count\n";
  for (const Bin& b : bin_hourly(series.samples)) out << b.hours << ',' << b.count << '\n';
  return out.str();
}

inline Json fit_to_json(const RecencySeries& series) {
  Json j{{"series", std::string(to_string(series.kind))}, {"samples", series.samples.size()},
         {"cap_hours", series.cap_hours}};
  try {
    FitReport r = analyze_series(series);
    j["r2_loglog"] = r.r2_loglog;
    j["r2_loglinear"] = r.r2_loglinear;
    j["power_law"] = {{"alpha", r.power.alpha},
                      {"x_min", r.power.x_min},
                      {"tail_size", r.power.tail_size},
                      {"ks_distance", r.power.ks_distance},
                      {"low_confidence", r.power.low_confidence}};
    j["loglik_ratio"] = {{"R", r.ratio.R},
                         {"normalized", r.ratio.normalized},
                         {"p", r.ratio.p_value},
                         {"exponential_rate", r.ratio.exponential_rate},
                         {"favors", r.ratio.R > 0 ? "power_law" : "exponential"}};
  } catch (const std::exception& e) {
    j["error"] = e.what();
  }
  return j;
}

}  // namespace detail

inline Json cmd_analyze(const Corpus& corpus, double cap_hours, RunDirectory& run) {
  auto individual = individual_recency_series(corpus, cap_hours);
  auto social = social_recency_series(corpus, cap_hours);
  run.write("recency_individual.csv", detail::bins_csv(individual));
  run.write("recency_social.csv", detail::bins_csv(social));
  Json report{{"corpus", stats_to_json(corpus.stats())},
              {"individual", detail::fit_to_json(individual)},
              {"social", detail::fit_to_json(social)}};
  run.write_json("fit_report.json", report);
  run.finish("analyze", Json{{"recency_cap_hours", cap_hours}});
  return report;
}

/// Top hashtags for one user. `ts_ref` defaults to one second after the last
/// tweet, so the whole history counts.
inline Json cmd_recommend(const Corpus& corpus, const std::string& user, Algorithm algo, const std::string& text,
                          std::optional<Timestamp> ts_ref, const ContentIndex* index, const RecommenderConfig& cfg) {
  cfg.validate();
  const auto& vocab = corpus.vocabulary();
  const UserId* u = vocab.users.find(user);
  if (!u) throw std::invalid_argument("unknown user '" + user + "'");
  const Timestamp at = ts_ref.value_or(corpus.latest_timestamp() + 1);
  std::optional<ContentIndex> built;
  if (needs_text(algo) && !index) {
    built = ContentIndex::build(corpus.filtered([&](const Tweet& t) { return t.timestamp < at; }), cfg.min_tf,
                                cfg.min_df);
    index = &*built;
  }
  RankedList list = recommend(algo, corpus, *u, at, strip_hashtag_tokens(text), index, cfg);
  Json items = Json::array();
  for (const auto& s : list) items.push_back({{"hashtag", vocab.hashtags.name(s.hashtag)}, {"score", s.score}});
  return Json{{"user", user}, {"algo", std::string(to_string(algo))}, {"ts_ref", at}, {"items", items}};
}

inline void cmd_index_build(const Corpus& corpus, const RecommenderConfig& cfg, RunDirectory& run) {
  ContentIndex index = ContentIndex::build(corpus, cfg.min_tf, cfg.min_df);
  run.write("index.json", index.to_json(corpus.vocabulary()).dump() + "\n");
  run.finish("index build", Json{{"min_tf", cfg.min_tf}, {"min_df", cfg.min_df}});
}

inline Json index_stats(const ContentIndex& index) {
  std::size_t postings = 0, usable = 0;
  for (const auto& [term, list] : index.all_postings()) {
    postings += list.size();
    if (index.passes_df(term)) ++usable;
  }
  return Json{{"format_version", ContentIndex::kFormatVersion},
              {"documents", index.total_docs()},
              {"terms", index.term_count()},
              {"terms_passing_min_df", usable},
              {"postings", postings},
              {"min_tf", index.min_tf()},
              {"min_df", index.min_df()}};
}

// ---------------------------------------------------------------------------
// Evaluation report

inline Json metrics_to_json(const MetricSet& m) {
  Json p = Json::array(), r = Json::array();
  for (std::size_t k = 0; k < kCutoff; ++k) {
    p.push_back(m.precision_at[k]);
    r.push_back(m.recall_at[k]);
  }
  return Json{{"precision_at", p},        {"recall_at", r},          {"f1_at_5", m.f1_at_5},
              {"mrr_at_10", m.mrr_at_10}, {"map_at_10", m.map_at_10}, {"ndcg_at_10", m.ndcg_at_10}};
}

struct SignificanceRow {
  Algorithm a, b;
  Metric metric;
  TTestResult test;
};

inline std::vector<SignificanceRow> all_pairs_significance(const ExperimentReport& report) {
  std::vector<SignificanceRow> rows;
  if (report.entries.size() < 2) return rows;
  for (std::size_t i = 0; i < report.algorithms.size(); ++i)
    for (std::size_t j = i + 1; j < report.algorithms.size(); ++j)
      for (Metric m : kSummaryMetrics) {
        Algorithm a = report.algorithms[i], b = report.algorithms[j];
        auto xa = report.series(a, m), xb = report.series(b, m);
        rows.push_back({a, b, m, paired_t_test(xa, xb)});
      }
  return rows;
}

inline Json report_to_json(const ExperimentReport& report, const std::vector<SignificanceRow>& sig,
                           const Json& run_config) {
  Json algos = Json::object();
  for (std::size_t i = 0; i < report.algorithms.size(); ++i)
    algos[std::string(to_string(report.algorithms[i]))] = metrics_to_json(report.mean[i]);

  // Pairs singled out for the headline comparison, when both were run.
  Json highlighted = Json::array();
  auto has = [&](Algorithm a) {
    return std::find(report.algorithms.begin(), report.algorithms.end(), a) != report.algorithms.end();
  };
  for (auto [a, b] : {std::pair{Algorithm::BllIS, Algorithm::Cf}, std::pair{Algorithm::BllISC, Algorithm::Sr}}) {
    if (!has(a) || !has(b)) continue;
    for (const auto& row : sig)
      if ((row.a == a && row.b == b) || (row.a == b && row.b == a))
        highlighted.push_back({{"algo_a", std::string(to_string(row.a))},
                               {"algo_b", std::string(to_string(row.b))},
                               {"metric", std::string(to_string(row.metric))},
                               {"t", row.test.degenerate ? Json(nullptr) : Json(row.test.t)},
                               {"p", row.test.p},
                               {"degenerate", row.test.degenerate}});
  }

  return Json{
      {"scenario", static_cast<int>(report.scenario)},
      {"test_entries", report.entries.size()},
      {"config", run_config},
      {"metadata",
       {{"cutoff", kCutoff},
        {"map_normalization", "min(|relevant|, 10)"},
        {"ndcg", "binary gains, log2(rank + 1) discount"},
        {"empty_list_scores", 0},
        {"activation_time_unit", "hours, floored at 1"},
        {"idf_log", "natural"},
        {"s_max", report.config.s_max},
        {"min_tf", report.config.min_tf},
        {"min_df", report.config.min_df},
        {"query_text", "test tweet text with hashtag tokens removed"},
        {"significance", "paired two-sided t-test over test entries; all pairs in significance.csv"}}},
      {"dataset", {{"corpus", stats_to_json(report.corpus_stats)}, {"train", stats_to_json(report.train_stats)}}},
      {"algorithms", algos},
      {"highlighted_significance", highlighted}};
}

inline std::string pr_curve_csv(const MetricSet& m) {
  std::ostringstream out;
  out << std::setprecision(17) << "k,precision,recall\n";
  for (std::size_t k = 0; k < kCutoff; ++k) out << k + 1 << ',' << m.precision_at[k] << ',' << m.recall_at[k] << '\n';
  return out.str();
}

inline std::string significance_csv(const std::vector<SignificanceRow>& rows) {
  std::ostringstream out;
  out << std::setprecision(17) << "algo_a,algo_b,metric,t,p\n";
  for (const auto& r : rows)
    out << to_string(r.a) << ',' << to_string(r.b) << ',' << to_string(r.metric) << ',' << r.test.t << ','
        << r.test.p << '\n';
  return out.str();
}

inline ExperimentReport cmd_evaluate(const RunConfig& rc, RunDirectory& run, std::ostream& log) {
  Corpus corpus = load_corpus(rc, log);
  const std::size_t threads = rc.threads ? rc.threads : std::max(1u, std::thread::hardware_concurrency());
  ExperimentReport report = run_experiment(corpus, rc.scenario, rc.resolved_algorithms(), rc.recommender, threads);
  auto sig = all_pairs_significance(report);
  const Json cfg = to_json(rc);
  run.write_json("report.json", report_to_json(report, sig, cfg));
  for (std::size_t i = 0; i < report.algorithms.size(); ++i)
    run.write("pr_curve_" + std::string(to_string(report.algorithms[i])) + ".csv", pr_curve_csv(report.mean[i]));
  run.write("significance.csv", significance_csv(sig));
  run.finish("evaluate", cfg);
  return report;
}

}  // namespace hashrec
