// hashrec: corpus ingestion, temporal analysis, hashtag recommendation and
// offline evaluation.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hashrec/commands.hpp"

namespace {

using namespace hashrec;

struct CorpusSource {
  std::string data_dir;
  std::string config;

  void attach(CLI::App* cmd) {
    auto* d = cmd->add_option("--data", data_dir, "corpus directory (follows.tsv, tweets.tsv, seeds.txt)");
    auto* c = cmd->add_option("--config", config, "run config (JSON)");
    d->excludes(c);
  }

  RunConfig resolve() const {
    RunConfig rc;
    if (!config.empty()) rc = load_run_config(config);
    if (!data_dir.empty()) {
      rc.data = CorpusPaths::in_directory(data_dir);
      rc.generator.reset();
    }
    if (!rc.data && !rc.generator) throw ConfigError("give --data or --config");
    return rc;
  }
};

std::optional<std::filesystem::path> flag_path(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return std::filesystem::path(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hashrec: time-aware hashtag recommendation toolkit"};
  app.require_subcommand(1);
  app.footer("Outputs go to --out, else $HASHREC_OUTPUT_DIR, else the config's output_dir.");

  // ingest
  auto* ingest_cmd = app.add_subcommand("ingest", "parse a crawled corpus and write stats.json");
  std::string follows, tweets, seeds, out;
  ingest_cmd->add_option("--follows", follows, "follows.tsv (follower<TAB>followee)")->required();
  ingest_cmd->add_option("--tweets", tweets, "tweets.tsv (id, user, timestamp, retweet, text)")->required();
  ingest_cmd->add_option("--seeds", seeds, "seed users, one per line");
  ingest_cmd->add_option("--out", out, "run directory");

  // generate
  auto* gen_cmd = app.add_subcommand("generate", "write a synthetic corpus");
  std::string gen_config;
  std::optional<std::uint64_t> gen_seed;
  gen_cmd->add_option("--config", gen_config, "run config with a 'generator' section")->required();
  gen_cmd->add_option("--seed", gen_seed, "override the config seed");
  gen_cmd->add_option("--out", out, "run directory");

  // analyze
  auto* analyze_cmd = app.add_subcommand("analyze", "recency series, power-law fits and likelihood ratios");
  CorpusSource analyze_src;
  analyze_src.attach(analyze_cmd);
  std::optional<double> cap;
  analyze_cmd->add_option("--cap-hours", cap, "recency cap in hours (default 8760)");
  analyze_cmd->add_option("--out", out, "run directory");

  // recommend
  auto* rec_cmd = app.add_subcommand("recommend", "top hashtags for one user, printed as JSON");
  CorpusSource rec_src;
  rec_src.attach(rec_cmd);
  std::string user, algo = "bll_is", text, index_path;
  std::optional<Timestamp> at;
  rec_cmd->add_option("--user", user, "user name")->required();
  rec_cmd->add_option("--algo", algo, "algorithm")->capture_default_str();
  rec_cmd->add_option("--text", text, "tweet text for content-aware algorithms");
  rec_cmd->add_option("--at", at, "reference time (unix seconds); default after the last tweet");
  rec_cmd->add_option("--index", index_path, "content index saved by 'index build'");

  // index
  auto* index_cmd = app.add_subcommand("index", "TF-IDF content index");
  index_cmd->require_subcommand(1);
  auto* index_build = index_cmd->add_subcommand("build", "build and save index.json");
  CorpusSource index_src;
  index_src.attach(index_build);
  index_build->add_option("--out", out, "run directory");
  auto* index_stats_cmd = index_cmd->add_subcommand("stats", "print statistics of a saved index");
  CorpusSource stats_src;
  stats_src.attach(index_stats_cmd);
  index_stats_cmd->add_option("--index", index_path, "index.json")->required();

  // evaluate
  auto* eval_cmd = app.add_subcommand("evaluate", "leave-one-out evaluation");
  std::string eval_config;
  eval_cmd->add_option("--config", eval_config, "run config (JSON)")->required();
  eval_cmd->add_option("--out", out, "run directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest_cmd) {
      RunDirectory run(resolve_output_dir(flag_path(out), "runs/ingest"));
      cmd_ingest({follows, tweets, seeds}, run, std::cerr);
      std::cout << run.root().string() << '\n';
    } else if (*gen_cmd) {
      RunConfig rc = load_run_config(gen_config);
      if (!rc.generator) throw ConfigError("config has no 'generator' section");
      if (gen_seed) rc.generator->seed = *gen_seed;
      RunDirectory run(resolve_output_dir(flag_path(out), rc.output_dir));
      cmd_generate(*rc.generator, run);
      std::cout << run.root().string() << '\n';
    } else if (*analyze_cmd) {
      RunConfig rc = analyze_src.resolve();
      RunDirectory run(resolve_output_dir(flag_path(out), rc.output_dir));
      Corpus corpus = load_corpus(rc, std::cerr);
      Json report = cmd_analyze(corpus, cap.value_or(rc.recency_cap_hours), run);
      std::cout << report.dump(2) << '\n';
    } else if (*rec_cmd) {
      RunConfig rc = rec_src.resolve();
      Corpus corpus = load_corpus(rc, std::cerr);
      std::optional<ContentIndex> index;
      if (!index_path.empty()) index = ContentIndex::load(index_path, corpus.vocabulary());
      Json result = cmd_recommend(corpus, user, parse_algorithm(algo), text, at, index ? &*index : nullptr,
                                  rc.recommender);
      std::cout << result.dump() << '\n';
    } else if (*index_build) {
      RunConfig rc = index_src.resolve();
      RunDirectory run(resolve_output_dir(flag_path(out), rc.output_dir));
      cmd_index_build(load_corpus(rc, std::cerr), rc.recommender, run);
      std::cout << (run.root() / "index.json").string() << '\n';
    } else if (*index_stats_cmd) {
      RunConfig rc = stats_src.resolve();
      Corpus corpus = load_corpus(rc, std::cerr);
      std::cout << index_stats(ContentIndex::load(index_path, corpus.vocabulary())).dump(2) << '\n';
    } else if (*eval_cmd) {
      RunConfig rc = load_run_config(eval_config);
      RunDirectory run(resolve_output_dir(flag_path(out), rc.output_dir));
      ExperimentReport report = cmd_evaluate(rc, run, std::cerr);
      std::cerr << report.entries.size() << " test entries\n";
      for (std::size_t i = 0; i < report.algorithms.size(); ++i)
        std::cerr << "  " << to_string(report.algorithms[i]) << "  F1@5=" << report.mean[i].f1_at_5
                  << "  MRR@10=" << report.mean[i].mrr_at_10 << "  nDCG@10=" << report.mean[i].ndcg_at_10 << '\n';
      std::cout << run.root().string() << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
