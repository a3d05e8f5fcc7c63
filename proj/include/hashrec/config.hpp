#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hashrec/eval.hpp"
#include "hashrec/io.hpp"
#include "hashrec/synthetic.hpp"
#include "hashrec/temporal.hpp"

namespace hashrec {

using Json = nlohmann::ordered_json;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

template <typename T>
void read_field(const nlohmann::json& j, const char* key, T& field) {
  if (!j.contains(key)) return;
  try {
    field = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

inline void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> known, const char* where) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw ConfigError(std::string("unknown key '") + key + "' in " + where);
  }
}

}  // namespace detail

inline RecommenderConfig recommender_from_json(const nlohmann::json& j) {
  detail::reject_unknown(j,
                         {"d_individual", "d_social", "beta", "lambda", "cf_neighbors", "folkrank_d",
                          "folkrank_iters", "k_max", "s_max", "min_tf", "min_df"},
                         "recommender");
  RecommenderConfig c;
  detail::read_field(j, "d_individual", c.d_individual);
  detail::read_field(j, "d_social", c.d_social);
  detail::read_field(j, "beta", c.beta);
  detail::read_field(j, "lambda", c.lambda);
  detail::read_field(j, "cf_neighbors", c.cf_neighbors);
  detail::read_field(j, "folkrank_d", c.folkrank_d);
  detail::read_field(j, "folkrank_iters", c.folkrank_iters);
  detail::read_field(j, "k_max", c.k_max);
  detail::read_field(j, "s_max", c.s_max);
  detail::read_field(j, "min_tf", c.min_tf);
  detail::read_field(j, "min_df", c.min_df);
  c.validate();
  return c;
}

inline Json to_json(const RecommenderConfig& c) {
  return Json{{"d_individual", c.d_individual}, {"d_social", c.d_social},   {"beta", c.beta},
              {"lambda", c.lambda},             {"cf_neighbors", c.cf_neighbors}, {"folkrank_d", c.folkrank_d},
              {"folkrank_iters", c.folkrank_iters}, {"k_max", c.k_max},     {"s_max", c.s_max},
              {"min_tf", c.min_tf},             {"min_df", c.min_df}};
}

inline GeneratorParams generator_from_json(const nlohmann::json& j) {
  detail::reject_unknown(j,
                         {"users", "seed_users", "followee_degree", "events", "max_hashtags_per_tweet", "kernel",
                          "decay", "social_decay", "exponential_scale_hours", "w_individual", "w_social",
                          "w_external", "mean_user_gap_hours", "start", "retweet_probability", "generate_text",
                          "vocabulary_size", "topic_terms", "terms_per_hashtag", "noise_terms", "seed"},
                         "generator");
  GeneratorParams p;
  detail::read_field(j, "users", p.users);
  detail::read_field(j, "seed_users", p.seed_users);
  detail::read_field(j, "followee_degree", p.followee_degree);
  detail::read_field(j, "events", p.events);
  detail::read_field(j, "max_hashtags_per_tweet", p.max_hashtags_per_tweet);
  if (j.contains("kernel")) {
    auto k = j.at("kernel").get<std::string>();
    if (k == "power_law")
      p.kernel = ReuseKernel::PowerLaw;
    else if (k == "exponential")
      p.kernel = ReuseKernel::Exponential;
    else
      throw ConfigError("generator kernel must be 'power_law' or 'exponential'");
  }
  detail::read_field(j, "decay", p.decay);
  detail::read_field(j, "social_decay", p.social_decay);
  detail::read_field(j, "exponential_scale_hours", p.exponential_scale_hours);
  detail::read_field(j, "w_individual", p.w_individual);
  detail::read_field(j, "w_social", p.w_social);
  detail::read_field(j, "w_external", p.w_external);
  detail::read_field(j, "mean_user_gap_hours", p.mean_user_gap_hours);
  detail::read_field(j, "start", p.start);
  detail::read_field(j, "retweet_probability", p.retweet_probability);
  detail::read_field(j, "generate_text", p.generate_text);
  detail::read_field(j, "vocabulary_size", p.vocabulary_size);
  detail::read_field(j, "topic_terms", p.topic_terms);
  detail::read_field(j, "terms_per_hashtag", p.terms_per_hashtag);
  detail::read_field(j, "noise_terms", p.noise_terms);
  detail::read_field(j, "seed", p.seed);
  return p;
}

inline Json to_json(const GeneratorParams& p) {
  return Json{{"users", p.users},
              {"seed_users", p.seed_users},
              {"followee_degree", p.followee_degree},
              {"events", p.events},
              {"max_hashtags_per_tweet", p.max_hashtags_per_tweet},
              {"kernel", p.kernel == ReuseKernel::PowerLaw ? "power_law" : "exponential"},
              {"decay", p.decay},
              {"social_decay", p.social_decay},
              {"exponential_scale_hours", p.exponential_scale_hours},
              {"w_individual", p.w_individual},
              {"w_social", p.w_social},
              {"w_external", p.w_external},
              {"mean_user_gap_hours", p.mean_user_gap_hours},
              {"start", p.start},
              {"retweet_probability", p.retweet_probability},
              {"generate_text", p.generate_text},
              {"vocabulary_size", p.vocabulary_size},
              {"topic_terms", p.topic_terms},
              {"terms_per_hashtag", p.terms_per_hashtag},
              {"noise_terms", p.noise_terms},
              {"seed", p.seed}};
}

/// One experiment: where the corpus comes from, how to score, where to write.
struct RunConfig {
  std::optional<CorpusPaths> data;
  std::optional<GeneratorParams> generator;
  RecommenderConfig recommender;
  Scenario scenario = Scenario::WithoutText;
  std::vector<Algorithm> algorithms;  // empty: every algorithm valid for the scenario
  std::filesystem::path output_dir = "runs/default";
  std::optional<std::uint64_t> seed;
  double recency_cap_hours = kDefaultRecencyCapHours;
  std::size_t threads = 0;  // 0: hardware concurrency

  [[nodiscard]] std::vector<Algorithm> resolved_algorithms() const {
    if (!algorithms.empty()) return algorithms;
    if (scenario == Scenario::WithText) return {kAllAlgorithms.begin(), kAllAlgorithms.end()};
    return scenario1_algorithms();
  }
};

/// Relative dataset paths are resolved against `base`, normally the
/// directory holding the config file.
inline RunConfig run_config_from_json(const nlohmann::json& j, const std::filesystem::path& base = {}) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  detail::reject_unknown(j,
                         {"data", "generator", "recommender", "scenario", "algorithms", "output_dir", "seed",
                          "recency_cap_hours", "threads"},
                         "config");
  RunConfig rc;
  if (j.contains("data") == j.contains("generator"))
    throw ConfigError("config needs exactly one of 'data' or 'generator'");
  if (j.contains("seed")) rc.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("data")) {
    const auto& d = j.at("data");
    auto resolve = [&](const std::string& p) {
      std::filesystem::path path(p);
      return path.is_relative() && !base.empty() ? base / path : path;
    };
    if (d.is_string()) {
      rc.data = CorpusPaths::in_directory(resolve(d.get<std::string>()));
    } else {
      detail::reject_unknown(d, {"follows", "tweets", "seeds"}, "data");
      CorpusPaths paths;
      paths.follows = resolve(d.at("follows").get<std::string>());
      paths.tweets = resolve(d.at("tweets").get<std::string>());
      if (d.contains("seeds")) paths.seeds = resolve(d.at("seeds").get<std::string>());
      rc.data = paths;
    }
  } else {
    if (!rc.seed) throw ConfigError("'seed' is required when generating a corpus");
    rc.generator = generator_from_json(j.at("generator"));
    rc.generator->seed = *rc.seed;
    rc.generator->validate();
  }
  if (j.contains("recommender")) rc.recommender = recommender_from_json(j.at("recommender"));
  if (j.contains("scenario")) {
    int s = j.at("scenario").get<int>();
    if (s != 1 && s != 2) throw ConfigError("scenario must be 1 or 2");
    rc.scenario = static_cast<Scenario>(s);
  }
  if (j.contains("algorithms"))
    for (const auto& a : j.at("algorithms")) rc.algorithms.push_back(parse_algorithm(a.get<std::string>()));
  if (j.contains("output_dir")) rc.output_dir = j.at("output_dir").get<std::string>();
  detail::read_field(j, "recency_cap_hours", rc.recency_cap_hours);
  detail::read_field(j, "threads", rc.threads);
  return rc;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return run_config_from_json(j, path.parent_path());
}

inline Json to_json(const RunConfig& rc) {
  Json j;
  if (rc.data) {
    j["data"] = {{"follows", rc.data->follows.string()}, {"tweets", rc.data->tweets.string()}};
    if (!rc.data->seeds.empty()) j["data"]["seeds"] = rc.data->seeds.string();
  }
  if (rc.generator) j["generator"] = to_json(*rc.generator);
  if (rc.seed) j["seed"] = *rc.seed;
  j["recommender"] = to_json(rc.recommender);
  j["scenario"] = static_cast<int>(rc.scenario);
  auto algos = Json::array();
  for (Algorithm a : rc.resolved_algorithms()) algos.push_back(std::string(to_string(a)));
  j["algorithms"] = std::move(algos);
  j["recency_cap_hours"] = rc.recency_cap_hours;
  return j;
}

/// Explicit flag first, then $HASHREC_OUTPUT_DIR, then the config value.
inline std::filesystem::path resolve_output_dir(const std::optional<std::filesystem::path>& flag,
                                                const std::filesystem::path& configured) {
  if (flag) return *flag;
  if (const char* env = std::getenv("HASHREC_OUTPUT_DIR"); env && *env) return env;
  return configured;
}

}  // namespace hashrec
