#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hashrec/corpus.hpp"

namespace hashrec {

/// Raised for unparseable input; carries the offending file and line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& what)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + what), line_(line) {}
  [[nodiscard]] std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct CorpusPaths {
  std::filesystem::path follows;
  std::filesystem::path tweets;
  std::filesystem::path seeds;  // optional; empty means every author is a seed

  static CorpusPaths in_directory(const std::filesystem::path& dir) {
    CorpusPaths p{dir / "follows.tsv", dir / "tweets.tsv", dir / "seeds.txt"};
    if (!std::filesystem::exists(p.seeds)) p.seeds.clear();
    return p;
  }
};

struct IngestResult {
  Corpus corpus;
  std::vector<std::string> warnings;
  std::size_t dropped_untagged = 0;
};

namespace detail {

inline std::vector<std::string_view> split_tabs(std::string_view line, std::size_t max_fields) {
  std::vector<std::string_view> out;
  while (out.size() + 1 < max_fields) {
    auto tab = line.find('\t');
    if (tab == std::string_view::npos) break;
    out.push_back(line.substr(0, tab));
    line.remove_prefix(tab + 1);
  }
  out.push_back(line);
  return out;
}

inline std::string_view trim_cr(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

}  // namespace detail

/// Reads the two-file TSV corpus format (plus optional seeds list).
///
///   follows.tsv  user_id <TAB> followee_id
///   tweets.tsv   tweet_id <TAB> user_id <TAB> unix_ts <TAB> is_retweet <TAB> text
///
/// An empty is_retweet field, or a four-column line, falls back to the
/// "RT @" text prefix rule.
inline IngestResult ingest(const CorpusPaths& paths) {
  auto vocab = std::make_shared<Vocabulary>();
  std::vector<std::vector<UserId>> followees;
  std::vector<UserId> seeds;
  std::vector<Tweet> tweets;
  IngestResult result;

  auto grow = [&](UserId u) {
    if (followees.size() <= u.value) followees.resize(u.value + 1);
  };

  std::vector<std::pair<UserId, UserId>> edges;
  std::vector<std::size_t> edge_lines;
  {
    auto in = detail::open_input(paths.follows);
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
      ++line_no;
      auto line = detail::trim_cr(raw);
      if (line.empty()) continue;
      auto f = detail::split_tabs(line, 3);
      if (f.size() != 2 || f[0].empty() || f[1].empty())
        throw ParseError(paths.follows.string(), line_no, "expected user_id<TAB>followee_id");
      if (f[0] == f[1]) {
        result.warnings.push_back(paths.follows.string() + ":" + std::to_string(line_no) +
                                  ": self-follow ignored");
        continue;
      }
      edges.emplace_back(vocab->users.intern(f[0]), vocab->users.intern(f[1]));
      edge_lines.push_back(line_no);
    }
  }

  {
    auto in = detail::open_input(paths.tweets);
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
      ++line_no;
      auto line = detail::trim_cr(raw);
      if (line.empty()) continue;
      auto f = detail::split_tabs(line, 5);
      if (f.size() < 4)
        throw ParseError(paths.tweets.string(), line_no,
                         "expected tweet_id<TAB>user_id<TAB>unix_ts<TAB>is_retweet<TAB>text");
      if (f[0].empty() || f[1].empty()) throw ParseError(paths.tweets.string(), line_no, "empty id");
      Timestamp ts = 0;
      auto [ptr, ec] = std::from_chars(f[2].data(), f[2].data() + f[2].size(), ts);
      if (ec != std::errc() || ptr != f[2].data() + f[2].size() || ts <= 0)
        throw ParseError(paths.tweets.string(), line_no, "invalid timestamp '" + std::string(f[2]) + "'");

      std::string_view text;
      bool retweet = false;
      if (f.size() == 5) {
        text = f[4];
        if (f[3] == "1")
          retweet = true;
        else if (f[3] == "0")
          retweet = false;
        else if (f[3].empty())
          retweet = looks_like_retweet(text);
        else
          throw ParseError(paths.tweets.string(), line_no, "is_retweet must be 0 or 1");
      } else {
        text = f[3];
        retweet = looks_like_retweet(text);
      }

      if (vocab->tweets.find(f[0]))
        throw ParseError(paths.tweets.string(), line_no, "duplicate tweet id '" + std::string(f[0]) + "'");
      Tweet t;
      t.id = vocab->tweets.intern(f[0]);
      t.author = vocab->users.intern(f[1]);
      t.timestamp = ts;
      t.text = std::string(text);
      t.is_retweet = retweet;
      for (const auto& tag : extract_hashtags(text)) t.hashtags.push_back(vocab->hashtags.intern(tag));
      if (t.hashtags.empty()) {
        ++result.dropped_untagged;
        continue;
      }
      tweets.push_back(std::move(t));
    }
  }

  // Users that only appear in the follow graph have no tweets; keep them as
  // isolated users and say so.
  std::vector<bool> has_tweets(vocab->users.size(), false);
  for (const Tweet& t : tweets) has_tweets[t.author.value] = true;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    auto [u, v] = edges[i];
    grow(u);
    followees[u.value].push_back(v);
    if (!has_tweets[v.value]) {
      result.warnings.push_back(paths.follows.string() + ":" + std::to_string(edge_lines[i]) +
                                ": followee '" + vocab->users.name(v) +
                                "' has no tagged tweets; kept as isolated user");
      has_tweets[v.value] = true;  // warn once per user
    }
  }

  if (!paths.seeds.empty()) {
    auto in = detail::open_input(paths.seeds);
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
      ++line_no;
      auto line = detail::trim_cr(raw);
      if (line.empty()) continue;
      if (!vocab->users.find(line))
        result.warnings.push_back(paths.seeds.string() + ":" + std::to_string(line_no) +
                                  ": seed '" + std::string(line) + "' unknown; added as isolated user");
      seeds.push_back(vocab->users.intern(line));
    }
  } else {
    for (const Tweet& t : tweets) seeds.push_back(t.author);
  }

  if (tweets.empty()) throw std::runtime_error(paths.tweets.string() + ": no hashtagged tweets");

  followees.resize(vocab->users.size());
  result.corpus = Corpus(std::move(vocab), std::move(followees), std::move(seeds), std::move(tweets));
  return result;
}

/// Writes a corpus back out in the ingest format. Output is sorted and
/// therefore byte-stable for a given corpus.
inline void write_corpus(const Corpus& corpus, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto& vocab = corpus.vocabulary();
  {
    std::ofstream out(dir / "follows.tsv", std::ios::binary);
    for (std::size_t u = 0; u < corpus.user_count(); ++u)
      for (UserId v : corpus.followees(UserId(static_cast<std::uint32_t>(u))))
        out << vocab.users.names()[u] << '\t' << vocab.users.name(v) << '\n';
  }
  {
    std::ofstream out(dir / "tweets.tsv", std::ios::binary);
    for (const Tweet& t : corpus.tweets())
      out << vocab.tweets.name(t.id) << '\t' << vocab.users.name(t.author) << '\t' << t.timestamp
          << '\t' << (t.is_retweet ? 1 : 0) << '\t' << t.text << '\n';
  }
  {
    std::ofstream out(dir / "seeds.txt", std::ios::binary);
    for (UserId u : corpus.seed_users()) out << vocab.users.name(u) << '\n';
  }
}

inline nlohmann::ordered_json stats_to_json(const CorpusStats& s) {
  nlohmann::ordered_json j;
  j["users"] = s.users;
  j["seed_users"] = s.seed_users;
  j["followees"] = s.followees;
  j["tweets"] = s.tweets;
  j["hashtags"] = s.hashtags;
  j["assignments"] = s.assignments;
  j["table"] = {{"|U_S|", s.seed_users}, {"|F|", s.followees}, {"|U|", s.users},
                {"|T|", s.tweets},       {"|HT|", s.hashtags},  {"|HTAS|", s.assignments}};
  return j;
}

}  // namespace hashrec
