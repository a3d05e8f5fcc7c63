#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hashrec/corpus.hpp"
#include "hashrec/ranking.hpp"

namespace hashrec {

/// Lowercase word terms of a tweet. URLs and @mentions are dropped, '#' acts
/// as a separator so hashtags survive as bare words, and terms shorter than
/// two characters are discarded. No stemming, no stop words.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> terms;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t begin = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::string token(text.substr(begin, i - begin));
    for (char& c : token) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (token.empty() || token.starts_with('@') || token.starts_with("http://") ||
        token.starts_with("https://") || token.starts_with("www."))
      continue;
    std::string term;
    auto flush = [&] {
      if (term.size() >= 2) terms.push_back(term);
      term.clear();
    };
    for (char c : token) {
      if (std::isalnum(static_cast<unsigned char>(c)))
        term.push_back(c);
      else
        flush();
    }
    flush();
  }
  return terms;
}

/// Removes whitespace-delimited '#' tokens, leaving the rest of the text.
inline std::string strip_hashtag_tokens(std::string_view text) {
  std::string out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t begin = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    auto token = text.substr(begin, i - begin);
    if (token.empty() || token.front() == '#') continue;
    if (!out.empty()) out += ' ';
    out += token;
  }
  return out;
}

struct Posting {
  std::uint32_t doc = 0;  // position in ContentIndex::docs()
  std::uint32_t tf = 0;
  friend bool operator==(const Posting&, const Posting&) = default;
};

struct IndexedDoc {
  TweetId tweet;
  Timestamp timestamp = 0;
  std::vector<HashtagId> hashtags;
};

struct SimilarityResult {
  std::vector<std::pair<TweetId, double>> neighbors;  // best first
  std::vector<Candidate> cb_scores;                   // max neighbor similarity per hashtag
};

/// TF-IDF inverted index over tweets. Documents are ordered by tweet id and
/// postings by document, so the index does not depend on input order.
class ContentIndex {
 public:
  static constexpr int kFormatVersion = 1;

  ContentIndex() = default;

  static ContentIndex build(const Corpus& corpus, std::size_t min_tf = 2, std::size_t min_df = 5) {
    ContentIndex index;
    index.min_tf_ = min_tf;
    index.min_df_ = min_df;
    std::vector<const Tweet*> order;
    for (const Tweet& t : corpus.tweets()) order.push_back(&t);
    std::sort(order.begin(), order.end(), [](const Tweet* a, const Tweet* b) { return a->id < b->id; });
    for (const Tweet* t : order) index.add(*t);
    return index;
  }

  [[nodiscard]] std::size_t total_docs() const { return docs_.size(); }
  [[nodiscard]] std::size_t min_tf() const { return min_tf_; }
  [[nodiscard]] std::size_t min_df() const { return min_df_; }
  [[nodiscard]] const std::vector<IndexedDoc>& docs() const { return docs_; }
  [[nodiscard]] std::size_t term_count() const { return postings_.size(); }
  [[nodiscard]] const std::unordered_map<std::string, std::vector<Posting>>& all_postings() const {
    return postings_;
  }

  [[nodiscard]] const std::vector<Posting>* postings(const std::string& term) const {
    auto it = postings_.find(term);
    return it == postings_.end() ? nullptr : &it->second;
  }
  [[nodiscard]] std::size_t doc_freq(const std::string& term) const {
    const auto* p = postings(term);
    return p ? p->size() : 0;
  }
  /// ln(|T| / df); zero for unknown terms.
  [[nodiscard]] double idf(const std::string& term) const {
    std::size_t df = doc_freq(term);
    if (df == 0) return 0.0;
    return std::log(static_cast<double>(docs_.size()) / static_cast<double>(df));
  }
  [[nodiscard]] bool passes_df(const std::string& term) const {
    std::size_t df = doc_freq(term);
    return df > 0 && df >= min_df_;
  }

  /// Similarity of a query text to one candidate tweet text: for each
  /// distinct query term, candidate term count times IDF. Terms below the
  /// document-frequency threshold, or occurring fewer than min_tf times in
  /// the candidate, are skipped.
  [[nodiscard]] double similarity(std::string_view query_text, std::string_view candidate_text) const {
    std::unordered_map<std::string, std::size_t> counts;
    for (auto& term : tokenize(candidate_text)) ++counts[term];
    double sim = 0;
    for (const auto& term : distinct(tokenize(query_text))) {
      auto it = counts.find(term);
      if (it == counts.end() || it->second < min_tf_ || !passes_df(term)) continue;
      sim += static_cast<double>(it->second) * idf(term);
    }
    return sim;
  }

  /// The `s_max` most similar indexed tweets (ties by tweet id) and the
  /// content score of each hashtag they carry.
  [[nodiscard]] SimilarityResult top_similar(std::string_view query_text, std::size_t s_max) const {
    if (s_max == 0) throw std::invalid_argument("s_max must be at least 1");
    std::vector<double> acc(docs_.size(), 0.0);
    std::vector<char> seen(docs_.size(), 0);
    std::vector<std::uint32_t> touched;
    for (const auto& term : distinct(tokenize(query_text))) {
      if (!passes_df(term)) continue;
      const double w = idf(term);
      for (const Posting& p : *postings(term)) {
        if (p.tf < min_tf_) continue;
        if (!seen[p.doc]) seen[p.doc] = 1, touched.push_back(p.doc);
        acc[p.doc] += static_cast<double>(p.tf) * w;
      }
    }
    std::erase_if(touched, [&](std::uint32_t d) { return !(acc[d] > 0); });
    auto better = [&](std::uint32_t a, std::uint32_t b) {
      if (acc[a] != acc[b]) return acc[a] > acc[b];
      return docs_[a].tweet < docs_[b].tweet;
    };
    const std::size_t keep = std::min(s_max, touched.size());
    std::partial_sort(touched.begin(), touched.begin() + static_cast<std::ptrdiff_t>(keep), touched.end(),
                      better);
    touched.resize(keep);

    SimilarityResult result;
    std::unordered_map<HashtagId, std::size_t> slot;
    for (std::uint32_t d : touched) {
      const IndexedDoc& doc = docs_[d];
      result.neighbors.emplace_back(doc.tweet, acc[d]);
      for (HashtagId h : doc.hashtags) {
        auto [it, fresh] = slot.try_emplace(h, result.cb_scores.size());
        if (fresh) result.cb_scores.push_back({h, acc[d], doc.timestamp});
        Candidate& c = result.cb_scores[it->second];
        c.score = std::max(c.score, acc[d]);
        c.last_used = std::max(c.last_used, doc.timestamp);
      }
    }
    return result;
  }

  // -- persistence ----------------------------------------------------------

  [[nodiscard]] nlohmann::ordered_json to_json(const Vocabulary& vocab) const {
    nlohmann::ordered_json j;
    j["format"] = "hashrec-content-index";
    j["version"] = kFormatVersion;
    j["total_docs"] = docs_.size();
    j["min_tf"] = min_tf_;
    j["min_df"] = min_df_;
    auto docs = nlohmann::ordered_json::array();
    for (const IndexedDoc& d : docs_) {
      nlohmann::ordered_json tags = nlohmann::ordered_json::array();
      for (HashtagId h : d.hashtags) tags.push_back(vocab.hashtags.name(h));
      docs.push_back({{"tweet", vocab.tweets.name(d.tweet)}, {"timestamp", d.timestamp}, {"hashtags", tags}});
    }
    j["docs"] = std::move(docs);
    std::map<std::string, const std::vector<Posting>*> sorted;
    for (const auto& [term, list] : postings_) sorted.emplace(term, &list);
    nlohmann::ordered_json postings = nlohmann::ordered_json::object();
    for (const auto& [term, list] : sorted) {
      auto arr = nlohmann::ordered_json::array();
      for (const Posting& p : *list) arr.push_back({p.doc, p.tf});
      postings[term] = std::move(arr);
    }
    j["postings"] = std::move(postings);
    return j;
  }

  /// Rebuilds an index saved by to_json; tweet and hashtag names must be
  /// known to `vocab`.
  static ContentIndex from_json(const nlohmann::json& j, const Vocabulary& vocab) {
    if (j.value("format", "") != "hashrec-content-index")
      throw std::runtime_error("not a content index file");
    if (j.at("version").get<int>() != kFormatVersion)
      throw std::runtime_error("unsupported content index version " + j.at("version").dump());
    ContentIndex index;
    index.min_tf_ = j.at("min_tf").get<std::size_t>();
    index.min_df_ = j.at("min_df").get<std::size_t>();
    for (const auto& d : j.at("docs")) {
      IndexedDoc doc;
      doc.tweet = vocab.tweets.at(d.at("tweet").get<std::string>());
      doc.timestamp = d.at("timestamp").get<Timestamp>();
      for (const auto& h : d.at("hashtags")) doc.hashtags.push_back(vocab.hashtags.at(h.get<std::string>()));
      index.docs_.push_back(std::move(doc));
    }
    for (const auto& [term, arr] : j.at("postings").items()) {
      auto& list = index.postings_[term];
      for (const auto& p : arr) {
        Posting posting{p.at(0).get<std::uint32_t>(), p.at(1).get<std::uint32_t>()};
        if (posting.doc >= index.docs_.size()) throw std::runtime_error("posting refers to unknown doc");
        list.push_back(posting);
      }
    }
    if (j.at("total_docs").get<std::size_t>() != index.docs_.size())
      throw std::runtime_error("content index doc count mismatch");
    return index;
  }

  void save(const std::filesystem::path& path, const Vocabulary& vocab) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << to_json(vocab).dump() << '\n';
  }

  static ContentIndex load(const std::filesystem::path& path, const Vocabulary& vocab) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return from_json(nlohmann::json::parse(in), vocab);
  }

 private:
  static std::vector<std::string> distinct(std::vector<std::string> terms) {
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    for (auto& t : terms)
      if (seen.insert(t).second) out.push_back(std::move(t));
    return out;
  }

  void add(const Tweet& t) {
    const auto doc = static_cast<std::uint32_t>(docs_.size());
    docs_.push_back({t.id, t.timestamp, t.hashtags});
    std::map<std::string, std::uint32_t> counts;
    for (auto& term : tokenize(t.text)) ++counts[term];
    for (auto& [term, tf] : counts) postings_[term].push_back({doc, tf});
  }

  std::unordered_map<std::string, std::vector<Posting>> postings_;
  std::vector<IndexedDoc> docs_;
  std::size_t min_tf_ = 2;
  std::size_t min_df_ = 5;
};

/// SimilarityRank: hashtags of the most similar tweets ranked by content
/// score. Not personalized.
inline RankedList similarity_rank(std::string_view query_text, const ContentIndex& index,
                                  const RecommenderConfig& cfg) {
  return rank_candidates(index.top_similar(query_text, cfg.s_max).cb_scores, cfg.k_max);
}

}  // namespace hashrec
