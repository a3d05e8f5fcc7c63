#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "hashrec/corpus.hpp"
#include "hashrec/ranking.hpp"

namespace hashrec {

/// Undirected user-tweet-hashtag graph. Each assignment (u, t, h) adds one to
/// the weights of the edges u-t, t-h and u-h. Nodes are laid out as all
/// users, then all tweets, then all hashtags, each block in id order.
class FolkGraph {
 public:
  static FolkGraph build(std::span<const UsageEvent> events) {
    FolkGraph g;
    std::vector<UserId> users;
    std::vector<TweetId> tweets;
    std::vector<HashtagId> tags;
    for (const UsageEvent& e : events) {
      users.push_back(e.user);
      tweets.push_back(e.tweet);
      tags.push_back(e.hashtag);
    }
    auto dedup = [](auto& v) {
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
    };
    dedup(users);
    dedup(tweets);
    dedup(tags);
    g.users_ = users;
    g.tweets_ = tweets;
    g.hashtags_ = tags;
    g.tweet_base_ = users.size();
    g.tag_base_ = users.size() + tweets.size();
    for (std::size_t i = 0; i < users.size(); ++i) g.user_node_[users[i]] = static_cast<std::uint32_t>(i);
    for (std::size_t i = 0; i < tweets.size(); ++i)
      g.tweet_node_[tweets[i]] = static_cast<std::uint32_t>(g.tweet_base_ + i);
    for (std::size_t i = 0; i < tags.size(); ++i)
      g.tag_node_[tags[i]] = static_cast<std::uint32_t>(g.tag_base_ + i);

    std::unordered_map<std::uint64_t, double> edges;
    auto add = [&](std::uint32_t a, std::uint32_t b) {
      edges[(std::uint64_t{a} << 32) | b] += 1.0;
      edges[(std::uint64_t{b} << 32) | a] += 1.0;
    };
    for (const UsageEvent& e : events) {
      std::uint32_t u = g.user_node_.at(e.user), t = g.tweet_node_.at(e.tweet), h = g.tag_node_.at(e.hashtag);
      add(u, t);
      add(t, h);
      add(u, h);
    }
    std::vector<std::pair<std::uint64_t, double>> sorted(edges.begin(), edges.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = g.size();
    g.offsets_.assign(n + 1, 0);
    for (const auto& [key, w] : sorted) ++g.offsets_[(key >> 32) + 1];
    for (std::size_t i = 0; i < n; ++i) g.offsets_[i + 1] += g.offsets_[i];
    g.degree_.assign(n, 0.0);
    for (const auto& [key, w] : sorted) {
      auto from = static_cast<std::uint32_t>(key >> 32);
      g.targets_.push_back(static_cast<std::uint32_t>(key & 0xffffffffu));
      g.weights_.push_back(w);
      g.degree_[from] += w;
    }
    return g;
  }

  [[nodiscard]] std::size_t size() const { return tag_base_ + hashtags_.size(); }
  [[nodiscard]] const std::vector<UserId>& users() const { return users_; }
  [[nodiscard]] const std::vector<TweetId>& tweets() const { return tweets_; }
  [[nodiscard]] const std::vector<HashtagId>& hashtags() const { return hashtags_; }

  [[nodiscard]] const std::uint32_t* node_of(UserId u) const { return find(user_node_, u); }
  [[nodiscard]] const std::uint32_t* node_of(TweetId t) const { return find(tweet_node_, t); }
  [[nodiscard]] const std::uint32_t* node_of(HashtagId h) const { return find(tag_node_, h); }
  [[nodiscard]] std::size_t hashtag_base() const { return tag_base_; }

  /// One step of w <- d * p + (1 - d) * spread(w), where every node hands
  /// its weight to its neighbours in proportion to edge weight.
  [[nodiscard]] std::vector<double> step(const std::vector<double>& w, const std::vector<double>& pref,
                                         double d) const {
    std::vector<double> next(size(), 0.0);
    for (std::size_t i = 0; i < size(); ++i) {
      if (degree_[i] == 0) continue;
      const double share = w[i] / degree_[i];
      for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) next[targets_[k]] += weights_[k] * share;
    }
    for (std::size_t i = 0; i < size(); ++i) next[i] = d * pref[i] + (1.0 - d) * next[i];
    return next;
  }

  /// `iters` steps starting from the uniform distribution.
  [[nodiscard]] std::vector<double> spread(const std::vector<double>& pref, double d, std::size_t iters) const {
    std::vector<double> w(size(), size() ? 1.0 / static_cast<double>(size()) : 0.0);
    for (std::size_t i = 0; i < iters; ++i) w = step(w, pref, d);
    return w;
  }

  [[nodiscard]] std::vector<double> uniform_preference() const {
    return std::vector<double>(size(), 1.0 / static_cast<double>(size()));
  }

  /// Uniform weight 1 on every node plus |V| extra on `node`, normalized.
  [[nodiscard]] std::vector<double> user_preference(std::uint32_t node) const {
    const auto n = static_cast<double>(size());
    std::vector<double> p(size(), 1.0 / (2.0 * n));
    p[node] += n / (2.0 * n);
    return p;
  }

 private:
  template <typename Map, typename Key>
  static const std::uint32_t* find(const Map& m, Key k) {
    auto it = m.find(k);
    return it == m.end() ? nullptr : &it->second;
  }

  std::vector<UserId> users_;
  std::vector<TweetId> tweets_;
  std::vector<HashtagId> hashtags_;
  std::size_t tweet_base_ = 0, tag_base_ = 0;
  std::unordered_map<UserId, std::uint32_t> user_node_;
  std::unordered_map<TweetId, std::uint32_t> tweet_node_;
  std::unordered_map<HashtagId, std::uint32_t> tag_node_;
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> targets_;
  std::vector<double> weights_;
  std::vector<double> degree_;
};

/// Differential FolkRank over the graph of usages before ts_ref: weights
/// with preference on u minus weights with uniform preference, read off the
/// hashtag nodes.
inline RankedList folkrank(const Corpus& corpus, UserId u, Timestamp ts_ref, const RecommenderConfig& cfg) {
  auto events = corpus.events_before(ts_ref);
  FolkGraph graph = FolkGraph::build(events);
  const std::uint32_t* node = graph.node_of(u);
  if (!node) return {};
  auto biased = graph.spread(graph.user_preference(*node), cfg.folkrank_d, cfg.folkrank_iters);
  auto base = graph.spread(graph.uniform_preference(), cfg.folkrank_d, cfg.folkrank_iters);

  std::unordered_map<HashtagId, Timestamp> last;
  for (const UsageEvent& e : events) last[e.hashtag] = std::max(last[e.hashtag], e.timestamp);
  std::vector<Candidate> c;
  const auto& tags = graph.hashtags();
  for (std::size_t i = 0; i < tags.size(); ++i) {
    std::size_t n = graph.hashtag_base() + i;
    c.push_back({tags[i], biased[n] - base[n], last[tags[i]]});
  }
  return rank_candidates(std::move(c), cfg.k_max);
}

}  // namespace hashrec
