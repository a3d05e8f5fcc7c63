#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hashrec/content.hpp"
#include "hashrec/corpus.hpp"
#include "hashrec/ranking.hpp"

namespace hashrec {

/// Base-level activation. Empty (-inf) when there is no qualifying usage.
struct Activation {
  double value = -std::numeric_limits<double>::infinity();
  [[nodiscard]] bool empty() const { return !std::isfinite(value); }
};

namespace detail {

/// Recency in hours, floored at one hour. Non-positive recencies are not
/// usages "before" the reference time and yield 0 (excluded).
inline double decayed(Timestamp ts_ref, Timestamp used, double d) {
  if (used >= ts_ref) return 0.0;
  double hours = std::max(static_cast<double>(ts_ref - used) / kSecondsPerHour, 1.0);
  return std::pow(hours, -d);
}

struct Accumulated {
  double sum = 0;
  std::size_t count = 0;
  Timestamp last_used = 0;
};

/// Per-hashtag decayed sums over the given users' usages before ts_ref, in
/// hashtag id order.
inline std::vector<std::pair<HashtagId, Accumulated>> accumulate(const Corpus& corpus,
                                                                 std::span<const UserId> users,
                                                                 Timestamp ts_ref, double d) {
  std::unordered_map<HashtagId, Accumulated> acc;
  for (UserId v : users) {
    for (std::uint32_t e : corpus.before(corpus.events_of_user(v), ts_ref)) {
      const UsageEvent& ev = corpus.events()[e];
      Accumulated& a = acc[ev.hashtag];
      a.sum += decayed(ts_ref, ev.timestamp, d);
      a.count += 1;
      a.last_used = std::max(a.last_used, ev.timestamp);
    }
  }
  std::vector<std::pair<HashtagId, Accumulated>> out(acc.begin(), acc.end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

inline Activation activation_of(const Corpus& corpus, std::span<const UserId> users, HashtagId ht,
                                Timestamp ts_ref, double d) {
  double sum = 0;
  for (UserId v : users)
    for (std::uint32_t e : corpus.before(corpus.events_of_user(v), ts_ref)) {
      const UsageEvent& ev = corpus.events()[e];
      if (ev.hashtag == ht) sum += decayed(ts_ref, ev.timestamp, d);
    }
  return sum > 0 ? Activation{std::log(sum)} : Activation{};
}

/// Softmax-normalized BLL candidates for a usage set.
inline std::vector<Candidate> bll_component(const Corpus& corpus, std::span<const UserId> users,
                                            Timestamp ts_ref, double d) {
  std::vector<Candidate> out;
  for (const auto& [h, a] : accumulate(corpus, users, ts_ref, d))
    if (a.sum > 0) out.push_back({h, std::log(a.sum), a.last_used});
  softmax_scores(out);
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// BLL family

/// B_I = ln(sum_j dt_j^-d_I) over u's own uses of `ht` before ts_ref.
inline Activation bll_individual(const Corpus& corpus, UserId u, HashtagId ht, Timestamp ts_ref,
                                 const RecommenderConfig& cfg) {
  UserId self[] = {u};
  return detail::activation_of(corpus, self, ht, ts_ref, cfg.d_individual);
}

/// B_S: same as bll_individual but pooled over every followee's uses.
inline Activation bll_social(const Corpus& corpus, UserId u, HashtagId ht, Timestamp ts_ref,
                             const RecommenderConfig& cfg) {
  return detail::activation_of(corpus, corpus.followees(u), ht, ts_ref, cfg.d_social);
}

/// Softmax over a hashtag -> activation map.
inline std::vector<std::pair<HashtagId, double>> softmax_over(
    const std::vector<std::pair<HashtagId, double>>& activations) {
  std::vector<double> values;
  for (const auto& [h, b] : activations) values.push_back(b);
  auto weights = softmax(values);
  std::vector<std::pair<HashtagId, double>> out;
  for (std::size_t i = 0; i < activations.size(); ++i) out.emplace_back(activations[i].first, weights[i]);
  return out;
}

/// sigma(B_I) over HT_u.
inline std::vector<Candidate> individual_candidates(const Corpus& corpus, UserId u, Timestamp ts_ref,
                                                    const RecommenderConfig& cfg) {
  UserId self[] = {u};
  return detail::bll_component(corpus, self, ts_ref, cfg.d_individual);
}

/// sigma(B_S) over HT_{F_u}.
inline std::vector<Candidate> social_candidates(const Corpus& corpus, UserId u, Timestamp ts_ref,
                                                const RecommenderConfig& cfg) {
  return detail::bll_component(corpus, corpus.followees(u), ts_ref, cfg.d_social);
}

/// Unranked B_{I,S} = beta * sigma(B_I) + (1 - beta) * sigma(B_S).
inline std::vector<Candidate> bll_is_candidates(const Corpus& corpus, UserId u, Timestamp ts_ref,
                                                const RecommenderConfig& cfg) {
  std::vector<Candidate> ind, soc;
  if (cfg.beta != 0) ind = individual_candidates(corpus, u, ts_ref, cfg);
  if (cfg.beta != 1) soc = social_candidates(corpus, u, ts_ref, cfg);
  return blend({{cfg.beta, &ind}, {1.0 - cfg.beta, &soc}});
}

inline RankedList bll_i(const Corpus& corpus, UserId u, Timestamp ts_ref, const RecommenderConfig& cfg) {
  return rank_candidates(individual_candidates(corpus, u, ts_ref, cfg), cfg.k_max);
}

inline RankedList bll_s(const Corpus& corpus, UserId u, Timestamp ts_ref, const RecommenderConfig& cfg) {
  return rank_candidates(social_candidates(corpus, u, ts_ref, cfg), cfg.k_max);
}

inline RankedList bll_is(const Corpus& corpus, UserId u, Timestamp ts_ref, const RecommenderConfig& cfg) {
  return rank_candidates(bll_is_candidates(corpus, u, ts_ref, cfg), cfg.k_max);
}

/// lambda * B_{I,S} + (1 - lambda) * sigma(CB) over HT_u, HT_{F_u} and the
/// hashtags of the tweets most similar to `text`.
inline RankedList bll_isc(const Corpus& corpus, UserId u, std::string_view text, Timestamp ts_ref,
                          const ContentIndex& index, const RecommenderConfig& cfg) {
  std::vector<Candidate> personal, content;
  if (cfg.lambda != 0) personal = bll_is_candidates(corpus, u, ts_ref, cfg);
  if (cfg.lambda != 1) {
    content = index.top_similar(text, cfg.s_max).cb_scores;
    softmax_scores(content);
  }
  return rank_candidates(blend({{cfg.lambda, &personal}, {1.0 - cfg.lambda, &content}}), cfg.k_max);
}

// ---------------------------------------------------------------------------
// Frequency and recency baselines

namespace detail {

inline RankedList most_popular(const Corpus& corpus, std::span<const UserId> users, Timestamp ts_ref,
                               std::size_t k) {
  std::vector<Candidate> c;
  for (const auto& [h, a] : accumulate(corpus, users, ts_ref, 1.0))
    c.push_back({h, static_cast<double>(a.count), a.last_used});
  return rank_candidates(std::move(c), k);
}

/// Latest use first; score 1/rank.
inline RankedList most_recent(const Corpus& corpus, std::span<const UserId> users, Timestamp ts_ref,
                              std::size_t k) {
  std::vector<Candidate> c;
  for (const auto& [h, a] : accumulate(corpus, users, ts_ref, 1.0))
    c.push_back({h, 0.0, a.last_used});
  std::sort(c.begin(), c.end(), [](const Candidate& a, const Candidate& b) {
    if (a.last_used != b.last_used) return a.last_used > b.last_used;
    return a.hashtag < b.hashtag;
  });
  RankedList out;
  for (std::size_t i = 0; i < c.size() && i < k; ++i)
    out.push_back({c[i].hashtag, 1.0 / static_cast<double>(i + 1)});
  return out;
}

}  // namespace detail

inline RankedList mp_individual(const Corpus& corpus, UserId u, Timestamp ts_ref, const RecommenderConfig& cfg) {
  UserId self[] = {u};
  return detail::most_popular(corpus, self, ts_ref, cfg.k_max);
}

inline RankedList mp_social(const Corpus& corpus, UserId u, Timestamp ts_ref, const RecommenderConfig& cfg) {
  return detail::most_popular(corpus, corpus.followees(u), ts_ref, cfg.k_max);
}

/// Unpersonalized: overall frequency before ts_ref.
inline RankedList mp_global(const Corpus& corpus, Timestamp ts_ref, const RecommenderConfig& cfg) {
  std::vector<Candidate> c;
  for (std::size_t h = 0; h < corpus.vocabulary().hashtags.size(); ++h) {
    HashtagId ht(static_cast<std::uint32_t>(h));
    auto used = corpus.before(corpus.events_of_hashtag(ht), ts_ref);
    if (used.empty()) continue;
    c.push_back({ht, static_cast<double>(used.size()), corpus.events()[used.back()].timestamp});
  }
  return rank_candidates(std::move(c), cfg.k_max);
}

inline RankedList mr_individual(const Corpus& corpus, UserId u, Timestamp ts_ref, const RecommenderConfig& cfg) {
  UserId self[] = {u};
  return detail::most_recent(corpus, self, ts_ref, cfg.k_max);
}

inline RankedList mr_social(const Corpus& corpus, UserId u, Timestamp ts_ref, const RecommenderConfig& cfg) {
  return detail::most_recent(corpus, corpus.followees(u), ts_ref, cfg.k_max);
}

// ---------------------------------------------------------------------------
// User-based collaborative filtering

struct Neighbor {
  UserId user;
  double similarity = 0;
};

/// Cosine neighbours of u over binary hashtag profiles built from usages
/// before ts_ref; best `limit` users with positive similarity, ties by id.
inline std::vector<Neighbor> cf_neighbors(const Corpus& corpus, UserId u, Timestamp ts_ref, std::size_t limit) {
  std::vector<HashtagId> profile;
  for (std::uint32_t e : corpus.before(corpus.events_of_user(u), ts_ref))
    profile.push_back(corpus.events()[e].hashtag);
  std::sort(profile.begin(), profile.end());
  profile.erase(std::unique(profile.begin(), profile.end()), profile.end());
  if (profile.empty()) return {};

  std::unordered_map<UserId, std::size_t> overlap;
  std::vector<UserId> seen_for_tag;
  for (HashtagId h : profile) {
    seen_for_tag.clear();
    for (std::uint32_t e : corpus.before(corpus.events_of_hashtag(h), ts_ref)) {
      UserId v = corpus.events()[e].user;
      if (v == u || std::find(seen_for_tag.begin(), seen_for_tag.end(), v) != seen_for_tag.end()) continue;
      seen_for_tag.push_back(v);
      ++overlap[v];
    }
  }
  std::vector<Neighbor> out;
  const double self_norm = std::sqrt(static_cast<double>(profile.size()));
  for (const auto& [v, shared] : overlap) {
    double norm = self_norm * std::sqrt(static_cast<double>(corpus.profile_size(v, ts_ref)));
    out.push_back({v, static_cast<double>(shared) / norm});
  }
  auto better = [](const Neighbor& a, const Neighbor& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return a.user < b.user;
  };
  std::sort(out.begin(), out.end(), better);
  if (out.size() > limit) out.resize(limit);
  return out;
}

/// score(ht) = sum of neighbour similarities over neighbours that used ht.
inline RankedList cf_user_based(const Corpus& corpus, UserId u, Timestamp ts_ref, const RecommenderConfig& cfg) {
  std::unordered_map<HashtagId, Candidate> scores;
  for (const Neighbor& n : cf_neighbors(corpus, u, ts_ref, cfg.cf_neighbors)) {
    std::unordered_map<HashtagId, Timestamp> used;
    for (std::uint32_t e : corpus.before(corpus.events_of_user(n.user), ts_ref)) {
      const UsageEvent& ev = corpus.events()[e];
      used[ev.hashtag] = std::max(used[ev.hashtag], ev.timestamp);
    }
    for (const auto& [h, ts] : used) {
      auto [it, fresh] = scores.try_emplace(h, Candidate{h, 0.0, 0});
      it->second.score += n.similarity;
      it->second.last_used = std::max(it->second.last_used, ts);
    }
  }
  std::vector<Candidate> c;
  for (auto& [h, cand] : scores) c.push_back(cand);
  return rank_candidates(std::move(c), cfg.k_max);
}

}  // namespace hashrec
