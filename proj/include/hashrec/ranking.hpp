#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "hashrec/ids.hpp"

namespace hashrec {

/// Every tunable of the recommender family in one place.
struct RecommenderConfig {
  double d_individual = 1.7;
  double d_social = 1.25;
  double beta = 0.5;    // individual vs. social weight
  double lambda = 0.3;  // personal vs. content weight
  std::size_t cf_neighbors = 20;
  double folkrank_d = 0.7;  // weight of the preference vector
  std::size_t folkrank_iters = 10;
  std::size_t k_max = 10;
  std::size_t s_max = 20;  // similar tweets consulted by content scoring
  std::size_t min_tf = 2;
  std::size_t min_df = 5;

  void validate() const {
    if (!(d_individual > 0) || !(d_social > 0))
      throw std::invalid_argument("decay exponents must be positive");
    auto unit = [](double w) { return w >= 0 && w <= 1; };
    if (!unit(beta) || !unit(lambda) || !unit(folkrank_d))
      throw std::invalid_argument("beta, lambda and folkrank_d must lie in [0, 1]");
    if (k_max == 0) throw std::invalid_argument("k_max must be positive");
    if (s_max == 0) throw std::invalid_argument("s_max must be positive");
  }
};

struct ScoredHashtag {
  HashtagId hashtag;
  double score = 0;
  friend bool operator==(const ScoredHashtag&, const ScoredHashtag&) = default;
};

/// Best first, no duplicates, at most k_max long.
using RankedList = std::vector<ScoredHashtag>;

/// A scored hashtag before ranking. `last_used` is the most recent usage
/// timestamp within the evidence that produced the score; it breaks ties.
struct Candidate {
  HashtagId hashtag;
  double score = 0;
  Timestamp last_used = 0;
};

/// Sorts by score desc, then last use desc, then hashtag id asc, and keeps
/// the first `k`.
inline RankedList rank_candidates(std::vector<Candidate> candidates, std::size_t k) {
  auto better = [](const Candidate& a, const Candidate& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.last_used != b.last_used) return a.last_used > b.last_used;
    return a.hashtag < b.hashtag;
  };
  const std::size_t keep = std::min(k, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep),
                    candidates.end(), better);
  RankedList out;
  out.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) out.push_back({candidates[i].hashtag, candidates[i].score});
  return out;
}

/// exp(x) / sum(exp) over the given values, computed with the maximum
/// subtracted first. Empty input gives empty output.
inline std::vector<double> softmax(const std::vector<double>& values) {
  std::vector<double> out(values.size());
  if (values.empty()) return out;
  double top = -std::numeric_limits<double>::infinity();
  for (double v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument("softmax input must be finite");
    top = std::max(top, v);
  }
  double sum = 0;
  for (std::size_t i = 0; i < values.size(); ++i) sum += out[i] = std::exp(values[i] - top);
  for (double& w : out) w /= sum;
  return out;
}

/// Softmax applied to candidate scores in place.
inline void softmax_scores(std::vector<Candidate>& candidates) {
  std::vector<double> values;
  values.reserve(candidates.size());
  for (const auto& c : candidates) values.push_back(c.score);
  auto weights = softmax(values);
  for (std::size_t i = 0; i < candidates.size(); ++i) candidates[i].score = weights[i];
}

/// Weighted sum of candidate sets. A hashtag missing from a set contributes
/// nothing for it; sets with zero weight contribute no candidates at all.
inline std::vector<Candidate> blend(const std::vector<std::pair<double, const std::vector<Candidate>*>>& parts) {
  std::unordered_map<HashtagId, std::size_t> slot;
  std::vector<Candidate> out;
  for (auto [weight, set] : parts) {
    if (weight == 0) continue;
    for (const Candidate& c : *set) {
      auto [it, fresh] = slot.try_emplace(c.hashtag, out.size());
      if (fresh) out.push_back({c.hashtag, 0.0, 0});
      Candidate& dst = out[it->second];
      dst.score += weight * c.score;
      dst.last_used = std::max(dst.last_used, c.last_used);
    }
  }
  return out;
}

}  // namespace hashrec
