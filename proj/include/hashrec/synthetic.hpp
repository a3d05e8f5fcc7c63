#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "hashrec/corpus.hpp"
#include "hashrec/random.hpp"

namespace hashrec {

/// Shape of the reuse-recency kernel.
enum class ReuseKernel { PowerLaw, Exponential };

struct GeneratorParams {
  std::size_t users = 200;
  std::size_t seed_users = 0;  // 0 = every user is a seed
  std::size_t followee_degree = 10;
  std::size_t events = 20000;  // target number of hashtag assignments
  std::size_t max_hashtags_per_tweet = 1;

  ReuseKernel kernel = ReuseKernel::PowerLaw;
  double decay = 1.7;          // recency kernel exponent for own reuse
  double exponential_scale_hours = 24.0;  // kernel scale when kernel is Exponential
  double social_decay = -1.0;  // < 0: same as `decay`
  double w_individual = 0.5;
  double w_social = 0.3;
  double w_external = 0.2;

  /// Mean time between a user's consecutive tweets.
  double mean_user_gap_hours = 24.0;
  Timestamp start = 1'400'000'000;

  double retweet_probability = 0.0;

  bool generate_text = true;
  std::size_t vocabulary_size = 2000;  // background terms for tweet texts
  std::size_t topic_terms = 5;         // terms associated with each hashtag
  std::size_t terms_per_hashtag = 4;   // topic terms drawn per hashtag occurrence
  std::size_t noise_terms = 3;

  std::uint64_t seed = 1;

  void validate() const {
    if (users == 0) throw std::invalid_argument("generator: users must be positive");
    if (w_individual < 0 || w_social < 0 || w_external < 0)
      throw std::invalid_argument("generator: mixing weights must be non-negative");
    if (std::abs(w_individual + w_social + w_external - 1.0) > 1e-9)
      throw std::invalid_argument("generator: mixing weights must sum to 1");
    if (!(decay > 0)) throw std::invalid_argument("generator: decay must be positive");
    if (!(exponential_scale_hours > 0))
      throw std::invalid_argument("generator: exponential_scale_hours must be positive");
    if (max_hashtags_per_tweet == 0)
      throw std::invalid_argument("generator: max_hashtags_per_tweet must be positive");
    if (!(mean_user_gap_hours > 0)) throw std::invalid_argument("generator: gap must be positive");
    if (generate_text && (vocabulary_size == 0 || topic_terms == 0))
      throw std::invalid_argument("generator: text vocabulary must be non-empty");
  }
};

namespace detail {

struct PastUse {
  double hours;
  std::uint32_t hashtag;
};

/// Draws one past use with probability proportional to kernel(age), age in
/// hours floored at 1. With the power-law kernel max(age, 1)^-decay summed
/// per hashtag is exp(B), the base-level activation.
template <typename Histories, typename Kernel>
std::int64_t draw_by_recency(Rng& rng, const Histories& histories, double now_hours, Kernel&& kernel,
                             std::vector<double>& scratch, std::vector<std::uint32_t>& tags) {
  scratch.clear();
  tags.clear();
  double total = 0;
  for (const std::vector<PastUse>* h : histories) {
    for (const PastUse& p : *h) {
      double age = std::max(now_hours - p.hours, 1.0);
      total += kernel(age);
      scratch.push_back(total);
      tags.push_back(p.hashtag);
    }
  }
  if (scratch.empty()) return -1;
  double target = rng.uniform() * total;
  auto it = std::upper_bound(scratch.begin(), scratch.end(), target);
  if (it == scratch.end()) --it;
  return tags[static_cast<std::size_t>(it - scratch.begin())];
}

inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

/// Simulates a follower network whose users tweet hashtags by reusing their
/// own past hashtags, reusing their followees' hashtags, or introducing brand
/// new ones. Reuse picks a past assignment with weight age^-decay (age in
/// hours, floored at one hour). Output is a pure function of `params`.
inline Corpus generate_synthetic(const GeneratorParams& params) {
  params.validate();
  Rng rng(params.seed);
  auto vocab = std::make_shared<Vocabulary>();
  const std::size_t n = params.users;
  for (std::size_t u = 0; u < n; ++u) vocab->users.intern("u" + std::to_string(u));

  std::vector<std::vector<UserId>> followees(n);
  const std::size_t degree = std::min(params.followee_degree, n - 1);
  for (std::size_t u = 0; u < n; ++u) {
    auto& f = followees[u];
    while (f.size() < degree) {
      auto v = static_cast<std::uint32_t>(rng.below(n));
      if (v == u || std::find(f.begin(), f.end(), UserId(v)) != f.end()) continue;
      f.push_back(UserId(v));
    }
  }

  std::vector<UserId> seeds;
  const std::size_t n_seeds = params.seed_users == 0 ? n : std::min(params.seed_users, n);
  for (std::size_t u = 0; u < n_seeds; ++u) seeds.push_back(UserId(static_cast<std::uint32_t>(u)));

  const double social_decay = params.social_decay < 0 ? params.decay : params.social_decay;
  auto kernel_for = [&](double decay) {
    return [&params, decay](double age) {
      if (params.kernel == ReuseKernel::Exponential) return std::exp(-age / params.exponential_scale_hours);
      return std::exp(-decay * std::log(age));
    };
  };
  const auto own_kernel = kernel_for(params.decay);
  const auto social_kernel = kernel_for(social_decay);
  const double global_gap_s = params.mean_user_gap_hours * kSecondsPerHour / static_cast<double>(n);

  std::vector<std::vector<detail::PastUse>> history(n);
  std::vector<const std::vector<detail::PastUse>*> sources;
  std::vector<double> scratch;
  std::vector<std::uint32_t> tags;
  std::vector<Tweet> tweets;
  std::vector<std::vector<std::uint32_t>> topics;  // per-hashtag text terms

  auto topic_of = [&](std::uint32_t h) -> const std::vector<std::uint32_t>& {
    while (topics.size() <= h) {
      Rng trng(detail::mix64(params.seed ^ detail::mix64(topics.size())));
      std::vector<std::uint32_t> terms;
      for (std::size_t i = 0; i < params.topic_terms; ++i)
        terms.push_back(static_cast<std::uint32_t>(trng.below(params.vocabulary_size)));
      topics.push_back(std::move(terms));
    }
    return topics[h];
  };

  Timestamp now = params.start;
  std::size_t emitted = 0;
  while (emitted < params.events) {
    now += std::max<Timestamp>(1, static_cast<Timestamp>(std::llround(rng.exponential(global_gap_s))));
    const double now_h = static_cast<double>(now - params.start) / kSecondsPerHour;
    const auto u = static_cast<std::uint32_t>(rng.below(n));
    const std::size_t slots = 1 + static_cast<std::size_t>(rng.below(params.max_hashtags_per_tweet));

    std::vector<std::uint32_t> chosen;
    for (std::size_t s = 0; s < slots && emitted + chosen.size() < params.events; ++s) {
      std::int64_t pick = -1;
      bool resolved = false;
      for (int attempt = 0; attempt < 4 && !resolved; ++attempt) {
        const double r = rng.uniform();
        pick = -1;
        if (r < params.w_individual) {
          sources.assign(1, &history[u]);
          pick = detail::draw_by_recency(rng, sources, now_h, own_kernel, scratch, tags);
        } else if (r < params.w_individual + params.w_social) {
          sources.clear();
          for (UserId f : followees[u]) sources.push_back(&history[f.value]);
          pick = detail::draw_by_recency(rng, sources, now_h, social_kernel, scratch, tags);
        }
        // A reuse that repeats a hashtag already in this tweet is redrawn.
        resolved = pick < 0 || std::find(chosen.begin(), chosen.end(),
                                         static_cast<std::uint32_t>(pick)) == chosen.end();
      }
      if (!resolved) continue;
      if (pick < 0) {  // external, or nothing to reuse yet
        pick = static_cast<std::int64_t>(vocab->hashtags.size());
        vocab->hashtags.intern("t" + std::to_string(pick));
      }
      chosen.push_back(static_cast<std::uint32_t>(pick));
    }
    if (chosen.empty()) continue;

    Tweet t;
    t.id = vocab->tweets.intern("tw" + std::to_string(tweets.size()));
    t.author = UserId(u);
    t.timestamp = now;
    t.is_retweet = params.retweet_probability > 0 && rng.uniform() < params.retweet_probability;
    std::string text;
    if (t.is_retweet) {
      text = "RT @u" + std::to_string(followees[u].empty() ? u : followees[u][0].value) + " ";
    }
    if (params.generate_text) {
      for (std::uint32_t h : chosen) {
        const auto& topic = topic_of(h);
        for (std::size_t i = 0; i < params.terms_per_hashtag; ++i)
          text += "w" + std::to_string(topic[rng.below(topic.size())]) + " ";
      }
      for (std::size_t i = 0; i < params.noise_terms; ++i)
        text += "w" + std::to_string(rng.below(params.vocabulary_size)) + " ";
    }
    for (std::size_t i = 0; i < chosen.size(); ++i) {
      text += "#t" + std::to_string(chosen[i]);
      if (i + 1 < chosen.size()) text += ' ';
      t.hashtags.push_back(HashtagId(chosen[i]));
      history[u].push_back({now_h, chosen[i]});
    }
    t.text = std::move(text);
    emitted += chosen.size();
    tweets.push_back(std::move(t));
  }

  return Corpus(std::move(vocab), std::move(followees), std::move(seeds), std::move(tweets));
}

}  // namespace hashrec
