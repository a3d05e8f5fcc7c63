#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "hashrec/ids.hpp"

namespace hashrec {

/// Lowercased, '#'-stripped hashtags of a tweet text in order of first
/// appearance. A tag token ends at the first character outside [a-z0-9_].
inline std::vector<std::string> extract_hashtags(std::string_view text) {
  std::vector<std::string> tags;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t begin = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::string_view token = text.substr(begin, i - begin);
    if (token.size() < 2 || token.front() != '#') continue;

    std::string tag;
    for (char raw : token.substr(1)) {
      char c = static_cast<char>(std::tolower(static_cast<unsigned char>(raw)));
      bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
      if (!ok) break;
      tag.push_back(c);
    }
    if (!tag.empty() && std::find(tags.begin(), tags.end(), tag) == tags.end())
      tags.push_back(std::move(tag));
  }
  return tags;
}

/// Retweet fallback when the input carries no explicit flag.
inline bool looks_like_retweet(std::string_view text) { return text.starts_with("RT @"); }

struct Tweet {
  TweetId id;
  UserId author;
  Timestamp timestamp = 0;
  std::string text;
  std::vector<HashtagId> hashtags;
  bool is_retweet = false;
};

/// One hashtag assignment: a single (tweet, hashtag) occurrence.
struct UsageEvent {
  UserId user;
  HashtagId hashtag;
  TweetId tweet;
  Timestamp timestamp = 0;
};

/// Name tables shared between a corpus and every view derived from it.
struct Vocabulary {
  Interner<UserId> users;
  Interner<HashtagId> hashtags;
  Interner<TweetId> tweets;
};

struct CorpusStats {
  std::size_t seed_users = 0;   // |U_S|
  std::size_t followees = 0;    // |F|, summed over seed users
  std::size_t users = 0;        // |U|
  std::size_t tweets = 0;       // |T|
  std::size_t hashtags = 0;     // |HT|, distinct hashtags actually used
  std::size_t assignments = 0;  // |HTAS|
};

/// Immutable snapshot of users, follow graph and hashtagged tweets.
///
/// Tweets are kept sorted by (timestamp, tweet id) and every tweet contributes
/// one UsageEvent per distinct hashtag. Per-user and per-hashtag event lists
/// are materialized at construction, each in timestamp order, so "usage before
/// a reference time" is a binary search.
class Corpus {
 public:
  Corpus() : vocab_(std::make_shared<const Vocabulary>()) {}

  /// `followees[u]` lists the users u follows. Self-loops and duplicates are
  /// dropped. Tweets without hashtags are dropped.
  Corpus(std::shared_ptr<const Vocabulary> vocab, std::vector<std::vector<UserId>> followees,
         std::vector<UserId> seeds, std::vector<Tweet> tweets)
      : vocab_(std::move(vocab)), followees_(std::move(followees)), seeds_(std::move(seeds)) {
    const std::size_t n_users = vocab_->users.size();
    followees_.resize(n_users);
    for (std::size_t u = 0; u < n_users; ++u) {
      auto& f = followees_[u];
      std::erase_if(f, [&](UserId v) { return v.value == u || v.value >= n_users; });
      std::sort(f.begin(), f.end());
      f.erase(std::unique(f.begin(), f.end()), f.end());
    }
    std::sort(seeds_.begin(), seeds_.end());
    seeds_.erase(std::unique(seeds_.begin(), seeds_.end()), seeds_.end());
    is_seed_.assign(n_users, false);
    for (UserId s : seeds_) {
      if (s.value >= n_users) throw std::invalid_argument("seed user outside the user set");
      is_seed_[s.value] = true;
    }

    std::erase_if(tweets, [](const Tweet& t) { return t.hashtags.empty(); });
    std::sort(tweets.begin(), tweets.end(), [](const Tweet& a, const Tweet& b) {
      return std::pair(a.timestamp, a.id) < std::pair(b.timestamp, b.id);
    });
    tweets_ = std::move(tweets);

    tweet_pos_.assign(vocab_->tweets.size(), -1);
    tweets_by_user_.resize(n_users);
    by_user_.resize(n_users);
    by_hashtag_.resize(vocab_->hashtags.size());
    first_use_.resize(n_users);
    std::vector<std::unordered_set<std::uint32_t>> seen(n_users);

    for (std::size_t pos = 0; pos < tweets_.size(); ++pos) {
      Tweet& t = tweets_[pos];
      if (t.timestamp <= 0) throw std::invalid_argument("tweet timestamp must be positive");
      if (t.id.value >= tweet_pos_.size() || t.author.value >= n_users)
        throw std::invalid_argument("tweet refers to an id outside the vocabulary");
      if (tweet_pos_[t.id.value] >= 0) throw std::invalid_argument("duplicate tweet id");
      tweet_pos_[t.id.value] = static_cast<std::int64_t>(pos);
      tweets_by_user_[t.author.value].push_back(static_cast<std::uint32_t>(pos));

      std::vector<HashtagId> unique_tags;
      for (HashtagId h : t.hashtags)
        if (std::find(unique_tags.begin(), unique_tags.end(), h) == unique_tags.end())
          unique_tags.push_back(h);
      t.hashtags = std::move(unique_tags);

      for (HashtagId h : t.hashtags) {
        if (h.value >= by_hashtag_.size())
          throw std::invalid_argument("hashtag outside the vocabulary");
        auto idx = static_cast<std::uint32_t>(events_.size());
        events_.push_back({t.author, h, t.id, t.timestamp});
        by_user_[t.author.value].push_back(idx);
        by_hashtag_[h.value].push_back(idx);
        if (seen[t.author.value].insert(h.value).second)
          first_use_[t.author.value].push_back(t.timestamp);
      }
    }
  }

  [[nodiscard]] const Vocabulary& vocabulary() const { return *vocab_; }
  [[nodiscard]] const std::shared_ptr<const Vocabulary>& shared_vocabulary() const { return vocab_; }

  [[nodiscard]] std::size_t user_count() const { return vocab_->users.size(); }
  [[nodiscard]] std::span<const UserId> seed_users() const { return seeds_; }
  [[nodiscard]] bool is_seed(UserId u) const { return is_seed_.at(u.value); }
  [[nodiscard]] std::span<const UserId> followees(UserId u) const { return followees_.at(u.value); }
  [[nodiscard]] const std::vector<std::vector<UserId>>& follow_graph() const { return followees_; }
  [[nodiscard]] bool follows(UserId u, UserId v) const {
    const auto& f = followees_.at(u.value);
    return std::binary_search(f.begin(), f.end(), v);
  }

  [[nodiscard]] std::span<const Tweet> tweets() const { return tweets_; }
  [[nodiscard]] std::span<const UsageEvent> events() const { return events_; }
  [[nodiscard]] const Tweet* find_tweet(TweetId id) const {
    if (id.value >= tweet_pos_.size() || tweet_pos_[id.value] < 0) return nullptr;
    return &tweets_[static_cast<std::size_t>(tweet_pos_[id.value])];
  }

  /// Positions into tweets(), oldest first.
  [[nodiscard]] std::span<const std::uint32_t> tweets_of(UserId u) const {
    return tweets_by_user_.at(u.value);
  }
  /// Indices into events(), oldest first.
  [[nodiscard]] std::span<const std::uint32_t> events_of_user(UserId u) const {
    return by_user_.at(u.value);
  }
  [[nodiscard]] std::span<const std::uint32_t> events_of_hashtag(HashtagId h) const {
    return by_hashtag_.at(h.value);
  }

  /// Prefix of `list` whose events happened strictly before `ts_ref`.
  [[nodiscard]] std::span<const std::uint32_t> before(std::span<const std::uint32_t> list,
                                                      Timestamp ts_ref) const {
    auto it = std::partition_point(list.begin(), list.end(), [&](std::uint32_t e) {
      return events_[e].timestamp < ts_ref;
    });
    return list.first(static_cast<std::size_t>(it - list.begin()));
  }
  [[nodiscard]] std::span<const UsageEvent> events_before(Timestamp ts_ref) const {
    auto it = std::partition_point(events_.begin(), events_.end(),
                                   [&](const UsageEvent& e) { return e.timestamp < ts_ref; });
    return std::span<const UsageEvent>(events_).first(static_cast<std::size_t>(it - events_.begin()));
  }

  /// Number of distinct hashtags `u` used strictly before `ts_ref`.
  [[nodiscard]] std::size_t profile_size(UserId u, Timestamp ts_ref) const {
    const auto& f = first_use_.at(u.value);
    return static_cast<std::size_t>(std::lower_bound(f.begin(), f.end(), ts_ref) - f.begin());
  }

  [[nodiscard]] Timestamp latest_timestamp() const {
    return tweets_.empty() ? 0 : tweets_.back().timestamp;
  }

  [[nodiscard]] CorpusStats stats() const {
    CorpusStats s;
    s.seed_users = seeds_.size();
    for (UserId u : seeds_) s.followees += followees_[u.value].size();
    s.users = user_count();
    s.tweets = tweets_.size();
    s.assignments = events_.size();
    for (const auto& list : by_hashtag_) s.hashtags += list.empty() ? 0 : 1;
    return s;
  }

  /// Same users, graph and vocabulary, restricted to tweets accepted by `keep`.
  template <typename Pred>
  [[nodiscard]] Corpus filtered(Pred keep) const {
    std::vector<Tweet> kept;
    for (const Tweet& t : tweets_)
      if (keep(t)) kept.push_back(t);
    return Corpus(vocab_, followees_, seeds_, std::move(kept));
  }

 private:
  std::shared_ptr<const Vocabulary> vocab_;
  std::vector<std::vector<UserId>> followees_;
  std::vector<UserId> seeds_;
  std::vector<bool> is_seed_;
  std::vector<Tweet> tweets_;
  std::vector<UsageEvent> events_;
  std::vector<std::int64_t> tweet_pos_;
  std::vector<std::vector<std::uint32_t>> tweets_by_user_;
  std::vector<std::vector<std::uint32_t>> by_user_;
  std::vector<std::vector<std::uint32_t>> by_hashtag_;
  std::vector<std::vector<Timestamp>> first_use_;
};

// ---------------------------------------------------------------------------
// Usage types

enum class UsageType { Individual, Social, IndividualSocial, Network, External };

inline constexpr std::array<UsageType, 5> kAllUsageTypes = {
    UsageType::Individual, UsageType::Social, UsageType::IndividualSocial, UsageType::Network,
    UsageType::External};

inline std::string_view to_string(UsageType t) {
  switch (t) {
    case UsageType::Individual: return "individual";
    case UsageType::Social: return "social";
    case UsageType::IndividualSocial: return "individual_social";
    case UsageType::Network: return "network";
    case UsageType::External: return "external";
  }
  return "unknown";
}

namespace detail {
inline UsageType usage_label(bool individual, bool social, bool network) {
  if (individual && social) return UsageType::IndividualSocial;
  if (individual) return UsageType::Individual;
  if (social) return UsageType::Social;
  if (network) return UsageType::Network;
  return UsageType::External;
}
}  // namespace detail

/// Label of one assignment, judged from strictly earlier uses of its hashtag.
/// The network check covers users other than the author and the author's followees.
inline UsageType classify_usage_type(const UsageEvent& event, const Corpus& corpus) {
  bool individual = false, social = false, network = false;
  for (std::uint32_t idx : corpus.before(corpus.events_of_hashtag(event.hashtag), event.timestamp)) {
    UserId v = corpus.events()[idx].user;
    if (v == event.user)
      individual = true;
    else if (corpus.follows(event.user, v))
      social = true;
    else
      network = true;
  }
  return detail::usage_label(individual, social, network);
}

/// Labels for every event of the corpus, index-aligned with corpus.events().
/// One sweep per hashtag; events sharing a timestamp never see each other.
inline std::vector<UsageType> classify_all(const Corpus& corpus) {
  auto events = corpus.events();
  std::vector<UsageType> labels(events.size(), UsageType::External);
  std::vector<std::uint8_t> used(corpus.user_count(), 0);
  for (std::size_t h = 0; h < corpus.vocabulary().hashtags.size(); ++h) {
    auto list = corpus.events_of_hashtag(HashtagId(static_cast<std::uint32_t>(h)));
    std::vector<UserId> prior;  // users with a strictly earlier use
    std::size_t i = 0;
    while (i < list.size()) {
      std::size_t j = i;
      Timestamp ts = events[list[i]].timestamp;
      while (j < list.size() && events[list[j]].timestamp == ts) ++j;
      for (std::size_t k = i; k < j; ++k) {
        UserId u = events[list[k]].user;
        bool individual = used[u.value] != 0;
        std::size_t social_hits = 0;
        auto fol = corpus.followees(u);
        if (fol.size() < prior.size()) {
          for (UserId f : fol) social_hits += used[f.value];
        } else {
          for (UserId v : prior) social_hits += corpus.follows(u, v) ? 1 : 0;
        }
        std::size_t others = prior.size() - (individual ? 1 : 0) - social_hits;
        labels[list[k]] = detail::usage_label(individual, social_hits > 0, others > 0);
      }
      for (std::size_t k = i; k < j; ++k) {
        UserId u = events[list[k]].user;
        if (!used[u.value]) {
          used[u.value] = 1;
          prior.push_back(u);
        }
      }
      i = j;
    }
    for (UserId u : prior) used[u.value] = 0;
  }
  return labels;
}

// ---------------------------------------------------------------------------
// Leave-one-out split

enum class Scenario { WithoutText = 1, WithText = 2 };

struct TestEntry {
  UserId user;
  Tweet tweet;
};

struct Split {
  Corpus train;
  std::vector<TestEntry> test;
};

/// Holds out the most recent tweet of every seed user with at least two
/// tweets. Users whose latest timestamp is shared by two of their tweets have
/// no strictly most recent tweet and are skipped. The train corpus is the same
/// for both scenarios; the text scenario additionally drops retweet entries.
inline Split leave_one_out_split(const Corpus& corpus, Scenario scenario) {
  std::vector<TestEntry> test;
  std::unordered_set<TweetId> held_out;
  auto tweets = corpus.tweets();
  for (UserId u : corpus.seed_users()) {
    auto mine = corpus.tweets_of(u);
    if (mine.size() < 2) continue;
    const Tweet& last = tweets[mine.back()];
    if (tweets[mine[mine.size() - 2]].timestamp == last.timestamp) continue;
    held_out.insert(last.id);
    if (scenario == Scenario::WithText && last.is_retweet) continue;
    test.push_back({u, last});
  }
  Corpus train = corpus.filtered([&](const Tweet& t) { return !held_out.contains(t.id); });
  return {std::move(train), std::move(test)};
}

}  // namespace hashrec
