#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "hashrec/corpus.hpp"

namespace hashrec::testing {

inline constexpr Timestamp kHour = 3600;
inline constexpr Timestamp kT0 = 1'500'000'000;

/// Builds small corpora by name. Hashtags come from '#' tokens in the text.
class CorpusBuilder {
 public:
  CorpusBuilder& user(const std::string& name) {
    vocab_->users.intern(name);
    return *this;
  }
  CorpusBuilder& follow(const std::string& follower, const std::string& followee) {
    edges_.emplace_back(vocab_->users.intern(follower), vocab_->users.intern(followee));
    return *this;
  }
  CorpusBuilder& seed(const std::string& name) {
    seeds_.push_back(vocab_->users.intern(name));
    return *this;
  }
  /// Tweet at kT0 + hours.
  CorpusBuilder& tweet(const std::string& author, double hours, const std::string& text, bool retweet = false) {
    Tweet t;
    t.id = vocab_->tweets.intern("t" + std::to_string(vocab_->tweets.size()));
    t.author = vocab_->users.intern(author);
    t.timestamp = kT0 + static_cast<Timestamp>(hours * static_cast<double>(kHour));
    t.text = text;
    t.is_retweet = retweet;
    for (const auto& tag : extract_hashtags(text)) t.hashtags.push_back(vocab_->hashtags.intern(tag));
    tweets_.push_back(std::move(t));
    return *this;
  }
  /// Pre-registers hashtag names so their ids follow the given order.
  CorpusBuilder& hashtags(std::initializer_list<const char*> names) {
    for (const char* n : names) vocab_->hashtags.intern(n);
    return *this;
  }

  Corpus build() {
    std::vector<std::vector<UserId>> followees(vocab_->users.size());
    for (auto [a, b] : edges_) followees[a.value].push_back(b);
    std::vector<UserId> seeds = seeds_;
    if (seeds.empty())
      for (std::size_t u = 0; u < vocab_->users.size(); ++u) seeds.push_back(UserId(static_cast<std::uint32_t>(u)));
    auto vocab = std::make_shared<const Vocabulary>(*vocab_);
    return Corpus(vocab, std::move(followees), std::move(seeds), tweets_);
  }

  HashtagId tag(const std::string& name) const { return vocab_->hashtags.at(name); }
  UserId id(const std::string& name) const { return vocab_->users.at(name); }

 private:
  std::shared_ptr<Vocabulary> vocab_ = std::make_shared<Vocabulary>();
  std::vector<std::pair<UserId, UserId>> edges_;
  std::vector<UserId> seeds_;
  std::vector<Tweet> tweets_;
};

inline Timestamp at_hours(double h) { return kT0 + static_cast<Timestamp>(h * static_cast<double>(kHour)); }

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("hashrec_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace hashrec::testing
