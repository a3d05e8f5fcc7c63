#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include <gtest/gtest.h>

#include "fixture.hpp"
#include "hashrec/content.hpp"
#include "hashrec/random.hpp"
#include "hashrec/recommend.hpp"
#include "hashrec/synthetic.hpp"

using namespace hashrec;
using namespace hashrec::testing;

namespace {

std::string random_text(Rng& r, std::size_t words, std::size_t vocab) {
  std::string s;
  for (std::size_t i = 0; i < words; ++i) s += "w" + std::to_string(r.below(vocab)) + " ";
  s += "#h" + std::to_string(r.below(6));
  return s;
}

Corpus random_corpus(std::size_t docs, std::uint64_t seed, CorpusBuilder& b) {
  Rng r(seed);
  for (std::size_t i = 0; i < docs; ++i) b.tweet("u" + std::to_string(r.below(5)), double(i), random_text(r, 12, 15));
  return b.build();
}

}  // namespace

TEST(Tokenize, Rules) {
  EXPECT_EQ(tokenize("Big Data rocks"), (std::vector<std::string>{"big", "data", "rocks"}));
  EXPECT_EQ(tokenize("see http://x.co @bob"), (std::vector<std::string>{"see"}));
  EXPECT_EQ(tokenize("#bigdata is big data"), (std::vector<std::string>{"bigdata", "is", "big", "data"}));
  EXPECT_EQ(tokenize("a b, c-d ok!"), (std::vector<std::string>{"ok"}));
  EXPECT_EQ(strip_hashtag_tokens("so #cool and #fun"), "so and");
}

TEST(Index, DocFreqAndIdf) {
  CorpusBuilder b;
  b.tweet("u", 0, "shared alpha #a").tweet("u", 1, "shared beta #b");
  ContentIndex idx = ContentIndex::build(b.build(), 1, 1);
  EXPECT_EQ(idx.doc_freq("shared"), 2u);
  EXPECT_EQ(idx.doc_freq("alpha"), 1u);
  EXPECT_EQ(idx.idf("shared"), 0.0);
  EXPECT_NEAR(idx.idf("alpha"), std::log(2.0), 1e-15);
}

TEST(Index, SimilarityClosedForms) {
  CorpusBuilder b;
  b.tweet("u", 0, "needle #a");
  for (int i = 1; i < 10; ++i) b.tweet("u", i, "hay" + std::to_string(i) + " #b");
  ContentIndex idx = ContentIndex::build(b.build(), 1, 1);
  EXPECT_EQ(idx.total_docs(), 10u);
  EXPECT_NEAR(idx.similarity("needle", "needle"), std::log(10.0), 1e-12);
  EXPECT_NEAR(idx.similarity("needle", "needle needle"), 2 * std::log(10.0), 1e-12);
  EXPECT_EQ(idx.similarity("needle", "hay3"), 0.0);
  EXPECT_EQ(idx.similarity("", "needle"), 0.0);
}

TEST(Index, ThresholdsApplyAtScoring) {
  CorpusBuilder b;
  b.tweet("u", 0, "rare rare #a").tweet("u", 1, "rare #b").tweet("u", 2, "other #c");
  ContentIndex strict = ContentIndex::build(b.build(), 2, 1);
  EXPECT_NEAR(strict.similarity("rare", "rare rare"), 2 * std::log(1.5), 1e-12);
  EXPECT_EQ(strict.similarity("rare", "rare"), 0.0);  // tf 1 < min_tf
  CorpusBuilder b2;
  b2.tweet("u", 0, "rare rare #a").tweet("u", 1, "other #c");
  ContentIndex dfcut = ContentIndex::build(b2.build(), 1, 2);
  EXPECT_EQ(dfcut.similarity("rare", "rare rare"), 0.0);  // df 1 < min_df
}

TEST(Index, PostingsMatchRecount) {
  CorpusBuilder b;
  Corpus c = random_corpus(100, 3, b);
  ContentIndex idx = ContentIndex::build(c, 1, 1);
  std::map<std::string, std::map<TweetId, std::uint32_t>> expected;
  for (const Tweet& t : c.tweets())
    for (const auto& term : tokenize(t.text)) ++expected[term][t.id];
  ASSERT_EQ(idx.term_count(), expected.size());
  for (const auto& [term, docs] : expected) {
    const auto* list = idx.postings(term);
    ASSERT_NE(list, nullptr);
    ASSERT_EQ(list->size(), docs.size());
    for (const Posting& p : *list) EXPECT_EQ(p.tf, docs.at(idx.docs()[p.doc].tweet));
  }
}

TEST(Index, BuildIsOrderIndependent) {
  CorpusBuilder b;
  Corpus c = random_corpus(60, 4, b);
  std::vector<Tweet> shuffled(c.tweets().begin(), c.tweets().end());
  std::mt19937 rng(1);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  Corpus d(c.shared_vocabulary(), c.follow_graph(), {c.seed_users().begin(), c.seed_users().end()},
           std::move(shuffled));
  EXPECT_EQ(ContentIndex::build(c).to_json(c.vocabulary()), ContentIndex::build(d).to_json(d.vocabulary()));
}

TEST(Index, SimilarityProperties) {
  CorpusBuilder b;
  Corpus c = random_corpus(80, 5, b);
  ContentIndex idx = ContentIndex::build(c, 1, 3);
  Rng r(6);
  for (int trial = 0; trial < 100; ++trial) {
    std::string q1 = random_text(r, 3, 8);
    std::string q2;
    for (int i = 0; i < 3; ++i) q2 += "w" + std::to_string(8 + r.below(7)) + " ";
    const Tweet& cand = c.tweets()[r.below(c.tweets().size())];
    double s1 = idx.similarity(q1, cand.text), s2 = idx.similarity(q2, cand.text);
    EXPECT_GE(s1, 0);
    EXPECT_NEAR(idx.similarity(q1 + " " + q2, cand.text), s1 + s2, 1e-12);
  }
}

TEST(TopSimilar, BruteForceScan) {
  CorpusBuilder b;
  Corpus c = random_corpus(50, 8, b);
  ContentIndex idx = ContentIndex::build(c, 1, 2);
  RecommenderConfig cfg;
  cfg.s_max = 7;
  Rng r(10);
  for (int trial = 0; trial < 30; ++trial) {
    std::string q = random_text(r, 5, 15);
    std::vector<std::pair<double, TweetId>> all;
    for (const Tweet& t : c.tweets()) {
      double s = idx.similarity(q, t.text);
      if (s > 0) all.emplace_back(-s, t.id);
    }
    std::sort(all.begin(), all.end());
    if (all.size() > cfg.s_max) all.resize(cfg.s_max);
    auto res = idx.top_similar(q, cfg.s_max);
    ASSERT_EQ(res.neighbors.size(), all.size());
    std::map<HashtagId, double> cb;
    for (std::size_t i = 0; i < all.size(); ++i) {
      EXPECT_EQ(res.neighbors[i].first, all[i].second);
      EXPECT_NEAR(res.neighbors[i].second, -all[i].first, 1e-12);
      for (HashtagId h : c.find_tweet(all[i].second)->hashtags) cb[h] = std::max(cb[h], -all[i].first);
    }
    ASSERT_EQ(res.cb_scores.size(), cb.size());
    for (const Candidate& cand : res.cb_scores) EXPECT_NEAR(cand.score, cb.at(cand.hashtag), 1e-12);

    auto sr = similarity_rank(q, idx, cfg);
    for (std::size_t i = 1; i < sr.size(); ++i) EXPECT_GE(sr[i - 1].score, sr[i].score);
  }
}

TEST(TopSimilar, MaxRuleAndTruncation) {
  CorpusBuilder b;
  b.tweet("u", 0, "k1 k1 k1 #a").tweet("u", 1, "k1 k1 #a #b").tweet("u", 2, "z #c").tweet("u", 3, "zz #c");
  ContentIndex idx = ContentIndex::build(b.build(), 1, 1);
  const double w = std::log(2.0);
  auto res = idx.top_similar("k1", 20);
  ASSERT_EQ(res.neighbors.size(), 2u);
  std::map<HashtagId, double> cb;
  for (const auto& c : res.cb_scores) cb[c.hashtag] = c.score;
  EXPECT_NEAR(cb.at(b.tag("a")), 3 * w, 1e-12);
  EXPECT_NEAR(cb.at(b.tag("b")), 2 * w, 1e-12);
  auto one = idx.top_similar("k1", 1);
  ASSERT_EQ(one.cb_scores.size(), 1u);
  EXPECT_EQ(one.cb_scores[0].hashtag, b.tag("a"));
}

TEST(TopSimilar, SelfQueryRanksFirstAndEmptyQuery) {
  CorpusBuilder b;
  Corpus c = random_corpus(40, 12, b);
  ContentIndex idx = ContentIndex::build(c, 1, 1);
  const Tweet& t = c.tweets()[17];
  auto res = idx.top_similar(t.text, 5);
  ASSERT_FALSE(res.neighbors.empty());
  EXPECT_NEAR(res.neighbors[0].second, idx.similarity(t.text, t.text), 1e-12);
  RecommenderConfig cfg;
  EXPECT_TRUE(similarity_rank("", idx, cfg).empty());
}

TEST(Index, JsonRoundTrip) {
  CorpusBuilder b;
  Corpus c = random_corpus(30, 2, b);
  ContentIndex idx = ContentIndex::build(c, 2, 3);
  auto dir = scratch_dir("index");
  idx.save(dir / "index.json", c.vocabulary());
  ContentIndex back = ContentIndex::load(dir / "index.json", c.vocabulary());
  EXPECT_EQ(back.min_tf(), 2u);
  EXPECT_EQ(back.min_df(), 3u);
  EXPECT_EQ(back.to_json(c.vocabulary()), idx.to_json(c.vocabulary()));
  auto j = idx.to_json(c.vocabulary());
  j["version"] = 99;
  EXPECT_THROW(ContentIndex::from_json(nlohmann::json::parse(j.dump()), c.vocabulary()), std::runtime_error);
}

TEST(Hybrid, LambdaDegenerateCases) {
  GeneratorParams p;
  p.users = 30;
  p.events = 2000;
  Corpus c = generate_synthetic(p);
  Split split = leave_one_out_split(c, Scenario::WithText);
  ContentIndex idx = ContentIndex::build(split.train);
  RecommenderConfig personal, content;
  personal.lambda = 1;
  content.lambda = 0;
  for (const TestEntry& e : split.test) {
    const std::string q = strip_hashtag_tokens(e.tweet.text);
    const Timestamp ref = e.tweet.timestamp;
    EXPECT_EQ(bll_isc(split.train, e.user, q, ref, idx, personal), bll_is(split.train, e.user, ref, personal));
    auto hybrid = bll_isc(split.train, e.user, q, ref, idx, content);
    auto sr = similarity_rank(q, idx, content);
    ASSERT_EQ(hybrid.size(), sr.size());
    for (std::size_t i = 0; i < sr.size(); ++i) EXPECT_EQ(hybrid[i].hashtag, sr[i].hashtag);
  }
}
