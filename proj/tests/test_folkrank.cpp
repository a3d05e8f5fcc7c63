#include <array>
#include <cmath>

#include <gtest/gtest.h>

#include "fixture.hpp"
#include "hashrec/folkrank.hpp"

using namespace hashrec;
using namespace hashrec::testing;

namespace {

// 2 users, 3 tweets, 3 hashtags: 8 nodes.
Corpus eight_node(CorpusBuilder& b) {
  b.hashtags({"x", "y", "z"});
  b.tweet("u", 0, "#x #y").tweet("u", 1, "#y").tweet("v", 2, "#y #z");
  return b.build();
}

using Matrix = std::array<std::array<double, 8>, 8>;

/// Dense reference: explicit adjacency, column-stochastic transition, plain
/// power iteration.
std::array<double, 8> dense_spread(const Matrix& adj, const std::array<double, 8>& pref, double d, int iters) {
  std::array<double, 8> deg{};
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) deg[i] += adj[i][j];
  std::array<double, 8> w;
  w.fill(1.0 / 8);
  for (int it = 0; it < iters; ++it) {
    std::array<double, 8> next{};
    for (int j = 0; j < 8; ++j) {
      double s = 0;
      for (int i = 0; i < 8; ++i)
        if (deg[i] > 0) s += adj[i][j] / deg[i] * w[i];
      next[j] = d * pref[j] + (1 - d) * s;
    }
    w = next;
  }
  return w;
}

}  // namespace

TEST(FolkRank, GraphLayoutAndWeights) {
  CorpusBuilder b;
  Corpus c = eight_node(b);
  FolkGraph g = FolkGraph::build(c.events());
  EXPECT_EQ(g.size(), 8u);
  EXPECT_EQ(g.users().size(), 2u);
  EXPECT_EQ(g.tweets().size(), 3u);
  EXPECT_EQ(g.hashtags().size(), 3u);
  EXPECT_EQ(*g.node_of(b.id("u")), 0u);
  EXPECT_EQ(*g.node_of(b.tag("x")), 5u);
}

TEST(FolkRank, MatchesDenseOracle) {
  CorpusBuilder b;
  Corpus c = eight_node(b);
  FolkGraph g = FolkGraph::build(c.events());

  // Nodes: u0 v1 | t0=2 t1=3 t2=4 | x5 y6 z7
  Matrix adj{};
  auto link = [&](int a, int b2) {
    adj[a][b2] += 1;
    adj[b2][a] += 1;
  };
  struct Assignment {
    int user, tweet, tag;
  };
  for (auto [u, t, h] : {Assignment{0, 2, 5}, Assignment{0, 2, 6}, Assignment{0, 3, 6}, Assignment{1, 4, 6},
                         Assignment{1, 4, 7}}) {
    link(u, t);
    link(t, h);
    link(u, h);
  }

  for (double d : {0.0, 0.3, 0.7, 1.0}) {
    for (int iters : {1, 10, 50}) {
      auto uniform_pref = g.uniform_preference();
      auto user_pref = g.user_preference(0);
      std::array<double, 8> up, bp;
      for (int i = 0; i < 8; ++i) {
        up[i] = uniform_pref[i];
        bp[i] = user_pref[i];
      }
      auto expect_u = dense_spread(adj, up, d, iters);
      auto expect_b = dense_spread(adj, bp, d, iters);
      auto got_u = g.spread(uniform_pref, d, static_cast<std::size_t>(iters));
      auto got_b = g.spread(user_pref, d, static_cast<std::size_t>(iters));
      for (int i = 0; i < 8; ++i) {
        EXPECT_NEAR(got_u[i], expect_u[i], 1e-9);
        EXPECT_NEAR(got_b[i], expect_b[i], 1e-9);
      }
    }
  }
}

TEST(FolkRank, PreferenceVector) {
  CorpusBuilder b;
  Corpus c = eight_node(b);
  FolkGraph g = FolkGraph::build(c.events());
  auto p = g.user_preference(1);
  double sum = 0;
  for (double x : p) sum += x;
  EXPECT_NEAR(sum, 1.0, 1e-15);
  EXPECT_GT(p[1], p[0]);
}

TEST(FolkRank, ZeroDampingGivesZeroScores) {
  CorpusBuilder b;
  Corpus c = eight_node(b);
  RecommenderConfig cfg;
  cfg.folkrank_d = 0;
  auto list = folkrank(c, b.id("u"), at_hours(10), cfg);
  ASSERT_FALSE(list.empty());
  for (const auto& s : list) EXPECT_EQ(s.score, 0.0);
}

TEST(FolkRank, SymmetricUsersSwapScores) {
  CorpusBuilder b;
  b.hashtags({"p", "q"});
  b.tweet("a", 0, "#p").tweet("b", 0, "#q");
  Corpus c = b.build();
  RecommenderConfig cfg;
  auto ra = folkrank(c, b.id("a"), at_hours(1), cfg);
  auto rb = folkrank(c, b.id("b"), at_hours(1), cfg);
  ASSERT_EQ(ra.size(), 2u);
  ASSERT_EQ(rb.size(), 2u);
  EXPECT_EQ(ra[0].hashtag, b.tag("p"));
  EXPECT_EQ(rb[0].hashtag, b.tag("q"));
  EXPECT_NEAR(ra[0].score, rb[0].score, 1e-15);
  EXPECT_NEAR(ra[1].score, rb[1].score, 1e-15);
}

TEST(FolkRank, UnknownOrFutureUserIsEmpty) {
  CorpusBuilder b;
  Corpus c = eight_node(b);
  RecommenderConfig cfg;
  EXPECT_TRUE(folkrank(c, b.id("v"), at_hours(1), cfg).empty());
}
