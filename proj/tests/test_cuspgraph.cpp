#include <anosovlab/cuspgraph.hpp>

#include <gtest/gtest.h>

#include <deque>
#include <map>
#include <random>

using namespace anosovlab;
using namespace anosovlab::cuspgraph;

namespace {

HoroballGraph z_graph(std::int64_t r, int depth) { return HoroballGraph({BaseGroup::Z, r}, depth); }
HoroballGraph z2_graph(std::int64_t r, int depth) { return HoroballGraph({BaseGroup::Z2, r}, depth); }

// plain BFS over the neighbor generator with an ordered-map visited set
std::int64_t naive_bfs(const HoroballGraph& h, const Vertex& u, const Vertex& v) {
  auto key = [](const Vertex& x) { return std::tuple(x.g[0], x.g[1], x.level); };
  std::map<std::tuple<std::int64_t, std::int64_t, int>, std::int64_t> seen{{key(u), 0}};
  std::deque<Vertex> q{u};
  while (!q.empty()) {
    const Vertex x = q.front();
    q.pop_front();
    const std::int64_t d = seen[key(x)];
    if (x == v) return d;
    for (const auto& y : h.neighbors(x))
      if (seen.emplace(key(y), d + 1).second) q.push_back(y);
  }
  return -1;
}

}  // namespace

TEST(BaseGroupBall, WordLengthMatchesCayleyBfs) {
  for (auto grp : {BaseGroup::Z, BaseGroup::Z2}) {
    const BaseGroupBall ball{grp, 64};
    EXPECT_EQ(ball.word_length({0, 0}), 0);
    std::map<Elem, std::int64_t> dist{{Elem{0, 0}, 0}};
    std::deque<Elem> q{Elem{0, 0}};
    while (!q.empty()) {
      const Elem x = q.front();
      q.pop_front();
      for (const auto& s : ball.generators()) {
        const Elem y{x[0] + s[0], x[1] + s[1]};
        if (!ball.contains(y) || dist.count(y)) continue;
        dist[y] = dist[x] + 1;
        q.push_back(y);
      }
    }
    for (const auto& [e, d] : dist) ASSERT_EQ(ball.word_length(e), d);
    EXPECT_EQ(dist.size(), grp == BaseGroup::Z ? 129u : 2u * 64 * 65 + 1);
    // symmetric generating set
    for (const auto& s : ball.generators()) {
      const Elem inv{-s[0], -s[1]};
      EXPECT_NE(std::find(ball.generators().begin(), ball.generators().end(), inv), ball.generators().end());
    }
  }
}

TEST(Horoball, NeighborExamples) {
  const auto h = z_graph(4, 2);
  std::vector<Elem> horiz;
  for (const auto& w : h.neighbors({{0, 0}, 2}))
    if (w.level == 2) horiz.push_back(w.g);
  std::sort(horiz.begin(), horiz.end());
  EXPECT_EQ(horiz, (std::vector<Elem>{{-2, 0}, {-1, 0}, {1, 0}, {2, 0}}));

  const auto h1 = z2_graph(3, 1);
  for (const auto& w : h1.neighbors({{1, 1}, 1})) EXPECT_EQ(h1.base().word_length(difference({1, 1}, w.g)), 1);
  EXPECT_EQ(h1.neighbors({{1, 1}, 1}).size(), 4u);
}

TEST(Horoball, NeighborSymmetryAndEdgePredicate) {
  const auto h = z2_graph(6, 4);
  for (int lvl = 1; lvl <= 4; ++lvl)
    for (std::int64_t x = -3; x <= 3; ++x)
      for (std::int64_t y = -3; y <= 3; ++y) {
        const Vertex v{{x, y}, lvl};
        for (const auto& w : h.neighbors(v)) {
          EXPECT_TRUE(h.adjacent(v, w));
          const auto back = h.neighbors(w);
          EXPECT_NE(std::find(back.begin(), back.end(), v), back.end());
        }
        if (lvl < 4) EXPECT_TRUE(h.adjacent(v, {{x, y}, lvl + 1}));
      }
}

TEST(Horoball, Errors) {
  EXPECT_THROW(z_graph(4, 0), Error);
  try {
    z_graph(4, 63);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DepthOverflow);
  }
  const auto h = z_graph(4, 3);
  try {
    bfs_distance(h, {{0, 0}, 1}, {{5, 0}, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::VertexOutOfRange);
  }
}

TEST(Bfs, Examples) {
  const auto h = z_graph(64, 10);
  EXPECT_EQ(bfs_distance(h, {{3, 0}, 2}, {{3, 0}, 2}).distance, 0);
  EXPECT_EQ(bfs_distance(h, {{0, 0}, 1}, {{1, 0}, 1}).distance, 1);
  const auto far = bfs_distance(h, {{0, 0}, 1}, {{16, 0}, 1});
  EXPECT_GE(far.distance, 2 * 4 - 4);
  EXPECT_LE(far.distance, 2 * 4 + 4);
  EXPECT_FALSE(far.may_be_overestimate);
}

TEST(Bfs, AgreesWithNaiveBfs) {
  std::mt19937_64 rng(1);
  for (auto grp : {BaseGroup::Z, BaseGroup::Z2}) {
    const HoroballGraph h({grp, 12}, 5);
    std::uniform_int_distribution<std::int64_t> c(-6, 6);
    std::uniform_int_distribution<int> l(1, 5);
    for (int t = 0; t < 60; ++t) {
      const Vertex u{{c(rng), grp == BaseGroup::Z ? 0 : c(rng)}, l(rng)};
      const Vertex v{{c(rng), grp == BaseGroup::Z ? 0 : c(rng)}, l(rng)};
      EXPECT_EQ(bfs_distance(h, u, v).distance, naive_bfs(h, u, v));
    }
  }
}

TEST(Fast, Examples) {
  const auto h = z2_graph(1 << 12, 16);
  EXPECT_EQ(horoball_distance_fast(h, {{0, 0}, 1}, {{0, 0}, 5}), 4);
  for (int n = 1; n <= 12; ++n)
    EXPECT_EQ(horoball_distance_fast(h, {{0, 0}, n}, {{std::int64_t{1} << (n - 1), 0}, n}), 1);
  for (int k = 1; k <= 12; ++k)
    for (int n = 1; n <= k; ++n)
      EXPECT_GE(horoball_distance_fast(h, {{0, 0}, n}, {{0, std::int64_t{1} << k}, n}), 2 * k - 2 * n - 2);
}

TEST(Fast, EqualsBfsOnZBall) {
  // all same-level pairs at level 1 against a single-source sweep
  const auto h = z_graph(1024, 14);
  BfsOracle oracle(h);
  oracle.from({{-1024, 0}, 1});
  for (std::int64_t x = -1024; x <= 1024; ++x) {
    const Vertex v{{x, 0}, 1};
    if (oracle.may_be_overestimate(v)) continue;
    ASSERT_EQ(horoball_distance_fast(h, {{-1024, 0}, 1}, v), oracle.distance_to(v)) << x;
  }
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<std::int64_t> c(-1024, 1024);
  for (int t = 0; t < 200; ++t) {
    const Vertex u{{c(rng), 0}, 1}, v{{c(rng), 0}, 1};
    const auto b = bfs_distance(h, u, v);
    if (!b.may_be_overestimate) EXPECT_EQ(horoball_distance_fast(h, u, v), b.distance);
  }
}

TEST(Fast, MetricAndMonotone) {
  const auto h = z2_graph(1 << 10, 14);
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::int64_t> c(-300, 300);
  std::uniform_int_distribution<int> l(1, 8);
  for (int t = 0; t < 2000; ++t) {
    const Vertex a{{c(rng), c(rng)}, l(rng)}, b{{c(rng), c(rng)}, l(rng)}, d{{c(rng), c(rng)}, l(rng)};
    const auto ab = horoball_distance_fast(h, a, b);
    EXPECT_EQ(ab, horoball_distance_fast(h, b, a));
    EXPECT_LE(horoball_distance_fast(h, a, d), ab + horoball_distance_fast(h, b, d));
    EXPECT_EQ(horoball_distance_fast(h, a, a), 0);
  }
  for (int t = 0; t < 100; ++t) {
    const Elem g{c(rng), c(rng)};
    std::int64_t prev = std::numeric_limits<std::int64_t>::max();
    for (int n = 1; n <= 10; ++n) {
      const auto d = horoball_distance_fast(h, {{0, 0}, n}, {g, n});
      EXPECT_LE(d, prev);
      prev = d;
    }
  }
}

TEST(Shape, Examples) {
  const auto h = z2_graph(1 << 8, 12);
  const auto adj = geodesic_shape(h, {{0, 0}, 1}, {{1, 0}, 1});
  EXPECT_EQ(adj.m_up, 0);
  EXPECT_EQ(adj.horizontal, 1);
  EXPECT_EQ(adj.m_down, 0);

  const auto vert = geodesic_shape(h, {{0, 0}, 1}, {{0, 0}, 5});
  EXPECT_EQ(vert.m_up + vert.m_down, 4);
  EXPECT_EQ(vert.horizontal, 0);
  EXPECT_EQ(vert.total, 4);

  const auto far = geodesic_shape(h, {{0, 0}, 2}, {{200, 37}, 2});
  EXPECT_EQ(far.m_up, far.m_down);
  EXPECT_LE(far.horizontal, 3);
  EXPECT_EQ(far.total, horoball_distance_fast(h, {{0, 0}, 2}, {{200, 37}, 2}));
  // witness is a path of that length
  ASSERT_EQ(far.path.size(), static_cast<std::size_t>(far.total + 1));
  for (std::size_t i = 0; i + 1 < far.path.size(); ++i) EXPECT_TRUE(h.adjacent(far.path[i], far.path[i + 1]));

  // needs a level beyond the truncation
  const auto shallow = z2_graph(1 << 8, 2);
  try {
    geodesic_shape(shallow, {{0, 0}, 1}, {{200, 0}, 1}, 8);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TruncationTooShallow);
  }
}

TEST(Shape, AgreesWithBfsOnSmallBall) {
  const auto h = z_graph(256, 10);
  for (std::int64_t x = 1; x <= 256; x += 7) {
    const Vertex u{{0, 0}, 1}, v{{x, 0}, 1};
    const auto b = bfs_distance(h, u, v);
    const auto s = geodesic_shape(h, u, v, b.distance);
    EXPECT_EQ(s.total, b.distance);
    EXPECT_EQ(s.m_up, s.m_down);
    EXPECT_LE(s.horizontal, 3);
  }
}
