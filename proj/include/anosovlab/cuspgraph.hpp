#pragma once

// Combinatorial horoballs over Z and Z^2 (word metric = L1), truncated to a
// base ball of radius R and depth D. Distances by breadth-first search and
// by the up / at most three across / down template.

#include "core.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace anosovlab::cuspgraph {

enum class BaseGroup { Z, Z2 };

using Elem = std::array<std::int64_t, 2>;

struct Vertex {
  Elem g{0, 0};
  int level = 1;
  bool operator==(const Vertex&) const = default;
};

inline std::string to_string(const Vertex& v) {
  return "(" + std::to_string(v.g[0]) + "," + std::to_string(v.g[1]) + ";" + std::to_string(v.level) + ")";
}

/// Ball of radius R in the Cayley graph of Z (generator +-1) or Z^2
/// (generators +-e1, +-e2).
struct BaseGroupBall {
  BaseGroup group = BaseGroup::Z;
  std::int64_t radius = 1;

  std::int64_t word_length(const Elem& g) const {
    return group == BaseGroup::Z ? std::llabs(g[0]) : std::llabs(g[0]) + std::llabs(g[1]);
  }
  bool contains(const Elem& g) const {
    if (group == BaseGroup::Z && g[1] != 0) return false;
    return word_length(g) <= radius;
  }
  std::vector<Elem> generators() const {
    if (group == BaseGroup::Z) return {Elem{1, 0}, Elem{-1, 0}};
    return {Elem{1, 0}, Elem{-1, 0}, Elem{0, 1}, Elem{0, -1}};
  }
};

inline Elem difference(const Elem& a, const Elem& b) { return {b[0] - a[0], b[1] - a[1]}; }

/// Implicit horoball graph: vertices (g, n), 1 <= n <= D, g in the base ball.
class HoroballGraph {
 public:
  HoroballGraph(BaseGroupBall base, int depth) : base_(base), depth_(depth) {
    if (depth < 1) throw Error(ErrorCode::DegenerateInput, "depth must be >= 1");
    if (depth > 62) throw Error(ErrorCode::DepthOverflow, "2^(D-1) exceeds the 64-bit range");
    if (base.radius < 0) throw Error(ErrorCode::DegenerateInput, "negative radius");
  }

  const BaseGroupBall& base() const { return base_; }
  int depth() const { return depth_; }

  /// 2^{n-1}: base distance spanned by one horizontal edge at level n.
  static std::int64_t reach(int level) { return std::int64_t{1} << (level - 1); }

  bool in_range(const Vertex& v) const { return v.level >= 1 && v.level <= depth_ && base_.contains(v.g); }

  void require(const Vertex& v) const {
    if (!in_range(v)) throw Error(ErrorCode::VertexOutOfRange, "vertex " + to_string(v) + " outside truncation");
  }

  /// Edge predicate of the untruncated horoball.
  bool adjacent(const Vertex& u, const Vertex& v) const {
    if (u.g == v.g) return std::abs(u.level - v.level) == 1;
    if (u.level != v.level) return false;
    return base_.word_length(difference(u.g, v.g)) <= reach(u.level);
  }

  /// True when some edge of the untruncated horoball leaves the box at v.
  bool on_boundary(const Vertex& v) const {
    return v.level == depth_ || base_.word_length(v.g) + reach(v.level) > base_.radius;
  }

  /// Lazy neighbor list (vertical then horizontal, lexicographic).
  std::vector<Vertex> neighbors(const Vertex& v) const {
    require(v);
    std::vector<Vertex> out;
    if (v.level > 1) out.push_back({v.g, v.level - 1});
    if (v.level < depth_) out.push_back({v.g, v.level + 1});
    const std::int64_t r = reach(v.level), big = base_.radius;
    const std::int64_t ylo = base_.group == BaseGroup::Z ? 0 : std::max(-big, v.g[1] - r);
    const std::int64_t yhi = base_.group == BaseGroup::Z ? 0 : std::min(big, v.g[1] + r);
    for (std::int64_t y = ylo; y <= yhi; ++y) {
      const std::int64_t slack = r - std::llabs(y - v.g[1]);
      const std::int64_t row = big - std::llabs(y);
      const std::int64_t xlo = std::max(-row, v.g[0] - slack), xhi = std::min(row, v.g[0] + slack);
      for (std::int64_t x = xlo; x <= xhi; ++x) {
        const Elem w{x, y};
        if (w != v.g) out.push_back({w, v.level});
      }
    }
    return out;
  }

 private:
  BaseGroupBall base_;
  int depth_;
};

struct BfsResult {
  std::int64_t distance = 0;
  bool may_be_overestimate = false;
  std::int64_t min_boundary_distance = -1;  // -1: no boundary vertex reached
};

namespace detail {

/// Dense BFS over the truncation box. Each (level, row) keeps a
/// next-unvisited pointer so horizontal intervals are scanned once.
class DenseBfs {
 public:
  explicit DenseBfs(const HoroballGraph& h) : h_(h) {
    r_ = h.base().radius;
    rows_ = h.base().group == BaseGroup::Z ? 1 : 2 * r_ + 1;
    width_ = 2 * r_ + 2;  // includes a sentinel column
    const std::size_t n = static_cast<std::size_t>(h.depth()) * static_cast<std::size_t>(rows_ * width_);
    dist_.assign(n, -1);
    next_.resize(n);
  }

  std::size_t index(const Vertex& v) const {
    const std::int64_t row = h_.base().group == BaseGroup::Z ? 0 : v.g[1] + r_;
    return static_cast<std::size_t>(((v.level - 1) * rows_ + row) * width_ + (v.g[0] + r_));
  }

  /// Runs BFS from `src`; stops once `stop` (if any) is settled.
  void run(const Vertex& src, const std::optional<Vertex>& stop) {
    std::fill(dist_.begin(), dist_.end(), -1);
    for (std::size_t i = 0; i < next_.size(); ++i) next_[i] = static_cast<std::int64_t>(i % static_cast<std::size_t>(width_));
    min_boundary_ = -1;
    std::vector<Vertex> frontier{src}, upcoming;
    settle(src, 0);
    std::int64_t layer = 0;
    while (!frontier.empty()) {
      for (const auto& v : frontier) {
        if (min_boundary_ < 0 && h_.on_boundary(v)) min_boundary_ = layer;
      }
      if (stop && dist_[index(*stop)] >= 0) return;
      upcoming.clear();
      for (const auto& v : frontier) expand(v, layer + 1, upcoming);
      frontier.swap(upcoming);
      ++layer;
    }
  }

  std::int64_t dist(const Vertex& v) const { return dist_[index(v)]; }
  std::int64_t min_boundary() const { return min_boundary_; }

 private:
  void settle(const Vertex& v, std::int64_t d) {
    const std::size_t i = index(v);
    dist_[i] = d;
    // unlink x from its row's next-unvisited chain
    next_[i] = v.g[0] + r_ + 1;
  }

  std::int64_t find_next(std::size_t row_base, std::int64_t col) {
    std::int64_t c = col;
    while (next_[row_base + static_cast<std::size_t>(c)] != c) c = next_[row_base + static_cast<std::size_t>(c)];
    std::int64_t x = col;
    while (next_[row_base + static_cast<std::size_t>(x)] != x) {
      const std::int64_t nx = next_[row_base + static_cast<std::size_t>(x)];
      next_[row_base + static_cast<std::size_t>(x)] = c;
      x = nx;
    }
    return c;
  }

  void expand(const Vertex& v, std::int64_t d, std::vector<Vertex>& out) {
    for (int dl : {-1, 1}) {
      const Vertex w{v.g, v.level + dl};
      if (w.level < 1 || w.level > h_.depth()) continue;
      if (dist_[index(w)] < 0) {
        settle(w, d);
        out.push_back(w);
      }
    }
    const std::int64_t reach = HoroballGraph::reach(v.level);
    const bool z = h_.base().group == BaseGroup::Z;
    const std::int64_t ylo = z ? 0 : std::max(-r_, v.g[1] - reach);
    const std::int64_t yhi = z ? 0 : std::min(r_, v.g[1] + reach);
    for (std::int64_t y = ylo; y <= yhi; ++y) {
      const std::int64_t slack = reach - std::llabs(y - v.g[1]);
      const std::int64_t row = r_ - std::llabs(y);
      const std::int64_t xlo = std::max(-row, v.g[0] - slack), xhi = std::min(row, v.g[0] + slack);
      if (xlo > xhi) continue;
      const std::size_t base = index(Vertex{{-r_, y}, v.level});
      for (std::int64_t c = find_next(base, xlo + r_); c <= xhi + r_; c = find_next(base, c)) {
        const Vertex w{{c - r_, y}, v.level};
        settle(w, d);
        out.push_back(w);
      }
    }
  }

  const HoroballGraph& h_;
  std::int64_t r_ = 0, rows_ = 1, width_ = 2;
  std::vector<std::int64_t> dist_;
  std::vector<std::int64_t> next_;
  std::int64_t min_boundary_ = -1;
};

}  // namespace detail

/// Exact distance inside the truncated graph. A path that leaves the box must
/// exit and re-enter through boundary vertices, so it is at least
/// min_boundary_distance + 2 long; beyond that the truncated value may
/// overestimate the horoball distance and the flag says so.
inline BfsResult bfs_distance(const HoroballGraph& h, const Vertex& u, const Vertex& v) {
  h.require(u);
  h.require(v);
  BfsResult out;
  if (u == v) return out;
  detail::DenseBfs bfs(h);
  bfs.run(u, v);
  out.distance = bfs.dist(v);
  out.min_boundary_distance = bfs.min_boundary();
  out.may_be_overestimate = out.min_boundary_distance >= 0 && out.min_boundary_distance + 2 < out.distance;
  return out;
}

/// Single-source BFS, reused by the oracle sweeps.
class BfsOracle {
 public:
  explicit BfsOracle(const HoroballGraph& h) : h_(h), bfs_(h) {}
  void from(const Vertex& src) {
    h_.require(src);
    bfs_.run(src, std::nullopt);
  }
  std::int64_t distance_to(const Vertex& v) const { return bfs_.dist(v); }
  bool may_be_overestimate(const Vertex& v) const {
    return bfs_.min_boundary() >= 0 && bfs_.min_boundary() + 2 < bfs_.dist(v);
  }

 private:
  const HoroballGraph& h_;
  detail::DenseBfs bfs_;
};

struct GeodesicShape {
  int m_up = 0;
  int horizontal = 0;
  int m_down = 0;
  std::int64_t total = 0;
  int top_level = 1;
  std::vector<Vertex> path;  // witness, u first
};

namespace detail {

inline std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

/// Best template (ascend to L, h horizontal steps, descend) for word length
/// w; ties prefer the higher level, which forces h <= 3.
inline GeodesicShape best_template(std::int64_t w, int a, int b, int depth) {
  GeodesicShape best;
  best.total = std::numeric_limits<std::int64_t>::max();
  for (int top = std::max(a, b); top <= depth; ++top) {
    const std::int64_t hsteps = w == 0 ? 0 : ceil_div(w, HoroballGraph::reach(top));
    const std::int64_t cost = (top - a) + (top - b) + hsteps;
    if (cost <= best.total) {
      best.total = cost;
      best.top_level = top;
      best.m_up = top - a;
      best.m_down = top - b;
      best.horizontal = static_cast<int>(hsteps);
    }
    if (hsteps <= 1) break;  // going higher only adds vertical steps
  }
  if (w == 0) {  // same base point: straight vertical segment
    best.total = std::abs(a - b);
    best.top_level = std::max(a, b);
    best.m_up = best.top_level - a;
    best.m_down = best.top_level - b;
    best.horizontal = 0;
  }
  return best;
}

}  // namespace detail

/// min over ascent heights of (up + across + down); exact for the L1 word
/// metric, which is geodesic on Z and Z^2. Levels are capped at the depth.
inline std::int64_t horoball_distance_fast(const HoroballGraph& h, const Vertex& u, const Vertex& v) {
  const std::int64_t w = h.base().word_length(difference(u.g, v.g));
  return detail::best_template(w, u.level, v.level, h.depth()).total;
}

/// Builds and validates a template path whose length equals `optimal`
/// (normally a BFS distance). Throws TruncationTooShallow if the template is
/// not optimal or does not fit inside the truncation.
inline GeodesicShape geodesic_shape(const HoroballGraph& h, const Vertex& u, const Vertex& v, std::int64_t optimal) {
  h.require(u);
  h.require(v);
  const std::int64_t w = h.base().word_length(difference(u.g, v.g));
  GeodesicShape s = detail::best_template(w, u.level, v.level, h.depth());
  if (s.total != optimal || s.horizontal > 3)
    throw Error(ErrorCode::TruncationTooShallow, "no optimal up/across/down template between " + to_string(u) +
                                                     " and " + to_string(v));
  s.path.reserve(static_cast<std::size_t>(s.total + 1));
  Vertex cur = u;
  s.path.push_back(cur);
  const int dir = s.top_level >= u.level ? 1 : -1;
  while (cur.level != s.top_level) {
    cur.level += dir;
    s.path.push_back(cur);
  }
  // Walk an L1 geodesic that first moves each coordinate toward 0 and only
  // then away from it, so the word length along the way never exceeds
  // max(|u|, |v|) and the walk stays inside the base ball.
  std::vector<std::pair<int, std::int64_t>> legs;
  for (int phase = 0; phase < 2; ++phase)
    for (int ax = 0; ax < 2; ++ax) {
      const std::int64_t from = u.g[static_cast<std::size_t>(ax)], to = v.g[static_cast<std::size_t>(ax)];
      std::int64_t toward = 0;  // movement toward 0
      if (from > 0) toward = std::clamp(to, std::int64_t{0}, from) - from;
      else if (from < 0) toward = std::clamp(to, from, std::int64_t{0}) - from;
      const std::int64_t amount = phase == 0 ? toward : (to - from) - toward;
      if (amount != 0) legs.emplace_back(ax, amount);
    }
  std::size_t leg = 0;
  for (int step = 0; step < s.horizontal; ++step) {
    std::int64_t budget = HoroballGraph::reach(s.top_level);
    while (budget > 0 && leg < legs.size()) {
      auto& [ax, amount] = legs[leg];
      const std::int64_t mv = std::clamp(amount, -budget, budget);
      cur.g[static_cast<std::size_t>(ax)] += mv;
      amount -= mv;
      budget -= std::llabs(mv);
      if (amount == 0) ++leg;
    }
    s.path.push_back(cur);
  }
  while (cur.level != v.level) {
    cur.level += cur.level > v.level ? -1 : 1;
    s.path.push_back(cur);
  }
  bool ok = cur == v;
  for (std::size_t i = 0; ok && i < s.path.size(); ++i) {
    if (!h.in_range(s.path[i])) ok = false;
    if (i > 0 && !h.adjacent(s.path[i - 1], s.path[i])) ok = false;
  }
  if (!ok) throw Error(ErrorCode::TruncationTooShallow, "template path leaves the truncation");
  return s;
}

/// Same, with the optimal length taken from BFS.
inline GeodesicShape geodesic_shape(const HoroballGraph& h, const Vertex& u, const Vertex& v) {
  const auto r = bfs_distance(h, u, v);
  return geodesic_shape(h, u, v, r.distance);
}

}  // namespace anosovlab::cuspgraph
