#include <anosovlab/pappus.hpp>

#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <set>
#include <sstream>

using namespace anosovlab;
using namespace anosovlab::pappus;

namespace {

Hom<Int> H(long a, long b, long c) { return {Int(a), Int(b), Int(c)}; }

Int det3(const Hom<Int>& a, const Hom<Int>& b, const Hom<Int>& c) { return pairing(a, cross(b, c)); }

// random exact box: p, q, r, s in general position, t on pq, b on sr
MarkedBox<Int> random_box(std::mt19937_64& rng) {
  std::uniform_int_distribution<long> c(-9, 9), w(1, 5);
  while (true) {
    const Hom<Int> p = H(c(rng), c(rng), c(rng)), q = H(c(rng), c(rng), c(rng)), r = H(c(rng), c(rng), c(rng)),
                   s = H(c(rng), c(rng), c(rng));
    if (det3(p, q, r) == 0 || det3(p, q, s) == 0 || det3(p, r, s) == 0 || det3(q, r, s) == 0) continue;
    const long a1 = w(rng), a2 = w(rng), b1 = w(rng), b2 = w(rng);
    Hom<Int> t, b;
    for (int i = 0; i < 3; ++i) {
      t[i] = a1 * p[i] + a2 * q[i];
      b[i] = b1 * s[i] + b2 * r[i];
    }
    try {
      auto box = box_from_points(p, q, r, s, t, b);
      // the moves need these joins and meets to be proper
      apply_word(box, "aaad");
      return box;
    } catch (const Error&) {
    }
  }
}

// affine point-in-convex-polygon, vertices in order
bool in_convex(const std::vector<std::array<double, 2>>& poly, double x, double y) {
  int sign = 0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto& a = poly[i];
    const auto& b = poly[(i + 1) % poly.size()];
    const double cr = (b[0] - a[0]) * (y - a[1]) - (b[1] - a[1]) * (x - a[0]);
    const int s = cr > 0 ? 1 : (cr < 0 ? -1 : 0);
    if (s == 0) return false;
    if (sign == 0) sign = s;
    if (s != sign) return false;
  }
  return true;
}

// shoelace area of p, q, r, s in the chart z = 1
double chart_area(const MarkedBox<double>& x) {
  double a = 0;
  const int order[4] = {kP, kQ, kR, kS};
  for (int i = 0; i < 4; ++i) {
    const auto& u = x.pts[static_cast<std::size_t>(order[i])];
    const auto& v = x.pts[static_cast<std::size_t>(order[(i + 1) % 4])];
    a += u[0] / u[2] * (v[1] / v[2]) - v[0] / v[2] * (u[1] / u[2]);
  }
  return std::abs(a) / 2;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST(Projective, LineAndMeet) {
  EXPECT_EQ(line_through(H(1, 0, 0), H(0, 1, 0)), H(0, 0, 1));
  EXPECT_EQ(meet(H(1, 0, 0), H(0, 1, 0)), H(0, 0, 1));
  EXPECT_THROW(line_through(H(1, 2, 3), H(2, 4, 6)), Error);
  try {
    meet(H(1, 1, 0), H(-3, -3, 0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CoincidentArguments);
  }
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<long> c(-50, 50);
  for (int t = 0; t < 500; ++t) {
    const auto p = H(c(rng), c(rng), c(rng)), q = H(c(rng), c(rng), c(rng));
    const auto P = H(c(rng), c(rng), c(rng)), Q = H(c(rng), c(rng), c(rng));
    if (is_zero(cross(p, q)) || is_zero(cross(P, Q))) continue;
    const auto l = line_through(p, q);
    EXPECT_EQ(pairing(l, p), 0);
    EXPECT_EQ(pairing(l, q), 0);
    const auto x = meet(P, Q);
    EXPECT_EQ(pairing(P, x), 0);
    EXPECT_EQ(pairing(Q, x), 0);
    // a line through PQ and any other point contains PQ
    if (!is_zero(cross(p, x))) EXPECT_EQ(pairing(line_through(p, x), x), 0);
  }
}

TEST(Box, StandardIsValid) {
  const auto b = standard_box();
  EXPECT_EQ(incidence_residual(b), 0.0);
  EXPECT_EQ(canonical(flip_raw(b)), b);
  const auto f = standard_box<double>();
  EXPECT_LT(incidence_residual(f), 1e-15);
  EXPECT_THROW(box_from_points(H(0, 1, 1), H(1, 1, 1), H(1, 0, 1), H(0, 0, 1), H(1, 3, 2), H(1, 0, 2)), Error);
}

TEST(Box, DualExamples) {
  const auto b = standard_box();
  const auto d = dual_box(b);
  EXPECT_EQ(incidence_residual(d), 0.0);
  // (s, r, p, q, b, t) up to flip
  auto up_to_flip = [](const MarkedBox<Int>& x, const std::array<Hom<Int>, 6>& pts) {
    MarkedBox<Int> y = x;
    y.pts = pts;
    for (auto& v : y.pts) normalize(v);
    return y.pts == x.pts || flip_raw(y).pts == x.pts;
  };
  const auto& [p, q, r, s, t, bb] = b.pts;
  EXPECT_TRUE(up_to_flip(d, {s, r, p, q, bb, t}));
  EXPECT_EQ(dual_box(d), b);

  // interiors are disjoint: the unit square against the dual quadrilateral
  const auto qd = quad_cone(to_double(d));
  const auto qb = quad_cone(to_double(b));
  EXPECT_FALSE(quads_overlap(qb, qd));
  EXPECT_TRUE(quads_overlap(qb, qb));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.001, 0.999);
  for (int i = 0; i < 2000; ++i) {
    const Eigen::Vector3d x(u(rng), u(rng), 1.0);
    EXPECT_TRUE(qb.contains(x, 0.0));
    EXPECT_FALSE(qd.contains(x, -1e-12));
  }
}

TEST(Box, ACycleExamples) {
  const auto b = standard_box();
  const auto a1 = a_cycle(b);
  EXPECT_EQ(incidence_residual(a1), 0.0);
  EXPECT_NE(a1, b);
  EXPECT_EQ(a_cycle(a_cycle(a1)), b);

  // second stage (s, r, PS, QR, b, (qs)(pr)) up to flip
  const auto& [p, q, r, s, t, bb] = b.pts;
  const auto& [P, Q, R, S, T, B] = b.lines;
  MarkedBox<Int> stage;
  stage.pts = {s, r, meet(P, S), meet(Q, R), bb, meet(line_through(q, s), line_through(p, r))};
  for (auto& v : stage.pts) normalize(v);
  const auto a2 = a_inverse(b);
  EXPECT_TRUE(a2.pts == stage.pts || flip_raw(a2).pts == stage.pts);
}

TEST(Box, RelationsOnRandomBoxes) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 100; ++i) {
    const auto b = random_box(rng);
    EXPECT_EQ(apply_word(b, "aaa"), b);
    EXPECT_EQ(apply_word(b, "dd"), b);
    EXPECT_EQ(apply_word(b, "aA"), b);
    EXPECT_EQ(incidence_residual(a_cycle(b)), 0.0);
    EXPECT_EQ(incidence_residual(dual_box(b)), 0.0);
    // floating mode stays within 1e-8 after three moves
    const auto f = to_double(b);
    EXPECT_LT(box_distance(apply_word(f, "aaa"), f), 1e-8);
    EXPECT_LT(box_distance(apply_word(f, "dd"), f), 1e-8);
    EXPECT_LT(incidence_residual(apply_word(f, "adA")), 1e-9);
  }
}

TEST(Orbit, CountsAndWords) {
  // brute force over {a, A, d}^L with forbidden adjacent pairs
  for (int len = 0; len <= 8; ++len) {
    std::size_t brute = 0;
    std::size_t total = 1;
    for (int k = 0; k < len; ++k) total *= 3;
    for (std::size_t code = 0; code < total; ++code) {
      std::string w;
      std::size_t c = code;
      for (int k = 0; k < len; ++k, c /= 3) w += "aAd"[c % 3];
      bool ok = true;
      for (std::size_t i = 0; i + 1 < w.size(); ++i)
        ok = ok && !(w[i] == 'd' && w[i + 1] == 'd') && !(w[i] != 'd' && w[i + 1] != 'd');
      brute += ok;
    }
    EXPECT_EQ(normal_form_count(len), brute) << len;
  }
  const auto b = standard_box();
  EXPECT_EQ(orbit(b, 0).size(), 1u);
  const auto o1 = orbit(b, 1);
  ASSERT_EQ(o1.size(), 4u);
  EXPECT_EQ(o1[1].second, a_cycle(b));
  EXPECT_EQ(o1[2].second, a_inverse(b));
  EXPECT_EQ(o1[3].second, dual_box(b));
  EXPECT_THROW(orbit(b, 13), Error);
}

TEST(Orbit, DistinctBoxes) {
  const int L = 7;
  const auto o = orbit(standard_box(), L);
  std::size_t expect = 0;
  for (int k = 0; k <= L; ++k) expect += normal_form_count(k);
  ASSERT_EQ(o.size(), expect);
  std::set<std::string> words;
  std::vector<MarkedBox<double>> fl;
  for (const auto& [w, box] : o) {
    EXPECT_TRUE(words.insert(w).second);
    EXPECT_EQ(apply_word(standard_box(), w), box) << w;
    EXPECT_EQ(incidence_residual(box), 0.0);
    fl.push_back(to_double(box));
  }
  for (std::size_t i = 0; i < fl.size(); ++i)
    for (std::size_t j = i + 1; j < fl.size(); ++j) ASSERT_GT(box_distance(fl[i], fl[j]), 1e-7) << o[i].first << " " << o[j].first;
}

TEST(Render, TreeAndNesting) {
  const auto root = to_double(standard_box());
  EXPECT_EQ(render_tree(root, 0).size(), 1u);
  const auto nodes = render_tree(root, 5);
  ASSERT_EQ(nodes.size(), 63u);
  const auto svg0 = render_svg(render_tree(root, 0), "x");
  std::size_t polys = 0;
  for (std::size_t pos = 0; (pos = svg0.find("<polygon", pos)) != std::string::npos; ++pos) ++polys;
  EXPECT_EQ(polys, 1u);

  for (std::size_t i = 1; i < nodes.size(); ++i) {
    const auto& child = nodes[i];
    const std::string pw = child.word.substr(0, child.word.size() - 2);
    const auto parent = std::find_if(nodes.begin(), nodes.end(), [&](const RenderNode& n) { return n.word == pw; });
    ASSERT_NE(parent, nodes.end());
    // child interior sits in the parent's quad, checked in the affine chart
    std::vector<std::array<double, 2>> poly;
    for (int k : {kP, kQ, kR, kS}) {
      const auto& h = parent->box.pts[static_cast<std::size_t>(k)];
      poly.push_back({h[0] / h[2], h[1] / h[2]});
    }
    double cx = 0, cy = 0;
    for (int k : {kP, kQ, kR, kS}) {
      const auto& h = child.box.pts[static_cast<std::size_t>(k)];
      cx += h[0] / h[2] / 4;
      cy += h[1] / h[2] / 4;
    }
    EXPECT_TRUE(in_convex(poly, cx, cy)) << child.word;
    // children can keep the parent's longest edge, so only the area drops strictly
    EXPECT_LE(chart_diameter(child.box), chart_diameter(parent->box) + 1e-12) << child.word;
    EXPECT_LT(chart_area(child.box), chart_area(parent->box)) << child.word;
  }
}

TEST(Render, Golden) {
  const auto svg = render_svg(render_tree(to_double(standard_box()), 3), "golden");
  EXPECT_EQ(svg, render_svg(render_tree(to_double(standard_box()), 3), "golden"));
  EXPECT_EQ(svg, slurp(std::string(ANOSOVLAB_TEST_DATA) + "/std_depth3.svg"));
}
