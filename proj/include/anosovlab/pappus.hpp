#pragma once

// Marked boxes (Pappus configurations of six points and six lines) under
// the flip involution, the duality iota and the 3-cycle a of the modular
// group, orbit enumeration over normal-form words, and SVG rendering of the
// nested convex interiors.

#include "core.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace anosovlab::pappus {

using Int = boost::multiprecision::cpp_int;

template <class T>
using Hom = std::array<T, 3>;

template <class T>
Hom<T> cross(const Hom<T>& a, const Hom<T>& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

template <class T>
T pairing(const Hom<T>& a, const Hom<T>& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline bool is_zero(const Hom<Int>& v) { return v[0] == 0 && v[1] == 0 && v[2] == 0; }
inline bool is_zero(const Hom<double>& v) { return std::hypot(v[0], v[1], v[2]) <= 1e-14; }

/// Exact: primitive integer vector, first nonzero entry positive.
inline void normalize(Hom<Int>& v) {
  Int g = 0;
  for (const auto& x : v) g = boost::multiprecision::gcd(g, abs(x));
  if (g == 0) return;
  for (auto& x : v) x /= g;
  for (const auto& x : v) {
    if (x == 0) continue;
    if (x < 0)
      for (auto& y : v) y = -y;
    break;
  }
}

/// Floating: unit vector, first entry above 1e-12 in modulus positive.
inline void normalize(Hom<double>& v) {
  const double n = std::hypot(v[0], v[1], v[2]);
  if (n == 0.0) return;
  for (auto& x : v) x /= n;
  for (const auto& x : v) {
    if (std::abs(x) <= 1e-12) continue;
    if (x < 0)
      for (auto& y : v) y = -y;
    break;
  }
}

/// Line pq as a covector (cross product).
template <class T>
Hom<T> line_through(const Hom<T>& p, const Hom<T>& q) {
  Hom<T> l = cross(p, q);
  if (is_zero(l)) throw Error(ErrorCode::CoincidentArguments, "points coincide projectively");
  normalize(l);
  return l;
}

/// Intersection point PQ of two lines.
template <class T>
Hom<T> meet(const Hom<T>& a, const Hom<T>& b) {
  Hom<T> x = cross(a, b);
  if (is_zero(x)) throw Error(ErrorCode::CoincidentArguments, "lines coincide projectively");
  normalize(x);
  return x;
}

enum Slot { kP = 0, kQ = 1, kR = 2, kS = 3, kT = 4, kB = 5 };

template <class T>
struct MarkedBox {
  std::array<Hom<T>, 6> pts;    // p, q, r, s, t, b
  std::array<Hom<T>, 6> lines;  // P, Q, R, S, T, B

  bool operator==(const MarkedBox&) const = default;
};

/// Incidences: p,t,q on T; s,b,r on B; s,t on P; t,r on Q; p,b on S; b,q on R.
inline const std::vector<std::pair<int, int>>& incidence_table() {
  static const std::vector<std::pair<int, int>> table = {
      {kP, kT}, {kT, kT}, {kQ, kT}, {kS, kB}, {kB, kB}, {kR, kB}, {kS, kP},
      {kT, kP}, {kT, kQ}, {kR, kQ}, {kP, kS}, {kB, kS}, {kB, kR}, {kQ, kR}};
  return table;
}

/// Largest |<line, point>| over the incidence table after unit
/// normalization; exactly 0 in exact mode when every incidence holds.
template <class T>
double incidence_residual(const MarkedBox<T>& box) {
  double worst = 0.0;
  for (const auto& [pt, ln] : incidence_table()) {
    const Hom<T>& x = box.pts[static_cast<std::size_t>(pt)];
    const Hom<T>& l = box.lines[static_cast<std::size_t>(ln)];
    if constexpr (std::is_same_v<T, Int>) {
      if (pairing(x, l) == 0) continue;
      auto to_d = [](const Hom<Int>& v) {
        Hom<double> o{v[0].template convert_to<double>(), v[1].template convert_to<double>(),
                      v[2].template convert_to<double>()};
        normalize(o);
        return o;
      };
      worst = std::max(worst, std::max(std::abs(pairing(to_d(x), to_d(l))), 1e-300));
    } else {
      Hom<double> xu = x, lu = l;
      normalize(xu);
      normalize(lu);
      worst = std::max(worst, std::abs(pairing(xu, lu)));
    }
  }
  return worst;
}

template <class T>
bool lex_less(const MarkedBox<T>& a, const MarkedBox<T>& b) {
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      if (a.pts[i][j] < b.pts[i][j]) return true;
      if (b.pts[i][j] < a.pts[i][j]) return false;
    }
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      if (a.lines[i][j] < b.lines[i][j]) return true;
      if (b.lines[i][j] < a.lines[i][j]) return false;
    }
  return false;
}

/// ((q,p,s,r,t,b), (Q,P,S,R,T,B)): flipping around the axis tb.
template <class T>
MarkedBox<T> flip_raw(const MarkedBox<T>& x) {
  MarkedBox<T> y;
  y.pts = {x.pts[kQ], x.pts[kP], x.pts[kS], x.pts[kR], x.pts[kT], x.pts[kB]};
  y.lines = {x.lines[kQ], x.lines[kP], x.lines[kS], x.lines[kR], x.lines[kT], x.lines[kB]};
  return y;
}

/// Representative of the flip class: the lexicographically smaller tuple.
template <class T>
MarkedBox<T> canonical(MarkedBox<T> x) {
  for (auto& v : x.pts) normalize(v);
  for (auto& v : x.lines) normalize(v);
  MarkedBox<T> y = flip_raw(x);
  return lex_less(y, x) ? y : x;
}

/// Box from its six points; the lines are joins as in the incidence table.
template <class T>
MarkedBox<T> box_from_points(const Hom<T>& p, const Hom<T>& q, const Hom<T>& r, const Hom<T>& s, const Hom<T>& t,
                             const Hom<T>& b) {
  MarkedBox<T> x;
  x.pts = {p, q, r, s, t, b};
  for (auto& v : x.pts) normalize(v);
  x.lines[kP] = line_through(s, t);
  x.lines[kQ] = line_through(t, r);
  x.lines[kR] = line_through(b, q);
  x.lines[kS] = line_through(p, b);
  x.lines[kT] = line_through(p, q);
  x.lines[kB] = line_through(s, r);
  if (incidence_residual(x) > 1e-9) throw Error(ErrorCode::IncidenceViolated, "t must lie on pq and b on sr");
  return canonical(x);
}

/// p=[0:1:1], q=[1:1:1], r=[1:0:1], s=[0:0:1], t=[1:2:2], b=[1:0:2].
template <class T = Int>
MarkedBox<T> standard_box() {
  return box_from_points<T>({0, 1, 1}, {1, 1, 1}, {1, 0, 1}, {0, 0, 1}, {1, 2, 2}, {1, 0, 2});
}

template <class T>
void require_valid(const MarkedBox<T>& x) {
  const double r = incidence_residual(x);
  if (r > 1e-9) throw Error(ErrorCode::IncidenceViolated, "incidence residual " + std::to_string(r));
}

/// iota: ((s,r,p,q,b,t), (R,S,Q,P,B,T)).
template <class T>
MarkedBox<T> dual_box(const MarkedBox<T>& x) {
  require_valid(x);
  MarkedBox<T> y;
  y.pts = {x.pts[kS], x.pts[kR], x.pts[kP], x.pts[kQ], x.pts[kB], x.pts[kT]};
  y.lines = {x.lines[kR], x.lines[kS], x.lines[kQ], x.lines[kP], x.lines[kB], x.lines[kT]};
  return canonical(y);
}

/// a: ((PS, QR, p, q, (qs)(pr), t), (qs, pr, Q, P, (QR)(PS), T)).
template <class T>
MarkedBox<T> a_cycle(const MarkedBox<T>& x) {
  require_valid(x);
  try {
    const auto& [p, q, r, s, t, b] = x.pts;
    const auto& [P, Q, R, S, T_, B] = x.lines;
    (void)b;
    (void)B;
    const Hom<T> ps = meet(P, S), qr = meet(Q, R);
    const Hom<T> qs = line_through(q, s), pr = line_through(p, r);
    MarkedBox<T> y;
    y.pts = {ps, qr, p, q, meet(qs, pr), t};
    y.lines = {qs, pr, Q, P, line_through(qr, ps), T_};
    return canonical(y);
  } catch (const Error& e) {
    throw Error(ErrorCode::DegenerateConfiguration, e.what());
  }
}

/// a^{-1} = a^2.
template <class T>
MarkedBox<T> a_inverse(const MarkedBox<T>& x) {
  return a_cycle(a_cycle(x));
}

/// Letters 'a', 'A' (= a^{-1}) and 'd', applied in reading order, so that the
/// result is rho_B(w) B for the representation determined by B.
template <class T>
MarkedBox<T> apply_word(const MarkedBox<T>& x, const std::string& word) {
  MarkedBox<T> y = x;
  for (char c : word) {
    if (c == 'a') y = a_cycle(y);
    else if (c == 'A') y = a_inverse(y);
    else if (c == 'd') y = dual_box(y);
    else throw Error(ErrorCode::ParseError, std::string("unknown letter '") + c + "'");
  }
  return y;
}

/// Normal-form words of Z/3 * Z/2 = <a> * <d>: syllables alternate between
/// {a, A} and d.
inline std::vector<std::string> normal_form_words(int max_len) {
  std::vector<std::string> out{""};
  std::vector<std::string> layer{""};
  for (int len = 1; len <= max_len; ++len) {
    std::vector<std::string> next;
    for (const auto& w : layer) {
      const char last = w.empty() ? '\0' : w.back();
      if (last != 'a' && last != 'A') {
        next.push_back(w + 'a');
        next.push_back(w + 'A');
      }
      if (last != 'd') next.push_back(w + 'd');
    }
    out.insert(out.end(), next.begin(), next.end());
    layer.swap(next);
  }
  return out;
}

/// 2^{ceil(L/2)} + 2^{floor(L/2)} words of length L >= 1.
inline std::size_t normal_form_count(int len) {
  if (len == 0) return 1;
  return (std::size_t{1} << ((len + 1) / 2)) + (std::size_t{1} << (len / 2));
}

template <class T>
std::vector<std::pair<std::string, MarkedBox<T>>> orbit(const MarkedBox<T>& x, int max_len) {
  if (max_len < 0 || max_len > 12) throw Error(ErrorCode::DegenerateInput, "max_len must lie in [0, 12]");
  std::vector<std::pair<std::string, MarkedBox<T>>> out;
  out.emplace_back("", canonical(x));
  // breadth-first: each word extends its parent by one letter
  std::size_t start = 0;
  for (int len = 1; len <= max_len; ++len) {
    const std::size_t end = out.size();
    for (std::size_t i = start; i < end; ++i) {
      const std::string w = out[i].first;
      const char last = w.empty() ? '\0' : w.back();
      if (last != 'a' && last != 'A') {
        out.emplace_back(w + 'a', a_cycle(out[i].second));
        out.emplace_back(w + 'A', a_inverse(out[i].second));
      }
      if (last != 'd') out.emplace_back(w + 'd', dual_box(out[i].second));
    }
    start = end;
  }
  return out;
}

inline MarkedBox<double> to_double(const MarkedBox<Int>& x) {
  MarkedBox<double> y;
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      y.pts[i][j] = x.pts[i][j].convert_to<double>();
      y.lines[i][j] = x.lines[i][j].convert_to<double>();
    }
  for (auto& v : y.pts) normalize(v);
  for (auto& v : y.lines) normalize(v);
  return y;
}

/// Angle between projective points given by 3-vectors.
inline double proj_angle(const Hom<double>& a, const Hom<double>& b) {
  const Eigen::Vector3d u = Eigen::Vector3d(a[0], a[1], a[2]).normalized();
  const Eigen::Vector3d v = Eigen::Vector3d(b[0], b[1], b[2]).normalized();
  return std::atan2(u.cross(v).norm(), std::abs(u.dot(v)));
}

/// max over the six points, minimized over the flip.
inline double box_distance(const MarkedBox<double>& x, const MarkedBox<double>& y) {
  auto one = [](const MarkedBox<double>& u, const MarkedBox<double>& v) {
    double m = 0.0;
    for (std::size_t i = 0; i < 6; ++i) m = std::max(m, proj_angle(u.pts[i], v.pts[i]));
    return m;
  };
  return std::min(one(x, y), one(flip_raw(x), y));
}

/// The open quadrilateral p, q, r, s as a convex cone in R^3: lifts signed
/// so that s = alpha p - beta q + gamma r with alpha, beta, gamma > 0, and
/// edge covectors positive inside.
struct QuadCone {
  std::array<Eigen::Vector3d, 4> lifts;
  std::array<Eigen::Vector3d, 4> edges;

  bool contains(const Eigen::Vector3d& x, double tol) const {
    for (int sgn : {1, -1}) {
      bool in = true;
      for (const auto& e : edges) in = in && sgn * e.dot(x.normalized()) >= -tol;
      if (in) return true;
    }
    return false;
  }
};

inline QuadCone quad_cone(const MarkedBox<double>& x) {
  std::array<Eigen::Vector3d, 4> v;
  const int order[4] = {kP, kQ, kR, kS};
  for (int i = 0; i < 4; ++i) {
    const auto& h = x.pts[static_cast<std::size_t>(order[i])];
    v[static_cast<std::size_t>(i)] = Eigen::Vector3d(h[0], h[1], h[2]).normalized();
  }
  Eigen::Matrix3d basis;
  basis << v[0], v[1], v[2];
  const Eigen::Vector3d c = basis.fullPivLu().solve(v[3]);
  if (c.cwiseAbs().minCoeff() < 1e-12) throw Error(ErrorCode::DegenerateConfiguration, "three of p,q,r,s are collinear");
  QuadCone qc;
  qc.lifts = {v[0] * (c(0) > 0 ? 1.0 : -1.0), v[1] * (c(1) < 0 ? 1.0 : -1.0), v[2] * (c(2) > 0 ? 1.0 : -1.0), v[3]};
  Eigen::Vector3d inside = Eigen::Vector3d::Zero();
  for (const auto& l : qc.lifts) inside += l;
  for (std::size_t i = 0; i < 4; ++i) {
    Eigen::Vector3d e = qc.lifts[i].cross(qc.lifts[(i + 1) % 4]).normalized();
    if (e.dot(inside) < 0) e = -e;
    qc.edges[i] = e;
  }
  return qc;
}

/// Whether the open quadrilaterals share an interior point: extreme rays of
/// the intersected cone, tested for a strictly interior combination.
inline bool quads_overlap(const QuadCone& a, const QuadCone& b, double tol = 1e-9) {
  for (int sgn : {1, -1}) {
    std::vector<Eigen::Vector3d> hs(a.edges.begin(), a.edges.end());
    for (const auto& e : b.edges) hs.push_back(sgn * e);
    Eigen::Vector3d sum = Eigen::Vector3d::Zero();
    for (std::size_t i = 0; i < hs.size(); ++i)
      for (std::size_t j = i + 1; j < hs.size(); ++j) {
        Eigen::Vector3d r = hs[i].cross(hs[j]);
        if (r.norm() < 1e-12) continue;
        r.normalize();
        for (int s2 : {1, -1}) {
          const Eigen::Vector3d cand = s2 * r;
          bool ok = true;
          for (const auto& h : hs) ok = ok && h.dot(cand) >= -tol;
          if (ok) sum += cand;
        }
      }
    if (sum.norm() < 1e-12) continue;
    double margin = 1e300;
    for (const auto& h : hs) margin = std::min(margin, h.dot(sum.normalized()));
    if (margin > tol) return true;
  }
  return false;
}

/// Euclidean diameter of the quadrilateral in the chart z = 1.
inline double chart_diameter(const MarkedBox<double>& x) {
  double best = 0.0;
  const int order[4] = {kP, kQ, kR, kS};
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) {
      const auto& u = x.pts[static_cast<std::size_t>(order[i])];
      const auto& v = x.pts[static_cast<std::size_t>(order[j])];
      best = std::max(best, std::hypot(u[0] / u[2] - v[0] / v[2], u[1] / u[2] - v[1] / v[2]));
    }
  return best;
}

struct RenderNode {
  std::string word;
  int depth = 0;
  MarkedBox<double> box;
};

/// Interior children of the box rho(w)B are rho(w a d)B (top) and
/// rho(w a^{-1} d)B (bottom); depth k yields 2^{k+1} - 1 boxes.
inline std::vector<RenderNode> render_tree(const MarkedBox<double>& root, int depth) {
  if (depth < 0 || depth > 16) throw Error(ErrorCode::DegenerateInput, "depth must lie in [0, 16]");
  std::vector<RenderNode> out{{"", 0, canonical(root)}};
  std::size_t start = 0;
  for (int k = 1; k <= depth; ++k) {
    const std::size_t end = out.size();
    for (std::size_t i = start; i < end; ++i) {
      const RenderNode parent = out[i];
      out.push_back({parent.word + "ad", k, apply_word(parent.box, "ad")});
      out.push_back({parent.word + "Ad", k, apply_word(parent.box, "Ad")});
    }
    start = end;
  }
  return out;
}

/// SVG of the nested quadrilaterals in the chart z = 1, colored by depth.
/// `comment` lands in an XML comment at the top.
inline std::string render_svg(const std::vector<RenderNode>& nodes, const std::string& comment) {
  static const char* palette[] = {"#1b3a5c", "#2c6e8f", "#3fa0a8", "#6cc3a0", "#b3de8a",
                                  "#f2e07b", "#f5a65b", "#e76f51", "#c8553d", "#8c2f39"};
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  const int order[4] = {kP, kQ, kR, kS};
  for (const auto& n : nodes)
    for (int i : order) {
      const auto& h = n.box.pts[static_cast<std::size_t>(i)];
      xmin = std::min(xmin, h[0] / h[2]);
      xmax = std::max(xmax, h[0] / h[2]);
      ymin = std::min(ymin, h[1] / h[2]);
      ymax = std::max(ymax, h[1] / h[2]);
    }
  const double size = 800.0, pad = 20.0;
  const double scale = (size - 2 * pad) / std::max(xmax - xmin, ymax - ymin);
  std::ostringstream os;
  char buf[128];
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<!-- " << comment << " -->\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"800\" viewBox=\"0 0 800 800\">\n";
  os << "<rect width=\"800\" height=\"800\" fill=\"#ffffff\"/>\n";
  for (const auto& n : nodes) {
    os << "<polygon data-word=\"" << (n.word.empty() ? "e" : n.word) << "\" points=\"";
    for (int k = 0; k < 4; ++k) {
      const auto& h = n.box.pts[static_cast<std::size_t>(order[k])];
      std::snprintf(buf, sizeof buf, "%s%.4f,%.4f", k ? " " : "", pad + (h[0] / h[2] - xmin) * scale,
                    size - pad - (h[1] / h[2] - ymin) * scale);
      os << buf;
    }
    os << "\" fill=\"" << palette[n.depth % 10] << "\" fill-opacity=\"0.55\" stroke=\"#202020\" stroke-width=\"0.6\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace anosovlab::pappus
