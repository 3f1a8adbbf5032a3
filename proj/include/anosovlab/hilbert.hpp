#pragma once

// Properly convex domains in P(R^d) (ellipsoids and polyhedral cones), the
// Hilbert metric by cross ratio, segment Hausdorff estimates, duality,
// planar convex hulls in an affine chart, tangent data and positivity of
// lifted boundary maps.

#include "core.hpp"
#include "parallel.hpp"
#include "points.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace anosovlab::hilbert {

using flagdyn::ProjPoint;

class ConvexDomain {
 public:
  enum class Model { Ellipsoid, Polytope };

  /// {x : (x - c)^T A (x - c) < 1} in the chart x0 = 1, A positive definite.
  static ConvexDomain ellipsoid(const VecR& center, const MatR& shape) {
    const Eigen::Index n = center.size();
    if (shape.rows() != n || shape.cols() != n) throw Error(ErrorCode::DimMismatch, "shape must be n x n");
    Eigen::LLT<MatR> llt(shape);
    if (llt.info() != Eigen::Success) throw Error(ErrorCode::NotProperlyConvex, "shape is not positive definite");
    MatR q(n + 1, n + 1);
    const VecR ac = shape * center;
    q(0, 0) = 1.0 - center.dot(ac);
    q.block(0, 1, 1, n) = ac.transpose();
    q.block(1, 0, n, 1) = ac;
    q.block(1, 1, n, n) = -shape;
    VecR c(n + 1);
    c << 1.0, center;
    return ellipsoid_form(q, c);
  }

  /// {[v] : v^T Q v > 0} for Q of signature (1, d-1); `inside` marks the component.
  static ConvexDomain ellipsoid_form(const MatR& q, const VecR& inside) {
    ConvexDomain dom;
    dom.model_ = Model::Ellipsoid;
    dom.q_ = 0.5 * (q + q.transpose());
    const Eigen::SelfAdjointEigenSolver<MatR> es(dom.q_);
    int pos = 0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) pos += es.eigenvalues()(i) > 0;
    if (pos != 1 || es.eigenvalues().cwiseAbs().minCoeff() <= 1e-14 * es.eigenvalues().cwiseAbs().maxCoeff())
      throw Error(ErrorCode::NotProperlyConvex, "quadratic form must have signature (1, d-1)");
    if (!(inside.dot(dom.q_ * inside) > 0)) throw Error(ErrorCode::PointNotInterior, "reference point is outside");
    dom.inside_ = inside.normalized();
    dom.chart_ = dom.q_ * dom.inside_;
    dom.chart_ /= dom.chart_.norm();
    return dom;
  }

  /// Cone {h_i(v) > 0} with chart functional f, positive on the closed cone.
  static ConvexDomain polytope(const VecR& chart, const std::vector<VecR>& halfspaces) {
    ConvexDomain dom;
    dom.model_ = Model::Polytope;
    const Eigen::Index d = chart.size();
    if (d < 2 || halfspaces.size() < static_cast<std::size_t>(d))
      throw Error(ErrorCode::NotProperlyConvex, "need at least d half-spaces");
    for (const auto& h : halfspaces) {
      if (h.size() != d) throw Error(ErrorCode::DimMismatch, "half-space covector has wrong length");
      if (h.norm() == 0.0) throw Error(ErrorCode::DegenerateInput, "zero covector");
      dom.halfspaces_.push_back(h.normalized());
    }
    dom.chart_ = chart.normalized();
    dom.rays_ = extreme_rays_of(dom.halfspaces_);
    if (static_cast<Eigen::Index>(dom.rays_.size()) < d)
      throw Error(ErrorCode::NotProperlyConvex, "cone is not pointed and full-dimensional");
    VecR sum = VecR::Zero(d);
    for (auto& r : dom.rays_) {
      const double fr = dom.chart_.dot(r);
      if (!(fr > 1e-12)) throw Error(ErrorCode::NotProperlyConvex, "domain is unbounded in its chart");
      sum += r / fr;
    }
    dom.inside_ = sum.normalized();
    double margin = std::numeric_limits<double>::infinity();
    for (const auto& h : dom.halfspaces_) margin = std::min(margin, h.dot(dom.inside_));
    if (!(margin > 1e-9)) throw Error(ErrorCode::NotProperlyConvex, "empty interior");
    return dom;
  }

  /// {x : A x <= b} in the chart x0 = 1.
  static ConvexDomain polytope_chart(const MatR& a, const VecR& b) {
    std::vector<VecR> hs;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      VecR h(a.cols() + 1);
      h << b(i), -a.row(i).transpose();
      hs.push_back(h);
    }
    VecR f = VecR::Zero(a.cols() + 1);
    f(0) = 1.0;
    return polytope(f, hs);
  }

  Model model() const { return model_; }
  int dim() const { return static_cast<int>(chart_.size()); }
  const MatR& form() const { return q_; }
  const VecR& chart() const { return chart_; }
  const VecR& interior_point() const { return inside_; }
  const std::vector<VecR>& halfspaces() const { return halfspaces_; }
  const std::vector<VecR>& extreme_rays() const { return rays_; }

  /// Signed-and-scaled lift with chart value 1, or throws PointNotInterior.
  VecR lift(const ProjPoint<double>& p, double margin = 1e-9) const {
    if (p.dim() != dim()) throw Error(ErrorCode::DimMismatch, "point dimension differs from domain");
    VecR v = p.vec();
    if (chart_.dot(v) < 0) v = -v;
    if (interior_margin(v) <= margin) throw Error(ErrorCode::PointNotInterior, "point is not interior");
    return v / chart_.dot(v);
  }

  bool contains(const ProjPoint<double>& p, double margin = 1e-9) const {
    if (p.dim() != dim()) return false;
    VecR v = p.vec();
    if (chart_.dot(v) < 0) v = -v;
    return interior_margin(v) > margin;
  }

  /// Affine parameters (t_a < 0, t_b > 1) of the boundary points on the
  /// line x(t) = (1 - t) p + t q through chart-normalized lifts.
  std::pair<double, double> chord(const VecR& p, const VecR& q) const {
    const VecR w = q - p;
    double ta = -std::numeric_limits<double>::infinity(), tb = std::numeric_limits<double>::infinity();
    if (model_ == Model::Ellipsoid) {
      const double a = w.dot(q_ * w), b = 2.0 * p.dot(q_ * w), c = p.dot(q_ * p);
      const double disc = b * b - 4.0 * a * c;
      if (!(a < 0) || !(disc > 0))
        throw Error(ErrorCode::LineBoundaryIntersectionFailure, "chord does not meet the quadric twice");
      const double qq = -0.5 * (b + std::copysign(std::sqrt(disc), b));
      const double r1 = qq / a, r2 = c / qq;
      ta = std::min(r1, r2);
      tb = std::max(r1, r2);
    } else {
      for (const auto& h : halfspaces_) {
        const double hp = h.dot(p), hq = h.dot(q);
        if (hp == hq) continue;
        const double t = hp / (hp - hq);
        if (hq < hp) tb = std::min(tb, t);
        else ta = std::max(ta, t);
      }
    }
    if (!std::isfinite(ta) || !std::isfinite(tb) || !(ta < 0.0) || !(tb > 1.0))
      throw Error(ErrorCode::LineBoundaryIntersectionFailure, "boundary points not bracketed");
    return {ta, tb};
  }

  /// g Omega: half-spaces h -> h g^{-1}, quadric Q -> g^{-T} Q g^{-1}.
  ConvexDomain transformed(const MatR& g) const {
    const MatR gi = g.inverse();
    if (model_ == Model::Ellipsoid) return ellipsoid_form(gi.transpose() * q_ * gi, g * inside_);
    std::vector<VecR> hs;
    for (const auto& h : halfspaces_) hs.push_back(gi.transpose() * h);
    return polytope(gi.transpose() * chart_, hs);
  }

  /// Extreme rays as unit vectors inside the closed cone, sorted.
  std::vector<VecR> projective_vertices() const {
    std::vector<VecR> out;
    for (const auto& r : rays_) out.push_back(r.normalized());
    std::sort(out.begin(), out.end(), [](const VecR& a, const VecR& b) {
      return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
    });
    return out;
  }

  /// Vertices in chart coordinates (chart value 1).
  std::vector<VecR> chart_vertices() const {
    std::vector<VecR> out;
    for (const auto& r : rays_) out.push_back(r / chart_.dot(r));
    return out;
  }

 private:
  double interior_margin(const VecR& v) const {
    const VecR u = v.normalized();
    if (model_ == Model::Ellipsoid) {
      if (u.dot(chart_) <= 0) return -1.0;
      return u.dot(q_ * u) / q_.norm();
    }
    double m = std::numeric_limits<double>::infinity();
    for (const auto& h : halfspaces_) m = std::min(m, h.dot(u));
    return m;
  }

  /// Brute force over (d-1)-subsets: kernel rays lying in the closed cone.
  static std::vector<VecR> extreme_rays_of(const std::vector<VecR>& hs) {
    const int d = static_cast<int>(hs.front().size());
    const int m = static_cast<int>(hs.size());
    std::vector<VecR> rays;
    for (const auto& subset : flagdyn::k_subsets(m, d - 1)) {
      MatR a(d - 1, d);
      for (int i = 0; i < d - 1; ++i) a.row(i) = hs[static_cast<std::size_t>(subset[static_cast<std::size_t>(i)])].transpose();
      Eigen::FullPivLU<MatR> lu(a);
      lu.setThreshold(1e-10);
      if (lu.rank() != d - 1) continue;
      VecR r = lu.kernel().col(0).normalized();
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (const auto& h : hs) {
        lo = std::min(lo, h.dot(r));
        hi = std::max(hi, h.dot(r));
      }
      if (lo < -1e-10) {
        if (hi > 1e-10) continue;
        r = -r;
      }
      if (std::max(std::abs(lo), std::abs(hi)) <= 1e-10) continue;  // lineality direction
      bool dup = false;
      for (const auto& e : rays)
        if ((e - r).norm() < 1e-9) dup = true;
      if (!dup) rays.push_back(r);
    }
    return rays;
  }

  Model model_ = Model::Ellipsoid;
  MatR q_;
  VecR chart_;
  VecR inside_;
  std::vector<VecR> halfspaces_;
  std::vector<VecR> rays_;
};

/// 1/2 log [a, p, q, b] with a, b the chord endpoints beyond p and q.
inline double hilbert_distance(const ConvexDomain& dom, const ProjPoint<double>& p, const ProjPoint<double>& q) {
  const VecR lp = dom.lift(p), lq = dom.lift(q);
  if ((lp - lq).norm() <= 1e-15 * lp.norm()) return 0.0;
  const auto [ta, tb] = dom.chord(lp, lq);
  // [a,p,q,b] = ((1 - ta) tb) / ((-ta)(tb - 1))
  return 0.5 * (std::log1p(1.0 / (-ta)) + std::log1p(1.0 / (tb - 1.0)));
}

/// Points at Hilbert arclength s_i = i L / (n - 1) along [p, q].
inline std::vector<ProjPoint<double>> segment_samples(const ConvexDomain& dom, const ProjPoint<double>& p,
                                                      const ProjPoint<double>& q, int samples, double* length = nullptr) {
  const VecR lp = dom.lift(p), lq = dom.lift(q);
  std::vector<ProjPoint<double>> out;
  if ((lp - lq).norm() <= 1e-15 * lp.norm()) {
    if (length) *length = 0.0;
    out.assign(static_cast<std::size_t>(samples), p);
    return out;
  }
  const auto [ta, tb] = dom.chord(lp, lq);
  const double len = 0.5 * (std::log1p(1.0 / (-ta)) + std::log1p(1.0 / (tb - 1.0)));
  if (length) *length = len;
  for (int i = 0; i < samples; ++i) {
    double t;
    if (i == 0) t = 0.0;
    else if (i == samples - 1) t = 1.0;
    else {
      const double e2s = std::exp(2.0 * len * i / (samples - 1));
      t = ta * tb * (1.0 - e2s) / (tb - e2s * ta);
    }
    out.emplace_back(VecR((1.0 - t) * lp + t * lq));
  }
  return out;
}

struct HausdorffCheck {
  double hausdorff_est = 0.0;
  double bound = 0.0;
  double slack = 0.0;
  bool ok = false;
};

/// Sampled Hausdorff distance between [p1,q1] and [p2,q2] against
/// max(d(p1,p2), d(q1,q2)). Sampling can overstate each one-sided distance by
/// at most one sample spacing, hence slack = 2 L_max / (samples - 1).
inline HausdorffCheck segment_hausdorff_check(const ConvexDomain& dom, const ProjPoint<double>& p1,
                                              const ProjPoint<double>& q1, const ProjPoint<double>& p2,
                                              const ProjPoint<double>& q2, int samples = 64) {
  if (samples < 2) throw Error(ErrorCode::DegenerateInput, "need at least two samples");
  double l1 = 0, l2 = 0;
  const auto s1 = segment_samples(dom, p1, q1, samples, &l1);
  const auto s2 = segment_samples(dom, p2, q2, samples, &l2);
  const std::size_t n = s1.size();
  std::vector<double> dmat(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) dmat[i * n + j] = hilbert_distance(dom, s1[i], s2[j]);
  double est = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = std::numeric_limits<double>::infinity(), col = row;
    for (std::size_t j = 0; j < n; ++j) {
      row = std::min(row, dmat[i * n + j]);
      col = std::min(col, dmat[j * n + i]);
    }
    est = std::max({est, row, col});
  }
  HausdorffCheck out;
  out.hausdorff_est = est;
  out.bound = std::max(hilbert_distance(dom, p1, p2), hilbert_distance(dom, q1, q2));
  out.slack = 2.0 * std::max(l1, l2) / (samples - 1);
  out.ok = out.hausdorff_est <= out.bound + out.slack;
  return out;
}

/// Omega* = {f : f > 0 on cl Omega}: half-spaces are the extreme rays of
/// Omega, the chart is an interior point of Omega.
inline ConvexDomain dual_domain(const ConvexDomain& dom) {
  if (dom.model() != ConvexDomain::Model::Polytope)
    throw Error(ErrorCode::UnsupportedDimension, "dual_domain is implemented for polytopes");
  try {
    return ConvexDomain::polytope(dom.interior_point(), dom.extreme_rays());
  } catch (const Error& e) {
    throw Error(ErrorCode::UnboundedDual, e.what());
  }
}

/// Vertex sets agree as points of projective space (unit representatives
/// inside the closed cones).
inline bool projectively_equal(const ConvexDomain& a, const ConvexDomain& b, double tol = 1e-8) {
  const auto va = a.projective_vertices(), vb = b.projective_vertices();
  if (va.size() != vb.size()) return false;
  for (const auto& x : va) {
    bool hit = false;
    for (const auto& y : vb) hit = hit || (x - y).norm() <= tol;
    if (!hit) return false;
  }
  return true;
}

/// Convex hull of points of P(R^3) taken in the affine chart {f != 0}, by
/// Andrew's monotone chain on chart coordinates.
inline ConvexDomain convex_hull_chart(const std::vector<ProjPoint<double>>& pts, const VecR& chart) {
  if (chart.size() != 3) throw Error(ErrorCode::UnsupportedDimension, "convex hulls are planar (d = 3) only");
  if (pts.size() < 3) throw Error(ErrorCode::DegenerateInput, "need at least three points");
  const VecR f = chart.normalized();
  // orthonormal basis of ker f for 2D coordinates
  Eigen::JacobiSVD<MatR> svd(MatR(f.transpose()), Eigen::ComputeFullV);
  const VecR e1 = svd.matrixV().col(1), e2 = svd.matrixV().col(2);
  struct P2 {
    double x, y;
    VecR lift;
  };
  std::vector<P2> q;
  for (const auto& p : pts) {
    if (p.dim() != 3) throw Error(ErrorCode::DimMismatch, "points must lie in P(R^3)");
    const double fv = f.dot(p.vec());
    if (std::abs(fv) < 1e-12) throw Error(ErrorCode::ChartVanishes, "chart vanishes on an input point");
    const VecR l = p.vec() / fv;
    q.push_back({e1.dot(l), e2.dot(l), l});
  }
  std::sort(q.begin(), q.end(), [](const P2& a, const P2& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  auto cross = [](const P2& o, const P2& a, const P2& b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); };
  std::vector<P2> hull;
  for (int pass = 0; pass < 2; ++pass) {
    const std::size_t start = hull.size();
    for (std::size_t k = 0; k < q.size(); ++k) {
      const P2& p = pass == 0 ? q[k] : q[q.size() - 1 - k];
      while (hull.size() >= start + 2 && cross(hull[hull.size() - 2], hull.back(), p) <= 0) hull.pop_back();
      hull.push_back(p);
    }
    hull.pop_back();
  }
  if (hull.size() < 3) throw Error(ErrorCode::DegenerateInput, "points are collinear");
  VecR centroid = VecR::Zero(3);
  for (const auto& h : hull) centroid += h.lift;
  std::vector<VecR> hs;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const VecR& a = hull[i].lift;
    const VecR& b = hull[(i + 1) % hull.size()].lift;
    VecR h = Eigen::Vector3d(a).cross(Eigen::Vector3d(b));
    if (h.dot(centroid) < 0) h = -h;
    hs.push_back(h);
  }
  return ConvexDomain::polytope(f, hs);
}

/// Tangent hyperplane of an ellipsoid at a boundary point: the covector Q x,
/// signed positive on Omega.
inline VecR support_data(const ConvexDomain& dom, const ProjPoint<double>& x, double tol = 1e-9) {
  if (dom.model() != ConvexDomain::Model::Ellipsoid)
    throw Error(ErrorCode::UnsupportedDimension, "support_data needs a smooth (ellipsoid) boundary");
  const VecR& v = x.vec();
  if (v.size() != dom.dim()) throw Error(ErrorCode::DimMismatch, "point dimension differs from domain");
  if (std::abs(v.dot(dom.form() * v)) > tol * dom.form().norm())
    throw Error(ErrorCode::NotOnBoundary, "point is not on the boundary quadric");
  VecR h = dom.form() * v;
  if (h.dot(dom.interior_point()) < 0) h = -h;
  const double margin = h.normalized().dot(dom.interior_point());
  if (!(margin > 1e-12)) throw Error(ErrorCode::NotOnBoundary, "tangent hyperplane meets the domain");
  return h.normalized();
}

struct PositivityReport {
  double min_pairing = std::numeric_limits<double>::infinity();
  bool ok = false;
};

/// min over ordered pairs x != y of xi^{d-1}(y)(xi^1(x)); the diagonal is excluded.
inline PositivityReport positivity_check(const std::vector<std::pair<VecR, VecR>>& lifts) {
  const std::size_t n = lifts.size();
  std::vector<double> row_min(n, std::numeric_limits<double>::infinity());
  parallel_for(n, [&](std::size_t i) {
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) row_min[i] = std::min(row_min[i], lifts[j].second.dot(lifts[i].first));
  });
  PositivityReport rep;
  for (double r : row_min) rep.min_pairing = std::min(rep.min_pairing, r);
  rep.ok = n >= 2 && rep.min_pairing > 0.0;
  return rep;
}

}  // namespace anosovlab::hilbert
