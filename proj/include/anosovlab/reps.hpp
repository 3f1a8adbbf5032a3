#pragma once

// Explicit representations: symmetric powers tau_d of SL(2,R), the
// Heisenberg lattice u(m,n) in SL(3,C) with its horoball/symmetric-space
// distortion table, the 4-dimensional semisimplification example, and the
// rank-one norm contraction along the diagonal flow.

#include "core.hpp"
#include "cuspgraph.hpp"
#include "flagdyn.hpp"
#include "matgeo.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/eigen.hpp>

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace anosovlab::reps {

enum class Sl2Kind { Elliptic, Parabolic, Hyperbolic };

inline const char* to_string(Sl2Kind k) {
  switch (k) {
    case Sl2Kind::Elliptic: return "elliptic";
    case Sl2Kind::Parabolic: return "parabolic";
    case Sl2Kind::Hyperbolic: return "hyperbolic";
  }
  return "?";
}

class Sl2Element {
 public:
  Sl2Element() : m_(MatR::Identity(2, 2)) {}
  explicit Sl2Element(const MatR& m, double det_tol = 1e-10) : m_(m) {
    if (m.rows() != 2 || m.cols() != 2) throw Error(ErrorCode::DimMismatch, "SL(2,R) element must be 2x2");
    if (!all_finite(m)) throw Error(ErrorCode::NonFiniteEntries, "non-finite entries");
    if (std::abs(m.determinant() - 1.0) > det_tol) throw Error(ErrorCode::NotSpecialLinear, "det != 1");
  }
  static Sl2Element diag(double s) {
    MatR m(2, 2);
    m << s, 0, 0, 1.0 / s;
    return Sl2Element(m);
  }

  const MatR& matrix() const { return m_; }
  Sl2Element inverse() const {
    MatR inv(2, 2);
    inv << m_(1, 1), -m_(0, 1), -m_(1, 0), m_(0, 0);
    return Sl2Element(inv);
  }
  Sl2Kind kind(double tol = 1e-9) const {
    const double tr = std::abs(m_.trace());
    if (tr > 2.0 + tol) return Sl2Kind::Hyperbolic;
    if (tr < 2.0 - tol) return Sl2Kind::Elliptic;
    return Sl2Kind::Parabolic;
  }

 private:
  MatR m_;
};

namespace detail {

/// tau_d from the entries (a b; c e) of g^{-1}: column i holds the
/// coefficients of (a x1 + b x2)^i (c x1 + e x2)^{d-1-i} by x1 power.
template <class T>
Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> symmetric_power_from_inverse(const T& a, const T& b, const T& c,
                                                                             const T& e, int d) {
  Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> out(d, d);
  for (int i = 0; i < d; ++i) {
    std::vector<T> poly{T(1)};
    auto mul = [&poly](const T& x1c, const T& x2c) {
      std::vector<T> next(poly.size() + 1, T(0));
      for (std::size_t j = 0; j < poly.size(); ++j) {
        next[j + 1] += poly[j] * x1c;
        next[j] += poly[j] * x2c;
      }
      poly.swap(next);
    };
    for (int j = 0; j < i; ++j) mul(a, b);
    for (int j = 0; j < d - 1 - i; ++j) mul(c, e);
    for (int j = 0; j < d; ++j) out(j, i) = poly[static_cast<std::size_t>(j)];
  }
  return out;
}

}  // namespace detail

/// tau_d(g): g acting by f -> f o g^{-1} on homogeneous polynomials of
/// degree d-1, basis e_i = x1^i x2^{d-1-i}. Then
/// tau_d(diag(s,1/s)) = diag(s^{d-1}, s^{d-3}, ..., s^{1-d}).
inline MatR sl2_symmetric_power(const Sl2Element& g, int d) {
  if (d < 2) throw Error(ErrorCode::DimMismatch, "tau_d needs d >= 2");
  const MatR inv = g.inverse().matrix();
  return detail::symmetric_power_from_inverse<double>(inv(0, 0), inv(0, 1), inv(1, 0), inv(1, 1), d);
}

/// Relative error of lambda_k(tau_d(g)) against lambda_1(g)^{d+1-2k}.
inline double tau_eigenvalue_error(const Sl2Element& g, int d) {
  const auto lam = matgeo::eigenvalue_moduli(sl2_symmetric_power(g, d));
  const double l1 = matgeo::eigenvalue_moduli(g.matrix()).front();
  double worst = 0.0;
  for (int k = 1; k <= d; ++k) {
    const double expect = std::pow(l1, d + 1 - 2 * k);
    worst = std::max(worst, std::abs(lam[static_cast<std::size_t>(k - 1)] - expect) / expect);
  }
  return worst;
}

/// u(m,n) = [[1, m, m^2/2 + i n], [0, 1, m], [0, 0, 1]].
inline MatC heisenberg(std::int64_t m, std::int64_t n) {
  using C = std::complex<double>;
  MatC u = MatC::Identity(3, 3);
  const double md = static_cast<double>(m);
  u(0, 1) = md;
  u(1, 2) = md;
  u(0, 2) = C(0.5 * md * md, static_cast<double>(n));
  return u;
}

/// Upper unitriangular 3x3 matrix over Z[i]/2 stored exactly: x = (0,1),
/// y = (1,2) real integers, and the (0,2) entry doubled as z2 = 2 z.
struct UnitriExact {
  std::int64_t x = 0, y = 0, z2re = 0, z2im = 0;
  bool operator==(const UnitriExact&) const = default;
  UnitriExact operator*(const UnitriExact& o) const {
    return {x + o.x, y + o.y, z2re + o.z2re + 2 * x * o.y, z2im + o.z2im};
  }
};

inline UnitriExact heisenberg_exact(std::int64_t m, std::int64_t n) { return {m, m, m * m, 2 * n}; }

/// Count of (m,n,m',n') in [-bound, bound]^4 where
/// u(m,n) u(m',n') != u(m+m', n+n') in exact arithmetic.
inline std::int64_t heisenberg_law_violations(std::int64_t bound) {
  std::int64_t bad = 0;
  for (std::int64_t m = -bound; m <= bound; ++m)
    for (std::int64_t mp = -bound; mp <= bound; ++mp)
      for (std::int64_t n = -bound; n <= bound; ++n) {
        const UnitriExact a = heisenberg_exact(m, n);
        for (std::int64_t np = -bound; np <= bound; ++np) {
          const UnitriExact p = a * heisenberg_exact(mp, np);
          bad += !(p == heisenberg_exact(m + mp, n + np));
        }
      }
  return bad;
}

/// Block realification [[A, -B], [B, A]] of a complex matrix A + iB.
inline MatR realify(const MatC& g) {
  const Eigen::Index d = g.rows();
  MatR r(2 * d, 2 * d);
  r << g.real(), -g.imag(), g.imag(), g.real();
  return r;
}

struct DistortionRow {
  int k = 0;  // exponent of the group element
  int n = 0;  // horoball level
  std::int64_t cusp_distance = 0;
  double symspace_displacement = 0.0;
  std::optional<std::int64_t> lower_bound;
  std::string family;  // "vertical": u(0,2^k); "shortcut": u(2^{n-1},0)
};

/// Rows (k, n) for u(0, 2^k), delta <= n <= min(k, n_max), followed by the
/// level-n shortcut rows u(2^{n-1}, 0) for 1 <= n <= n_max. Horoball
/// distances are over the Z^2 base (word length |m| + |n|).
inline std::vector<DistortionRow> heisenberg_distortion_table(int k_max, int n_max, int delta = 1) {
  if (k_max < 1 || k_max > 14) throw Error(ErrorCode::DegenerateInput, "k_max must lie in [1, 14]");
  if (n_max < 1 || n_max > 14) throw Error(ErrorCode::DegenerateInput, "n_max must lie in [1, 14]");
  const int top = std::max(k_max, n_max);
  const cuspgraph::HoroballGraph h({cuspgraph::BaseGroup::Z2, std::int64_t{1} << top}, top + 3);
  const MatC id = MatC::Identity(3, 3);
  std::vector<DistortionRow> rows;
  for (int k = 1; k <= k_max; ++k) {
    const std::int64_t big = std::int64_t{1} << k;
    const double disp = matgeo::symmetric_space_distance(id, heisenberg(0, big));
    for (int n = std::max(1, delta); n <= std::min(k, n_max); ++n) {
      DistortionRow r;
      r.k = k;
      r.n = n;
      r.family = "vertical";
      r.cusp_distance = cuspgraph::horoball_distance_fast(h, {{0, 0}, n}, {{0, big}, n});
      r.symspace_displacement = disp;
      r.lower_bound = 2 * k - 2 * n - 2;
      rows.push_back(r);
    }
  }
  for (int n = 1; n <= n_max; ++n) {
    const std::int64_t m = std::int64_t{1} << (n - 1);
    DistortionRow r;
    r.k = n - 1;
    r.n = n;
    r.family = "shortcut";
    r.cusp_distance = cuspgraph::horoball_distance_fast(h, {{0, 0}, n}, {{m, 0}, n});
    r.symspace_displacement = matgeo::symmetric_space_distance(id, heisenberg(m, 0));
    rows.push_back(r);
  }
  return rows;
}

/// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// Generator images plus relation words expected to act trivially.
struct RepresentationTable {
  std::map<std::string, MatR> images;
  std::vector<std::string> relations;

  /// Product of generator images; a letter followed by ' is inverted.
  MatR evaluate(const std::string& word) const {
    const Eigen::Index d = images.begin()->second.rows();
    MatR acc = MatR::Identity(d, d);
    for (std::size_t i = 0; i < word.size(); ++i) {
      const std::string key(1, word[i]);
      const auto it = images.find(key);
      if (it == images.end()) throw Error(ErrorCode::ParseError, "unknown generator '" + key + "'");
      const bool inv = i + 1 < word.size() && word[i + 1] == '\'';
      acc = acc * (inv ? MatR(it->second.inverse()) : it->second);
      if (inv) ++i;
    }
    return acc;
  }

  /// Each relation must evaluate to +-identity within tol.
  bool relations_hold(double tol = 1e-8) const {
    for (const auto& w : relations) {
      const MatR m = evaluate(w);
      const Eigen::Index d = m.rows();
      if ((m - MatR::Identity(d, d)).norm() > tol && (m + MatR::Identity(d, d)).norm() > tol) return false;
    }
    return true;
  }
};

inline MatR direct_sum(const MatR& a, const MatR& b) {
  MatR out = MatR::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

inline MatR parabolic_b() {
  MatR b(2, 2);
  b << 1, 1, 0, 1;
  return b;
}

struct SemisimplePair {
  RepresentationTable rho;
  RepresentationTable rho_ss;
};

/// rho(a) = id_2 + a~, rho(b) = b~ + b~; rho_ss(a) = rho(a), rho_ss(b) = id_2 + b~.
inline SemisimplePair semisimplification_pair(const Sl2Element& a_tilde = Sl2Element::diag(2.0)) {
  if (a_tilde.kind() != Sl2Kind::Hyperbolic) throw Error(ErrorCode::NotHyperbolic, "a~ must be hyperbolic");
  const MatR id2 = MatR::Identity(2, 2);
  SemisimplePair p;
  p.rho.images["a"] = direct_sum(id2, a_tilde.matrix());
  p.rho.images["b"] = direct_sum(parabolic_b(), parabolic_b());
  p.rho_ss.images["a"] = direct_sum(id2, a_tilde.matrix());
  p.rho_ss.images["b"] = direct_sum(id2, parabolic_b());
  return p;
}

struct SsCollapseReport {
  double limit_distance = 0.0;  // at the final n
  double fitted_c = 0.0;        // max of n * distance over the samples
  double rate_exponent = 0.0;   // -slope of log distance against log n
  bool rate_ok = false;
  std::vector<std::pair<std::int64_t, double>> samples;
};

/// Angle from rho(b^n) x to [x2 : 0 : x4 : 0] along log-spaced n up to n_final.
inline SsCollapseReport ss_collapse_limit_check(const flagdyn::ProjPoint<double>& x, std::int64_t n_final,
                                                int points = 13) {
  if (x.dim() != 4) throw Error(ErrorCode::DimMismatch, "point must lie in P(R^4)");
  const VecR& v = x.vec();
  if (v(1) == 0.0 && v(3) == 0.0) throw Error(ErrorCode::DegenerateInput, "x2 = x4 = 0 has no limit");
  if (n_final < 2) throw Error(ErrorCode::DegenerateInput, "need n >= 2");
  VecR lim(4);
  lim << v(1), 0.0, v(3), 0.0;
  const flagdyn::ProjPoint<double> target(lim);
  const MatR rb = semisimplification_pair().rho.images.at("b");

  std::vector<std::int64_t> ns;
  const double lo = std::log(std::min<double>(10.0, static_cast<double>(n_final) / 2.0));
  const double hi = std::log(static_cast<double>(n_final));
  for (int i = 0; i < points; ++i) {
    const auto n = static_cast<std::int64_t>(std::llround(std::exp(lo + (hi - lo) * i / (points - 1))));
    if (ns.empty() || n > ns.back()) ns.push_back(n);
  }
  ns.back() = n_final;

  SsCollapseReport rep;
  std::vector<double> lx, ly;
  for (const auto n : ns) {
    const MatR g = matgeo::power(rb, n);
    const double dist = flagdyn::angle_distance_proj(flagdyn::act(g, x), target);
    rep.samples.emplace_back(n, dist);
    rep.fitted_c = std::max(rep.fitted_c, dist * static_cast<double>(n));
    if (dist > 0) {
      lx.push_back(std::log(static_cast<double>(n)));
      ly.push_back(std::log(dist));
    }
  }
  rep.limit_distance = rep.samples.back().second;
  if (lx.size() >= 2) {
    rep.rate_exponent = -fit_slope(lx, ly);
    rep.rate_ok = rep.rate_exponent >= 0.8 && rep.rate_exponent <= 1.2;
  }
  return rep;
}

struct NormContractionRow {
  int k = 0;
  double t = 0.0;
  double ratio = 0.0;  // sup over (Y, Z) of [|Y|_t / |Z|_t] / [|Y|_0 / |Z|_0]
  double bound = 0.0;  // exp(-lambda t)
  bool ok = false;
};

struct NormContractionReport {
  int d = 2;
  std::vector<double> lambda;  // log lambda_k / lambda_{k+1} of tau_d(a_1), k = 1..d-1
  std::vector<NormContractionRow> rows;
  bool all_ok = true;
};

/// a_t = diag(e^{t/2}, e^{-t/2}); norms |.|_{g a_t v0} = |tau(g a_t)^{-1} .|.
/// For Y in tau(g) span(e_1..e_k) and Z in tau(g) span(e_{k+1}..e_d) the
/// worst ratio is mu_1 of the first block over mu_min of the second.
/// M = tau(g a_t)^{-1} tau(g) is formed in 50 digits: its entries span
/// e^{+-(d-1)t/2} and double rounding would swamp the small columns.
inline NormContractionReport equivariant_norm_contraction(int d, const std::vector<double>& t_samples,
                                                          const Sl2Element& conj = Sl2Element()) {
  if (d < 2) throw Error(ErrorCode::DimMismatch, "d >= 2 required");
  NormContractionReport rep;
  rep.d = d;
  const auto lam = matgeo::eigenvalue_moduli(sl2_symmetric_power(Sl2Element::diag(std::exp(0.5)), d));
  for (int k = 1; k < d; ++k)
    rep.lambda.push_back(std::log(lam[static_cast<std::size_t>(k - 1)] / lam[static_cast<std::size_t>(k)]));
  using R50 = boost::multiprecision::cpp_bin_float_50;
  using M50 = Eigen::Matrix<R50, Eigen::Dynamic, Eigen::Dynamic>;
  const MatR& gm = conj.matrix();
  const R50 ga = gm(0, 0), gb = gm(0, 1), gc = gm(1, 0), ge = gm(1, 1);
  const R50 det = ga * ge - gb * gc;
  // tau(g) needs the entries of g^{-1}
  const M50 tg = detail::symmetric_power_from_inverse<R50>(ge / det, -gb / det, -gc / det, ga / det, d);
  for (double t : t_samples) {
    // (g a_t)^{-1} = a_{-t} g^{-1}; tau of it needs the entries of g a_t
    const R50 s = exp(R50(t) / 2);
    const M50 inv_gat = detail::symmetric_power_from_inverse<R50>(ga * s, gb / s, gc * s, ge / s, d);
    const M50 m50 = inv_gat * tg;
    MatR m(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) m(i, j) = m50(i, j).convert_to<double>();
    for (int k = 1; k < d; ++k) {
      const auto top = matgeo::jacobi_svd(MatR(m.leftCols(k)));
      const auto bot = matgeo::jacobi_svd(MatR(m.rightCols(d - k)));
      NormContractionRow row;
      row.k = k;
      row.t = t;
      row.ratio = top.mu(0) / bot.mu(bot.mu.size() - 1);
      row.bound = std::exp(-rep.lambda[static_cast<std::size_t>(k - 1)] * t);
      row.ok = row.ratio <= row.bound * (1.0 + 1e-9);
      rep.all_ok = rep.all_ok && row.ok;
      rep.rows.push_back(row);
    }
  }
  return rep;
}

}  // namespace anosovlab::reps
