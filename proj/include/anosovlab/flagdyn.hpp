#pragma once

// Angle metrics on projective space and Grassmannians, transversality, the
// linear action on k-planes, attracting/repelling data of proximal elements,
// and numerical diagnostics for strongly dynamics preserving sequences.

#include "core.hpp"
#include "matgeo.hpp"
#include "parallel.hpp"
#include "points.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <vector>

namespace anosovlab::flagdyn {

/// cos^{-1}(|<v,w>| / |v||w|), in [0, pi/2].
template <class S>
double angle_distance_proj(const ProjPoint<S>& p, const ProjPoint<S>& q) {
  if (p.dim() != q.dim()) throw Error(ErrorCode::DimMismatch, "projective points live in different dimensions");
  return unit_angle(p.vec(), q.vec());
}

/// Angle between the Pluecker lines of V and W.
///
/// |<wedge V, wedge W>| = |det(V^H W)| = prod cos(theta_i) over principal
/// angles, so the distance is evaluated from the principal angles directly.
/// Sines come from (I - V V^H) W to stay accurate for nearby planes.
template <class S>
double grassmann_distance(const GrassPoint<S>& v, const GrassPoint<S>& w) {
  if (v.dim() != w.dim() || v.k() != w.k())
    throw Error(ErrorCode::DimMismatch, "Grassmann points have different (d, k)");
  const Mat<S> vw = v.frame().adjoint() * w.frame();
  const Mat<S> perp = w.frame() - v.frame() * vw;
  const auto cos_svd = matgeo::jacobi_svd(Mat<S>(vw));
  const auto sin_svd = matgeo::jacobi_svd(perp);
  double prod_cos = 1.0;
  for (Eigen::Index i = 0; i < cos_svd.mu.size(); ++i) prod_cos *= std::min(1.0, cos_svd.mu(i));
  double log_cos2 = 0.0;
  for (Eigen::Index i = 0; i < sin_svd.mu.size(); ++i) {
    const double s = std::min(1.0, sin_svd.mu(i));
    log_cos2 += std::log1p(-s * s);
  }
  const double sin2 = -std::expm1(log_cos2);
  return std::atan2(std::sqrt(std::max(0.0, sin2)), prod_cos);
}

/// |det[V | W]| for orthonormal frames; 0 exactly when V + W != K^d.
template <class S>
double transversality_gap(const GrassPoint<S>& v, const GrassPoint<S>& w) {
  if (v.dim() != w.dim() || v.k() + w.k() != v.dim())
    throw Error(ErrorCode::DimMismatch, "transversality needs complementary dimensions");
  Mat<S> m(v.dim(), v.dim());
  m << v.frame(), w.frame();
  return std::abs(m.determinant());
}

template <class S>
GrassPoint<S> act(const Mat<S>& g, const GrassPoint<S>& v) {
  if (g.rows() != v.dim() || g.cols() != v.dim()) throw Error(ErrorCode::DimMismatch, "matrix/plane dimension mismatch");
  return GrassPoint<S>(Mat<S>(g * v.frame()));
}

template <class S>
ProjPoint<S> act(const Mat<S>& g, const ProjPoint<S>& p) {
  if (g.rows() != p.dim() || g.cols() != p.dim()) throw Error(ErrorCode::DimMismatch, "matrix/point dimension mismatch");
  return ProjPoint<S>(Vec<S>(g * p.vec()));
}

namespace detail {

/// Orthonormal basis of the g-invariant subspace attached to the k
/// eigenvalues of largest modulus (the leading Schur vectors after
/// reordering). Real inputs get a real basis of the same subspace.
template <class S>
Mat<S> dominant_invariant_subspace(const Mat<S>& g, int k) {
  const auto schur = matgeo::ordered_schur(g);
  const MatC qk = schur.q.leftCols(k);
  if constexpr (is_complex_v<S>) {
    return qk;
  } else {
    MatR both(qk.rows(), 2 * k);
    both << qk.real(), qk.imag();
    // both is d x 2k and may be wide; column space only, so Eigen's SVD will do
    Eigen::JacobiSVD<MatR> svd(both, Eigen::ComputeFullU);
    return svd.matrixU().leftCols(k);
  }
}

}  // namespace detail

template <class S>
struct ProximalFixedData {
  GrassPoint<S> attracting;  // k-plane
  GrassPoint<S> repelling;   // (d-k)-plane
};

/// Attracting k-plane (eigenvalues lambda_1..lambda_k) and the invariant
/// complement (lambda_{k+1}..lambda_d) of a P_k-proximal element.
template <class S>
ProximalFixedData<S> proximal_fixed_data(const Mat<S>& g, int k, double gap_tol = 1e-6) {
  matgeo::check_square(g);
  const int d = static_cast<int>(g.rows());
  if (!matgeo::is_proximal(g, k, gap_tol).proximal)
    throw Error(ErrorCode::NotProximal, "element is not P_" + std::to_string(k) + "-proximal");
  const Mat<S> ginv = g.fullPivLu().inverse();
  return {GrassPoint<S>(detail::dominant_invariant_subspace(g, k)),
          GrassPoint<S>(detail::dominant_invariant_subspace(ginv, d - k))};
}

/// Random d x k frame with iid Gaussian entries.
template <class S, class Rng>
Mat<S> random_frame(int d, int k, Rng& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  Mat<S> f(d, k);
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < d; ++i) {
      if constexpr (is_complex_v<S>) f(i, j) = S(n01(rng), n01(rng));
      else f(i, j) = n01(rng);
    }
  return f;
}

struct SdpTolerances {
  double gap_threshold = 1e6;
  double distance_threshold = 1e-4;
  int samples = 32;
  double min_transversality = 0.1;
  std::uint64_t seed = 1;
};

struct SdpRow {
  std::size_t index = 0;
  bool has_gap = false;
  double gap = std::numeric_limits<double>::quiet_NaN();             // mu_k / mu_{k+1}
  double dist_attractor = std::numeric_limits<double>::quiet_NaN();  // U_k(g_n) vs x.inner
  double dist_repeller = std::numeric_limits<double>::quiet_NaN();   // U_{d-k}(g_n^{-1}) vs y.outer
  double dist_samples = std::numeric_limits<double>::quiet_NaN();    // max over transverse samples
};

struct SdpReport {
  int k = 1;
  std::vector<SdpRow> rows;
  bool clause_gap = false;        // mu_k/mu_{k+1} non-decreasing and beyond threshold
  bool clause_cartan = false;     // U_k -> x.inner and U_{d-k}(g^{-1}) -> y.outer
  bool clause_transverse = false; // g_n V -> x.inner for sampled transverse V
  bool clauses_agree = false;
  std::size_t samples_used = 0;
};

/// Checks the three equivalent descriptions of a sequence converging to
/// (x.inner, y.outer) in the Grassmannian pair: divergence of mu_k/mu_{k+1}
/// with convergence of Cartan attractors, and convergence of g_n V for V
/// transverse to y.outer. Thresholds report trends; they prove nothing.
template <class S>
SdpReport sdp_test(const std::vector<Mat<S>>& seq, int k, const FlagPoint<S>& x, const FlagPoint<S>& y,
                   const SdpTolerances& tol = {}) {
  if (seq.empty()) throw Error(ErrorCode::DegenerateInput, "empty sequence");
  const int d = static_cast<int>(seq.front().rows());
  if (x.inner().k() != k || y.outer().k() != d - k || x.inner().dim() != d || y.outer().dim() != d)
    throw Error(ErrorCode::DimMismatch, "flags do not match (d, k)");

  std::mt19937_64 rng(tol.seed);
  std::vector<GrassPoint<S>> samples;
  for (int attempt = 0; attempt < 100 * tol.samples && static_cast<int>(samples.size()) < tol.samples; ++attempt) {
    GrassPoint<S> v(random_frame<S>(d, k, rng));
    if (transversality_gap(v, y.outer()) >= tol.min_transversality) samples.push_back(std::move(v));
  }

  SdpReport rep;
  rep.k = k;
  rep.samples_used = samples.size();
  rep.rows.resize(seq.size());
  parallel_for(seq.size(), [&](std::size_t n) {
    SdpRow row;
    row.index = n;
    const auto sd = matgeo::singular_values(seq[n]);
    row.gap = sd.ratio(k);
    row.has_gap = sd.has_gap(k);
    if (row.has_gap) {
      row.dist_attractor = grassmann_distance(GrassPoint<S>(sd.left.leftCols(k)), x.inner());
      // U_{d-k}(g^{-1}) is spanned by the right singular vectors of the d-k smallest mu.
      row.dist_repeller = grassmann_distance(GrassPoint<S>(sd.right.rightCols(d - k)), y.outer());
    }
    double worst = 0.0;
    for (const auto& v : samples) worst = std::max(worst, grassmann_distance(act(seq[n], v), x.inner()));
    row.dist_samples = samples.empty() ? std::numeric_limits<double>::quiet_NaN() : worst;
    rep.rows[n] = row;
  });

  const auto& last = rep.rows.back();
  bool monotone = true;
  for (std::size_t n = 1; n < rep.rows.size(); ++n)
    if (!(rep.rows[n].gap >= rep.rows[n - 1].gap * (1.0 - 1e-12))) monotone = false;
  rep.clause_gap = monotone && last.gap > tol.gap_threshold;
  rep.clause_cartan = last.has_gap && last.dist_attractor < tol.distance_threshold &&
                      last.dist_repeller < tol.distance_threshold;
  rep.clause_transverse = !samples.empty() && last.dist_samples < tol.distance_threshold;
  rep.clauses_agree = rep.clause_gap == rep.clause_cartan && rep.clause_cartan == rep.clause_transverse;
  return rep;
}

struct BpsCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
};

/// dist(U_k(gh), U_k(g)) against (mu_1/mu_d)(h) (mu_{k+1}/mu_k)(g).
template <class S>
BpsCheck bps_gap_bound_check(const Mat<S>& g, const Mat<S>& h, int k, double gap_tol = 1e-6) {
  const auto sg = matgeo::singular_values(g, gap_tol);
  const auto sgh = matgeo::singular_values(Mat<S>(g * h), gap_tol);
  const auto sh = matgeo::singular_values(h, gap_tol);
  BpsCheck out;
  out.lhs = grassmann_distance(GrassPoint<S>(sgh.frame(k)), GrassPoint<S>(sg.frame(k)));
  out.rhs = (sh.mu.front() / sh.mu.back()) / sg.ratio(k);
  out.ratio = out.lhs / out.rhs;
  return out;
}

}  // namespace anosovlab::flagdyn
