#pragma once

// Cartan and Jordan projections of SL(d, K) elements: singular values and
// their gaps, the Cartan attractor U_k(g), eigenvalue moduli, the proximal and
// weakly unipotent predicates, and the Riemannian distance on
// SL(d,K)/SU(d,K).

#include "core.hpp"
#include "points.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

namespace anosovlab::matgeo {

/// Validates the shape part of the square-matrix contract (d >= 2, finite).
template <class S>
void check_square(const Mat<S>& g) {
  if (g.rows() != g.cols() || g.rows() < 2)
    throw Error(ErrorCode::DimMismatch, "expected a square matrix of dimension >= 2");
  if (!all_finite(g)) throw Error(ErrorCode::NonFiniteEntries, "matrix has non-finite entries");
}

/// |det g| must be within det_tol of 1 for elements asserted to lie in SL(d,K).
template <class S>
void check_special_linear(const Mat<S>& g, double det_tol = 1e-9) {
  check_square(g);
  const double ad = std::abs(g.determinant());
  if (!(std::abs(ad - 1.0) <= det_tol))
    throw Error(ErrorCode::NotSpecialLinear, "|det| = " + std::to_string(ad));
}

template <class S>
struct SvdResult {
  VecR mu;     // descending
  Mat<S> u;    // left singular vectors (columns)
  Mat<S> v;    // right singular vectors (columns)
};

/// One-sided (Hestenes) Jacobi SVD of an m x n matrix with m >= n.
///
/// Column pairs of A V are rotated until mutually orthogonal; the column norms
/// are then the singular values. This keeps small singular values accurate to
/// high relative precision, which matters for powers of near-unipotent
/// elements where mu_d is many orders of magnitude below mu_1.
template <class S>
SvdResult<S> jacobi_svd(const Mat<S>& a, int max_sweeps = 80) {
  if (!all_finite(a)) throw Error(ErrorCode::NonFiniteEntries, "matrix has non-finite entries");
  const Eigen::Index m = a.rows(), n = a.cols();
  if (m < n) throw Error(ErrorCode::DimMismatch, "jacobi_svd expects rows >= cols");

  Mat<S> w = a;
  Mat<S> v = Mat<S>::Identity(n, n);
  // the dot product of orthogonal columns has a rounding floor near
  // sqrt(m) eps |wi| |wj|; a threshold below it never settles
  const double eps = static_cast<double>(m) * std::numeric_limits<double>::epsilon();

  bool converged = false;
  for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
    converged = true;
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const double alpha = w.col(i).squaredNorm();
        const double beta = w.col(j).squaredNorm();
        const S gamma = w.col(i).dot(w.col(j));
        const double g_abs = std::abs(gamma);
        if (g_abs == 0.0 || g_abs <= eps * std::sqrt(alpha * beta)) continue;
        converged = false;

        S phase = gamma / g_abs;  // unit modulus; 1 or -1 in the real case
        const double zeta = (beta - alpha) / (2.0 * g_abs);
        const double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;

        const S pc = conj_of(phase);
        Vec<S> wi = w.col(i);
        Vec<S> wj = w.col(j) * pc;
        w.col(i) = c * wi - s * wj;
        w.col(j) = s * wi + c * wj;
        Vec<S> vi = v.col(i);
        Vec<S> vj = v.col(j) * pc;
        v.col(i) = c * vi - s * vj;
        v.col(j) = s * vi + c * vj;
      }
    }
  }
  if (!converged) throw Error(ErrorCode::SvdFailure, "Jacobi sweeps did not converge");

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  VecR norms(n);
  for (Eigen::Index j = 0; j < n; ++j) norms(j) = w.col(j).norm();
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index x, Eigen::Index y) { return norms(x) > norms(y); });

  SvdResult<S> out;
  out.mu.resize(n);
  out.u = Mat<S>::Zero(m, n);
  out.v.resize(n, n);
  const double tiny = std::numeric_limits<double>::min();
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index j = order[static_cast<std::size_t>(k)];
    out.mu(k) = norms(j);
    out.v.col(k) = v.col(j);
    if (norms(j) > tiny) out.u.col(k) = w.col(j) / norms(j);
  }
  // Complete U for (numerically) zero singular values by Gram-Schmidt.
  for (Eigen::Index k = 0; k < n; ++k) {
    if (out.mu(k) > tiny) continue;
    for (Eigen::Index e = 0; e < m; ++e) {
      Vec<S> cand = Vec<S>::Unit(m, e);
      for (Eigen::Index l = 0; l < n; ++l)
        if (l != k) cand -= out.u.col(l) * out.u.col(l).dot(cand);
      const double nn = cand.norm();
      if (nn > 0.5) {
        out.u.col(k) = cand / nn;
        break;
      }
    }
  }
  return out;
}

/// Singular value data of g: descending mu, the left singular frame, and the
/// indices k (1-based) with mu_k / mu_{k+1} > 1 + gap_tol. Ties never count
/// as gaps.
template <class S>
struct SingularData {
  std::vector<double> mu;
  Mat<S> left;
  Mat<S> right;
  std::vector<int> gap_indices;
  double gap_tol = 1e-6;

  int dim() const { return static_cast<int>(mu.size()); }

  bool has_gap(int k) const {
    return std::find(gap_indices.begin(), gap_indices.end(), k) != gap_indices.end();
  }

  /// mu_k / mu_{k+1}; +inf when mu_{k+1} vanishes.
  double ratio(int k) const {
    const double lo = mu[static_cast<std::size_t>(k)];
    const double hi = mu[static_cast<std::size_t>(k - 1)];
    if (lo == 0.0) return hi > 0 ? std::numeric_limits<double>::infinity() : 1.0;
    return hi / lo;
  }

  /// U_k frame (first k left singular vectors); only defined on gap indices.
  Mat<S> frame(int k) const {
    if (!has_gap(k))
      throw Error(ErrorCode::NoSingularGap, "no singular gap at k = " + std::to_string(k));
    return left.leftCols(k);
  }
};

template <class S>
SingularData<S> singular_values(const Mat<S>& g, double gap_tol = 1e-6) {
  check_square(g);
  auto svd = jacobi_svd(g);
  SingularData<S> out;
  out.gap_tol = gap_tol;
  out.mu.assign(svd.mu.data(), svd.mu.data() + svd.mu.size());
  out.left = std::move(svd.u);
  out.right = std::move(svd.v);
  for (int k = 1; k < out.dim(); ++k) {
    if (out.ratio(k) > 1.0 + gap_tol) out.gap_indices.push_back(k);
  }
  return out;
}

/// U_k(g): the span of the k longest axes of the ellipsoid g(unit sphere).
template <class S>
flagdyn::GrassPoint<S> cartan_attractor(const Mat<S>& g, int k, double gap_tol = 1e-6) {
  const auto sd = singular_values(g, gap_tol);
  if (k < 1 || k >= sd.dim() || !sd.has_gap(k))
    throw Error(ErrorCode::NoSingularGap, "no singular gap at k = " + std::to_string(k));
  return flagdyn::GrassPoint<S>(sd.frame(k));
}

/// Complex Schur form g = Q T Q^H with the diagonal of T sorted by
/// descending modulus (stable among equal moduli).
struct OrderedSchur {
  MatC q;
  MatC t;
};

inline void swap_schur_adjacent(OrderedSchur& s, Eigen::Index i) {
  using C = std::complex<double>;
  const C a = s.t(i, i), b = s.t(i + 1, i + 1), x = s.t(i, i + 1);
  C v1 = x, v2 = b - a;
  const double nv = std::sqrt(std::norm(v1) + std::norm(v2));
  if (nv == 0.0) return;  // equal eigenvalues with no coupling: already in order
  v1 /= nv;
  v2 /= nv;
  Eigen::Matrix2cd g;
  g << v1, -std::conj(v2), v2, std::conj(v1);
  s.t.middleRows(i, 2) = (g.adjoint() * s.t.middleRows(i, 2)).eval();
  s.t.middleCols(i, 2) = (s.t.middleCols(i, 2) * g).eval();
  s.t(i + 1, i) = 0.0;
  s.t(i, i) = b;
  s.t(i + 1, i + 1) = a;
  s.q.middleCols(i, 2) = (s.q.middleCols(i, 2) * g).eval();
}

template <class S>
OrderedSchur ordered_schur(const Mat<S>& g) {
  check_square(g);
  const MatC gc = g.template cast<std::complex<double>>();
  Eigen::ComplexSchur<MatC> schur(gc, true);
  if (schur.info() != Eigen::Success) throw Error(ErrorCode::EigenFailure, "Schur iteration failed");
  OrderedSchur s{schur.matrixU(), schur.matrixT()};
  const Eigen::Index d = s.t.rows();
  // Bubble sort keeps the ordering stable among equal moduli.
  for (Eigen::Index pass = 0; pass < d; ++pass) {
    bool swapped = false;
    for (Eigen::Index i = 0; i + 1 < d; ++i) {
      if (std::abs(s.t(i, i)) < std::abs(s.t(i + 1, i + 1))) {
        swap_schur_adjacent(s, i);
        swapped = true;
      }
    }
    if (!swapped) break;
  }
  return s;
}

/// lambda_1 >= ... >= lambda_d, the moduli of the eigenvalues of g.
template <class S>
std::vector<double> eigenvalue_moduli(const Mat<S>& g) {
  check_square(g);
  const MatC gc = g.template cast<std::complex<double>>();
  Eigen::ComplexSchur<MatC> schur(gc, false);
  if (schur.info() != Eigen::Success) throw Error(ErrorCode::EigenFailure, "Schur iteration failed");
  const auto& t = schur.matrixT();
  std::vector<double> out(static_cast<std::size_t>(t.rows()));
  for (Eigen::Index i = 0; i < t.rows(); ++i) out[static_cast<std::size_t>(i)] = std::abs(t(i, i));
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

struct ProximalReport {
  bool proximal = false;
  double gap = 1.0;  // lambda_k / lambda_{k+1}
};

/// P_k-proximality: lambda_k / lambda_{k+1} > 1 + gap_tol. Total: returns
/// "not proximal" for out-of-range k instead of throwing.
template <class S>
ProximalReport is_proximal(const Mat<S>& g, int k, double gap_tol = 1e-6) {
  ProximalReport r;
  if (k < 1 || k >= g.rows()) return r;
  std::vector<double> lam;
  try {
    lam = eigenvalue_moduli(g);
  } catch (const Error&) {
    return r;
  }
  const double hi = lam[static_cast<std::size_t>(k - 1)], lo = lam[static_cast<std::size_t>(k)];
  r.gap = lo == 0.0 ? (hi > 0 ? std::numeric_limits<double>::infinity() : 1.0) : hi / lo;
  r.proximal = r.gap > 1.0 + gap_tol;
  return r;
}

template <class S>
bool is_weakly_unipotent(const Mat<S>& g, double tol = 1e-9) {
  for (double l : eigenvalue_moduli(g))
    if (std::abs(l - 1.0) > tol) return false;
  return true;
}

/// sqrt(sum_j log(mu_j(g^{-1} h))^2).
template <class S>
double symmetric_space_distance(const Mat<S>& g, const Mat<S>& h) {
  check_square(g);
  check_square(h);
  if (g.rows() != h.rows()) throw Error(ErrorCode::DimMismatch, "dimension mismatch");
  const Mat<S> rel = g.fullPivLu().solve(h);
  const auto svd = jacobi_svd(rel);
  double acc = 0.0;
  for (Eigen::Index j = 0; j < svd.mu.size(); ++j) {
    const double l = std::log(svd.mu(j));
    acc += l * l;
  }
  return std::sqrt(acc);
}

/// g^n by repeated squaring; negative n uses the inverse.
template <class S>
Mat<S> power(const Mat<S>& g, std::int64_t n) {
  Mat<S> base = n >= 0 ? Mat<S>(g) : Mat<S>(g.inverse());
  std::uint64_t e = n >= 0 ? static_cast<std::uint64_t>(n) : static_cast<std::uint64_t>(-n);
  Mat<S> acc = Mat<S>::Identity(g.rows(), g.cols());
  while (e) {
    if (e & 1u) acc = acc * base;
    e >>= 1u;
    if (e) base = base * base;
  }
  return acc;
}

}  // namespace anosovlab::matgeo
