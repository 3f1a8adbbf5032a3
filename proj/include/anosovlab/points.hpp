#pragma once

// Points of projective space, Grassmannians and two-step partial flags.

#include "core.hpp"

#include <algorithm>
#include <optional>
#include <vector>

namespace anosovlab::flagdyn {

/// A point of P(K^d), stored as a unit vector (defined up to phase).
template <class S>
class ProjPoint {
 public:
  ProjPoint() = default;
  explicit ProjPoint(Vec<S> v) : v_(std::move(v)) {
    if (v_.size() < 2) throw Error(ErrorCode::DimMismatch, "projective point needs d >= 2");
    if (!all_finite(v_)) throw Error(ErrorCode::NonFiniteEntries, "non-finite coordinates");
    const double n = v_.norm();
    if (n == 0.0) throw Error(ErrorCode::DegenerateInput, "zero vector has no projective class");
    v_ /= n;
  }

  int dim() const { return static_cast<int>(v_.size()); }
  const Vec<S>& vec() const { return v_; }

 private:
  Vec<S> v_;
};

inline std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// Lexicographic k-subsets of {0..d-1}; the Pluecker basis e_{i1} ^ ... ^ e_{ik}.
inline std::vector<std::vector<int>> k_subsets(int d, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  while (true) {
    out.push_back(idx);
    int i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == d - k + i) --i;
    if (i < 0) break;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
  return out;
}

/// Pluecker coordinates of the column span of `frame` (all k x k row minors).
template <class S>
Vec<S> pluecker_coordinates(const Mat<S>& frame) {
  const int d = static_cast<int>(frame.rows()), k = static_cast<int>(frame.cols());
  const auto subsets = k_subsets(d, k);
  Vec<S> out(static_cast<Eigen::Index>(subsets.size()));
  Mat<S> minor(k, k);
  for (std::size_t s = 0; s < subsets.size(); ++s) {
    for (int r = 0; r < k; ++r) minor.row(r) = frame.row(subsets[s][static_cast<std::size_t>(r)]);
    out(static_cast<Eigen::Index>(s)) = minor.determinant();
  }
  return out;
}

/// A point of Gr_k(K^d): an orthonormal d x k frame, plus its unit Pluecker
/// vector when C(d,k) is small (k <= 3 or d <= 8).
template <class S>
class GrassPoint {
 public:
  GrassPoint() = default;

  /// Orthonormalizes the columns of `frame`; they must be independent.
  explicit GrassPoint(const Mat<S>& frame) {
    const Eigen::Index d = frame.rows(), k = frame.cols();
    if (k < 1 || k > d) throw Error(ErrorCode::DimMismatch, "frame must be d x k with 1 <= k <= d");
    if (!all_finite(frame)) throw Error(ErrorCode::NonFiniteEntries, "non-finite frame");
    Eigen::ColPivHouseholderQR<Mat<S>> qr(frame);
    qr.setThreshold(1e-12);
    if (qr.rank() < k) throw Error(ErrorCode::DegenerateInput, "frame columns are dependent");
    Eigen::HouseholderQR<Mat<S>> hqr(frame);
    frame_ = hqr.householderQ() * Mat<S>::Identity(d, k);
    if (k <= 3 || d <= 8) {
      Vec<S> p = pluecker_coordinates(frame_);
      p /= p.norm();
      pluecker_ = std::move(p);
    }
  }

  static GrassPoint span_of_basis(int d, const std::vector<int>& indices) {
    Mat<S> f = Mat<S>::Zero(d, static_cast<Eigen::Index>(indices.size()));
    for (std::size_t j = 0; j < indices.size(); ++j) f(indices[j], static_cast<Eigen::Index>(j)) = S(1);
    return GrassPoint(f);
  }

  int dim() const { return static_cast<int>(frame_.rows()); }
  int k() const { return static_cast<int>(frame_.cols()); }
  const Mat<S>& frame() const { return frame_; }
  const std::optional<Vec<S>>& pluecker() const { return pluecker_; }

  /// Orthogonal projector onto the subspace.
  Mat<S> projector() const { return frame_ * frame_.adjoint(); }

 private:
  Mat<S> frame_;
  std::optional<Vec<S>> pluecker_;
};

/// A pair (inner k-plane, outer (d-k)-plane). `nested` asserts inner ⊂ outer.
template <class S>
class FlagPoint {
 public:
  FlagPoint() = default;
  FlagPoint(GrassPoint<S> inner, GrassPoint<S> outer, bool nested)
      : inner_(std::move(inner)), outer_(std::move(outer)), nested_(nested) {
    if (inner_.dim() != outer_.dim()) throw Error(ErrorCode::DimMismatch, "flag components differ in d");
    if (nested_) {
      const Mat<S> resid = inner_.frame() - outer_.projector() * inner_.frame();
      if (resid.norm() > 1e-9) throw Error(ErrorCode::DegenerateInput, "inner plane is not contained in outer plane");
    }
  }

  const GrassPoint<S>& inner() const { return inner_; }
  const GrassPoint<S>& outer() const { return outer_; }
  bool nested() const { return nested_; }

 private:
  GrassPoint<S> inner_;
  GrassPoint<S> outer_;
  bool nested_ = false;
};

}  // namespace anosovlab::flagdyn
