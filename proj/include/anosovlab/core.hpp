#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace anosovlab {

inline constexpr const char* kVersion = "0.1.0";

enum class ErrorCode {
  NonFiniteEntries,
  SvdFailure,
  EigenFailure,
  NoSingularGap,
  DimMismatch,
  NotProximal,
  NotSpecialLinear,
  PointNotInterior,
  LineBoundaryIntersectionFailure,
  UnboundedDual,
  NotProperlyConvex,
  ChartVanishes,
  NotOnBoundary,
  UnsupportedDimension,
  DepthOverflow,
  VertexOutOfRange,
  TruncationTooShallow,
  NotHyperbolic,
  DegenerateInput,
  NotBiproximal,
  ULimitNotConverged,
  EmptyNet,
  PowerNotFound,
  SeedNotInGoodRegion,
  CoincidentArguments,
  IncidenceViolated,
  DegenerateConfiguration,
  IoError,
  ParseError,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonFiniteEntries: return "NonFiniteEntries";
    case ErrorCode::SvdFailure: return "SvdFailure";
    case ErrorCode::EigenFailure: return "EigenFailure";
    case ErrorCode::NoSingularGap: return "NoSingularGap";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::NotProximal: return "NotProximal";
    case ErrorCode::NotSpecialLinear: return "NotSpecialLinear";
    case ErrorCode::PointNotInterior: return "PointNotInterior";
    case ErrorCode::LineBoundaryIntersectionFailure: return "LineBoundaryIntersectionFailure";
    case ErrorCode::UnboundedDual: return "UnboundedDual";
    case ErrorCode::NotProperlyConvex: return "NotProperlyConvex";
    case ErrorCode::ChartVanishes: return "ChartVanishes";
    case ErrorCode::NotOnBoundary: return "NotOnBoundary";
    case ErrorCode::UnsupportedDimension: return "UnsupportedDimension";
    case ErrorCode::DepthOverflow: return "DepthOverflow";
    case ErrorCode::VertexOutOfRange: return "VertexOutOfRange";
    case ErrorCode::TruncationTooShallow: return "TruncationTooShallow";
    case ErrorCode::NotHyperbolic: return "NotHyperbolic";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::NotBiproximal: return "NotBiproximal";
    case ErrorCode::ULimitNotConverged: return "ULimitNotConverged";
    case ErrorCode::EmptyNet: return "EmptyNet";
    case ErrorCode::PowerNotFound: return "PowerNotFound";
    case ErrorCode::SeedNotInGoodRegion: return "SeedNotInGoodRegion";
    case ErrorCode::CoincidentArguments: return "CoincidentArguments";
    case ErrorCode::IncidenceViolated: return "IncidenceViolated";
    case ErrorCode::DegenerateConfiguration: return "DegenerateConfiguration";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Every module reports failures through this one exception type; `code()`
/// is what the CLI serializes into its error JSON.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

template <class S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <class S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

using MatR = Mat<double>;
using MatC = Mat<std::complex<double>>;
using VecR = Vec<double>;
using VecC = Vec<std::complex<double>>;

template <class S>
struct is_complex : std::false_type {};
template <class T>
struct is_complex<std::complex<T>> : std::true_type {};
template <class S>
inline constexpr bool is_complex_v = is_complex<S>::value;

template <class S>
inline S conj_of(const S& x) {
  if constexpr (is_complex_v<S>) return std::conj(x);
  else return x;
}

inline constexpr double kPi = 3.14159265358979323846;

template <class Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const auto& x = m(i, j);
      if constexpr (is_complex_v<typename Derived::Scalar>) {
        if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) return false;
      } else {
        if (!std::isfinite(x)) return false;
      }
    }
  return true;
}

/// Angle between unit vectors v and w in projective space, computed as
/// atan2(|w - <w,v>v|, |<v,w>|) so that nearby points keep full precision.
template <class S>
double unit_angle(const Vec<S>& v, const Vec<S>& w) {
  const S ip = v.dot(w);  // conjugate-linear in v
  const double c = std::abs(ip);
  const double s = (w - v * ip).norm();
  return std::atan2(s, c);
}

}  // namespace anosovlab
