#pragma once

// Sampled certificates for the ping-pong construction on the flag manifold
// F = F_{1,d-1}(R^d): fixed flags, epsilon admissibility, contraction of
// gamma^{+-N} and of the peripheral elements, power search, freeness
// witnesses and boundary-map approximation.

#include "core.hpp"
#include "matgeo.hpp"
#include "parallel.hpp"
#include "points.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace anosovlab::pingpong {

/// A flag (line, hyperplane) stored as unit vectors (line, normal) with
/// <line, normal> = 0.
struct Flag {
  VecR line;
  VecR normal;
};

namespace detail {

inline double angle_raw(const double* v, const double* w, Eigen::Index d) {
  double c = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) c += v[i] * w[i];
  double s2 = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    const double r = w[i] - c * v[i];
    s2 += r * r;
  }
  return std::atan2(std::sqrt(s2), std::abs(c));
}

}  // namespace detail

/// dist_P(l1, l2) + dist_Gr(H1, H2); the hyperplane angle equals the angle
/// between normals.
inline double flag_distance(const Flag& a, const Flag& b) {
  const Eigen::Index d = a.line.size();
  return detail::angle_raw(a.line.data(), b.line.data(), d) + detail::angle_raw(a.normal.data(), b.normal.data(), d);
}

/// diam F for the sum metric.
inline constexpr double kFlagDiameter = kPi;

inline Flag make_flag(const VecR& line, const VecR& normal) {
  if (line.size() != normal.size()) throw Error(ErrorCode::DimMismatch, "line and normal differ in d");
  Flag f{line.normalized(), normal.normalized()};
  if (std::abs(f.line.dot(f.normal)) > 1e-9) throw Error(ErrorCode::DegenerateInput, "line is not in the hyperplane");
  f.normal -= f.line * f.line.dot(f.normal);  // clean up roundoff
  f.normal.normalize();
  return f;
}

/// (g l, g^{-T} n).
inline Flag act(const MatR& g, const MatR& g_inv_t, const Flag& f) {
  Flag out{(g * f.line).normalized(), (g_inv_t * f.normal).normalized()};
  return out;
}

inline Flag act(const MatR& g, const Flag& f) { return act(g, MatR(g.inverse().transpose()), f); }

/// min(|<l1, n2>|, |<l2, n1>|); zero exactly when not transverse.
inline double transversality_gap(const Flag& a, const Flag& b) {
  return std::min(std::abs(a.line.dot(b.normal)), std::abs(b.line.dot(a.normal)));
}

/// (U_1(g), U_{d-1}(g)) with the hyperplane given by U_1(g^{-T}). Pass the
/// inverse when it is known exactly; powers of unipotents are far too badly
/// conditioned to invert numerically.
inline Flag cartan_flag(const MatR& g, const MatR& g_inv) {
  const auto s1 = matgeo::jacobi_svd(g);
  const auto s2 = matgeo::jacobi_svd(MatR(g_inv.transpose()));
  VecR line = s1.u.col(0), normal = s2.u.col(0);
  normal -= line * line.dot(normal);
  return {line.normalized(), normal.normalized()};
}

inline Flag cartan_flag(const MatR& g) { return cartan_flag(g, MatR(g.inverse())); }

inline flagdyn::FlagPoint<double> to_flag_point(const Flag& f) {
  const Eigen::Index d = f.line.size();
  const MatR proj = MatR::Identity(d, d) - f.normal * f.normal.transpose();
  const auto svd = matgeo::jacobi_svd(proj);
  return flagdyn::FlagPoint<double>(flagdyn::GrassPoint<double>(MatR(f.line)),
                                    flagdyn::GrassPoint<double>(MatR(svd.u.leftCols(d - 1))), true);
}

namespace detail {

/// Minimizes phi(theta) = angle(x, c(theta)) + asin|<y, c(theta)>| over unit
/// c(theta) = cos(theta) a + sin(theta) b: dense sampling then golden-section
/// refinement of the best bracket.
inline double circle_min(const VecR& x, const VecR& y, const VecR& a, const VecR& b) {
  const Eigen::Index d = x.size();
  const double xa = x.dot(a), xb = x.dot(b), ya = y.dot(a), yb = y.dot(b);
  const double xx = x.squaredNorm();
  auto phi = [&](double t) {
    const double c = std::cos(t), s = std::sin(t);
    const double ip = c * xa + s * xb;  // <x, c(t)>
    const double perp2 = std::max(0.0, xx - ip * ip);
    const double ang = std::atan2(std::sqrt(perp2), std::abs(ip));
    const double yp = std::min(1.0, std::abs(c * ya + s * yb));
    return ang + std::asin(yp);
  };
  (void)d;
  constexpr int kSamples = 360;
  const double step = kPi / kSamples;
  int best = 0;
  double fbest = phi(0.0);
  for (int i = 1; i < kSamples; ++i) {
    const double f = phi(i * step);
    if (f < fbest) {
      fbest = f;
      best = i;
    }
  }
  double lo = (best - 1) * step, hi = (best + 1) * step;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c1 = hi - gr * (hi - lo), c2 = lo + gr * (hi - lo);
  double f1 = phi(c1), f2 = phi(c2);
  for (int it = 0; it < 60; ++it) {
    if (f1 < f2) {
      hi = c2;
      c2 = c1;
      f2 = f1;
      c1 = hi - gr * (hi - lo);
      f1 = phi(c1);
    } else {
      lo = c1;
      c1 = c2;
      f1 = f2;
      c2 = lo + gr * (hi - lo);
      f2 = phi(c2);
    }
  }
  return std::min({fbest, f1, f2});
}

/// Orthonormal pair spanning the plane in z^perp that contains the
/// projections of u and v (completed arbitrarily when they degenerate).
inline std::pair<VecR, VecR> plane_in_complement(const VecR& z, const VecR& u, const VecR& v) {
  const Eigen::Index d = z.size();
  std::vector<VecR> cands{u, v};
  for (Eigen::Index i = 0; i < d; ++i) cands.push_back(VecR::Unit(d, i));
  std::vector<VecR> basis;
  for (auto c : cands) {
    c -= z * z.dot(c);
    for (const auto& e : basis) c -= e * e.dot(c);
    if (c.norm() > 1e-8) basis.push_back(c.normalized());
    if (basis.size() == 2) break;
  }
  return {basis[0], basis[1]};
}

}  // namespace detail

/// Distance from F = (l, n) to the flags not transverse to F0 = (l0, n0):
/// min over l' in H0 of angle(l, l') + asin|<n, l'>| and over n' with
/// l0 in ker n' of angle(n, n') + asin|<l, n'>|. The searches run over a
/// circle, which is exact for d = 3 (H0 and l0^perp are planes).
inline double distance_to_nontransverse(const Flag& f, const Flag& f0) {
  const auto [a1, b1] = detail::plane_in_complement(f0.normal, f.line, f.normal);
  const double case_a = detail::circle_min(f.line, f.normal, a1, b1);
  const auto [a2, b2] = detail::plane_in_complement(f0.line, f.normal, f.line);
  const double case_b = detail::circle_min(f.normal, f.line, a2, b2);
  return std::min(case_a, case_b);
}

struct PingPongSystem {
  int d = 3;
  MatR gamma;
  std::vector<MatR> u_gens;
  std::vector<MatR> u_inv;  // inverses of u_gens, same order
  double epsilon = 0.05;
  int n_power = 1;
  Flag f_gamma_plus, f_gamma_minus, f_u;
  std::vector<int> u_powers{1, 2, 3, 4, 5, 6, 7, 8};  // U' elements checked: g^{+-k}, and products g_i g_j
};

struct FixedFlagData {
  Flag plus, minus, u;
  int u_doublings = 0;
  double u_last_step = 0.0;
};

/// F_gamma^{+-} from the attracting line and hyperplane of gamma^{+-1};
/// F_U as the limit of Cartan flags of u^{2^j} for u the product of the
/// peripheral generators.
inline FixedFlagData fixed_flag_data(const MatR& gamma, const std::vector<MatR>& u_gens,
                                     const std::vector<MatR>& u_inv, double tol = 1e-8) {
  const Eigen::Index d = gamma.rows();
  const MatR ginv = gamma.inverse();
  if (!matgeo::is_proximal(gamma, 1).proximal || !matgeo::is_proximal(ginv, 1).proximal)
    throw Error(ErrorCode::NotBiproximal, "gamma must be P_1-biproximal");
  auto dominant = [](const MatR& g) {
    const auto schur = matgeo::ordered_schur(g);
    VecR v = schur.q.col(0).real();
    if (v.norm() < 1e-8) v = schur.q.col(0).imag();
    return VecR(v.normalized());
  };
  FixedFlagData out;
  // attracting hyperplane of g = kernel of the dominant eigenvector of g^{-T}
  out.plus = make_flag(dominant(gamma), dominant(MatR(ginv.transpose())));
  out.minus = make_flag(dominant(ginv), dominant(MatR(gamma.transpose())));
  if (u_gens.empty()) throw Error(ErrorCode::DegenerateInput, "no peripheral generators");
  if (u_inv.size() != u_gens.size()) throw Error(ErrorCode::DimMismatch, "one inverse per generator");
  MatR u = MatR::Identity(d, d), ui = MatR::Identity(d, d);
  for (std::size_t i = 0; i < u_gens.size(); ++i) {
    u = u * u_gens[i];
    ui = u_inv[i] * ui;
  }
  // Unipotent u: u^n = sum_k n^k L^k / k! with L = log u, a polynomial in
  // n. Repeated squaring in a conjugated basis splits the Jordan block under
  // rounding and the powers blow up, so use the polynomial whenever it applies.
  const MatR nil = u - MatR::Identity(d, d);
  if (nil.norm() <= 1e-12 * u.norm())
    throw Error(ErrorCode::DegenerateInput, "peripheral product is the identity, no limit flag");
  MatR nil_pow = MatR::Identity(d, d);
  for (Eigen::Index k = 0; k < d; ++k) nil_pow = nil_pow * nil;
  const double scale = std::pow(1.0 + nil.norm(), static_cast<double>(d));
  const bool unipotent = nil_pow.norm() <= 1e-9 * scale;
  std::vector<MatR> log_pows;  // L^k / k!, k = 0 .. d-1
  if (unipotent) {
    MatR log_u = MatR::Zero(d, d), term = MatR::Identity(d, d);
    for (Eigen::Index k = 1; k < d; ++k) {
      term = term * nil;
      log_u += ((k % 2) ? 1.0 : -1.0) / static_cast<double>(k) * term;
    }
    MatR acc = MatR::Identity(d, d);
    for (Eigen::Index k = 0; k < d; ++k) {
      log_pows.push_back(acc);
      acc = acc * log_u / static_cast<double>(k + 1);
    }
  }
  // u^{+-n} divided by n^{d-1}; the scale does not move singular vectors
  auto poly_power = [&](double n, double sign) {
    MatR out = MatR::Zero(d, d);
    for (Eigen::Index k = 0; k < d; ++k)
      out += std::pow(sign, static_cast<double>(k)) * std::pow(n, static_cast<double>(k - (d - 1))) *
             log_pows[static_cast<std::size_t>(k)];
    return out;
  };
  Flag prev = cartan_flag(u, ui);
  MatR power = u, power_inv = ui;
  double n = 1.0;
  for (int j = 1; j <= 40; ++j) {
    n *= 2.0;
    if (unipotent) {
      power = poly_power(n, 1.0);
      power_inv = poly_power(n, -1.0);
    } else {
      power = power * power;
      power_inv = power_inv * power_inv;
    }
    if (!all_finite(power) || !all_finite(power_inv)) break;
    const Flag next = cartan_flag(power, power_inv);
    const double step = flag_distance(prev, next);
    prev = next;
    out.u_doublings = j;
    out.u_last_step = step;
    if (step < tol) {
      out.u = next;
      return out;
    }
  }
  throw Error(ErrorCode::ULimitNotConverged, "Cartan flags of u^(2^j) did not settle");
}

/// Net on F: lines on a Fibonacci hemisphere (random unit vectors when
/// d != 3) times equally spaced normals in the plane line^perp.
inline std::vector<Flag> flag_net(int d, int net_size, std::uint64_t seed) {
  if (net_size < 1) throw Error(ErrorCode::EmptyNet, "net size must be positive");
  // normal spacing pi/P against line spacing ~ sqrt(2 pi / L), L P = N
  const int per_line =
      std::clamp(static_cast<int>(std::lround(std::cbrt(kPi * net_size / 2.0))), 1, net_size);
  const int lines = (net_size + per_line - 1) / per_line;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  std::vector<Flag> out;
  out.reserve(static_cast<std::size_t>(lines * per_line));
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < lines; ++i) {
    VecR l(d);
    if (d == 3) {
      const double z = 1.0 - (i + 0.5) / lines;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      l << r * std::cos(golden * i), r * std::sin(golden * i), z;
    } else {
      for (int k = 0; k < d; ++k) l(k) = n01(rng);
      l.normalize();
    }
    const auto [a, b] = detail::plane_in_complement(l, VecR::Unit(d, 0), VecR::Unit(d, 1));
    for (int j = 0; j < per_line; ++j) {
      VecR n(d);
      if (d == 3) {
        const double t = kPi * j / per_line;
        n = std::cos(t) * a + std::sin(t) * b;
      } else {
        for (int k = 0; k < d; ++k) n(k) = n01(rng);
        n -= l * l.dot(n);
      }
      out.push_back({l, n.normalized()});
    }
  }
  return out;
}

struct AdmissibilityReport {
  bool ok = false;
  double min_center_distance = 0.0;
  double min_cross_gap = 0.0;
};

/// Random flag at distance < radius from c.
inline Flag random_flag_near(const Flag& c, double radius, std::mt19937_64& rng) {
  const Eigen::Index d = c.line.size();
  std::normal_distribution<double> n01;
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double total = radius * u01(rng);
  // moving the normal into line^perp can cost up to the line angle, so the
  // line gets at most half the budget
  const double split = 0.5 * u01(rng);
  VecR dir(d);
  for (Eigen::Index k = 0; k < d; ++k) dir(k) = n01(rng);
  dir -= c.line * c.line.dot(dir);
  VecR line = std::cos(total * split) * c.line + std::sin(total * split) * dir.normalized();
  // normal: rotate the old normal into line^perp, then by the remaining angle
  VecR n0 = c.normal - line * line.dot(c.normal);
  n0.normalize();
  VecR dir2(d);
  for (Eigen::Index k = 0; k < d; ++k) dir2(k) = n01(rng);
  dir2 -= line * line.dot(dir2);
  dir2 -= n0 * n0.dot(dir2);
  VecR normal = n0;
  const double rest = std::max(0.0, total - flag_distance(c, Flag{line.normalized(), n0}));
  if (dir2.norm() > 1e-12) normal = std::cos(rest) * n0 + std::sin(rest) * dir2.normalized();
  return {line.normalized(), normal.normalized()};
}

/// Balls B(F, 2 eps) around F_U, F_gamma^{+-} pairwise disjoint (centers
/// more than 4 eps apart) and sampled flags from different balls transverse.
inline AdmissibilityReport epsilon_admissible(const PingPongSystem& sys, int net_size, std::uint64_t seed = 1,
                                              double gap_tol = 1e-6) {
  const std::vector<Flag> centers{sys.f_u, sys.f_gamma_plus, sys.f_gamma_minus};
  AdmissibilityReport rep;
  rep.min_center_distance = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i + 1; j < 3; ++j)
      rep.min_center_distance = std::min(rep.min_center_distance, flag_distance(centers[i], centers[j]));
  const int per_ball = std::max(2, static_cast<int>(std::sqrt(static_cast<double>(net_size))) * 4);
  std::vector<std::vector<Flag>> balls(3);
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < 3; ++i) {
    balls[i].push_back(centers[i]);
    for (int k = 1; k < per_ball; ++k) balls[i].push_back(random_flag_near(centers[i], 2.0 * sys.epsilon, rng));
  }
  rep.min_cross_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i + 1; j < 3; ++j)
      for (const auto& a : balls[i])
        for (const auto& b : balls[j]) rep.min_cross_gap = std::min(rep.min_cross_gap, transversality_gap(a, b));
  rep.ok = rep.min_center_distance > 4.0 * sys.epsilon && rep.min_cross_gap > gap_tol;
  return rep;
}

struct ContractionCertificate {
  double lipschitz_est = 0.0;
  double image_radius = 0.0;
  double net_resolution = 0.0;
  std::size_t net_points = 0;
  std::size_t near_pairs = 0;
  bool ok = false;
};

/// Net flags outside the closed eps-neighbourhood of the flags not
/// transverse to `excluded`, with the pairs closer than twice the net
/// resolution (sampled covering radius of the region). Reused across every
/// element certified against the same excluded flag.
struct CertificationNet {
  std::vector<Flag> flags;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> near_pairs;
  std::vector<double> near_dist;
  double resolution = 0.0;
};

inline CertificationNet certification_net(int d, const Flag& excluded, double eps, int net_size,
                                          std::uint64_t seed = 1) {
  const auto raw = flag_net(d, net_size, seed);
  std::vector<char> keep(raw.size());
  parallel_for(raw.size(), [&](std::size_t i) { keep[i] = distance_to_nontransverse(raw[i], excluded) > eps; });
  CertificationNet out;
  for (std::size_t i = 0; i < raw.size(); ++i)
    if (keep[i]) out.flags.push_back(raw[i]);
  if (out.flags.empty()) throw Error(ErrorCode::EmptyNet, "no net flag outside the excluded neighbourhood");
  const auto& net = out.flags;
  const std::size_t n = net.size();
  // covering radius from random probes in the region; nearest-neighbour
  // spacing would only see the in-line normal step
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> n01;
  std::vector<Flag> probes;
  const std::size_t want = std::max<std::size_t>(256, n);
  for (std::size_t tries = 0; probes.size() < want && tries < 20 * want; ++tries) {
    VecR l(d), m(d);
    for (int k = 0; k < d; ++k) l(k) = n01(rng), m(k) = n01(rng);
    l.normalize();
    m -= l * l.dot(m);
    const Flag f{l, m.normalized()};
    if (distance_to_nontransverse(f, excluded) > eps) probes.push_back(f);
  }
  std::vector<double> cover(probes.size(), std::numeric_limits<double>::infinity());
  parallel_for(probes.size(), [&](std::size_t i) {
    for (std::size_t j = 0; j < n; ++j) cover[i] = std::min(cover[i], flag_distance(probes[i], net[j]));
  });
  out.resolution = cover.empty() ? 0.0 : *std::max_element(cover.begin(), cover.end());
  const double near = 2.0 * out.resolution;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dd = flag_distance(net[i], net[j]);
      if (dd > near || dd == 0.0) continue;
      out.near_pairs.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
      out.near_dist.push_back(dd);
    }
  return out;
}

/// Sampled check that g is eps-Lipschitz on the net's region with image
/// inside B(target, eps). Numerical evidence at the reported resolution.
inline ContractionCertificate certify_contraction(const MatR& g, const MatR& g_inv, const CertificationNet& net,
                                                  const Flag& target, double eps) {
  const MatR git = g_inv.transpose();
  const std::size_t n = net.flags.size();
  std::vector<Flag> img(n);
  parallel_for(n, [&](std::size_t i) { img[i] = act(g, git, net.flags[i]); });
  ContractionCertificate cert;
  cert.net_points = n;
  cert.net_resolution = net.resolution;
  cert.near_pairs = net.near_pairs.size();
  for (std::size_t i = 0; i < n; ++i) cert.image_radius = std::max(cert.image_radius, flag_distance(img[i], target));
  for (std::size_t p = 0; p < net.near_pairs.size(); ++p) {
    const auto [i, j] = net.near_pairs[p];
    cert.lipschitz_est = std::max(cert.lipschitz_est, flag_distance(img[i], img[j]) / net.near_dist[p]);
  }
  cert.ok = cert.lipschitz_est <= eps && cert.image_radius <= eps;
  return cert;
}

/// g is eps-Lipschitz on F minus the closed eps-neighbourhood of the flags
/// not transverse to `excluded`, with image inside B(target, eps).
inline ContractionCertificate certify_contraction(const MatR& g, const MatR& g_inv, const Flag& excluded,
                                                  const Flag& target, double eps, int net_size, std::uint64_t seed = 1) {
  return certify_contraction(g, g_inv, certification_net(static_cast<int>(g.rows()), excluded, eps, net_size, seed),
                             target, eps);
}

inline ContractionCertificate certify_contraction(const MatR& g, const Flag& excluded, const Flag& target, double eps,
                                                  int net_size, std::uint64_t seed = 1) {
  return certify_contraction(g, MatR(g.inverse()), excluded, target, eps, net_size, seed);
}

/// Fills sys.u_inv by LU when the caller did not supply exact inverses.
inline void complete_inverses(PingPongSystem& sys) {
  if (sys.u_inv.size() == sys.u_gens.size()) return;
  sys.u_inv.clear();
  for (const auto& g : sys.u_gens) sys.u_inv.push_back(g.inverse());
}

struct PeripheralElement {
  std::string name;
  MatR m, inv;
};

/// Elements of U' checked by the certificate: g_i^{+-k} for k in u_powers
/// and the products g_i g_j (i != j) of two distinct generators.
inline std::vector<PeripheralElement> peripheral_elements(const PingPongSystem& sys) {
  if (sys.u_inv.size() != sys.u_gens.size()) throw Error(ErrorCode::DimMismatch, "missing generator inverses");
  std::vector<PeripheralElement> out;
  for (std::size_t i = 0; i < sys.u_gens.size(); ++i)
    for (int k : sys.u_powers) {
      const MatR up = matgeo::power(sys.u_gens[i], k), um = matgeo::power(sys.u_inv[i], k);
      out.push_back({"u" + std::to_string(i) + "^" + std::to_string(k), up, um});
      out.push_back({"u" + std::to_string(i) + "^" + std::to_string(-k), um, up});
    }
  for (std::size_t i = 0; i < sys.u_gens.size(); ++i)
    for (std::size_t j = 0; j < sys.u_gens.size(); ++j)
      if (i != j)
        out.push_back({"u" + std::to_string(i) + "u" + std::to_string(j), sys.u_gens[i] * sys.u_gens[j],
                       sys.u_inv[j] * sys.u_inv[i]});
  return out;
}

struct PowerSearch {
  int n = 0;
  ContractionCertificate plus, minus;
  std::vector<std::pair<int, bool>> trail;  // (N, passed) in evaluation order
};

/// Smallest N <= n_max with gamma^N and gamma^{-N} both certified, by
/// doubling and then bisection (assumes the pass set is upward closed).
inline PowerSearch choose_power_N(const PingPongSystem& sys, double eps, int net_size, int n_max,
                                  std::uint64_t seed = 1) {
  if (!matgeo::is_proximal(sys.gamma, 1).proximal || !matgeo::is_proximal(MatR(sys.gamma.inverse()), 1).proximal)
    throw Error(ErrorCode::NotBiproximal, "gamma must be P_1-biproximal");
  PowerSearch out;
  const auto net_plus = certification_net(sys.d, sys.f_gamma_minus, eps, net_size, seed);
  const auto net_minus = certification_net(sys.d, sys.f_gamma_plus, eps, net_size, seed);
  auto test = [&](int n, ContractionCertificate* p, ContractionCertificate* m) {
    const MatR g = matgeo::power(sys.gamma, n), gi = matgeo::power(MatR(sys.gamma.inverse()), n);
    *p = certify_contraction(g, gi, net_plus, sys.f_gamma_plus, eps);
    *m = certify_contraction(gi, g, net_minus, sys.f_gamma_minus, eps);
    out.trail.emplace_back(n, p->ok && m->ok);
    return p->ok && m->ok;
  };
  ContractionCertificate p, m;
  int lo = 0, hi = 1;  // lo fails (or 0), hi to test
  while (true) {
    if (hi > n_max) hi = n_max;
    if (test(hi, &p, &m)) break;
    if (hi == n_max) throw Error(ErrorCode::PowerNotFound, "no N <= " + std::to_string(n_max) + " certifies");
    lo = hi;
    hi *= 2;
  }
  ContractionCertificate bp = p, bm = m;
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    if (test(mid, &p, &m)) {
      hi = mid;
      bp = p;
      bm = m;
    } else {
      lo = mid;
    }
  }
  out.n = hi;
  out.plus = bp;
  out.minus = bm;
  return out;
}

/// Distances from F to the three non-transverse loci; F lies in the good
/// region O when all exceed eps.
inline double good_region_margin(const PingPongSystem& sys, const Flag& f) {
  return std::min({distance_to_nontransverse(f, sys.f_u), distance_to_nontransverse(f, sys.f_gamma_plus),
                   distance_to_nontransverse(f, sys.f_gamma_minus)}) -
         sys.epsilon;
}

/// Net flags of O ordered by decreasing margin (deterministic seeds).
inline std::vector<Flag> good_seeds(const PingPongSystem& sys, int count, int net_size = 1024, std::uint64_t seed = 7) {
  auto net = flag_net(sys.d, net_size, seed);
  std::vector<std::pair<double, std::size_t>> ranked;
  for (std::size_t i = 0; i < net.size(); ++i) ranked.emplace_back(good_region_margin(sys, net[i]), i);
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<Flag> out;
  for (const auto& [m, i] : ranked) {
    if (m <= 0 || static_cast<int>(out.size()) >= count) break;
    // skip near-duplicates so two seeds are genuinely different
    bool far = true;
    for (const auto& f : out) far = far && flag_distance(f, net[i]) > 0.2;
    if (far) out.push_back(net[i]);
  }
  if (out.empty()) throw Error(ErrorCode::SeedNotInGoodRegion, "good region O has no net points");
  return out;
}

/// Letter of a word in S = {gamma^N, gamma^{-N}} u (U' \ {id}).
struct Letter {
  enum class Kind { GammaPlus, GammaMinus, Peripheral } kind = Kind::GammaPlus;
  std::size_t peripheral_index = 0;  // into peripheral_elements(sys)
  bool operator==(const Letter&) const = default;
};

inline bool is_peripheral(const Letter& l) { return l.kind == Letter::Kind::Peripheral; }

/// Random reduced word: no gamma^N next to gamma^{-N}, no two consecutive
/// peripheral letters. `boundary` additionally forbids ending in U.
inline std::vector<Letter> random_reduced_word(std::size_t length, std::size_t n_peripheral, std::mt19937_64& rng,
                                               bool boundary = false) {
  std::vector<Letter> w;
  std::uniform_int_distribution<std::size_t> pick(0, n_peripheral + 1);
  while (w.size() < length) {
    const std::size_t r = pick(rng);
    Letter l;
    if (r == 0) l.kind = Letter::Kind::GammaPlus;
    else if (r == 1) l.kind = Letter::Kind::GammaMinus;
    else {
      l.kind = Letter::Kind::Peripheral;
      l.peripheral_index = r - 2;
    }
    if (!w.empty()) {
      const Letter& prev = w.back();
      if (is_peripheral(prev) && is_peripheral(l)) continue;
      if ((prev.kind == Letter::Kind::GammaPlus && l.kind == Letter::Kind::GammaMinus) ||
          (prev.kind == Letter::Kind::GammaMinus && l.kind == Letter::Kind::GammaPlus))
        continue;
    }
    if (boundary && w.size() + 1 == length && is_peripheral(l)) continue;
    w.push_back(l);
  }
  return w;
}

struct WordContext {
  MatR gamma_n, gamma_n_inv;
  std::vector<PeripheralElement> peripheral;

  explicit WordContext(const PingPongSystem& sys)
      : gamma_n(matgeo::power(sys.gamma, sys.n_power)),
        gamma_n_inv(matgeo::power(MatR(sys.gamma.inverse()), sys.n_power)),
        peripheral(peripheral_elements(sys)) {}

  const MatR& matrix(const Letter& l) const {
    if (l.kind == Letter::Kind::GammaPlus) return gamma_n;
    if (l.kind == Letter::Kind::GammaMinus) return gamma_n_inv;
    return peripheral.at(l.peripheral_index).m;
  }
  const MatR& inverse(const Letter& l) const {
    if (l.kind == Letter::Kind::GammaPlus) return gamma_n_inv;
    if (l.kind == Letter::Kind::GammaMinus) return gamma_n;
    return peripheral.at(l.peripheral_index).inv;
  }
  std::string name(const Letter& l) const {
    if (l.kind == Letter::Kind::GammaPlus) return "g";
    if (l.kind == Letter::Kind::GammaMinus) return "G";
    return peripheral.at(l.peripheral_index).name;
  }
};

struct FreenessWitness {
  std::string moved_to;  // "gamma_plus", "gamma_minus", "U" or "none"
  bool is_nontrivial = false;
  double margin = 0.0;  // distance to the receiving ball's center
};

/// Applies rho(w) = x_1 ... x_n to a seed in O (rightmost letter first).
inline FreenessWitness freeness_witness(const PingPongSystem& sys, const WordContext& ctx,
                                        const std::vector<Letter>& w, const Flag& seed) {
  if (w.empty()) throw Error(ErrorCode::DegenerateInput, "word must be nonempty");
  if (good_region_margin(sys, seed) <= 0) throw Error(ErrorCode::SeedNotInGoodRegion, "seed is not in O");
  Flag f = seed;
  for (auto it = w.rbegin(); it != w.rend(); ++it) f = act(ctx.matrix(*it), MatR(ctx.inverse(*it).transpose()), f);
  FreenessWitness out;
  const std::pair<const char*, const Flag*> balls[] = {
      {"gamma_plus", &sys.f_gamma_plus}, {"gamma_minus", &sys.f_gamma_minus}, {"U", &sys.f_u}};
  out.moved_to = "none";
  out.margin = std::numeric_limits<double>::infinity();
  for (const auto& [name, c] : balls) {
    const double dist = flag_distance(f, *c);
    if (dist < sys.epsilon && dist < out.margin) {
      out.moved_to = name;
      out.margin = dist;
    }
  }
  out.is_nontrivial = good_region_margin(sys, f) <= 0;
  return out;
}

using Real50 = boost::multiprecision::cpp_bin_float_50;

namespace detail {

using HVec = std::vector<Real50>;
using HMat = std::vector<HVec>;  // row-major

inline HMat to_high(const MatR& m) {
  HMat out(static_cast<std::size_t>(m.rows()), HVec(static_cast<std::size_t>(m.cols())));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m(i, j);
  return out;
}

/// Inverse transpose by Gauss-Jordan with partial pivoting.
inline HMat inverse_transpose(const HMat& a) {
  const std::size_t n = a.size();
  HMat m = a, inv(n, HVec(n, Real50(0)));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (abs(m[r][c]) > abs(m[piv][c])) piv = r;
    std::swap(m[c], m[piv]);
    std::swap(inv[c], inv[piv]);
    const Real50 p = m[c][c];
    for (std::size_t j = 0; j < n; ++j) {
      m[c][j] /= p;
      inv[c][j] /= p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const Real50 f = m[r][c];
      for (std::size_t j = 0; j < n; ++j) {
        m[r][j] -= f * m[c][j];
        inv[r][j] -= f * inv[c][j];
      }
    }
  }
  HMat t(n, HVec(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) t[i][j] = inv[j][i];
  return t;
}

inline HVec apply_normalized(const HMat& m, const HVec& v) {
  HVec out(m.size(), Real50(0));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) out[i] += m[i][j] * v[j];
  Real50 n = 0;
  for (const auto& x : out) n += x * x;
  n = sqrt(n);
  for (auto& x : out) x /= n;
  return out;
}

inline Real50 angle_high(const HVec& v, const HVec& w) {
  Real50 c = 0;
  for (std::size_t i = 0; i < v.size(); ++i) c += v[i] * w[i];
  Real50 s2 = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Real50 r = w[i] - c * v[i];
    s2 += r * r;
  }
  return atan2(sqrt(s2), abs(c));
}

inline HVec to_high(const VecR& v) {
  HVec out(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) out[static_cast<std::size_t>(i)] = v(i);
  return out;
}

inline VecR to_double(const HVec& v) {
  VecR out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i].convert_to<double>();
  return out;
}

}  // namespace detail

struct BoundaryPoint {
  Flag flag;
  double error_bound = 0.0;  // eps^n diam F / (1 - eps)
  std::optional<double> seed_gap;  // distance to the image of the second seed
  bool seeds_agree = true;         // seed_gap <= 2 eps^n diam F
};

/// x_1 ... x_n(F_seed) evaluated in 50-digit arithmetic (the two-seed gap
/// eps^n diam F falls far below double precision for n around 20).
inline BoundaryPoint boundary_point(const PingPongSystem& sys, const WordContext& ctx, const std::vector<Letter>& word,
                                    const Flag& seed, const std::optional<Flag>& second_seed = std::nullopt) {
  if (good_region_margin(sys, seed) <= 0) throw Error(ErrorCode::SeedNotInGoodRegion, "seed is not in O");
  if (second_seed && good_region_margin(sys, *second_seed) <= 0)
    throw Error(ErrorCode::SeedNotInGoodRegion, "second seed is not in O");
  for (std::size_t i = 0; i + 1 < word.size(); ++i)
    if (is_peripheral(word[i]) && is_peripheral(word[i + 1]))
      throw Error(ErrorCode::DegenerateInput, "boundary words have no consecutive peripheral letters");

  std::vector<detail::HMat> mats, mats_it;
  for (const auto& l : word) {
    mats.push_back(detail::to_high(ctx.matrix(l)));
    mats_it.push_back(detail::inverse_transpose(mats.back()));
  }
  auto run = [&](const Flag& f) {
    detail::HVec line = detail::to_high(f.line), normal = detail::to_high(f.normal);
    for (std::size_t k = word.size(); k-- > 0;) {
      line = detail::apply_normalized(mats[k], line);
      normal = detail::apply_normalized(mats_it[k], normal);
    }
    return std::make_pair(line, normal);
  };
  const auto [line, normal] = run(seed);
  BoundaryPoint out;
  out.flag = {detail::to_double(line), detail::to_double(normal)};
  const double n = static_cast<double>(word.size());
  out.error_bound = std::pow(sys.epsilon, n) * kFlagDiameter / (1.0 - sys.epsilon);
  if (second_seed) {
    const auto [line2, normal2] = run(*second_seed);
    const Real50 gap = detail::angle_high(line, line2) + detail::angle_high(normal, normal2);
    out.seed_gap = gap.convert_to<double>();
    out.seeds_agree = gap <= 2 * pow(Real50(sys.epsilon), static_cast<int>(word.size())) * Real50(kFlagDiameter);
  }
  return out;
}

/// R J^M R^T with J the 3x3 Jordan block and R orthogonal, R e1 = (1,1,1)/sqrt3,
/// R e3 = (1,-2,1)/sqrt6; gamma = diag(4, 1, 1/4).
inline PingPongSystem default_system(int jordan_power = 512, double eps = 0.05) {
  PingPongSystem sys;
  sys.d = 3;
  sys.gamma = VecR((VecR(3) << 4.0, 1.0, 0.25).finished()).asDiagonal();
  Eigen::Matrix3d r;
  const Eigen::Vector3d e1 = Eigen::Vector3d(1, 1, 1).normalized();
  const Eigen::Vector3d e3 = Eigen::Vector3d(1, -2, 1).normalized();
  r.col(0) = e1;
  r.col(1) = e3.cross(e1);
  r.col(2) = e3;
  MatR j = MatR::Identity(3, 3);
  j(0, 1) = 1.0;
  j(1, 2) = 1.0;
  const MatR rr = r;
  sys.u_gens.push_back(rr * matgeo::power(j, jordan_power) * rr.transpose());
  MatR jinv = MatR::Identity(3, 3);
  jinv(0, 1) = -1.0;
  jinv(1, 2) = -1.0;
  jinv(0, 2) = 1.0;
  sys.u_inv.push_back(rr * matgeo::power(jinv, jordan_power) * rr.transpose());
  sys.epsilon = eps;
  const auto fixed = fixed_flag_data(sys.gamma, sys.u_gens, sys.u_inv);
  sys.f_gamma_plus = fixed.plus;
  sys.f_gamma_minus = fixed.minus;
  sys.f_u = fixed.u;
  return sys;
}

struct SystemCertificate {
  double epsilon = 0.0;
  int net_size = 0;
  std::uint64_t seed = 0;
  AdmissibilityReport admissible;
  PowerSearch power;
  std::vector<std::pair<std::string, ContractionCertificate>> peripheral;
  bool ok = false;
};

/// Full sampled certificate: admissibility, the power N, and contraction of
/// every checked element of U'.
inline SystemCertificate certify_system(PingPongSystem& sys, int net_size, int n_max, std::uint64_t seed = 1) {
  complete_inverses(sys);
  SystemCertificate cert;
  cert.epsilon = sys.epsilon;
  cert.net_size = net_size;
  cert.seed = seed;
  cert.admissible = epsilon_admissible(sys, net_size, seed);
  if (!cert.admissible.ok) return cert;
  cert.power = choose_power_N(sys, sys.epsilon, net_size, n_max, seed);
  sys.n_power = cert.power.n;
  bool all = true;
  const auto net_u = certification_net(sys.d, sys.f_u, sys.epsilon, net_size, seed);
  for (const auto& u : peripheral_elements(sys)) {
    auto c = certify_contraction(u.m, u.inv, net_u, sys.f_u, sys.epsilon);
    all = all && c.ok;
    cert.peripheral.emplace_back(u.name, c);
  }
  cert.ok = all;
  return cert;
}

}  // namespace anosovlab::pingpong
