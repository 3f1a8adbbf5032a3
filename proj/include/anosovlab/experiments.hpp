#pragma once

// Desk-scale experiments shared by the command line tool and the acceptance
// runner. Each returns a pass flag plus a JSON summary; tables come back as
// CsvTable so the caller decides where they go.

#include "cuspgraph.hpp"
#include "flagdyn.hpp"
#include "hilbert.hpp"
#include "io.hpp"
#include "matgeo.hpp"
#include "pappus.hpp"
#include "pingpong.hpp"
#include "reps.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace anosovlab::experiments {

using io::json;

struct Outcome {
  bool pass = false;
  json summary;
};

namespace detail {

class Stopwatch {
 public:
  Stopwatch() : t0_(std::chrono::steady_clock::now()) {}
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count(); }

 private:
  std::chrono::steady_clock::time_point t0_;
};

/// Gaussian matrix rescaled to |det| = 1 (rows swapped if det < 0).
template <class Rng>
MatR random_sl(int d, Rng& rng) {
  std::normal_distribution<double> n01;
  MatR g(d, d);
  double det = 0.0;
  do {
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) g(i, j) = n01(rng);
    det = g.determinant();
  } while (std::abs(det) < 1e-3);
  if (det < 0) g.row(0).swap(g.row(1));
  return g / std::pow(std::abs(det), 1.0 / d);
}

/// Random hyperbolic element k1 diag(s, 1/s) k2 with s in [1.1, 3].
template <class Rng>
reps::Sl2Element random_hyperbolic(Rng& rng) {
  std::uniform_real_distribution<double> ang(0.0, 2.0 * kPi), sd(1.1, 3.0);
  auto rot = [](double a) {
    MatR r(2, 2);
    r << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
    return r;
  };
  while (true) {
    const MatR g = rot(ang(rng)) * reps::Sl2Element::diag(sd(rng)).matrix() * rot(ang(rng));
    reps::Sl2Element e(g);
    if (e.kind() == reps::Sl2Kind::Hyperbolic) return e;
  }
}

}  // namespace detail

/// u(m,n) u(m',n') = u(m+m', n+n') in exact arithmetic over the full box.
inline Outcome heisenberg_law(std::int64_t bound = 100) {
  detail::Stopwatch sw;
  const auto bad = reps::heisenberg_law_violations(bound);
  const double secs = sw.seconds();
  Outcome o;
  o.pass = bad == 0 && secs < 1.0;
  o.summary = {{"bound", bound}, {"violations", bad}, {"seconds", secs}};
  return o;
}

/// Eigenvalue moduli of u(m,n), |m|,|n| <= bound, and of rho(b) all equal 1.
inline Outcome weak_unipotence(std::int64_t bound = 100, double tol = 1e-9) {
  double worst = 0.0;
  std::int64_t failures = 0;
  for (std::int64_t m = -bound; m <= bound; ++m)
    for (std::int64_t n = -bound; n <= bound; ++n) {
      for (double l : matgeo::eigenvalue_moduli(reps::heisenberg(m, n))) worst = std::max(worst, std::abs(l - 1.0));
      failures += !matgeo::is_weakly_unipotent(reps::heisenberg(m, n), tol);
    }
  const MatR rb = reps::semisimplification_pair().rho.images.at("b");
  double worst_b = 0.0;
  for (double l : matgeo::eigenvalue_moduli(rb)) worst_b = std::max(worst_b, std::abs(l - 1.0));
  Outcome o;
  o.pass = failures == 0 && worst <= tol && worst_b <= tol;
  o.summary = {{"bound", bound}, {"max_modulus_error_u", worst}, {"max_modulus_error_rho_b", worst_b},
               {"failures", failures}, {"tol", tol}};
  return o;
}

/// lambda_k(tau_d(g)) = lambda_1(g)^{d+1-2k} for random hyperbolic g.
inline Outcome tau_eigenvalue_law(int samples = 100, int d_max = 8, std::uint64_t seed = 1, double tol = 1e-7) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const auto g = detail::random_hyperbolic(rng);
    for (int d = 2; d <= d_max; ++d) worst = std::max(worst, reps::tau_eigenvalue_error(g, d));
  }
  Outcome o;
  o.pass = worst <= tol;
  o.summary = {{"samples", samples}, {"d_max", d_max}, {"seed", seed}, {"max_relative_error", worst}, {"tol", tol}};
  return o;
}

/// Hilbert distance from the center of the Klein ball equals artanh |x|.
inline Outcome klein_ball(int samples = 1000, std::uint64_t seed = 1, double tol = 1e-10) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  double worst = 0.0;
  for (int dim : {2, 3}) {
    const auto ball = hilbert::ConvexDomain::ellipsoid(VecR::Zero(dim), MatR::Identity(dim, dim));
    VecR o0 = VecR::Zero(dim + 1);
    o0(0) = 1.0;
    const flagdyn::ProjPoint<double> origin(o0);
    for (int i = 0; i < samples; ++i) {
      VecR dir(dim);
      for (int k = 0; k < dim; ++k) dir(k) = n01(rng);
      dir.normalize();
      const double r = 0.99 * std::pow(u01(rng), 1.0 / dim);
      VecR x(dim + 1);
      x(0) = 1.0;
      x.tail(dim) = r * dir;
      const double got = hilbert::hilbert_distance(ball, origin, flagdyn::ProjPoint<double>(x));
      worst = std::max(worst, std::abs(got - std::atanh(r)));
    }
  }
  Outcome o;
  o.pass = worst <= tol;
  o.summary = {{"samples_per_dim", samples}, {"dims", {2, 3}}, {"seed", seed}, {"max_abs_error", worst}, {"tol", tol}};
  return o;
}

/// Hausdorff distance of segments against the endpoint bound, in the disk
/// and in the square [-1,1]^2.
inline Outcome segment_hausdorff(int quadruples = 1000, int samples = 48, std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.95, 0.95);
  const auto disk = hilbert::ConvexDomain::ellipsoid(VecR::Zero(2), MatR::Identity(2, 2));
  MatR a(4, 2);
  a << 1, 0, -1, 0, 0, 1, 0, -1;
  const auto square = hilbert::ConvexDomain::polytope_chart(a, VecR::Ones(4));
  json per = json::object();
  std::int64_t total_violations = 0;
  for (const auto& [name, dom, round] : {std::tuple{"disk", &disk, true}, std::tuple{"square", &square, false}}) {
    auto point = [&]() {
      while (true) {
        const double x = u(rng), y = u(rng);
        if (round && x * x + y * y > 0.95 * 0.95) continue;
        return flagdyn::ProjPoint<double>((VecR(3) << 1.0, x, y).finished());
      }
    };
    std::int64_t violations = 0;
    double worst_excess = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < quadruples; ++i) {
      const auto p1 = point(), q1 = point(), p2 = point(), q2 = point();
      const auto c = hilbert::segment_hausdorff_check(*dom, p1, q1, p2, q2, samples);
      violations += !c.ok;
      worst_excess = std::max(worst_excess, c.hausdorff_est - c.bound - c.slack);
    }
    total_violations += violations;
    per[name] = {{"violations", violations}, {"max_excess_over_bound_plus_slack", worst_excess}};
  }
  Outcome o;
  o.pass = total_violations == 0;
  o.summary = {{"quadruples_per_domain", quadruples}, {"samples", samples}, {"seed", seed}, {"domains", per}};
  return o;
}

/// Lower bound 2k - 2n - 2 over the Z^2 horoball; exact agreement of the
/// closed form with BFS on the Z horoball (all same-level pairs, levels
/// 1..max_level); and the three-piece template (criterion 7) on every pair of
/// that sweep.
struct HoroballSweep {
  Outcome lower_bound;
  Outcome oracle;
  Outcome templates;
};

inline HoroballSweep horoball_sweep(int k_max = 12, std::int64_t radius = 1024, int max_level = 4, int delta = 1) {
  HoroballSweep out;
  {
    // Z^2: closed form at full size, BFS cross-check where it is affordable
    const int depth = k_max + 3;
    const cuspgraph::HoroballGraph h({cuspgraph::BaseGroup::Z2, std::int64_t{1} << k_max}, depth);
    std::int64_t failures = 0, checked = 0, tightest = std::numeric_limits<std::int64_t>::max();
    json rows = json::array();
    for (int k = 1; k <= k_max; ++k)
      for (int n = std::max(1, delta); n <= k; ++n) {
        const std::int64_t dist = cuspgraph::horoball_distance_fast(h, {{0, 0}, n}, {{0, std::int64_t{1} << k}, n});
        const std::int64_t lb = 2 * k - 2 * n - 2;
        failures += dist < lb;
        tightest = std::min(tightest, dist - lb);
        ++checked;
      }
    const int k_bfs = 6;
    const cuspgraph::HoroballGraph hs({cuspgraph::BaseGroup::Z2, std::int64_t{1} << k_bfs}, k_bfs + 3);
    std::int64_t bfs_mismatch = 0;
    for (int k = 1; k <= k_bfs; ++k)
      for (int n = 1; n <= k; ++n) {
        const cuspgraph::Vertex u{{0, 0}, n}, v{{0, std::int64_t{1} << k}, n};
        bfs_mismatch += cuspgraph::bfs_distance(hs, u, v).distance != cuspgraph::horoball_distance_fast(hs, u, v);
      }
    out.lower_bound.pass = failures == 0 && bfs_mismatch == 0;
    out.lower_bound.summary = {{"k_max", k_max},          {"delta", delta},
                               {"pairs", checked},        {"violations", failures},
                               {"min_slack", tightest},   {"bfs_crosscheck_k_max", k_bfs},
                               {"bfs_crosscheck_mismatches", bfs_mismatch}};
  }
  {
    int top = 1;
    while ((std::int64_t{1} << (top - 1)) < 2 * radius) ++top;
    const int depth = top + 2;
    const cuspgraph::HoroballGraph h({cuspgraph::BaseGroup::Z, radius}, depth);
    cuspgraph::BfsOracle oracle(h);
    detail::Stopwatch sw;
    double template_seconds = 0.0;
    std::int64_t pairs = 0, mismatches = 0, flagged = 0, template_fail = 0, max_horizontal = 0;
    for (int level = 1; level <= max_level; ++level)
      for (std::int64_t g = -radius; g <= radius; ++g) {
        const cuspgraph::Vertex src{{g, 0}, level};
        oracle.from(src);
        for (std::int64_t g2 = -radius; g2 <= radius; ++g2) {
          const cuspgraph::Vertex dst{{g2, 0}, level};
          const std::int64_t d = oracle.distance_to(dst);
          ++pairs;
          mismatches += d != cuspgraph::horoball_distance_fast(h, src, dst);
          flagged += oracle.may_be_overestimate(dst);
          detail::Stopwatch tw;
          try {
            const auto shape = cuspgraph::geodesic_shape(h, src, dst, d);
            max_horizontal = std::max<std::int64_t>(max_horizontal, shape.horizontal);
            template_fail += shape.horizontal > 3 || shape.total != d || shape.m_up != shape.m_down;
          } catch (const Error&) {
            ++template_fail;
          }
          template_seconds += tw.seconds();
        }
      }
    const double total = sw.seconds();
    const double bfs_seconds = total - template_seconds;
    out.oracle.pass = mismatches == 0 && bfs_seconds < 60.0;
    out.oracle.summary = {{"radius", radius},         {"depth", depth},
                          {"levels", max_level},      {"pairs", pairs},
                          {"mismatches", mismatches}, {"truncation_flagged", flagged},
                          {"bfs_seconds", bfs_seconds}};
    out.templates.pass = template_fail == 0;
    out.templates.summary = {{"pairs", pairs},
                             {"failures", template_fail},
                             {"max_horizontal", max_horizontal},
                             {"seconds", template_seconds}};
  }
  return out;
}

inline io::CsvTable distortion_csv(const std::vector<reps::DistortionRow>& rows) {
  io::CsvTable t({"k", "n", "cusp_distance", "symspace_displacement", "lower_bound", "family"});
  for (const auto& r : rows)
    t.add({std::to_string(r.k), std::to_string(r.n), std::to_string(r.cusp_distance), io::fmt(r.symspace_displacement),
           r.lower_bound ? std::to_string(*r.lower_bound) : "", r.family});
  return t;
}

/// Shortcut rows: cusp distance 1 for 2 <= n <= n_max while the symmetric
/// space displacement of u(2^{n-1}, 0) grows with slope > log 2 in n.
inline Outcome heisenberg_distortion(const std::vector<reps::DistortionRow>& rows, int n_max) {
  std::vector<double> xs, ys;
  std::int64_t bad = 0;
  for (const auto& r : rows) {
    if (r.family != "shortcut" || r.n < 2 || r.n > n_max) continue;
    bad += r.cusp_distance != 1;
    xs.push_back(r.n);
    ys.push_back(r.symspace_displacement);
  }
  const double slope = xs.size() >= 2 ? reps::fit_slope(xs, ys) : 0.0;
  const double threshold = 0.5 * 2.0 * std::log(2.0);
  std::int64_t lb_fail = 0;
  for (const auto& r : rows)
    if (r.lower_bound) lb_fail += r.cusp_distance < *r.lower_bound;
  Outcome o;
  o.pass = bad == 0 && !xs.empty() && slope > threshold;
  o.summary = {{"shortcut_rows", xs.size()},     {"shortcut_distance_not_1", bad},
               {"displacement_slope", slope},    {"slope_threshold", threshold},
               {"lower_bound_violations", lb_fail}};
  return o;
}

inline json certificate_json(const pingpong::SystemCertificate& c) {
  auto cc = [](const pingpong::ContractionCertificate& x) {
    return json{{"lipschitz_est", x.lipschitz_est}, {"image_radius", x.image_radius},
                {"net_points", x.net_points},       {"net_resolution", x.net_resolution},
                {"near_pairs", x.near_pairs},       {"ok", x.ok}};
  };
  json per = json::object();
  for (const auto& [name, x] : c.peripheral) per[name] = cc(x);
  json trail = json::array();
  for (const auto& [n, ok] : c.power.trail) trail.push_back({n, ok});
  return {{"status", "numerical evidence"},
          {"ok", c.ok},
          {"N", c.power.n},
          {"epsilon", c.epsilon},
          {"net", c.net_size},
          {"seed", c.seed},
          {"margins",
           {{"min_center_distance", c.admissible.min_center_distance},
            {"required_center_distance", 4.0 * c.epsilon},
            {"min_cross_transversality", c.admissible.min_cross_gap},
            {"gamma_plus", cc(c.power.plus)},
            {"gamma_minus", cc(c.power.minus)},
            {"peripheral", per}}},
          {"power_search", trail}};
}

/// Certificate for the shipped system, then freeness witnesses for random
/// reduced words and two-seed agreement of a boundary point.
inline Outcome pingpong_default(double eps = 0.05, int net = 4096, int n_max = 64, int words = 1000, int max_len = 12,
                                int boundary_len = 20, std::uint64_t seed = 1) {
  detail::Stopwatch sw;
  auto sys = pingpong::default_system(512, eps);
  const auto cert = pingpong::certify_system(sys, net, n_max, seed);
  Outcome o;
  o.summary["certificate"] = certificate_json(cert);
  if (!cert.ok) {
    o.summary["seconds"] = sw.seconds();
    return o;
  }
  const pingpong::WordContext ctx(sys);
  const auto seeds = pingpong::good_seeds(sys, 2);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> len(1, max_len);
  std::int64_t witnessed = 0;
  json dest = {{"gamma_plus", 0}, {"gamma_minus", 0}, {"U", 0}, {"none", 0}};
  for (int i = 0; i < words; ++i) {
    const auto w = pingpong::random_reduced_word(static_cast<std::size_t>(len(rng)), ctx.peripheral.size(), rng);
    const auto fw = pingpong::freeness_witness(sys, ctx, w, seeds.front());
    witnessed += fw.is_nontrivial;
    dest[fw.moved_to] = dest[fw.moved_to].get<int>() + 1;
  }
  const auto bw = pingpong::random_reduced_word(static_cast<std::size_t>(boundary_len), ctx.peripheral.size(), rng, true);
  const auto bp = pingpong::boundary_point(sys, ctx, bw, seeds[0], seeds.size() > 1 ? std::optional(seeds[1]) : std::nullopt);
  const double allowed = 2.0 * std::pow(eps, boundary_len) * pingpong::kFlagDiameter;
  const double secs = sw.seconds();
  o.pass = cert.ok && cert.power.n <= n_max && witnessed == words && seeds.size() > 1 && bp.seeds_agree && secs < 300;
  o.summary["words"] = words;
  o.summary["words_with_witness"] = witnessed;
  o.summary["destinations"] = dest;
  o.summary["boundary"] = {{"length", boundary_len},
                           {"seed_gap", bp.seed_gap.value_or(std::nan(""))},
                           {"allowed", allowed},
                           {"error_bound", bp.error_bound},
                           {"agree", bp.seeds_agree}};
  o.summary["seconds"] = secs;
  return o;
}

/// rho(b^n)[1:1:1:1] collapses onto [x2:0:x4:0] at rate 1/n; the
/// semisimplification stays P_1-divergent.
inline Outcome ss_collapse(std::int64_t n_final = 1000000, double tol = 1e-5) {
  const flagdyn::ProjPoint<double> x((VecR(4) << 1, 1, 1, 1).finished());
  const auto rep = reps::ss_collapse_limit_check(x, n_final);
  const MatR b_ss = reps::semisimplification_pair().rho_ss.images.at("b");
  bool increasing = true;
  double prev = 0.0;
  json ratios = json::array();
  for (int j = 0; j <= 20; ++j) {
    const auto sd = matgeo::singular_values(matgeo::power(b_ss, std::int64_t{1} << j));
    const double r = sd.ratio(1);
    ratios.push_back(r);
    if (j > 0 && !(r > prev)) increasing = false;
    prev = r;
  }
  Outcome o;
  o.pass = rep.limit_distance <= tol && rep.rate_ok && increasing;
  o.summary = {{"n_final", n_final},
               {"limit_distance", rep.limit_distance},
               {"rate_exponent", rep.rate_exponent},
               {"fitted_c", rep.fitted_c},
               {"mu1_over_mu2_at_2^j", ratios},
               {"strictly_increasing", increasing}};
  return o;
}

/// Random integer box: p, q, r, s in general position, t on pq, b on sr.
template <class Rng>
pappus::MarkedBox<pappus::Int> random_rational_box(Rng& rng) {
  using pappus::Int;
  std::uniform_int_distribution<int> c(-30, 30), w(1, 9);
  auto det3 = [](const pappus::Hom<Int>& a, const pappus::Hom<Int>& b, const pappus::Hom<Int>& d) {
    return pappus::pairing(pappus::cross(a, b), d);
  };
  while (true) {
    std::array<pappus::Hom<Int>, 4> v;
    for (auto& x : v) x = {Int(c(rng)), Int(c(rng)), Int(1)};
    bool general = true;
    for (int i = 0; i < 4 && general; ++i)
      for (int j = i + 1; j < 4 && general; ++j)
        for (int k = j + 1; k < 4 && general; ++k) general = det3(v[i], v[j], v[k]) != 0;
    if (!general) continue;
    const auto& [p, q, r, s] = v;
    const Int a1 = w(rng), a2 = w(rng), b1 = w(rng), b2 = w(rng);
    const pappus::Hom<Int> t{a1 * p[0] + a2 * q[0], a1 * p[1] + a2 * q[1], a1 * p[2] + a2 * q[2]};
    const pappus::Hom<Int> b{b1 * s[0] + b2 * r[0], b1 * s[1] + b2 * r[1], b1 * s[2] + b2 * r[2]};
    try {
      auto box = pappus::box_from_points<Int>(p, q, r, s, t, b);
      // the a-cycle needs pr, qs and the new corners to be non-degenerate
      (void)pappus::a_cycle(pappus::a_cycle(box));
      (void)pappus::dual_box(box);
      return box;
    } catch (const Error&) {
      continue;
    }
  }
}

/// a^3 = d^2 = 1 exactly (up to the flip) on the standard box and random
/// rational boxes; the depth-6 render tree keeps every incidence in floating
/// point.
inline Outcome pappus_relations(int random_boxes = 100, int depth = 6, std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  std::vector<pappus::MarkedBox<pappus::Int>> boxes{pappus::standard_box<pappus::Int>()};
  for (int i = 0; i < random_boxes; ++i) boxes.push_back(random_rational_box(rng));
  std::int64_t a3_fail = 0, d2_fail = 0;
  double exact_residual = 0.0;
  for (const auto& x : boxes) {
    const auto a3 = pappus::apply_word(x, "aaa");
    const auto d2 = pappus::apply_word(x, "dd");
    a3_fail += !(a3 == pappus::canonical(x));
    d2_fail += !(d2 == pappus::canonical(x));
    exact_residual = std::max({exact_residual, pappus::incidence_residual(a3), pappus::incidence_residual(d2)});
  }
  const auto nodes = pappus::render_tree(pappus::to_double(pappus::standard_box<pappus::Int>()), depth);
  double float_residual = 0.0;
  for (const auto& n : nodes) float_residual = std::max(float_residual, pappus::incidence_residual(n.box));
  Outcome o;
  o.pass = a3_fail == 0 && d2_fail == 0 && exact_residual == 0.0 && float_residual < 1e-9;
  o.summary = {{"boxes", boxes.size()},
               {"seed", seed},
               {"a_cubed_failures", a3_fail},
               {"d_squared_failures", d2_fail},
               {"exact_residual", exact_residual},
               {"render_depth", depth},
               {"render_boxes", nodes.size()},
               {"float_residual", float_residual}};
  return o;
}

/// ratio(t) <= e^{-lambda t} ratio(0) (1 + 1e-9) for tau_d, d <= d_max, on
/// the diagonal flow and on a conjugated copy.
inline Outcome norm_contraction(int d_max = 6, std::uint64_t seed = 1) {
  const std::vector<double> ts{0.0, 0.5, 1.0, 2.0, 4.0, 8.0};
  std::mt19937_64 rng(seed);
  const auto conj = detail::random_hyperbolic(rng);
  bool ok = true;
  double worst = 0.0;  // max of ratio(t) / (ratio(0) e^{-lambda t})
  std::int64_t rows = 0;
  for (int d = 2; d <= d_max; ++d)
    for (const auto& g : {reps::Sl2Element(), conj}) {
      const auto rep = reps::equivariant_norm_contraction(d, ts, g);
      for (const auto& r : rep.rows) {
        if (r.t == 0.0) continue;
        double r0 = 1.0;
        for (const auto& z : rep.rows)
          if (z.t == 0.0 && z.k == r.k) r0 = z.ratio;
        const double q = r.ratio / (r0 * r.bound);
        worst = std::max(worst, q);
        ok = ok && q <= 1.0 + 1e-9;
        ++rows;
      }
    }
  Outcome o;
  o.pass = ok;
  o.summary = {{"d_max", d_max}, {"t", {0.5, 1.0, 2.0, 4.0, 8.0}}, {"rows", rows}, {"max_normalized_ratio", worst}};
  return o;
}

/// dist(U_k(gh), U_k(g)) / [(mu_1/mu_d)(h) (mu_{k+1}/mu_k)(g)] over random
/// pairs in SL(4,R) whose g has a gap at k.
inline Outcome bps_sweep(int pairs = 10000, int d = 4, std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> kdist(1, d - 1);
  std::vector<double> ratios;
  ratios.reserve(static_cast<std::size_t>(pairs));
  while (static_cast<int>(ratios.size()) < pairs) {
    const MatR g = detail::random_sl(d, rng), h = detail::random_sl(d, rng);
    const int k = kdist(rng);
    const auto sg = matgeo::singular_values(g), sgh = matgeo::singular_values(MatR(g * h));
    if (!sg.has_gap(k) || !sgh.has_gap(k)) continue;
    ratios.push_back(flagdyn::bps_gap_bound_check(g, h, k).ratio);
  }
  std::vector<double> sorted = ratios;
  std::sort(sorted.begin(), sorted.end());
  auto q = [&](double p) { return sorted[static_cast<std::size_t>(p * (sorted.size() - 1))]; };
  Outcome o;
  o.pass = std::isfinite(sorted.back());
  o.summary = {{"pairs", pairs}, {"d", d},          {"seed", seed},     {"max_ratio", sorted.back()},
               {"median", q(0.5)}, {"p99", q(0.99)}, {"min", sorted.front()}};
  return o;
}

}  // namespace anosovlab::experiments
