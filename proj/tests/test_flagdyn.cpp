#include "test_util.hpp"

#include <anosovlab/flagdyn.hpp>
#include <anosovlab/matgeo.hpp>
#include <anosovlab/reps.hpp>

#include <gtest/gtest.h>

using namespace anosovlab;
using flagdyn::FlagPoint;
using flagdyn::GrassPoint;
using flagdyn::ProjPoint;

namespace {

VecR e(int d, int i) { return VecR::Unit(d, i); }

GrassPoint<double> span(int d, std::vector<int> idx) { return GrassPoint<double>::span_of_basis(d, idx); }

// principal angles from Eigen's SVD of V^T W; Pluecker angle = acos(prod cos)
double principal_angle_oracle(const MatR& v, const MatR& w) {
  Eigen::JacobiSVD<MatR> svd(MatR(v.transpose() * w));
  double p = 1.0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) p *= std::min(1.0, svd.singularValues()(i));
  return std::acos(p);
}

// Pluecker matrix of wedge^k g from k x k minors
MatR exterior_power(const MatR& g, int k) {
  const auto subs = flagdyn::k_subsets(static_cast<int>(g.rows()), k);
  MatR out(subs.size(), subs.size());
  for (std::size_t i = 0; i < subs.size(); ++i)
    for (std::size_t j = 0; j < subs.size(); ++j) {
      MatR m(k, k);
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) m(a, b) = g(subs[i][a], subs[j][b]);
      out(i, j) = m.determinant();
    }
  return out;
}

double pluecker_angle(const VecR& a, const VecR& b) {
  const VecR u = a.normalized(), v = b.normalized();
  const double c = u.dot(v);
  return std::atan2((v - c * u).norm(), std::abs(c));  // acos loses ~1e-8 near 0
}

}  // namespace

TEST(ProjPoint, NormalizedAndErrors) {
  const ProjPoint<double> p(VecR::Constant(3, 2.0));
  EXPECT_NEAR(p.vec().norm(), 1.0, 1e-12);
  EXPECT_THROW(ProjPoint<double>(VecR::Zero(3)), Error);
  EXPECT_THROW(ProjPoint<double>(VecR::Ones(1)), Error);
}

TEST(AngleDistance, Examples) {
  const ProjPoint<double> e1(e(3, 0)), e2(e(3, 1));
  VecR mid(3);
  mid << 1, 1, 0;
  EXPECT_NEAR(flagdyn::angle_distance_proj(e1, e1), 0.0, 1e-15);
  EXPECT_NEAR(flagdyn::angle_distance_proj(e1, e2), kPi / 2, 1e-15);
  EXPECT_NEAR(flagdyn::angle_distance_proj(e1, ProjPoint<double>(mid)), kPi / 4, 1e-15);
  EXPECT_NEAR(flagdyn::angle_distance_proj(e1, ProjPoint<double>(VecR(-e(3, 0)))), 0.0, 1e-15);
  EXPECT_THROW(flagdyn::angle_distance_proj(e1, ProjPoint<double>(e(4, 0))), Error);
}

TEST(GrassPoint, FrameAndPluecker) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 50; ++t) {
    const MatR f = flagdyn::random_frame<double>(5, 2, rng);
    const GrassPoint<double> v(f);
    EXPECT_LT((v.frame().transpose() * v.frame() - MatR::Identity(2, 2)).norm(), 1e-10);
    ASSERT_TRUE(v.pluecker().has_value());
    // wedge of the raw columns, normalized, is the same line
    const VecR raw = flagdyn::pluecker_coordinates(f);
    EXPECT_LT(pluecker_angle(raw, *v.pluecker()), 1e-10);
    EXPECT_NEAR(v.pluecker()->norm(), 1.0, 1e-10);
  }
  MatR dep(3, 2);
  dep << 1, 2, 1, 2, 0, 0;
  EXPECT_THROW(GrassPoint<double>{dep}, Error);
}

TEST(GrassmannDistance, Examples) {
  EXPECT_NEAR(flagdyn::grassmann_distance(span(3, {0, 1}), span(3, {0, 1})), 0.0, 1e-15);
  EXPECT_NEAR(flagdyn::grassmann_distance(span(4, {0, 1}), span(4, {2, 3})), kPi / 2, 1e-15);
  EXPECT_THROW(flagdyn::grassmann_distance(span(4, {0}), span(4, {2, 3})), Error);
}

TEST(GrassmannDistance, RotatedPlaneAgainstPrincipalAngles) {
  for (double th : {1e-9, 1e-4, 0.1, 0.7, 1.3}) {
    MatR w(3, 2);
    w << 1, 0, 0, std::cos(th), 0, std::sin(th);
    const double got = flagdyn::grassmann_distance(span(3, {0, 1}), GrassPoint<double>(w));
    EXPECT_NEAR(got, th, 1e-12 * std::max(1.0, th));
    EXPECT_NEAR(got, principal_angle_oracle(span(3, {0, 1}).frame(), GrassPoint<double>(w).frame()), 1e-7);
  }
  std::mt19937_64 rng(4);
  for (int t = 0; t < 100; ++t) {
    const GrassPoint<double> a(flagdyn::random_frame<double>(5, 3, rng)), b(flagdyn::random_frame<double>(5, 3, rng));
    EXPECT_NEAR(flagdyn::grassmann_distance(a, b), principal_angle_oracle(a.frame(), b.frame()), 1e-9);
    EXPECT_NEAR(flagdyn::grassmann_distance(a, b), pluecker_angle(*a.pluecker(), *b.pluecker()), 1e-9);
  }
}

TEST(Transversality, ExamplesAndRankOracle) {
  EXPECT_NEAR(flagdyn::transversality_gap(span(3, {0}), span(3, {1, 2})), 1.0, 1e-15);
  EXPECT_NEAR(flagdyn::transversality_gap(span(3, {0}), span(3, {0, 1})), 0.0, 1e-15);
  EXPECT_THROW(flagdyn::transversality_gap(span(4, {0}), span(4, {1, 2})), Error);
  std::mt19937_64 rng(6);
  std::bernoulli_distribution coin(0.5);
  for (int t = 0; t < 200; ++t) {
    MatR a = flagdyn::random_frame<double>(4, 2, rng);
    MatR b = flagdyn::random_frame<double>(4, 2, rng);
    if (coin(rng)) b.col(0) = a.col(0) + 2 * a.col(1);  // force a shared line
    MatR both(4, 4);
    both << a, b;
    Eigen::FullPivLU<MatR> lu(both);
    lu.setThreshold(1e-10);
    const double gap = flagdyn::transversality_gap(GrassPoint<double>(a), GrassPoint<double>(b));
    EXPECT_EQ(gap > 1e-10, lu.rank() == 4);
    EXPECT_LE(gap, 1.0 + 1e-12);
  }
}

TEST(Act, ExamplesAndExteriorPowerOracle) {
  std::mt19937_64 rng(8);
  const GrassPoint<double> v(flagdyn::random_frame<double>(4, 2, rng));
  EXPECT_LT(flagdyn::grassmann_distance(flagdyn::act(MatR(MatR::Identity(4, 4)), v), v), 1e-12);
  MatR g3 = Eigen::Vector3d(2, 1, 0.5).asDiagonal();
  EXPECT_LT(flagdyn::grassmann_distance(flagdyn::act(g3, span(3, {0})), span(3, {0})), 1e-15);
  for (int t = 0; t < 50; ++t) {
    const MatR g = testutil::random_sl(4, rng), h = testutil::random_sl(4, rng);
    for (int k = 1; k <= 3; ++k) {
      const GrassPoint<double> w(flagdyn::random_frame<double>(4, k, rng));
      const VecR want = exterior_power(g, k) * (*w.pluecker());
      EXPECT_LT(pluecker_angle(*flagdyn::act(g, w).pluecker(), want), 1e-9);
      EXPECT_LT(flagdyn::grassmann_distance(flagdyn::act(MatR(g * h), w), flagdyn::act(g, flagdyn::act(h, w))), 1e-10);
    }
  }
  EXPECT_THROW(flagdyn::act(g3, span(4, {0})), Error);
}

TEST(FlagPoint, Nesting) {
  EXPECT_NO_THROW(FlagPoint<double>(span(3, {0}), span(3, {0, 1}), true));
  EXPECT_THROW(FlagPoint<double>(span(3, {2}), span(3, {0, 1}), true), Error);
  EXPECT_NO_THROW(FlagPoint<double>(span(3, {2}), span(3, {0, 1}), false));
}

TEST(ProximalFixedData, DiagonalAndConjugate) {
  const MatR g = Eigen::Vector3d(3, 2, 1.0 / 6).asDiagonal();
  const auto f1 = flagdyn::proximal_fixed_data(g, 1);
  EXPECT_LT(flagdyn::grassmann_distance(f1.attracting, span(3, {0})), 1e-12);
  EXPECT_LT(flagdyn::grassmann_distance(f1.repelling, span(3, {1, 2})), 1e-12);
  const auto f2 = flagdyn::proximal_fixed_data(g, 2);
  EXPECT_LT(flagdyn::grassmann_distance(f2.attracting, span(3, {0, 1})), 1e-12);
  EXPECT_LT(flagdyn::grassmann_distance(f2.repelling, span(3, {2})), 1e-12);

  std::mt19937_64 rng(10);
  for (int t = 0; t < 20; ++t) {
    const MatR h = testutil::random_sl(3, rng);
    const MatR c = h * g * h.inverse();
    for (int k = 1; k <= 2; ++k) {
      const auto fc = flagdyn::proximal_fixed_data(c, k);
      const auto fg = flagdyn::proximal_fixed_data(g, k);
      EXPECT_LT(flagdyn::grassmann_distance(fc.attracting, flagdyn::act(h, fg.attracting)), 1e-7);
      EXPECT_LT(flagdyn::grassmann_distance(fc.repelling, flagdyn::act(h, fg.repelling)), 1e-7);
      EXPECT_GT(flagdyn::transversality_gap(fc.attracting, fc.repelling), 1e-6);
    }
  }
  try {
    flagdyn::proximal_fixed_data(MatR(MatR::Identity(3, 3)), 1);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::NotProximal);
  }
}

TEST(ProximalFixedData, ComplexConjugatePairBelowTop) {
  // real matrix whose repelling block carries a rotation
  MatR g = MatR::Zero(4, 4);
  g(0, 0) = 4.0;
  g(1, 1) = 1.0;
  g.block(2, 2, 2, 2) << 0.5 * std::cos(1.0), -0.5 * std::sin(1.0), 0.5 * std::sin(1.0), 0.5 * std::cos(1.0);
  const auto f = flagdyn::proximal_fixed_data(g, 2);
  EXPECT_LT(flagdyn::grassmann_distance(f.attracting, span(4, {0, 1})), 1e-10);
  EXPECT_LT(flagdyn::grassmann_distance(f.repelling, span(4, {2, 3})), 1e-10);
}

TEST(Sdp, DiagonalSequencePasses) {
  std::vector<MatR> seq;
  for (int n = 1; n <= 40; ++n) seq.push_back(Eigen::Vector3d(std::ldexp(1.0, n), 1, std::ldexp(1.0, -n)).asDiagonal());
  const FlagPoint<double> x(span(3, {0}), span(3, {1, 2}), false);
  const auto rep = flagdyn::sdp_test(seq, 1, x, x);
  EXPECT_TRUE(rep.clause_gap);
  EXPECT_TRUE(rep.clause_cartan);
  EXPECT_TRUE(rep.clause_transverse);
  EXPECT_TRUE(rep.clauses_agree);
  EXPECT_GT(rep.samples_used, 0u);
}

TEST(Sdp, IdentityFails) {
  std::vector<MatR> seq(10, MatR::Identity(3, 3));
  const FlagPoint<double> x(span(3, {0}), span(3, {1, 2}), false);
  const auto rep = flagdyn::sdp_test(seq, 1, x, x);
  EXPECT_FALSE(rep.clause_gap);
  EXPECT_FALSE(rep.clause_cartan);
  EXPECT_FALSE(rep.clause_transverse);
  EXPECT_TRUE(rep.clauses_agree);
  EXPECT_FALSE(rep.rows.back().has_gap);
  EXPECT_THROW(flagdyn::sdp_test(std::vector<MatR>{}, 1, x, x), Error);
}

TEST(Sdp, SemisimplifiedParabolicRate) {
  // rho_ss(b^n) = id_2 + [[1,n],[0,1]]: attracting line e3, repelling hyperplane e1,e2,e3
  const MatR b = reps::semisimplification_pair().rho_ss.images.at("b");
  std::vector<MatR> seq;
  std::vector<double> ns;
  for (int j = 4; j <= 20; ++j) {
    seq.push_back(matgeo::power(b, std::int64_t{1} << j));
    ns.push_back(std::ldexp(1.0, j));
  }
  const FlagPoint<double> x(span(4, {2}), span(4, {0, 1, 2}), false);
  flagdyn::SdpTolerances tol;
  tol.gap_threshold = 1e5;
  tol.distance_threshold = 1e-4;
  const auto rep = flagdyn::sdp_test(seq, 1, x, x, tol);
  EXPECT_TRUE(rep.clause_gap);
  EXPECT_TRUE(rep.clause_cartan);
  EXPECT_TRUE(rep.clause_transverse);
  // sampled distance decays like C/n
  double worst = 0.0;
  for (std::size_t i = 0; i < rep.rows.size(); ++i) worst = std::max(worst, rep.rows[i].dist_samples * ns[i]);
  for (std::size_t i = 0; i < rep.rows.size(); ++i) EXPECT_LE(rep.rows[i].dist_samples, worst / ns[i] * (1 + 1e-12));
  EXPECT_LT(rep.rows.back().dist_samples * ns.back(), 1.2 * rep.rows[rep.rows.size() / 2].dist_samples * ns[ns.size() / 2]);
}

TEST(Bps, Examples) {
  std::mt19937_64 rng(12);
  const MatR g = testutil::random_sl(4, rng);
  const auto sd = matgeo::singular_values(g);
  ASSERT_TRUE(sd.has_gap(1));
  const auto same = flagdyn::bps_gap_bound_check(g, MatR(MatR::Identity(4, 4)), 1);
  EXPECT_NEAR(same.lhs, 0.0, 1e-12);

  const MatR big = Eigen::Vector4d(1e4, 1, 1, 1e-4).asDiagonal();
  MatR h = MatR::Identity(4, 4);
  h(0, 1) = h(2, 3) = 1e-3;
  const auto near = flagdyn::bps_gap_bound_check(big, h, 1);
  EXPECT_LT(near.ratio, 0.1);
  // direct: U_1(gh) is the top left singular vector of gh
  Eigen::JacobiSVD<MatR> svd(MatR(big * h), Eigen::ComputeFullU);
  const double lhs = flagdyn::angle_distance_proj(ProjPoint<double>(VecR(svd.matrixU().col(0))), ProjPoint<double>(e(4, 0)));
  EXPECT_NEAR(near.lhs, lhs, 1e-12);

  EXPECT_THROW(flagdyn::bps_gap_bound_check(MatR(MatR::Identity(4, 4)), h, 1), Error);
}

TEST(Bps, RandomSweepBounded) {
  std::mt19937_64 rng(14);
  double worst = 0.0;
  int used = 0;
  for (int t = 0; t < 10000; ++t) {
    const MatR g = testutil::random_sl(4, rng), h = testutil::random_sl(4, rng);
    try {
      worst = std::max(worst, flagdyn::bps_gap_bound_check(g, h, 1).ratio);
      ++used;
    } catch (const Error& err) {
      ASSERT_EQ(err.code(), ErrorCode::NoSingularGap);
    }
  }
  EXPECT_GT(used, 9000);
  EXPECT_LE(worst, 1.0);
}
