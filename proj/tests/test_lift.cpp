#include "preleg/lift.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace preleg;
using namespace preleg::lift;

namespace {

Vector vec(std::initializer_list<double> a) {
  Vector v(static_cast<Eigen::Index>(a.size()));
  Eigen::Index i = 0;
  for (double x : a) v(i++) = x;
  return v;
}

// J = P J_std P^{-1} for a random well-conditioned P
linalg::ComplexStructure random_J(int m, std::mt19937_64& rng) {
  std::normal_distribution<double> N(0, 1);
  Matrix P(m, m);
  for (;;) {
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) P(i, j) = N(rng);
    const Vector sv = singular_values(P);
    if (sv(m - 1) > 0.2 * sv(0)) break;
  }
  return linalg::ComplexStructure(P * linalg::standard_J(m / 2).matrix() * P.inverse(), 1e-10);
}

// J preserving the 2-plane spanned by the columns of `plane`
linalg::ComplexStructure J_preserving(const Matrix& plane) {
  const int m = static_cast<int>(plane.rows());
  Matrix B(m, m);
  B.leftCols(2) = orthonormal_basis(plane);
  B.rightCols(m - 2) = null_space(B.leftCols(2).transpose());
  return linalg::ComplexStructure(B * linalg::standard_J(m / 2).matrix() * B.transpose(), 1e-10);
}

spin::ParamFront spun_unknot() { return spin::spin_front(front::unknot(), spin::clifford_perturbed(1, 0.5)); }

VerifyConfig small_config() {
  VerifyConfig c;
  c.k_res = 10;
  c.u_per_unit = 8;
  c.coreal_k_res = 32;
  c.injectivity_samples = 400;
  return c;
}

}  // namespace

TEST(Front, FlatHyperplaneHasVerticalConormalAndZeroSlope) {
  const auto f = flat_hyperplane(4);
  const Vector u = vec({0.3, -0.2, 0.9});
  EXPECT_EQ(f.conormal(u), Vector(Vector::Unit(4, 3)));
  const auto s = slope_of(f.conormal(u), linalg::standard_J(2));
  EXPECT_EQ(s.y.norm(), 0.0);
  EXPECT_EQ(s.chart, 1.0);
}

TEST(Front, CoOrientationMakesTheLastCoordinatePositive) {
  EXPECT_EQ(co_orient(vec({1, 0, -2})), vec({-1, 0, 2}));
  EXPECT_EQ(co_orient(vec({-1, 0, 0})), vec({1, 0, 0}));
  EXPECT_EQ(co_orient(vec({0, 1, 0})), vec({0, 1, 0}));
}

TEST(Front, CuspModelConormalAnnihilatesTheTangents) {
  const auto f = cusp_model_front(1);
  for (double t : {-0.7, -0.1, 0.2, 0.5}) {
    const Vector u = vec({0.4, -0.3, t});
    const Vector a = f.conormal(u);
    EXPECT_NEAR(a.norm(), 1, 1e-15);
    EXPECT_NEAR((a - vec({0, 0, t, 1}) / std::hypot(t, 1.0)).norm(), 0, 1e-15);
    for (int i = 0; i < 3; ++i) {
      Vector p = u, q = u;
      p(i) += 1e-6;
      q(i) -= 1e-6;
      EXPECT_NEAR(a.dot((f.point(p) - f.point(q)) / 2e-6), 0, 1e-8);
    }
  }
}

TEST(Slope, CuspModelSlopeDependsOnThePairing) {
  // standard pairing: c = (0, t - i), slope 0; pairing (1,3),(2,4): c = (-it, -i), slope t
  const auto f = cusp_model_front(1);
  const auto Jstd = linalg::standard_J(2);
  const auto Jx = linalg::J_from_pairs(4, {{1, 3}, {2, 4}});
  for (double t : {-0.5, 0.0, 0.25, 1.5}) {
    const Vector a = f.conormal(vec({0, 0, t}));
    EXPECT_NEAR(std::abs(slope_of(a, Jstd).y(0)), 0, 1e-15);
    EXPECT_NEAR(std::abs(slope_of(a, Jx).y(0) - std::complex<double>(t, 0)), 0, 1e-14);
  }
}

TEST(Slope, AntipodalConormalsGiveTheSameSlope) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> N(0, 1);
  for (int trial = 0; trial < 50; ++trial) {
    const auto J = random_J(6, rng);
    Vector a(6);
    for (int i = 0; i < 6; ++i) a(i) = N(rng);
    EXPECT_NEAR((slope_of(a, J).y - slope_of(Vector(-a), J).y).norm(), 0, 1e-12);
    EXPECT_NEAR((slope_of(a, J).y - slope_of(Vector(3.5 * a), J).y).norm(), 0, 1e-12);
  }
}

TEST(Slope, AgreesWithTheComplexPartOfTheTangentHyperplane) {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> N(0, 1);
  for (int m : {4, 6}) {
    for (int trial = 0; trial < 50; ++trial) {
      const auto J = random_J(m, rng);
      Vector a(m);
      for (int i = 0; i < m; ++i) a(i) = N(rng);
      const CVector from_part = chart_of_complex_part(null_space(a.transpose()), J);
      EXPECT_NEAR((from_part - slope_of(a, J).y).norm(), 0, 1e-8 * (1 + from_part.norm()));
    }
  }
}

TEST(Slope, StandardStructureIsTheConjugateHopfClass) {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> N(0, 1);
  const auto J = linalg::standard_J(3);
  for (int trial = 0; trial < 50; ++trial) {
    Vector a(6);
    for (int i = 0; i < 6; ++i) a(i) = N(rng);
    a.normalize();
    const CVector y = slope_of(a, J).y;
    CVector c(3);
    c << y, 1;
    EXPECT_TRUE(linalg::projectively_equal(c, linalg::hopf(a).conjugate()));
  }
}

TEST(Slope, ChartEscapeIsReported) {
  const auto J = linalg::standard_J(2);
  try {
    slope_of(vec({1, 0, 0, 0}), J);
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("chart escape"), std::string::npos);
  }
}

TEST(Lift, DimensionMismatchRejected) {
  EXPECT_THROW(prelegendrian_lift(flat_hyperplane(4), linalg::standard_J(3)), DimensionError);
  EXPECT_THROW(prelegendrian_lift(flat_hyperplane(2), linalg::standard_J(1)), DomainError);
}

TEST(Lift, CuspImmersionDichotomy) {
  // the cusp locus {x3 = x4 = 0} is co-real for the (1,3),(2,4) pairing and
  // complex for the standard one
  const auto f = cusp_model_front(1);
  const auto good = prelegendrian_lift(f, linalg::J_from_pairs(4, {{1, 3}, {2, 4}}));
  const auto bad = prelegendrian_lift(f, linalg::standard_J(2));
  const Vector u = vec({0.2, -0.4, 0.0});
  EXPECT_EQ(immersion_at(good, u).rank, 3);
  EXPECT_GT(immersion_at(good, u).margin, 0.1);
  EXPECT_EQ(immersion_at(bad, u).rank, 2);
  // away from the cusp both lifts are immersions
  EXPECT_EQ(immersion_at(bad, vec({0.2, -0.4, 0.3})).rank, 3);
}

TEST(Lift, CuspImmersionMatchesCoRealityForRandomStructures) {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> U(-1, 1);
  const auto f = cusp_model_front(1);
  Matrix locus = Matrix::Zero(4, 2);
  locus(0, 0) = locus(1, 1) = 1;
  int seen[2] = {0, 0};
  for (int trial = 0; trial < 40; ++trial) {
    const auto J = trial % 2 ? random_J(4, rng) : J_preserving(locus);
    const bool coreal = linalg::is_coreal(linalg::Subspace(locus), J, 1e-6).flag;
    const auto L = prelegendrian_lift(f, J);
    const auto r = immersion_at(L, vec({U(rng), U(rng), 0.0}), 1e-5, 1e-6);
    EXPECT_EQ(r.rank == 3, coreal) << "trial " << trial;
    ++seen[coreal];
  }
  EXPECT_EQ(seen[0], 20);
  EXPECT_EQ(seen[1], 20);
}

TEST(Lift, ConormalAnnihilatesTheSpunFront) {
  const auto F = spun_unknot();
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> A(0, 2 * M_PI), P(0, 1);
  for (int trial = 0; trial < 200; ++trial) {
    const int c = 0;
    const Vector k = vec({A(rng), A(rng)});
    const double u = P(rng) * F.curve.period(c);
    const Vector a = F.conormal(k, c, u);
    EXPECT_NEAR(a.norm(), 1, 1e-12);
    EXPECT_GT(a(a.size() - 1), 0);
    const auto f = front_map(F, c);
    Vector w(3);
    w << k, u;
    for (int i = 0; i < 3; ++i) {
      Vector p = w, q = w;
      p(i) += 1e-6;
      q(i) -= 1e-6;
      const Vector d = (f.point(p) - f.point(q)) / 2e-6;
      EXPECT_LT(std::abs(a.dot(d)), 1e-6 * std::max(1.0, d.norm()));
    }
  }
}

TEST(RankCondition, LegendrianLiftOfAFrontHasRankOne) {
  const auto L = prelegendrian_lift(flat_hyperplane(4), linalg::standard_J(2));
  const auto D = forms::standard_fat(1);
  const auto r = rank_condition_at(L, D, vec({0.3, 0.1, -0.2}));
  EXPECT_EQ(r.rank, 1);
  EXPECT_LT(r.residual, 1e-12);
}

TEST(RankCondition, GrassmannianFiberDiskHasRankZero) {
  // constant base point, slope sweeping a disk in the fiber
  FrontMap f;
  f.domain_dim = 2;
  f.ambient = 4;
  f.point = [](const Vector&) { return Vector(Vector::Zero(4)); };
  f.conormal = [](const Vector& u) {
    const Vector a = vec({u(0), u(1), 0, 1});
    return Vector(a / a.norm());
  };
  const auto L = prelegendrian_lift(f, linalg::standard_J(2));
  const auto D = forms::standard_fat(1);
  for (const Vector& u : {vec({0.1, 0.2}), vec({-0.3, 0.05})}) {
    EXPECT_EQ(rank_condition_at(L, D, u).rank, 0);
    EXPECT_EQ(immersion_at(L, u).rank, 2);
  }
}

TEST(RankCondition, WrongSlopeHasRankTwo) {
  // the conormal tilts in x1 while the front stays flat
  FrontMap f = flat_hyperplane(4);
  f.conormal = [](const Vector& u) {
    const Vector a = vec({0.1 * std::sin(u(0)), 0, 0, 1});
    return Vector(a / a.norm());
  };
  const auto L = prelegendrian_lift(f, linalg::standard_J(2));
  const auto D = forms::standard_fat(1);
  EXPECT_EQ(rank_condition_at(L, D, vec({1.0, 0.2, 0.3})).rank, 2);
  EXPECT_EQ(rank_condition_at(L, D, vec({0.0, 0.2, 0.3})).rank, 1);
}

TEST(SelfIntersection, ComplexIntersectionFails) {
  const auto J = linalg::standard_J(2);
  const auto bad = compare_branches(Vector::Unit(4, 3), Vector::Unit(4, 2), J);
  EXPECT_FALSE(bad.coreal.flag);
  EXPECT_LT(bad.projector_distance, 1e-12);
  EXPECT_TRUE(bad.agree);
  const auto good = compare_branches(Vector::Unit(4, 3), Vector::Unit(4, 1), J);
  EXPECT_TRUE(good.coreal.flag);
  EXPECT_GT(good.projector_distance, 1.0);
  EXPECT_TRUE(good.agree);
  EXPECT_FALSE(verify_self_intersection({{Vector::Unit(4, 3), Vector::Unit(4, 2)}}, J).pass);
  EXPECT_TRUE(verify_self_intersection({{Vector::Unit(4, 3), Vector::Unit(4, 1)}}, J).pass);
}

TEST(SelfIntersection, TangentBranchesAreNotCoReal) {
  const auto r = compare_branches(vec({0, 0, 0, 1}), vec({0, 0, 0, -2}), linalg::standard_J(2));
  EXPECT_FALSE(r.coreal.flag);
  EXPECT_TRUE(r.agree);
}

TEST(SelfIntersection, ProjectorAndCoRealityTestsAgreeOnRandomPairs) {
  std::mt19937_64 rng(16);
  std::normal_distribution<double> N(0, 1);
  int disagree = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int m = trial % 2 ? 4 : 6;
    const auto J = random_J(m, rng);
    Vector a(m), b(m);
    for (int i = 0; i < m; ++i) a(i) = N(rng), b(i) = N(rng);
    // every fourth pair shares its complex part: b = Re(mu a^J) for a complex mu
    if (trial % 4 == 0) b = (N(rng) * a - N(rng) * (J.matrix().transpose() * a)).eval();
    if (!compare_branches(a, b, J, 1e-7).agree) ++disagree;
  }
  EXPECT_EQ(disagree, 0);
}

TEST(FullVerify, SpunUnknotPasses) {
  const auto F = spun_unknot();
  const auto rep = full_verify(F, linalg::standard_J(2), forms::standard_fat(1), small_config());
  EXPECT_TRUE(rep.pass);
  for (const auto& f : rep.failures) ADD_FAILURE() << f;
  EXPECT_GT(rep.immersion_margin, 1e-6);
  EXPECT_GT(rep.cusp_immersion_margin, 1e-6);
  EXPECT_GT(rep.coreal_margin, 0);
  EXPECT_EQ(rep.stratum_coreal.size(), 2u);
}

TEST(FullVerify, StructureMakingAStratumComplexFails) {
  const auto F = spun_unknot();
  const auto& st = F.strata[0];
  const Vector k0 = Vector::Zero(2);
  const auto J = J_preserving(F.tube_tangents(k0, st.x, st.z));
  const auto rep = full_verify(F, J, forms::standard_fat(1), small_config());
  EXPECT_FALSE(rep.pass);
  ASSERT_NE(rep.section("coreal_loci"), nullptr);
  EXPECT_FALSE(rep.section("coreal_loci")->pass);
  EXPECT_LT(rep.stratum_coreal[0], 1e-9);
}

TEST(FullVerify, MismatchedDimensionsRejected) {
  const auto F = spun_unknot();
  EXPECT_THROW(full_verify(F, linalg::standard_J(3), forms::standard_fat(1)), DimensionError);
  EXPECT_THROW(full_verify(F, linalg::standard_J(2), forms::standard_fat(2)), DimensionError);
}
