#include "preleg/lift.hpp"
#include "preleg/moves_nd.hpp"

#include <gtest/gtest.h>

using namespace preleg;
using namespace preleg::moves;

namespace {

spin::ParamFront spun_unknot() { return spin::spin_front(front::unknot(), spin::clifford_perturbed(1, 0.5)); }

lift::VerifyConfig small_config() {
  lift::VerifyConfig c;
  c.k_res = 10;
  c.u_per_unit = 8;
  c.coreal_k_res = 32;
  c.injectivity_samples = 400;
  return c;
}

}  // namespace

TEST(BumpProfile, AuditPassesOnATorusTube) {
  const auto p = bump_profile(1.0, 0.15, 1.5, 0.5, 1.5, 2);
  EXPECT_TRUE(p.audit.ok());
  for (const auto& f : p.audit.failures) ADD_FAILURE() << f;
  EXPECT_EQ(p.audit.value_on_N, 1.5);
  EXPECT_GT(p.audit.plateau_critical, 0);
  EXPECT_EQ(p.audit.euler_characteristic, 0);
  EXPECT_TRUE(p.audit.chi_zero);
  EXPECT_EQ(p.audit.grid_points, 4097);
}

TEST(BumpProfile, HeightMustExceedOne) {
  EXPECT_THROW(bump_profile(1.0, 0.15, 1.0, 0.5, 1.5, 2), DomainError);
  EXPECT_THROW(bump_profile(1.0, 0.15, 2.5, 0.5, 1.5, 2), DomainError);
  EXPECT_NO_THROW(bump_profile(1.0, 0.15, 2.0, 0.5, 1.5, 2));
}

TEST(BumpProfile, TubeMustStayInsideTheChart) {
  EXPECT_THROW(bump_profile(1.0, 0.6, 1.5, 0.5, 1.5, 2), DomainError);
  EXPECT_THROW(bump_profile(1.0, 0.0, 1.5, 0.5, 1.5, 2), DomainError);
}

TEST(BumpProfile, VanishesOffTheTubeAndPeaksOnN) {
  const auto p = bump_profile(1.0, 0.15, 1.5, 0.5, 1.5, 2);
  EXPECT_EQ(p.value(1.15), 0.0);
  EXPECT_EQ(p.value(0.8), 0.0);
  EXPECT_EQ(p.value(1.0), 1.5);
  EXPECT_EQ(p.value(1.04), 1.5);
  EXPECT_GT(p.value(1.1), 0.0);
  EXPECT_LT(p.value(1.1), 1.5);
}

TEST(BumpProfile, GradientMatchesFiniteDifferences) {
  const auto p = bump_profile(1.0, 0.15, 1.5, 0.5, 1.5, 2);
  for (double X = 0.86; X < 1.14; X += 0.013) {
    const double fd = (p.value(X + 1e-7) - p.value(X - 1e-7)) / 2e-7;
    EXPECT_NEAR(p.gradient(X), fd, 1e-5) << X;
  }
}

TEST(BumpProfile, LogBumpMatchesTheBump) {
  for (double r = 0.35; r < 0.99; r += 0.02) {
    EXPECT_NEAR(detail::log_bump(r), std::log(spin::plateau_bump(r)), 1e-10) << r;
    const double fd = (detail::log_bump(r + 1e-6) - detail::log_bump(r - 1e-6)) / 2e-6;
    EXPECT_NEAR(detail::log_bump_slope(r), fd, 1e-4 * std::max(1.0, std::abs(fd))) << r;
    EXPECT_LT(detail::log_bump_slope(r), 0);
  }
  // finite where the bump itself underflows
  EXPECT_TRUE(std::isfinite(detail::log_bump(0.3334)));
  EXPECT_TRUE(std::isfinite(detail::log_bump(0.99999)));
}

TEST(NPush, OutputEqualsInputOutsideTheTube) {
  const auto F = spun_unknot();
  const auto r = n_push(F, {1.0, 0});
  const double rho = r.profile.rho;
  EXPECT_LE(deviation_outside(F, r.front, 1.0 - rho, 1.0 + rho), 1e-12);
  EXPECT_GT(deviation_outside(F, r.front, 2.0, 3.0), 1e-3);  // the tube itself moves
}

TEST(NPush, AddsOneIntersectionStratumDescriptor) {
  const auto F = spun_unknot();
  const auto r = n_push(F, {1.0, 0});
  const auto c = r.front.census();
  EXPECT_EQ(c.at("crossing/push"), 1);
  EXPECT_EQ(c.at("cusp/front"), 2);
  EXPECT_GT(r.level_coreal, 0);
  EXPECT_GT(r.band_coreal, 0);
  EXPECT_EQ(r.band_copies, 9);
}

TEST(NPush, PushedFrontPassesFullVerify) {
  const auto F = spun_unknot();
  const auto r = n_push(F, {1.0, 0});
  const auto rep = lift::full_verify(r.front, linalg::standard_J(2), forms::standard_fat(1), small_config());
  EXPECT_TRUE(rep.pass);
  for (const auto& f : rep.failures) ADD_FAILURE() << f;
  ASSERT_NE(rep.section("self_intersection"), nullptr);
  EXPECT_GT(rep.section("self_intersection")->samples, 0);
}

TEST(NPush, BadSitesAreRejected) {
  const auto F = spun_unknot();
  EXPECT_THROW(n_push(F, {0.5, 0}), DomainError);   // cusp tip
  EXPECT_THROW(n_push(F, {1.0, 1}), DomainError);   // only two sheets
  EXPECT_THROW(n_push(F, {7.0, 0}), DomainError);   // outside the front
  EXPECT_THROW(n_push(F, {1.0, 0}, 1.0), DomainError);
  EXPECT_THROW(n_push(F, {1.0, 0}, 1.5, 0.9), DomainError);
}

TEST(Stabilize, CensusGainsTwoCuspCopiesAndOneIntersection) {
  const auto F = spun_unknot();
  const auto r = stabilize_preleg(F, {1, 0});
  EXPECT_EQ(r.front.word.to_string(), "L1 L2 X1 R2 R1");
  EXPECT_EQ(r.census_before.at("cusp/front"), 2);
  EXPECT_EQ(r.census_after.at("cusp/front"), 2);
  EXPECT_EQ(r.census_after.at("cusp/ri"), 2);
  EXPECT_EQ(r.census_after.at("crossing/ri"), 1);
  EXPECT_EQ(r.census_after.at("crossing/stabilization"), 1);
  EXPECT_EQ(r.euler_characteristic, 0);
  EXPECT_GT(r.N_coreal, 0);
  EXPECT_GT(r.N_prime_coreal, 0);
}

TEST(Stabilize, FishIsUndoneByRemovingIt) {
  const auto F = spun_unknot();
  const auto r = stabilize_preleg(F, {1, 0});
  EXPECT_EQ(front::remove_RI(r.front.word, 1), F.word);
}

TEST(Stabilize, StabilizedFrontPassesFullVerify) {
  const auto F = spun_unknot();
  const auto r = stabilize_preleg(F, {1, 0});
  const auto rep = lift::full_verify(r.front, linalg::standard_J(2), forms::standard_fat(1), small_config());
  EXPECT_TRUE(rep.pass);
  for (const auto& f : rep.failures) ADD_FAILURE() << f;
  EXPECT_GT(rep.cusp_immersion_margin, 1e-6);
}

TEST(Stabilize, AlreadyPushedFrontRejected) {
  const auto F = spun_unknot();
  const auto pushed = n_push(F, {1.0, 0}).front;
  EXPECT_THROW(stabilize_preleg(pushed, {1, 0}), DomainError);
}

TEST(Stabilize, BadSliceRejected) {
  const auto F = spun_unknot();
  EXPECT_ANY_THROW(stabilize_preleg(F, {0, 0}));
  EXPECT_ANY_THROW(stabilize_preleg(F, {1, 5}));
}
