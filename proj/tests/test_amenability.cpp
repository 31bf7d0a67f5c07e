#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "sector_lab/builders.hpp"
#include "sector_lab/cover.hpp"

using namespace sector_lab;

namespace {

// Top Dirichlet eigenvalue of the simple walk on a ball of the 4-regular
// tree, from the radial chain (levels 0..R).
double tree_ball_radius(int radius) {
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(radius + 1, radius + 1);
  for (int r = 0; r < radius; ++r) {
    double c = r == 0 ? 0.5 : std::sqrt(3.0) / 4.0;
    t(r, r + 1) = t(r + 1, r) = c;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(radius);
}

// Same quantity on the L1 ball of Z², built from coordinates.
double square_lattice_radius(int radius) {
  std::map<std::pair<int, int>, int> id;
  for (int x = -radius; x <= radius; ++x)
    for (int y = -radius; y <= radius; ++y)
      if (std::abs(x) + std::abs(y) <= radius) id[{x, y}] = static_cast<int>(id.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(id.size(), id.size());
  for (const auto& [p, i] : id)
    for (auto [dx, dy] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
      auto it = id.find({p.first + dx, p.second + dy});
      if (it != id.end()) a(i, it->second) = 0.25;
    }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(es.eigenvalues().size() - 1);
}

Pi1Presentation two_holes() { return Pi1Presentation(build_grid_with_holes(9, 7, {{2, 2, 1, 1}, {5, 2, 1, 1}}), 0); }

}  // namespace

TEST(Amenability, FreeGroupMatchesTheRadialChain) {
  auto b = GroupBackend::free({"a", "b"});
  auto rep = amenability_report(b, 8);
  ASSERT_EQ(rep.estimates.size(), 8u);
  for (std::size_t i = 0; i < rep.estimates.size(); ++i)
    EXPECT_NEAR(rep.estimates[i], tree_ball_radius(rep.radii[i]), 1e-9) << rep.radii[i];
  EXPECT_EQ(rep.ball_sizes.back(), 1 + 2 * (6561 - 1));
  EXPECT_TRUE(rep.monotone);
}

TEST(Amenability, FreeGroupRadiusTwelve) {
  auto p = two_holes();
  ASSERT_EQ(p.backend().tag(), "free");
  auto rep = amenability_report(p.backend());
  EXPECT_EQ(rep.verdict, "non-amenable");
  EXPECT_EQ(rep.radii.back(), 12);
  EXPECT_EQ(rep.ball_sizes.back(), 1062881);
  ASSERT_TRUE(rep.known_value.has_value());
  EXPECT_NEAR(*rep.known_value, std::sqrt(3.0) / 2.0, 1e-15);
  double est = rep.estimates.back();
  EXPECT_NEAR(est, tree_ball_radius(12), 1e-9);
  EXPECT_LT(std::abs(est - *rep.known_value) / *rep.known_value, 0.05);
  EXPECT_LE(est, *rep.known_value);
  EXPECT_TRUE(rep.trivial_sector_excluded);
  EXPECT_TRUE(rep.monotone);
}

TEST(Amenability, SquareLatticeApproachesOne) {
  auto b = GroupBackend::free_abelian({"a", "b"});
  auto rep = amenability_report(b, 20);
  EXPECT_EQ(rep.verdict, "amenable");
  EXPECT_EQ(rep.ball_sizes.back(), 2 * 20 * 21 + 1);
  EXPECT_NEAR(rep.estimates.back(), square_lattice_radius(20), 1e-9);
  EXPECT_NEAR(rep.estimates[4], square_lattice_radius(5), 1e-9);
  EXPECT_GE(rep.estimates.back(), 0.98);
  EXPECT_FALSE(rep.trivial_sector_excluded);
}

TEST(Amenability, InfiniteCyclicIsAPath) {
  Pi1Presentation p(build_cycle(6), 0);
  auto rep = amenability_report(p.backend(), 15);
  EXPECT_EQ(rep.verdict, "amenable");
  for (std::size_t i = 0; i < rep.radii.size(); ++i)
    EXPECT_NEAR(rep.estimates[i], std::cos(M_PI / (2.0 * rep.radii[i] + 2.0)), 1e-10);
}

TEST(Amenability, FiniteGroupsAreExact) {
  auto s3 = Pi1Presentation(build_presentation_complex({"a", "b"}, std::vector<std::string>{"a2", "b2", "(ab)3"}), 0);
  auto rep = amenability_report(s3.backend());
  EXPECT_EQ(rep.verdict, "amenable");
  EXPECT_EQ(rep.estimates, std::vector<double>{1.0});
  EXPECT_EQ(rep.ball_sizes, std::vector<long>{6});
  auto rz = amenability_report(GroupBackend::cyclic("a", 4));
  EXPECT_EQ(rz.estimates, std::vector<double>{1.0});
}

TEST(Amenability, RejectsBadRadius) { EXPECT_THROW(amenability_report(GroupBackend::free({"a", "b"}), 0), Error); }

TEST(NonL2, FreeGroupTrivialRepIsAllOnes) {
  auto p = two_holes();
  auto ball = cayley_ball(p.backend(), 2);
  ASSERT_EQ(ball.size(), 17);
  Vector v = Vector::Ones(1);
  auto r = non_l2_representation(p, UnitaryRep::trivial(p.generator_names()), v, ball.elements, FormKind::vector);
  EXPECT_TRUE(r.all_ones);
  EXPECT_EQ(r.quotient_dim, 1);
  EXPECT_TRUE(non_l2_passed(r));
  EXPECT_LT(std::abs(r.gram_eigenvalues.back() - 17.0), 1e-12);
}

TEST(NonL2, CharacterOfTheIntegersHasRankOne) {
  Pi1Presentation p(build_cycle(8), 0);
  auto ball = cayley_ball(p.backend(), 4);
  auto chi = UnitaryRep::character(p.generator_names(), 0.25);
  auto r = non_l2_representation(p, chi, Vector::Ones(1), ball.elements, FormKind::vector);
  EXPECT_EQ(r.quotient_dim, 1);
  EXPECT_TRUE(non_l2_passed(r));
  // The left generator acts on the one-dimensional quotient by the character value.
  EXPECT_LT(std::abs(r.left[0](0, 0) - chi.image(0)(0, 0)), 1e-10);
}

TEST(NonL2, SymmetricThreeTraceForm) {
  auto p = Pi1Presentation(build_presentation_complex({"a", "b"}, std::vector<std::string>{"a2", "b2", "(ab)3"}), 0);
  const auto& g = p.backend().finite_group();
  auto t = character_table(g);
  auto rep = irreducible_representation(g, t, 2);
  auto ball = cayley_ball(p.backend(), -1);
  auto r = non_l2_representation(p, rep, Vector(), ball.elements, FormKind::trace);
  EXPECT_EQ(r.quotient_dim, 4);
  EXPECT_EQ(r.multiplicity, 2);
  EXPECT_TRUE(non_l2_passed(r));
  EXPECT_LT(r.left_right_commutator, 1e-10);

  Vector v(2);
  v << 1.0, 0.0;
  auto rv = non_l2_representation(p, rep, v, ball.elements, FormKind::vector);
  EXPECT_EQ(rv.quotient_dim, 2);
  EXPECT_EQ(rv.multiplicity, 1);
  EXPECT_TRUE(non_l2_passed(rv));
}

TEST(NonL2, RejectsBadInput) {
  Pi1Presentation p(build_cycle(8), 0);
  auto chi = UnitaryRep::character(p.generator_names(), 0.25);
  EXPECT_THROW(non_l2_representation(p, chi, Vector::Ones(2), cayley_ball(p.backend(), 2).elements, FormKind::vector), Error);
  EXPECT_THROW(non_l2_representation(p, chi, Vector::Ones(1), {}, FormKind::vector), Error);
}
