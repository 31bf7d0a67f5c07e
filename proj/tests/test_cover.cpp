#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "sector_lab/builders.hpp"
#include "sector_lab/cover.hpp"

using namespace sector_lab;

namespace {

Pi1Presentation s3_pres() {
  return Pi1Presentation(build_presentation_complex({"a", "b"}, std::vector<std::string>{"a2", "b2", "(ab)3"}), 0);
}

std::vector<double> sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST(Cover, RingBallIsAPath) {
  Pi1Presentation p(build_cycle(8), 0);
  auto cv = build_cover(p, 3);
  EXPECT_EQ(cv.fibre_size(), 7);
  EXPECT_EQ(cv.vertex_count(), 56);
  EXPECT_FALSE(cv.full());
  // 55 edges of the unrolled helix.
  EXPECT_EQ(cv.lifted_edge_count(), 55);
  auto cc = cover_complex(cv);
  EXPECT_EQ(cc.vertex_count(), 56);
  EXPECT_EQ(cc.edge_count(), 55);
  EXPECT_TRUE(Pi1Presentation(cc, 0).simply_connected());
  // Dirichlet path: the diagonal keeps degree 2 at both ends.
  std::vector<double> oracle;
  for (int j = 1; j <= 56; ++j) oracle.push_back(2.0 - 2.0 * std::cos(M_PI * j / 57.0));
  EXPECT_LT(spectrum_distance(spectrum(cover_laplacian(cv)).values, sorted(oracle)), 1e-12);
}

TEST(Cover, BoundaryAndInterior) {
  Pi1Presentation p(build_cycle(8), 0);
  auto cv = build_cover(p, 3);
  int boundary = 0;
  for (int v = 0; v < cv.vertex_count(); ++v) boundary += cv.boundary(v);
  EXPECT_EQ(boundary, 2);
  EXPECT_EQ(cv.interior_count(), 54);
}

TEST(Cover, SymmetricThreeFullCover) {
  auto p = s3_pres();
  auto cv = build_cover(p, -1);
  EXPECT_TRUE(cv.full());
  EXPECT_EQ(cv.vertex_count(), 6);
  auto cc = cover_complex(cv);
  EXPECT_EQ(cc.edge_count(), 12);
  EXPECT_EQ(cc.face_count(), 18);
  EXPECT_TRUE(Pi1Presentation(cc, 0).simply_connected());
  // One copy of the boson and fermion values, two of the doublet values.
  EXPECT_LT(spectrum_distance(spectrum(cover_laplacian(cv)).values, {0.0, 2.0, 2.0, 6.0, 6.0, 8.0}), 1e-12);
}

TEST(Cover, SimplyConnectedBaseIsItsOwnCover) {
  Pi1Presentation p(build_grid_with_holes(5, 5), 0);
  auto cv = build_cover(p, 4);
  EXPECT_EQ(cv.fibre_size(), 1);
  EXPECT_EQ(cv.vertex_count(), 25);
  auto base = spectrum(twisted_laplacian(p.complex(), cocycle_from_rep(p, UnitaryRep::trivial({})))).values;
  EXPECT_LT(spectrum_distance(spectrum(cover_laplacian(cv)).values, base), 1e-12);
}

TEST(Cover, QuotientRingCoverIsALongerRing) {
  Pi1Presentation p(build_cycle_quotient(8, 4), 0);
  auto cv = build_cover(p, -1);
  EXPECT_EQ(cv.vertex_count(), 32);
  std::vector<double> oracle;
  for (int k = 0; k < 32; ++k) oracle.push_back(2.0 - 2.0 * std::cos(2.0 * M_PI * k / 32.0));
  EXPECT_LT(spectrum_distance(spectrum(cover_laplacian(cv)).values, sorted(oracle)), 1e-12);
  EXPECT_TRUE(Pi1Presentation(cover_complex(cv), 0).simply_connected());
}

TEST(Cover, FullCoverRequiresAFiniteGroup) {
  Pi1Presentation p(build_cycle(5), 0);
  EXPECT_THROW(build_cover(p, -1), Error);
}

TEST(Cover, EdgeLiftsFollowTheHolonomy) {
  Pi1Presentation p(build_grid_with_holes(9, 7, {{2, 2, 1, 1}, {5, 2, 1, 1}}), 0);
  auto cv = build_cover(p, 3);
  const auto& b = cv.backend();
  for (int e = 0; e < p.complex().edge_count(); ++e) {
    bool tree = p.tree().tree_edge[e];
    if (tree) EXPECT_TRUE(b.is_identity(cv.theta(e)));
    auto mv = lift_edge_move(cv, e);
    const auto& ed = p.complex().edge(e);
    for (int i = 0; i < cv.fibre_size(); ++i) {
      int v = cv.vertex_id(ed.tail, i);
      int w = mv(v);
      if (w < 0) continue;
      EXPECT_EQ(cv.base_vertex(w), ed.head);
      EXPECT_EQ(cv.ball().elements[cv.fibre_index(w)], b.multiply(cv.theta(e), cv.ball().elements[i]));
      EXPECT_EQ(mv(w), v);
    }
  }
}

TEST(Cover, LiftedFunctionsAreTrivialSectorStates) {
  auto p = s3_pres();
  auto cv = build_cover(p, -1);
  auto f = lift_function(cv, {1.0});
  EXPECT_EQ(f, std::vector<double>(6, 1.0));
  Vector v(6);
  for (int i = 0; i < 6; ++i) v(i) = f[i];
  EXPECT_LT((cover_laplacian(cv).sparse() * v).norm(), 1e-14);
}

TEST(Cover, MovesCommuteWithTheRightAction) {
  std::vector<std::pair<Pi1Presentation, int>> cases;
  cases.emplace_back(s3_pres(), -1);
  cases.emplace_back(Pi1Presentation(build_cycle_quotient(8, 4), 0), -1);
  cases.emplace_back(Pi1Presentation(build_cycle(8), 0), 5);
  cases.emplace_back(Pi1Presentation(build_grid_with_holes(9, 7, {{2, 2, 1, 1}, {5, 2, 1, 1}}), 0), 3);
  for (const auto& [p, radius] : cases) {
    auto cv = build_cover(p, radius);
    auto r = verify_gauge_commutes(cv);
    EXPECT_TRUE(r.passed);
    EXPECT_GT(r.checks, 0);
    EXPECT_EQ(r.violations, 0);
    EXPECT_EQ(r.left_right_violations, 0);
  }
}

TEST(Cover, MovesDoNotCommuteWithTheLeftActionWhenNonAbelian) {
  auto p = s3_pres();
  auto cv = build_cover(p, -1);
  const auto& b = cv.backend();
  int differing = 0;
  for (int e = 0; e < p.complex().edge_count(); ++e) {
    auto mv = lift_edge_move(cv, e);
    for (const auto& eta : cv.ball().elements) {
      auto l = regular_action(cv, Side::left, eta);
      for (int v = 0; v < cv.vertex_count(); ++v) differing += mv(l(v)) != l(mv(v));
    }
  }
  EXPECT_GT(differing, 0);
  EXPECT_FALSE(b.is_abelian());
}

TEST(Cover, CentralProjectorRanks) {
  auto rank_of = [](const Matrix& m) { return static_cast<int>(std::lround(m.trace().real())); };
  for (auto [n, want] : std::vector<std::pair<int, std::vector<int>>>{{2, {1, 1}}, {4, {1, 1, 1, 1}}}) {
    auto g = FiniteGroup::cyclic(n);
    auto ps = central_projectors(g, character_table(g));
    std::vector<int> ranks;
    for (const auto& p : ps) ranks.push_back(rank_of(p));
    EXPECT_EQ(ranks, want);
  }
  auto g = FiniteGroup::symmetric(3);
  auto ps = central_projectors(g, character_table(g));
  std::vector<int> ranks;
  for (const auto& p : ps) {
    ranks.push_back(rank_of(p));
    EXPECT_LT((p * p - p).norm(), 1e-12);
  }
  EXPECT_EQ(ranks, (std::vector<int>{1, 1, 4}));
}

TEST(Cover, QuotientRingDecomposes) {
  Pi1Presentation p(build_cycle_quotient(8, 4), 0);
  auto cv = build_cover(p, -1);
  auto r = decompose_cover_spectrum(p, cv);
  EXPECT_TRUE(r.passed);
  EXPECT_LT(r.union_deviation, 1e-8);
  EXPECT_LT(r.projector_defect, 1e-10);
  ASSERT_EQ(r.blocks.size(), 4u);
  for (const auto& blk : r.blocks) {
    EXPECT_EQ(blk.degree, 1);
    EXPECT_LT(blk.deviation, 1e-8) << blk.irrep;
  }
}

TEST(Cover, SymmetricThreeDecomposes) {
  auto p = s3_pres();
  auto cv = build_cover(p, -1);
  auto r = decompose_cover_spectrum(p, cv);
  EXPECT_TRUE(r.passed);
  ASSERT_EQ(r.blocks.size(), 3u);
  EXPECT_EQ(r.blocks[2].degree, 2);
  EXPECT_EQ(r.blocks[2].statistics, "parastatistics");
  EXPECT_LT(spectrum_distance(r.blocks[2].block_spectrum, {2.0, 2.0, 6.0, 6.0}), 1e-10);
  EXPECT_LT(spectrum_distance(r.blocks[2].sector_spectrum, {2.0, 6.0}), 1e-10);
}

TEST(Cover, TruncatedCoverCannotDecompose) {
  Pi1Presentation p(build_cycle(8), 0);
  auto cv = build_cover(p, 3);
  EXPECT_THROW(decompose_cover_spectrum(p, cv), Error);
}

TEST(Cover, LeftAndRightMatrixElementsAreConjugate) {
  std::vector<std::string> names{"i", "j"};
  auto q8 = FiniteGroup::from_presentation(
      names, {parse_word("i4", names), parse_word("i2 j^-2", names), parse_word("j^-1 i j i", names)}, 1000);
  for (const auto& g : {FiniteGroup::symmetric(3), FiniteGroup::cyclic(4), q8}) {
    auto t = character_table(g);
    auto r = conjugacy_check(g);
    EXPECT_TRUE(r.passed);
    ASSERT_EQ(static_cast<int>(r.entries.size()), t.irrep_count());
    // Both reduce to (d/|G|) times the character, conjugated on the left.
    for (const auto& e : r.entries) {
      double scale = static_cast<double>(t.degrees[e.irrep]) / g.order();
      for (int x = 0; x < g.order(); ++x) {
        EXPECT_LT(std::abs(e.left[x] - scale * std::conj(t.values[e.irrep][x])), 1e-12);
        EXPECT_LT(std::abs(e.right[x] - scale * t.values[e.irrep][x]), 1e-12);
      }
    }
  }
}
