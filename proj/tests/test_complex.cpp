#include <gtest/gtest.h>

#include <functional>

#include "sector_lab/builders.hpp"
#include "sector_lab/complex.hpp"
#include "sector_lab/region.hpp"

using namespace sector_lab;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::numerical_failure;
}

}  // namespace

TEST(Complex, BasicCounts) {
  ConfigComplex cx({"a", "b", "c"}, {}, {{0, 1, 1.0, "ab"}, {1, 2, 2.0, "bc"}}, {});
  EXPECT_EQ(cx.vertex_count(), 3);
  EXPECT_EQ(cx.edge_count(), 2);
  EXPECT_EQ(cx.cycle_rank(), 0);
  EXPECT_EQ(cx.degree(1), 2);
  EXPECT_EQ(cx.vertex_id("c"), 2);
  EXPECT_EQ(cx.measure(0), 1.0);
  EXPECT_FALSE(cx.find_edge("zz").has_value());
}

TEST(Complex, ValidationErrors) {
  EXPECT_EQ(code_of([] { ConfigComplex({"a", "a"}, {}, {{0, 1, 1.0, "e"}}, {}); }), ErrorCode::invalid_parameter);
  EXPECT_EQ(code_of([] { ConfigComplex({"a", "b"}, {1.0, -1.0}, {{0, 1, 1.0, "e"}}, {}); }), ErrorCode::invalid_parameter);
  EXPECT_EQ(code_of([] { ConfigComplex({"a", "b"}, {}, {{0, 1, 0.0, "e"}}, {}); }), ErrorCode::invalid_parameter);
  EXPECT_EQ(code_of([] { ConfigComplex({"a", "b"}, {}, {{0, 2, 1.0, "e"}}, {}); }), ErrorCode::invalid_parameter);
  EXPECT_EQ(code_of([] { ConfigComplex({"a", "b", "c"}, {}, {{0, 1, 1.0, "e"}}, {}); }), ErrorCode::not_connected);
  // A face that does not close up.
  EXPECT_EQ(code_of([] { ConfigComplex({"a", "b"}, {}, {{0, 1, 1.0, "e"}}, {{{0, true}}}); }), ErrorCode::invalid_parameter);
}

TEST(Complex, LoopCountsTwiceInDegree) {
  ConfigComplex cx({"v"}, {}, {{0, 0, 1.0, "a"}}, {});
  EXPECT_EQ(cx.degree(0), 2);
  EXPECT_EQ(cx.cycle_rank(), 1);
}

TEST(PathWord, CompositionAndReversal) {
  auto cx = build_cycle(5);
  PathWord p(cx, 0, {{0, true}, {1, true}});
  PathWord q(cx, 2, {{2, true}});
  auto pq = then(p, q);
  EXPECT_EQ(pq.start(), 0);
  EXPECT_EQ(pq.end(), 3);
  EXPECT_EQ(pq.size(), 3u);
  EXPECT_EQ(compose(q, p), pq);
  auto r = pq.reversed();
  EXPECT_EQ(r.start(), 3);
  EXPECT_EQ(r.end(), 0);
  EXPECT_EQ(r.reversed(), pq);
  EXPECT_THROW(then(q, p), Error);
  EXPECT_THROW(PathWord(cx, 0, {{1, true}}), Error);
}

TEST(PathWord, EmptyPathIsClosed) {
  auto cx = build_cycle(4);
  PathWord e(2);
  EXPECT_TRUE(e.empty());
  EXPECT_TRUE(e.closed());
  EXPECT_EQ(then(e, PathWord(cx, 2, {{2, true}})).size(), 1u);
}

TEST(PathWord, FaceWalkIsClosed) {
  auto cx = build_grid_with_holes(3, 3);
  for (int f = 0; f < cx.face_count(); ++f) {
    auto w = face_walk(cx, f);
    EXPECT_TRUE(w.closed());
    EXPECT_EQ(w.size(), 4u);
  }
}

TEST(Region, GridStarIsSmall) {
  auto cx = build_grid_with_holes(5, 5);
  auto r = star_region(cx, cx.vertex_id("v2_2"), 1);
  EXPECT_EQ(r.vertices.size(), 5u);
  EXPECT_TRUE(r.small);
  auto big = star_region(cx, cx.vertex_id("v2_2"), 2);
  EXPECT_TRUE(big.small);
  EXPECT_FALSE(big.faces.empty());
}

TEST(Region, WholeCycleIsNotSmall) {
  auto cx = build_cycle(8);
  auto r = star_region(cx, 0, 5);
  EXPECT_EQ(r.vertices.size(), 8u);
  EXPECT_FALSE(r.small);
}

TEST(Region, ArcIsSmall) {
  auto cx = build_cycle(8);
  auto r = induced_region(cx, {0, 1, 2, 3});
  EXPECT_TRUE(r.small);
  EXPECT_EQ(r.edges.size(), 3u);
  EXPECT_EQ(r.local_index(2), 2);
}

TEST(Region, NontrivialPresentationComplexIsNotSmall) {
  auto cx = build_presentation_complex({"a"}, std::vector<std::string>{"a3"});
  auto r = star_region(cx, 0, 1);
  EXPECT_EQ(r.vertices.size(), 1u);
  EXPECT_FALSE(r.small);
  // ⟨a | a⟩ is trivial, so the same shape is small.
  auto triv = build_presentation_complex({"a"}, std::vector<std::string>{"a"});
  EXPECT_TRUE(star_region(triv, 0, 1).small);
}

TEST(Region, RegionComplexKeepsInducedCells) {
  auto cx = build_grid_with_holes(4, 4);
  auto r = star_region(cx, cx.vertex_id("v1_1"), 2);
  auto sub = region_complex(cx, r);
  EXPECT_EQ(sub.vertex_count(), static_cast<int>(r.vertices.size()));
  EXPECT_EQ(sub.edge_count(), static_cast<int>(r.edges.size()));
  EXPECT_EQ(sub.face_count(), static_cast<int>(r.faces.size()));
}
