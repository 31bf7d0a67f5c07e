#include <gtest/gtest.h>

#include <array>
#include <map>
#include <random>
#include <set>

#include "sector_lab/builders.hpp"
#include "sector_lab/groups.hpp"

using namespace sector_lab;

namespace {

using Perm = std::vector<int>;

Perm compose(const Perm& p, const Perm& q) {  // p after q
  Perm r(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) r[i] = p[static_cast<std::size_t>(q[i])];
  return r;
}

Perm inverse(const Perm& p) {
  Perm r(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) r[static_cast<std::size_t>(p[i])] = static_cast<int>(i);
  return r;
}

Perm evaluate(const Word& w, const std::vector<Perm>& gens) {
  Perm r(gens[0].size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = static_cast<int>(i);
  for (int l : w) {
    const Perm& g = gens[static_cast<std::size_t>(letter_generator(l))];
    r = compose(r, l > 0 ? g : inverse(g));
  }
  return r;
}

// Checks that word_of gives an isomorphism onto the group generated by `gens`.
void expect_isomorphic(const FiniteGroup& g, const std::vector<Perm>& gens, std::size_t expected_order) {
  std::map<Perm, int> image;
  for (int x = 0; x < g.order(); ++x) image[evaluate(g.word_of(x), gens)] = x;
  EXPECT_EQ(image.size(), static_cast<std::size_t>(g.order()));
  EXPECT_EQ(image.size(), expected_order);
  for (int x = 0; x < g.order(); ++x)
    for (int y = 0; y < g.order(); ++y)
      EXPECT_EQ(evaluate(g.word_of(g.mul(x, y)), gens), compose(evaluate(g.word_of(x), gens), evaluate(g.word_of(y), gens)));
}

void expect_group_axioms(const FiniteGroup& g) {
  const int n = g.order();
  for (int a = 0; a < n; ++a) {
    EXPECT_EQ(g.mul(0, a), a);
    EXPECT_EQ(g.mul(a, g.inverse(a)), 0);
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) EXPECT_EQ(g.mul(g.mul(a, b), c), g.mul(a, g.mul(b, c)));
  }
}

}  // namespace

TEST(FreeBackend, ReductionAndProducts) {
  auto f = GroupBackend::free({"a", "b"});
  EXPECT_TRUE(f.is_identity(f.reduce({1, 2, -2, -1})));
  auto a = f.generator(0), b = f.generator(1);
  EXPECT_NE(f.multiply(a, b), f.multiply(b, a));
  EXPECT_EQ(f.multiply(a, f.inverse(a)), f.identity());
  EXPECT_EQ(f.word_of(f.reduce({1, 1, 2, -2})), (Word{1, 1}));
  EXPECT_FALSE(f.is_finite());
  EXPECT_FALSE(f.order().has_value());
  EXPECT_EQ(f.tag(), "free");
}

TEST(FreeAbelianBackend, Commutes) {
  auto z2 = GroupBackend::free_abelian({"a", "b"});
  auto a = z2.generator(0), b = z2.generator(1);
  EXPECT_EQ(z2.multiply(a, b), z2.multiply(b, a));
  EXPECT_TRUE(z2.is_identity(z2.reduce({1, 2, -1, -2})));
  EXPECT_EQ(z2.reduce(z2.word_of(z2.reduce({2, 1, 1, 2, 2}))), z2.reduce({1, 1, 2, 2, 2}));
  EXPECT_TRUE(z2.is_abelian());
}

TEST(CyclicBackend, ReducesModN) {
  auto c3 = GroupBackend::cyclic("a", 3);
  EXPECT_EQ(c3.reduce({1, 1, 1, 1, 1}), c3.reduce({1, 1}));
  EXPECT_EQ(c3.index_of(c3.reduce({1, 1, 1, 1, 1})), 2);
  EXPECT_EQ(c3.reduce({-1}), c3.reduce({1, 1}));
  EXPECT_EQ(c3.order(), std::optional<std::size_t>(3));
  EXPECT_EQ(c3.tag(), "cyclic-3");
}

TEST(FiniteGroup, SymmetricThreeFromCosetEnumeration) {
  std::vector<std::string> names{"a", "b"};
  auto g = FiniteGroup::from_presentation(names, {parse_word("a2", names), parse_word("b2", names), parse_word("(ab)3", names)},
                                          1000);
  EXPECT_EQ(g.order(), 6);
  EXPECT_FALSE(g.is_abelian());
  expect_group_axioms(g);
  expect_isomorphic(g, {{1, 0, 2}, {0, 2, 1}}, 6);
  auto backend = GroupBackend::finite(g);
  EXPECT_TRUE(backend.is_identity(backend.reduce(parse_word("(ab)3", names))));
  EXPECT_FALSE(backend.is_identity(backend.reduce(parse_word("ab", names))));
}

TEST(FiniteGroup, CyclicFourFromPresentation) {
  auto g = FiniteGroup::from_presentation({"a"}, {{1, 1, 1, 1}}, 1000);
  EXPECT_EQ(g.order(), 4);
  EXPECT_TRUE(g.is_abelian());
  expect_isomorphic(g, {{1, 2, 3, 0}}, 4);
}

TEST(FiniteGroup, DihedralEight) {
  std::vector<std::string> names{"r", "s"};
  auto g = FiniteGroup::from_presentation(names, {parse_word("r4", names), parse_word("s2", names), parse_word("(rs)2", names)},
                                          1000);
  EXPECT_EQ(g.order(), 8);
  expect_group_axioms(g);
  // Symmetries of a square acting on its corners.
  expect_isomorphic(g, {{1, 2, 3, 0}, {0, 3, 2, 1}}, 8);
}

TEST(FiniteGroup, QuaternionViaCosets) {
  std::vector<std::string> names{"i", "j"};
  auto g = FiniteGroup::from_presentation(names, {parse_word("i4", names), parse_word("i2 j^-2", names), parse_word("j^-1 i j i", names)},
                                          1000);
  EXPECT_EQ(g.order(), 8);
  EXPECT_FALSE(g.is_abelian());
  expect_group_axioms(g);
  int order_two = 0;
  for (int x = 1; x < g.order(); ++x)
    if (g.mul(x, x) == 0) ++order_two;
  EXPECT_EQ(order_two, 1);  // only -1
}

TEST(FiniteGroup, FreeGroupHitsTheBound) {
  try {
    FiniteGroup::from_presentation({"a", "b"}, {}, 1000);
    FAIL() << "expected possibly-infinite-group";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::possibly_infinite_group);
  }
}

TEST(FiniteGroup, SymmetricBuiltinsAndClasses) {
  auto s4 = FiniteGroup::symmetric(4);
  EXPECT_EQ(s4.order(), 24);
  expect_group_axioms(s4);
  EXPECT_EQ(s4.conjugacy_classes().size(), 5u);
  ASSERT_TRUE(s4.exact_characters().has_value());
  EXPECT_EQ(s4.exact_characters()->size(), 5u);
  auto s3 = FiniteGroup::symmetric(3);
  auto classes = s3.conjugacy_classes();
  std::multiset<std::size_t> sizes;
  for (const auto& c : classes) sizes.insert(c.size());
  EXPECT_EQ(sizes, (std::multiset<std::size_t>{1, 2, 3}));
}

TEST(FiniteGroup, WordsEvaluateToTheirElement) {
  auto g = FiniteGroup::symmetric(4);
  for (int x = 0; x < g.order(); ++x) EXPECT_EQ(g.evaluate(g.word_of(x)), x);
}

TEST(Backends, RandomWordsAgreeWithPermutationOracle) {
  std::vector<std::string> names{"a", "b"};
  auto backend = GroupBackend::finite(
      FiniteGroup::from_presentation(names, {parse_word("a2", names), parse_word("b2", names), parse_word("(ab)3", names)}, 1000));
  std::vector<Perm> gens{{1, 0, 2}, {0, 2, 1}};
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> pick(0, 3);
  const std::array<int, 4> letters{1, -1, 2, -2};
  for (int t = 0; t < 200; ++t) {
    Word u, v;
    for (int i = 0; i < 8; ++i) u.push_back(letters[static_cast<std::size_t>(pick(rng))]);
    for (int i = 0; i < 8; ++i) v.push_back(letters[static_cast<std::size_t>(pick(rng))]);
    bool equal_oracle = evaluate(u, gens) == evaluate(v, gens);
    EXPECT_EQ(backend.reduce(u) == backend.reduce(v), equal_oracle);
  }
}
