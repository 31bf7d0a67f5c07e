#include <gtest/gtest.h>

#include <random>

#include "sector_lab/builders.hpp"
#include "sector_lab/words.hpp"

using namespace sector_lab;

namespace {

// Cancels one adjacent inverse pair per pass until none is left.
Word slow_reduce(Word w) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i + 1 < w.size(); ++i)
      if (w[i] == -w[i + 1]) {
        w.erase(w.begin() + static_cast<long>(i), w.begin() + static_cast<long>(i) + 2);
        changed = true;
        break;
      }
  }
  return w;
}

Word random_word(std::mt19937_64& rng, int rank, int len) {
  std::uniform_int_distribution<int> g(0, rank - 1), s(0, 1);
  Word w;
  for (int i = 0; i < len; ++i) {
    int gen = g(rng);
    bool inv = s(rng) == 1;
    w.push_back(letter_of(gen, inv));
  }
  return w;
}

}  // namespace

TEST(Words, LetterEncoding) {
  EXPECT_EQ(letter_of(0), 1);
  EXPECT_EQ(letter_of(2, true), -3);
  EXPECT_EQ(letter_generator(-3), 2);
}

TEST(Words, FreeReductionCancelsInversePairs) {
  EXPECT_TRUE(free_reduce({1, 2, -2, -1}).empty());
  EXPECT_EQ(free_reduce({1, 1, -1, 2}), (Word{1, 2}));
}

TEST(Words, ReductionMatchesSlowOracle) {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 500; ++t) {
    Word w = random_word(rng, 3, 20);
    EXPECT_EQ(free_reduce(w), slow_reduce(w));
  }
}

TEST(Words, InverseAndConcatenation) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 200; ++t) {
    Word a = random_word(rng, 2, 12), b = random_word(rng, 2, 9);
    EXPECT_TRUE(free_reduce(concat(a, inverse_word(a))).empty());
    EXPECT_EQ(free_reduce(inverse_word(concat(a, b))), free_reduce(concat(inverse_word(b), inverse_word(a))));
    EXPECT_EQ(free_reduce(free_reduce(a)), free_reduce(a));
  }
}

TEST(Words, PowersAndCyclicReduction) {
  EXPECT_EQ(power({1, 2}, 3), (Word{1, 2, 1, 2, 1, 2}));
  EXPECT_EQ(power({1, 2}, -1), (Word{-2, -1}));
  EXPECT_TRUE(power({1}, 0).empty());
  EXPECT_EQ(cyclic_reduce({-2, 1, 1, 2}), (Word{1, 1}));
}

TEST(Words, ExponentSums) {
  auto s = exponent_sums({1, 2, -1, 2, 2}, 2);
  EXPECT_EQ(s[0], 0);
  EXPECT_EQ(s[1], 3);
}

TEST(Words, FormatAndParseRoundTrip) {
  std::vector<std::string> names{"a", "b"};
  EXPECT_EQ(parse_word("(ab)3", names), (Word{1, 2, 1, 2, 1, 2}));
  EXPECT_EQ(parse_word("a2", names), (Word{1, 1}));
  EXPECT_EQ(parse_word("abab ab", names), (Word{1, 2, 1, 2, 1, 2}));
  EXPECT_EQ(parse_word("a^-1 b", names), (Word{-1, 2}));
  std::mt19937_64 rng(5);
  for (int t = 0; t < 100; ++t) {
    Word w = free_reduce(random_word(rng, 2, 10));
    EXPECT_EQ(free_reduce(parse_word(format_word(w, names), names)), w) << format_word(w, names);
  }
}

TEST(Words, ParseRejectsUnknownGenerator) {
  EXPECT_THROW(parse_word("ac", {"a", "b"}), Error);
  EXPECT_THROW(parse_word("(ab", {"a", "b"}), Error);
}
