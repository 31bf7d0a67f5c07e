#pragma once

#include <cstdlib>
#include <string>
#include <vector>

namespace sector_lab {

/// A word in generators 0..k-1. Letter +(i+1) is generator i, -(i+1) its
/// inverse. The word [l1, l2, ..., ln] denotes the product l1·l2·…·ln.
using Word = std::vector<int>;

inline int letter_generator(int letter) { return std::abs(letter) - 1; }
inline int letter_of(int generator, bool inverse = false) {
  return inverse ? -(generator + 1) : generator + 1;
}

inline Word free_reduce(const Word& w) {
  Word out;
  out.reserve(w.size());
  for (int l : w) {
    if (!out.empty() && out.back() == -l) {
      out.pop_back();
    } else {
      out.push_back(l);
    }
  }
  return out;
}

inline Word inverse_word(const Word& w) {
  Word out(w.rbegin(), w.rend());
  for (int& l : out) l = -l;
  return out;
}

inline Word concat(const Word& a, const Word& b) {
  Word out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

inline Word power(const Word& w, int n) {
  Word base = n < 0 ? inverse_word(w) : w;
  Word out;
  for (int i = 0; i < std::abs(n); ++i) out.insert(out.end(), base.begin(), base.end());
  return out;
}

/// Free reduction followed by cancelling matching first/last letters.
inline Word cyclic_reduce(const Word& w) {
  Word r = free_reduce(w);
  std::size_t lo = 0, hi = r.size();
  while (hi - lo >= 2 && r[lo] == -r[hi - 1]) {
    ++lo;
    --hi;
  }
  return Word(r.begin() + static_cast<long>(lo), r.begin() + static_cast<long>(hi));
}

/// Exponent sum of every generator.
inline std::vector<long> exponent_sums(const Word& w, int rank) {
  std::vector<long> sums(static_cast<std::size_t>(rank), 0);
  for (int l : w) sums[static_cast<std::size_t>(letter_generator(l))] += l > 0 ? 1 : -1;
  return sums;
}

inline std::string format_word(const Word& w, const std::vector<std::string>& names) {
  if (w.empty()) return "1";
  std::string out;
  std::size_t i = 0;
  while (i < w.size()) {
    std::size_t j = i;
    while (j < w.size() && w[j] == w[i]) ++j;
    if (!out.empty()) out += ' ';
    out += names[static_cast<std::size_t>(letter_generator(w[i]))];
    long e = static_cast<long>(j - i) * (w[i] > 0 ? 1 : -1);
    if (e != 1) out += '^' + std::to_string(e);
    i = j;
  }
  return out;
}

}  // namespace sector_lab
