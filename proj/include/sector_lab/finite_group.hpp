#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <optional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "sector_lab/error.hpp"
#include "sector_lab/words.hpp"

namespace sector_lab {

/// Finite group stored as a full multiplication table. Element 0 is the
/// identity; elements are numbered in shortlex order of their generator words
/// (letter order g0, g0^-1, g1, g1^-1, ...), except for the built-in
/// constructors which fix their own numbering.
class FiniteGroup {
 public:
  using CharacterValues = std::vector<std::vector<std::complex<double>>>;

  FiniteGroup(std::vector<std::vector<int>> table, std::vector<int> generators,
              std::vector<std::string> names)
      : table_(std::move(table)), generators_(std::move(generators)), names_(std::move(names)) {
    const int n = static_cast<int>(table_.size());
    if (n == 0) fail(ErrorCode::invalid_parameter, "empty multiplication table");
    if (generators_.size() != names_.size())
      fail(ErrorCode::invalid_parameter, "generator/name count mismatch");
    for (const auto& row : table_)
      if (static_cast<int>(row.size()) != n)
        fail(ErrorCode::invalid_parameter, "multiplication table is not square");
    for (int a = 0; a < n; ++a)
      if (table_[0][static_cast<std::size_t>(a)] != a || table_[static_cast<std::size_t>(a)][0] != a)
        fail(ErrorCode::invalid_parameter, "element 0 must be the identity");
    inverse_.assign(static_cast<std::size_t>(n), -1);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if (mul(a, b) == 0) inverse_[static_cast<std::size_t>(a)] = b;
    for (int a = 0; a < n; ++a)
      if (inverse_[static_cast<std::size_t>(a)] < 0)
        fail(ErrorCode::invalid_parameter, "table is not a group (missing inverse)");
    build_words();
  }

  /// Z_n generated by `name`; element m is name^m.
  static FiniteGroup cyclic(int n, std::string name = "a") {
    if (n < 1) fail(ErrorCode::invalid_parameter, "cyclic group order must be >= 1");
    std::vector<std::vector<int>> t(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n)));
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) t[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = (a + b) % n;
    std::vector<int> gens;
    std::vector<std::string> names;
    gens.push_back(1 % n);
    names.push_back(std::move(name));
    FiniteGroup g(std::move(t), std::move(gens), std::move(names));
    CharacterValues chars(static_cast<std::size_t>(n), std::vector<std::complex<double>>(static_cast<std::size_t>(n)));
    for (int k = 0; k < n; ++k)
      for (int m = 0; m < n; ++m)
        chars[static_cast<std::size_t>(k)][static_cast<std::size_t>(m)] =
            std::polar(1.0, 2.0 * M_PI * static_cast<double>((static_cast<long>(k) * m) % n) / n);
    g.exact_characters_ = std::move(chars);
    return g;
  }

  /// S_n on permutations of {0..n-1} in lexicographic order, generated by the
  /// adjacent transpositions s1..s_{n-1}. Exact character tables for n <= 4.
  static FiniteGroup symmetric(int n) {
    if (n < 1 || n > 7) fail(ErrorCode::invalid_parameter, "symmetric group degree must be in 1..7");
    std::vector<std::vector<int>> perms;
    std::vector<int> p(static_cast<std::size_t>(n));
    std::iota(p.begin(), p.end(), 0);
    do perms.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
    auto index_of = [&](const std::vector<int>& q) {
      return static_cast<int>(std::lower_bound(perms.begin(), perms.end(), q) - perms.begin());
    };
    const std::size_t order = perms.size();
    std::vector<std::vector<int>> t(order, std::vector<int>(order));
    std::vector<int> comp(static_cast<std::size_t>(n));
    for (std::size_t a = 0; a < order; ++a)
      for (std::size_t b = 0; b < order; ++b) {
        // (a·b)(i) = a(b(i))
        for (int i = 0; i < n; ++i)
          comp[static_cast<std::size_t>(i)] = perms[a][static_cast<std::size_t>(perms[b][static_cast<std::size_t>(i)])];
        t[a][b] = index_of(comp);
      }
    std::vector<int> gens;
    std::vector<std::string> names;
    for (int i = 0; i + 1 < n; ++i) {
      std::vector<int> s(static_cast<std::size_t>(n));
      std::iota(s.begin(), s.end(), 0);
      std::swap(s[static_cast<std::size_t>(i)], s[static_cast<std::size_t>(i + 1)]);
      gens.push_back(index_of(s));
      names.push_back("s" + std::to_string(i + 1));
    }
    FiniteGroup g(std::move(t), std::move(gens), std::move(names));
    if (n <= 4) g.exact_characters_ = symmetric_characters(n, perms);
    return g;
  }

  /// Todd–Coxeter enumeration of the cosets of the trivial subgroup.
  static FiniteGroup from_presentation(const std::vector<std::string>& names,
                                       const std::vector<Word>& relators,
                                       std::size_t order_bound);

  int order() const { return static_cast<int>(table_.size()); }
  int mul(int a, int b) const { return table_[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]; }
  int inverse(int a) const { return inverse_[static_cast<std::size_t>(a)]; }
  int rank() const { return static_cast<int>(generators_.size()); }
  int generator(int i) const { return generators_[static_cast<std::size_t>(i)]; }
  const std::vector<std::string>& generator_names() const { return names_; }
  const std::vector<std::vector<int>>& table() const { return table_; }

  /// Shortlex-minimal generator word of an element.
  const Word& word_of(int element) const { return words_[static_cast<std::size_t>(element)]; }

  int evaluate(const Word& w) const {
    int e = 0;
    for (int l : w) {
      int g = generator(letter_generator(l));
      e = mul(e, l > 0 ? g : inverse(g));
    }
    return e;
  }

  bool is_abelian() const {
    for (int a = 0; a < order(); ++a)
      for (int b = 0; b < a; ++b)
        if (mul(a, b) != mul(b, a)) return false;
    return true;
  }

  /// Conjugacy classes, each sorted, ordered by smallest member (identity first).
  std::vector<std::vector<int>> conjugacy_classes() const {
    std::vector<int> seen(static_cast<std::size_t>(order()), -1);
    std::vector<std::vector<int>> classes;
    for (int g = 0; g < order(); ++g) {
      if (seen[static_cast<std::size_t>(g)] >= 0) continue;
      std::vector<int> cls;
      for (int h = 0; h < order(); ++h) {
        int c = mul(mul(h, g), inverse(h));
        if (seen[static_cast<std::size_t>(c)] < 0) {
          seen[static_cast<std::size_t>(c)] = static_cast<int>(classes.size());
          cls.push_back(c);
        }
      }
      std::sort(cls.begin(), cls.end());
      classes.push_back(std::move(cls));
    }
    return classes;
  }

  /// Exact irreducible characters [irrep][element] when the group was built
  /// by a constructor that knows them.
  const std::optional<CharacterValues>& exact_characters() const { return exact_characters_; }

 private:
  void build_words() {
    const std::size_t n = table_.size();
    words_.assign(n, Word{});
    std::vector<bool> reached(n, false);
    reached[0] = true;
    std::queue<int> q;
    q.push(0);
    std::size_t count = 1;
    while (!q.empty()) {
      int e = q.front();
      q.pop();
      for (int i = 0; i < rank(); ++i)
        for (bool inv : {false, true}) {
          int g = generator(i);
          int f = mul(e, inv ? inverse(g) : g);
          if (!reached[static_cast<std::size_t>(f)]) {
            reached[static_cast<std::size_t>(f)] = true;
            words_[static_cast<std::size_t>(f)] = words_[static_cast<std::size_t>(e)];
            words_[static_cast<std::size_t>(f)].push_back(letter_of(i, inv));
            ++count;
            q.push(f);
          }
        }
    }
    if (count != n) fail(ErrorCode::invalid_parameter, "generators do not generate the group");
  }

  static CharacterValues symmetric_characters(int n, const std::vector<std::vector<int>>& perms) {
    // Columns keyed by cycle type (sorted descending, as a string of lengths).
    auto cycle_type = [n](const std::vector<int>& p) {
      std::vector<bool> seen(static_cast<std::size_t>(n), false);
      std::vector<int> lens;
      for (int i = 0; i < n; ++i) {
        if (seen[static_cast<std::size_t>(i)]) continue;
        int len = 0;
        for (int j = i; !seen[static_cast<std::size_t>(j)]; j = p[static_cast<std::size_t>(j)]) {
          seen[static_cast<std::size_t>(j)] = true;
          ++len;
        }
        lens.push_back(len);
      }
      std::sort(lens.rbegin(), lens.rend());
      std::string key;
      for (int l : lens) key += static_cast<char>('0' + l);
      return key;
    };
    // Rows: irreps; entries listed per cycle type.
    std::vector<std::vector<std::pair<std::string, int>>> rows;
    switch (n) {
      case 1: rows = {{{"1", 1}}}; break;
      case 2: rows = {{{"11", 1}, {"2", 1}}, {{"11", 1}, {"2", -1}}}; break;
      case 3:
        rows = {{{"111", 1}, {"21", 1}, {"3", 1}},
                {{"111", 1}, {"21", -1}, {"3", 1}},
                {{"111", 2}, {"21", 0}, {"3", -1}}};
        break;
      default:
        rows = {{{"1111", 1}, {"211", 1}, {"22", 1}, {"31", 1}, {"4", 1}},
                {{"1111", 1}, {"211", -1}, {"22", 1}, {"31", 1}, {"4", -1}},
                {{"1111", 2}, {"211", 0}, {"22", 2}, {"31", -1}, {"4", 0}},
                {{"1111", 3}, {"211", 1}, {"22", -1}, {"31", 0}, {"4", -1}},
                {{"1111", 3}, {"211", -1}, {"22", -1}, {"31", 0}, {"4", 1}}};
        break;
    }
    CharacterValues out;
    for (const auto& row : rows) {
      std::vector<std::complex<double>> chi;
      for (const auto& p : perms) {
        auto key = cycle_type(p);
        for (const auto& [k, v] : row)
          if (k == key) chi.emplace_back(v, 0.0);
      }
      out.push_back(std::move(chi));
    }
    return out;
  }

  std::vector<std::vector<int>> table_;
  std::vector<int> generators_;
  std::vector<std::string> names_;
  std::vector<int> inverse_;
  std::vector<Word> words_;
  std::optional<CharacterValues> exact_characters_;
};

namespace detail {

/// Hasselgrove–Leech–Trotter coset enumeration over the trivial subgroup.
/// Columns: 2*i for generator i, 2*i+1 for its inverse.
class CosetEnumerator {
 public:
  CosetEnumerator(int rank, std::vector<Word> relators, std::size_t limit)
      : rank_(rank), relators_(std::move(relators)), limit_(limit) {
    new_coset();
  }

  bool run() {
    for (int alpha = 0; alpha < static_cast<int>(parent_.size()); ++alpha) {
      if (!live(alpha)) continue;
      for (const Word& r : relators_) {
        if (!scan_and_fill(alpha, r)) return false;
        if (!live(alpha)) break;
      }
      if (!live(alpha)) continue;
      for (int x = 0; x < 2 * rank_; ++x)
        if (at(alpha, x) < 0 && !define(alpha, x)) return false;
    }
    return true;
  }

  /// Coset table of live cosets renumbered 0..n-1 with coset 0 first.
  std::vector<std::vector<int>> compact() const {
    std::vector<int> index(parent_.size(), -1);
    int n = 0;
    for (std::size_t c = 0; c < parent_.size(); ++c)
      if (parent_[c] == static_cast<int>(c)) index[c] = n++;
    std::vector<std::vector<int>> out;
    for (std::size_t c = 0; c < parent_.size(); ++c) {
      if (parent_[c] != static_cast<int>(c)) continue;
      std::vector<int> row(static_cast<std::size_t>(2 * rank_));
      for (int x = 0; x < 2 * rank_; ++x) row[static_cast<std::size_t>(x)] = index[static_cast<std::size_t>(table_[c][static_cast<std::size_t>(x)])];
      out.push_back(std::move(row));
    }
    return out;
  }

 private:
  static int column(int letter) { return 2 * letter_generator(letter) + (letter < 0 ? 1 : 0); }
  static int inv_column(int x) { return x ^ 1; }

  bool live(int c) const { return parent_[static_cast<std::size_t>(c)] == c; }
  int& at(int c, int x) { return table_[static_cast<std::size_t>(c)][static_cast<std::size_t>(x)]; }
  int at(int c, int x) const { return table_[static_cast<std::size_t>(c)][static_cast<std::size_t>(x)]; }

  int new_coset() {
    parent_.push_back(static_cast<int>(parent_.size()));
    table_.emplace_back(static_cast<std::size_t>(2 * rank_), -1);
    return static_cast<int>(parent_.size()) - 1;
  }

  bool define(int c, int x) {
    if (parent_.size() >= limit_) return false;
    int d = new_coset();
    at(c, x) = d;
    at(d, inv_column(x)) = c;
    return true;
  }

  bool scan_and_fill(int alpha, const Word& w) {
    const int r = static_cast<int>(w.size());
    int f = alpha, b = alpha;
    int i = 0, j = r - 1;
    for (;;) {
      while (i <= j && at(f, column(w[static_cast<std::size_t>(i)])) >= 0) {
        f = at(f, column(w[static_cast<std::size_t>(i)]));
        ++i;
      }
      if (i > j) {
        if (f != alpha) coincidence(f, alpha);
        return true;
      }
      while (j >= i && at(b, inv_column(column(w[static_cast<std::size_t>(j)]))) >= 0) {
        b = at(b, inv_column(column(w[static_cast<std::size_t>(j)])));
        --j;
      }
      if (j < i) {
        coincidence(f, b);
        return true;
      }
      if (j == i) {
        int x = column(w[static_cast<std::size_t>(i)]);
        at(f, x) = b;
        at(b, inv_column(x)) = f;
        return true;
      }
      if (!define(f, column(w[static_cast<std::size_t>(i)]))) return false;
    }
  }

  int rep(int k) {
    int l = k;
    while (parent_[static_cast<std::size_t>(l)] != l) l = parent_[static_cast<std::size_t>(l)];
    while (parent_[static_cast<std::size_t>(k)] != l) {
      int next = parent_[static_cast<std::size_t>(k)];
      parent_[static_cast<std::size_t>(k)] = l;
      k = next;
    }
    return l;
  }

  void merge(int k, int l, std::vector<int>& queue) {
    int a = rep(k), b = rep(l);
    if (a == b) return;
    if (a > b) std::swap(a, b);
    parent_[static_cast<std::size_t>(b)] = a;
    queue.push_back(b);
  }

  void coincidence(int alpha, int beta) {
    std::vector<int> queue;
    merge(alpha, beta, queue);
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      int gamma = queue[qi];
      for (int x = 0; x < 2 * rank_; ++x) {
        int delta = at(gamma, x);
        if (delta < 0) continue;
        at(delta, inv_column(x)) = -1;
        int mu = rep(gamma), nu = rep(delta);
        if (at(mu, x) >= 0) {
          merge(nu, at(mu, x), queue);
        } else if (at(nu, inv_column(x)) >= 0) {
          merge(mu, at(nu, inv_column(x)), queue);
        } else {
          at(mu, x) = nu;
          at(nu, inv_column(x)) = mu;
        }
      }
    }
  }

  int rank_;
  std::vector<Word> relators_;
  std::size_t limit_;
  std::vector<int> parent_;
  std::vector<std::vector<int>> table_;
};

}  // namespace detail

inline FiniteGroup FiniteGroup::from_presentation(const std::vector<std::string>& names,
                                                  const std::vector<Word>& relators,
                                                  std::size_t order_bound) {
  const int rank = static_cast<int>(names.size());
  for (const Word& r : relators)
    for (int l : r)
      if (l == 0 || letter_generator(l) >= rank)
        fail(ErrorCode::invalid_parameter, "relator uses an undeclared generator");
  std::vector<Word> rels;
  for (const Word& r : relators) {
    Word c = cyclic_reduce(r);
    if (!c.empty()) rels.push_back(std::move(c));
  }
  const std::size_t limit = 32 * order_bound + 64;
  detail::CosetEnumerator tc(rank, rels, limit);
  if (!tc.run())
    fail(ErrorCode::possibly_infinite_group,
         "coset enumeration exceeded " + std::to_string(limit) + " cosets (order bound " +
             std::to_string(order_bound) + ")");
  auto cosets = tc.compact();
  if (cosets.size() > order_bound)
    fail(ErrorCode::possibly_infinite_group,
         "group order " + std::to_string(cosets.size()) + " exceeds bound " + std::to_string(order_bound));

  // Renumber in BFS order over letters g0, g0^-1, g1, ... so that numbering
  // matches the shortlex word order used by build_words().
  const std::size_t n = cosets.size();
  std::vector<int> relabel(n, -1);
  std::vector<int> order_list;
  relabel[0] = 0;
  order_list.push_back(0);
  for (std::size_t qi = 0; qi < order_list.size(); ++qi) {
    int c = order_list[qi];
    for (int x = 0; x < 2 * rank; ++x) {
      int d = cosets[static_cast<std::size_t>(c)][static_cast<std::size_t>(x)];
      if (relabel[static_cast<std::size_t>(d)] < 0) {
        relabel[static_cast<std::size_t>(d)] = static_cast<int>(order_list.size());
        order_list.push_back(d);
      }
    }
  }
  std::vector<std::vector<int>> action(n, std::vector<int>(static_cast<std::size_t>(2 * rank)));
  for (std::size_t c = 0; c < n; ++c)
    for (int x = 0; x < 2 * rank; ++x)
      action[static_cast<std::size_t>(relabel[c])][static_cast<std::size_t>(x)] =
          relabel[static_cast<std::size_t>(cosets[c][static_cast<std::size_t>(x)])];

  // Word of each element, then table[a][b] = a acted on by word(b).
  std::vector<Word> words(n);
  for (std::size_t e = 1; e < n; ++e) words[e].clear();
  {
    std::vector<bool> reached(n, false);
    reached[0] = true;
    std::vector<int> q{0};
    for (std::size_t qi = 0; qi < q.size(); ++qi) {
      int c = q[qi];
      for (int x = 0; x < 2 * rank; ++x) {
        int d = action[static_cast<std::size_t>(c)][static_cast<std::size_t>(x)];
        if (!reached[static_cast<std::size_t>(d)]) {
          reached[static_cast<std::size_t>(d)] = true;
          words[static_cast<std::size_t>(d)] = words[static_cast<std::size_t>(c)];
          words[static_cast<std::size_t>(d)].push_back(x % 2 == 0 ? x / 2 + 1 : -(x / 2 + 1));
          q.push_back(d);
        }
      }
    }
  }
  std::vector<std::vector<int>> table(n, std::vector<int>(n));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      int c = static_cast<int>(a);
      for (int l : words[b])
        c = action[static_cast<std::size_t>(c)][static_cast<std::size_t>(2 * letter_generator(l) + (l < 0 ? 1 : 0))];
      table[a][b] = c;
    }
  std::vector<int> gens;
  for (int i = 0; i < rank; ++i) gens.push_back(action[0][static_cast<std::size_t>(2 * i)]);
  return FiniteGroup(std::move(table), std::move(gens), names);
}

}  // namespace sector_lab
