#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "sector_lab/complex.hpp"
#include "sector_lab/error.hpp"
#include "sector_lab/groups.hpp"
#include "sector_lab/words.hpp"

namespace sector_lab {

/// Breadth-first spanning tree. Ties are broken by the complex's outgoing
/// step order (target vertex, then edge id), so the tree is reproducible.
struct SpanningTree {
  int base = 0;
  std::vector<int> parent;        // -1 at the base
  std::vector<Step> parent_step;  // step from parent[v] to v
  std::vector<int> depth;
  std::vector<bool> tree_edge;    // per edge
  std::vector<int> chords;        // non-tree edge ids, ascending
  std::vector<int> chord_index;   // per edge; -1 for tree edges
};

inline SpanningTree spanning_tree(const ConfigComplex& cx, int base) {
  if (base < 0 || base >= cx.vertex_count()) fail(ErrorCode::invalid_parameter, "base vertex outside the complex");
  SpanningTree t;
  t.base = base;
  t.parent.assign(cx.vertex_count(), -1);
  t.parent_step.assign(cx.vertex_count(), Step{});
  t.depth.assign(cx.vertex_count(), -1);
  t.tree_edge.assign(cx.edge_count(), false);
  t.depth[base] = 0;
  std::queue<int> q;
  q.push(base);
  int reached = 1;
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    for (Step s : cx.outgoing(v)) {
      int w = cx.head(s);
      if (t.depth[w] >= 0) continue;
      t.depth[w] = t.depth[v] + 1;
      t.parent[w] = v;
      t.parent_step[w] = s;
      t.tree_edge[s.edge] = true;
      ++reached;
      q.push(w);
    }
  }
  if (reached != cx.vertex_count()) fail(ErrorCode::not_connected, "complex is not connected");
  t.chord_index.assign(cx.edge_count(), -1);
  for (int e = 0; e < cx.edge_count(); ++e)
    if (!t.tree_edge[e]) {
      t.chord_index[e] = static_cast<int>(t.chords.size());
      t.chords.push_back(e);
    }
  return t;
}

/// Result of Tietze elimination on the chord presentation.
struct SimplifiedPresentation {
  std::vector<int> generator_chords;  // chord index of each surviving generator
  std::vector<Word> relators;         // over surviving generators
  std::vector<Word> chord_images;     // chord index -> word over surviving generators
};

/// Repeatedly removes a generator occurring exactly once in some relator,
/// preferring the shortest such relator.
inline SimplifiedPresentation tietze_simplify(int rank, std::vector<Word> relators) {
  std::vector<Word> images(static_cast<std::size_t>(rank));
  for (int g = 0; g < rank; ++g) images[g] = {letter_of(g)};
  std::vector<bool> alive(static_cast<std::size_t>(rank), true);

  auto substitute = [](const Word& w, int g, const Word& sub, const Word& sub_inv) {
    Word out;
    for (int l : w) {
      if (letter_generator(l) == g) {
        const Word& s = l > 0 ? sub : sub_inv;
        out.insert(out.end(), s.begin(), s.end());
      } else {
        out.push_back(l);
      }
    }
    return free_reduce(out);
  };

  for (;;) {
    std::vector<Word> rels;
    for (auto& r : relators) {
      Word c = cyclic_reduce(r);
      if (!c.empty()) rels.push_back(std::move(c));
    }
    relators = std::move(rels);

    int best_r = -1, best_g = -1;
    for (std::size_t ri = 0; ri < relators.size(); ++ri) {
      if (best_r >= 0 && relators[ri].size() >= relators[best_r].size()) continue;
      std::vector<int> count(static_cast<std::size_t>(rank), 0);
      for (int l : relators[ri]) ++count[letter_generator(l)];
      for (int g = 0; g < rank; ++g)
        if (count[g] == 1) {
          best_r = static_cast<int>(ri);
          best_g = g;
          break;
        }
    }
    if (best_r < 0) break;

    Word r = relators[best_r];
    auto at = std::find_if(r.begin(), r.end(), [&](int l) { return letter_generator(l) == best_g; });
    std::rotate(r.begin(), at, r.end());
    // r = g^eps u = 1
    Word u(r.begin() + 1, r.end());
    Word sub = r.front() > 0 ? inverse_word(u) : u;
    Word sub_inv = inverse_word(sub);
    relators.erase(relators.begin() + best_r);
    for (auto& rel : relators) rel = substitute(rel, best_g, sub, sub_inv);
    for (auto& img : images) img = substitute(img, best_g, sub, sub_inv);
    alive[best_g] = false;
  }

  SimplifiedPresentation out;
  std::vector<int> renumber(static_cast<std::size_t>(rank), -1);
  for (int g = 0; g < rank; ++g)
    if (alive[g]) {
      renumber[g] = static_cast<int>(out.generator_chords.size());
      out.generator_chords.push_back(g);
    }
  auto remap = [&](const Word& w) {
    Word o;
    for (int l : w) o.push_back(letter_of(renumber[letter_generator(l)], l < 0));
    return o;
  };
  for (const auto& r : relators) out.relators.push_back(remap(r));
  for (const auto& img : images) out.chord_images.push_back(remap(img));
  return out;
}

/// Invariant factors of the abelianization: the free rank and the torsion
/// coefficients (each > 1), from the Smith normal form of the relation matrix.
struct Abelianization {
  int free_rank = 0;
  std::vector<long> torsion;
};

inline Abelianization abelianize(int rank, const std::vector<Word>& relators) {
  std::vector<std::vector<long>> m;
  for (const auto& r : relators) m.push_back(exponent_sums(r, rank));
  const int rows = static_cast<int>(m.size());
  std::vector<long> diag;
  int top = 0;
  for (int col = 0; col < rank && top < rows;) {
    // Pick the smallest nonzero entry in the remaining block as pivot.
    int pr = -1, pc = -1;
    for (int i = top; i < rows; ++i)
      for (int j = top; j < rank; ++j)
        if (m[i][j] != 0 && (pr < 0 || std::labs(m[i][j]) < std::labs(m[pr][pc]))) {
          pr = i;
          pc = j;
        }
    if (pr < 0) break;
    std::swap(m[top], m[pr]);
    for (auto& row : m) std::swap(row[top], row[pc]);
    bool clean = false;
    while (!clean) {
      clean = true;
      long p = m[top][top];
      for (int i = top + 1; i < rows; ++i) {
        long q = m[i][top] / p;
        for (int j = top; j < rank; ++j) m[i][j] -= q * m[top][j];
        if (m[i][top] != 0) clean = false;
      }
      for (int j = top + 1; j < rank; ++j) {
        long q = m[top][j] / p;
        for (int i = top; i < rows; ++i) m[i][j] -= q * m[i][top];
        if (m[top][j] != 0) clean = false;
      }
      if (!clean) {
        // move the smallest remaining entry of the pivot row/column to the pivot
        int br = top, bc = top;
        for (int i = top; i < rows; ++i)
          if (m[i][top] != 0 && std::labs(m[i][top]) < std::labs(m[br][bc])) br = i, bc = top;
        for (int j = top; j < rank; ++j)
          if (m[top][j] != 0 && std::labs(m[top][j]) < std::labs(m[br][bc])) br = top, bc = j;
        std::swap(m[top], m[br]);
        for (auto& row : m) std::swap(row[top], row[bc]);
        continue;
      }
      // divisibility condition for the rest of the block
      for (int i = top + 1; i < rows && clean; ++i)
        for (int j = top + 1; j < rank; ++j)
          if (m[i][j] % p != 0) {
            for (int k = top; k < rank; ++k) m[top][k] += m[i][k];
            clean = false;
            break;
          }
    }
    diag.push_back(std::labs(m[top][top]));
    ++top;
    col = top;
  }
  Abelianization a;
  a.free_rank = rank - static_cast<int>(diag.size());
  for (long d : diag)
    if (d > 1) a.torsion.push_back(d);
  std::sort(a.torsion.begin(), a.torsion.end());
  return a;
}

struct Pi1Options {
  std::size_t order_bound = 1000;  // largest finite group tried by coset enumeration
};

/// Spanning-tree presentation of the fundamental group of a complex at a base
/// vertex. Generators are the chords; one relator per face. The tree fixes the
/// family of reference paths δ(x) from the base to every vertex.
class Pi1Presentation {
 public:
  Pi1Presentation(ConfigComplex cx, int base, Pi1Options opts = {})
      : cx_(std::move(cx)), tree_(spanning_tree(cx_, base)) {
    for (int c : tree_.chords) chord_names_.push_back(cx_.edge(c).label);
    for (int f = 0; f < cx_.face_count(); ++f) relators_.push_back(free_reduce(chord_word(face_walk(cx_, f))));
    simplified_ = tietze_simplify(chord_count(), relators_);
    for (int c : simplified_.generator_chords) generator_names_.push_back(chord_names_[c]);
    guess_backend(opts);
  }

  const ConfigComplex& complex() const { return cx_; }
  int base() const { return tree_.base; }
  const SpanningTree& tree() const { return tree_; }

  int chord_count() const { return static_cast<int>(tree_.chords.size()); }
  const std::vector<std::string>& chord_names() const { return chord_names_; }
  /// Face relators over chords, one per face.
  const std::vector<Word>& relators() const { return relators_; }

  /// Generators surviving Tietze elimination (a subset of the chords).
  int generator_count() const { return static_cast<int>(generator_names_.size()); }
  const std::vector<std::string>& generator_names() const { return generator_names_; }
  const std::vector<Word>& simplified_relators() const { return simplified_.relators; }
  int generator_chord(int g) const { return simplified_.generator_chords[g]; }
  const Word& chord_image(int chord) const { return simplified_.chord_images[chord]; }

  bool has_backend() const { return backend_.has_value(); }
  const GroupBackend& backend() const {
    if (!backend_) fail(ErrorCode::backend_unavailable, backend_note_.empty() ? "no supported backend" : backend_note_);
    return *backend_;
  }
  std::string backend_guess() const { return backend_ ? backend_->tag() : "unavailable"; }
  const std::string& backend_note() const { return backend_note_; }

  bool simply_connected() const { return backend_ && backend_->order() == std::optional<std::size_t>(1); }

  /// Tree path from the base to x.
  PathWord delta(int x) const {
    if (x < 0 || x >= cx_.vertex_count()) fail(ErrorCode::invalid_parameter, "unknown vertex");
    std::vector<Step> rev;
    for (int v = x; v != tree_.base; v = tree_.parent[v]) rev.push_back(tree_.parent_step[v]);
    return PathWord(cx_, tree_.base, std::vector<Step>(rev.rbegin(), rev.rend()));
  }

  /// Chord letters of a walk, later steps on the left; tree steps contribute
  /// nothing. Closing the walk through the tree does not change this word.
  Word chord_word(const PathWord& p) const {
    Word w;
    for (auto it = p.steps().rbegin(); it != p.steps().rend(); ++it) {
      int c = tree_.chord_index[it->edge];
      if (c >= 0) w.push_back(letter_of(c, !it->forward));
    }
    return w;
  }

  /// The chord word rewritten over the surviving generators.
  Word generator_word(const PathWord& p) const {
    Word out;
    for (int l : chord_word(p)) {
      Word img = chord_image(letter_generator(l));
      if (l < 0) img = inverse_word(img);
      out.insert(out.end(), img.begin(), img.end());
    }
    return free_reduce(out);
  }

  /// Group element of the loop δ(y)^-1 · γ · δ(x) for a walk γ from x to y.
  GroupElement beta(const PathWord& p) const { return backend().reduce(generator_word(p)); }

  /// Based loop through a chord: tree path to its tail, the chord, tree path back.
  PathWord chord_loop(int chord) const {
    int e = tree_.chords[chord];
    PathWord one(cx_, cx_.edge(e).tail, {Step{e, true}});
    return then(then(delta(cx_.edge(e).tail), one), delta(cx_.edge(e).head).reversed());
  }
  PathWord generator_loop(int g) const { return chord_loop(generator_chord(g)); }

  /// Based loop realizing a word over the surviving generators.
  PathWord loop_of_word(const Word& w) const {
    // word l1·l2·…·ln is the holonomy-ordered product: walk ln first.
    PathWord out(tree_.base);
    for (auto it = w.rbegin(); it != w.rend(); ++it) {
      PathWord g = generator_loop(letter_generator(*it));
      out = then(out, *it > 0 ? g : g.reversed());
    }
    return out;
  }

 private:
  void guess_backend(const Pi1Options& opts) {
    const int k = generator_count();
    const auto& rels = simplified_.relators;
    if (k == 0) {
      backend_ = GroupBackend::finite(FiniteGroup::from_presentation({}, {}, 1));
      return;
    }
    if (rels.empty()) {
      backend_ = GroupBackend::free(generator_names_);
      return;
    }
    if (k == 1) {
      long n = 0;
      for (const auto& r : rels) n = std::gcd(n, std::labs(exponent_sums(r, 1)[0]));
      if (n == 0) {
        backend_ = GroupBackend::free(generator_names_);
      } else if (n == 1) {
        backend_ = GroupBackend::finite(FiniteGroup::from_presentation({}, {}, 1));
      } else {
        backend_ = GroupBackend::cyclic(generator_names_[0], static_cast<int>(n));
      }
      return;
    }
    if (commutator_presentation(k, rels)) {
      backend_ = GroupBackend::free_abelian(generator_names_);
      return;
    }
    try {
      backend_ = GroupBackend::finite(FiniteGroup::from_presentation(generator_names_, rels, opts.order_bound));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::possibly_infinite_group) throw;
      backend_note_ = "no supported backend for this presentation (" + std::string(e.what()) + ")";
    }
  }

  static bool commutator_presentation(int k, const std::vector<Word>& rels) {
    std::set<std::pair<int, int>> pairs;
    for (const auto& r : rels) {
      if (r.size() != 4) return false;
      int x = r[0], y = r[1];
      if (letter_generator(x) == letter_generator(y)) return false;
      if (r[2] != -x || r[3] != -y) return false;
      int a = letter_generator(x), b = letter_generator(y);
      pairs.insert({std::min(a, b), std::max(a, b)});
    }
    return static_cast<int>(pairs.size()) == k * (k - 1) / 2;
  }

  ConfigComplex cx_;
  SpanningTree tree_;
  std::vector<std::string> chord_names_;
  std::vector<Word> relators_;
  SimplifiedPresentation simplified_;
  std::vector<std::string> generator_names_;
  std::optional<GroupBackend> backend_;
  std::string backend_note_;
};

}  // namespace sector_lab
