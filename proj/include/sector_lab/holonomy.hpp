#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <queue>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "sector_lab/complex.hpp"
#include "sector_lab/error.hpp"
#include "sector_lab/groups.hpp"
#include "sector_lab/linalg.hpp"
#include "sector_lab/pi1.hpp"
#include "sector_lab/region.hpp"

namespace sector_lab {

inline constexpr double kDefaultTol = 1e-10;

/// Finite-dimensional unitary representation, given by generator images.
class UnitaryRep {
 public:
  UnitaryRep(int dim, std::vector<std::string> generators, std::vector<Matrix> images, double tol = kDefaultTol)
      : dim_(dim), names_(std::move(generators)), images_(std::move(images)), tol_(tol) {
    if (dim_ < 1) fail(ErrorCode::invalid_representation, "dimension must be >= 1");
    if (names_.size() != images_.size()) fail(ErrorCode::invalid_representation, "one matrix per generator required");
    for (std::size_t i = 0; i < images_.size(); ++i) {
      if (images_[i].rows() != dim_ || images_[i].cols() != dim_)
        fail(ErrorCode::invalid_representation, "matrix for " + names_[i] + " has the wrong shape");
      if (unitarity_defect(images_[i]) > tol_)
        fail(ErrorCode::invalid_representation, "matrix for " + names_[i] + " is not unitary");
    }
  }

  static UnitaryRep trivial(std::vector<std::string> generators, int dim = 1) {
    std::vector<Matrix> m(generators.size(), Matrix::Identity(dim, dim));
    return UnitaryRep(dim, std::move(generators), std::move(m));
  }

  /// One-dimensional rep sending every generator to exp(2πiθ).
  static UnitaryRep character(std::vector<std::string> generators, double theta) {
    std::vector<Matrix> m(generators.size(), Matrix::Constant(1, 1, std::polar(1.0, 2.0 * M_PI * theta)));
    return UnitaryRep(1, std::move(generators), std::move(m));
  }

  int dim() const { return dim_; }
  double tol() const { return tol_; }
  const std::vector<std::string>& generator_names() const { return names_; }
  const Matrix& image(int g) const { return images_[g]; }
  const std::vector<Matrix>& images() const { return images_; }

  Matrix evaluate(const Word& w) const {
    Matrix out = Matrix::Identity(dim_, dim_);
    for (int l : w) out = out * (l > 0 ? images_[letter_generator(l)] : images_[letter_generator(l)].adjoint());
    return out;
  }

  Matrix evaluate(const GroupBackend& backend, const GroupElement& e) const { return evaluate(backend.word_of(e)); }

  /// Reorders the generator images to follow the presentation and checks every
  /// relator. Throws invalid-representation on missing names or violations.
  UnitaryRep bind(const Pi1Presentation& pres) const {
    std::vector<Matrix> m;
    for (const auto& name : pres.generator_names()) {
      auto it = std::find(names_.begin(), names_.end(), name);
      if (it == names_.end()) fail(ErrorCode::invalid_representation, "no matrix for generator " + name);
      m.push_back(images_[static_cast<std::size_t>(it - names_.begin())]);
    }
    UnitaryRep out(dim_, pres.generator_names(), std::move(m), tol_);
    for (const auto& r : pres.simplified_relators()) {
      double d = identity_defect(out.evaluate(r));
      if (d > tol_)
        fail(ErrorCode::invalid_representation,
             "relator " + format_word(r, pres.generator_names()) + " violated by " + std::to_string(d));
    }
    return out;
  }

 private:
  int dim_;
  std::vector<std::string> names_;
  std::vector<Matrix> images_;
  double tol_;
};

/// Per-vertex unitary gauge S(x).
struct GaugeField {
  std::vector<Matrix> at;

  static GaugeField identity(int vertices, int dim) { return {std::vector<Matrix>(vertices, Matrix::Identity(dim, dim))}; }
  static GaugeField random(int vertices, int dim, std::mt19937_64& rng) {
    GaugeField g;
    for (int v = 0; v < vertices; ++v) g.at.push_back(random_unitary(dim, rng));
    return g;
  }
};

/// Unitary d×d matrix on every edge in its stored direction; the reverse
/// direction carries the inverse. Connections built from representations are
/// flat; `unchecked` admits arbitrary unitaries for counterexamples.
class FlatConnection {
 public:
  static FlatConnection from_edges(const ConfigComplex& cx, std::vector<Matrix> edges, double tol = kDefaultTol) {
    FlatConnection c(cx, std::move(edges), tol);
    if (c.face_defect_ > tol)
      fail(ErrorCode::invalid_representation, "connection is not flat (face defect " + std::to_string(c.face_defect_) + ")");
    return c;
  }
  static FlatConnection unchecked(const ConfigComplex& cx, std::vector<Matrix> edges, double tol = kDefaultTol) {
    return FlatConnection(cx, std::move(edges), tol);
  }

  int dim() const { return dim_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  double tol() const { return tol_; }
  const Matrix& edge(int e) const { return edges_[e]; }
  const std::vector<Matrix>& edges() const { return edges_; }
  Matrix step(Step s) const { return s.forward ? edges_[s.edge] : edges_[s.edge].adjoint(); }

  bool flat() const { return face_defect_ <= tol_; }
  double face_defect() const { return face_defect_; }
  const std::vector<double>& face_defects() const { return face_defects_; }

 private:
  FlatConnection(const ConfigComplex& cx, std::vector<Matrix> edges, double tol) : edges_(std::move(edges)), tol_(tol) {
    if (static_cast<int>(edges_.size()) != cx.edge_count())
      fail(ErrorCode::invalid_parameter, "one matrix per edge required");
    dim_ = edges_.empty() ? 1 : static_cast<int>(edges_.front().rows());
    for (const auto& m : edges_) {
      if (m.rows() != dim_ || m.cols() != dim_) fail(ErrorCode::invalid_parameter, "edge matrices differ in dimension");
      if (unitarity_defect(m) > tol_) fail(ErrorCode::invalid_representation, "edge matrix is not unitary");
    }
    for (int f = 0; f < cx.face_count(); ++f) {
      Matrix h = Matrix::Identity(dim_, dim_);
      for (Step s : cx.face(f)) h = step(s) * h;
      face_defects_.push_back(identity_defect(h));
      face_defect_ = std::max(face_defect_, face_defects_.back());
    }
  }

  std::vector<Matrix> edges_;
  double tol_;
  int dim_ = 1;
  double face_defect_ = 0.0;
  std::vector<double> face_defects_;
};

/// Parallel transport along a walk: the ordered product with later steps on the left.
inline Matrix transport(const FlatConnection& conn, const PathWord& p) {
  Matrix out = Matrix::Identity(conn.dim(), conn.dim());
  for (Step s : p.steps()) out = conn.step(s) * out;
  return out;
}

/// Tree edges carry the identity, a chord carries R of its group element.
inline FlatConnection cocycle_from_rep(const Pi1Presentation& pres, const UnitaryRep& rep) {
  UnitaryRep bound = rep.bind(pres);
  const auto& cx = pres.complex();
  std::vector<Matrix> edges(cx.edge_count(), Matrix::Identity(bound.dim(), bound.dim()));
  for (int c = 0; c < pres.chord_count(); ++c) edges[pres.tree().chords[c]] = bound.evaluate(pres.chord_image(c));
  return FlatConnection::from_edges(cx, std::move(edges), std::max(rep.tol(), 1e-10));
}

/// Edge x→y becomes S(y)·U(e)·S(x)^-1.
inline FlatConnection gauge_transform(const ConfigComplex& cx, const FlatConnection& conn, const GaugeField& s) {
  if (static_cast<int>(s.at.size()) != cx.vertex_count()) fail(ErrorCode::invalid_parameter, "one gauge matrix per vertex required");
  std::vector<Matrix> edges;
  for (int e = 0; e < cx.edge_count(); ++e) {
    const auto& g_head = s.at[cx.edge(e).head];
    const auto& g_tail = s.at[cx.edge(e).tail];
    if (g_head.rows() != conn.dim() || g_tail.rows() != conn.dim())
      fail(ErrorCode::invalid_parameter, "gauge dimension does not match the connection");
    edges.push_back(g_head * conn.edge(e) * g_tail.adjoint());
  }
  return conn.flat() ? FlatConnection::from_edges(cx, std::move(edges), conn.tol())
                     : FlatConnection::unchecked(cx, std::move(edges), conn.tol());
}

/// The gauge S(x) = transport(δ(x))^-1, which sets every tree edge to the identity.
inline GaugeField tree_gauge(const Pi1Presentation& pres, const FlatConnection& conn) {
  GaugeField g;
  for (int v = 0; v < pres.complex().vertex_count(); ++v) g.at.push_back(transport(conn, pres.delta(v)).adjoint());
  return g;
}

inline FlatConnection tree_gauge_fixed(const Pi1Presentation& pres, const FlatConnection& conn) {
  return gauge_transform(pres.complex(), conn, tree_gauge(pres, conn));
}

// ---------------------------------------------------------------------------
// Random walks used by the verification routines.

inline PathWord random_walk(const ConfigComplex& cx, int start, int length, std::mt19937_64& rng) {
  std::vector<Step> steps;
  int v = start;
  for (int i = 0; i < length; ++i) {
    const auto& out = cx.outgoing(v);
    if (out.empty()) break;
    Step s = out[std::uniform_int_distribution<std::size_t>(0, out.size() - 1)(rng)];
    steps.push_back(s);
    v = cx.head(s);
  }
  return PathWord(cx, start, std::move(steps));
}

struct CocycleReport {
  int trials = 0;
  double max_composition_deviation = 0.0;
  double max_face_defect = 0.0;
  std::vector<std::string> failing_faces;
  bool passed = true;
};

/// Samples composable walk pairs h: x→hx, g: hx→ghx and compares
/// transport(g)·transport(h) with transport along the concatenation; also
/// reports every face whose holonomy is not the identity.
inline CocycleReport verify_cocycle(const ConfigComplex& cx, const FlatConnection& conn, int trials,
                                    std::uint64_t seed = 1, double tol = 1e-12, int max_length = 16) {
  CocycleReport rep;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> vert(0, cx.vertex_count() - 1);
  std::uniform_int_distribution<int> len(0, max_length);
  for (int t = 0; t < trials; ++t) {
    int start = vert(rng);
    int lh = len(rng);
    int lg = len(rng);
    PathWord h = random_walk(cx, start, lh, rng);
    PathWord g = random_walk(cx, h.end(), lg, rng);
    double dev = (transport(conn, g) * transport(conn, h) - transport(conn, then(h, g))).norm();
    rep.max_composition_deviation = std::max(rep.max_composition_deviation, dev);
    ++rep.trials;
  }
  for (int f = 0; f < cx.face_count(); ++f) {
    double d = conn.face_defects()[f];
    rep.max_face_defect = std::max(rep.max_face_defect, d);
    if (d > conn.tol()) rep.failing_faces.push_back(cx.face_label(f));
  }
  rep.passed = rep.max_composition_deviation <= tol && rep.failing_faces.empty();
  return rep;
}

struct HomotopyReport {
  int pairs = 0;
  int backend_checked = 0;   // pairs whose group elements were compared in the backend
  int backend_mismatches = 0;
  double max_deviation = 0.0;
  bool passed = true;
};

/// Builds loop pairs that represent the same group element and compares their
/// holonomies. Even pairs differ by an inserted face boundary (conjugated to
/// the base) and a backtrack; odd pairs, when a backend exists, are a random
/// generator word and the word of its normal form.
inline HomotopyReport verify_homotopy_invariance(const Pi1Presentation& pres, const FlatConnection& conn, int pairs,
                                                 std::uint64_t seed = 2, double tol = kDefaultTol) {
  const auto& cx = pres.complex();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> len(0, 12);
  HomotopyReport rep;
  for (int t = 0; t < pairs; ++t) {
    if (t % 2 == 1 && pres.has_backend() && pres.generator_count() > 0) {
      const auto& b = pres.backend();
      Word w;
      int length = len(rng);
      for (int i = 0; i < length; ++i) {
        int g = static_cast<int>(rng() % static_cast<std::uint64_t>(pres.generator_count()));
        bool inv = rng() % 2 == 1;
        w.push_back(letter_of(g, inv));
      }
      Word nf = b.word_of(b.reduce(w));
      PathWord l1 = pres.loop_of_word(w), l2 = pres.loop_of_word(nf);
      ++rep.backend_checked;
      if (pres.beta(l1) != pres.beta(l2)) ++rep.backend_mismatches;
      rep.max_deviation = std::max(rep.max_deviation, (transport(conn, l1) - transport(conn, l2)).norm());
      ++rep.pairs;
      continue;
    }
    int length = len(rng);
    PathWord there = random_walk(cx, pres.base(), length, rng);
    PathWord loop = then(there, pres.delta(there.end()).reversed());
    // Insert a detour at the far end: out along the tree to a face, around it, and back.
    PathWord detour(there.end());
    if (cx.face_count() > 0) {
      int f = std::uniform_int_distribution<int>(0, cx.face_count() - 1)(rng);
      PathWord fw = face_walk(cx, f);
      if (rng() % 2) fw = fw.reversed();
      PathWord to_face = then(pres.delta(there.end()).reversed(), pres.delta(fw.start()));
      detour = then(then(to_face, fw), to_face.reversed());
    }
    int spur_length = 1 + static_cast<int>(rng() % 3);
    PathWord spur = random_walk(cx, there.end(), spur_length, rng);
    detour = then(then(detour, spur), spur.reversed());
    PathWord other = then(then(there, detour), pres.delta(there.end()).reversed());
    if (pres.has_backend()) {
      ++rep.backend_checked;
      if (pres.beta(loop) != pres.beta(other)) ++rep.backend_mismatches;
    }
    double d = (transport(conn, loop) - transport(conn, other)).norm();
    rep.max_deviation = std::max(rep.max_deviation, d);
    ++rep.pairs;
  }
  rep.passed = rep.max_deviation <= tol && rep.backend_mismatches == 0;
  return rep;
}

struct LsReport {
  bool locally_trivial = false;
  GaugeField gauge;                      // identity outside the region
  double max_defect = 0.0;
  std::optional<PathWord> offending_loop;
};

namespace detail {

/// BFS tree of a region, rooted at `root`; path[v] runs root→v inside the region.
inline std::vector<std::optional<PathWord>> region_tree_paths(const ConfigComplex& cx, const Region& region, int root) {
  std::vector<std::optional<PathWord>> path(static_cast<std::size_t>(cx.vertex_count()));
  std::vector<bool> in_edge(static_cast<std::size_t>(cx.edge_count()), false);
  for (int e : region.edges) in_edge[e] = true;
  path[root] = PathWord(root);
  std::queue<int> q;
  q.push(root);
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    for (Step s : cx.outgoing(v)) {
      int w = cx.head(s);
      if (!in_edge[s.edge] || path[w]) continue;
      path[w] = then(*path[v], PathWord(cx, v, {s}));
      q.push(w);
    }
  }
  return path;
}

}  // namespace detail

/// Local triviality on a small region: builds W_O(x) = transport along the
/// region tree and checks that S(x) = W_O(x)^-1 turns every region edge into
/// the identity.
inline LsReport ls_check(const ConfigComplex& cx, const FlatConnection& conn, const Region& region) {
  if (!region.small) fail(ErrorCode::invalid_region, "region is not small (nontrivial induced fundamental group)");
  const int root = region.vertices.front();
  auto paths = detail::region_tree_paths(cx, region, root);
  LsReport rep;
  rep.gauge = GaugeField::identity(cx.vertex_count(), conn.dim());
  for (int v : region.vertices) rep.gauge.at[v] = transport(conn, *paths[v]).adjoint();
  int worst = -1;
  for (int e : region.edges) {
    const auto& ed = cx.edge(e);
    double d = identity_defect(rep.gauge.at[ed.head] * conn.edge(e) * rep.gauge.at[ed.tail].adjoint());
    if (d > rep.max_defect) {
      rep.max_defect = d;
      worst = e;
    }
  }
  rep.locally_trivial = rep.max_defect <= conn.tol();
  if (!rep.locally_trivial && worst >= 0) {
    const auto& ed = cx.edge(worst);
    rep.offending_loop = then(then(*paths[ed.tail], PathWord(cx, ed.tail, {Step{worst, true}})), paths[ed.head]->reversed());
  }
  return rep;
}

/// Holonomy of a loop against its assembly from per-edge local moves.
struct TopologicalOperator {
  int base = 0;
  Matrix holonomy;                  // W(x,x,[γ])
  std::vector<int> region_vertices;
  Matrix local_product;             // ⊕_y (C^-1 Π)|_y in the region gauge
  double factorization_defect = 0.0;
};

namespace detail {

/// Applies the local move along step s: amplitudes at the tail and head fibres
/// are exchanged, carried by U(s) forward and U(s)^-1 backward.
inline void apply_local_move(const ConfigComplex& cx, const FlatConnection& conn, Step s, Matrix& state) {
  const int d = conn.dim();
  const int a = cx.tail(s), b = cx.head(s);
  Matrix u = conn.step(s);
  if (a == b) {
    state.middleRows(a * d, d) = u * state.middleRows(a * d, d);
    return;
  }
  Matrix at_a = state.middleRows(a * d, d);
  Matrix at_b = state.middleRows(b * d, d);
  state.middleRows(b * d, d) = u * at_a;
  state.middleRows(a * d, d) = u.adjoint() * at_b;
}

inline void apply_classical_move(const ConfigComplex& cx, Step s, std::vector<int>& where) {
  const int a = cx.tail(s), b = cx.head(s);
  for (int& v : where) {
    if (v == a) {
      v = b;
    } else if (v == b) {
      v = a;
    }
  }
}

}  // namespace detail

/// For every vertex y of the region the loop is conjugated to y through the
/// region tree, the ordered product Π of local moves is applied to the fibre
/// at y, and the classical displacement C is undone. In the region gauge each
/// fibre block must equal the holonomy W(x,x,[γ]).
inline TopologicalOperator topological_operator(const ConfigComplex& cx, const FlatConnection& conn, const PathWord& loop,
                                                const Region& region) {
  if (!loop.closed()) fail(ErrorCode::invalid_parameter, "topological operator needs a closed loop");
  if (!region.contains(loop.start())) fail(ErrorCode::invalid_parameter, "loop is not based in the region");
  const int d = conn.dim();
  const int x = loop.start();
  auto paths = detail::region_tree_paths(cx, region, x);
  TopologicalOperator op;
  op.base = x;
  op.holonomy = transport(conn, loop);
  op.region_vertices = region.vertices;
  const int m = static_cast<int>(region.vertices.size());
  op.local_product = Matrix::Zero(m * d, m * d);
  const Eigen::Index n = static_cast<Eigen::Index>(cx.vertex_count()) * d;
  for (int i = 0; i < m; ++i) {
    int y = region.vertices[i];
    if (!paths[y]) fail(ErrorCode::invalid_region, "region is not connected");
    PathWord conj = then(then(paths[y]->reversed(), loop), *paths[y]);
    Matrix state = Matrix::Zero(n, d);
    state.middleRows(y * d, d) = Matrix::Identity(d, d);
    std::vector<int> where(static_cast<std::size_t>(cx.vertex_count()));
    for (int v = 0; v < cx.vertex_count(); ++v) where[v] = v;
    for (Step s : conj.steps()) {
      detail::apply_local_move(cx, conn, s, state);
      detail::apply_classical_move(cx, s, where);
    }
    // C^-1: the amplitude that started at y sits at where[y]; pull it back.
    Matrix block = state.middleRows(where[y] * d, d);
    Matrix s_y = transport(conn, *paths[y]).adjoint();
    Matrix gauged = s_y * block * s_y.adjoint();
    op.local_product.block(i * d, i * d, d, d) = gauged;
    op.factorization_defect = std::max(op.factorization_defect, (gauged - op.holonomy).norm());
  }
  return op;
}

/// Holonomy traces of all reduced generator words up to `word_length`, in
/// shortlex order. Conjugation-invariant; equal for gauge-equivalent
/// connections. Necessary, not sufficient, for equivalence.
inline std::vector<cplx> equivalence_fingerprint(const Pi1Presentation& pres, const FlatConnection& conn,
                                                 int word_length = 6, std::size_t max_words = 4096) {
  const int k = pres.generator_count();
  std::vector<Matrix> gen;
  for (int g = 0; g < k; ++g) gen.push_back(transport(conn, pres.generator_loop(g)));
  std::vector<cplx> out;
  out.push_back(cplx(conn.dim(), 0.0));
  std::vector<std::pair<int, Matrix>> layer{{0, Matrix::Identity(conn.dim(), conn.dim())}};
  for (int len = 1; len <= word_length && out.size() < max_words; ++len) {
    std::vector<std::pair<int, Matrix>> next;
    for (const auto& [last, m] : layer)
      for (int g = 0; g < k; ++g)
        for (bool inv : {false, true}) {
          int l = letter_of(g, inv);
          if (last == -l) continue;
          Matrix mm = m * (inv ? gen[g].adjoint() : gen[g]);
          if (out.size() < max_words) out.push_back(mm.trace());
          next.emplace_back(l, std::move(mm));
        }
    layer = std::move(next);
  }
  return out;
}

inline double fingerprint_distance(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace sector_lab
