#pragma once

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sector_lab/characters.hpp"
#include "sector_lab/complex.hpp"
#include "sector_lab/error.hpp"
#include "sector_lab/groups.hpp"
#include "sector_lab/holonomy.hpp"
#include "sector_lab/linalg.hpp"
#include "sector_lab/pi1.hpp"
#include "sector_lab/sectors.hpp"

namespace sector_lab {

// ---------------------------------------------------------------------------
// Cayley balls

/// Elements of the word-metric ball of radius r around the identity, in BFS
/// order (so every smaller ball is a prefix). Generators are tried in letter
/// order g0, g0^-1, g1, g1^-1, ... by right multiplication.
struct CayleyBall {
  std::vector<GroupElement> elements;
  std::vector<int> distance;
  std::unordered_map<GroupElement, int, GroupElementHash> index;
  bool whole_group = false;

  int size() const { return static_cast<int>(elements.size()); }
  std::optional<int> find(const GroupElement& g) const {
    auto it = index.find(g);
    if (it == index.end()) return std::nullopt;
    return it->second;
  }
};

inline std::vector<GroupElement> generator_letters(const GroupBackend& b) {
  std::vector<GroupElement> out;
  for (int i = 0; i < b.rank(); ++i) {
    out.push_back(b.generator(i));
    out.push_back(b.inverse(b.generator(i)));
  }
  return out;
}

/// radius < 0 means the whole (finite) group.
inline CayleyBall cayley_ball(const GroupBackend& b, int radius) {
  if (radius < 0 && !b.is_finite()) fail(ErrorCode::invalid_parameter, "the full group needs a finite backend");
  CayleyBall ball;
  auto letters = generator_letters(b);
  auto add = [&](GroupElement g, int d) {
    ball.index.emplace(g, ball.size());
    ball.elements.push_back(std::move(g));
    ball.distance.push_back(d);
  };
  add(b.identity(), 0);
  for (std::size_t i = 0; i < ball.elements.size(); ++i) {
    if (radius >= 0 && ball.distance[i] >= radius) continue;
    for (const auto& s : letters) {
      GroupElement h = b.multiply(ball.elements[i], s);
      if (!ball.index.count(h)) add(std::move(h), ball.distance[i] + 1);
    }
  }
  ball.whole_group = b.is_finite() && static_cast<std::size_t>(ball.size()) == *b.order();
  return ball;
}

// ---------------------------------------------------------------------------
// Cover model

/// Truncated universal cover M × (ball in π₁). Cover vertex (x, β) has id
/// x * |ball| + index(β). A lift of edge e from (x, β) lands at (y, θ(e) β).
class CoverModel {
 public:
  CoverModel(const Pi1Presentation& pres, int radius) : cx_(pres.complex()), backend_(pres.backend()) {
    ball_ = cayley_ball(backend_, radius);
    full_ = ball_.whole_group;
    for (int e = 0; e < cx_.edge_count(); ++e)
      theta_.push_back(pres.beta(PathWord(cx_, cx_.edge(e).tail, {Step{e, true}})));
    const int m = ball_.size();
    fwd_.assign(static_cast<std::size_t>(cx_.edge_count()) * m, -1);
    bwd_.assign(static_cast<std::size_t>(cx_.edge_count()) * m, -1);
    for (int e = 0; e < cx_.edge_count(); ++e) {
      GroupElement inv = backend_.inverse(theta_[e]);
      for (int b = 0; b < m; ++b) {
        if (auto t = ball_.find(backend_.multiply(theta_[e], ball_.elements[b]))) fwd_[e * m + b] = *t;
        if (auto t = ball_.find(backend_.multiply(inv, ball_.elements[b]))) bwd_[e * m + b] = *t;
      }
    }
    boundary_.assign(static_cast<std::size_t>(vertex_count()), false);
    for (int x = 0; x < cx_.vertex_count(); ++x)
      for (int b = 0; b < m; ++b)
        for (Step s : cx_.outgoing(x))
          if (lift_target(s, b) < 0) boundary_[vertex_id(x, b)] = true;
    interior_count_ = static_cast<int>(std::count(boundary_.begin(), boundary_.end(), false));
    if (interior_count_ == 0) fail(ErrorCode::truncation_too_small, "truncated cover has no interior vertex");
  }

  const ConfigComplex& base() const { return cx_; }
  const GroupBackend& backend() const { return backend_; }
  const CayleyBall& ball() const { return ball_; }
  bool full() const { return full_; }
  int fibre_size() const { return ball_.size(); }
  int vertex_count() const { return cx_.vertex_count() * ball_.size(); }
  int vertex_id(int x, int b) const { return x * ball_.size() + b; }
  int base_vertex(int v) const { return v / ball_.size(); }
  int fibre_index(int v) const { return v % ball_.size(); }
  const GroupElement& theta(int e) const { return theta_[e]; }
  bool boundary(int v) const { return boundary_[v]; }
  int interior_count() const { return interior_count_; }

  /// Fibre index reached by lifting step s from fibre index b, or -1 outside the ball.
  int lift_target(Step s, int b) const {
    const int m = ball_.size();
    return s.forward ? fwd_[s.edge * m + b] : bwd_[s.edge * m + b];
  }

  int lifted_edge_count() const {
    return static_cast<int>(std::count_if(fwd_.begin(), fwd_.end(), [](int t) { return t >= 0; }));
  }

  int degree(int v) const {
    int d = 0;
    for (Step s : cx_.outgoing(base_vertex(v)))
      if (lift_target(s, fibre_index(v)) >= 0) ++d;
    return d;
  }

  std::string vertex_label(int v) const {
    return cx_.vertex_label(base_vertex(v)) + "|" + backend_.format(ball_.elements[fibre_index(v)]);
  }

 private:
  ConfigComplex cx_;
  GroupBackend backend_;
  CayleyBall ball_;
  bool full_ = false;
  std::vector<GroupElement> theta_;
  std::vector<int> fwd_, bwd_;
  std::vector<bool> boundary_;
  int interior_count_ = 0;
};

/// radius < 0 builds the full cover of a finite group.
inline CoverModel build_cover(const Pi1Presentation& pres, int radius) {
  if (radius < 0 && !pres.backend().is_finite())
    fail(ErrorCode::invalid_parameter, "a full cover needs a finite fundamental group");
  return CoverModel(pres, radius);
}

/// The cover as a complex, with every lift of a face that stays inside the truncation.
inline ConfigComplex cover_complex(const CoverModel& cv) {
  const auto& cx = cv.base();
  const int m = cv.fibre_size();
  std::vector<std::string> labels;
  std::vector<double> measure;
  for (int v = 0; v < cv.vertex_count(); ++v) {
    labels.push_back(cv.vertex_label(v));
    measure.push_back(cx.measure(cv.base_vertex(v)));
  }
  std::vector<Edge> edges;
  std::vector<int> edge_id(static_cast<std::size_t>(cx.edge_count()) * m, -1);
  for (int e = 0; e < cx.edge_count(); ++e)
    for (int b = 0; b < m; ++b) {
      int t = cv.lift_target(Step{e, true}, b);
      if (t < 0) continue;
      edge_id[e * m + b] = static_cast<int>(edges.size());
      const auto& ed = cx.edge(e);
      edges.push_back({cv.vertex_id(ed.tail, b), cv.vertex_id(ed.head, t), ed.weight,
                       ed.label + "|" + cv.backend().format(cv.ball().elements[b])});
    }
  std::vector<std::vector<Step>> faces;
  std::vector<std::string> face_labels;
  for (int f = 0; f < cx.face_count(); ++f)
    for (int b0 = 0; b0 < m; ++b0) {
      std::vector<Step> w;
      int b = b0;
      bool inside = true;
      for (Step s : cx.face(f)) {
        int t = cv.lift_target(s, b);
        if (t < 0) {
          inside = false;
          break;
        }
        int id = s.forward ? edge_id[s.edge * m + b] : edge_id[s.edge * m + t];
        w.push_back({id, s.forward});
        b = t;
      }
      if (!inside || b != b0) continue;
      faces.push_back(std::move(w));
      face_labels.push_back(cx.face_label(f) + "|" + cv.backend().format(cv.ball().elements[b0]));
    }
  return ConfigComplex(std::move(labels), std::move(measure), std::move(edges), std::move(faces), std::move(face_labels));
}

/// Position function lifted to the cover: constant along each fibre.
inline std::vector<double> lift_function(const CoverModel& cv, const std::vector<double>& f) {
  if (static_cast<int>(f.size()) != cv.base().vertex_count()) fail(ErrorCode::invalid_parameter, "one value per base vertex required");
  std::vector<double> out(static_cast<std::size_t>(cv.vertex_count()));
  for (int v = 0; v < cv.vertex_count(); ++v) out[v] = f[cv.base_vertex(v)];
  return out;
}

/// Partial permutation of cover vertices; -1 where the image leaves the truncation.
struct CoverPermutation {
  std::vector<int> image;
  std::vector<double> weight;  // Jacobian factor, 1 unless the measure varies

  int operator()(int v) const { return v < 0 ? -1 : image[v]; }
};

/// Lift of the local move along base edge e: the amplitudes over tail and
/// head are exchanged, (x, β) ↔ (y, θ(e) β); vertices off the edge stay.
inline CoverPermutation lift_edge_move(const CoverModel& cv, int e) {
  const auto& cx = cv.base();
  if (e < 0 || e >= cx.edge_count()) fail(ErrorCode::invalid_parameter, "unknown edge");
  const auto& ed = cx.edge(e);
  CoverPermutation p;
  p.image.resize(static_cast<std::size_t>(cv.vertex_count()));
  p.weight.assign(static_cast<std::size_t>(cv.vertex_count()), 1.0);
  for (int v = 0; v < cv.vertex_count(); ++v) {
    int x = cv.base_vertex(v), b = cv.fibre_index(v);
    if (x == ed.tail && x == ed.head) {
      int t = cv.lift_target(Step{e, true}, b);
      p.image[v] = t < 0 ? -1 : cv.vertex_id(x, t);
    } else if (x == ed.tail) {
      int t = cv.lift_target(Step{e, true}, b);
      p.image[v] = t < 0 ? -1 : cv.vertex_id(ed.head, t);
      p.weight[v] = std::sqrt(cx.measure(ed.tail) / cx.measure(ed.head));
    } else if (x == ed.head) {
      int t = cv.lift_target(Step{e, false}, b);
      p.image[v] = t < 0 ? -1 : cv.vertex_id(ed.tail, t);
      p.weight[v] = std::sqrt(cx.measure(ed.head) / cx.measure(ed.tail));
    } else {
      p.image[v] = v;
    }
  }
  return p;
}

enum class Side { left, right };

/// l(η): (x, β) ↦ (x, η β) and r(η): (x, β) ↦ (x, β η^-1).
inline CoverPermutation regular_action(const CoverModel& cv, Side side, const GroupElement& eta) {
  const auto& b = cv.backend();
  const int m = cv.fibre_size();
  GroupElement eta_inv = b.inverse(eta);
  std::vector<int> fibre(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    const auto& beta = cv.ball().elements[i];
    auto t = cv.ball().find(side == Side::left ? b.multiply(eta, beta) : b.multiply(beta, eta_inv));
    fibre[i] = t ? *t : -1;
  }
  CoverPermutation p;
  p.weight.assign(static_cast<std::size_t>(cv.vertex_count()), 1.0);
  for (int v = 0; v < cv.vertex_count(); ++v) {
    int t = fibre[cv.fibre_index(v)];
    p.image.push_back(t < 0 ? -1 : cv.vertex_id(cv.base_vertex(v), t));
  }
  return p;
}

struct CommutationReport {
  long checks = 0;
  long skipped = 0;        // compositions leaving the truncation
  long violations = 0;
  long left_right_checks = 0;
  long left_right_violations = 0;
  bool passed = true;
};

/// Lifted edge moves against right actions, and left against right actions,
/// compared as permutations on every vertex where both compositions stay in
/// the truncation. On a full cover every element is tried; on a ball the
/// generators plus `trials` random ball elements.
inline CommutationReport verify_gauge_commutes(const CoverModel& cv, int trials = 50, std::uint64_t seed = 3) {
  const auto& b = cv.backend();
  std::vector<GroupElement> etas;
  if (cv.full()) {
    etas = cv.ball().elements;
  } else {
    etas = generator_letters(b);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(0, cv.fibre_size() - 1);
    for (int t = 0; t < trials; ++t) etas.push_back(cv.ball().elements[pick(rng)]);
  }
  CommutationReport rep;
  auto compare = [&](const CoverPermutation& p, const CoverPermutation& q, long& checks, long& violations) {
    for (int v = 0; v < cv.vertex_count(); ++v) {
      if (!cv.full() && cv.boundary(v)) {
        ++rep.skipped;
        continue;
      }
      int a = p(q(v)), c = q(p(v));
      if (a < 0 || c < 0) {
        ++rep.skipped;
        continue;
      }
      ++checks;
      if (a != c) ++violations;
    }
  };
  std::vector<CoverPermutation> moves;
  for (int e = 0; e < cv.base().edge_count(); ++e) moves.push_back(lift_edge_move(cv, e));
  for (const auto& eta : etas) {
    CoverPermutation r = regular_action(cv, Side::right, eta);
    for (const auto& mv : moves) compare(mv, r, rep.checks, rep.violations);
    for (const auto& zeta : etas) {
      CoverPermutation l = regular_action(cv, Side::left, zeta);
      compare(l, r, rep.left_right_checks, rep.left_right_violations);
    }
  }
  rep.passed = rep.violations == 0 && rep.left_right_violations == 0 && rep.checks > 0;
  return rep;
}

/// Laplacian of the cover with the trivial connection and Dirichlet
/// truncation: the diagonal keeps the full base conductance.
inline HermitianOperator cover_laplacian(const CoverModel& cv) {
  const auto& cx = cv.base();
  std::vector<Eigen::Triplet<cplx>> trip;
  for (int v = 0; v < cv.vertex_count(); ++v) {
    int x = cv.base_vertex(v), b = cv.fibre_index(v);
    double deg = 0.0;
    for (Step s : cx.outgoing(x)) {
      double w = cx.edge(s.edge).weight;
      deg += w;
      int t = cv.lift_target(s, b);
      if (t >= 0) trip.emplace_back(v, cv.vertex_id(cx.head(s), t), -w);
    }
    trip.emplace_back(v, v, deg);
  }
  SparseMatrix m(cv.vertex_count(), cv.vertex_count());
  m.setFromTriplets(trip.begin(), trip.end());
  return HermitianOperator(std::move(m));
}

/// e_i = (d_i/|G|) Σ_g conj(χ_i(g)) R_r(g) on l²(G).
inline std::vector<Matrix> central_projectors(const FiniteGroup& g, const CharacterTable& t) {
  std::vector<Matrix> out;
  const int n = g.order();
  for (int i = 0; i < t.irrep_count(); ++i) {
    Matrix p = Matrix::Zero(n, n);
    for (int x = 0; x < n; ++x) p += std::conj(t.values[i][x]) * right_regular(g, x);
    out.push_back(p * (static_cast<double>(t.degrees[i]) / n));
  }
  return out;
}

struct SectorBlock {
  int irrep = 0;
  int degree = 1;
  std::string statistics;
  std::vector<double> block_spectrum;    // cover Laplacian restricted to the range of e_i
  std::vector<double> sector_spectrum;   // twisted base Laplacian for irrep i
  double deviation = 0.0;                // block vs d_i copies of the sector spectrum
};

struct DecompositionReport {
  std::vector<SectorBlock> blocks;
  std::vector<double> cover_spectrum;
  double union_deviation = 0.0;          // cover spectrum vs ⊎ d_i · sector spectrum
  double projector_defect = 0.0;         // idempotence, orthogonality, completeness
  bool passed = true;
};

/// Block-diagonalizes the full-cover Laplacian with the central projectors
/// of the right action and compares every block with the twisted base
/// Laplacian of the matching irrep.
inline DecompositionReport decompose_cover_spectrum(const Pi1Presentation& pres, const CoverModel& cv, double tol = 1e-8,
                                                    bool strict = true) {
  if (!cv.full()) fail(ErrorCode::invalid_parameter, "decomposition needs the full cover of a finite group");
  const FiniteGroup& g = cv.backend().finite_group();
  CharacterTable table = character_table(g);
  auto projectors = central_projectors(g, table);
  const int n = g.order();
  const int nv = cv.base().vertex_count();
  DecompositionReport rep;

  Matrix sum = Matrix::Zero(n, n);
  for (std::size_t i = 0; i < projectors.size(); ++i) {
    const auto& p = projectors[i];
    sum += p;
    rep.projector_defect = std::max(rep.projector_defect, (p * p - p).norm());
    rep.projector_defect = std::max(rep.projector_defect, (p - p.adjoint()).norm());
    for (std::size_t j = 0; j < i; ++j) rep.projector_defect = std::max(rep.projector_defect, (p * projectors[j]).norm());
  }
  rep.projector_defect = std::max(rep.projector_defect, identity_defect(sum));

  Matrix h = cover_laplacian(cv).dense();
  rep.cover_spectrum = spectrum(HermitianOperator::from_dense(h)).values;
  std::vector<double> all;
  for (int i = 0; i < table.irrep_count(); ++i) {
    SectorBlock blk;
    blk.irrep = i;
    blk.degree = table.degrees[i];
    blk.statistics = statistics_label(table, i);
    Eigen::SelfAdjointEigenSolver<Matrix> ep(projectors[i]);
    std::vector<int> cols;
    for (int c = 0; c < n; ++c)
      if (ep.eigenvalues()(c) > 0.5) cols.push_back(c);
    Matrix q = Matrix::Zero(static_cast<Eigen::Index>(nv) * n, static_cast<Eigen::Index>(nv) * static_cast<Eigen::Index>(cols.size()));
    for (int x = 0; x < nv; ++x)
      for (std::size_t c = 0; c < cols.size(); ++c)
        for (int b = 0; b < n; ++b)
          q(static_cast<Eigen::Index>(x) * n + b, static_cast<Eigen::Index>(x * cols.size() + c)) =
              ep.eigenvectors()(cv.backend().index_of(cv.ball().elements[b]), cols[c]);
    Matrix block = q.adjoint() * h * q;
    blk.block_spectrum = spectrum(HermitianOperator::from_dense(0.5 * (block + block.adjoint()), 1e-10)).values;
    UnitaryRep irrep = irreducible_representation(g, table, i);
    blk.sector_spectrum = spectrum(twisted_laplacian(pres.complex(), cocycle_from_rep(pres, irrep))).values;
    auto expected = repeat_values(blk.sector_spectrum, blk.degree);
    blk.deviation = spectrum_distance(blk.block_spectrum, expected);
    all.insert(all.end(), expected.begin(), expected.end());
    rep.blocks.push_back(std::move(blk));
  }
  std::sort(all.begin(), all.end());
  rep.union_deviation = spectrum_distance(rep.cover_spectrum, all);
  rep.passed = rep.union_deviation <= tol && rep.projector_defect <= 1e-10;
  for (const auto& b : rep.blocks) rep.passed = rep.passed && b.deviation <= tol;
  if (strict && !rep.passed)
    fail(ErrorCode::decomposition_failure, "cover spectrum does not decompose (deviation " + std::to_string(rep.union_deviation) + ")");
  return rep;
}

struct ConjugacyEntry {
  int irrep = 0;
  std::vector<cplx> left;    // (P e1, R_l(g) P e1) per element
  std::vector<cplx> right;   // (P e1, R_r(g) P e1) per element
  double max_defect = 0.0;   // |left − conj(right)|
};

struct ConjugacyReport {
  std::vector<ConjugacyEntry> entries;
  double max_defect = 0.0;
  bool passed = true;
};

/// Matrix elements of the left and right regular representations on the
/// cyclic vector P e1 for every central projector P.
inline ConjugacyReport conjugacy_check(const FiniteGroup& g, double tol = 1e-10) {
  CharacterTable t = character_table(g);
  auto projectors = central_projectors(g, t);
  const int n = g.order();
  ConjugacyReport rep;
  for (int i = 0; i < t.irrep_count(); ++i) {
    Vector v = projectors[i].col(0);
    ConjugacyEntry e;
    e.irrep = i;
    for (int x = 0; x < n; ++x) {
      cplx l = v.dot(left_regular(g, x) * v);
      cplx r = v.dot(right_regular(g, x) * v);
      e.left.push_back(l);
      e.right.push_back(r);
      e.max_defect = std::max(e.max_defect, std::abs(l - std::conj(r)));
    }
    rep.max_defect = std::max(rep.max_defect, e.max_defect);
    rep.entries.push_back(std::move(e));
  }
  rep.passed = rep.max_defect <= tol;
  return rep;
}

// ---------------------------------------------------------------------------
// Amenability

/// Cayley-graph adjacency of a ball in BFS order: neighbour of element i by
/// letter column c is nb[i * letters + c], or -1 outside the ball.
struct BallGraph {
  int letters = 0;
  std::vector<int> nb;
  std::vector<long> prefix;  // prefix[r] = number of elements at distance ≤ r
};

inline BallGraph ball_graph(const GroupBackend& b, int radius) {
  BallGraph g;
  g.letters = 2 * b.rank();
  const int k = g.letters;
  if (b.kind() == BackendKind::free) {
    // Reduced words: the neighbour by the inverse of the last letter is the
    // parent, all others are children.
    std::vector<int> last{0};
    std::vector<int> dist{0};
    g.nb.assign(static_cast<std::size_t>(k), -1);
    for (std::size_t i = 0; i < last.size(); ++i) {
      if (dist[i] >= radius) continue;
      for (int c = 0; c < k; ++c) {
        int l = c % 2 == 0 ? c / 2 + 1 : -(c / 2 + 1);
        if (l == -last[i]) continue;
        int child = static_cast<int>(last.size());
        last.push_back(l);
        dist.push_back(dist[i] + 1);
        g.nb.resize(g.nb.size() + static_cast<std::size_t>(k), -1);
        g.nb[i * k + c] = child;
        int back = l > 0 ? 2 * (l - 1) + 1 : 2 * (-l - 1);
        g.nb[static_cast<std::size_t>(child) * k + back] = static_cast<int>(i);
      }
    }
    g.prefix.assign(static_cast<std::size_t>(radius) + 1, 0);
    for (int d : dist) ++g.prefix[d];
  } else {
    CayleyBall ball = cayley_ball(b, radius);
    auto letters = generator_letters(b);
    g.nb.assign(static_cast<std::size_t>(ball.size()) * k, -1);
    for (int i = 0; i < ball.size(); ++i)
      for (int c = 0; c < k; ++c)
        if (auto t = ball.find(b.multiply(ball.elements[i], letters[c]))) g.nb[static_cast<std::size_t>(i) * k + c] = *t;
    g.prefix.assign(static_cast<std::size_t>(radius) + 1, 0);
    for (int d : ball.distance) ++g.prefix[d];
  }
  for (std::size_t r = 1; r < g.prefix.size(); ++r) g.prefix[r] += g.prefix[r - 1];
  return g;
}

/// Largest eigenvalue of the simple random walk restricted to the first n
/// ball elements (Dirichlet outside).
inline double restricted_walk_radius(const BallGraph& g, long n, std::uint64_t seed = 5) {
  const int k = g.letters;
  if (k == 0) return 1.0;
  auto apply = [&](const Eigen::VectorXd& in, Eigen::VectorXd& out) {
    out.setZero(in.size());
    for (long i = 0; i < n; ++i) {
      double s = 0.0;
      const int* row = &g.nb[static_cast<std::size_t>(i) * k];
      for (int c = 0; c < k; ++c)
        if (row[c] >= 0 && row[c] < n) s += in(row[c]);
      out(i) = s / k;
    }
  };
  if (n <= kDenseCutoff) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (long i = 0; i < n; ++i)
      for (int c = 0; c < k; ++c) {
        int j = g.nb[static_cast<std::size_t>(i) * k + c];
        if (j >= 0 && j < n) a(i, j) += 1.0 / k;
      }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(n - 1);
  }
  EigsOptions opts;
  opts.seed = seed;
  auto r = extreme_eigenvalues<double>(n, apply, 1, Which::largest, opts);
  if (!r.converged) fail(ErrorCode::convergence_failure, "walk operator iteration did not converge");
  return r.values.front();
}

struct AmenabilityReport {
  std::string backend;
  std::string verdict;              // "amenable" or "non-amenable"
  std::string reason;
  std::vector<int> radii;
  std::vector<long> ball_sizes;
  std::vector<double> estimates;    // restricted walk radius per ball radius
  bool monotone = true;
  double extrapolated = 0.0;        // a in the fit λ(r) ≈ a − b/(r+1)²
  std::optional<double> known_value;  // exact spectral radius of the class, when known
  bool trivial_sector_excluded = false;
};

inline int default_kesten_radius(const GroupBackend& b) {
  if (b.kind() == BackendKind::free && b.rank() >= 2) return 12;
  return 20;
}

/// Verdict by group class, with Kesten evidence from truncated Cayley balls.
/// Finite groups are treated on the whole group, where the walk radius is 1.
inline AmenabilityReport amenability_report(const GroupBackend& b, std::optional<int> max_radius = std::nullopt) {
  AmenabilityReport rep;
  rep.backend = b.tag();
  const int k = b.rank();
  switch (b.kind()) {
    case BackendKind::finite:
    case BackendKind::cyclic:
      rep.verdict = "amenable";
      rep.reason = "finite group";
      break;
    case BackendKind::free_abelian:
      rep.verdict = "amenable";
      rep.reason = "free abelian group";
      break;
    case BackendKind::free:
      rep.verdict = k >= 2 ? "non-amenable" : "amenable";
      rep.reason = k >= 2 ? "free group of rank " + std::to_string(k) : (k == 1 ? "infinite cyclic group" : "trivial group");
      break;
  }
  if (b.is_finite() || k == 0) {
    // The constant vector is an exact eigenvector: every neighbour lies in the group.
    rep.radii.push_back(-1);
    rep.ball_sizes.push_back(static_cast<long>(b.order().value_or(1)));
    rep.estimates.push_back(1.0);
    rep.extrapolated = 1.0;
    rep.known_value = 1.0;
    return rep;
  }
  const int rmax = max_radius.value_or(default_kesten_radius(b));
  if (rmax < 1) fail(ErrorCode::invalid_parameter, "radius must be >= 1");
  BallGraph g = ball_graph(b, rmax);
  for (int r = 1; r <= rmax; ++r) {
    rep.radii.push_back(r);
    rep.ball_sizes.push_back(g.prefix[r]);
    rep.estimates.push_back(restricted_walk_radius(g, g.prefix[r]));
  }
  for (std::size_t i = 1; i < rep.estimates.size(); ++i)
    if (rep.estimates[i] < rep.estimates[i - 1] - 1e-10) rep.monotone = false;
  if (rep.estimates.size() >= 2) {
    std::size_t n = rep.estimates.size();
    double r1 = rep.radii[n - 2] + 1.0, r2 = rep.radii[n - 1] + 1.0;
    double l1 = rep.estimates[n - 2], l2 = rep.estimates[n - 1];
    double bcoef = (l2 - l1) / (1.0 / (r1 * r1) - 1.0 / (r2 * r2));
    rep.extrapolated = l2 + bcoef / (r2 * r2);
  } else {
    rep.extrapolated = rep.estimates.back();
  }
  if (b.kind() == BackendKind::free) {
    rep.known_value = k == 1 ? 1.0 : std::sqrt(2.0 * k - 1.0) / k;
  } else {
    rep.known_value = 1.0;
  }
  rep.trivial_sector_excluded = rep.verdict == "non-amenable" && rmax >= 10 && rep.estimates.back() <= 0.9;
  return rep;
}

// ---------------------------------------------------------------------------
// Representations on non-L² function spaces

enum class FormKind { vector, trace };

struct NonL2Report {
  FormKind form = FormKind::vector;
  int support_size = 0;
  Matrix gram;
  std::vector<double> gram_eigenvalues;
  int quotient_dim = 0;
  int multiplicity = 1;                       // quotient_dim / d
  std::vector<Matrix> left;                   // quotient left action per generator
  std::vector<Matrix> right;                  // quotient right action per generator
  double left_unitarity_defect = 0.0;
  double right_unitarity_defect = 0.0;
  double left_relator_defect = 0.0;
  double right_relator_defect = 0.0;
  double left_right_commutator = 0.0;
  double left_trace_defect = 0.0;             // tr l(w) vs m · tr R(w)
  double right_trace_defect = 0.0;            // tr r(w) vs m · conj tr R(w)
  double connection_fingerprint_defect = 0.0; // lifted edge moves vs the cocycle of R
  bool all_ones = false;
};

/// Gram matrix (R(g)v, R(h)v) or Tr(R(g)^-1 R(h)) on a finite support, its
/// positive quotient, and the left (e_g ↦ e_{ηg}) and right (e_g ↦ e_{gη^-1})
/// actions written in an orthonormal basis of the quotient.
inline NonL2Report non_l2_representation(const Pi1Presentation& pres, const UnitaryRep& rep_in, const Vector& v,
                                         const std::vector<GroupElement>& support, FormKind form,
                                         int fingerprint_length = 4) {
  const auto& b = pres.backend();
  UnitaryRep rep = rep_in.bind(pres);
  const int d = rep.dim();
  if (form == FormKind::vector && v.size() != d) fail(ErrorCode::invalid_parameter, "cyclic vector has the wrong dimension");
  if (support.empty()) fail(ErrorCode::invalid_parameter, "empty support");
  const int n = static_cast<int>(support.size());
  NonL2Report out;
  out.form = form;
  out.support_size = n;

  std::unordered_map<GroupElement, Matrix, GroupElementHash> cache;
  auto image = [&](const GroupElement& g) -> const Matrix& {
    auto it = cache.find(g);
    if (it == cache.end()) it = cache.emplace(g, rep.evaluate(b, g)).first;
    return it->second;
  };
  auto pairing = [&](const GroupElement& g, const GroupElement& h) -> cplx {
    if (form == FormKind::vector) return (image(g) * v).dot(image(h) * v);
    return (image(g).adjoint() * image(h)).trace();
  };

  out.gram = Matrix(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out.gram(i, j) = pairing(support[i], support[j]);
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (out.gram + out.gram.adjoint()));
  double top = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  for (int i = 0; i < n; ++i) out.gram_eigenvalues.push_back(es.eigenvalues()(i));
  if (es.eigenvalues()(0) < -1e-10 * top) fail(ErrorCode::numerical_failure, "Gram matrix is indefinite");
  std::vector<int> keep;
  for (int i = 0; i < n; ++i)
    if (es.eigenvalues()(i) > 1e-9 * top) keep.push_back(i);
  const int q = static_cast<int>(keep.size());
  out.quotient_dim = q;
  out.multiplicity = q % d == 0 ? q / d : 0;
  Matrix c(n, q);
  for (int j = 0; j < q; ++j) c.col(j) = es.eigenvectors().col(keep[j]) / std::sqrt(es.eigenvalues()(keep[j]));
  out.all_ones = (out.gram - Matrix::Ones(n, n)).norm() == 0.0;

  auto quotient = [&](auto&& act) {
    Matrix pg(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) pg(i, j) = pairing(support[i], act(support[j]));
    return Matrix(c.adjoint() * pg * c);
  };
  for (int s = 0; s < b.rank(); ++s) {
    GroupElement eta = b.generator(s), eta_inv = b.inverse(eta);
    out.left.push_back(quotient([&](const GroupElement& g) { return b.multiply(eta, g); }));
    out.right.push_back(quotient([&](const GroupElement& g) { return b.multiply(g, eta_inv); }));
  }
  auto eval = [&](const std::vector<Matrix>& gens, const Word& w) {
    Matrix m = Matrix::Identity(q, q);
    for (int l : w) {
      const Matrix& g = gens[letter_generator(l)];
      m = m * (l > 0 ? g : Matrix(g.inverse()));
    }
    return m;
  };
  for (int s = 0; s < b.rank(); ++s) {
    out.left_unitarity_defect = std::max(out.left_unitarity_defect, unitarity_defect(out.left[s]));
    out.right_unitarity_defect = std::max(out.right_unitarity_defect, unitarity_defect(out.right[s]));
    for (int t = 0; t < b.rank(); ++t)
      out.left_right_commutator =
          std::max(out.left_right_commutator, (out.left[s] * out.right[t] - out.right[t] * out.left[s]).norm());
  }
  for (const auto& r : pres.simplified_relators()) {
    out.left_relator_defect = std::max(out.left_relator_defect, identity_defect(eval(out.left, r)));
    out.right_relator_defect = std::max(out.right_relator_defect, identity_defect(eval(out.right, r)));
  }
  // Traces over all reduced words up to the fingerprint length.
  const double m = out.multiplicity;
  std::vector<Word> words{{}};
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (static_cast<int>(words[i].size()) >= fingerprint_length) continue;
    for (int s = 0; s < b.rank(); ++s)
      for (bool inv : {false, true}) {
        int l = letter_of(s, inv);
        if (!words[i].empty() && words[i].back() == -l) continue;
        Word w = words[i];
        w.push_back(l);
        words.push_back(std::move(w));
      }
  }
  for (const auto& w : words) {
    cplx tr = rep.evaluate(w).trace();
    out.left_trace_defect = std::max(out.left_trace_defect, std::abs(eval(out.left, w).trace() - m * tr));
    // The right action is a homomorphism r(η1 η2) = r(η1) r(η2) with r(η) ↔ R(η)^-1 on the right.
    out.right_trace_defect = std::max(out.right_trace_defect, std::abs(eval(out.right, w).trace() - m * std::conj(tr)));
  }
  // Lifted edge moves act on the fibre through l(θ(e)).
  if (out.left_unitarity_defect <= 1e-8 && q > 0) {
    const auto& cx = pres.complex();
    std::vector<Matrix> edges;
    for (int e = 0; e < cx.edge_count(); ++e)
      edges.push_back(eval(out.left, b.word_of(pres.beta(PathWord(cx, cx.edge(e).tail, {Step{e, true}})))));
    FlatConnection lifted = FlatConnection::unchecked(cx, std::move(edges), 1e-8);
    FlatConnection direct = cocycle_from_rep(pres, rep);
    auto f1 = equivalence_fingerprint(pres, lifted, fingerprint_length);
    auto f2 = equivalence_fingerprint(pres, direct, fingerprint_length);
    for (auto& x : f2) x *= m;
    out.connection_fingerprint_defect = fingerprint_distance(f1, f2);
  }
  return out;
}

/// Right-action traces are only meaningful under the trace form; under the
/// vector form the right action need not preserve the Gram form.
inline bool non_l2_passed(const NonL2Report& r, double tol = 1e-10) {
  bool ok = r.quotient_dim > 0 && r.multiplicity > 0 && r.left_unitarity_defect <= tol && r.left_relator_defect <= tol &&
            r.left_trace_defect <= 1e-8 && r.connection_fingerprint_defect <= 1e-8;
  if (r.form == FormKind::trace)
    ok = ok && r.right_unitarity_defect <= tol && r.right_relator_defect <= tol && r.right_trace_defect <= 1e-8 &&
         r.left_right_commutator <= tol;
  return ok;
}

}  // namespace sector_lab
