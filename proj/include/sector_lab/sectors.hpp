#pragma once

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "sector_lab/complex.hpp"
#include "sector_lab/error.hpp"
#include "sector_lab/holonomy.hpp"
#include "sector_lab/linalg.hpp"
#include "sector_lab/pi1.hpp"

namespace sector_lab {

using SparseMatrix = Eigen::SparseMatrix<cplx>;

inline constexpr Eigen::Index kDenseCutoff = 2000;

/// Sparse Hermitian operator, checked on construction.
class HermitianOperator {
 public:
  explicit HermitianOperator(SparseMatrix m, double tol = 1e-12) : m_(std::move(m)) {
    m_.makeCompressed();
    if (m_.rows() != m_.cols()) fail(ErrorCode::invalid_parameter, "operator is not square");
    hermiticity_defect_ = SparseMatrix(m_ - SparseMatrix(m_.adjoint())).norm();
    if (hermiticity_defect_ > tol * std::max(1.0, m_.norm()))
      fail(ErrorCode::numerical_failure, "operator is not Hermitian");
  }
  static HermitianOperator from_dense(const Matrix& d, double tol = 1e-12) {
    return HermitianOperator(SparseMatrix(d.sparseView()), tol);
  }

  Eigen::Index size() const { return m_.rows(); }
  const SparseMatrix& sparse() const { return m_; }
  Matrix dense() const { return Matrix(m_); }
  double hermiticity_defect() const { return hermiticity_defect_; }

 private:
  SparseMatrix m_;
  double hermiticity_defect_ = 0.0;
};

/// Graph Laplacian twisted by a flat connection, written in the orthonormal
/// basis of L²(V, μ) ⊗ C^d. Block (x, x) is the total conductance at x; for
/// each step x→y along e, block (x, y) receives −w_e U(e)^-1.
inline HermitianOperator twisted_laplacian(const ConfigComplex& cx, const FlatConnection& conn) {
  if (!conn.flat())
    fail(ErrorCode::invalid_representation, "sector undefined for a non-flat connection (face defect " +
                                                std::to_string(conn.face_defect()) + ")");
  if (conn.edge_count() != cx.edge_count()) fail(ErrorCode::invalid_parameter, "connection does not match the complex");
  const int d = conn.dim();
  const Eigen::Index n = static_cast<Eigen::Index>(cx.vertex_count()) * d;
  std::vector<Eigen::Triplet<cplx>> trip;
  for (int x = 0; x < cx.vertex_count(); ++x) {
    double deg = 0.0;
    for (Step s : cx.outgoing(x)) {
      double w = cx.edge(s.edge).weight;
      deg += w;
      int y = cx.head(s);
      Matrix back = conn.step(s).adjoint();
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
          if (back(i, j) != cplx(0.0)) trip.emplace_back(x * d + i, y * d + j, -w * back(i, j));
    }
    for (int i = 0; i < d; ++i) trip.emplace_back(x * d + i, x * d + i, deg);
  }
  SparseMatrix m(n, n);
  m.setFromTriplets(trip.begin(), trip.end());
  return HermitianOperator(std::move(m));
}

struct SpectrumResult {
  std::vector<double> values;      // ascending
  std::vector<double> residuals;   // per value; ‖Hv − λv‖
  std::vector<Cluster> clusters;
  std::string method;              // "dense" or "arpack"
  bool complete = true;            // all n eigenvalues returned
};

/// Ascending eigenvalues: the full spectrum (or the lowest k) by dense
/// diagonalization for n ≤ 2000, the lowest k by ARPACK above.
inline SpectrumResult spectrum(const HermitianOperator& h, std::optional<int> k = std::nullopt,
                               double residual_tol = 1e-8, std::uint64_t seed = 12345) {
  const Eigen::Index n = h.size();
  if (n < 1) fail(ErrorCode::invalid_parameter, "empty operator");
  SpectrumResult out;
  if (k && *k < 1) fail(ErrorCode::invalid_parameter, "eigenvalue count must be >= 1");
  if (n <= kDenseCutoff) {
    Matrix a = h.dense();
    Eigen::SelfAdjointEigenSolver<Matrix> es(a);
    if (es.info() != Eigen::Success) fail(ErrorCode::convergence_failure, "dense eigensolver failed");
    Eigen::Index m = k ? std::min<Eigen::Index>(*k, n) : n;
    for (Eigen::Index i = 0; i < m; ++i) {
      out.values.push_back(es.eigenvalues()(i));
      out.residuals.push_back((a * es.eigenvectors().col(i) - es.eigenvalues()(i) * es.eigenvectors().col(i)).norm());
    }
    out.method = "dense";
    out.complete = m == n;
  } else {
    if (!k) fail(ErrorCode::invalid_parameter, "operators above the dense cutoff need an eigenvalue count");
    const auto& s = h.sparse();
    EigsOptions opts;
    opts.seed = seed;
    auto r = extreme_eigenvalues<cplx>(n, [&](const Vector& in, Vector& o) { o.noalias() = s * in; }, *k, Which::smallest, opts);
    out.values = r.values;
    out.residuals = r.residuals;
    out.method = "arpack";
    out.complete = false;
    double worst = r.residuals.empty() ? 0.0 : *std::max_element(r.residuals.begin(), r.residuals.end());
    if (!r.converged || worst > residual_tol)
      fail(ErrorCode::convergence_failure, "ARPACK did not converge (worst residual " + std::to_string(worst) + ")");
  }
  for (double r : out.residuals)
    if (r > residual_tol) fail(ErrorCode::convergence_failure, "residual above tolerance: " + std::to_string(r));
  out.clusters = cluster_eigenvalues(out.values);
  return out;
}

struct SectorEntry {
  std::string name;
  int dim = 1;
  std::string statistics;          // optional label supplied by the caller
  std::vector<double> spectrum;
  std::vector<cplx> fingerprint;
};

struct SectorReport {
  std::vector<SectorEntry> sectors;
  bool simply_connected = false;
  double max_deviation_from_trivial = 0.0;   // per-value distance to the untwisted spectrum (d copies)
  bool uniqueness_holds = true;              // only meaningful when simply connected
  std::vector<std::vector<bool>> distinct;   // pairwise fingerprint distinctness
  std::vector<std::vector<bool>> spectra_distinct;
};

/// d copies of each value, ascending.
inline std::vector<double> repeat_values(const std::vector<double>& v, int d) {
  std::vector<double> out;
  for (double x : v)
    for (int i = 0; i < d; ++i) out.push_back(x);
  std::sort(out.begin(), out.end());
  return out;
}

struct NamedRep {
  std::string name;
  UnitaryRep rep;
  std::string statistics;
};

/// Spectrum and fingerprint per representation. Sectors are declared distinct
/// when their fingerprints differ by more than `tol`. On a simply connected
/// complex every sector must reproduce the untwisted spectrum.
inline SectorReport sector_compare(const Pi1Presentation& pres, const std::vector<NamedRep>& reps, double tol = 1e-10,
                                   int word_length = 6) {
  const auto& cx = pres.complex();
  SectorReport rep;
  rep.simply_connected = pres.simply_connected();
  std::vector<double> base;
  {
    auto triv = UnitaryRep::trivial(pres.generator_names());
    base = spectrum(twisted_laplacian(cx, cocycle_from_rep(pres, triv))).values;
  }
  for (const auto& nr : reps) {
    FlatConnection conn = cocycle_from_rep(pres, nr.rep);
    SectorEntry e;
    e.name = nr.name;
    e.dim = nr.rep.dim();
    e.statistics = nr.statistics;
    e.spectrum = spectrum(twisted_laplacian(cx, conn)).values;
    e.fingerprint = equivalence_fingerprint(pres, conn, word_length);
    if (rep.simply_connected) {
      double dev = spectrum_distance(e.spectrum, repeat_values(base, e.dim));
      rep.max_deviation_from_trivial = std::max(rep.max_deviation_from_trivial, dev);
      if (dev > tol) rep.uniqueness_holds = false;
    }
    rep.sectors.push_back(std::move(e));
  }
  const std::size_t m = rep.sectors.size();
  rep.distinct.assign(m, std::vector<bool>(m, false));
  rep.spectra_distinct.assign(m, std::vector<bool>(m, false));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      if (i == j) continue;
      rep.distinct[i][j] = fingerprint_distance(rep.sectors[i].fingerprint, rep.sectors[j].fingerprint) > tol;
      rep.spectra_distinct[i][j] = spectrum_distance(rep.sectors[i].spectrum, rep.sectors[j].spectrum) > tol;
    }
  return rep;
}

}  // namespace sector_lab
