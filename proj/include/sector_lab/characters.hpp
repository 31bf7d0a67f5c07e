#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <string>
#include <vector>

#include "sector_lab/error.hpp"
#include "sector_lab/finite_group.hpp"
#include "sector_lab/holonomy.hpp"
#include "sector_lab/linalg.hpp"

namespace sector_lab {

/// Irreducible characters of a finite group, one row per irrep, one column
/// per element. Row 0 is always the trivial character.
struct CharacterTable {
  std::vector<std::vector<int>> classes;
  std::vector<int> class_of;        // per element
  std::vector<int> degrees;
  std::vector<std::vector<cplx>> values;
  bool exact = false;

  int irrep_count() const { return static_cast<int>(degrees.size()); }
};

namespace detail {

inline std::vector<std::vector<cplx>> burnside_dixon(const FiniteGroup& g, const std::vector<std::vector<int>>& classes,
                                                     const std::vector<int>& class_of, std::uint64_t seed) {
  const int n = g.order();
  const int r = static_cast<int>(classes.size());
  // c[a](s, t): number of ways z = x y with x in class a, y in class s, for fixed z in class t.
  std::vector<Matrix> c(static_cast<std::size_t>(r), Matrix::Zero(r, r));
  for (int t = 0; t < r; ++t) {
    int z = classes[t].front();
    for (int x = 0; x < n; ++x) {
      int y = g.mul(g.inverse(x), z);
      c[class_of[x]](class_of[y], t) += 1.0;
    }
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix m = Matrix::Zero(r, r);
  for (int a = 0; a < r; ++a) m += gauss(rng) * c[a];
  Eigen::ComplexEigenSolver<Matrix> es(m);
  if (es.info() != Eigen::Success) fail(ErrorCode::unsupported_group, "class-matrix eigensolver failed");
  std::vector<std::vector<cplx>> out;
  for (int i = 0; i < r; ++i) {
    Vector w = es.eigenvectors().col(i);
    if (std::abs(w(0)) < 1e-12) fail(ErrorCode::unsupported_group, "degenerate class-matrix eigenvector");
    w /= w(0);
    double s = 0.0;
    for (int t = 0; t < r; ++t) s += std::norm(w(t)) / static_cast<double>(classes[t].size());
    double d = std::sqrt(static_cast<double>(n) / s);
    double dr = std::round(d);
    if (std::abs(d - dr) > 1e-6) fail(ErrorCode::unsupported_group, "non-integral character degree");
    std::vector<cplx> chi(static_cast<std::size_t>(n));
    for (int x = 0; x < n; ++x) chi[x] = dr * w(class_of[x]) / static_cast<double>(classes[class_of[x]].size());
    out.push_back(std::move(chi));
  }
  return out;
}

}  // namespace detail

/// Exact values for built-in groups, otherwise numeric Burnside–Dixon on the
/// class multiplication coefficients. Orthogonality is checked to 1e-8.
inline CharacterTable character_table(const FiniteGroup& g, std::uint64_t seed = 7) {
  CharacterTable t;
  t.classes = g.conjugacy_classes();
  t.class_of.assign(static_cast<std::size_t>(g.order()), -1);
  for (std::size_t k = 0; k < t.classes.size(); ++k)
    for (int x : t.classes[k]) t.class_of[x] = static_cast<int>(k);
  if (g.exact_characters()) {
    t.values = *g.exact_characters();
    t.exact = true;
  } else {
    t.values = detail::burnside_dixon(g, t.classes, t.class_of, seed);
    // Clean roundoff, then order: trivial first, by degree, by values.
    for (auto& row : t.values)
      for (auto& v : row) {
        if (std::abs(v.real()) < 1e-12) v.real(0.0);
        if (std::abs(v.imag()) < 1e-12) v.imag(0.0);
      }
    std::sort(t.values.begin(), t.values.end(), [](const auto& a, const auto& b) {
      auto key = [](const std::vector<cplx>& row) {
        bool trivial = std::all_of(row.begin(), row.end(), [](cplx v) { return std::abs(v - 1.0) < 1e-8; });
        return std::make_pair(trivial ? 0 : 1, std::llround(row[0].real()));
      };
      auto ka = key(a), kb = key(b);
      if (ka != kb) return ka < kb;
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::abs(a[i].real() - b[i].real()) > 1e-8) return a[i].real() < b[i].real();
        if (std::abs(a[i].imag() - b[i].imag()) > 1e-8) return a[i].imag() < b[i].imag();
      }
      return false;
    });
  }
  for (const auto& row : t.values) t.degrees.push_back(static_cast<int>(std::llround(row[0].real())));
  const int n = g.order();
  if (static_cast<std::size_t>(t.irrep_count()) != t.classes.size())
    fail(ErrorCode::unsupported_group, "irrep count differs from class count");
  for (int i = 0; i < t.irrep_count(); ++i)
    for (int j = 0; j < t.irrep_count(); ++j) {
      cplx s = 0.0;
      for (int x = 0; x < n; ++x) s += std::conj(t.values[i][x]) * t.values[j][x];
      s /= static_cast<double>(n);
      if (std::abs(s - (i == j ? 1.0 : 0.0)) > 1e-8) fail(ErrorCode::unsupported_group, "characters fail orthogonality");
    }
  return t;
}

/// Left regular permutation matrix L(g) e_h = e_{gh}.
inline Matrix left_regular(const FiniteGroup& g, int x) {
  Matrix m = Matrix::Zero(g.order(), g.order());
  for (int h = 0; h < g.order(); ++h) m(g.mul(x, h), h) = 1.0;
  return m;
}

/// Right regular permutation matrix R(g) e_h = e_{h g^-1}.
inline Matrix right_regular(const FiniteGroup& g, int x) {
  Matrix m = Matrix::Zero(g.order(), g.order());
  for (int h = 0; h < g.order(); ++h) m(g.mul(h, g.inverse(x)), h) = 1.0;
  return m;
}

/// Unitary matrices for one irreducible representation. One-dimensional
/// irreps come straight from the character; higher ones are cut out of the
/// isotypic block of the left regular representation by the eigenspaces of a
/// random Hermitian element of the right group algebra.
inline UnitaryRep irreducible_representation(const FiniteGroup& g, const CharacterTable& t, int irrep,
                                             std::uint64_t seed = 11) {
  if (irrep < 0 || irrep >= t.irrep_count()) fail(ErrorCode::invalid_parameter, "irrep index out of range");
  const int d = t.degrees[irrep];
  const int n = g.order();
  const auto& chi = t.values[irrep];
  std::vector<Matrix> images;
  if (d == 1) {
    for (int k = 0; k < g.rank(); ++k) images.push_back(Matrix::Constant(1, 1, chi[g.generator(k)]));
    return UnitaryRep(1, g.generator_names(), std::move(images), 1e-9);
  }
  Matrix p = Matrix::Zero(n, n);
  for (int x = 0; x < n; ++x) p += std::conj(chi[x]) * left_regular(g, x);
  p *= static_cast<double>(d) / n;
  Eigen::SelfAdjointEigenSolver<Matrix> ep(0.5 * (p + p.adjoint()));
  Matrix q(n, d * d);
  int cols = 0;
  for (int i = 0; i < n; ++i)
    if (ep.eigenvalues()(i) > 0.5) {
      if (cols == d * d) fail(ErrorCode::decomposition_failure, "isotypic block larger than d^2");
      q.col(cols++) = ep.eigenvectors().col(i);
    }
  if (cols != d * d) fail(ErrorCode::decomposition_failure, "isotypic block has the wrong dimension");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int attempt = 0; attempt < 8; ++attempt) {
    Matrix b = Matrix::Zero(n, n);
    for (int x = 0; x < n; ++x) {
      double re = gauss(rng);
      cplx c(re, gauss(rng));
      b += c * right_regular(g, x);
    }
    b = (0.5 * (b + b.adjoint())).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> eb(q.adjoint() * b * q);
    const auto& ev = eb.eigenvalues();
    bool separated = true;
    for (int i = 0; i < d * d && separated; ++i) {
      bool same_block = (i % d) != 0;
      double gap = i == 0 ? 1.0 : ev(i) - ev(i - 1);
      if (same_block && gap > 1e-8) separated = false;
      if (!same_block && i > 0 && gap < 1e-6) separated = false;
    }
    if (!separated) continue;
    Matrix w = q * eb.eigenvectors().leftCols(d);
    for (int k = 0; k < g.rank(); ++k) images.push_back(w.adjoint() * left_regular(g, g.generator(k)) * w);
    UnitaryRep rep(d, g.generator_names(), std::move(images), 1e-9);
    for (int x = 0; x < n; ++x)
      if (std::abs(rep.evaluate(g.word_of(x)).trace() - chi[x]) > 1e-8)
        fail(ErrorCode::decomposition_failure, "extracted irrep has the wrong character");
    return rep;
  }
  fail(ErrorCode::decomposition_failure, "could not split the isotypic block");
}

inline std::vector<UnitaryRep> irreducible_representations(const FiniteGroup& g, const CharacterTable& t) {
  std::vector<UnitaryRep> out;
  for (int i = 0; i < t.irrep_count(); ++i) out.push_back(irreducible_representation(g, t, i));
  return out;
}

/// Label for the sector of an irrep of a permutation-like group.
inline std::string statistics_label(const CharacterTable& t, int irrep) {
  if (t.degrees[irrep] > 1) return "parastatistics";
  const auto& chi = t.values[irrep];
  bool trivial = std::all_of(chi.begin(), chi.end(), [](cplx v) { return std::abs(v - 1.0) < 1e-8; });
  if (trivial) return "boson";
  bool sign = std::all_of(chi.begin(), chi.end(), [](cplx v) { return std::abs(std::abs(v.real()) - 1.0) < 1e-8 && std::abs(v.imag()) < 1e-8; });
  return sign ? "fermion" : "abelian";
}

}  // namespace sector_lab
