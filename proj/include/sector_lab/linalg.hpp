#pragma once

#include <Eigen/Dense>
#include <arpack/arpack.hpp>
// <complex.h> from the ARPACK header leaks C macros.
#ifdef I
#undef I
#endif
#ifdef complex
#undef complex
#endif

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <type_traits>
#include <numeric>
#include <random>
#include <vector>

#include "sector_lab/error.hpp"

namespace sector_lab {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline double unitarity_defect(const Matrix& u) {
  return (u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())).norm();
}

inline double identity_defect(const Matrix& u) { return (u - Matrix::Identity(u.rows(), u.cols())).norm(); }

/// Haar-distributed unitary via QR of a complex Gaussian matrix with the
/// phases of R's diagonal divided out.
inline Matrix random_unitary(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix z(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      double re = g(rng);
      z(i, j) = cplx(re, g(rng));
    }
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ() * Matrix::Identity(d, d);
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < d; ++i) {
    cplx ph = r(i, i) / std::abs(r(i, i));
    q.col(i) *= ph;
  }
  return q;
}

/// Eigenvalues with multiplicity: consecutive sorted values closer than
/// `gap` belong to one cluster.
struct Cluster {
  double value = 0.0;
  int multiplicity = 0;
};

inline std::vector<Cluster> cluster_eigenvalues(const std::vector<double>& sorted, double gap = 1e-8) {
  std::vector<Cluster> out;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i + 1;
    while (j < sorted.size() && sorted[j] - sorted[j - 1] <= gap) ++j;
    double mean = 0.0;
    for (std::size_t t = i; t < j; ++t) mean += sorted[t];
    out.push_back({mean / static_cast<double>(j - i), static_cast<int>(j - i)});
    i = j;
  }
  return out;
}

/// Largest pointwise gap between two sorted spectra of equal length, or
/// infinity when the lengths differ.
inline double spectrum_distance(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

enum class Which { smallest, largest };

struct EigsOptions {
  int ncv = 0;            // Krylov dimension; 0: min(n, max(2k + 1, 20))
  double tol = 1e-12;     // ARPACK relative Ritz tolerance
  int max_iter = 5000;
  std::uint64_t seed = 12345;
};

struct EigsResult {
  std::vector<double> values;     // ordered by `which`
  std::vector<double> residuals;  // ‖A x − λ x‖ for each returned pair
  int iterations = 0;
  int matvecs = 0;
  bool converged = false;
};

namespace detail {

template <class Scalar, class Apply>
EigsResult dense_extremes(Eigen::Index n, Apply&& apply, int k, Which which) {
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Mat a(n, n);
  Vec e = Vec::Zero(n), col(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    e(j) = Scalar(1.0);
    apply(e, col);
    a.col(j) = col;
    e(j) = Scalar(0.0);
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(a);
  EigsResult r;
  r.matvecs = static_cast<int>(n);
  r.converged = es.info() == Eigen::Success;
  for (int i = 0; i < k; ++i) {
    Eigen::Index idx = which == Which::smallest ? i : n - 1 - i;
    r.values.push_back(es.eigenvalues()(idx));
    r.residuals.push_back((a * es.eigenvectors().col(idx) - es.eigenvalues()(idx) * es.eigenvectors().col(idx)).norm());
  }
  return r;
}

}  // namespace detail

/// The k extreme eigenvalues of a Hermitian operator given only through
/// `apply(in, out)`, by ARPACK's implicitly restarted Lanczos (real) or
/// Arnoldi (complex) iteration. Small operators are diagonalized densely.
template <class Scalar, class Apply>
EigsResult extreme_eigenvalues(Eigen::Index n, Apply&& apply, int k, Which which, const EigsOptions& opts = {}) {
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  constexpr bool real = std::is_same_v<Scalar, double>;
  if (n < 1 || k < 1) fail(ErrorCode::invalid_parameter, "eigensolver needs n >= 1 and k >= 1");
  k = static_cast<int>(std::min<Eigen::Index>(k, n));
  if (n <= std::max<Eigen::Index>(2 * k + 2, 32)) return detail::dense_extremes<Scalar>(n, apply, k, which);

  const a_int nn = static_cast<a_int>(n);
  a_int ncv = opts.ncv > 0 ? opts.ncv : std::max(2 * k + 1, 20);
  ncv = static_cast<a_int>(std::min<Eigen::Index>(ncv, n));
  const char* mode = real ? (which == Which::smallest ? "SA" : "LA") : (which == Which::smallest ? "SR" : "LR");

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec resid(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if constexpr (real) {
      resid(i) = gauss(rng);
    } else {
      double re = gauss(rng);
      resid(i) = Scalar(re, gauss(rng));
    }
  }
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> v(n, ncv);
  Vec workd(3 * n);
  a_int lworkl = real ? ncv * (ncv + 8) : 3 * ncv * ncv + 5 * ncv;
  Vec workl(lworkl);
  std::vector<double> rwork(static_cast<std::size_t>(ncv));
  a_int iparam[11] = {1, 0, opts.max_iter, 1, 0, 0, 1, 0, 0, 0, 0};
  a_int ipntr[14] = {};
  a_int ido = 0, info = 1;
  EigsResult r;

  using C = double _Complex;
  auto cz = [](Scalar* p) { return reinterpret_cast<C*>(p); };
  for (;;) {
    if constexpr (real)
      arpack::internal::dsaupd_c(&ido, "I", nn, mode, k, opts.tol, resid.data(), ncv, v.data(), nn, iparam, ipntr,
                                 workd.data(), workl.data(), lworkl, &info);
    else
      arpack::internal::znaupd_c(&ido, "I", nn, mode, k, opts.tol, cz(resid.data()), ncv, cz(v.data()), nn, iparam,
                                 ipntr, cz(workd.data()), cz(workl.data()), lworkl, rwork.data(), &info);
    if (ido != -1 && ido != 1) break;
    Eigen::Map<Vec> in(workd.data() + ipntr[0] - 1, n), out(workd.data() + ipntr[1] - 1, n);
    Vec x = in, y(n);
    apply(x, y);
    out = y;
    ++r.matvecs;
  }
  r.iterations = iparam[2];
  if (info < 0) fail(ErrorCode::convergence_failure, "ARPACK iteration failed with code " + std::to_string(info));
  r.converged = info == 0 && iparam[4] >= k;
  if (iparam[4] < k) return r;

  std::vector<a_int> select(static_cast<std::size_t>(ncv), 0);
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> z(n, k);
  std::vector<double> values;
  a_int einfo = 0;
  if constexpr (real) {
    std::vector<double> d(static_cast<std::size_t>(k));
    arpack::internal::dseupd_c(1, "A", select.data(), d.data(), z.data(), nn, 0.0, "I", nn, mode, k, opts.tol,
                               resid.data(), ncv, v.data(), nn, iparam, ipntr, workd.data(), workl.data(), lworkl,
                               &einfo);
    values = d;
  } else {
    Vec d(k + 1), workev(2 * ncv);
    C sigma{};
    arpack::internal::zneupd_c(1, "A", select.data(), cz(d.data()), cz(z.data()), nn, sigma, cz(workev.data()), "I", nn,
                               mode, k, opts.tol, cz(resid.data()), ncv, cz(v.data()), nn, iparam, ipntr,
                               cz(workd.data()), cz(workl.data()), lworkl, rwork.data(), &einfo);
    for (int i = 0; i < k; ++i) values.push_back(d(i).real());
  }
  if (einfo != 0) fail(ErrorCode::convergence_failure, "ARPACK eigenvector extraction failed with code " + std::to_string(einfo));

  std::vector<int> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return which == Which::smallest ? values[a] < values[b] : values[a] > values[b];
  });
  for (int i : order) {
    Vec x = z.col(i), ax(n);
    apply(x, ax);
    ++r.matvecs;
    r.values.push_back(values[i]);
    r.residuals.push_back((ax - values[i] * x).norm());
  }
  return r;
}

}  // namespace sector_lab
