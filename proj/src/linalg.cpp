#include "uwsvd/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace uwsvd {

namespace {

constexpr double kJacobiTol = 1e-15;
constexpr int kMaxSweeps = 60;

// Unitary 2x2 diagonalizing the Hermitian block [[alpha, gamma],
// [conj(gamma), beta]]:
//   J = [[ c,            s          ],
//        [-s*conj_phase, c*conj_phase]]
// with conj_phase = exp(-i arg(gamma)), c,s real, c^2 + s^2 = 1. Columns of a
// matrix pair (p, q) transform as
//   p' = c*p - s*conj_phase*q,   q' = s*p + c*conj_phase*q.
struct JacobiRotation {
  double c;
  double s;
  cplx conj_phase;
};

JacobiRotation make_rotation(double alpha, double beta, cplx gamma) {
  const double g = std::abs(gamma);
  const cplx conj_phase = std::conj(gamma) / g;
  const double tau = (beta - alpha) / (2.0 * g);
  const double t =
      (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  return {c, c * t, conj_phase};
}

void check_square(const ComplexMatrix& a, const char* what) {
  if (a.rows() != a.cols()) {
    throw DimensionError(std::string(what) + ": matrix must be square");
  }
}

void check_hermitian(const ComplexMatrix& a, const char* what) {
  check_square(a, what);
  const double dev = hermitian_deviation(a);
  const double scale = std::max(1.0, frobenius_norm(a));
  if (!(dev <= 1e-8 * scale)) {
    throw ValidationError(std::string(what) + ": matrix is not Hermitian");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Elementary kernels
// ---------------------------------------------------------------------------

void matvec(const ComplexMatrix& a, std::span<const cplx> x, std::span<cplx> y,
            FlopCount* fc) {
  if (x.size() != a.cols() || y.size() != a.rows()) {
    throw DimensionError("matvec: dimension mismatch");
  }
  std::fill(y.begin(), y.end(), cplx{});
  for (std::size_t j = 0; j < a.cols(); ++j) {
    const cplx xj = x[j];
    const auto col = a.col(j);
    for (std::size_t i = 0; i < a.rows(); ++i) y[i] += col[i] * xj;
  }
  count(fc, a.rows() * a.cols());
}

void adjoint_matvec(const ComplexMatrix& a, std::span<const cplx> x,
                    std::span<cplx> y, FlopCount* fc) {
  if (x.size() != a.rows() || y.size() != a.cols()) {
    throw DimensionError("adjoint_matvec: dimension mismatch");
  }
  for (std::size_t j = 0; j < a.cols(); ++j) {
    const auto col = a.col(j);
    cplx acc{};
    for (std::size_t i = 0; i < a.rows(); ++i) acc += std::conj(col[i]) * x[i];
    y[j] = acc;
  }
  count(fc, a.rows() * a.cols());
}

ComplexMatrix multiply(const ComplexMatrix& a, const ComplexMatrix& b,
                       FlopCount* fc) {
  if (a.cols() != b.rows()) throw DimensionError("multiply: dimension mismatch");
  ComplexMatrix out(a.rows(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    auto out_col = out.col(j);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const cplx bkj = b(k, j);
      const auto a_col = a.col(k);
      for (std::size_t i = 0; i < a.rows(); ++i) out_col[i] += a_col[i] * bkj;
    }
  }
  count(fc, a.rows() * a.cols() * b.cols());
  return out;
}

ComplexMatrix adjoint(const ComplexMatrix& a) {
  ComplexMatrix out(a.cols(), a.rows());
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.rows(); ++i) out(j, i) = std::conj(a(i, j));
  return out;
}

ComplexMatrix gram(const ComplexMatrix& a, FlopCount* fc) {
  ComplexMatrix g(a.cols(), a.cols());
  for (std::size_t j = 0; j < a.cols(); ++j) {
    const auto cj = a.col(j);
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const auto ci = a.col(i);
      cplx acc{};
      for (std::size_t r = 0; r < a.rows(); ++r) acc += std::conj(ci[r]) * cj[r];
      g(i, j) = acc;
    }
  }
  count(fc, a.rows() * a.cols() * a.cols());
  return g;
}

cplx dot(std::span<const cplx> x, std::span<const cplx> y, FlopCount* fc) {
  if (x.size() != y.size()) throw DimensionError("dot: length mismatch");
  cplx acc{};
  for (std::size_t i = 0; i < x.size(); ++i) acc += std::conj(x[i]) * y[i];
  count(fc, x.size());
  return acc;
}

double norm2(std::span<const cplx> x) {
  double acc = 0.0;
  for (const cplx& v : x) acc += std::norm(v);
  return std::sqrt(acc);
}

double frobenius_norm(const ComplexMatrix& a) {
  double acc = 0.0;
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (const cplx& v : a.col(j)) acc += std::norm(v);
  return std::sqrt(acc);
}

double hermitian_deviation(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) return std::numeric_limits<double>::infinity();
  double acc = 0.0;
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.rows(); ++i)
      acc += std::norm(a(i, j) - std::conj(a(j, i)));
  return std::sqrt(acc);
}

// ---------------------------------------------------------------------------
// Economy SVD (one-sided Jacobi)
// ---------------------------------------------------------------------------

EconomySvd economy_svd(const ComplexMatrix& a, FlopCount* fc) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (m < n) throw DimensionError("economy_svd: input must be tall (rows >= cols)");
  if (!a.all_finite()) throw ValidationError("economy_svd: non-finite entries");

  ComplexMatrix w = a;
  ComplexMatrix v = ComplexMatrix::identity(n);

  int sweep = 0;
  double worst = 0.0;
  for (; sweep < kMaxSweeps; ++sweep) {
    worst = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        auto wp = w.col(p);
        auto wq = w.col(q);
        double alpha = 0.0, beta = 0.0;
        cplx gamma{};
        for (std::size_t i = 0; i < m; ++i) {
          alpha += std::norm(wp[i]);
          beta += std::norm(wq[i]);
          gamma += std::conj(wp[i]) * wq[i];
        }
        count(fc, 3 * m);
        const double g = std::abs(gamma);
        const double scale = std::sqrt(alpha * beta);
        if (scale == 0.0) continue;
        worst = std::max(worst, g / scale);
        if (g <= kJacobiTol * scale) continue;

        const auto [c, s, cp] = make_rotation(alpha, beta, gamma);
        const cplx s_cp = s * cp;
        const cplx c_cp = c * cp;
        for (std::size_t i = 0; i < m; ++i) {
          const cplx tp = wp[i];
          const cplx tq = wq[i];
          wp[i] = c * tp - s_cp * tq;
          wq[i] = s * tp + c_cp * tq;
        }
        count(fc, 4 * m);
        auto vp = v.col(p);
        auto vq = v.col(q);
        for (std::size_t i = 0; i < n; ++i) {
          const cplx tp = vp[i];
          const cplx tq = vq[i];
          vp[i] = c * tp - s_cp * tq;
          vq[i] = s * tp + c_cp * tq;
        }
        count(fc, 4 * n);
      }
    }
    if (worst <= kJacobiTol) break;
  }
  if (sweep == kMaxSweeps && worst > 1e-12) {
    throw NumericalError("economy_svd: no convergence, residual " +
                         std::to_string(worst));
  }

  std::vector<double> sigma(n);
  for (std::size_t j = 0; j < n; ++j) sigma[j] = norm2(w.col(j));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return sigma[i] > sigma[j];
  });

  EconomySvd out;
  out.u = ComplexMatrix(m, n);
  out.v = ComplexMatrix(n, n);
  out.singular_values.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t src = order[j];
    out.singular_values[j] = sigma[src];
    auto ucol = out.u.col(j);
    const auto wcol = w.col(src);
    if (sigma[src] > 0.0) {
      for (std::size_t i = 0; i < m; ++i) ucol[i] = wcol[i] / sigma[src];
    } else {
      // Zero singular value: complete u with a unit vector orthogonal to the
      // columns already placed.
      for (std::size_t cand = 0; cand < m; ++cand) {
        std::fill(ucol.begin(), ucol.end(), cplx{});
        ucol[cand] = 1.0;
        for (std::size_t k = 0; k < j; ++k) {
          const cplx proj = dot(out.u.col(k), ucol);
          const auto uk = out.u.col(k);
          for (std::size_t i = 0; i < m; ++i) ucol[i] -= proj * uk[i];
        }
        const double nrm = norm2(ucol);
        if (nrm > 0.5) {
          for (std::size_t i = 0; i < m; ++i) ucol[i] /= nrm;
          break;
        }
      }
    }
    auto vdst = out.v.col(j);
    const auto vsrc = v.col(src);
    std::copy(vsrc.begin(), vsrc.end(), vdst.begin());
  }

  // Phase convention: first significant entry of each u column made real
  // non-negative, compensating phase absorbed into v.
  for (std::size_t j = 0; j < n; ++j) {
    auto ucol = out.u.col(j);
    std::size_t pivot = 0;
    while (pivot < m && std::abs(ucol[pivot]) < 1e-8) ++pivot;
    if (pivot == m) continue;
    const cplx adj = std::conj(ucol[pivot] / std::abs(ucol[pivot]));
    for (std::size_t i = 0; i < m; ++i) ucol[i] *= adj;
    auto vcol = out.v.col(j);
    for (std::size_t i = 0; i < n; ++i) vcol[i] *= adj;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Hermitian eigendecomposition (cyclic Jacobi)
// ---------------------------------------------------------------------------

EigenDecomposition eigen_hermitian(const ComplexMatrix& a, FlopCount* fc) {
  check_hermitian(a, "eigen_hermitian");
  const std::size_t n = a.rows();

  ComplexMatrix e(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i)
      e(i, j) = 0.5 * (a(i, j) + std::conj(a(j, i)));

  ComplexMatrix q = ComplexMatrix::identity(n);
  const double off_tol = kJacobiTol * std::max(frobenius_norm(e), 1e-300);

  int sweep = 0;
  for (; sweep < kMaxSweeps; ++sweep) {
    double worst = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t r = p + 1; r < n; ++r) {
        const cplx apr = e(p, r);
        const double g = std::abs(apr);
        worst = std::max(worst, g);
        if (g <= off_tol) continue;
        const double alpha = e(p, p).real();
        const double beta = e(r, r).real();
        const auto [c, s, cp] = make_rotation(alpha, beta, apr);
        const cplx s_cp = s * cp;
        const cplx c_cp = c * cp;
        // E <- J^H E J, exploiting the Hermitian structure: only the (i,p)
        // and (i,r) entries are computed, mirrors come from conjugation.
        for (std::size_t i = 0; i < n; ++i) {
          if (i == p || i == r) continue;
          const cplx tp = e(i, p);
          const cplx tr = e(i, r);
          const cplx np = c * tp - s_cp * tr;
          const cplx nr = s * tp + c_cp * tr;
          e(i, p) = np;
          e(p, i) = std::conj(np);
          e(i, r) = nr;
          e(r, i) = std::conj(nr);
        }
        const double shift = (s / c) * g;
        e(p, p) = alpha - shift;
        e(r, r) = beta + shift;
        e(p, r) = 0.0;
        e(r, p) = 0.0;
        // Q <- Q * J
        for (std::size_t i = 0; i < n; ++i) {
          const cplx tp = q(i, p);
          const cplx tr = q(i, r);
          q(i, p) = c * tp - s_cp * tr;
          q(i, r) = s * tp + c_cp * tr;
        }
        count(fc, 8 * n);
      }
    }
    if (worst <= off_tol) break;
  }
  if (sweep == kMaxSweeps) {
    throw NumericalError("eigen_hermitian: Jacobi sweeps did not converge");
  }

  std::vector<double> lambda(n);
  for (std::size_t i = 0; i < n; ++i) lambda[i] = e(i, i).real();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return lambda[i] < lambda[j];
  });

  EigenDecomposition out;
  out.eigenvalues.resize(n);
  out.eigenvectors = ComplexMatrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    out.eigenvalues[j] = lambda[order[j]];
    auto dst = out.eigenvectors.col(j);
    const auto src = q.col(order[j]);
    std::copy(src.begin(), src.end(), dst.begin());
  }
  return out;
}

EigenExtremes eigen_extremes_hermitian(const ComplexMatrix& a) {
  const EigenDecomposition ed = eigen_hermitian(a);
  double lo = ed.eigenvalues.front();
  const double hi = ed.eigenvalues.back();
  // PSD contract: tolerate rounding-level negatives only.
  const double floor = -1e-10 * std::max(1.0, std::abs(hi));
  if (lo < floor) {
    throw ValidationError("eigen_extremes_hermitian: matrix is not PSD");
  }
  lo = std::max(lo, 0.0);
  return {lo, hi};
}

double cond_number(const ComplexMatrix& a) {
  const EigenExtremes ex = eigen_extremes_hermitian(a);
  if (ex.lambda_max <= 0.0 || ex.lambda_min <= 1e-14 * ex.lambda_max) {
    throw SingularMatrixError("cond_number: matrix numerically singular");
  }
  return ex.lambda_max / ex.lambda_min;
}

// ---------------------------------------------------------------------------
// Triangular solves, PSD square root, Cholesky
// ---------------------------------------------------------------------------

cvector solve_lower_triangular(const ComplexMatrix& l, std::span<const cplx> rhs,
                               FlopCount* fc) {
  check_square(l, "solve_lower_triangular");
  const std::size_t n = l.rows();
  if (rhs.size() != n) throw DimensionError("solve_lower_triangular: rhs size");
  cvector x(rhs.begin(), rhs.end());
  for (std::size_t j = 0; j < n; ++j) {
    const cplx d = l(j, j);
    if (d == cplx{}) throw SingularMatrixError("solve_lower_triangular: zero diagonal");
    x[j] /= d;
    const cplx xj = x[j];
    const auto col = l.col(j);
    for (std::size_t i = j + 1; i < n; ++i) x[i] -= col[i] * xj;
  }
  count(fc, n * (n + 1) / 2);
  return x;
}

cvector solve_lower_adjoint(const ComplexMatrix& l, std::span<const cplx> rhs,
                            FlopCount* fc) {
  check_square(l, "solve_lower_adjoint");
  const std::size_t n = l.rows();
  if (rhs.size() != n) throw DimensionError("solve_lower_adjoint: rhs size");
  cvector x(rhs.begin(), rhs.end());
  for (std::size_t jj = n; jj-- > 0;) {
    const cplx d = std::conj(l(jj, jj));
    if (d == cplx{}) throw SingularMatrixError("solve_lower_adjoint: zero diagonal");
    x[jj] /= d;
    const cplx xj = x[jj];
    for (std::size_t i = 0; i < jj; ++i) x[i] -= std::conj(l(jj, i)) * xj;
  }
  count(fc, n * (n + 1) / 2);
  return x;
}

ComplexMatrix sqrt_psd(const ComplexMatrix& r) {
  check_hermitian(r, "sqrt_psd");
  EigenDecomposition ed = eigen_hermitian(r);
  const std::size_t n = r.rows();
  for (double& lam : ed.eigenvalues) {
    if (lam < -kPsdClampTol) {
      throw ValidationError("sqrt_psd: matrix has a negative eigenvalue");
    }
    lam = lam < 0.0 ? 0.0 : lam;
  }
  ComplexMatrix scaled(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    const double root = std::sqrt(ed.eigenvalues[j]);
    const auto src = ed.eigenvectors.col(j);
    auto dst = scaled.col(j);
    for (std::size_t i = 0; i < n; ++i) dst[i] = src[i] * root;
  }
  ComplexMatrix s = multiply(scaled, adjoint(ed.eigenvectors));
  // Remove rounding-level asymmetry so downstream Hermitian checks pass.
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i <= j; ++i) {
      const cplx avg = 0.5 * (s(i, j) + std::conj(s(j, i)));
      s(i, j) = avg;
      s(j, i) = std::conj(avg);
    }
  return s;
}

ComplexMatrix cholesky(const ComplexMatrix& a, FlopCount* fc) {
  check_hermitian(a, "cholesky");
  const std::size_t n = a.rows();
  ComplexMatrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j).real();
    for (std::size_t k = 0; k < j; ++k) d -= std::norm(l(j, k));
    if (!(d > 0.0)) {
      throw NumericalError("cholesky: matrix is not positive definite");
    }
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      cplx acc = a(i, j);
      for (std::size_t k = 0; k < j; ++k) acc -= l(i, k) * std::conj(l(j, k));
      l(i, j) = acc / ljj;
    }
  }
  count(fc, n * n * n / 6 + n * n);
  return l;
}

cvector solve_hermitian_pd(const ComplexMatrix& a, std::span<const cplx> b,
                           FlopCount* fc) {
  const ComplexMatrix l = cholesky(a, fc);
  const cvector y = solve_lower_triangular(l, b, fc);
  return solve_lower_adjoint(l, y, fc);
}

}  // namespace uwsvd
