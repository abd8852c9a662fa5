#pragma once

#include <span>
#include <vector>

#include "uwsvd/flops.hpp"
#include "uwsvd/types.hpp"

namespace uwsvd {

// ---------------------------------------------------------------------------
// Elementary dense kernels
// ---------------------------------------------------------------------------

/// y = a * x. Cost: rows*cols madds.
void matvec(const ComplexMatrix& a, std::span<const cplx> x, std::span<cplx> y,
            FlopCount* fc = nullptr);

/// y = a^H * x. Cost: rows*cols madds.
void adjoint_matvec(const ComplexMatrix& a, std::span<const cplx> x,
                    std::span<cplx> y, FlopCount* fc = nullptr);

ComplexMatrix multiply(const ComplexMatrix& a, const ComplexMatrix& b,
                       FlopCount* fc = nullptr);

ComplexMatrix adjoint(const ComplexMatrix& a);

/// a^H * a without symmetry shortcuts (all n^2 entries formed).
ComplexMatrix gram(const ComplexMatrix& a, FlopCount* fc = nullptr);

cplx dot(std::span<const cplx> x, std::span<const cplx> y,
         FlopCount* fc = nullptr);  // x^H y

double norm2(std::span<const cplx> x);

double frobenius_norm(const ComplexMatrix& a);

/// max |a_ij - conj(a_ji)| based Frobenius distance to the Hermitian part.
double hermitian_deviation(const ComplexMatrix& a);

// ---------------------------------------------------------------------------
// Factorizations
// ---------------------------------------------------------------------------

/// Economy SVD of a tall matrix: a = u * diag(singular_values) * v^H with
/// u m-by-n column-orthonormal, v n-by-n unitary and singular values sorted
/// non-increasing. Each column of u has a real non-negative first
/// significant entry, making the factorization deterministic.
struct EconomySvd {
  ComplexMatrix u;
  std::vector<double> singular_values;
  ComplexMatrix v;
};

/// One-sided Jacobi. Requires rows >= cols and finite entries.
EconomySvd economy_svd(const ComplexMatrix& a, FlopCount* fc = nullptr);

struct EigenExtremes {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
};

/// Full Hermitian eigendecomposition (cyclic Jacobi), eigenvalues ascending.
struct EigenDecomposition {
  std::vector<double> eigenvalues;
  ComplexMatrix eigenvectors;  // column j pairs with eigenvalues[j]
};

EigenDecomposition eigen_hermitian(const ComplexMatrix& a,
                                   FlopCount* fc = nullptr);

/// Smallest and largest eigenvalue of a Hermitian matrix.
EigenExtremes eigen_extremes_hermitian(const ComplexMatrix& a);

/// lambda_max / lambda_min of a Hermitian PSD matrix.
double cond_number(const ComplexMatrix& a);

/// Forward substitution for lower-triangular l. Cost Theta(n^2).
cvector solve_lower_triangular(const ComplexMatrix& l, std::span<const cplx> rhs,
                               FlopCount* fc = nullptr);

/// Backward substitution solving l^H x = rhs (l stored lower-triangular).
cvector solve_lower_adjoint(const ComplexMatrix& l, std::span<const cplx> rhs,
                            FlopCount* fc = nullptr);

/// Principal square root of a Hermitian PSD matrix. Eigenvalues in
/// (-kPsdClampTol, 0) are clamped to zero; anything more negative is an error.
ComplexMatrix sqrt_psd(const ComplexMatrix& r);

/// Cholesky factor l (lower) with a = l l^H; throws NumericalError if a is
/// not positive definite.
ComplexMatrix cholesky(const ComplexMatrix& a, FlopCount* fc = nullptr);

/// Solves a x = b for Hermitian positive definite a via Cholesky.
cvector solve_hermitian_pd(const ComplexMatrix& a, std::span<const cplx> b,
                           FlopCount* fc = nullptr);

inline constexpr double kFactorizationTol = 1e-10;  // relative, Frobenius
inline constexpr double kPsdClampTol = 1e-12;       // absolute eigenvalue floor

}  // namespace uwsvd
