#pragma once

#include <memory>
#include <mutex>
#include <optional>

#include "uwsvd/flops.hpp"
#include "uwsvd/linalg.hpp"
#include "uwsvd/types.hpp"

namespace uwsvd {

/// Per-user economy SVD factors of H = Psi * diag(sigma) * blockdiag(V)^H.
/// psi concatenates the per-user left factors [U_1 ... U_K]; sigma holds the
/// singular values in per-user blocks, each block sorted non-increasing.
struct UwSvdFactors {
  ComplexMatrix psi;
  std::vector<double> sigma;
  std::vector<ComplexMatrix> v_blocks;
  std::vector<std::size_t> partition;

  std::size_t service_antennas() const { return psi.rows(); }
  std::size_t user_antennas() const { return psi.cols(); }
};

/// Relative floor below which a user block counts as rank deficient.
inline constexpr double kSigmaFloor = 1e-12;

/// User-wise economy SVD. Each block is factored through its Gram matrix
/// (eigendecomposition of H_k^H H_k, then U_k = H_k V_k Sigma_k^{-1}), which
/// keeps the measured cost at Theta(m * n_k^2) with a small constant.
UwSvdFactors uw_svd(const ComplexMatrix& h,
                    const std::vector<std::size_t>& partition,
                    FlopCount* fc = nullptr);

enum class DetectorMode { kZf, kLmmse };
enum class Coordinates { kOriginal, kESignal };

/// Hermitian positive (semi-)definite Gram operator. Matvecs never require
/// the explicit matrix; materialization and triangular extraction are lazily
/// cached for the splitting methods that need them.
class GramOperator {
 public:
  virtual ~GramOperator() = default;

  virtual std::size_t dim() const = 0;
  virtual void apply(std::span<const cplx> x, std::span<cplx> y,
                     FlopCount* fc = nullptr) const = 0;
  virtual std::vector<double> diagonal(FlopCount* fc = nullptr) const = 0;

  const ComplexMatrix& materialized(FlopCount* fc = nullptr) const;
  /// Lower-triangular part (diagonal included) of the materialized matrix.
  const ComplexMatrix& lower_triangular(FlopCount* fc = nullptr) const;

 protected:
  virtual ComplexMatrix compute_materialized(FlopCount* fc) const = 0;

 private:
  mutable std::mutex cache_mutex_;
  mutable std::optional<ComplexMatrix> materialized_;
  mutable std::optional<ComplexMatrix> lower_;
};

/// A = H^H H (+ rho^{-1} I in LMMSE mode); matvec runs as H^H (H x).
class OriginalGram final : public GramOperator {
 public:
  OriginalGram(ComplexMatrix h, DetectorMode mode, double rho);

  std::size_t dim() const override { return h_.cols(); }
  void apply(std::span<const cplx> x, std::span<cplx> y,
             FlopCount* fc = nullptr) const override;
  std::vector<double> diagonal(FlopCount* fc = nullptr) const override;

 protected:
  ComplexMatrix compute_materialized(FlopCount* fc) const override;

 private:
  ComplexMatrix h_;
  DetectorMode mode_;
  double shift_;  // rho^{-1} in LMMSE mode, else 0
};

/// Phi = Psi^H Psi (+ rho^{-1} Sigma^{-2} in LMMSE mode). The ZF diagonal is
/// returned as exact ones without computation.
class ESignalGram final : public GramOperator {
 public:
  ESignalGram(const UwSvdFactors& factors, DetectorMode mode, double rho);

  std::size_t dim() const override { return psi_.cols(); }
  void apply(std::span<const cplx> x, std::span<cplx> y,
             FlopCount* fc = nullptr) const override;
  std::vector<double> diagonal(FlopCount* fc = nullptr) const override;

 protected:
  ComplexMatrix compute_materialized(FlopCount* fc) const override;

 private:
  ComplexMatrix psi_;
  std::vector<double> regularizer_;  // rho^{-1} sigma_i^{-2}, LMMSE only
  DetectorMode mode_;
};

/// Explicit Hermitian matrix operator, for synthetic systems.
class DenseGram final : public GramOperator {
 public:
  explicit DenseGram(ComplexMatrix a);

  std::size_t dim() const override { return a_.rows(); }
  void apply(std::span<const cplx> x, std::span<cplx> y,
             FlopCount* fc = nullptr) const override;
  std::vector<double> diagonal(FlopCount* fc = nullptr) const override;

 protected:
  ComplexMatrix compute_materialized(FlopCount* fc) const override;

 private:
  ComplexMatrix a_;
};

/// Hermitian PD linear system op * x = rhs in either coordinate system.
struct DetectionProblem {
  std::shared_ptr<const GramOperator> op;
  cvector rhs;
  DetectorMode mode = DetectorMode::kZf;
  Coordinates coords = Coordinates::kOriginal;

  std::size_t dim() const { return op->dim(); }
};

/// rhs = H^H y; operator A_zf or A_lmmse.
DetectionProblem build_problem_original(const ComplexMatrix& h,
                                        std::span<const cplx> y,
                                        DetectorMode mode, double rho,
                                        FlopCount* fc = nullptr);

/// rhs = Psi^H y; operator Phi_zf or Phi_lmmse.
DetectionProblem build_problem_esignal(const UwSvdFactors& factors,
                                       std::span<const cplx> y,
                                       DetectorMode mode, double rho,
                                       FlopCount* fc = nullptr);

/// Direct solve via Cholesky of the materialized operator.
cvector exact_solve(const DetectionProblem& problem, FlopCount* fc = nullptr);

/// x_hat = V Sigma^{-1} s_hat, computed block-wise.
cvector post_process(const UwSvdFactors& factors, std::span<const cplx> s_hat,
                     FlopCount* fc = nullptr);

}  // namespace uwsvd
