#include "uwsvd/detect.hpp"

#include <algorithm>
#include <cmath>

namespace uwsvd {

namespace {

void validate_partition(const ComplexMatrix& h,
                        const std::vector<std::size_t>& partition) {
  if (partition.empty()) throw ValidationError("uw_svd: empty partition");
  std::size_t total = 0;
  for (const std::size_t nk : partition) {
    if (nk == 0) throw ValidationError("uw_svd: zero-antenna user");
    if (nk > h.rows()) throw DimensionError("uw_svd: user block wider than tall");
    total += nk;
  }
  if (total != h.cols()) {
    throw DimensionError("uw_svd: partition does not sum to column count");
  }
}

}  // namespace

UwSvdFactors uw_svd(const ComplexMatrix& h,
                    const std::vector<std::size_t>& partition, FlopCount* fc) {
  validate_partition(h, partition);
  const std::size_t m = h.rows();

  UwSvdFactors out;
  out.psi = ComplexMatrix(m, h.cols());
  out.sigma.resize(h.cols());
  out.v_blocks.reserve(partition.size());
  out.partition = partition;

  std::size_t col0 = 0;
  for (const std::size_t nk : partition) {
    // Gram of the user block, exploiting Hermitian symmetry.
    ComplexMatrix g(nk, nk);
    for (std::size_t j = 0; j < nk; ++j) {
      const auto cj = h.col(col0 + j);
      for (std::size_t i = 0; i <= j; ++i) {
        const auto ci = h.col(col0 + i);
        cplx acc{};
        for (std::size_t r = 0; r < m; ++r) acc += std::conj(ci[r]) * cj[r];
        g(i, j) = acc;
        g(j, i) = std::conj(acc);
      }
    }
    count(fc, m * nk * (nk + 1) / 2);

    EigenDecomposition ed = eigen_hermitian(g, fc);  // ascending

    // Descending singular values; guard the rank-deficiency floor.
    const double lam_max = std::max(ed.eigenvalues.back(), 0.0);
    const double sigma_max = std::sqrt(lam_max);
    std::vector<double> sig(nk);
    for (std::size_t j = 0; j < nk; ++j) {
      sig[j] = std::sqrt(std::max(ed.eigenvalues[nk - 1 - j], 0.0));
    }
    count(fc, nk);
    if (!(sig.back() > kSigmaFloor * sigma_max)) {
      throw DegenerateChannelError("uw_svd: rank-deficient user block");
    }

    // V_k columns in descending-eigenvalue order, with the first significant
    // entry of each column made real non-negative for determinism.
    ComplexMatrix v(nk, nk);
    for (std::size_t j = 0; j < nk; ++j) {
      const auto src = ed.eigenvectors.col(nk - 1 - j);
      auto dst = v.col(j);
      std::size_t pivot = 0;
      while (pivot < nk && std::abs(src[pivot]) < 1e-8) ++pivot;
      const cplx adj = pivot == nk
                           ? cplx{1.0, 0.0}
                           : std::conj(src[pivot] / std::abs(src[pivot]));
      for (std::size_t i = 0; i < nk; ++i) dst[i] = src[i] * adj;
    }
    count(fc, nk * nk);

    // U_k = H_k * (V_k Sigma_k^{-1}), folding the inverse scaling into V_k.
    ComplexMatrix v_scaled(nk, nk);
    for (std::size_t j = 0; j < nk; ++j) {
      const double inv = 1.0 / sig[j];
      const auto src = v.col(j);
      auto dst = v_scaled.col(j);
      for (std::size_t i = 0; i < nk; ++i) dst[i] = src[i] * inv;
    }
    count(fc, nk * nk);
    for (std::size_t j = 0; j < nk; ++j) {
      auto u = out.psi.col(col0 + j);
      const auto w = v_scaled.col(j);
      for (std::size_t k = 0; k < nk; ++k) {
        const cplx wk = w[k];
        const auto hk = h.col(col0 + k);
        for (std::size_t i = 0; i < m; ++i) u[i] += hk[i] * wk;
      }
    }
    count(fc, m * nk * nk);

    std::copy(sig.begin(), sig.end(), out.sigma.begin() + col0);
    out.v_blocks.push_back(std::move(v));
    col0 += nk;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Gram operators
// ---------------------------------------------------------------------------

const ComplexMatrix& GramOperator::materialized(FlopCount* fc) const {
  std::lock_guard<std::mutex> lock(cache_mutex_);
  if (!materialized_) materialized_ = compute_materialized(fc);
  return *materialized_;
}

const ComplexMatrix& GramOperator::lower_triangular(FlopCount* fc) const {
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    if (lower_) return *lower_;
  }
  const ComplexMatrix& full = materialized(fc);
  std::lock_guard<std::mutex> lock(cache_mutex_);
  if (!lower_) {
    const std::size_t n = full.rows();
    ComplexMatrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = j; i < n; ++i) l(i, j) = full(i, j);
    }
    lower_ = std::move(l);
  }
  return *lower_;
}

OriginalGram::OriginalGram(ComplexMatrix h, DetectorMode mode, double rho)
    : h_(std::move(h)), mode_(mode), shift_(0.0) {
  if (mode == DetectorMode::kLmmse) {
    if (!(rho > 0.0)) throw ValidationError("OriginalGram: rho must be positive");
    shift_ = 1.0 / rho;
  }
}

void OriginalGram::apply(std::span<const cplx> x, std::span<cplx> y,
                         FlopCount* fc) const {
  cvector tmp(h_.rows());
  matvec(h_, x, tmp, fc);
  adjoint_matvec(h_, tmp, y, fc);
  if (mode_ == DetectorMode::kLmmse) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += shift_ * x[i];
    count(fc, y.size());
  }
}

std::vector<double> OriginalGram::diagonal(FlopCount* fc) const {
  std::vector<double> d(h_.cols());
  for (std::size_t j = 0; j < h_.cols(); ++j) {
    double acc = 0.0;
    for (const cplx& v : h_.col(j)) acc += std::norm(v);
    d[j] = acc + shift_;
  }
  count(fc, h_.rows() * h_.cols());
  return d;
}

ComplexMatrix OriginalGram::compute_materialized(FlopCount* fc) const {
  ComplexMatrix a = gram(h_, fc);
  if (mode_ == DetectorMode::kLmmse) {
    for (std::size_t i = 0; i < a.rows(); ++i) a(i, i) += shift_;
    count(fc, a.rows());
  }
  return a;
}

ESignalGram::ESignalGram(const UwSvdFactors& factors, DetectorMode mode,
                         double rho)
    : psi_(factors.psi), mode_(mode) {
  if (mode == DetectorMode::kLmmse) {
    if (!(rho > 0.0)) throw ValidationError("ESignalGram: rho must be positive");
    double sigma_max = 0.0;
    for (const double s : factors.sigma) sigma_max = std::max(sigma_max, s);
    regularizer_.resize(factors.sigma.size());
    for (std::size_t i = 0; i < regularizer_.size(); ++i) {
      const double s = factors.sigma[i];
      if (!(s > kSigmaFloor * sigma_max)) {
        throw DegenerateChannelError("ESignalGram: singular value below floor");
      }
      regularizer_[i] = 1.0 / (rho * s * s);
    }
  }
}

void ESignalGram::apply(std::span<const cplx> x, std::span<cplx> y,
                        FlopCount* fc) const {
  cvector tmp(psi_.rows());
  matvec(psi_, x, tmp, fc);
  adjoint_matvec(psi_, tmp, y, fc);
  if (mode_ == DetectorMode::kLmmse) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += regularizer_[i] * x[i];
    count(fc, y.size());
  }
}

std::vector<double> ESignalGram::diagonal(FlopCount* fc) const {
  // D(Psi^H Psi) = I by construction, so the ZF diagonal costs nothing.
  std::vector<double> d(psi_.cols(), 1.0);
  if (mode_ == DetectorMode::kLmmse) {
    for (std::size_t i = 0; i < d.size(); ++i) d[i] += regularizer_[i];
    count(fc, d.size());
  }
  return d;
}

ComplexMatrix ESignalGram::compute_materialized(FlopCount* fc) const {
  ComplexMatrix phi = gram(psi_, fc);
  if (mode_ == DetectorMode::kLmmse) {
    for (std::size_t i = 0; i < phi.rows(); ++i) phi(i, i) += regularizer_[i];
    count(fc, phi.rows());
  }
  return phi;
}

DenseGram::DenseGram(ComplexMatrix a) : a_(std::move(a)) {
  if (a_.rows() != a_.cols()) throw DimensionError("DenseGram: matrix not square");
}

void DenseGram::apply(std::span<const cplx> x, std::span<cplx> y,
                      FlopCount* fc) const {
  matvec(a_, x, y, fc);
}

std::vector<double> DenseGram::diagonal(FlopCount* fc) const {
  std::vector<double> d(a_.rows());
  for (std::size_t i = 0; i < a_.rows(); ++i) d[i] = a_(i, i).real();
  count(fc, a_.rows());
  return d;
}

ComplexMatrix DenseGram::compute_materialized(FlopCount* /*fc*/) const {
  return a_;
}

// ---------------------------------------------------------------------------
// Problem builders, exact solve, post-processing
// ---------------------------------------------------------------------------

DetectionProblem build_problem_original(const ComplexMatrix& h,
                                        std::span<const cplx> y,
                                        DetectorMode mode, double rho,
                                        FlopCount* fc) {
  if (y.size() != h.rows()) {
    throw DimensionError("build_problem_original: y must have M entries");
  }
  DetectionProblem p;
  p.rhs.resize(h.cols());
  adjoint_matvec(h, y, p.rhs, fc);
  p.op = std::make_shared<OriginalGram>(h, mode, rho);
  p.mode = mode;
  p.coords = Coordinates::kOriginal;
  return p;
}

DetectionProblem build_problem_esignal(const UwSvdFactors& factors,
                                       std::span<const cplx> y,
                                       DetectorMode mode, double rho,
                                       FlopCount* fc) {
  if (y.size() != factors.psi.rows()) {
    throw DimensionError("build_problem_esignal: y must have M entries");
  }
  DetectionProblem p;
  p.rhs.resize(factors.psi.cols());
  adjoint_matvec(factors.psi, y, p.rhs, fc);
  p.op = std::make_shared<ESignalGram>(factors, mode, rho);
  p.mode = mode;
  p.coords = Coordinates::kESignal;
  return p;
}

cvector exact_solve(const DetectionProblem& problem, FlopCount* fc) {
  const ComplexMatrix& a = problem.op->materialized(fc);
  return solve_hermitian_pd(a, problem.rhs, fc);
}

cvector post_process(const UwSvdFactors& factors, std::span<const cplx> s_hat,
                     FlopCount* fc) {
  const std::size_t n = factors.psi.cols();
  if (s_hat.size() != n) {
    throw DimensionError("post_process: s_hat must have N entries");
  }
  double sigma_max = 0.0;
  for (const double s : factors.sigma) sigma_max = std::max(sigma_max, s);

  // Sigma^{-1} s_hat, then the block-diagonal V multiply.
  cvector scaled(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(factors.sigma[i] > kSigmaFloor * sigma_max)) {
      throw DegenerateChannelError("post_process: singular value below floor");
    }
    scaled[i] = s_hat[i] / factors.sigma[i];
  }
  count(fc, 2 * n);

  cvector x(n);
  std::size_t col0 = 0;
  for (const ComplexMatrix& v : factors.v_blocks) {
    const std::size_t nk = v.rows();
    for (std::size_t j = 0; j < nk; ++j) {
      const cplx sj = scaled[col0 + j];
      const auto vc = v.col(j);
      for (std::size_t i = 0; i < nk; ++i) x[col0 + i] += vc[i] * sj;
    }
    count(fc, nk * nk);
    col0 += nk;
  }
  return x;
}

}  // namespace uwsvd
