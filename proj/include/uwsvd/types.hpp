#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace uwsvd {

using cplx = std::complex<double>;
using cvector = std::vector<cplx>;

/// Incompatible or malformed matrix/vector dimensions.
class DimensionError : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Input violates a documented precondition (non-Hermitian, negative distance, ...).
class ValidationError : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed (no convergence, indefinite matrix, ...).
class NumericalError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class SingularMatrixError : public NumericalError {
  using NumericalError::NumericalError;
};

/// A user sub-channel is (numerically) rank deficient.
class DegenerateChannelError : public NumericalError {
  using NumericalError::NumericalError;
};

class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Dense complex matrix with column-major storage.
///
/// Entries are addressed as (row, col); columns are contiguous, which suits
/// the Gram products and one-sided factorizations used throughout.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;

  ComplexMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols) {
    if (rows == 0 || cols == 0) {
      throw DimensionError("ComplexMatrix: dimensions must be positive");
    }
  }

  static ComplexMatrix identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  cplx& operator()(std::size_t r, std::size_t c) { return data_[c * rows_ + r]; }
  const cplx& operator()(std::size_t r, std::size_t c) const {
    return data_[c * rows_ + r];
  }

  std::span<cplx> col(std::size_t c) { return {data_.data() + c * rows_, rows_}; }
  std::span<const cplx> col(std::size_t c) const {
    return {data_.data() + c * rows_, rows_};
  }

  cplx* data() { return data_.data(); }
  const cplx* data() const { return data_.data(); }

  bool all_finite() const {
    for (const cplx& v : data_) {
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    }
    return true;
  }

  bool operator==(const ComplexMatrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  cvector data_;
};

}  // namespace uwsvd
