#pragma once

#include <cstdint>
#include <vector>

#include "uwsvd/rng.hpp"
#include "uwsvd/types.hpp"

namespace uwsvd {

/// Square QAM constellation with per-axis reflected Gray labeling and unit
/// average energy. Supported orders: 4, 16, 64.
///
/// Index layout: the high half of the index bits selects the in-phase level,
/// the low half the quadrature level; each half is Gray-decoded to a level
/// counted downward from the largest amplitude, so index 0 maps to the
/// top-right corner point, e.g. (1+1j)/sqrt(2) for 4-QAM.
class Constellation {
 public:
  explicit Constellation(int order);

  int order() const { return order_; }
  const cvector& points() const { return points_; }

  /// Number of bits per symbol (log2 of the order).
  int bits_per_symbol() const { return bits_; }

 private:
  int order_;
  int bits_;
  cvector points_;
};

/// SNR rho = sigma_x^2 / sigma_z^2 with sigma_x^2 = 1.
struct SnrSpec {
  double rho_db = 0.0;

  double rho_linear() const;
  double sigma_z_sq() const;  // noise variance 1 / rho
};

cvector modulate(const std::vector<std::uint32_t>& symbol_indices,
                 const Constellation& constellation);

/// Nearest-point hard decision; exact distance ties resolve to the smaller
/// index.
std::vector<std::uint32_t> demodulate_hard(std::span<const cplx> estimates,
                                           const Constellation& constellation);

/// y = h x + z with z i.i.d. CN(0, sigma_z^2).
cvector transmit(const ComplexMatrix& h, std::span<const cplx> x,
                 const SnrSpec& snr, RngStream& rng);

double symbol_error_rate(const std::vector<std::uint32_t>& decided,
                         const std::vector<std::uint32_t>& truth);

/// Mismatch count, used for exact integer aggregation across trials.
std::size_t symbol_error_count(const std::vector<std::uint32_t>& decided,
                               const std::vector<std::uint32_t>& truth);

std::vector<std::uint32_t> draw_symbol_indices(std::size_t n,
                                               const Constellation& constellation,
                                               RngStream& rng);

}  // namespace uwsvd
