#include "uwsvd/modem.hpp"

#include <cmath>

#include "uwsvd/linalg.hpp"

namespace uwsvd {

namespace {

// Gray decode (inverse of g = b ^ (b >> 1)).
std::uint32_t gray_decode(std::uint32_t g) {
  std::uint32_t b = 0;
  for (; g != 0; g >>= 1) b ^= g;
  return b;
}

}  // namespace

Constellation::Constellation(int order) : order_(order) {
  if (order != 4 && order != 16 && order != 64) {
    throw ValidationError("Constellation: order must be 4, 16 or 64");
  }
  bits_ = order == 4 ? 2 : order == 16 ? 4 : 6;
  const int half_bits = bits_ / 2;
  const int levels = 1 << half_bits;
  // Mean energy of PAM levels {+-1, +-3, ...} per axis is (levels^2 - 1)/3;
  // two axes give 2(levels^2 - 1)/3: 2, 10, 42 for the supported orders.
  const double scale = 1.0 / std::sqrt(2.0 * (levels * levels - 1) / 3.0);
  points_.resize(order);
  for (int idx = 0; idx < order; ++idx) {
    const std::uint32_t i_bits = static_cast<std::uint32_t>(idx) >> half_bits;
    const std::uint32_t q_bits =
        static_cast<std::uint32_t>(idx) & ((1u << half_bits) - 1);
    const int i_level = static_cast<int>(gray_decode(i_bits));
    const int q_level = static_cast<int>(gray_decode(q_bits));
    const double re = (levels - 1 - 2 * i_level) * scale;
    const double im = (levels - 1 - 2 * q_level) * scale;
    points_[idx] = {re, im};
  }
}

double SnrSpec::rho_linear() const {
  const double rho = std::pow(10.0, rho_db / 10.0);
  if (!(rho > 0.0)) throw ValidationError("SnrSpec: rho must be positive");
  return rho;
}

double SnrSpec::sigma_z_sq() const { return 1.0 / rho_linear(); }

cvector modulate(const std::vector<std::uint32_t>& symbol_indices,
                 const Constellation& constellation) {
  cvector out(symbol_indices.size());
  for (std::size_t i = 0; i < symbol_indices.size(); ++i) {
    if (symbol_indices[i] >= static_cast<std::uint32_t>(constellation.order())) {
      throw ValidationError("modulate: symbol index out of range");
    }
    out[i] = constellation.points()[symbol_indices[i]];
  }
  return out;
}

std::vector<std::uint32_t> demodulate_hard(std::span<const cplx> estimates,
                                           const Constellation& constellation) {
  std::vector<std::uint32_t> out(estimates.size());
  const cvector& pts = constellation.points();
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    double best = std::norm(estimates[i] - pts[0]);
    std::uint32_t best_idx = 0;
    for (std::uint32_t k = 1; k < pts.size(); ++k) {
      const double d = std::norm(estimates[i] - pts[k]);
      if (d < best) {  // strict: ties keep the smaller index
        best = d;
        best_idx = k;
      }
    }
    out[i] = best_idx;
  }
  return out;
}

cvector transmit(const ComplexMatrix& h, std::span<const cplx> x,
                 const SnrSpec& snr, RngStream& rng) {
  if (x.size() != h.cols()) throw DimensionError("transmit: dimension mismatch");
  cvector y(h.rows());
  matvec(h, x, y);
  const double sigma = std::sqrt(snr.sigma_z_sq());
  for (cplx& v : y) v += sigma * rng.normal_complex();
  return y;
}

std::size_t symbol_error_count(const std::vector<std::uint32_t>& decided,
                               const std::vector<std::uint32_t>& truth) {
  if (decided.size() != truth.size()) {
    throw DimensionError("symbol_error_count: length mismatch");
  }
  std::size_t errors = 0;
  for (std::size_t i = 0; i < decided.size(); ++i) {
    if (decided[i] != truth[i]) ++errors;
  }
  return errors;
}

double symbol_error_rate(const std::vector<std::uint32_t>& decided,
                         const std::vector<std::uint32_t>& truth) {
  return static_cast<double>(symbol_error_count(decided, truth)) /
         static_cast<double>(truth.size());
}

std::vector<std::uint32_t> draw_symbol_indices(std::size_t n,
                                               const Constellation& constellation,
                                               RngStream& rng) {
  std::vector<std::uint32_t> out(n);
  for (auto& v : out) {
    v = rng.uniform_pow2(static_cast<std::uint32_t>(constellation.order()));
  }
  return out;
}

}  // namespace uwsvd
