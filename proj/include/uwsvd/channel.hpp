#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>

#include "uwsvd/geometry.hpp"
#include "uwsvd/rng.hpp"
#include "uwsvd/types.hpp"

namespace uwsvd {

enum class ChannelModel : int {
  kModel1 = 1,  // i.i.d. Rayleigh
  kModel2 = 2,  // i.n.d. Rayleigh (spherical wavefront path loss)
  kModel3 = 3,  // i.n.d. Rician with deterministic near-field phase
  kModel4 = 4,  // mixed LoS/NLoS with shadowing
};

struct PropagationParams {
  // Urban-micro street canyon defaults.
  double beta_nlos = 0.020;
  double gamma_nlos = 1.765;
  double beta_los = 0.007;
  double gamma_los = 1.050;
  double kappa_db = 9.0;  // Rician K-factor, Model 3

  // Model 4: per-user K-factor is lognormal, LoS/NLoS states form a Markov
  // chain along the service array and shadowing is a smoothed lognormal
  // field. Window lengths are in service antennas.
  double kappa_mean_db = 9.0;
  double kappa_sigma_db = 10.0;
  double los_probability = 0.7;
  int los_window = 10;
  double shadowing_sigma_db = 4.0;

  // Closest-antenna spatial correlation; 0 disables the Kronecker model.
  double corr_rho = 0.0;

  void validate() const;
};

struct ChannelRealization {
  ComplexMatrix h;
  std::vector<std::size_t> partition;  // per-user antenna counts
  ChannelModel model = ChannelModel::kModel1;
  double corr_rho = 0.0;
  std::uint64_t seed = 0;
};

/// Entrywise r_ij = exp(-d_ij / mu); mu == 0 gives the identity.
ComplexMatrix exp_corr_matrix(const RealMatrix& pairwise_distances, double mu);

/// Scaling factor giving correlation rho between antennas lambda/2 apart.
double corr_mu_from_rho(double rho, double wavelength);

/// Entries i.i.d. CN(0, 1/m).
ComplexMatrix gen_iid_rayleigh(std::size_t m, std::size_t n, RngStream& rng);

/// sqrt(r_bs) * omega * sqrt(r_ue) via the principal PSD square roots.
ComplexMatrix apply_kronecker(const ComplexMatrix& omega,
                              const ComplexMatrix& r_bs,
                              const ComplexMatrix& r_ue);

/// Precomputed square-root correlation factors for one geometry and rho.
/// Empty matrices mean "no correlation" (rho == 0).
struct CorrelationContext {
  ComplexMatrix sqrt_r_bs;
  ComplexMatrix sqrt_r_ue;
  double corr_rho = 0.0;

  bool active() const { return corr_rho > 0.0; }
};

CorrelationContext make_correlation_context(const Geometry& g, double corr_rho);

struct ChannelGenOptions {
  bool normalize = true;  // enforce ||H_k||_F^2 = n_ue per user
};

ChannelRealization gen_model2(const Geometry& g, const PropagationParams& p,
                              std::uint64_t seed,
                              const ChannelGenOptions& opts = {});
ChannelRealization gen_model3(const Geometry& g, const PropagationParams& p,
                              std::uint64_t seed,
                              const ChannelGenOptions& opts = {});
ChannelRealization gen_model4(const Geometry& g, const PropagationParams& p,
                              std::uint64_t seed,
                              const ChannelGenOptions& opts = {});

/// Dispatch over the four models; the context must match (g, p.corr_rho).
ChannelRealization generate_channel(const Geometry& g,
                                    const PropagationParams& p,
                                    ChannelModel model, std::uint64_t seed,
                                    const CorrelationContext& corr,
                                    const ChannelGenOptions& opts = {});

/// Convenience overload building the correlation context internally.
ChannelRealization generate_channel(const Geometry& g,
                                    const PropagationParams& p,
                                    ChannelModel model, std::uint64_t seed,
                                    const ChannelGenOptions& opts = {});

/// h_hat = h + z with per-entry noise power mean(|h|^2) / 10^(varpi/10).
/// varpi_db = +infinity returns h unchanged.
ComplexMatrix add_estimation_error(const ComplexMatrix& h, double varpi_db,
                                   RngStream& rng);

/// Scales each user block to ||H_k||_F^2 = n_k.
void normalize_per_user(ComplexMatrix& h, const std::vector<std::size_t>& partition);

/// Textual dump: header "M N K N_ue model seed", then one "re im" line per
/// entry in row-major order.
void dump_channel(std::ostream& os, const ChannelRealization& ch);
ChannelRealization load_channel_dump(std::istream& is);

}  // namespace uwsvd
