#include "uwsvd/channel.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "uwsvd/linalg.hpp"

namespace uwsvd {

namespace {

// Purpose tags for derived substreams. Keeping purposes on independent
// streams makes degenerate parameter choices (e.g. LoS probability 1) land on
// exactly the same fading draws as the simpler model they reduce to.
constexpr std::uint64_t kTagOmega = 1;
constexpr std::uint64_t kTagLosField = 2;
constexpr std::uint64_t kTagShadowing = 3;
constexpr std::uint64_t kTagKappa = 4;
constexpr std::uint64_t kTagEstError = 5;

ComplexMatrix draw_omega(std::size_t m, std::size_t n, std::uint64_t seed,
                         const CorrelationContext& corr) {
  RngStream rng = RngStream(seed).derive(kTagOmega);
  ComplexMatrix omega = gen_iid_rayleigh(m, n, rng);
  if (corr.active()) {
    omega = multiply(multiply(corr.sqrt_r_bs, omega), corr.sqrt_r_ue);
  }
  return omega;
}

void finalize(ChannelRealization& ch, const ChannelGenOptions& opts) {
  if (!ch.h.all_finite()) {
    throw NumericalError("channel generator produced non-finite entries");
  }
  if (opts.normalize) normalize_per_user(ch.h, ch.partition);
}

double kappa_linear_from_db(double kappa_db) {
  return std::pow(10.0, kappa_db / 10.0);
}

// Binary LoS states along the service array: stationary probability p,
// autocorrelation decaying by exp(-1/window) per antenna.
std::vector<std::uint8_t> markov_los_column(std::size_t m, double p,
                                            int window, RngStream& rng) {
  std::vector<std::uint8_t> state(m);
  const double decay = std::exp(-1.0 / static_cast<double>(window));
  const double stay_los = p + (1.0 - p) * decay;
  const double enter_los = p * (1.0 - decay);
  state[0] = rng.uniform() < p ? 1 : 0;
  for (std::size_t i = 1; i < m; ++i) {
    const double threshold = state[i - 1] ? stay_los : enter_los;
    state[i] = rng.uniform() < threshold ? 1 : 0;
  }
  return state;
}

// Standard normal field smoothed by a trailing moving average; per-sample
// variance is kept at exactly one by the 1/sqrt(count) weighting.
std::vector<double> smoothed_normal_column(std::size_t m, int window,
                                           RngStream& rng) {
  std::vector<double> raw(m);
  for (double& v : raw) v = rng.normal();
  std::vector<double> out(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t start = i + 1 >= static_cast<std::size_t>(window)
                                  ? i + 1 - static_cast<std::size_t>(window)
                                  : 0;
    double acc = 0.0;
    for (std::size_t j = start; j <= i; ++j) acc += raw[j];
    out[i] = acc / std::sqrt(static_cast<double>(i - start + 1));
  }
  return out;
}

}  // namespace

void PropagationParams::validate() const {
  if (beta_nlos < 0.0 || beta_los < 0.0 || gamma_nlos < 0.0 || gamma_los < 0.0) {
    throw ValidationError("PropagationParams: path-loss values must be >= 0");
  }
  if (!(corr_rho >= 0.0 && corr_rho < 1.0)) {
    throw ValidationError("PropagationParams: corr_rho must be in [0, 1)");
  }
  if (!(los_probability >= 0.0 && los_probability <= 1.0)) {
    throw ValidationError("PropagationParams: los_probability must be in [0, 1]");
  }
  if (los_window <= 0) {
    throw ValidationError("PropagationParams: los_window must be positive");
  }
  if (kappa_sigma_db < 0.0 || shadowing_sigma_db < 0.0) {
    throw ValidationError("PropagationParams: sigma values must be >= 0");
  }
}

ComplexMatrix exp_corr_matrix(const RealMatrix& pairwise_distances, double mu) {
  if (pairwise_distances.rows != pairwise_distances.cols) {
    throw ValidationError("exp_corr_matrix: distance matrix must be square");
  }
  if (mu < 0.0) throw ValidationError("exp_corr_matrix: mu must be >= 0");
  const std::size_t n = pairwise_distances.rows;
  ComplexMatrix r(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      const double d = pairwise_distances.at(i, j);
      if (d < 0.0) throw ValidationError("exp_corr_matrix: negative distance");
      r(i, j) = i == j ? 1.0 : (mu == 0.0 ? 0.0 : std::exp(-d / mu));
    }
  }
  return r;
}

double corr_mu_from_rho(double rho, double wavelength) {
  if (!(rho >= 0.0 && rho < 1.0)) {
    throw ValidationError("corr_mu_from_rho: rho must be in [0, 1)");
  }
  if (rho == 0.0) return 0.0;
  return -(wavelength / 2.0) / std::log(rho);
}

ComplexMatrix gen_iid_rayleigh(std::size_t m, std::size_t n, RngStream& rng) {
  if (m == 0 || n == 0) throw DimensionError("gen_iid_rayleigh: empty matrix");
  ComplexMatrix h(m, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  // Row-major draw order so the stream is independent of storage layout.
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) h(i, j) = scale * rng.normal_complex();
  }
  return h;
}

ComplexMatrix apply_kronecker(const ComplexMatrix& omega,
                              const ComplexMatrix& r_bs,
                              const ComplexMatrix& r_ue) {
  if (r_bs.rows() != omega.rows() || r_ue.rows() != omega.cols()) {
    throw ValidationError("apply_kronecker: dimension mismatch");
  }
  return multiply(multiply(sqrt_psd(r_bs), omega), sqrt_psd(r_ue));
}

CorrelationContext make_correlation_context(const Geometry& g, double corr_rho) {
  CorrelationContext ctx;
  ctx.corr_rho = corr_rho;
  if (corr_rho == 0.0) return ctx;
  const double mu = corr_mu_from_rho(corr_rho, g.wavelength);
  ctx.sqrt_r_bs = sqrt_psd(exp_corr_matrix(pairwise_distances(g.service_positions), mu));
  ctx.sqrt_r_ue = sqrt_psd(exp_corr_matrix(pairwise_distances(flattened_user_positions(g)), mu));
  return ctx;
}

namespace {

ChannelRealization model2_impl(const Geometry& g, const PropagationParams& p,
                               std::uint64_t seed, const CorrelationContext& corr,
                               const ChannelGenOptions& opts) {
  const RealMatrix d = service_user_distances(g);
  ChannelRealization ch;
  ch.h = draw_omega(g.service_count(), g.total_user_antennas(), seed, corr);
  ch.partition = g.partition();
  ch.model = ChannelModel::kModel2;
  ch.corr_rho = corr.corr_rho;
  ch.seed = seed;
  for (std::size_t j = 0; j < ch.h.cols(); ++j) {
    for (std::size_t i = 0; i < ch.h.rows(); ++i) {
      const double dist = d.at(i, j);
      if (dist <= 0.0) throw ValidationError("gen_model2: zero antenna distance");
      ch.h(i, j) *= p.beta_nlos / std::pow(dist, p.gamma_nlos);
    }
  }
  finalize(ch, opts);
  return ch;
}

ChannelRealization model3_impl(const Geometry& g, const PropagationParams& p,
                               std::uint64_t seed, const CorrelationContext& corr,
                               const ChannelGenOptions& opts) {
  const double kappa = kappa_linear_from_db(p.kappa_db);
  const RealMatrix d = service_user_distances(g);
  ChannelRealization ch;
  ch.h = draw_omega(g.service_count(), g.total_user_antennas(), seed, corr);
  ch.partition = g.partition();
  ch.model = ChannelModel::kModel3;
  ch.corr_rho = corr.corr_rho;
  ch.seed = seed;
  const double los_weight = std::sqrt(kappa / (kappa + 1.0));
  const double nlos_weight = std::sqrt(1.0 / (kappa + 1.0));
  for (std::size_t j = 0; j < ch.h.cols(); ++j) {
    for (std::size_t i = 0; i < ch.h.rows(); ++i) {
      const double dist = d.at(i, j);
      if (dist <= 0.0) throw ValidationError("gen_model3: zero antenna distance");
      const double phase = -2.0 * std::numbers::pi * dist / g.wavelength;
      const cplx phasor{std::cos(phase), std::sin(phase)};
      const double scale = p.beta_los / std::pow(dist, p.gamma_los);
      ch.h(i, j) = scale * (los_weight * phasor + nlos_weight * ch.h(i, j));
    }
  }
  finalize(ch, opts);
  return ch;
}

ChannelRealization model4_impl(const Geometry& g, const PropagationParams& p,
                               std::uint64_t seed, const CorrelationContext& corr,
                               const ChannelGenOptions& opts) {
  const std::size_t m = g.service_count();
  const std::size_t n = g.total_user_antennas();
  const std::size_t n_ue = g.antennas_per_user();
  const RealMatrix d = service_user_distances(g);

  RngStream los_rng = RngStream(seed).derive(kTagLosField);
  RngStream shadow_rng = RngStream(seed).derive(kTagShadowing);
  RngStream kappa_rng = RngStream(seed).derive(kTagKappa);

  // Per-user Rician K-factor, lognormal in dB.
  std::vector<double> kappa(g.user_count());
  for (double& v : kappa) {
    v = kappa_linear_from_db(p.kappa_mean_db + p.kappa_sigma_db * kappa_rng.normal());
  }

  ChannelRealization ch;
  ch.h = draw_omega(m, n, seed, corr);
  ch.partition = g.partition();
  ch.model = ChannelModel::kModel4;
  ch.corr_rho = corr.corr_rho;
  ch.seed = seed;

  for (std::size_t j = 0; j < n; ++j) {
    const std::vector<std::uint8_t> los =
        markov_los_column(m, p.los_probability, p.los_window, los_rng);
    const std::vector<double> shade =
        smoothed_normal_column(m, p.los_window, shadow_rng);
    const double k_user = kappa[j / n_ue];
    const double los_weight = std::sqrt(k_user / (k_user + 1.0));
    const double nlos_weight = std::sqrt(1.0 / (k_user + 1.0));
    for (std::size_t i = 0; i < m; ++i) {
      const double dist = d.at(i, j);
      if (dist <= 0.0) throw ValidationError("gen_model4: zero antenna distance");
      const double shadowing =
          std::pow(10.0, p.shadowing_sigma_db * shade[i] / 20.0);
      cplx entry;
      if (los[i]) {
        const double phase = -2.0 * std::numbers::pi * dist / g.wavelength;
        const cplx phasor{std::cos(phase), std::sin(phase)};
        const double scale = p.beta_los / std::pow(dist, p.gamma_los);
        entry = scale * (los_weight * phasor + nlos_weight * ch.h(i, j));
      } else {
        entry = p.beta_nlos / std::pow(dist, p.gamma_nlos) * ch.h(i, j);
      }
      ch.h(i, j) = shadowing * entry;
    }
  }
  finalize(ch, opts);
  return ch;
}

ChannelRealization model1_impl(const Geometry& g, std::uint64_t seed,
                               const CorrelationContext& corr,
                               const ChannelGenOptions& opts) {
  ChannelRealization ch;
  ch.h = draw_omega(g.service_count(), g.total_user_antennas(), seed, corr);
  ch.partition = g.partition();
  ch.model = ChannelModel::kModel1;
  ch.corr_rho = corr.corr_rho;
  ch.seed = seed;
  finalize(ch, opts);
  return ch;
}

}  // namespace

ChannelRealization gen_model2(const Geometry& g, const PropagationParams& p,
                              std::uint64_t seed, const ChannelGenOptions& opts) {
  p.validate();
  return model2_impl(g, p, seed, make_correlation_context(g, p.corr_rho), opts);
}

ChannelRealization gen_model3(const Geometry& g, const PropagationParams& p,
                              std::uint64_t seed, const ChannelGenOptions& opts) {
  p.validate();
  return model3_impl(g, p, seed, make_correlation_context(g, p.corr_rho), opts);
}

ChannelRealization gen_model4(const Geometry& g, const PropagationParams& p,
                              std::uint64_t seed, const ChannelGenOptions& opts) {
  p.validate();
  return model4_impl(g, p, seed, make_correlation_context(g, p.corr_rho), opts);
}

ChannelRealization generate_channel(const Geometry& g, const PropagationParams& p,
                                    ChannelModel model, std::uint64_t seed,
                                    const CorrelationContext& corr,
                                    const ChannelGenOptions& opts) {
  p.validate();
  if (corr.corr_rho != p.corr_rho) {
    throw ValidationError("generate_channel: correlation context mismatch");
  }
  switch (model) {
    case ChannelModel::kModel1:
      return model1_impl(g, seed, corr, opts);
    case ChannelModel::kModel2:
      return model2_impl(g, p, seed, corr, opts);
    case ChannelModel::kModel3:
      return model3_impl(g, p, seed, corr, opts);
    case ChannelModel::kModel4:
      return model4_impl(g, p, seed, corr, opts);
  }
  throw ValidationError("generate_channel: unknown model");
}

ChannelRealization generate_channel(const Geometry& g, const PropagationParams& p,
                                    ChannelModel model, std::uint64_t seed,
                                    const ChannelGenOptions& opts) {
  return generate_channel(g, p, model, seed,
                          make_correlation_context(g, p.corr_rho), opts);
}

ComplexMatrix add_estimation_error(const ComplexMatrix& h, double varpi_db,
                                   RngStream& rng) {
  if (std::isinf(varpi_db) && varpi_db > 0.0) return h;
  if (!std::isfinite(varpi_db)) {
    throw ValidationError("add_estimation_error: varpi must be finite or +inf");
  }
  double mean_power = 0.0;
  for (std::size_t j = 0; j < h.cols(); ++j) {
    for (const cplx& v : h.col(j)) mean_power += std::norm(v);
  }
  mean_power /= static_cast<double>(h.rows() * h.cols());
  const double noise_power = mean_power / std::pow(10.0, varpi_db / 10.0);
  const double sigma = std::sqrt(noise_power);
  RngStream noise = rng.derive(kTagEstError);
  ComplexMatrix out = h;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    for (std::size_t j = 0; j < out.cols(); ++j) {
      out(i, j) += sigma * noise.normal_complex();
    }
  }
  return out;
}

void normalize_per_user(ComplexMatrix& h, const std::vector<std::size_t>& partition) {
  std::size_t col = 0;
  for (const std::size_t nk : partition) {
    double power = 0.0;
    for (std::size_t j = col; j < col + nk; ++j) {
      for (const cplx& v : h.col(j)) power += std::norm(v);
    }
    if (!(power > 0.0)) {
      throw DegenerateChannelError("normalize_per_user: zero-power user block");
    }
    const double scale = std::sqrt(static_cast<double>(nk) / power);
    for (std::size_t j = col; j < col + nk; ++j) {
      for (cplx& v : h.col(j)) v *= scale;
    }
    col += nk;
  }
  if (col != h.cols()) {
    throw DimensionError("normalize_per_user: partition does not cover h");
  }
}

void dump_channel(std::ostream& os, const ChannelRealization& ch) {
  const std::size_t k = ch.partition.size();
  const std::size_t n_ue = k == 0 ? 0 : ch.partition.front();
  for (const std::size_t nk : ch.partition) {
    if (nk != n_ue) {
      throw ValidationError("dump_channel: requires a uniform partition");
    }
  }
  char line[96];
  std::snprintf(line, sizeof(line), "%zu %zu %zu %zu %d %llu\n", ch.h.rows(),
                ch.h.cols(), k, n_ue, static_cast<int>(ch.model),
                static_cast<unsigned long long>(ch.seed));
  os << line;
  for (std::size_t i = 0; i < ch.h.rows(); ++i) {
    for (std::size_t j = 0; j < ch.h.cols(); ++j) {
      const cplx v = ch.h(i, j);
      std::snprintf(line, sizeof(line), "%.17g %.17g\n", v.real(), v.imag());
      os << line;
    }
  }
}

ChannelRealization load_channel_dump(std::istream& is) {
  std::size_t m = 0, n = 0, k = 0, n_ue = 0;
  int model = 0;
  unsigned long long seed = 0;
  if (!(is >> m >> n >> k >> n_ue >> model >> seed)) {
    throw ValidationError("load_channel_dump: malformed header");
  }
  if (m == 0 || n == 0 || k * n_ue != n) {
    throw ValidationError("load_channel_dump: inconsistent header");
  }
  ChannelRealization ch;
  ch.h = ComplexMatrix(m, n);
  ch.partition.assign(k, n_ue);
  ch.model = static_cast<ChannelModel>(model);
  ch.seed = seed;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double re = 0.0, im = 0.0;
      if (!(is >> re >> im)) {
        throw ValidationError("load_channel_dump: truncated entries");
      }
      ch.h(i, j) = {re, im};
    }
  }
  return ch;
}

}  // namespace uwsvd
