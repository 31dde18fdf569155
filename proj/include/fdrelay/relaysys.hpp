#pragma once

// Time-switching energy-harvesting full-duplex relay: configuration,
// derived constants and per-draw SNRs.

#include "fdrelay/fading.hpp"

namespace fdrelay::relaysys {

struct SystemConfig {
  double source_power = 1.0;  ///< P_S, watts
  double hop1_distance = 5.0;
  double hop2_distance = 5.0;
  double hop1_pathloss = 2.0;  ///< m1
  double hop2_pathloss = 2.0;  ///< m2
  fading::AlphaMuParams hop1_fading;
  fading::AlphaMuParams hop2_fading;
  fading::AlphaMuParams lbi_fading;  ///< residual loop-back channel
  double noise_antenna_var = 5e-5;     ///< sigma_a^2
  double noise_conversion_var = 5e-5;  ///< sigma_c^2
  double noise_dest_var = 1e-4;        ///< sigma_D^2
  double eh_efficiency = 1.0;          ///< theta in (0, 1]
  double eh_time_fraction = 0.5;       ///< eta in (0, 1)
  double target_rate = 1.0;            ///< bits/s/Hz
  double block_time = 1.0;             ///< T, seconds

  /// Throws DomainError naming the first offending field.
  void validate() const;

  /// sigma_R^2 = sigma_a^2 + sigma_c^2.
  double relay_noise_var() const { return noise_antenna_var + noise_conversion_var; }
};

struct DerivedConstants {
  double kappa;    ///< theta eta / (1 - eta)
  double nu;       ///< 2^{R / (1 - eta)} - 1
  double lambda1;
  double lambda2;
  double lambda3;
  double beta1;  ///< P_S
  double beta2;  ///< kappa P_S
  double beta3;  ///< d1^m1 d2^m2 sigma_R^2
  double beta4;  ///< beta3 / kappa
  double pathloss_product;  ///< d1^m1 d2^m2
  double noise_dest_var;    ///< sigma_D^2
};

struct ChannelDraw {
  double h1;
  double h2;
  double h3;
};

DerivedConstants derive_constants(const SystemConfig& cfg);

/// Energy harvested during the eta T slot; the noise contribution is dropped.
double harvested_energy(const SystemConfig& cfg, double h1);

/// Relay transmit power, harvested energy spread over (1 - eta) T.
double relay_power(const SystemConfig& cfg, double h1);

/// DF SNR at the relay, 1 / (kappa h3^2).
double snr_df_relay(const SystemConfig& cfg, const ChannelDraw& draw);

/// DF SNR at the destination.
double snr_df_dest(const SystemConfig& cfg, const ChannelDraw& draw);

/// AF end-to-end SNR, beta1 Z / (beta2 V Z + beta3 V + beta4).
double snr_af_dest(const SystemConfig& cfg, const ChannelDraw& draw);

/// AF end-to-end SNR written with the relay power left explicit; algebraically
/// identical to snr_af_dest.
double snr_af_dest_expanded(const SystemConfig& cfg, const ChannelDraw& draw);

/// (1 - eta) log2(1 + gamma).
double capacity(const SystemConfig& cfg, double gamma_eff);

/// Hot-loop forms on precomputed constants, with Z = h1^2 h2^2 and V = h3^2.
inline double snr_df_eff(const DerivedConstants& dc, double z, double v) {
  const double gamma_r = 1.0 / (dc.kappa * v);
  const double gamma_d = dc.beta2 * z / (dc.pathloss_product * dc.noise_dest_var);
  return gamma_r < gamma_d ? gamma_r : gamma_d;
}

inline double snr_af(const DerivedConstants& dc, double z, double v) {
  return dc.beta1 * z / (dc.beta2 * v * z + dc.beta3 * v + dc.beta4);
}

}  // namespace fdrelay::relaysys
