#include "fdrelay/relaysys.hpp"

#include <cmath>
#include <string>

#include "fdrelay/errors.hpp"

namespace fdrelay::relaysys {

namespace {

void require(bool ok, const char* field, const char* what) {
  if (!ok) throw DomainError(std::string("config: ") + field + " " + what);
}

bool positive(double v) { return v > 0.0 && std::isfinite(v); }

void require_fading(const fading::AlphaMuParams& p, const char* field) {
  try {
    p.validate();
  } catch (const DomainError& e) {
    throw DomainError(std::string("config: ") + field + ": " + e.what());
  }
}

double hop1_gain(const SystemConfig& cfg, double h1) {
  return cfg.source_power * h1 * h1 / std::pow(cfg.hop1_distance, cfg.hop1_pathloss);
}

}  // namespace

void SystemConfig::validate() const {
  require(positive(source_power), "source_power", "must be positive");
  require(positive(hop1_distance), "hop1_distance", "must be positive");
  require(positive(hop2_distance), "hop2_distance", "must be positive");
  require(std::isfinite(hop1_pathloss) && hop1_pathloss >= 0.0, "hop1_pathloss", "must be nonnegative");
  require(std::isfinite(hop2_pathloss) && hop2_pathloss >= 0.0, "hop2_pathloss", "must be nonnegative");
  require_fading(hop1_fading, "hop1_fading");
  require_fading(hop2_fading, "hop2_fading");
  require_fading(lbi_fading, "lbi_fading");
  require(positive(noise_antenna_var), "noise_antenna_var", "must be positive");
  require(positive(noise_conversion_var), "noise_conversion_var", "must be positive");
  require(positive(noise_dest_var), "noise_dest_var", "must be positive");
  require(eh_efficiency > 0.0 && eh_efficiency <= 1.0, "eh_efficiency", "must lie in (0, 1]");
  require(eh_time_fraction > 0.0 && eh_time_fraction < 1.0, "eh_time_fraction", "must lie in (0, 1)");
  require(positive(target_rate), "target_rate", "must be positive");
  require(positive(block_time), "block_time", "must be positive");
}

DerivedConstants derive_constants(const SystemConfig& cfg) {
  cfg.validate();
  const double eta = cfg.eh_time_fraction;
  DerivedConstants dc{};
  dc.kappa = cfg.eh_efficiency * eta / (1.0 - eta);
  dc.nu = std::exp2(cfg.target_rate / (1.0 - eta)) - 1.0;
  dc.lambda1 = fading::power_lambda(cfg.hop1_fading);
  dc.lambda2 = fading::power_lambda(cfg.hop2_fading);
  dc.lambda3 = fading::power_lambda(cfg.lbi_fading);
  dc.pathloss_product = std::pow(cfg.hop1_distance, cfg.hop1_pathloss) *
                        std::pow(cfg.hop2_distance, cfg.hop2_pathloss);
  dc.beta1 = cfg.source_power;
  dc.beta2 = dc.kappa * cfg.source_power;
  dc.beta3 = dc.pathloss_product * cfg.relay_noise_var();
  dc.beta4 = dc.beta3 / dc.kappa;
  dc.noise_dest_var = cfg.noise_dest_var;
  return dc;
}

double harvested_energy(const SystemConfig& cfg, double h1) {
  return cfg.eh_efficiency * cfg.eh_time_fraction * cfg.block_time * hop1_gain(cfg, h1);
}

double relay_power(const SystemConfig& cfg, double h1) {
  return harvested_energy(cfg, h1) / ((1.0 - cfg.eh_time_fraction) * cfg.block_time);
}

double snr_df_relay(const SystemConfig& cfg, const ChannelDraw& draw) {
  const double kappa = cfg.eh_efficiency * cfg.eh_time_fraction / (1.0 - cfg.eh_time_fraction);
  return 1.0 / (kappa * draw.h3 * draw.h3);
}

double snr_df_dest(const SystemConfig& cfg, const ChannelDraw& draw) {
  return relay_power(cfg, draw.h1) * draw.h2 * draw.h2 /
         (std::pow(cfg.hop2_distance, cfg.hop2_pathloss) * cfg.noise_dest_var);
}

double snr_af_dest(const SystemConfig& cfg, const ChannelDraw& draw) {
  const DerivedConstants dc = derive_constants(cfg);
  const double z = draw.h1 * draw.h1 * draw.h2 * draw.h2;
  return snr_af(dc, z, draw.h3 * draw.h3);
}

double snr_af_dest_expanded(const SystemConfig& cfg, const ChannelDraw& draw) {
  const double p_r = relay_power(cfg, draw.h1);
  const double l1 = std::pow(cfg.hop1_distance, cfg.hop1_pathloss);
  const double l2 = std::pow(cfg.hop2_distance, cfg.hop2_pathloss);
  const double sigma_r2 = cfg.relay_noise_var();
  const double h1s = draw.h1 * draw.h1;
  const double h2s = draw.h2 * draw.h2;
  const double h3s = draw.h3 * draw.h3;
  const double denom = p_r * l1 * h2s * h3s + cfg.source_power * l2 * h1s * sigma_r2 / p_r +
                       h3s * l1 * l2 * sigma_r2;
  return cfg.source_power * h1s * h2s / denom;
}

double capacity(const SystemConfig& cfg, double gamma_eff) {
  if (!(gamma_eff >= 0.0)) throw DomainError("capacity: SNR must be nonnegative");
  return (1.0 - cfg.eh_time_fraction) * std::log2(1.0 + gamma_eff);
}

}  // namespace fdrelay::relaysys
