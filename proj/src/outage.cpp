#include "fdrelay/outage.hpp"

#include <algorithm>
#include <cmath>

#include "fdrelay/errors.hpp"
#include "fdrelay/fading.hpp"

namespace fdrelay::outage {

namespace {

using relaysys::DerivedConstants;
using relaysys::SystemConfig;

fading::ProductDistParams product_params(const SystemConfig& cfg) {
  fading::ProductDistParams pp{cfg.hop1_fading, cfg.hop2_fading};
  pp.validate();
  return pp;
}

quad::Settings to_quad(const QuadratureSettings& q) {
  return {q.abs_tol, q.rel_tol, q.max_subdivisions};
}

// F_Z (or 1 - F_Z with `survival`) at the AF threshold, tracking the worst
// error seen.
struct AfCdf {
  fading::ProductDistParams pp;
  DerivedConstants dc;
  bool survival = false;
  double worst_error = 0.0;

  // u = 1 - kappa nu v, passed separately to keep precision near the endpoint.
  double operator()(double v, double u) {
    const double arg = u > 0.0 ? dc.nu * (dc.beta3 * v + dc.beta4) / (dc.beta1 * u) : INFINITY;
    const auto est = survival ? fading::ccdf_product_estimate(pp, arg)
                              : fading::cdf_product_estimate(pp, arg);
    worst_error = std::max(worst_error, est.abs_error);
    return est.value;
  }
};

quad::Result endpoint_integral(const SystemConfig& cfg, const DerivedConstants& dc, double u_max,
                               AfCdf* cdf, const quad::Settings& s) {
  const double kn = dc.kappa * dc.nu;
  // u = e^{-s}; dv = u ds / (kappa nu).
  auto integrand = [&](double t) {
    const double u = std::exp(-t);
    if (u == 0.0) return 0.0;
    const double v = (1.0 - u) / kn;
    const double f_v = fading::pdf_power(cfg.lbi_fading, v);
    const double f_z = cdf ? (*cdf)(v, u) : 1.0;
    return f_z * f_v * u / kn;
  };
  return quad::integrate_to_infinity(integrand, -std::log(u_max), s);
}

// Mass of F_Z f_V over v in (0, v_end], through the gamma variable of V:
// t = lambda3 v^{alpha3/2}, tau = t^{mu3}.
quad::Result head_integral(const SystemConfig& cfg, const DerivedConstants& dc, double v_end,
                           AfCdf& cdf, const quad::Settings& s) {
  const auto& lbi = cfg.lbi_fading;
  const double mu3 = lbi.mu;
  const double kn = dc.kappa * dc.nu;
  const double t_end = dc.lambda3 * std::pow(v_end, 0.5 * lbi.alpha);
  const double norm = std::exp(specfun::ln_gamma(mu3 + 1.0));
  auto integrand = [&](double tau) {
    const double t = std::pow(tau, 1.0 / mu3);
    const double v = std::pow(t / dc.lambda3, 2.0 / lbi.alpha);
    return cdf(v, 1.0 - kn * v) * std::exp(-t) / norm;
  };
  return quad::integrate(integrand, 0.0, std::pow(t_end, mu3), s);
}

}  // namespace

void QuadratureSettings::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw DomainError("quadrature: tolerances must be positive");
  if (max_subdivisions < 10) throw DomainError("quadrature: max_subdivisions must be at least 10");
}

OutageResult outage_df(const SystemConfig& cfg) {
  const DerivedConstants dc = relaysys::derive_constants(cfg);
  const auto pp = product_params(cfg);
  const double v_max = 1.0 / (dc.kappa * dc.nu);
  const double threshold = dc.nu * dc.pathloss_product * dc.noise_dest_var / (dc.kappa * cfg.source_power);
  const double q_v = fading::ccdf_power(cfg.lbi_fading, v_max);
  const double f_v = fading::cdf_power(cfg.lbi_fading, v_max);
  const auto f_z = fading::cdf_product_estimate(pp, threshold);
  const auto s_z = fading::ccdf_product_estimate(pp, threshold);
  OutageResult r;
  r.method = Method::df_analytic;
  // Sum the small side so values near 0 and near 1 both keep their digits.
  const double complement = f_v * s_z.value;
  r.value = complement <= 0.5 ? 1.0 - complement : q_v + f_v * f_z.value;
  r.value = std::clamp(r.value, 0.0, 1.0);
  r.numeric_error = f_v * std::max(f_z.abs_error, s_z.abs_error) + 1e-15;
  return r;
}

OutageResult outage_af(const SystemConfig& cfg, const QuadratureSettings& q) {
  q.validate();
  const DerivedConstants dc = relaysys::derive_constants(cfg);
  // AF outage is at least the DF one; past one half, integrate the
  // complement 1 - P = int (1 - F_Z) f_V dv to avoid cancellation near 1.
  const bool survival = outage_df(cfg).value > 0.5;
  AfCdf cdf{product_params(cfg), dc, survival};
  const double v_max = 1.0 / (dc.kappa * dc.nu);
  const quad::Settings s = to_quad(q);

  quad::Result total = head_integral(cfg, dc, 0.5 * v_max, cdf, s);
  total += endpoint_integral(cfg, dc, 0.5, &cdf, s);

  OutageResult r;
  r.method = Method::af_analytic;
  r.value = survival ? 1.0 - total.value
                     : fading::ccdf_power(cfg.lbi_fading, v_max) + total.value;
  r.value = std::clamp(r.value, 0.0, 1.0);
  r.numeric_error = total.abs_error + cdf.worst_error;
  r.converged = total.converged;
  return r;
}

OutageResult outage_high_snr(const SystemConfig& cfg) {
  const DerivedConstants dc = relaysys::derive_constants(cfg);
  OutageResult r;
  r.method = Method::high_snr;
  r.value = fading::ccdf_power(cfg.lbi_fading, 1.0 / (dc.kappa * dc.nu));
  r.numeric_error = 1e-15;
  return r;
}

namespace detail {

quad::Result af_endpoint_integral(const SystemConfig& cfg, double u_max, bool with_cdf,
                                  const QuadratureSettings& q) {
  q.validate();
  if (!(u_max > 0.0) || u_max > 1.0) throw DomainError("af_endpoint_integral: u_max must lie in (0, 1]");
  const DerivedConstants dc = relaysys::derive_constants(cfg);
  AfCdf cdf{product_params(cfg), dc};
  return endpoint_integral(cfg, dc, u_max, with_cdf ? &cdf : nullptr, to_quad(q));
}

}  // namespace detail

}  // namespace fdrelay::outage
