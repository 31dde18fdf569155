#pragma once

// Analytic outage probability: DF closed form, AF single integral, and the
// common high-SNR asymptote.

#include "fdrelay/quadrature.hpp"
#include "fdrelay/relaysys.hpp"

namespace fdrelay::outage {

enum class Method { df_analytic, af_analytic, high_snr };

struct OutageResult {
  double value = 0.0;
  Method method = Method::df_analytic;
  double numeric_error = 0.0;
  bool converged = true;  ///< false when the quadrature ran out of budget
};

struct QuadratureSettings {
  double abs_tol = 1e-9;
  double rel_tol = 1e-7;
  int max_subdivisions = 2000;

  void validate() const;
};

/// 1 - F_V(1 / (kappa nu)) (1 - F_Z(nu d1^m1 d2^m2 sigma_D^2 / (kappa P_S))).
OutageResult outage_df(const relaysys::SystemConfig& cfg);

/// Pr(V > 1/(kappa nu)) + int_0^{1/(kappa nu)} F_Z(nu (beta3 v + beta4) /
/// (beta1 - beta2 nu v)) f_V(v) dv. Never throws on quadrature exhaustion;
/// the result carries converged = false instead.
OutageResult outage_af(const relaysys::SystemConfig& cfg, const QuadratureSettings& q = {});

/// 1 - P(mu3, lambda3 (kappa nu)^{-alpha3/2}).
OutageResult outage_high_snr(const relaysys::SystemConfig& cfg);

namespace detail {

/// The part of the AF integral with 1 - kappa nu v in (0, u_max], computed
/// through the same substitution outage_af uses near the endpoint. With
/// `with_cdf` false the F_Z factor is replaced by 1, leaving the F_V mass.
quad::Result af_endpoint_integral(const relaysys::SystemConfig& cfg, double u_max, bool with_cdf,
                                  const QuadratureSettings& q = {});

}  // namespace detail

}  // namespace fdrelay::outage
