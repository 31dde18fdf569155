#include "fdrelay/fading.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fdrelay/errors.hpp"
#include "fdrelay/quadrature.hpp"

namespace fdrelay::fading {

namespace {

using specfun::ln_gamma;

void require_positive(double v, const char* who) {
  if (!(v > 0.0) || std::isinf(v)) throw DomainError(std::string(who) + ": argument must be positive");
}

void require_nonnegative(double v, const char* who) {
  if (!(v >= 0.0)) throw DomainError(std::string(who) + ": argument must be nonnegative");
}

// ln of the unit-product argument w = lambda1 lambda2 z^{alpha/2}.
double log_product_arg(const ProductDistParams& pp, double z) {
  return std::log(power_lambda(pp.hop1)) + std::log(power_lambda(pp.hop2)) +
         0.5 * pp.hop1.alpha * std::log(z);
}

quad::Settings tight_settings() {
  quad::Settings s;
  s.abs_tol = 1e-14;
  s.rel_tol = 1e-11;
  s.max_subdivisions = 2000;
  return s;
}

// Integrates the density in y = ln z, where both power-law ends become
// exponential decay, over whichever side of z holds less mass. Returns the
// CDF (upper = false) or its complement.
CdfEstimate product_by_quadrature(const ProductDistParams& pp, double z, bool upper) {
  auto g = [&pp](double y) {
    const double z_y = std::exp(y);
    if (!(z_y > 0.0) || std::isinf(z_y)) return 0.0;
    return pdf_product(pp, z_y) * z_y;
  };
  const double log_z = std::log(z);
  const double w = std::exp(log_product_arg(pp, z));
  const bool lower_side = w <= pp.hop1.mu * pp.hop2.mu;
  auto tail = [&](double s) { return g(lower_side ? log_z - s : log_z + s); };
  const quad::Result r = quad::integrate_to_infinity(tail, 0.0, tight_settings());
  if (!r.converged) {
    throw ConvergenceError("cdf_product: quadrature did not converge", r.abs_error);
  }
  const double value = (lower_side != upper) ? r.value : 1.0 - r.value;
  return {std::clamp(value, 0.0, 1.0), r.abs_error + 4.0 * std::numeric_limits<double>::epsilon()};
}

CdfEstimate cdf_product_by_meijer(const ProductDistParams& pp, double z,
                                  const specfun::Accuracy& acc) {
  const double mu1 = pp.hop1.mu;
  const double mu2 = pp.hop2.mu;
  const double sigma = mu1 + mu2;
  const double delta = mu1 - mu2;
  const double log_w = log_product_arg(pp, z);
  const double w = std::exp(log_w);
  if (w == 0.0) return {0.0, 0.0};
  if (std::isinf(w)) return {1.0, 0.0};
  const auto est = specfun::meijer_g_2131_estimate(
      1.0 - sigma / 2.0, {delta / 2.0, -delta / 2.0, -sigma / 2.0}, w, acc);
  const double log_f = 0.5 * sigma * log_w + est.log_value - ln_gamma(mu1) - ln_gamma(mu2);
  const double value = std::exp(log_f);
  // Assembly roundoff grows with the size of the logs being cancelled.
  const double assembly = 8.0 * std::numeric_limits<double>::epsilon() *
                          (1.0 + std::abs(0.5 * sigma * log_w) + std::abs(est.log_value));
  return {std::clamp(value, 0.0, 1.0), value * (est.rel_error + assembly)};
}

}  // namespace

void AlphaMuParams::validate() const {
  if (!(alpha > 0.0) || std::isinf(alpha)) throw DomainError("alpha-mu: alpha must be positive");
  if (!(mu >= 0.5) || std::isinf(mu)) throw DomainError("alpha-mu: mu must be at least 1/2");
  if (!(r_hat > 0.0) || std::isinf(r_hat)) throw DomainError("alpha-mu: r_hat must be positive");
}

PowerLambda::PowerLambda(const AlphaMuParams& p) {
  p.validate();
  lambda = p.mu / std::pow(p.r_hat, p.alpha);
}

void ProductDistParams::validate() const {
  hop1.validate();
  hop2.validate();
  if (hop1.alpha != hop2.alpha) {
    throw AlphaMismatchError("product distribution: hop alphas differ");
  }
}

double pdf_envelope(const AlphaMuParams& p, double r) {
  p.validate();
  require_positive(r, "pdf_envelope");
  const double log_ratio = std::log(r / p.r_hat);
  const double t = p.mu * std::exp(p.alpha * log_ratio);
  const double log_pdf = std::log(p.alpha) + p.mu * std::log(p.mu) +
                         (p.alpha * p.mu - 1.0) * std::log(r) - p.alpha * p.mu * std::log(p.r_hat) -
                         ln_gamma(p.mu) - t;
  return std::exp(log_pdf);
}

double cdf_envelope(const AlphaMuParams& p, double r) {
  p.validate();
  require_nonnegative(r, "cdf_envelope");
  if (std::isinf(r)) return 1.0;
  return specfun::reg_lower_gamma(p.mu, p.mu * std::pow(r / p.r_hat, p.alpha));
}

double pdf_power(const AlphaMuParams& p, double x) {
  require_positive(x, "pdf_power");
  const double lambda = power_lambda(p);
  const double half_alpha = 0.5 * p.alpha;
  const double log_pdf = std::log(half_alpha) + p.mu * std::log(lambda) +
                         (half_alpha * p.mu - 1.0) * std::log(x) -
                         lambda * std::pow(x, half_alpha) - ln_gamma(p.mu);
  return std::exp(log_pdf);
}

double cdf_power(const AlphaMuParams& p, double x) {
  require_nonnegative(x, "cdf_power");
  return cdf_envelope(p, std::sqrt(x));
}

double ccdf_power(const AlphaMuParams& p, double x) {
  p.validate();
  require_nonnegative(x, "ccdf_power");
  if (std::isinf(x)) return 0.0;
  return specfun::reg_upper_gamma(p.mu, p.mu * std::pow(std::sqrt(x) / p.r_hat, p.alpha));
}

double pdf_product(const ProductDistParams& pp, double z) {
  pp.validate();
  require_positive(z, "pdf_product");
  const double alpha = pp.hop1.alpha;
  const double mu1 = pp.hop1.mu;
  const double mu2 = pp.hop2.mu;
  const double sigma = mu1 + mu2;
  const double log_l12 = std::log(power_lambda(pp.hop1)) + std::log(power_lambda(pp.hop2));
  const double y = 2.0 * std::exp(0.5 * (log_l12 + 0.5 * alpha * std::log(z)));
  // y underflows only for z far below any meaningful threshold.
  if (y == 0.0 || std::isinf(y)) return 0.0;
  const double log_pdf = std::log(alpha) + 0.5 * sigma * log_l12 +
                         (0.25 * alpha * sigma - 1.0) * std::log(z) +
                         specfun::log_bessel_k(mu1 - mu2, y) - ln_gamma(mu1) -
                         ln_gamma(mu2);
  return std::exp(log_pdf);
}

CdfEstimate cdf_product_estimate(const ProductDistParams& pp, double z, ProductRoute route,
                                 const specfun::Accuracy& acc) {
  pp.validate();
  require_nonnegative(z, "cdf_product");
  if (z == 0.0) return {0.0, 0.0};
  if (std::isinf(z)) return {1.0, 0.0};
  return route == ProductRoute::meijer ? cdf_product_by_meijer(pp, z, acc)
                                       : product_by_quadrature(pp, z, false);
}

double cdf_product(const ProductDistParams& pp, double z, ProductRoute route) {
  return cdf_product_estimate(pp, z, route).value;
}

CdfEstimate ccdf_product_estimate(const ProductDistParams& pp, double z, ProductRoute route,
                                  const specfun::Accuracy& acc) {
  pp.validate();
  require_nonnegative(z, "ccdf_product");
  if (z == 0.0) return {1.0, 0.0};
  if (std::isinf(z)) return {0.0, 0.0};
  if (route == ProductRoute::quadrature) return product_by_quadrature(pp, z, true);
  const double w = std::exp(log_product_arg(pp, z));
  if (w == 0.0) return {1.0, 0.0};
  if (std::isinf(w)) return {0.0, 0.0};
  const auto est = specfun::log_gamma_product_sf(pp.hop1.mu, pp.hop2.mu, w, acc);
  const double value = std::exp(est.log_value);
  return {std::clamp(value, 0.0, 1.0), value * est.rel_error + 1e-300};
}

CdfEstimate cdf_product_generic(const ProductDistParams& pp, double z) {
  pp.hop1.validate();
  pp.hop2.validate();
  require_nonnegative(z, "cdf_product_generic");
  if (z == 0.0) return {0.0, 0.0};
  if (std::isinf(z)) return {1.0, 0.0};
  const double mu1 = pp.hop1.mu;
  const double mu2 = pp.hop2.mu;
  const double log_l1 = std::log(power_lambda(pp.hop1));
  const double ratio = pp.hop2.alpha / pp.hop1.alpha;
  const double log_base = std::log(power_lambda(pp.hop2)) + 0.5 * pp.hop2.alpha * std::log(z);
  // X1 = (g / lambda1)^{2 / alpha1} with g ~ Gamma(mu1, 1).
  auto cdf_y_given = [=](double g) {
    const double log_arg = log_base + ratio * (log_l1 - std::log(g));
    if (log_arg > 700.0) return 1.0;
    return specfun::reg_lower_gamma(mu2, std::exp(log_arg));
  };
  // g in (0, 1] through g = tau^{1/mu1}, which absorbs g^{mu1 - 1}.
  auto head = [=](double tau) {
    if (tau == 0.0) return 1.0;
    const double g = std::pow(tau, 1.0 / mu1);
    return std::exp(-g) * cdf_y_given(g);
  };
  auto tail = [=](double g) {
    const double log_w = (mu1 - 1.0) * std::log(g) - g;
    if (log_w < -745.0) return 0.0;
    return std::exp(log_w) * cdf_y_given(g);
  };
  const quad::Settings s = tight_settings();
  quad::Result a = quad::integrate(head, 0.0, 1.0, s);
  const quad::Result b = quad::integrate_to_infinity(tail, 1.0, s);
  a.value /= std::exp(ln_gamma(mu1 + 1.0));
  a.abs_error /= std::exp(ln_gamma(mu1 + 1.0));
  const double gamma_mu1 = std::exp(ln_gamma(mu1));
  a += quad::Result{b.value / gamma_mu1, b.abs_error / gamma_mu1, b.subdivisions, b.converged};
  if (!a.converged) throw ConvergenceError("cdf_product_generic: quadrature did not converge", a.abs_error);
  return {std::clamp(a.value, 0.0, 1.0), a.abs_error};
}

EnvelopeSampler::EnvelopeSampler(const AlphaMuParams& p)
    : gamma_((p.validate(), p.mu), 1.0), mu_(p.mu), inv_alpha_(1.0 / p.alpha), r_hat_(p.r_hat) {}

}  // namespace fdrelay::fading
