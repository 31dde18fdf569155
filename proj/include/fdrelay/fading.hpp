#pragma once

// The alpha-mu family: envelope h, power X = h^2, and the product Z = X1 X2
// of two independent powers.
//
// With lambda = mu / r_hat^alpha, the variate lambda * X^{alpha/2} is a unit
// gamma with shape mu. Everything below is built on that fact.

#include <cmath>
#include <random>

#include "fdrelay/specfun.hpp"

namespace fdrelay::fading {

struct AlphaMuParams {
  double alpha = 2.0;
  double mu = 1.0;     ///< >= 1/2
  double r_hat = 1.0;  ///< alpha-root mean value of the envelope

  void validate() const;
};

/// Rate of the squared envelope, mu / r_hat^alpha.
struct PowerLambda {
  double lambda;

  explicit PowerLambda(const AlphaMuParams& p);
};

inline double power_lambda(const AlphaMuParams& p) { return PowerLambda(p).lambda; }

struct ProductDistParams {
  AlphaMuParams hop1;
  AlphaMuParams hop2;

  /// Throws AlphaMismatchError when the exponents differ.
  void validate() const;
};

double pdf_envelope(const AlphaMuParams& p, double r);
double cdf_envelope(const AlphaMuParams& p, double r);
double pdf_power(const AlphaMuParams& p, double x);
double cdf_power(const AlphaMuParams& p, double x);

/// Complementary CDF of the power, without cancellation near 1.
double ccdf_power(const AlphaMuParams& p, double x);

/// Density of Z = X1 X2 (Bessel-K form), equal alphas only.
double pdf_product(const ProductDistParams& pp, double z);

enum class ProductRoute { meijer, quadrature };

struct CdfEstimate {
  double value = 0.0;
  double abs_error = 0.0;
};

/// CDF of Z = X1 X2 with an error estimate. `meijer` evaluates the
/// G^{2,1}_{1,3} closed form, `quadrature` integrates pdf_product.
CdfEstimate cdf_product_estimate(const ProductDistParams& pp, double z,
                                 ProductRoute route = ProductRoute::meijer,
                                 const specfun::Accuracy& acc = {});
double cdf_product(const ProductDistParams& pp, double z, ProductRoute route = ProductRoute::meijer);

/// 1 - CDF of Z, accurate in relative terms deep into the upper tail.
CdfEstimate ccdf_product_estimate(const ProductDistParams& pp, double z,
                                  ProductRoute route = ProductRoute::meijer,
                                  const specfun::Accuracy& acc = {});

/// CDF of Z for arbitrary exponents, E[F_X2(z / X1)] by quadrature.
CdfEstimate cdf_product_generic(const ProductDistParams& pp, double z);

/// Draws envelopes as r_hat (g / mu)^{1/alpha}, g ~ Gamma(mu, 1).
class EnvelopeSampler {
 public:
  explicit EnvelopeSampler(const AlphaMuParams& p);

  template <class Rng>
  double envelope(Rng& rng) {
    return r_hat_ * std::pow(gamma_(rng) / mu_, inv_alpha_);
  }

  /// Squared envelope, drawn directly so no precision is lost to squaring.
  template <class Rng>
  double power(Rng& rng) {
    return r_hat_ * r_hat_ * std::pow(gamma_(rng) / mu_, 2.0 * inv_alpha_);
  }

 private:
  std::gamma_distribution<double> gamma_;
  double mu_;
  double inv_alpha_;
  double r_hat_;
};

template <class Rng>
double sample_envelope(const AlphaMuParams& p, Rng& rng) {
  return EnvelopeSampler(p).envelope(rng);
}

}  // namespace fdrelay::fading
