#pragma once

// Scalar special functions used by the analytic outage expressions.
//
// Everything here is pure and reentrant: no globals, no cached state.

#include <array>
#include <complex>

namespace fdrelay::specfun {

/// Target accuracy for an evaluation. A result is accepted when its error
/// estimate is below max(abs_tol, rel_tol * |value|).
struct Accuracy {
  double abs_tol = 1e-14;
  double rel_tol = 1e-10;

  void validate() const;
};

/// ln Gamma(x) for x > 0.
double ln_gamma(double x);

/// Regularized lower incomplete gamma P(s, x) = gamma_inc(s, x) / Gamma(s).
double reg_lower_gamma(double s, double x);

/// Regularized upper incomplete gamma Q(s, x) = 1 - P(s, x), computed without
/// cancellation when P is close to one.
double reg_upper_gamma(double s, double x);

/// Modified Bessel function of the second kind K_nu(x), real order, x > 0.
double bessel_k(double nu, double x);

/// exp(x) * K_nu(x). Stays representable where K_nu(x) itself underflows.
double bessel_k_scaled(double nu, double x);

/// ln K_nu(x), finite where K_nu(x) over- or underflows.
double log_bessel_k(double nu, double x);

enum class MeijerMethod { residue_series, confluent_series, contour, saturated };

struct MeijerEstimate {
  double log_value = 0.0;  ///< ln G; the supported parameter family has G > 0
  double rel_error = 0.0;  ///< estimated relative error of exp(log_value)
  MeijerMethod method = MeijerMethod::residue_series;

  double value() const;
};

/// G^{2,1}_{1,3}(x | a1 ; b[0], b[1] ; b[2]).
///
/// b[0] and b[1] enter the Mellin-Barnes integrand as Gamma(b - s) factors and
/// b[2] as 1/Gamma(1 - b[2] + s). Only the family with b[2] = a1 - 1 and
/// b[0], b[1] > a1 - 1 is supported; that family covers the CDF of a product
/// of two gamma variates. Anything else is a DomainError, including orderings
/// where a pole of Gamma(1 - a1 + s) coincides with a pole of Gamma(b - s).
///
/// Throws ConvergenceError (carrying the achieved estimate) when no method
/// reaches `acc`.
MeijerEstimate meijer_g_2131_estimate(double a1, const std::array<double, 3>& b, double x,
                                      const Accuracy& acc = {});
double meijer_g_2131(double a1, const std::array<double, 3>& b, double x,
                     const Accuracy& acc = {});

/// ln Pr(G1 G2 > w) for independent unit-scale gamma variates with shapes
/// mu1 and mu2: the complement of the G^{2,1}_{1,3} CDF above, computed
/// without cancellation when the CDF is close to one.
MeijerEstimate log_gamma_product_sf(double mu1, double mu2, double w, const Accuracy& acc = {});

/// G^{2,0}_{0,2}(x | b1, b2) by Mellin-Barnes line integration. Shares the
/// contour kernel with meijer_g_2131 and exists mainly so that kernel can be
/// checked against 2 x^{(b1+b2)/2} K_{b1-b2}(2 sqrt(x)).
double meijer_g_2002(double b1, double b2, double x, const Accuracy& acc = {});

namespace detail {

/// ln Gamma(z) for Re z > 0, any branch (only exp() of it is meaningful).
std::complex<double> ln_gamma(std::complex<double> z);

struct BesselKPair {
  double k_mu;   ///< K_mu(x)
  double k_mu1;  ///< K_{mu+1}(x)
};

/// Temme's series, |mu| <= 1/2. Unscaled. Accurate for x up to a few units.
BesselKPair bessel_k_temme(double mu, double x);

/// Steed's continued fraction, |mu| <= 1/2. Returns exp(x)-scaled values.
/// Converges for all x > 0 but slowly below x ~ 1.
BesselKPair bessel_k_steed_scaled(double mu, double x);

/// Residue-series evaluation of G^{2,1}_{1,3}(w | 1 ; mu1, mu2 ; 0). Picks the
/// confluent (logarithmic) form when mu1 - mu2 is an integer.
MeijerEstimate unit_product_series(double mu1, double mu2, double w);

/// Same function by numerical Mellin-Barnes integration along a vertical line
/// placed at the saddle point of the integrand.
MeijerEstimate unit_product_contour(double mu1, double mu2, double w, const Accuracy& acc);

}  // namespace detail

}  // namespace fdrelay::specfun
