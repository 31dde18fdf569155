#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>

#include "fdrelay/errors.hpp"
#include "fdrelay/quadrature.hpp"
#include "fdrelay/specfun.hpp"

// G^{2,1}_{1,3}(w | 1 ; mu1, mu2 ; 0) is the "unit product" function: it equals
// Gamma(mu1) Gamma(mu2) times the CDF of the product of two independent
// unit-scale gamma variates with shapes mu1 and mu2. Its Mellin-Barnes
// integrand is Gamma(mu1 - s) Gamma(mu2 - s) w^s / s.

namespace fdrelay::specfun {

namespace {

using cplx = std::complex<double>;

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

// Residue series are used up to this argument; beyond it the two growing
// series cancel too strongly.
constexpr double kSeriesMaxArg = 16.0;
// mu1 - mu2 closer than this to an integer is treated as exactly integer.
constexpr double kIntegerTol = 1e-12;
// Between kIntegerTol and this gap the generic series loses too many digits.
constexpr double kNearIntegerGap = 1e-3;
// Contour integrals whose peak sits this far (in log) below the constant
// residue contribute nothing representable.
constexpr double kSaturationLog = -50.0;

// ln of the smallest subnormal double.
constexpr double kUnderflowLog = -745.2;

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string format_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

MeijerEstimate failed(MeijerMethod m) { return {0.0, kInf, m}; }

// One term of the generic residue expansion:
//   Gamma(mb - ma) / ma * w^ma * 1F2(ma ; 1 + ma - mb, 1 + ma ; w).
struct ResidueBranch {
  double log_abs;
  double log_abs_sum;  // same prefactor times the sum of |series terms|
  int sign;
};

ResidueBranch residue_branch(double ma, double mb, double w, double ln_w) {
  const double g = std::tgamma(mb - ma);
  double term = 1.0;
  double sum = 1.0;
  double abs_sum = 1.0;
  for (int k = 0; k < 10000; ++k) {
    term *= (ma + k) * w / ((1.0 + ma - mb + k) * (1.0 + ma + k) * (k + 1.0));
    sum += term;
    abs_sum += std::abs(term);
    if (k > w && std::abs(term) < kEps * std::abs(sum)) break;
  }
  const double prefix = std::log(std::abs(g)) - std::log(ma) + ma * ln_w;
  const int sign = (g < 0) != (sum < 0) ? -1 : 1;
  return {prefix + std::log(std::abs(sum)), prefix + std::log(abs_sum), sign};
}

MeijerEstimate generic_series(double mu1, double mu2, double w) {
  const double ln_w = std::log(w);
  const ResidueBranch t1 = residue_branch(mu1, mu2, w, ln_w);
  const ResidueBranch t2 = residue_branch(mu2, mu1, w, ln_w);
  const double top = std::max(t1.log_abs, t2.log_abs);
  const double combined =
      t1.sign * std::exp(t1.log_abs - top) + t2.sign * std::exp(t2.log_abs - top);
  if (!(combined > 0.0)) return failed(MeijerMethod::residue_series);
  const double roundoff =
      16.0 * kEps * (std::exp(t1.log_abs_sum - top) + std::exp(t2.log_abs_sum - top));
  return {top + std::log(combined), roundoff / combined, MeijerMethod::residue_series};
}

// mu1 = mu + n with integer n >= 0: the poles of the two gamma factors merge
// from s = mu + n on and the residues pick up logarithms.
MeijerEstimate confluent_series(double mu, int n, double w) {
  const double ln_w = std::log(w);
  double bracket = 0.0;
  double abs_sum = 0.0;

  // Simple poles s = mu + k, k < n.
  double inv_fact_k = 1.0;  // 1/k!
  for (int k = 0; k < n; ++k) {
    if (k > 0) inv_fact_k /= k;
    const double term = (k % 2 == 0 ? 1.0 : -1.0) * std::tgamma(n - k) * inv_fact_k *
                        std::pow(w, k) / (mu + k);
    bracket += term;
    abs_sum += std::abs(term);
  }

  // Double poles s = mu + n + j.
  // coef = w^{n+j} / ((n+j)! j!), psi(m+1) = -gamma + H_m.
  double coef = std::exp(n * ln_w - ln_gamma(n + 1.0));
  double harmonic_nj = 0.0;  // H_{n+j}
  for (int m = 1; m <= n; ++m) harmonic_nj += 1.0 / m;
  double harmonic_j = 0.0;  // H_j
  const double sign = (n % 2 == 0) ? -1.0 : 1.0;  // (-1)^{n+1}
  for (int j = 0; j < 10000; ++j) {
    if (j > 0) {
      coef *= w / ((n + j) * static_cast<double>(j));
      harmonic_nj += 1.0 / (n + j);
      harmonic_j += 1.0 / j;
    }
    const double denom = mu + n + j;
    const double psi_sum = -2.0 * kEulerGamma + harmonic_nj + harmonic_j;
    const double term = sign * coef / denom * (ln_w - 1.0 / denom - psi_sum);
    bracket += term;
    abs_sum += std::abs(term);
    if (j > w && std::abs(term) < kEps * std::abs(bracket)) break;
  }
  if (!(bracket > 0.0)) return failed(MeijerMethod::confluent_series);
  return {mu * ln_w + std::log(bracket), 16.0 * kEps * abs_sum / bracket,
          MeijerMethod::confluent_series};
}

template <class F>
double golden_min(F&& f, double lo, double hi) {
  constexpr double kInvPhi = 0.61803398874989484820;
  double a = lo;
  double b = hi;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int i = 0; i < 80; ++i) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

struct LineIntegral {
  double scaled;        // (1/2 pi i) * integral along the line, over exp(log_scale)
  double scaled_error;
  double log_scale;
  bool converged;

  double value() const { return scaled * std::exp(log_scale); }
  double abs_error() const { return scaled_error * std::exp(log_scale); }
};

// Integrates a conjugate-symmetric Mellin-Barnes integrand, given by its
// complex logarithm, along Re s = c:
//   (1 / 2 pi i) int f(s) ds = (1 / pi) int_0^inf Re f(c + i t) dt.
// The abscissa should be a saddle of |f| on the real axis so that the
// integrand peaks at t = 0 and barely oscillates.
template <class LogF>
LineIntegral mellin_barnes_line(LogF&& log_f, double c, const Accuracy& acc) {
  const double peak = log_f(cplx(c, 0.0)).real();
  double reach = 1.0;
  while (log_f(cplx(c, reach)).real() - peak > -48.0 && reach < 1e7) reach *= 2.0;
  auto scaled = [&](double t) { return std::exp(log_f(cplx(c, t)) - peak).real(); };
  quad::Settings s;
  s.abs_tol = 1e-16;
  s.rel_tol = std::min(1e-13, 1e-3 * acc.rel_tol);
  s.max_subdivisions = 400;
  const quad::Result r = quad::integrate(scaled, 0.0, reach, s);
  return {r.value / std::numbers::pi, (r.abs_error + 1e-16) / std::numbers::pi, peak, r.converged};
}

// Saddle abscissae of the unit-product integrand in both strips.
//   Strip A: 0 < c < mu_min, the line integral is G itself.
//   Strip B: c < 0, past the pole of 1/s whose residue is Gamma(mu1) Gamma(mu2),
//   so the line integral is G - Gamma(mu1) Gamma(mu2).
struct UnitContour {
  double mu1, mu2, ln_w, log_gg;
  double c_a, c_b, phi_a, phi_b;

  UnitContour(double m1, double m2, double w)
      : mu1(m1), mu2(m2), ln_w(std::log(w)), log_gg(ln_gamma(m1) + ln_gamma(m2)) {
    const double mu_min = std::min(mu1, mu2);
    auto phi = [this](double c) { return this->phi(c); };
    const double edge = 1e-9 * mu_min;
    c_a = golden_min(phi, edge, mu_min - edge);
    const double reach_b = 2.0 * std::sqrt(w) + 2.0 * (mu1 + mu2) + 10.0;
    c_b = golden_min(phi, -reach_b, -1e-9);
    phi_a = this->phi(c_a);
    phi_b = this->phi(c_b);
  }

  double phi(double c) const {
    return ln_gamma(mu1 - c) + ln_gamma(mu2 - c) + c * ln_w - std::log(std::abs(c));
  }

  LineIntegral line(double c, const Accuracy& acc) const {
    auto log_f = [this](cplx s) {
      return detail::ln_gamma(mu1 - s) + detail::ln_gamma(mu2 - s) + s * ln_w - std::log(s);
    };
    return mellin_barnes_line(log_f, c, acc);
  }

  bool prefers_b() const { return phi_b <= phi_a; }
};

}  // namespace

double MeijerEstimate::value() const { return std::exp(log_value); }

namespace detail {

MeijerEstimate unit_product_series(double mu1, double mu2, double w) {
  const double d = mu1 - mu2;
  const double nearest = std::round(d);
  const double gap = std::abs(d - nearest);
  if (gap <= kIntegerTol * std::max(1.0, std::abs(d))) {
    const int n = static_cast<int>(std::abs(nearest));
    return confluent_series(std::min(mu1, mu2), n, w);
  }
  if (gap < kNearIntegerGap) return failed(MeijerMethod::residue_series);
  return generic_series(mu1, mu2, w);
}

MeijerEstimate unit_product_contour(double mu1, double mu2, double w, const Accuracy& acc) {
  const UnitContour uc(mu1, mu2, w);
  if (uc.prefers_b()) {
    if (uc.phi_b - uc.log_gg < kSaturationLog) {
      return {uc.log_gg, std::exp(uc.phi_b - uc.log_gg), MeijerMethod::saturated};
    }
    const LineIntegral line = uc.line(uc.c_b, acc);
    const double ratio = line.value() / std::exp(uc.log_gg);
    if (!(ratio > -1.0)) return failed(MeijerMethod::contour);
    const double g = std::exp(uc.log_gg) + line.value();
    return {uc.log_gg + std::log1p(ratio), line.abs_error() / g, MeijerMethod::contour};
  }
  const LineIntegral line = uc.line(uc.c_a, acc);
  if (!(line.scaled > 0.0)) return failed(MeijerMethod::contour);
  return {std::log(line.scaled) + line.log_scale, line.scaled_error / line.scaled,
          MeijerMethod::contour};
}

}  // namespace detail

namespace {

MeijerEstimate unit_product(double mu1, double mu2, double w, const Accuracy& acc) {
  MeijerEstimate best = failed(MeijerMethod::residue_series);
  if (w <= kSeriesMaxArg) {
    best = detail::unit_product_series(mu1, mu2, w);
    if (best.rel_error <= 0.01 * acc.rel_tol) return best;
  }
  const MeijerEstimate contour = detail::unit_product_contour(mu1, mu2, w, acc);
  return contour.rel_error < best.rel_error ? contour : best;
}

void require_finite(std::initializer_list<double> values, const char* who) {
  for (double v : values) {
    if (!std::isfinite(v)) throw DomainError(std::string(who) + ": non-finite parameter");
  }
}

}  // namespace

MeijerEstimate meijer_g_2131_estimate(double a1, const std::array<double, 3>& b, double x,
                                      const Accuracy& acc) {
  acc.validate();
  require_finite({a1, b[0], b[1], b[2]}, "meijer_g_2131");
  if (!(x > 0.0) || std::isinf(x)) throw DomainError("meijer_g_2131: x must be positive");
  if (std::abs(b[2] - (a1 - 1.0)) > 1e-12 * (1.0 + std::abs(a1))) {
    throw DomainError("meijer_g_2131: only b3 = a1 - 1 is supported");
  }
  // Shift to a1 = 1: G(x | a1; b) = x^{a1-1} G(x | 1; b + 1 - a1).
  const double mu1 = b[0] - a1 + 1.0;
  const double mu2 = b[1] - a1 + 1.0;
  if (!(mu1 > 0.0) || !(mu2 > 0.0)) {
    throw DomainError("meijer_g_2131: need b1, b2 > a1 - 1 (poles would not separate)");
  }
  MeijerEstimate est = unit_product(mu1, mu2, x, acc);
  est.log_value += (a1 - 1.0) * std::log(x);
  const double tol = std::max(acc.rel_tol, acc.abs_tol / est.value());
  if (!(est.rel_error <= tol)) {
    throw ConvergenceError("meijer_g_2131: accuracy target not reached", est.rel_error);
  }
  return est;
}

double meijer_g_2131(double a1, const std::array<double, 3>& b, double x, const Accuracy& acc) {
  return meijer_g_2131_estimate(a1, b, x, acc).value();
}

MeijerEstimate log_gamma_product_sf(double mu1, double mu2, double w, const Accuracy& acc) {
  acc.validate();
  require_finite({mu1, mu2, w}, "log_gamma_product_sf");
  if (!(mu1 > 0.0) || !(mu2 > 0.0)) throw DomainError("log_gamma_product_sf: shapes must be positive");
  if (!(w >= 0.0)) throw DomainError("log_gamma_product_sf: w must be nonnegative");
  if (w == 0.0) return {0.0, 0.0, MeijerMethod::residue_series};
  const UnitContour uc(mu1, mu2, w);
  MeijerEstimate est;
  if (uc.prefers_b() && uc.phi_b - uc.log_gg < kUnderflowLog) {
    // Below the smallest subnormal.
    return {-kInf, 0.0, MeijerMethod::saturated};
  }
  if (uc.prefers_b()) {
    // The strip-B line integral is minus the survival mass, no cancellation.
    const LineIntegral line = uc.line(uc.c_b, acc);
    if (!(line.scaled < 0.0)) {
      throw ConvergenceError("log_gamma_product_sf: contour lost all precision at w = " + format_g(w),
                           kInf);
    }
    est = {std::log(-line.scaled) + line.log_scale - uc.log_gg, line.scaled_error / -line.scaled,
           MeijerMethod::contour};
  } else {
    // The CDF is the smaller side here, so 1 - F is well conditioned.
    const MeijerEstimate lower = unit_product(mu1, mu2, w, acc);
    const double log_cdf = lower.log_value - uc.log_gg;
    const double cdf = std::exp(log_cdf);
    const double sf = -std::expm1(log_cdf);
    est = {std::log(sf), lower.rel_error * cdf / sf, lower.method};
  }
  if (!(est.rel_error <= acc.rel_tol)) {
    throw ConvergenceError("log_gamma_product_sf: accuracy target not reached at w = " + format_g(w),
                           est.rel_error);
  }
  return est;
}

double meijer_g_2002(double b1, double b2, double x, const Accuracy& acc) {
  acc.validate();
  require_finite({b1, b2}, "meijer_g_2002");
  if (!(x > 0.0) || std::isinf(x)) throw DomainError("meijer_g_2002: x must be positive");
  const double ln_x = std::log(x);
  const double b_min = std::min(b1, b2);
  auto log_f = [=](cplx s) { return detail::ln_gamma(b1 - s) + detail::ln_gamma(b2 - s) + s * ln_x; };
  auto phi = [=](double c) { return ln_gamma(b1 - c) + ln_gamma(b2 - c) + c * ln_x; };
  const double reach = 2.0 * std::sqrt(x) + std::abs(b1 - b2) + 20.0;
  const double c = golden_min(phi, b_min - reach, b_min - 1e-9);
  const LineIntegral line = mellin_barnes_line(log_f, c, acc);
  const double value = line.value();
  const double tol = std::max(acc.abs_tol, acc.rel_tol * std::abs(value));
  if (!line.converged || !(line.abs_error() <= tol)) {
    throw ConvergenceError("meijer_g_2002: accuracy target not reached",
                           line.abs_error() / std::abs(value));
  }
  return value;
}

}  // namespace fdrelay::specfun
