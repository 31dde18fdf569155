#pragma once

// Globally adaptive 21-point Gauss-Kronrod quadrature with QUADPACK-style
// error estimation. Header-only so integrands inline.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace fdrelay::quad {

struct Settings {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_subdivisions = 2000;
};

struct Result {
  double value = 0.0;
  double abs_error = 0.0;
  int subdivisions = 0;
  bool converged = true;

  Result& operator+=(const Result& o) {
    value += o.value;
    abs_error += o.abs_error;
    subdivisions += o.subdivisions;
    converged = converged && o.converged;
    return *this;
  }
};

namespace detail {

// Kronrod abscissae on [-1, 1], descending; odd indices are the 10-point
// Gauss nodes.
inline constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};

inline constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077800534357653, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

inline constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment gk21(F& f, double a, double b) {
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  constexpr double kTiny = std::numeric_limits<double>::min();
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double abs_half = std::abs(half);

  std::array<double, 10> f1{}, f2{};
  const double fc = f(center);
  double resg = 0.0;
  double resk = kWgk[10] * fc;
  double resabs = std::abs(resk);
  for (int j = 0; j < 10; ++j) {
    const double dx = half * kXgk[j];
    f1[j] = f(center - dx);
    f2[j] = f(center + dx);
    const double sum = f1[j] + f2[j];
    resk += kWgk[j] * sum;
    resabs += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) resg += kWg[j / 2] * sum;
  }
  const double reskh = 0.5 * resk;
  double resasc = kWgk[10] * std::abs(fc - reskh);
  for (int j = 0; j < 10; ++j) {
    resasc += kWgk[j] * (std::abs(f1[j] - reskh) + std::abs(f2[j] - reskh));
  }
  const double value = resk * half;
  resabs *= abs_half;
  resasc *= abs_half;
  double err = std::abs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  if (resabs > kTiny / (50.0 * kEps)) err = std::max(50.0 * kEps * resabs, err);
  return {a, b, value, err};
}

}  // namespace detail

/// Integrates f over the finite interval [a, b].
template <class F>
Result integrate(F&& f, double a, double b, const Settings& s = {}) {
  if (a == b) return {};
  std::priority_queue<detail::Segment> heap;
  detail::Segment first = detail::gk21(f, a, b);
  double total = first.value;
  double total_err = first.error;
  heap.push(first);
  int subdivisions = 0;
  bool converged = true;

  while (total_err > std::max(s.abs_tol, s.rel_tol * std::abs(total))) {
    if (subdivisions >= s.max_subdivisions) {
      converged = false;
      break;
    }
    detail::Segment worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= std::min(worst.a, worst.b) || mid >= std::max(worst.a, worst.b)) {
      // Interval can no longer be split in floating point.
      converged = false;
      break;
    }
    heap.pop();
    detail::Segment left = detail::gk21(f, worst.a, mid);
    detail::Segment right = detail::gk21(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++subdivisions;
  }

  // Resum to shed the drift of the running updates.
  Result r;
  r.subdivisions = subdivisions;
  r.converged = converged;
  while (!heap.empty()) {
    r.value += heap.top().value;
    r.abs_error += heap.top().error;
    heap.pop();
  }
  return r;
}

/// Integrates f over [a, inf) through x = a + (1 - t) / t.
template <class F>
Result integrate_to_infinity(F&& f, double a, const Settings& s = {}) {
  auto mapped = [&f, a](double t) {
    const double x = a + (1.0 - t) / t;
    const double v = f(x);
    return v == 0.0 ? 0.0 : v / (t * t);
  };
  return integrate(mapped, 0.0, 1.0, s);
}

}  // namespace fdrelay::quad
