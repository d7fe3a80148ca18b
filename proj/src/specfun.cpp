// nomafbl - link-layer rate analysis for NOMA/OMA downlinks with finite blocklength
// Copyright (C) 2026 the nomafbl developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "nomafbl/specfun.hpp"

#include <cmath>
#include <stdexcept>

#include "nomafbl/errors.hpp"

namespace nomafbl::specfun {

namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209008240243;
constexpr double kSqrt2Pi = 2.50662827463100050241576528481104525;

// Acklam's rational approximation to the standard normal quantile,
// |relative error| < 1.15e-9 over (0,1); refined by Newton afterwards.
double norm_ppf_estimate(double p) {
  static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                              -2.759285104469687e+02, 1.383577518672690e+02,
                              -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                              -1.556989798598866e+02, 6.680131188771972e+01,
                              -1.328068155288572e+01};
  static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                              -2.400758277161838e+00, -2.549732539343734e+00,
                              4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p <= 1.0 - plow) {
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  const double q = std::sqrt(-2.0 * std::log(1.0 - p));
  return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
         ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

// E1(y) for y > 0: alternating power series below 1, modified-Lentz
// continued fraction above.
double expint_e1(double y) {
  if (y <= 1.0) {
    double sum = 0.0;
    double yk = 1.0;  // y^k / k!
    for (int k = 1; k <= 64; ++k) {
      yk *= y / k;
      const double t = ((k & 1) ? yk : -yk) / k;
      sum += t;
      if (std::fabs(t) < 1e-18 * std::fabs(sum)) break;
    }
    return -kEulerGamma - std::log(y) + sum;
  }
  const double tiny = 1e-300;
  double bb = y + 1.0;
  double cc = 1.0 / tiny;
  double dd = 1.0 / bb;
  double h = dd;
  for (int k = 1; k <= 400; ++k) {
    const double ak = -static_cast<double>(k) * k;
    bb += 2.0;
    dd = bb + ak * dd;
    if (dd == 0.0) dd = tiny;
    cc = bb + ak / cc;
    if (cc == 0.0) cc = tiny;
    dd = 1.0 / dd;
    const double delta = cc * dd;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-y) * h;
}

}  // namespace

double gaussian_q(double x) {
  if (!std::isfinite(x)) throw std::domain_error("gaussian_q: non-finite argument");
  return 0.5 * std::erfc(x * M_SQRT1_2);
}

double inv_gaussian_q(double eps) {
  if (!(eps > 0.0 && eps < 1.0))
    throw std::domain_error("inv_gaussian_q: argument must lie in (0, 1)");
  if (eps == 0.5) return 0.0;
  if (eps > 0.5) return -inv_gaussian_q(1.0 - eps);

  double x = -norm_ppf_estimate(eps);
  for (int it = 0; it < 3; ++it) {
    const double phi = std::exp(-0.5 * x * x) / kSqrt2Pi;
    if (phi == 0.0) break;
    double step = (gaussian_q(x) - eps) / phi;
    // the rational estimate is already within ~1e-9; a runaway step means
    // roundoff, not signal
    if (std::fabs(step) > 0.5) step = step > 0 ? 0.5 : -0.5;
    x += step;
    if (std::fabs(step) < 1e-15 * std::fabs(x)) break;
  }
  return x;
}

TricomiResult tricomi_u_ex(double a, double b, double z, const AccuracyPolicy& policy) {
  if (!(a > 0.0) || !std::isfinite(a) || !std::isfinite(b))
    throw std::domain_error("tricomi_u: requires a > 0 and finite b");
  if (!(z > 0.0) || !std::isfinite(z))
    throw std::domain_error("tricomi_u: requires z > 0");
  const double gamma_a = std::tgamma(a);
  if (!std::isfinite(gamma_a))
    throw std::domain_error("tricomi_u: Gamma(a) overflows");

  const double pow1 = b - a - 1.0;
  auto integrand = [a, z, pow1](double t) {
    double lg = -z * t + pow1 * std::log1p(t);
    if (a != 1.0) lg += (a - 1.0) * std::log(t);
    return std::exp(lg);
  };
  // u-map scale from the integrand's initial decay rate z + max(0, -(b-a-1));
  // the geometric ladder reaches out to the exponential cutoff at 1/z
  const double scale = (a + std::max(0.0, pow1)) / (z + std::max(0.0, -pow1));
  const auto breaks = geometric_ladder(scale / 8.0, 64.0 / z);
  QuadResult q = integrate_half_line(integrand, scale, policy, breaks);
  const double value = q.value / gamma_a;
  if (!q.converged)
    throw ConvergenceError("tricomi_u: adaptive quadrature did not reach tolerance", value,
                           q.evaluations);
  return {value, q.evaluations};
}

double tricomi_u(double a, double b, double z, const AccuracyPolicy& policy) {
  return tricomi_u_ex(a, b, z, policy).value;
}

double exp_integral_ei(double x) {
  if (!(x < 0.0))
    throw std::domain_error("exp_integral_ei: only x < 0 is supported");
  return -expint_e1(-x);
}

double gen_binomial(double alpha, unsigned k) {
  if (!std::isfinite(alpha)) throw std::domain_error("gen_binomial: non-finite alpha");
  double v = 1.0;
  for (unsigned j = 0; j < k; ++j) v *= (alpha - j) / (j + 1.0);
  return v;
}

double beta_fn(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
    throw std::domain_error("beta_fn: requires a > 0 and b > 0");
  return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

}  // namespace nomafbl::specfun
