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

#pragma once

#include <cstdint>

#include "nomafbl/quadrature.hpp"

namespace nomafbl::specfun {

// Gaussian tail probability Q(x) = P(N(0,1) > x). Throws std::domain_error
// on non-finite input.
double gaussian_q(double x);

// Inverse of gaussian_q on (0, 1). Rational initial guess polished with a
// few safeguarded Newton steps; round-trips with gaussian_q to better than
// 1e-9 relative across (1e-9, 1-1e-9).
double inv_gaussian_q(double eps);

// Confluent hypergeometric function of the second kind,
//   H(a,b,z) = 1/Gamma(a) * \int_0^inf e^{-z t} t^{a-1} (1+t)^{b-a-1} dt,
// for a > 0, z > 0, evaluated by adaptive quadrature of the defining
// integral after mapping t = u/(1-u). Throws ConvergenceError (carrying the
// best estimate) when the subdivision budget is exhausted.
double tricomi_u(double a, double b, double z, const AccuracyPolicy& policy = {});

struct TricomiResult {
  double value;
  std::uint64_t evaluations;
};
TricomiResult tricomi_u_ex(double a, double b, double z, const AccuracyPolicy& policy = {});

// Exponential integral Ei(x) for x < 0 only (the branch the closed forms
// need). Power series for |x| <= 1, continued fraction otherwise.
double exp_integral_ei(double x);

// Generalized binomial coefficient C(alpha, k) = prod_{j=0}^{k-1} (alpha-j)/(j+1).
double gen_binomial(double alpha, unsigned k);

// Beta function B(a,b) for a, b > 0.
double beta_fn(double a, double b);

}  // namespace nomafbl::specfun
