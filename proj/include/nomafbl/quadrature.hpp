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
#include <functional>
#include <span>
#include <vector>

namespace nomafbl {

// Tolerances shared by the adaptive integrator and the series evaluations
// built on top of it.
struct AccuracyPolicy {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  int max_subdivisions = 2000;

  void validate() const;  // throws std::domain_error on nonsense values
};

struct QuadResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int subdivisions = 0;
  std::uint64_t evaluations = 0;
  bool converged = false;
};

// Globally adaptive Gauss-Kronrod 7/15 on [a, b]. Stops once the summed
// error estimate drops below max(abs_tol, rel_tol*|integral|) or the
// subdivision budget runs out (converged == false in that case).
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     const AccuracyPolicy& policy);

// \int_0^inf f(t) dt through t = scale*u/(1-u). `scale` should match the
// decay length of f so the mass lands in the interior of [0, 1).
// t_breaks lists known feature locations (in t); the integrator seeds one
// segment per break so narrow structure far below `scale` cannot slip
// between the nodes of the first panel.
QuadResult integrate_half_line(const std::function<double(double)>& f, double scale,
                               const AccuracyPolicy& policy,
                               std::span<const double> t_breaks = {});

// Geometric break ladder lo, lo*ratio, ... covering [lo, hi]. No seeded
// panel then spans more than `ratio` in t, which keeps the per-panel error
// estimates honest for integrands that decay over many scales. The ratio is
// widened if needed to respect max_breaks.
std::vector<double> geometric_ladder(double lo, double hi, double ratio = 8.0,
                                     int max_breaks = 24);

}  // namespace nomafbl
