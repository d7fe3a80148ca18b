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

#include "nomafbl/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace nomafbl {

void AccuracyPolicy::validate() const {
  if (!(rel_tol > 0.0) || !std::isfinite(rel_tol))
    throw std::domain_error("AccuracyPolicy: rel_tol must be > 0");
  if (!(abs_tol > 0.0) || !std::isfinite(abs_tol))
    throw std::domain_error("AccuracyPolicy: abs_tol must be > 0");
  if (max_subdivisions < 1)
    throw std::domain_error("AccuracyPolicy: max_subdivisions must be >= 1");
}

namespace {

// 15-point Kronrod abscissae/weights with the embedded 7-point Gauss rule.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b;
  double value;
  double error;
};

struct Qk15Out {
  double value;
  double error;
};

Qk15Out qk15(const std::function<double(double)>& f, double a, double b) {
  const double centr = 0.5 * (a + b);
  const double hlgth = 0.5 * (b - a);

  double fv1[7], fv2[7];
  const double fc = f(centr);
  double resg = fc * kWg[3];
  double resk = fc * kWgk[7];
  double resabs = std::fabs(resk);

  for (int j = 0; j < 3; ++j) {
    const int jtw = 2 * j + 1;
    const double absc = hlgth * kXgk[jtw];
    fv1[jtw] = f(centr - absc);
    fv2[jtw] = f(centr + absc);
    const double fsum = fv1[jtw] + fv2[jtw];
    resg += kWg[j] * fsum;
    resk += kWgk[jtw] * fsum;
    resabs += kWgk[jtw] * (std::fabs(fv1[jtw]) + std::fabs(fv2[jtw]));
  }
  for (int j = 0; j < 4; ++j) {
    const int jtwm1 = 2 * j;
    if (jtwm1 == 7) continue;
    const double absc = hlgth * kXgk[jtwm1];
    fv1[jtwm1] = f(centr - absc);
    fv2[jtwm1] = f(centr + absc);
    const double fsum = fv1[jtwm1] + fv2[jtwm1];
    resk += kWgk[jtwm1] * fsum;
    resabs += kWgk[jtwm1] * (std::fabs(fv1[jtwm1]) + std::fabs(fv2[jtwm1]));
  }

  const double reskh = resk * 0.5;
  double resasc = kWgk[7] * std::fabs(fc - reskh);
  for (int j = 0; j < 7; ++j)
    resasc += kWgk[j] * (std::fabs(fv1[j] - reskh) + std::fabs(fv2[j] - reskh));

  const double value = resk * hlgth;
  resabs *= std::fabs(hlgth);
  resasc *= std::fabs(hlgth);
  double abserr = std::fabs((resk - resg) * hlgth);
  if (resasc != 0.0 && abserr != 0.0)
    abserr = resasc * std::min(1.0, std::pow(200.0 * abserr / resasc, 1.5));
  const double eps = std::numeric_limits<double>::epsilon();
  const double uflow = std::numeric_limits<double>::min();
  if (resabs > uflow / (50.0 * eps)) abserr = std::max(eps * 50.0 * resabs, abserr);
  return {value, abserr};
}

QuadResult integrate_seeded(const std::function<double(double)>& f,
                            const std::vector<double>& edges, const AccuracyPolicy& policy) {
  QuadResult out;

  auto cmp = [](const Segment& x, const Segment& y) { return x.error < y.error; };
  std::vector<Segment> segs;
  segs.reserve(64);

  double total_value = 0.0;
  double total_error = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    Qk15Out r = qk15(f, edges[i], edges[i + 1]);
    segs.push_back({edges[i], edges[i + 1], r.value, r.error});
    total_value += r.value;
    total_error += r.error;
    out.evaluations += 15;
    ++out.subdivisions;
  }
  std::make_heap(segs.begin(), segs.end(), cmp);

  while (out.subdivisions < policy.max_subdivisions) {
    const double tol = std::max(policy.abs_tol, policy.rel_tol * std::fabs(total_value));
    if (total_error <= tol) break;

    std::pop_heap(segs.begin(), segs.end(), cmp);
    Segment worst = segs.back();
    segs.pop_back();

    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      // interval width at roundoff level, cannot refine further
      segs.push_back(worst);
      std::push_heap(segs.begin(), segs.end(), cmp);
      break;
    }

    Qk15Out left = qk15(f, worst.a, mid);
    Qk15Out right = qk15(f, mid, worst.b);
    out.evaluations += 30;
    ++out.subdivisions;

    total_value += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;

    segs.push_back({worst.a, mid, left.value, left.error});
    std::push_heap(segs.begin(), segs.end(), cmp);
    segs.push_back({mid, worst.b, right.value, right.error});
    std::push_heap(segs.begin(), segs.end(), cmp);
  }

  // Recompute the totals from the surviving segments; the incremental sums
  // accumulate roundoff over thousands of updates.
  total_value = 0.0;
  total_error = 0.0;
  for (const Segment& s : segs) {
    total_value += s.value;
    total_error += s.error;
  }

  out.value = total_value;
  out.error_estimate = total_error;
  out.converged =
      total_error <= std::max(policy.abs_tol, policy.rel_tol * std::fabs(total_value));
  return out;
}

}  // namespace

QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     const AccuracyPolicy& policy) {
  policy.validate();
  if (!(std::isfinite(a) && std::isfinite(b)))
    throw std::domain_error("integrate: endpoints must be finite");
  if (a == b) {
    QuadResult out;
    out.converged = true;
    return out;
  }
  return integrate_seeded(f, {a, b}, policy);
}

QuadResult integrate_half_line(const std::function<double(double)>& f, double scale,
                               const AccuracyPolicy& policy,
                               std::span<const double> t_breaks) {
  policy.validate();
  if (!(scale > 0.0) || !std::isfinite(scale))
    throw std::domain_error("integrate_half_line: scale must be positive and finite");
  auto g = [&f, scale](double u) {
    const double om = 1.0 - u;
    const double t = scale * u / om;
    if (!std::isfinite(t)) return 0.0;
    const double v = f(t);
    return v == 0.0 ? 0.0 : v * scale / (om * om);
  };
  std::vector<double> edges{0.0};
  for (double t : t_breaks) {
    if (!(t > 0.0) || !std::isfinite(t)) continue;
    edges.push_back(t / (t + scale));
  }
  edges.push_back(1.0);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [](double x, double y) { return y - x < 1e-12; }),
              edges.end());
  if (edges.back() != 1.0) edges.back() = 1.0;
  return integrate_seeded(g, edges, policy);
}

std::vector<double> geometric_ladder(double lo, double hi, double ratio, int max_breaks) {
  std::vector<double> breaks;
  if (!(lo > 0.0) || !(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) return breaks;
  double r = std::max(ratio, 1.5);
  const double span = std::log(hi / lo);
  if (span / std::log(r) > max_breaks - 1) r = std::exp(span / (max_breaks - 1));
  for (double t = lo; t < hi * (1.0 + 1e-12); t *= r) breaks.push_back(t);
  return breaks;
}

}  // namespace nomafbl
