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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "nomafbl/effcap.hpp"
#include "nomafbl/errors.hpp"
#include "nomafbl/rates.hpp"
#include "nomafbl/specfun.hpp"
#include "oracles.hpp"

using namespace nomafbl;
using namespace nomafbl::effcap;
using nomafbl::channel::LinkConfig;

namespace {

constexpr double kLn2 = 0.6931471805599453094172321214581766;

LinkConfig link_at_db(double db) {
  LinkConfig link;
  link.rho = std::pow(10.0, db / 10.0);
  return link;
}

double rel_diff(double a, double b) {
  return std::fabs(a - b) / std::max(std::fabs(a), std::fabs(b));
}

const std::vector<UserRole> kAllRoles = {UserRole::noma_strong, UserRole::noma_weak,
                                         UserRole::oma_strong, UserRole::oma_weak};

}  // namespace

TEST_CASE("derived QoS quantities at the reference point") {
  const LinkConfig link = link_at_db(20.0);
  const QosDerived d = QosDerived::from({0.01}, link);
  CHECK(d.upsilon == doctest::Approx(-2.8853900817779268).epsilon(1e-14));
  CHECK(d.psi == doctest::Approx(0.95068486176457979).epsilon(1e-12));
  CHECK(d.upsilon < 0.0);
  CHECK(d.psi > 0.0);
}

TEST_CASE("eps = 1 collapses every estimator to exactly zero") {
  LinkConfig link = link_at_db(20.0);
  link.epsilon = 1.0;
  const QosConfig qos{0.01};
  for (UserRole u : kAllRoles) {
    CHECK(ec_closed_form(u, link, qos).value == 0.0);
    CHECK(ec_quadrature(u, link, qos, true).value == 0.0);
    CHECK(ec_quadrature(u, link, qos, false).value == 0.0);
    CHECK(ec_monte_carlo(u, link, qos, {2000, 1}).value == 0.0);
  }
  CHECK(total_ec(Scheme::noma, Method::closed_form, link, qos, qos) == 0.0);
  CHECK(multiuser_total_ec({}, Scheme::oma, Method::closed_form, link, qos) == 0.0);
}

TEST_CASE("closed forms match their high-precision references") {
  const LinkConfig link = link_at_db(20.0);
  const QosConfig qos{0.01};
  // frozen from 30-digit evaluation of the closed-form expressions
  CHECK(rel_diff(ec_closed_noma_strong(link, qos).value, 2.02008824455324) < 1e-11);
  CHECK(rel_diff(ec_closed_noma_weak(link, qos).value, 0.933553900167332) < 1e-8);
  CHECK(rel_diff(ec_closed_oma(UserRole::oma_strong, link, qos).value, 2.16866290773855) <
        1e-11);
  CHECK(rel_diff(ec_closed_oma(UserRole::oma_weak, link, qos).value, 1.02290514698897) <
        1e-11);
}

TEST_CASE("strong closed forms reduce the approximated integral exactly") {
  for (double db : {0.0, 20.0, 40.0}) {
    for (double th : {0.001, 0.01, 0.1}) {
      const LinkConfig link = link_at_db(db);
      const QosConfig qos{th};
      const double ns_closed = ec_closed_noma_strong(link, qos).value;
      const double ns_quad = ec_quadrature(UserRole::noma_strong, link, qos, true).value;
      CHECK(rel_diff(ns_closed, ns_quad) < 1e-6);
      const double os_closed = ec_closed_oma(UserRole::oma_strong, link, qos).value;
      const double os_quad = ec_quadrature(UserRole::oma_strong, link, qos, true).value;
      CHECK(rel_diff(os_closed, os_quad) < 1e-6);
    }
  }
}

TEST_CASE("weak closed forms against quadrature, with the variant question settled") {
  const LinkConfig link = link_at_db(20.0);
  const QosConfig qos{0.01};

  const double nw_quad = ec_quadrature(UserRole::noma_weak, link, qos, true).value;
  CHECK(rel_diff(ec_closed_noma_weak(link, qos).value, nw_quad) < 5e-3);

  const double ow_quad = ec_quadrature(UserRole::oma_weak, link, qos, true).value;
  CHECK(rel_diff(ec_closed_oma(UserRole::oma_weak, link, qos).value, ow_quad) < 1e-9);

  // the H(1, 2+ups, 1/rho) variant does not reproduce the weak-user
  // integral; the discrepancy is glaring at low SNR
  CalcOptions printed;
  printed.oma_weak_as_printed = true;
  const LinkConfig low = link_at_db(0.0);
  const double ow_quad_low = ec_quadrature(UserRole::oma_weak, low, qos, true).value;
  CHECK(rel_diff(ec_closed_oma(UserRole::oma_weak, low, qos, printed).value, ow_quad_low) >
        5e-2);
  CHECK(rel_diff(ec_closed_oma(UserRole::oma_weak, low, qos).value, ow_quad_low) < 1e-9);
}

TEST_CASE("weak-series k=1 term carries the printed coefficient") {
  // \int_0^inf 2*ups*(a1-1)/(a1 g + 1) e^{-2g/rho} dg at rho=100, theta=0.01,
  // frozen from 30-digit quadrature
  const double q = 2.0 * -2.8853900817779268;
  const SeriesPolicy pol;
  const auto terms = weak_series_terms(q, 0.3, 2.0 / 100.0, pol);
  REQUIRE(terms.size() > 6);
  CHECK(terms[1] == doctest::Approx(31.6138196550355).epsilon(1e-9));
}

TEST_CASE("weak-series terms match the literal finite-sum identity") {
  // G_k via the recurrence must equal (1/(k-1)!) sum_j (j-1)! (-z)^{k-j-1} b^{-j}
  //   - ((-z)^{k-1}/(k-1)!) e^{bz} Ei(-bz), term-for-term
  const double q = 2.0 * -2.8853900817779268;
  const double a1 = 0.3, z = 2.0 / 100.0, b = 1.0 / a1;
  const auto terms = weak_series_terms(q, a1, z, {});
  const double g1 = -std::exp(b * z) * specfun::exp_integral_ei(-b * z);
  for (unsigned k = 2; k <= 10 && k < terms.size(); ++k) {
    double fact = 1.0;  // (k-1)!
    for (unsigned j = 2; j < k; ++j) fact *= j;
    double s = 0.0;
    double jfact = 1.0;
    for (unsigned j = 1; j <= k - 1; ++j) {
      if (j > 1) jfact *= (j - 1);
      s += jfact * std::pow(-z, static_cast<double>(k - j - 1)) * std::pow(b, -double(j));
    }
    const double gk = s / fact - std::pow(-z, static_cast<double>(k - 1)) / fact * (-g1);
    const double want = specfun::gen_binomial(q, k) *
                        std::pow((a1 - 1.0) / a1, static_cast<double>(k)) * gk;
    CHECK(terms[k] == doctest::Approx(want).epsilon(1e-9));
  }
}

TEST_CASE("weak-series tail decays geometrically past the head") {
  const double q = 2.0 * -2.8853900817779268;  // theta=0.01, n=400
  const auto terms = weak_series_terms(q, 0.3, 2.0 / 100.0, {});
  REQUIRE(terms.size() > 8);
  // strictly contracting beyond k = 5; the ratio tends to 1 - alpha1 = 0.7
  // from above as k grows past |q|
  for (std::size_t k = 6; k + 1 < terms.size(); ++k) {
    CHECK(terms[k + 1] < terms[k]);
    CHECK(terms[k + 1] / terms[k] < 1.0);
  }
  CHECK(terms[terms.size() - 1] / terms[terms.size() - 2] < 0.85);
}

TEST_CASE("series truncation budget is honored") {
  const LinkConfig link = link_at_db(20.0);
  CalcOptions opts;
  opts.series.max_terms = 1;
  CHECK_THROWS_AS(ec_closed_noma_weak(link, {0.01}, opts), ConvergenceError);
}

TEST_CASE("quadrature with exact dispersion matches the frozen references") {
  // frozen from 30-digit integration of the exact-dispersion kernels
  const LinkConfig link = link_at_db(10.0);
  const QosConfig qos{0.01};
  CHECK(rel_diff(ec_quadrature(UserRole::noma_strong, link, qos, false).value,
                 1.01034853414471) < 1e-9);
  CHECK(rel_diff(ec_quadrature(UserRole::noma_weak, link, qos, false).value,
                 0.532703402058168) < 1e-9);
  CHECK(rel_diff(ec_quadrature(UserRole::oma_strong, link, qos, false).value,
                 1.14539815331598) < 1e-9);
  CHECK(rel_diff(ec_quadrature(UserRole::oma_weak, link, qos, false).value,
                 0.523954808759824) < 1e-9);
  // and at 40 dB where the kernel is a narrow spike against the density
  const LinkConfig hi = link_at_db(40.0);
  CHECK(rel_diff(ec_quadrature(UserRole::noma_strong, hi, qos, false).value,
                 3.44778623079) < 1e-9);
  CHECK(rel_diff(ec_quadrature(UserRole::oma_weak, hi, qos, false).value, 2.20414274765) <
        1e-9);
}

TEST_CASE("approximated dispersion drifts below 1% of exact at 30 dB") {
  // The sqrt(V) ~ 1 premise needs the loose exponent: the weak NOMA user's
  // SINR is capped at alpha2/alpha1, so its dispersion deficit does not
  // vanish with SNR and the gap scales with psi (observed ~3% at theta=0.01).
  const LinkConfig link = link_at_db(30.0);
  const QosConfig qos{0.001};
  for (UserRole u : kAllRoles) {
    const double ex = ec_quadrature(u, link, qos, false).value;
    const double ap = ec_quadrature(u, link, qos, true).value;
    CHECK(rel_diff(ex, ap) < 0.01);
  }
  const QosConfig strict{0.01};
  for (UserRole u : kAllRoles) {
    const double ex = ec_quadrature(u, link, strict, false).value;
    const double ap = ec_quadrature(u, link, strict, true).value;
    CHECK(rel_diff(ex, ap) < 0.05);
  }
}

TEST_CASE("monte carlo is deterministic and quantifies its error") {
  const LinkConfig link = link_at_db(10.0);
  const QosConfig qos{0.01};
  const McConfig mc{100000, 77};
  const EcEstimate a = ec_monte_carlo(UserRole::noma_strong, link, qos, mc);
  const EcEstimate b = ec_monte_carlo(UserRole::noma_strong, link, qos, mc);
  CHECK(a.value == b.value);
  CHECK(a.std_error == b.std_error);
  CHECK(a.std_error > 0.0);
  CHECK(a.samples_or_nodes == 100000);

  const EcEstimate c = ec_monte_carlo(UserRole::noma_strong, link, qos, {100000, 78});
  CHECK(a.value != c.value);

  // against the exact-dispersion quadrature
  const double quad = ec_quadrature(UserRole::noma_strong, link, qos, false).value;
  CHECK(std::fabs(a.value - quad) < 3.0 * a.std_error);

  CHECK_THROWS_AS(ec_monte_carlo(UserRole::noma_strong, link, qos, {999, 1}), ConfigError);
}

TEST_CASE("theta to zero limit recovers the mean rate") {
  const LinkConfig link = link_at_db(10.0);
  const QosConfig tiny{1e-6};
  const McConfig mc{200000, 4242};
  const EcEstimate ec = ec_monte_carlo(UserRole::noma_strong, link, tiny, mc);

  // independent sampling of the mean rate
  channel::Rng rng(channel::derive_stream(999, 0));
  std::vector<double> rs(200000);
  for (double& r : rs)
    r = rates::fbl_rate_noma_strong(channel::sample_ordered_gains(rng, link.rho), link).rate;
  const auto mv = oracles::mean_var(rs);
  CHECK(std::fabs(ec.value - (1.0 - link.epsilon) * mv.mean) <
        3.0 * (ec.std_error + mv.std_error));
}

TEST_CASE("effective capacity never exceeds the mean rate") {
  const LinkConfig link = link_at_db(20.0);
  for (UserRole u : kAllRoles) {
    const long double mean_rate = oracles::integrate_half_line([&](long double g) {
      const double gd = static_cast<double>(g);
      const channel::ChannelSample s{gd, gd};
      double r;
      if (u == UserRole::noma_strong)
        r = rates::fbl_rate_noma_strong(s, link).rate;
      else if (u == UserRole::noma_weak)
        r = rates::fbl_rate_noma_weak(s, link).rate;
      else
        r = rates::fbl_rate_oma(gd, link).rate;
      const auto spec = (u == UserRole::noma_strong || u == UserRole::oma_strong)
                            ? channel::OrderStatSpec::strong()
                            : channel::OrderStatSpec::weak();
      return static_cast<long double>(r * channel::ordered_gain_pdf(spec, gd, link.rho));
    });
    for (double th : {1e-4, 1e-3, 1e-2}) {
      const double ec = ec_quadrature(u, link, {th}, false).value;
      CHECK(ec <= (1.0 - link.epsilon) * static_cast<double>(mean_rate) + 1e-9);
    }
  }
}

TEST_CASE("ec is nonincreasing in theta for every method") {
  const LinkConfig link = link_at_db(20.0);
  const std::vector<double> thetas = {1e-4, 1e-3, 1e-2, 1e-1};
  for (UserRole u : kAllRoles) {
    double prev_c = 1e30, prev_q = 1e30, prev_m = 1e30;
    for (double th : thetas) {
      const double c = ec_closed_form(u, link, {th}).value;
      const double q = ec_quadrature(u, link, {th}, false).value;
      // common seed across theta: the Monte-Carlo estimate is the EC of the
      // empirical gain distribution, so monotonicity holds exactly
      const double m = ec_monte_carlo(u, link, {th}, {20000, 5}).value;
      CHECK(c <= prev_c + 1e-12);
      CHECK(q <= prev_q + 1e-12);
      CHECK(m <= prev_m + 1e-12);
      prev_c = c;
      prev_q = q;
      prev_m = m;
    }
  }
}

TEST_CASE("closed-form monotonicity example at 20 dB") {
  const LinkConfig link = link_at_db(20.0);
  CHECK(ec_closed_noma_strong(link, {0.001}).value >
        ec_closed_noma_strong(link, {0.01}).value);
}

TEST_CASE("psi sign flip breaks the strong-user identity (mutation check)") {
  const LinkConfig link = link_at_db(20.0);
  const QosConfig qos{0.01};
  QosDerived d = QosDerived::from(qos, link);
  const double good = ec_closed_with_derived(UserRole::noma_strong, link, qos, d).value;
  d.psi = -d.psi;
  const double bad = ec_closed_with_derived(UserRole::noma_strong, link, qos, d).value;
  const double quad = ec_quadrature(UserRole::noma_strong, link, qos, true).value;
  CHECK(rel_diff(good, quad) < 1e-6);
  CHECK(rel_diff(bad, quad) > 1e-3);
}

TEST_CASE("clamping negative rates raises the low-SNR estimate") {
  const LinkConfig link = link_at_db(0.0);
  const QosConfig qos{0.01};
  CalcOptions clamp;
  clamp.clamp_negative_rate = true;
  const double plain = ec_quadrature(UserRole::oma_weak, link, qos, false).value;
  const double clamped = ec_quadrature(UserRole::oma_weak, link, qos, false, {}, clamp).value;
  CHECK(clamped > plain);
}

TEST_CASE("total ec reproduces the two-user crossover") {
  const LinkConfig link = link_at_db(30.0);
  const QosConfig loose{0.001}, strict{0.01};
  const double noma_loose =
      total_ec(Scheme::noma, Method::closed_form, link, loose, loose);
  const double oma_loose = total_ec(Scheme::oma, Method::closed_form, link, loose, loose);
  CHECK(noma_loose > oma_loose);
  const double noma_strict =
      total_ec(Scheme::noma, Method::closed_form, link, strict, strict);
  const double oma_strict = total_ec(Scheme::oma, Method::closed_form, link, strict, strict);
  CHECK(oma_strict > noma_strict);
}

TEST_CASE("single-pair multiuser reduces to the two-user total bit for bit") {
  const LinkConfig link = link_at_db(20.0);
  const QosConfig qos{0.01};
  MultiUserConfig mu;
  mu.total_users = 2;
  mu.served_users = 2;
  for (Method m : {Method::closed_form, Method::quadrature, Method::monte_carlo}) {
    for (Scheme s : {Scheme::noma, Scheme::oma}) {
      const McConfig mc{20000, 31};
      const double multi = multiuser_total_ec(mu, s, m, link, qos, mc);
      const double two = total_ec(s, m, link, qos, qos, mc);
      CHECK(multi == two);
    }
  }
}

TEST_CASE("multiuser closed form agrees with its quadrature") {
  const LinkConfig link = link_at_db(20.0);
  const QosConfig qos{0.01};
  MultiUserConfig mu;  // 6 of 12, strongest-weakest
  CalcOptions approx;
  approx.approx_dispersion = true;
  for (Scheme s : {Scheme::noma, Scheme::oma}) {
    const double closed = multiuser_total_ec(mu, s, Method::closed_form, link, qos);
    const double quad = multiuser_total_ec(mu, s, Method::quadrature, link, qos, {}, approx);
    CHECK(rel_diff(closed, quad) < 1e-6);
  }
}

TEST_CASE("multiuser monte carlo tracks the exact quadrature") {
  const LinkConfig link = link_at_db(20.0);
  const QosConfig qos{0.01};
  MultiUserConfig mu;
  const McConfig mc{100000, 909};
  for (Scheme s : {Scheme::noma, Scheme::oma}) {
    const MultiTotal m = multiuser_total_ec_detailed(mu, s, Method::monte_carlo, link, qos, mc);
    const MultiTotal q = multiuser_total_ec_detailed(mu, s, Method::quadrature, link, qos);
    CHECK(std::fabs(m.value - q.value) < 3.0 * m.std_error);
  }
}

TEST_CASE("multiuser orderings at 30 dB") {
  const LinkConfig link = link_at_db(30.0);
  const QosConfig qos{0.01};
  MultiUserConfig mu;
  const double multi_noma = multiuser_total_ec(mu, Scheme::noma, Method::closed_form, link, qos);
  const double multi_oma = multiuser_total_ec(mu, Scheme::oma, Method::closed_form, link, qos);
  CHECK(multi_noma > multi_oma);
  // the 6-of-12 totals beat the two-user totals under the stringent exponent
  const double two_noma = total_ec(Scheme::noma, Method::closed_form, link, qos, qos);
  const double two_oma = total_ec(Scheme::oma, Method::closed_form, link, qos, qos);
  CHECK(multi_noma > two_noma);
  CHECK(multi_oma > two_oma);
}

TEST_CASE("multiuser pairing strategies") {
  const LinkConfig link = link_at_db(20.0);
  const QosConfig qos{0.01};
  MultiUserConfig mu;
  mu.pairing = Pairing::adjacent;
  const double adj = multiuser_total_ec(mu, Scheme::noma, Method::closed_form, link, qos);
  mu.pairing = Pairing::strongest_weakest;
  const double sw = multiuser_total_ec(mu, Scheme::noma, Method::closed_form, link, qos);
  CHECK(adj != sw);
  mu.pairing = Pairing::random;
  mu.pairing_seed = 5;
  const double r1 = multiuser_total_ec(mu, Scheme::noma, Method::closed_form, link, qos);
  const double r2 = multiuser_total_ec(mu, Scheme::noma, Method::closed_form, link, qos);
  CHECK(r1 == r2);
}

TEST_CASE("multiuser config validation") {
  const LinkConfig link = link_at_db(20.0);
  MultiUserConfig mu;
  mu.served_users = 5;
  CHECK_THROWS_AS(multiuser_total_ec(mu, Scheme::noma, Method::closed_form, link, {0.01}),
                  ConfigError);
  mu = {};
  mu.served_users = 14;
  CHECK_THROWS_AS(multiuser_total_ec(mu, Scheme::noma, Method::closed_form, link, {0.01}),
                  ConfigError);
  mu = {};
  mu.thetas = {0.01, 0.02};  // must be 0, 1, or served_users entries
  CHECK_THROWS_AS(multiuser_total_ec(mu, Scheme::noma, Method::closed_form, link, {0.01}),
                  ConfigError);
}

TEST_CASE("per-rank thetas are honored") {
  const LinkConfig link = link_at_db(20.0);
  MultiUserConfig mu;
  mu.total_users = 2;
  mu.served_users = 2;
  mu.thetas = {0.001, 0.01};
  const double mixed = multiuser_total_ec(mu, Scheme::noma, Method::closed_form, link, {0.5});
  const double want = ec_closed_noma_strong(link, {0.001}).value +
                      ec_closed_noma_weak(link, {0.01}).value;
  CHECK(mixed == doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("delay violation probability") {
  CHECK(delay_violation_prob({0.0, 1.0, 1.0}, {0.01}) == 1.0);
  // theta*mu*d_max = ln 10 -> 0.1
  CHECK(delay_violation_prob({std::log(10.0) / (0.01 * 5.0), 5.0, 1.0}, {0.01}) ==
        doctest::Approx(0.1).epsilon(1e-12));
  // monotone decreasing in each argument
  const double base = delay_violation_prob({2.0, 3.0, 1.0}, {0.05});
  CHECK(delay_violation_prob({2.5, 3.0, 1.0}, {0.05}) < base);
  CHECK(delay_violation_prob({2.0, 3.5, 1.0}, {0.05}) < base);
  CHECK(delay_violation_prob({2.0, 3.0, 1.0}, {0.06}) < base);
  CHECK(delay_violation_prob({2.0, 3.0, 0.5}, {0.05}) == doctest::Approx(0.5 * base));
  CHECK_THROWS_AS(delay_violation_prob({1.0, -1.0, 1.0}, {0.01}), ConfigError);
  CHECK_THROWS_AS(delay_violation_prob({1.0, 1.0, 1.5}, {0.01}), ConfigError);
}

TEST_CASE("qos validation") {
  QosConfig bad{0.0};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad.theta = -1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}
