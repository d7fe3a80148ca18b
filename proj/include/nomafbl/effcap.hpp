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
#include <vector>

#include "nomafbl/channel.hpp"
#include "nomafbl/quadrature.hpp"

namespace nomafbl::effcap {

enum class UserRole { noma_strong, noma_weak, oma_strong, oma_weak };
enum class Method { closed_form, quadrature, monte_carlo };
enum class Scheme { noma, oma };

// Per-user delay-QoS exponent.
struct QosConfig {
  double theta = 0.01;
  void validate() const;
};

// Quantities derived from (theta, n, epsilon): upsilon = -theta*n/(2 ln 2)
// and psi = theta*sqrt(n)*Qinv(epsilon).
struct QosDerived {
  double upsilon;
  double psi;
  static QosDerived from(const QosConfig& qos, const channel::LinkConfig& link);
};

struct SeriesPolicy {
  double tail_rel_tol = 1e-10;
  int max_terms = 500;
};

struct McConfig {
  std::uint64_t num_samples = 100000;
  std::uint64_t master_seed = 0x9e3779b97f4a7c15ULL;
};

struct CalcOptions {
  bool clamp_negative_rate = false;  // zero out negative FBL rates (MC/quadrature only)
  bool oma_weak_as_printed = false;  // weak OMA closed form with H argument 1/rho
  bool approx_dispersion = false;    // sqrt(V) ~ 1 (quadrature paths driven by options)
  AccuracyPolicy quad{};
  SeriesPolicy series{};
};

struct EcEstimate {
  double value = 0.0;  // b/s/Hz
  Method method = Method::closed_form;
  double std_error = 0.0;               // delta-method, monte_carlo only
  std::uint64_t samples_or_nodes = 0;   // MC samples, quadrature evals, or series terms
};

// Eq-style delay model: Pr{D > d_max} ~ p_nonempty * exp(-theta*mu*d_max).
struct DelayModel {
  double d_max;
  double mu;
  double p_nonempty = 1.0;
  void validate() const;
};

enum class Pairing { strongest_weakest, adjacent, random };

struct MultiUserConfig {
  int total_users = 12;
  int served_users = 6;  // must be even; the top gains are served
  Pairing pairing = Pairing::strongest_weakest;
  double alpha1 = 0.3;  // per-pair power split
  double alpha2 = 0.7;
  std::vector<double> thetas;       // empty: common theta; 1: broadcast; served: per rank
  std::uint64_t pairing_seed = 0;   // used by Pairing::random only
  void validate() const;
};

// Monte-Carlo estimate of Eq.(9)/(10)-style EC with the exact
// finite-blocklength rate in the kernel. Deterministic for a fixed
// master_seed; samples are partitioned into fixed-size chunks with
// independently derived streams and reduced in chunk order.
EcEstimate ec_monte_carlo(UserRole user, const channel::LinkConfig& link,
                          const QosConfig& qos, const McConfig& mc,
                          const CalcOptions& opts = {});

// Numerical integration of the EC kernel against the ordered-gain density.
// approx_dispersion selects sqrt(V) ~ 1 (matching the closed forms) versus
// the exact dispersion (matching Monte-Carlo).
EcEstimate ec_quadrature(UserRole user, const channel::LinkConfig& link,
                         const QosConfig& qos, bool approx_dispersion,
                         const AccuracyPolicy& policy = {}, const CalcOptions& opts = {});

// Closed forms (exact reductions of the sqrt(V) ~ 1 integrals).
EcEstimate ec_closed_noma_strong(const channel::LinkConfig& link, const QosConfig& qos,
                                 const CalcOptions& opts = {});
EcEstimate ec_closed_noma_weak(const channel::LinkConfig& link, const QosConfig& qos,
                               const CalcOptions& opts = {});
// role must be oma_strong or oma_weak
EcEstimate ec_closed_oma(UserRole role, const channel::LinkConfig& link, const QosConfig& qos,
                         const CalcOptions& opts = {});
EcEstimate ec_closed_form(UserRole user, const channel::LinkConfig& link, const QosConfig& qos,
                          const CalcOptions& opts = {});

// Same closed forms with caller-supplied derived quantities; used by the
// validation tooling to probe sensitivity (e.g. a sign flip in psi).
EcEstimate ec_closed_with_derived(UserRole user, const channel::LinkConfig& link,
                                  const QosConfig& qos, const QosDerived& derived,
                                  const CalcOptions& opts = {});

EcEstimate ec_estimate(UserRole user, Method method, const channel::LinkConfig& link,
                       const QosConfig& qos, const McConfig& mc = {},
                       const CalcOptions& opts = {});

struct TotalEc {
  double value = 0.0;
  double std_error = 0.0;
  EcEstimate strong;
  EcEstimate weak;
};

// Two-user sum C1 + C2 for a scheme. Monte-Carlo derives per-user seeds as
// derive_stream(master_seed, 0) and derive_stream(master_seed, 1).
TotalEc total_ec_detailed(Scheme scheme, Method method, const channel::LinkConfig& link,
                          const QosConfig& qos_strong, const QosConfig& qos_weak,
                          const McConfig& mc = {}, const CalcOptions& opts = {});
double total_ec(Scheme scheme, Method method, const channel::LinkConfig& link,
                const QosConfig& qos_strong, const QosConfig& qos_weak,
                const McConfig& mc = {}, const CalcOptions& opts = {});

struct MultiTotal {
  double value = 0.0;
  double std_error = 0.0;
  std::vector<double> per_user;  // EC per served user in pair order (NOMA) or rank order (OMA)
};

// Total EC of the multi-user extension: the top served_users gains out of
// total_users are served; NOMA pairs share the slot via TDMA (per-pair rate
// scaled by 1/num_pairs), the OMA baseline splits the slot across all served
// users (1/served_users). With total_users == served_users == 2 this
// delegates to the two-user path bit for bit.
MultiTotal multiuser_total_ec_detailed(const MultiUserConfig& mu, Scheme scheme, Method method,
                                       const channel::LinkConfig& link, const QosConfig& qos,
                                       const McConfig& mc = {}, const CalcOptions& opts = {});
double multiuser_total_ec(const MultiUserConfig& mu, Scheme scheme, Method method,
                          const channel::LinkConfig& link, const QosConfig& qos,
                          const McConfig& mc = {}, const CalcOptions& opts = {});

// p_nonempty * exp(-theta * mu * d_max), clamped to [0, 1].
double delay_violation_prob(const DelayModel& dm, const QosConfig& qos);

// Terms of the weak-user closed-form series (test/diagnostic hook). Valid
// for moderate theta*n where terms stay within double range.
std::vector<double> weak_series_terms(double q, double alpha1, double z,
                                      const SeriesPolicy& pol);

}  // namespace nomafbl::effcap
