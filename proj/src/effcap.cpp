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

#include "nomafbl/effcap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "nomafbl/errors.hpp"
#include "nomafbl/rates.hpp"
#include "nomafbl/specfun.hpp"

namespace nomafbl::effcap {

namespace {

constexpr double kLn2 = 0.6931471805599453094172321214581766;
constexpr std::uint64_t kMcChunk = 16384;

double logaddexp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

double theta_n(const QosConfig& qos, const channel::LinkConfig& link) {
  const double tn = qos.theta * static_cast<double>(link.blocklength_n);
  if (!(tn > 1e-10) || !std::isfinite(tn))
    throw std::domain_error("effcap: theta*n too small or non-finite");
  return tn;
}

// EC from ln(E[kernel - eps part]), i.e. ln of the (1-eps)-weighted mean:
// A = eps + (1-eps) * exp(ln_mean_term)
double ec_from_log_term(double eps, double ln_mean_term, double tn) {
  const double ln_arg = logaddexp(std::log(eps), std::log1p(-eps) + ln_mean_term);
  return -ln_arg / tn;
}

bool is_noma(UserRole u) { return u == UserRole::noma_strong || u == UserRole::noma_weak; }
bool is_strong(UserRole u) { return u == UserRole::noma_strong || u == UserRole::oma_strong; }

// -------------------------------------------------------------------------
// kernel machinery shared by Monte-Carlo and quadrature

struct Kernel {
  double eps;
  double tn;           // theta * n
  double qinv;         // Qinv(eps)
  double inv_sqrt_n;   // 1/sqrt(n)
  double slot;         // 1 for NOMA, 1/2 for two-user OMA, 1/P or 1/S multiuser
  bool approx;         // sqrt(V) ~ 1
  bool clamp;

  // exp(-theta*n*r); the eps part of the kernel integrates to eps exactly
  // and is added analytically by the callers
  double exp_part(double snr) const {
    double r;
    if (approx) {
      r = slot * (std::log1p(snr) / kLn2 - qinv * inv_sqrt_n);
    } else {
      const double sqrt_v = std::sqrt(snr * (snr + 2.0)) / (1.0 + snr);
      r = slot * (std::log1p(snr) / kLn2 - sqrt_v * qinv * inv_sqrt_n);
    }
    if (clamp && r < 0.0) r = 0.0;
    return std::exp(-tn * r);
  }

  double from_snr(double snr) const { return eps + (1.0 - eps) * exp_part(snr); }

  // gamma where the exp part has decayed by ~e^-1 against effective SNR
  // slope c; seeds the quadrature so the kernel knee is never missed
  double knee_gamma(double c) const {
    return (std::exp2(1.0 / std::max(1e-6, slot * tn)) - 1.0) / c;
  }
};

std::vector<double> kernel_breaks(const Kernel& kern, double c_eff, double rho) {
  double lo = kern.knee_gamma(c_eff);
  if (!std::isfinite(lo) || lo > rho) lo = rho;
  return geometric_ladder(lo / 8.0, 64.0 * rho);
}

Kernel make_kernel(const channel::LinkConfig& link, double tn, double slot, bool approx,
                   bool clamp) {
  return {link.epsilon, tn, specfun::inv_gaussian_q(link.epsilon),
          1.0 / std::sqrt(static_cast<double>(link.blocklength_n)), slot, approx, clamp};
}

double user_snr(UserRole u, double gamma, const channel::LinkConfig& link) {
  switch (u) {
    case UserRole::noma_strong:
      return link.alpha1 * gamma;
    case UserRole::noma_weak:
      return link.alpha2 * gamma / (link.alpha1 * gamma + 1.0);
    default:
      return gamma;
  }
}

// -------------------------------------------------------------------------
// weak-user series: sum_{k>=0} C(q,k) ((alpha1-1)/alpha1)^k G_k with
//   G_0 = 1/z,  G_1 = -e^{bz} Ei(-bz),  G_k = (b^{1-k} - z G_{k-1})/(k-1),
// b = 1/alpha1. Every term is positive for q < 0, so the sum is
// accumulated in log space without cancellation. The recurrence for G_k is
// the expanded finite-sum identity for \int_0^inf e^{-zt} (t+b)^{-k} dt
// evaluated stably.

double g1_value(double b, double z) {
  const double bz = b * z;
  if (bz <= 600.0) return -std::exp(bz) * specfun::exp_integral_ei(-bz);
  // asymptotic tail, relative error < 24/(bz)^4
  const double r = 1.0 / bz;
  return r * (1.0 - r * (1.0 - r * (2.0 - 6.0 * r)));
}

struct WeakSeries {
  double log_sum;
  int terms;
  bool converged;
};

WeakSeries weak_series_log(double q, double alpha1, double z, const SeriesPolicy& pol) {
  if (!(q < 0.0)) throw std::domain_error("weak series: requires q < 0");
  if (!(alpha1 > 0.0 && alpha1 < 1.0))
    throw std::domain_error("weak series: requires 0 < alpha1 < 1");
  if (!(z > 0.0)) throw std::domain_error("weak series: requires z > 0");

  const double b = 1.0 / alpha1;
  const double ln_r = std::log((1.0 - alpha1) / alpha1);
  const double aq = -q;

  // running log-sum-exp state
  double m = -std::log(z);  // k = 0 term
  double s = 1.0;
  auto add = [&m, &s](double t) {
    if (t == -std::numeric_limits<double>::infinity()) return;
    if (t <= m) {
      s += std::exp(t - m);
    } else {
      s = s * std::exp(m - t) + 1.0;
      m = t;
    }
  };

  double g_prev = g1_value(b, z);
  double ln_c = std::log(aq);  // ln|C(q,1)|
  double ln_term = ln_c + ln_r + std::log(g_prev);
  add(ln_term);

  double prev = ln_term;
  int k = 1;
  for (k = 2; k <= pol.max_terms; ++k) {
    double g = (std::pow(b, 1.0 - k) - z * g_prev) / (k - 1.0);
    if (g < 0.0) g = 0.0;  // roundoff at underflow scale
    g_prev = g;
    ln_c += std::log((aq + k - 1.0) / k);
    ln_term = g > 0.0 ? ln_c + k * ln_r + std::log(g)
                      : -std::numeric_limits<double>::infinity();
    add(ln_term);
    const double ln_total = m + std::log(s);
    if (ln_term < prev && ln_term - ln_total < std::log(pol.tail_rel_tol))
      return {ln_total, k + 1, true};
    prev = ln_term;
  }
  return {m + std::log(s), pol.max_terms + 1, false};
}

// strong-style kernel integral: \int_0^inf (1+c*gamma)^q e^{-z*gamma} dgamma
//   = (1/c) H(1, 2+q, z/c)
double power_kernel_integral(double q, double c, double z, const AccuracyPolicy& pol,
                             std::uint64_t* evals) {
  const auto r = specfun::tricomi_u_ex(1.0, 2.0 + q, z / c, pol);
  if (evals) *evals += r.evaluations;
  return r.value / c;
}

AccuracyPolicy closed_form_policy(const CalcOptions& opts) {
  AccuracyPolicy p = opts.quad;
  p.rel_tol = std::min(p.rel_tol, 1e-12);
  p.abs_tol = std::min(p.abs_tol, 1e-280);
  return p;
}

}  // namespace

void QosConfig::validate() const {
  if (!(theta > 0.0) || !std::isfinite(theta))
    throw ConfigError("QosConfig: theta must be positive and finite");
}

QosDerived QosDerived::from(const QosConfig& qos, const channel::LinkConfig& link) {
  const double n = static_cast<double>(link.blocklength_n);
  return {-qos.theta * n / (2.0 * kLn2),
          qos.theta * std::sqrt(n) * specfun::inv_gaussian_q(link.epsilon)};
}

void DelayModel::validate() const {
  if (!(d_max >= 0.0)) throw ConfigError("DelayModel: d_max must be >= 0");
  if (!(mu > 0.0)) throw ConfigError("DelayModel: mu must be > 0");
  if (!(p_nonempty > 0.0 && p_nonempty <= 1.0))
    throw ConfigError("DelayModel: p_nonempty must lie in (0, 1]");
}

void MultiUserConfig::validate() const {
  if (total_users < 2) throw ConfigError("MultiUserConfig: total_users must be >= 2");
  if (served_users < 2 || served_users > total_users)
    throw ConfigError("MultiUserConfig: served_users must lie in [2, total_users]");
  if (served_users % 2 != 0) throw ConfigError("MultiUserConfig: served_users must be even");
  if (!(alpha1 > 0.0) || !(alpha1 <= alpha2) || std::fabs(alpha1 + alpha2 - 1.0) > 1e-9)
    throw ConfigError("MultiUserConfig: pair coefficients must satisfy 0 < a1 <= a2, a1+a2 = 1");
  if (!thetas.empty() && thetas.size() != 1 &&
      thetas.size() != static_cast<std::size_t>(served_users))
    throw ConfigError("MultiUserConfig: thetas must have size 0, 1, or served_users");
  for (double t : thetas)
    if (!(t > 0.0)) throw ConfigError("MultiUserConfig: thetas must be positive");
}

EcEstimate ec_monte_carlo(UserRole user, const channel::LinkConfig& link, const QosConfig& qos,
                          const McConfig& mc, const CalcOptions& opts) {
  link.validate();
  qos.validate();
  if (mc.num_samples < 1000)
    throw ConfigError("ec_monte_carlo: num_samples must be >= 1000");
  if (link.epsilon == 1.0) return {0.0, Method::monte_carlo, 0.0, mc.num_samples};

  const double tn = theta_n(qos, link);
  const Kernel kern =
      make_kernel(link, tn, is_noma(user) ? 1.0 : 0.5, false, opts.clamp_negative_rate);

  const std::uint64_t n_chunks = (mc.num_samples + kMcChunk - 1) / kMcChunk;
  std::vector<double> sums(n_chunks, 0.0), sqs(n_chunks, 0.0);
  for (std::uint64_t c = 0; c < n_chunks; ++c) {
    channel::Rng rng(channel::derive_stream(mc.master_seed, c));
    const std::uint64_t lo = c * kMcChunk;
    const std::uint64_t hi = std::min(mc.num_samples, lo + kMcChunk);
    double sum = 0.0, sq = 0.0;
    for (std::uint64_t i = lo; i < hi; ++i) {
      const channel::ChannelSample cs = channel::sample_ordered_gains(rng, link.rho);
      const double gamma = is_strong(user) ? cs.gamma1 : cs.gamma2;
      const double k = kern.from_snr(user_snr(user, gamma, link));
      sum += k;
      sq += k * k;
    }
    sums[c] = sum;
    sqs[c] = sq;
  }
  double total = 0.0, total_sq = 0.0;
  for (std::uint64_t c = 0; c < n_chunks; ++c) {
    total += sums[c];
    total_sq += sqs[c];
  }
  const double nd = static_cast<double>(mc.num_samples);
  const double mean = total / nd;
  if (!(mean > 0.0)) throw std::logic_error("ec_monte_carlo: nonpositive kernel mean");
  const double var = std::max(0.0, (total_sq - nd * mean * mean) / (nd - 1.0));
  const double se_mean = std::sqrt(var / nd);
  return {-std::log(mean) / tn, Method::monte_carlo, se_mean / (tn * mean), mc.num_samples};
}

EcEstimate ec_quadrature(UserRole user, const channel::LinkConfig& link, const QosConfig& qos,
                         bool approx_dispersion, const AccuracyPolicy& policy,
                         const CalcOptions& opts) {
  link.validate();
  qos.validate();
  if (link.epsilon == 1.0) return {0.0, Method::quadrature, 0.0, 0};

  const double tn = theta_n(qos, link);
  const Kernel kern = make_kernel(link, tn, is_noma(user) ? 1.0 : 0.5, approx_dispersion,
                                  opts.clamp_negative_rate);
  const double rho = link.rho;
  const auto spec =
      is_strong(user) ? channel::OrderStatSpec::strong() : channel::OrderStatSpec::weak();
  auto f = [&](double gamma) {
    return kern.exp_part(user_snr(user, gamma, link)) *
           channel::ordered_gain_pdf(spec, gamma, rho);
  };
  const double c_eff = user == UserRole::noma_strong  ? link.alpha1
                       : user == UserRole::noma_weak ? link.alpha2
                                                      : 1.0;
  const QuadResult q = integrate_half_line(f, rho, policy, kernel_breaks(kern, c_eff, rho));
  if (q.value < 0.0) throw std::logic_error("ec_quadrature: negative kernel mean");
  const double ec =
      -logaddexp(std::log(link.epsilon), std::log1p(-link.epsilon) + std::log(q.value)) / tn;
  if (!q.converged)
    throw ConvergenceError("ec_quadrature: tolerance not reached", ec, q.evaluations);
  return {ec, Method::quadrature, 0.0, q.evaluations};
}

EcEstimate ec_closed_with_derived(UserRole user, const channel::LinkConfig& link,
                                  const QosConfig& qos, const QosDerived& d,
                                  const CalcOptions& opts) {
  link.validate();
  qos.validate();
  if (link.epsilon == 1.0) return {0.0, Method::closed_form, 0.0, 0};

  const double tn = theta_n(qos, link);
  const double rho = link.rho;
  const double a1 = link.alpha1;
  const AccuracyPolicy pol = closed_form_policy(opts);
  std::uint64_t nodes = 0;
  double ln_term;

  switch (user) {
    case UserRole::noma_strong: {
      const double q = 2.0 * d.upsilon;
      const double i1 = power_kernel_integral(q, a1, 1.0 / rho, pol, &nodes);
      const double i2 = power_kernel_integral(q, a1, 2.0 / rho, pol, &nodes);
      if (!(i1 > i2))
        throw ConvergenceError("ec_closed_noma_strong: integral difference lost to roundoff",
                               0.0, nodes);
      ln_term = std::log(2.0 / rho) + d.psi + std::log(i1 - i2);
      break;
    }
    case UserRole::oma_strong: {
      const double q = d.upsilon;
      const double i1 = power_kernel_integral(q, 1.0, 1.0 / rho, pol, &nodes);
      const double i2 = power_kernel_integral(q, 1.0, 2.0 / rho, pol, &nodes);
      if (!(i1 > i2))
        throw ConvergenceError("ec_closed_oma_strong: integral difference lost to roundoff",
                               0.0, nodes);
      ln_term = std::log(2.0 / rho) + 0.5 * d.psi + std::log(i1 - i2);
      break;
    }
    case UserRole::oma_weak: {
      const double q = d.upsilon;
      const double z = opts.oma_weak_as_printed ? 1.0 / rho : 2.0 / rho;
      const double i = power_kernel_integral(q, 1.0, z, pol, &nodes);
      ln_term = std::log(2.0 / rho) + 0.5 * d.psi + std::log(i);
      break;
    }
    case UserRole::noma_weak: {
      const double q = 2.0 * d.upsilon;
      const WeakSeries s = weak_series_log(q, a1, 2.0 / rho, opts.series);
      nodes += static_cast<std::uint64_t>(s.terms);
      ln_term = std::log(2.0 / rho) - q * std::log(a1) + d.psi + s.log_sum;
      if (!s.converged)
        throw ConvergenceError("ec_closed_noma_weak: series did not converge",
                               ec_from_log_term(link.epsilon, ln_term, tn), s.terms);
      break;
    }
    default:
      throw std::domain_error("ec_closed_with_derived: unknown user role");
  }
  return {ec_from_log_term(link.epsilon, ln_term, tn), Method::closed_form, 0.0, nodes};
}

EcEstimate ec_closed_form(UserRole user, const channel::LinkConfig& link, const QosConfig& qos,
                          const CalcOptions& opts) {
  link.validate();
  qos.validate();
  if (link.epsilon == 1.0) return {0.0, Method::closed_form, 0.0, 0};
  return ec_closed_with_derived(user, link, qos, QosDerived::from(qos, link), opts);
}

EcEstimate ec_closed_noma_strong(const channel::LinkConfig& link, const QosConfig& qos,
                                 const CalcOptions& opts) {
  return ec_closed_form(UserRole::noma_strong, link, qos, opts);
}

EcEstimate ec_closed_noma_weak(const channel::LinkConfig& link, const QosConfig& qos,
                               const CalcOptions& opts) {
  return ec_closed_form(UserRole::noma_weak, link, qos, opts);
}

EcEstimate ec_closed_oma(UserRole role, const channel::LinkConfig& link, const QosConfig& qos,
                         const CalcOptions& opts) {
  if (role != UserRole::oma_strong && role != UserRole::oma_weak)
    throw std::domain_error("ec_closed_oma: role must be oma_strong or oma_weak");
  return ec_closed_form(role, link, qos, opts);
}

EcEstimate ec_estimate(UserRole user, Method method, const channel::LinkConfig& link,
                       const QosConfig& qos, const McConfig& mc, const CalcOptions& opts) {
  switch (method) {
    case Method::closed_form:
      return ec_closed_form(user, link, qos, opts);
    case Method::quadrature:
      return ec_quadrature(user, link, qos, opts.approx_dispersion, opts.quad, opts);
    case Method::monte_carlo:
      return ec_monte_carlo(user, link, qos, mc, opts);
  }
  throw std::domain_error("ec_estimate: unknown method");
}

TotalEc total_ec_detailed(Scheme scheme, Method method, const channel::LinkConfig& link,
                          const QosConfig& qos_strong, const QosConfig& qos_weak,
                          const McConfig& mc, const CalcOptions& opts) {
  const UserRole us =
      scheme == Scheme::noma ? UserRole::noma_strong : UserRole::oma_strong;
  const UserRole uw = scheme == Scheme::noma ? UserRole::noma_weak : UserRole::oma_weak;
  McConfig mcs = mc, mcw = mc;
  mcs.master_seed = channel::derive_stream(mc.master_seed, 0);
  mcw.master_seed = channel::derive_stream(mc.master_seed, 1);
  TotalEc t;
  t.strong = ec_estimate(us, method, link, qos_strong, mcs, opts);
  t.weak = ec_estimate(uw, method, link, qos_weak, mcw, opts);
  t.value = t.strong.value + t.weak.value;
  t.std_error = std::hypot(t.strong.std_error, t.weak.std_error);
  return t;
}

double total_ec(Scheme scheme, Method method, const channel::LinkConfig& link,
                const QosConfig& qos_strong, const QosConfig& qos_weak, const McConfig& mc,
                const CalcOptions& opts) {
  return total_ec_detailed(scheme, method, link, qos_strong, qos_weak, mc, opts).value;
}

// -------------------------------------------------------------------------
// multi-user extension

namespace {

struct PlannedUser {
  int rank;            // descending gain rank among total_users, 1-based
  double slot;         // 1/num_pairs (NOMA) or 1/served_users (OMA)
  bool noma;
  bool strong_in_pair;
  double theta;
};

double resolve_theta(const MultiUserConfig& mu, const QosConfig& qos, int rank) {
  if (mu.thetas.empty()) return qos.theta;
  if (mu.thetas.size() == 1) return mu.thetas[0];
  return mu.thetas[static_cast<std::size_t>(rank - 1)];
}

std::vector<PlannedUser> build_plan(const MultiUserConfig& mu, Scheme scheme,
                                    const QosConfig& qos) {
  const int s = mu.served_users;
  std::vector<PlannedUser> plan;
  plan.reserve(static_cast<std::size_t>(s));
  if (scheme == Scheme::oma) {
    const double slot = 1.0 / s;
    for (int i = 1; i <= s; ++i)
      plan.push_back({i, slot, false, false, resolve_theta(mu, qos, i)});
    return plan;
  }
  const int p = s / 2;
  const double slot = 1.0 / p;
  std::vector<int> ranks(static_cast<std::size_t>(s));
  std::iota(ranks.begin(), ranks.end(), 1);
  std::vector<std::pair<int, int>> pairs;
  switch (mu.pairing) {
    case Pairing::strongest_weakest:
      for (int j = 0; j < p; ++j) pairs.emplace_back(ranks[j], ranks[s - 1 - j]);
      break;
    case Pairing::adjacent:
      for (int j = 0; j < p; ++j) pairs.emplace_back(ranks[2 * j], ranks[2 * j + 1]);
      break;
    case Pairing::random: {
      channel::Rng rng(channel::derive_stream(mu.pairing_seed, 0x70616972ULL));
      for (int i = s - 1; i > 0; --i) {
        const int j = static_cast<int>(rng.uniform() * (i + 1));
        std::swap(ranks[i], ranks[j]);
      }
      for (int j = 0; j < p; ++j) {
        int a = ranks[2 * j], b = ranks[2 * j + 1];
        pairs.emplace_back(std::min(a, b), std::max(a, b));
      }
      break;
    }
  }
  for (const auto& [strong, weak] : pairs) {
    plan.push_back({strong, slot, true, true, resolve_theta(mu, qos, strong)});
    plan.push_back({weak, slot, true, false, resolve_theta(mu, qos, weak)});
  }
  return plan;
}

// E[kernel] against the descending-rank density, expanded into exponentials:
// density = xi_i (1/rho) sum_j (-1)^j C(K-i,j) e^{-(i+j) gamma / rho}
double closed_rank_mean(const PlannedUser& u, const MultiUserConfig& mu,
                        const channel::LinkConfig& link, double n, double psi_u,
                        const CalcOptions& opts, std::uint64_t* nodes) {
  const int k_users = mu.total_users;
  const int i = u.rank;
  const double rho = link.rho;
  const double q = -u.theta * n / kLn2 * u.slot;  // 2*upsilon*slot
  const AccuracyPolicy pol = closed_form_policy(opts);

  const double xi = 1.0 / specfun::beta_fn(i, k_users - i + 1.0);
  double sum = 0.0;
  for (int j = 0; j <= k_users - i; ++j) {
    const double z = (i + j) / rho;
    double integral;
    if (!u.noma) {
      integral = power_kernel_integral(q, 1.0, z, pol, nodes);
    } else if (u.strong_in_pair) {
      integral = power_kernel_integral(q, mu.alpha1, z, pol, nodes);
    } else {
      const WeakSeries s = weak_series_log(q, mu.alpha1, z, opts.series);
      if (!s.converged)
        throw ConvergenceError("multiuser closed form: weak series did not converge", 0.0,
                               s.terms);
      *nodes += static_cast<std::uint64_t>(s.terms);
      integral = std::exp(-q * std::log(mu.alpha1) + s.log_sum);
    }
    const double c = specfun::gen_binomial(k_users - i, static_cast<unsigned>(j));
    sum += (j % 2 == 0 ? 1.0 : -1.0) * c * integral;
  }
  const double mean = xi / rho * std::exp(psi_u) * sum;
  if (!(mean > 0.0) || !std::isfinite(mean))
    throw ConvergenceError("multiuser closed form: mean lost to cancellation", mean,
                           *nodes);
  return mean;
}

}  // namespace

MultiTotal multiuser_total_ec_detailed(const MultiUserConfig& mu, Scheme scheme, Method method,
                                       const channel::LinkConfig& link, const QosConfig& qos,
                                       const McConfig& mc, const CalcOptions& opts) {
  mu.validate();
  link.validate();
  qos.validate();

  channel::LinkConfig pair_link = link;
  pair_link.alpha1 = mu.alpha1;
  pair_link.alpha2 = mu.alpha2;

  // single pair: identical to the two-user path
  if (mu.total_users == 2 && mu.served_users == 2) {
    const QosConfig q1{resolve_theta(mu, qos, 1)};
    const QosConfig q2{resolve_theta(mu, qos, 2)};
    const TotalEc t = total_ec_detailed(scheme, method, pair_link, q1, q2, mc, opts);
    return {t.value, t.std_error, {t.strong.value, t.weak.value}};
  }

  if (link.epsilon == 1.0)
    return {0.0, 0.0, std::vector<double>(static_cast<std::size_t>(mu.served_users), 0.0)};

  const std::vector<PlannedUser> plan = build_plan(mu, scheme, qos);
  const double n = static_cast<double>(link.blocklength_n);
  const double psi_base =
      std::sqrt(n) * specfun::inv_gaussian_q(link.epsilon);  // psi_u = theta_u * this

  MultiTotal out;
  out.per_user.reserve(plan.size());

  switch (method) {
    case Method::closed_form: {
      std::uint64_t nodes = 0;
      for (const PlannedUser& u : plan) {
        const double tn = u.theta * n;
        const double mean =
            closed_rank_mean(u, mu, pair_link, n, u.theta * psi_base * u.slot, opts, &nodes);
        const double ec =
            ec_from_log_term(link.epsilon, std::log(mean), tn);
        out.per_user.push_back(ec);
        out.value += ec;
      }
      return out;
    }
    case Method::quadrature: {
      for (const PlannedUser& u : plan) {
        const double tn = u.theta * n;
        const Kernel kern =
            make_kernel(pair_link, tn, u.slot, opts.approx_dispersion, opts.clamp_negative_rate);
        auto f = [&](double gamma) {
          double snr;
          if (!u.noma)
            snr = gamma;
          else if (u.strong_in_pair)
            snr = mu.alpha1 * gamma;
          else
            snr = mu.alpha2 * gamma / (mu.alpha1 * gamma + 1.0);
          return kern.exp_part(snr) *
                 channel::ranked_gain_pdf(u.rank, mu.total_users, gamma, link.rho);
        };
        const double c_eff = !u.noma ? 1.0 : (u.strong_in_pair ? mu.alpha1 : mu.alpha2);
        const QuadResult q = integrate_half_line(f, link.rho, opts.quad,
                                                 kernel_breaks(kern, c_eff, link.rho));
        if (q.value < 0.0)
          throw std::logic_error("multiuser quadrature: negative kernel mean");
        const double ec = -logaddexp(std::log(link.epsilon),
                                     std::log1p(-link.epsilon) + std::log(q.value)) /
                          tn;
        if (!q.converged)
          throw ConvergenceError("multiuser quadrature: tolerance not reached", ec,
                                 q.evaluations);
        out.per_user.push_back(ec);
        out.value += ec;
      }
      return out;
    }
    case Method::monte_carlo: {
      if (mc.num_samples < 1000)
        throw ConfigError("multiuser_total_ec: num_samples must be >= 1000");
      const std::size_t nu = plan.size();
      std::vector<Kernel> kerns;
      kerns.reserve(nu);
      for (const PlannedUser& u : plan)
        kerns.push_back(
            make_kernel(pair_link, u.theta * n, u.slot, false, opts.clamp_negative_rate));

      const std::uint64_t n_chunks = (mc.num_samples + kMcChunk - 1) / kMcChunk;
      std::vector<std::vector<double>> chunk_sums(n_chunks, std::vector<double>(nu, 0.0));
      std::vector<std::vector<double>> chunk_cross(
          n_chunks, std::vector<double>(nu * (nu + 1) / 2, 0.0));
      std::vector<double> gains(static_cast<std::size_t>(mu.total_users));
      std::vector<double> kv(nu);
      for (std::uint64_t c = 0; c < n_chunks; ++c) {
        channel::Rng rng(channel::derive_stream(mc.master_seed, c));
        const std::uint64_t lo = c * kMcChunk;
        const std::uint64_t hi = std::min(mc.num_samples, lo + kMcChunk);
        auto& sums = chunk_sums[c];
        auto& cross = chunk_cross[c];
        for (std::uint64_t it = lo; it < hi; ++it) {
          channel::sample_sorted_gains(rng, link.rho, gains);
          for (std::size_t ui = 0; ui < nu; ++ui) {
            const PlannedUser& u = plan[ui];
            const double gamma = gains[static_cast<std::size_t>(u.rank - 1)];
            double snr;
            if (!u.noma)
              snr = gamma;
            else if (u.strong_in_pair)
              snr = mu.alpha1 * gamma;
            else
              snr = mu.alpha2 * gamma / (mu.alpha1 * gamma + 1.0);
            kv[ui] = kerns[ui].from_snr(snr);
            sums[ui] += kv[ui];
          }
          std::size_t x = 0;
          for (std::size_t a = 0; a < nu; ++a)
            for (std::size_t b = a; b < nu; ++b) cross[x++] += kv[a] * kv[b];
        }
      }
      std::vector<double> mean(nu, 0.0), cross(nu * (nu + 1) / 2, 0.0);
      for (std::uint64_t c = 0; c < n_chunks; ++c) {
        for (std::size_t ui = 0; ui < nu; ++ui) mean[ui] += chunk_sums[c][ui];
        for (std::size_t x = 0; x < cross.size(); ++x) cross[x] += chunk_cross[c][x];
      }
      const double nd = static_cast<double>(mc.num_samples);
      for (double& v : mean) v /= nd;
      // delta method on the sum of -ln(mean_u)/(theta_u n) with the full
      // sample covariance (users share channel draws)
      std::vector<double> grad(nu);
      for (std::size_t ui = 0; ui < nu; ++ui) {
        if (!(mean[ui] > 0.0))
          throw std::logic_error("multiuser_total_ec: nonpositive kernel mean");
        const double ec = -std::log(mean[ui]) / (plan[ui].theta * n);
        out.per_user.push_back(ec);
        out.value += ec;
        grad[ui] = -1.0 / (plan[ui].theta * n * mean[ui]);
      }
      double var = 0.0;
      std::size_t x = 0;
      for (std::size_t a = 0; a < nu; ++a) {
        for (std::size_t b = a; b < nu; ++b) {
          const double cov = (cross[x++] / nd - mean[a] * mean[b]) * nd / (nd - 1.0);
          var += (a == b ? 1.0 : 2.0) * grad[a] * grad[b] * cov;
        }
      }
      out.std_error = std::sqrt(std::max(0.0, var / nd));
      return out;
    }
  }
  throw std::domain_error("multiuser_total_ec: unknown method");
}

double multiuser_total_ec(const MultiUserConfig& mu, Scheme scheme, Method method,
                          const channel::LinkConfig& link, const QosConfig& qos,
                          const McConfig& mc, const CalcOptions& opts) {
  return multiuser_total_ec_detailed(mu, scheme, method, link, qos, mc, opts).value;
}

double delay_violation_prob(const DelayModel& dm, const QosConfig& qos) {
  dm.validate();
  qos.validate();
  const double v = dm.p_nonempty * std::exp(-qos.theta * dm.mu * dm.d_max);
  return std::min(1.0, std::max(0.0, v));
}

std::vector<double> weak_series_terms(double q, double alpha1, double z,
                                      const SeriesPolicy& pol) {
  if (!(q < 0.0) || !(alpha1 > 0.0 && alpha1 < 1.0) || !(z > 0.0))
    throw std::domain_error("weak_series_terms: invalid arguments");
  const double b = 1.0 / alpha1;
  const double r = (1.0 - alpha1) / alpha1;
  std::vector<double> terms;
  terms.push_back(1.0 / z);
  double g = g1_value(b, z);
  double c = -q;  // |C(q,1)|
  terms.push_back(c * r * g);
  double sum = terms[0] + terms[1];
  for (int k = 2; k <= pol.max_terms; ++k) {
    g = std::max(0.0, (std::pow(b, 1.0 - k) - z * g) / (k - 1.0));
    c *= (-q + k - 1.0) / k;
    const double t = c * std::pow(r, k) * g;
    terms.push_back(t);
    sum += t;
    if (t < terms[static_cast<std::size_t>(k - 1)] && t < pol.tail_rel_tol * sum) break;
  }
  return terms;
}

}  // namespace nomafbl::effcap
