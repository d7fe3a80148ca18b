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

#include "nomafbl/rates.hpp"

#include <cmath>
#include <stdexcept>

#include "nomafbl/specfun.hpp"

namespace nomafbl::rates {

namespace {
constexpr double kLn2 = 0.6931471805599453094172321214581766;
}

double noma_strong_sinr(const channel::ChannelSample& s, const channel::LinkConfig& cfg) {
  return cfg.alpha1 * s.gamma1;
}

double noma_weak_sinr(const channel::ChannelSample& s, const channel::LinkConfig& cfg) {
  return cfg.alpha2 * s.gamma2 / (cfg.alpha1 * s.gamma2 + 1.0);
}

RateSample fbl_rate_from_snr(double snr, double blocklength_n, double qinv_eps,
                             double slot_share) {
  // V = 1 - (1+snr)^-2 = snr(snr+2)/(1+snr)^2, cancellation-free at small snr
  const double onep = 1.0 + snr;
  const double dispersion = snr * (snr + 2.0) / (onep * onep);
  const double sqrt_v = std::sqrt(snr * (snr + 2.0)) / onep;
  const double rate =
      slot_share * (std::log1p(snr) / kLn2 - sqrt_v * qinv_eps / std::sqrt(blocklength_n));
  return {rate, dispersion, snr};
}

RateSample fbl_rate_noma_strong(const channel::ChannelSample& s,
                                const channel::LinkConfig& cfg) {
  const double qinv = specfun::inv_gaussian_q(cfg.epsilon);
  return fbl_rate_from_snr(noma_strong_sinr(s, cfg), static_cast<double>(cfg.blocklength_n),
                           qinv, 1.0);
}

RateSample fbl_rate_noma_weak(const channel::ChannelSample& s,
                              const channel::LinkConfig& cfg) {
  const double qinv = specfun::inv_gaussian_q(cfg.epsilon);
  return fbl_rate_from_snr(noma_weak_sinr(s, cfg), static_cast<double>(cfg.blocklength_n),
                           qinv, 1.0);
}

RateSample fbl_rate_oma(double gamma, const channel::LinkConfig& cfg) {
  if (gamma < 0.0) throw std::domain_error("fbl_rate_oma: gamma must be >= 0");
  const double qinv = specfun::inv_gaussian_q(cfg.epsilon);
  return fbl_rate_from_snr(gamma, static_cast<double>(cfg.blocklength_n), qinv, 0.5);
}

}  // namespace nomafbl::rates
