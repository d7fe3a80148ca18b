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

#include "nomafbl/channel.hpp"

namespace nomafbl::rates {

// Finite-blocklength achievable rate in b/s/Hz together with its channel
// dispersion V = 1 - (1 + snr)^-2. The rate may be negative at small gains;
// callers decide whether to clamp.
struct RateSample {
  double rate;
  double dispersion;
  double effective_snr;
};

// alpha1 * gamma1 (gamma already includes rho)
double noma_strong_sinr(const channel::ChannelSample& s, const channel::LinkConfig& cfg);

// alpha2 * gamma2 / (alpha1 * gamma2 + 1)
double noma_weak_sinr(const channel::ChannelSample& s, const channel::LinkConfig& cfg);

// slot_share * (log2(1+snr) - sqrt(V/n) * qinv_eps). slot_share is 1 for
// NOMA users, 1/2 for two-user OMA (1/K in general).
RateSample fbl_rate_from_snr(double snr, double blocklength_n, double qinv_eps,
                             double slot_share);

RateSample fbl_rate_noma_strong(const channel::ChannelSample& s,
                                const channel::LinkConfig& cfg);
RateSample fbl_rate_noma_weak(const channel::ChannelSample& s,
                              const channel::LinkConfig& cfg);
RateSample fbl_rate_oma(double gamma, const channel::LinkConfig& cfg);

}  // namespace nomafbl::rates
