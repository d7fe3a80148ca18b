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

#include "nomafbl/channel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "nomafbl/errors.hpp"
#include "nomafbl/specfun.hpp"

namespace nomafbl::channel {

void LinkConfig::validate() const {
  if (!(rho > 0.0) || !std::isfinite(rho))
    throw ConfigError("LinkConfig: rho must be positive and finite");
  if (!(alpha1 > 0.0) || !(alpha1 <= alpha2))
    throw ConfigError("LinkConfig: requires 0 < alpha1 <= alpha2");
  if (std::fabs(alpha1 + alpha2 - 1.0) > 1e-9)
    throw ConfigError("LinkConfig: alpha1 + alpha2 must equal 1");
  if (blocklength_n < 1) throw ConfigError("LinkConfig: blocklength_n must be >= 1");
  if (!(epsilon > 0.0) || !(epsilon <= 1.0))
    throw ConfigError("LinkConfig: epsilon must lie in (0, 1]");
}

OrderStatSpec OrderStatSpec::strong() { return {1, 1.0 / specfun::beta_fn(1.0, 2.0)}; }
OrderStatSpec OrderStatSpec::weak() { return {2, 1.0 / specfun::beta_fn(2.0, 1.0)}; }

double unordered_gain_pdf(double gamma, double rho) {
  if (gamma < 0.0) throw std::domain_error("unordered_gain_pdf: gamma must be >= 0");
  if (!(rho > 0.0)) throw std::domain_error("unordered_gain_pdf: rho must be > 0");
  return std::exp(-gamma / rho) / rho;
}

double ordered_gain_pdf(const OrderStatSpec& spec, double gamma, double rho) {
  const double f = unordered_gain_pdf(gamma, rho);
  const double F = -std::expm1(-gamma / rho);
  switch (spec.index_i) {
    case 1:
      return spec.xi * f * F;
    case 2:
      return spec.xi * f * (1.0 - F);
    default:
      throw std::domain_error("ordered_gain_pdf: index_i must be 1 or 2");
  }
}

double ranked_gain_pdf(int rank, int total, double gamma, double rho) {
  if (rank < 1 || total < 1 || rank > total)
    throw std::domain_error("ranked_gain_pdf: need 1 <= rank <= total");
  const double f = unordered_gain_pdf(gamma, rho);
  const double xi = 1.0 / specfun::beta_fn(rank, total - rank + 1.0);
  const double F = -std::expm1(-gamma / rho);
  // descending rank i: xi * f * F^{K-i} * (1-F)^{i-1}
  return xi * f * std::pow(F, total - rank) * std::exp(-(rank - 1) * gamma / rho);
}

std::uint64_t derive_stream(std::uint64_t master_seed, std::uint64_t index) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(master_seed ^ mix(index));
}

ChannelSample sample_ordered_gains(Rng& rng, double rho) {
  const double g1 = rng.exponential(rho);
  const double g2 = rng.exponential(rho);
  return g1 >= g2 ? ChannelSample{g1, g2} : ChannelSample{g2, g1};
}

void sample_sorted_gains(Rng& rng, double rho, std::span<double> out) {
  for (double& g : out) g = rng.exponential(rho);
  std::sort(out.begin(), out.end(), std::greater<double>());
}

}  // namespace nomafbl::channel
