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
#include <random>
#include <span>

namespace nomafbl::channel {

// Physical link parameters. rho is the linear transmit SNR; dB conversion
// happens at the CLI/sweep boundary only.
struct LinkConfig {
  double rho = 100.0;
  double alpha1 = 0.3;  // power coefficient of the strong user
  double alpha2 = 0.7;  // power coefficient of the weak user
  std::uint64_t blocklength_n = 400;
  double epsilon = 1e-6;  // transmission error probability

  // Throws ConfigError on violation. epsilon == 1 is tolerated as the
  // degenerate identity case (every EC is exactly zero there); the CLI
  // additionally rejects it.
  void validate() const;
};

// One realization of the ordered channel power-gain pair, gamma1 >= gamma2.
struct ChannelSample {
  double gamma1;
  double gamma2;
};

// Order-statistic constant for the two-user case, xi_i = 1/B(i, 2-i+1).
struct OrderStatSpec {
  int index_i;  // 1 = strong (max of two), 2 = weak (min of two)
  double xi;

  static OrderStatSpec strong();
  static OrderStatSpec weak();
};

// Exponential power-gain density (1/rho) e^{-gamma/rho} (Rayleigh |h| with
// unit variance, gamma = rho |h|^2).
double unordered_gain_pdf(double gamma, double rho);

// Two-user ordered densities: strong 2 f F, weak 2 f (1-F).
double ordered_gain_pdf(const OrderStatSpec& spec, double gamma, double rho);

// Density of the gain at descending rank `rank` among `total` i.i.d.
// exponential(rho) gains.
double ranked_gain_pdf(int rank, int total, double gamma, double rho);

// Deterministic derivation of a child stream seed from (master, index).
// splitmix64 finalizer; order-independent so parallel tasks can derive
// their own streams.
std::uint64_t derive_stream(std::uint64_t master_seed, std::uint64_t index);

// mt19937_64 behind a fully specified uint64 -> double conversion so that
// sequences are reproducible across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // exponential with the given mean, by inversion
  double exponential(double mean) { return -mean * std::log1p(-uniform()); }

 private:
  std::mt19937_64 eng_;
};

// Draws two independent exponential(mean rho) gains and returns them sorted
// descending.
ChannelSample sample_ordered_gains(Rng& rng, double rho);

// Fills `out` with out.size() gains sorted descending (multi-user draws).
void sample_sorted_gains(Rng& rng, double rho, std::span<double> out);

}  // namespace nomafbl::channel
