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
#include <stdexcept>
#include <string>

namespace nomafbl {

// Raised when an iterative evaluation (adaptive quadrature, series summation)
// exhausts its budget before reaching the requested tolerance. Carries the
// best estimate reached so far so callers may still inspect it.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double best_estimate, std::uint64_t iterations)
      : std::runtime_error(what), best_estimate_(best_estimate), iterations_(iterations) {}

  double best_estimate() const noexcept { return best_estimate_; }
  std::uint64_t iterations() const noexcept { return iterations_; }

 private:
  double best_estimate_;
  std::uint64_t iterations_;
};

// Invalid configuration (bad parameter combinations, malformed specs).
class ConfigError : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace nomafbl
