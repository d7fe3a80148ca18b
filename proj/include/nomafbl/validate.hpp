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

#include <string>
#include <vector>

#include "nomafbl/effcap.hpp"

namespace nomafbl::validate {

struct ValidationOptions {
  bool strict = false;  // tightens the strong-user closed-form checks to 1e-8
  std::uint64_t mc_samples = 100000;
  std::uint64_t seed = 0x9e3779b97f4a7c15ULL;
};

struct CheckResult {
  std::string name;
  bool passed;
  double observed;  // worst deviation seen
  double limit;
  std::string note;
};

struct Report {
  std::vector<CheckResult> checks;
  bool all_passed = true;
  std::string text() const;
};

// Cross-method consistency checks over a built-in (rho, theta) grid:
// strong-user closed forms against sqrt(V)~1 quadrature, weak-user closed
// forms (recording which printed-constant variant reproduces the integral),
// and Monte-Carlo against exact-dispersion quadrature.
Report run_validation(const ValidationOptions& opts = {});

}  // namespace nomafbl::validate
