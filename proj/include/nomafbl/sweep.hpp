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

namespace nomafbl::sweep {

enum class Axis { rho_db, theta, alpha_pair, blocklength, epsilon };

enum class UserSel {
  noma_strong,
  noma_weak,
  oma_strong,
  oma_weak,
  noma_total,
  oma_total,
  multi_noma_total,
  multi_oma_total
};

const char* axis_name(Axis a);
const char* method_name(effcap::Method m);
bool parse_axis(const std::string& s, Axis* out);
bool parse_user_sel(const std::string& s, UserSel* out);
bool parse_method(const std::string& s, effcap::Method* out);

// One sweep: a primary axis plus optional secondary theta/alpha grids
// (figure presets with two delay exponents or several coefficient sets use
// those; they default to the fixed value). rho is carried in dB here and
// converted to linear exactly once per cell.
struct SweepSpec {
  Axis axis = Axis::rho_db;
  std::vector<double> grid;           // axis values (alpha_pair: alpha1 values)
  std::vector<double> theta_grid;     // empty: use qos.theta
  std::vector<double> alpha1_grid;    // empty: use link.alpha1
  channel::LinkConfig link;           // fixed values; .rho ignored (see rho_db)
  double rho_db = 20.0;               // fixed transmit SNR in dB
  effcap::QosConfig qos;
  std::vector<UserSel> users;
  std::vector<effcap::Method> methods;
  effcap::McConfig mc;
  effcap::MultiUserConfig multi;
  effcap::CalcOptions opts;
  int threads = 0;  // 0: hardware concurrency

  void validate() const;
  std::size_t cell_count() const;
};

struct ResultRow {
  std::string scheme;  // noma | oma
  std::string user;    // strong | weak | total | multi_total
  std::string method;  // closed_form | quadrature | monte_carlo
  double rho_db = 0.0;
  double theta = 0.0;
  double epsilon = 0.0;
  std::uint64_t blocklength = 0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  int num_pairs = 1;
  double ec = 0.0;
  double std_err = 0.0;
  std::string diag;  // "seed=0x..;chunks=..", "evals=..", "terms=..", or "error=.."
  int error_code = 0;  // 0 ok; nonzero mirrors the C-API status of the failure
};

// Evaluates every cell in deterministic order (grid-major, then theta, then
// alpha, then user, then method). Monte-Carlo cells derive their seed from
// (master_seed, cell_index), so any cell can be reproduced standalone. Cell
// errors are recorded in the row diagnostics, never aborting the sweep.
std::vector<ResultRow> run_sweep(const SweepSpec& spec);

// Sweeps matching the built-in figure presets fig1..fig5.
SweepSpec figure_preset(const std::string& name);

std::string csv_header();
std::string to_csv_row(const ResultRow& row);
std::string to_csv(const std::vector<ResultRow>& rows);

}  // namespace nomafbl::sweep
