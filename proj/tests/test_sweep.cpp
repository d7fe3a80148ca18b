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

#include "doctest.h"
#include "nomafbl/errors.hpp"
#include "nomafbl/sweep.hpp"

using namespace nomafbl;
using namespace nomafbl::sweep;

namespace {

SweepSpec small_mc_spec() {
  SweepSpec s;
  s.axis = Axis::rho_db;
  s.grid = {0.0, 10.0};
  s.users = {UserSel::noma_strong};
  s.methods = {effcap::Method::monte_carlo};
  s.mc.num_samples = 5000;
  s.mc.master_seed = 12345;
  return s;
}

}  // namespace

TEST_CASE("one cell gives one row with the expected fields") {
  SweepSpec s;
  s.grid = {20.0};
  s.users = {UserSel::oma_strong};
  s.methods = {effcap::Method::closed_form};
  const auto rows = run_sweep(s);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].scheme == "oma");
  CHECK(rows[0].user == "strong");
  CHECK(rows[0].method == "closed_form");
  CHECK(rows[0].rho_db == 20.0);
  CHECK(rows[0].theta == 0.01);
  CHECK(rows[0].epsilon == 1e-6);
  CHECK(rows[0].blocklength == 400);
  CHECK(rows[0].num_pairs == 1);
  CHECK(rows[0].error_code == 0);
  CHECK(std::isfinite(rows[0].ec));
}

TEST_CASE("fig1 preset yields 2 methods x 4 users x 9 grid points = 72 rows") {
  SweepSpec s = figure_preset("fig1");
  s.mc.num_samples = 2000;  // keep the unit test quick
  CHECK(s.cell_count() == 72);
  const auto rows = run_sweep(s);
  CHECK(rows.size() == 72);
  CHECK(s.qos.theta == 0.01);
}

TEST_CASE("secondary grids multiply the row count") {
  SweepSpec s;
  s.grid = {0.0, 20.0, 40.0};
  s.theta_grid = {0.001, 0.01};
  s.alpha1_grid = {0.2, 0.4};
  s.users = {UserSel::noma_strong, UserSel::noma_weak};
  s.methods = {effcap::Method::closed_form};
  CHECK(s.cell_count() == 3 * 2 * 2 * 2);
  const auto rows = run_sweep(s);
  REQUIRE(rows.size() == 24);
  // deterministic ordering: grid-major, then theta, then alpha, then user
  CHECK(rows[0].rho_db == 0.0);
  CHECK(rows[0].theta == 0.001);
  CHECK(rows[0].alpha1 == 0.2);
  CHECK(rows[0].user == "strong");
  CHECK(rows[1].user == "weak");
  CHECK(rows[2].alpha1 == 0.4);
  CHECK(rows[4].theta == 0.01);
  CHECK(rows[8].rho_db == 20.0);
  for (const auto& r : rows) CHECK(r.alpha2 == doctest::Approx(1.0 - r.alpha1));
}

TEST_CASE("sweeps are reproducible byte for byte") {
  SweepSpec s = small_mc_spec();
  s.threads = 4;  // exercise the parallel path
  const std::string a = to_csv(run_sweep(s));
  const std::string b = to_csv(run_sweep(s));
  CHECK(a == b);
  CHECK(a.substr(0, a.find('\n')) == csv_header());
}

TEST_CASE("monte carlo cells can be reproduced standalone") {
  SweepSpec s = small_mc_spec();
  const auto rows = run_sweep(s);
  REQUIRE(rows.size() == 2);
  // cell 1 is (rho=10dB, noma_strong, monte_carlo); its stream derives from
  // (master_seed, cell_index)
  channel::LinkConfig link = s.link;
  link.rho = std::pow(10.0, 10.0 / 10.0);
  const effcap::McConfig mc{s.mc.num_samples, channel::derive_stream(s.mc.master_seed, 1)};
  const auto est = effcap::ec_monte_carlo(effcap::UserRole::noma_strong, link, s.qos, mc);
  CHECK(est.value == rows[1].ec);
  CHECK(est.std_error == rows[1].std_err);
}

TEST_CASE("per-cell failures are recorded without aborting the sweep") {
  SweepSpec s;
  s.grid = {20.0};
  s.users = {UserSel::noma_weak, UserSel::oma_strong};
  s.methods = {effcap::Method::closed_form};
  s.opts.series.max_terms = 1;  // starve the weak-user series
  const auto rows = run_sweep(s);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].error_code == 2);  // convergence
  CHECK(rows[0].diag.rfind("error=", 0) == 0);
  CHECK(std::isnan(rows[0].ec));
  CHECK(rows[1].error_code == 0);
  CHECK(std::isfinite(rows[1].ec));
}

TEST_CASE("spec validation rejects bad grids") {
  SweepSpec s;
  s.users = {UserSel::noma_strong};
  s.methods = {effcap::Method::closed_form};
  s.grid = {};
  CHECK_THROWS_AS(run_sweep(s), ConfigError);
  s.grid = {3.0, 2.0};
  CHECK_THROWS_AS(run_sweep(s), ConfigError);
  s.grid = {1.0, 1.0};
  CHECK_THROWS_AS(run_sweep(s), ConfigError);
  s.grid = {1.0, 2.0};
  s.users.clear();
  CHECK_THROWS_AS(run_sweep(s), ConfigError);
  s.users = {UserSel::noma_strong};
  s.axis = Axis::theta;
  s.theta_grid = {0.001};
  CHECK_THROWS_AS(run_sweep(s), ConfigError);
}

TEST_CASE("figure presets pin their fixed parameters") {
  CHECK(figure_preset("fig4").rho_db == 20.0);
  CHECK(figure_preset("fig4").axis == Axis::theta);
  CHECK(figure_preset("fig1").qos.theta == 0.01);
  const auto fig5 = figure_preset("fig5");
  bool has_03 = false;
  for (double a : fig5.alpha1_grid) has_03 = has_03 || a == 0.3;
  CHECK(has_03);
  CHECK(figure_preset("fig3").multi.total_users == 12);
  CHECK(figure_preset("fig3").multi.served_users == 6);
  CHECK(figure_preset("fig2").theta_grid.size() == 2);
  CHECK_THROWS_AS(figure_preset("fig9"), ConfigError);
}

TEST_CASE("all presets run end to end at reduced sampling") {
  for (const char* name : {"fig1", "fig2", "fig3", "fig4", "fig5"}) {
    SweepSpec s = figure_preset(name);
    s.grid = {0.0, 20.0, 40.0};  // thin the axis, keep the structure
    if (s.axis == Axis::theta) s.grid = {1e-3, 1e-2};
    s.mc.num_samples = 2000;
    const auto rows = run_sweep(s);
    CHECK(rows.size() == s.cell_count());
    for (const auto& r : rows) {
      INFO(name << ": " << to_csv_row(r));
      CHECK(r.error_code == 0);
    }
  }
}

TEST_CASE("csv serialization uses 12 significant digits") {
  ResultRow r;
  r.scheme = "noma";
  r.user = "strong";
  r.method = "closed_form";
  r.rho_db = 20.0;
  r.theta = 0.01;
  r.epsilon = 1e-6;
  r.blocklength = 400;
  r.alpha1 = 0.3;
  r.alpha2 = 0.7;
  r.num_pairs = 1;
  r.ec = 2.020088244553239;
  r.std_err = 0.0;
  r.diag = "terms_or_evals=570";
  CHECK(to_csv_row(r) ==
        "noma,strong,closed_form,20,0.01,1e-06,400,0.3,0.7,1,2.02008824455,0,"
        "terms_or_evals=570");
}

TEST_CASE("name parsing round-trips") {
  Axis a;
  CHECK(parse_axis("alpha_pair", &a));
  CHECK(a == Axis::alpha_pair);
  CHECK_FALSE(parse_axis("bogus", &a));
  UserSel u;
  CHECK(parse_user_sel("multi_oma_total", &u));
  CHECK(u == UserSel::multi_oma_total);
  CHECK_FALSE(parse_user_sel("nope", &u));
  effcap::Method m;
  CHECK(parse_method("monte_carlo", &m));
  CHECK(m == effcap::Method::monte_carlo);
  CHECK_FALSE(parse_method("guess", &m));
}
