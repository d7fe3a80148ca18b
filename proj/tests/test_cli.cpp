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
//
// End-to-end checks of the installed command-line tool.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "nomafbl.h"

namespace {

struct CmdResult {
  int status;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::stringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

CmdResult run_cli(const std::string& args) {
  const std::string err_path =
      "/tmp/nomafbl_cli_err_" + std::to_string(::getpid()) + ".txt";
  const std::string cmd =
      std::string(NOMAFBL_CLI_PATH) + " " + args + " 2>" + err_path;
  FILE* p = ::popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::string out;
  char buf[4096];
  size_t n;
  while ((n = std::fread(buf, 1, sizeof(buf), p)) > 0) out.append(buf, n);
  const int rc = ::pclose(p);
  CmdResult r;
  r.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  r.out = std::move(out);
  r.err = slurp(err_path);
  std::remove(err_path.c_str());
  return r;
}

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> lines;
  std::istringstream in(s);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

}  // namespace

TEST_CASE("ec prints a header and one row, matching the library") {
  const CmdResult r =
      run_cli("ec --user oma-strong --method closed-form --rho-db 20 --theta 0.01");
  CHECK(r.status == 0);
  const auto lines = lines_of(r.out);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0].rfind("scheme,user,method", 0) == 0);
  CHECK(lines[1].rfind("oma,strong,closed_form,20,0.01,1e-06,400,0.3,0.7,1,", 0) == 0);

  nf_link_params link = nf_link_params_default();
  link.rho = 100.0;
  nf_ec_result want;
  REQUIRE(nf_ec(NF_USER_OMA_STRONG, NF_METHOD_CLOSED_FORM, &link, 0.01, nullptr, nullptr,
                &want) == NF_OK);
  char expect[40];
  std::snprintf(expect, sizeof(expect), "%.12g", want.value);
  CHECK(lines[1].find(expect) != std::string::npos);
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(run_cli("ec --user oma-strong --epsilon 1.5").status == 2);
  CHECK(run_cli("ec").status == 2);                 // --user is required
  CHECK(run_cli("ec --user who-dis").status == 2);  // unknown user name
  CHECK(run_cli("nonsense-subcommand").status == 2);
  const CmdResult r = run_cli("ec --user oma-strong --epsilon 1.5");
  CHECK(r.err.find("epsilon") != std::string::npos);
}

namespace {
std::string run_raw(const std::string& full_cmd) {
  FILE* p = ::popen((full_cmd + " 2>/dev/null").c_str(), "r");
  REQUIRE(p != nullptr);
  std::string out;
  char buf[4096];
  size_t n;
  while ((n = std::fread(buf, 1, sizeof(buf), p)) > 0) out.append(buf, n);
  ::pclose(p);
  return out;
}
}  // namespace

TEST_CASE("environment seed fills in when no flag or file sets one") {
  const std::string tail =
      " ec --user noma-weak --method monte-carlo --rho-db 10 --samples 5000";
  const CmdResult via_flag = run_cli(tail + " --seed 314");
  const std::string env_out = run_raw(std::string("NOMAFBL_SEED=314 ") + NOMAFBL_CLI_PATH + tail);
  CHECK(env_out == via_flag.out);
  // an explicit flag wins over the environment
  const std::string flag_wins =
      run_raw(std::string("NOMAFBL_SEED=314 ") + NOMAFBL_CLI_PATH + tail + " --seed 42");
  CHECK(flag_wins != env_out);
}

TEST_CASE("monte carlo runs are reproducible for a fixed seed") {
  const std::string cmd =
      "ec --user noma-weak --method monte-carlo --rho-db 10 --samples 5000 --seed 99";
  const CmdResult a = run_cli(cmd);
  const CmdResult b = run_cli(cmd);
  CHECK(a.status == 0);
  CHECK(a.out == b.out);
  const CmdResult c = run_cli(
      "ec --user noma-weak --method monte-carlo --rho-db 10 --samples 5000 --seed 100");
  CHECK(c.out != a.out);
}

TEST_CASE("sweep preset writes the expected csv and plot script") {
  const std::string csv = "/tmp/nomafbl_fig1_test.csv";
  const CmdResult r = run_cli("sweep --preset fig1 --samples 2000 --seed 3 --out " + csv +
                              " --emit-plot --threads 2");
  CHECK(r.status == 0);
  const std::string text = slurp(csv);
  const auto lines = lines_of(text);
  REQUIRE(lines.size() == 73);  // header + 72 rows
  CHECK(lines[0] ==
        "scheme,user,method,rho_db,theta,epsilon,blocklength,alpha1,alpha2,num_pairs,ec,"
        "std_err,diag");

  // byte-identical on rerun
  const std::string csv2 = "/tmp/nomafbl_fig1_test_b.csv";
  run_cli("sweep --preset fig1 --samples 2000 --seed 3 --out " + csv2 + " --threads 4");
  CHECK(slurp(csv2) == text);

  const std::string script = slurp("/tmp/nomafbl_fig1_test_plot.py");
  CHECK(script.find(csv) != std::string::npos);
  CHECK(script.find("rho_db") != std::string::npos);
  std::remove(csv.c_str());
  std::remove(csv2.c_str());
  std::remove("/tmp/nomafbl_fig1_test_plot.py");
}

TEST_CASE("custom sweeps work from flags") {
  const CmdResult r = run_cli(
      "sweep --axis theta --grid 0.001,0.01 --users noma-strong,oma-strong "
      "--methods closed-form --rho-db 20");
  CHECK(r.status == 0);
  const auto lines = lines_of(r.out);
  REQUIRE(lines.size() == 5);  // header + 2x2 rows
  CHECK(lines[1].rfind("noma,strong,closed_form,20,0.001,", 0) == 0);
}

TEST_CASE("flags beat the config file, the config file beats defaults") {
  const std::string cfg = "/tmp/nomafbl_cfg_" + std::to_string(::getpid()) + ".conf";
  {
    std::ofstream f(cfg);
    f << "# reference operating point\n"
      << "theta = 0.02\n"
      << "rho_db = 10\n";
  }
  const CmdResult r =
      run_cli("ec --user oma-strong --config " + cfg + " --rho-db 20");
  CHECK(r.status == 0);
  const auto lines = lines_of(r.out);
  REQUIRE(lines.size() == 2);
  // rho from the flag, theta from the file, epsilon from the defaults
  CHECK(lines[1].rfind("oma,strong,closed_form,20,0.02,1e-06,", 0) == 0);
  std::remove(cfg.c_str());
}

TEST_CASE("malformed config lines are reported with their line number") {
  const std::string cfg = "/tmp/nomafbl_badcfg_" + std::to_string(::getpid()) + ".conf";
  {
    std::ofstream f(cfg);
    f << "theta = 0.02\n"
      << "this line is truncated\n";
  }
  const CmdResult r = run_cli("ec --user oma-strong --config " + cfg);
  CHECK(r.status == 2);
  CHECK(r.err.find(":2:") != std::string::npos);
  std::remove(cfg.c_str());

  {
    std::ofstream f(cfg);
    f << "theta = not-a-number\n";
  }
  const CmdResult r2 = run_cli("ec --user oma-strong --config " + cfg);
  CHECK(r2.status == 2);
  CHECK(r2.err.find(":1:") != std::string::npos);
  std::remove(cfg.c_str());
}

TEST_CASE("validate subcommand reports and exits zero on a sound build") {
  const CmdResult r = run_cli("validate --samples 30000 --seed 2026");
  CHECK(r.status == 0);
  CHECK(r.out.find("[PASS]") != std::string::npos);
  CHECK(r.out.find("all checks passed") != std::string::npos);
  const CmdResult strict = run_cli(
      "validate --samples 30000 --seed 2026 --tolerance-profile strict");
  CHECK(strict.status == 0);
  CHECK(run_cli("validate --tolerance-profile bogus").status == 2);
}

TEST_CASE("multiuser evaluation through the cli") {
  const CmdResult r = run_cli(
      "ec --user multi-noma-total --method closed-form --rho-db 20 --theta 0.01 "
      "--total-users 12 --served-users 6");
  CHECK(r.status == 0);
  const auto lines = lines_of(r.out);
  REQUIRE(lines.size() == 2);
  CHECK(lines[1].rfind("noma,multi_total,closed_form,20,", 0) == 0);
  CHECK(lines[1].find(",3,") != std::string::npos);  // num_pairs column
}
