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
// Command-line front end. Talks to the core exclusively through the C API
// in nomafbl.h.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nomafbl.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitUsage = 2;

[[noreturn]] void die_usage(const std::string& msg) {
  std::cerr << "error: " << msg << "\n";
  std::exit(kExitUsage);
}

[[noreturn]] void die_error(const std::string& msg) {
  std::cerr << "error: " << msg << "\n";
  std::exit(kExitError);
}

std::string snake(std::string s) {
  for (char& c : s)
    if (c == '-') c = '_';
  return s;
}

// ---------------------------------------------------------------------------
// flat key = value configuration files; keys use the CSV column vocabulary

struct KvConfig {
  std::map<std::string, std::pair<std::string, int>> values;  // key -> (value, line)
  std::string path;

  bool has(const std::string& key) const { return values.count(key) > 0; }

  static KvConfig load(const std::string& path) {
    std::ifstream f(path);
    if (!f) die_usage("cannot open config file '" + path + "'");
    KvConfig cfg;
    cfg.path = path;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
      ++lineno;
      std::string s = line;
      const auto hash = s.find('#');
      if (hash != std::string::npos) s.erase(hash);
      auto trim = [](std::string& t) {
        const auto b = t.find_first_not_of(" \t\r");
        const auto e = t.find_last_not_of(" \t\r");
        t = b == std::string::npos ? "" : t.substr(b, e - b + 1);
      };
      trim(s);
      if (s.empty()) continue;
      const auto eq = s.find('=');
      if (eq == std::string::npos)
        die_usage(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
      std::string key = s.substr(0, eq), value = s.substr(eq + 1);
      trim(key);
      trim(value);
      if (key.empty() || value.empty())
        die_usage(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
      cfg.values[snake(key)] = {value, lineno};
    }
    return cfg;
  }

  template <typename T>
  void apply(const CLI::Option* opt, const std::string& key, T* target) const {
    if (opt && opt->count() > 0) return;  // flags win
    const auto it = values.find(key);
    if (it == values.end()) return;
    std::istringstream in(it->second.first);
    T parsed{};
    in >> parsed;
    if (in.fail())
      die_usage(path + ":" + std::to_string(it->second.second) + ": cannot parse value for '" +
                key + "'");
    *target = parsed;
  }

  void apply_flag(const CLI::Option* opt, const std::string& key, bool* target) const {
    if (opt && opt->count() > 0) return;
    const auto it = values.find(key);
    if (it == values.end()) return;
    const std::string& v = it->second.first;
    if (v == "1" || v == "true" || v == "yes")
      *target = true;
    else if (v == "0" || v == "false" || v == "no")
      *target = false;
    else
      die_usage(path + ":" + std::to_string(it->second.second) + ": expected boolean for '" +
                key + "'");
  }

  void apply_string(const CLI::Option* opt, const std::string& key, std::string* target) const {
    if (opt && opt->count() > 0) return;
    const auto it = values.find(key);
    if (it != values.end()) *target = it->second.first;
  }
};

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  if (text.find(':') != std::string::npos) {
    double start, step, stop;
    char c1, c2;
    std::istringstream in(text);
    in >> start >> c1 >> step >> c2 >> stop;
    if (in.fail() || c1 != ':' || c2 != ':' || step <= 0)
      die_usage("bad grid '" + text + "' (want start:step:stop)");
    for (double v = start; v <= stop + 1e-9 * std::max(1.0, std::fabs(stop)); v += step)
      grid.push_back(v);
    return grid;
  }
  std::istringstream in(text);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    try {
      grid.push_back(std::stod(tok));
    } catch (...) {
      die_usage("bad grid value '" + tok + "'");
    }
  }
  return grid;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string tok;
  while (std::getline(in, tok, ',')) out.push_back(snake(tok));
  return out;
}

void check_status(nf_status st, const std::string& what) {
  if (st == NF_OK) return;
  const std::string msg =
      what + ": " + nf_status_name(st) + ": " + nf_last_error_message();
  if (st == NF_ERR_CONFIG || st == NF_ERR_INVALID_ARGUMENT) die_usage(msg);
  die_error(msg);
}

// shared link/qos/mc flag bundle
struct CommonArgs {
  double rho_db = 20.0;
  double theta = 0.01;
  double epsilon = 1e-6;
  std::uint64_t blocklength = 400;
  double alpha1 = 0.3;
  double alpha2 = 0.7;
  std::uint64_t samples = 100000;
  std::uint64_t seed = 0x9e3779b97f4a7c15ULL;
  bool clamp_rate = false;
  bool approx_dispersion = false;
  bool oma_weak_as_printed = false;
  int total_users = 12;
  int served_users = 6;
  std::string pairing = "strongest-weakest";
  int threads = 0;
  bool verbose = false;
  std::string config_path;

  CLI::Option* o_rho = nullptr;
  CLI::Option* o_theta = nullptr;
  CLI::Option* o_eps = nullptr;
  CLI::Option* o_n = nullptr;
  CLI::Option* o_a1 = nullptr;
  CLI::Option* o_a2 = nullptr;
  CLI::Option* o_samples = nullptr;
  CLI::Option* o_seed = nullptr;
  CLI::Option* o_clamp = nullptr;
  CLI::Option* o_approx = nullptr;
  CLI::Option* o_printed = nullptr;
  CLI::Option* o_total_users = nullptr;
  CLI::Option* o_served = nullptr;
  CLI::Option* o_pairing = nullptr;
  CLI::Option* o_threads = nullptr;
  CLI::Option* o_verbose = nullptr;

  void attach(CLI::App* app) {
    if (const char* env = std::getenv("NOMAFBL_SEED")) {
      try {
        seed = std::stoull(env, nullptr, 0);
      } catch (...) {
        die_usage("NOMAFBL_SEED is not a valid unsigned integer");
      }
    }
    o_rho = app->add_option("--rho-db", rho_db, "transmit SNR in dB");
    o_theta = app->add_option("--theta", theta, "delay QoS exponent");
    o_eps = app->add_option("--epsilon", epsilon, "transmission error probability");
    o_n = app->add_option("--blocklength", blocklength, "blocklength n (channel uses)");
    o_a1 = app->add_option("--alpha1", alpha1, "strong-user power coefficient");
    o_a2 = app->add_option("--alpha2", alpha2, "weak-user power coefficient");
    o_samples = app->add_option("--samples", samples, "Monte-Carlo samples per estimate");
    o_seed = app->add_option("--seed", seed, "master seed (env NOMAFBL_SEED overrides default)");
    o_clamp = app->add_flag("--clamp-rate", clamp_rate, "zero out negative rates");
    o_approx = app->add_flag("--approx-dispersion", approx_dispersion,
                             "quadrature with sqrt(V) ~ 1");
    o_printed = app->add_flag("--oma-weak-as-printed", oma_weak_as_printed,
                              "legacy weak-OMA closed-form variant");
    o_total_users = app->add_option("--total-users", total_users, "multiuser: users present");
    o_served = app->add_option("--served-users", served_users, "multiuser: users served (even)");
    o_pairing = app->add_option("--pairing", pairing,
                                "multiuser pairing: strongest-weakest|adjacent|random");
    o_threads = app->add_option("--threads", threads, "worker threads (0 = hardware)");
    o_verbose = app->add_flag("-v,--verbose", verbose, "progress notes on stderr");
    app->add_option("--config", config_path, "flat key = value configuration file");
  }

  void merge_config(const KvConfig& cfg) {
    cfg.apply(o_rho, "rho_db", &rho_db);
    cfg.apply(o_theta, "theta", &theta);
    cfg.apply(o_eps, "epsilon", &epsilon);
    cfg.apply(o_n, "blocklength", &blocklength);
    cfg.apply(o_a1, "alpha1", &alpha1);
    cfg.apply(o_a2, "alpha2", &alpha2);
    cfg.apply(o_samples, "samples", &samples);
    cfg.apply(o_seed, "seed", &seed);
    cfg.apply_flag(o_clamp, "clamp_rate", &clamp_rate);
    cfg.apply_flag(o_approx, "approx_dispersion", &approx_dispersion);
    cfg.apply_flag(o_printed, "oma_weak_as_printed", &oma_weak_as_printed);
    cfg.apply(o_total_users, "total_users", &total_users);
    cfg.apply(o_served, "served_users", &served_users);
    if (cfg.has("num_pairs") && (!o_served || o_served->count() == 0)) {
      int pairs = 0;
      cfg.apply(nullptr, "num_pairs", &pairs);
      served_users = 2 * pairs;
    }
    cfg.apply_string(o_pairing, "pairing", &pairing);
    cfg.apply(o_threads, "threads", &threads);
    cfg.apply_flag(o_verbose, "verbose", &verbose);
    if (!o_a2 || o_a2->count() == 0) {
      if (!cfg.has("alpha2")) alpha2 = 1.0 - alpha1;
    }
  }

  nf_link_params link(double rho_linear) const {
    return {rho_linear, alpha1, alpha2, blocklength, epsilon};
  }

  nf_mc_params mc() const { return {samples, seed}; }

  nf_calc_options options() const {
    return {clamp_rate ? 1 : 0, oma_weak_as_printed ? 1 : 0, approx_dispersion ? 1 : 0};
  }

  nf_multiuser_params multiuser() const {
    nf_multiuser_params mu = nf_multiuser_params_default();
    mu.total_users = total_users;
    mu.served_users = served_users;
    mu.alpha1 = alpha1;
    mu.alpha2 = alpha2;
    const std::string p = snake(pairing);
    if (p == "strongest_weakest")
      mu.pairing = NF_PAIRING_STRONGEST_WEAKEST;
    else if (p == "adjacent")
      mu.pairing = NF_PAIRING_ADJACENT;
    else if (p == "random")
      mu.pairing = NF_PAIRING_RANDOM;
    else
      die_usage("unknown pairing '" + pairing + "'");
    mu.pairing_seed = seed;
    return mu;
  }

  void validate_cli_ranges() const {
    if (!(epsilon > 0.0 && epsilon < 1.0))
      die_usage("--epsilon must lie in (0, 1)");
    if (!(theta > 0.0)) die_usage("--theta must be positive");
    if (!(alpha1 > 0.0 && alpha1 <= alpha2 && std::fabs(alpha1 + alpha2 - 1.0) <= 1e-9))
      die_usage("power coefficients must satisfy 0 < alpha1 <= alpha2, alpha1 + alpha2 = 1");
  }
};

void write_text(const std::string& path, const std::string& text, const char* what) {
  std::ofstream f(path, std::ios::binary);
  if (!f) die_error(std::string("cannot open '") + path + "' for writing");
  f << text;
  if (!f.good()) die_error(std::string("write failed for ") + what + " '" + path + "'");
}

void emit_plot_script(const std::string& csv_path, const std::string& axis) {
  std::string base = csv_path;
  const auto dot = base.rfind('.');
  if (dot != std::string::npos) base.erase(dot);
  const std::string script_path = base + "_plot.py";
  std::ostringstream py;
  py << "#!/usr/bin/env python3\n"
     << "\"\"\"Plot a nomafbl sweep CSV (generated; reads only the CSV).\"\"\"\n"
     << "import csv\n"
     << "from collections import defaultdict\n\n"
     << "import matplotlib\n"
     << "matplotlib.use(\"Agg\")\n"
     << "import matplotlib.pyplot as plt\n\n"
     << "CSV_PATH = \"" << csv_path << "\"\n"
     << "AXIS = \"" << axis << "\"\n\n"
     << "series = defaultdict(list)\n"
     << "with open(CSV_PATH) as f:\n"
     << "    for row in csv.DictReader(f):\n"
     << "        if row[\"diag\"].startswith(\"error=\"):\n"
     << "            continue\n"
     << "        key = [row[\"scheme\"], row[\"user\"], row[\"method\"]]\n"
     << "        for extra in (\"theta\", \"alpha1\"):\n"
     << "            if extra != AXIS:\n"
     << "                key.append(extra + \"=\" + row[extra])\n"
     << "        series[\" \".join(key)].append((float(row[AXIS]), float(row[\"ec\"])))\n\n"
     << "fig, ax = plt.subplots(figsize=(7, 5))\n"
     << "for label in sorted(series):\n"
     << "    pts = sorted(series[label])\n"
     << "    style = \"o\" if \"monte_carlo\" in label else \"-\"\n"
     << "    ax.plot([p[0] for p in pts], [p[1] for p in pts], style, label=label,\n"
     << "            markersize=4, linewidth=1.2)\n"
     << "if AXIS == \"theta\" or AXIS == \"epsilon\":\n"
     << "    ax.set_xscale(\"log\")\n"
     << "ax.set_xlabel(AXIS)\n"
     << "ax.set_ylabel(\"effective capacity [b/s/Hz]\")\n"
     << "ax.legend(fontsize=7)\n"
     << "ax.grid(True, alpha=0.3)\n"
     << "fig.tight_layout()\n"
     << "fig.savefig(CSV_PATH.rsplit(\".\", 1)[0] + \".png\", dpi=150)\n";
  write_text(script_path, py.str(), "plot script");
}

struct SweepHandle {
  nf_sweep* s = nullptr;
  ~SweepHandle() {
    if (s) nf_sweep_destroy(s);
  }
};

int run_single_ec(const CommonArgs& args, const std::string& user_arg,
                  const std::string& method_arg, const std::string& out_path) {
  const std::string user = snake(user_arg);
  const std::string method = snake(method_arg);
  const double grid[1] = {args.rho_db};
  const char* users[1] = {user.c_str()};
  const char* methods[1] = {method.c_str()};
  const nf_link_params link = args.link(1.0 /* overwritten by rho_db */);

  SweepHandle h;
  check_status(nf_sweep_create("rho_db", grid, 1, &link, args.rho_db, args.theta, users, 1,
                               methods, 1, &h.s),
               "ec");
  const nf_mc_params mc = args.mc();
  const nf_calc_options opts = args.options();
  const nf_multiuser_params mu = args.multiuser();
  nf_sweep_set_mc(h.s, &mc);
  nf_sweep_set_options(h.s, &opts);
  nf_sweep_set_multiuser(h.s, &mu);
  nf_sweep_set_threads(h.s, 1);
  check_status(nf_sweep_run(h.s), "ec");

  nf_status cell = NF_OK;
  check_status(nf_sweep_cell_status(h.s, 0, &cell), "ec");
  const char* text = nullptr;
  check_status(nf_sweep_csv(h.s, &text), "ec");
  if (cell != NF_OK) {
    std::cerr << "error: ec evaluation failed (" << nf_status_name(cell) << ")\n" << text;
    return kExitError;
  }
  if (out_path.empty())
    std::cout << text;
  else
    write_text(out_path, text, "csv");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"link-layer rate (effective capacity) analysis of two-user NOMA/OMA downlinks "
               "in the finite-blocklength regime"};
  app.require_subcommand(1);

  // ---- ec ----------------------------------------------------------------
  CLI::App* ec = app.add_subcommand("ec", "compute one EC value, printed as CSV");
  CommonArgs ec_args;
  std::string ec_user, ec_method = "closed-form", ec_out;
  CLI::Option* ec_user_opt = ec->add_option(
      "--user", ec_user,
      "noma-strong|noma-weak|oma-strong|oma-weak|noma-total|oma-total|"
      "multi-noma-total|multi-oma-total");
  CLI::Option* ec_method_opt =
      ec->add_option("--method", ec_method, "closed-form|quadrature|monte-carlo");
  ec->add_option("--out", ec_out, "write CSV to a file instead of stdout");
  ec_args.attach(ec);

  // ---- sweep ---------------------------------------------------------------
  CLI::App* sw = app.add_subcommand("sweep", "run a parameter sweep and write a CSV");
  CommonArgs sw_args;
  std::string sw_preset, sw_axis = "rho_db", sw_grid, sw_users, sw_methods;
  std::string sw_theta_grid, sw_alpha1_grid, sw_out;
  bool sw_emit_plot = false;
  CLI::Option* sw_preset_opt =
      sw->add_option("--preset", sw_preset, "figure preset fig1|fig2|fig3|fig4|fig5");
  CLI::Option* sw_axis_opt =
      sw->add_option("--axis", sw_axis, "rho_db|theta|alpha_pair|blocklength|epsilon");
  CLI::Option* sw_grid_opt =
      sw->add_option("--grid", sw_grid, "axis values: start:step:stop or v1,v2,...");
  CLI::Option* sw_users_opt = sw->add_option("--users", sw_users, "comma list of users");
  CLI::Option* sw_methods_opt =
      sw->add_option("--methods", sw_methods, "comma list of methods");
  CLI::Option* sw_tgrid_opt =
      sw->add_option("--theta-grid", sw_theta_grid, "secondary theta values v1,v2,...");
  CLI::Option* sw_agrid_opt =
      sw->add_option("--alpha1-grid", sw_alpha1_grid, "secondary alpha1 values v1,v2,...");
  CLI::Option* sw_out_opt = sw->add_option("--out", sw_out, "CSV output path");
  CLI::Option* sw_plot_opt =
      sw->add_flag("--emit-plot", sw_emit_plot, "also write a plot script next to the CSV");
  sw_args.attach(sw);

  // ---- validate ---------------------------------------------------------
  CLI::App* va = app.add_subcommand("validate", "run cross-method consistency checks");
  CommonArgs va_args;
  std::string va_profile = "default";
  CLI::Option* va_profile_opt =
      va->add_option("--tolerance-profile", va_profile, "default|strict");
  va_args.attach(va);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (ec->parsed()) {
    if (!ec_args.config_path.empty()) {
      const KvConfig cfg = KvConfig::load(ec_args.config_path);
      ec_args.merge_config(cfg);
      cfg.apply_string(ec_user_opt, "user", &ec_user);
      cfg.apply_string(ec_method_opt, "method", &ec_method);
    }
    if (ec_user.empty()) die_usage("ec: --user is required");
    ec_args.validate_cli_ranges();
    return run_single_ec(ec_args, ec_user, ec_method, ec_out);
  }

  if (sw->parsed()) {
    if (!sw_args.config_path.empty()) {
      const KvConfig cfg = KvConfig::load(sw_args.config_path);
      sw_args.merge_config(cfg);
      cfg.apply_string(sw_preset_opt, "preset", &sw_preset);
      cfg.apply_string(sw_axis_opt, "axis", &sw_axis);
      cfg.apply_string(sw_grid_opt, "grid", &sw_grid);
      cfg.apply_string(sw_users_opt, "users", &sw_users);
      cfg.apply_string(sw_methods_opt, "methods", &sw_methods);
      cfg.apply_string(sw_tgrid_opt, "theta_grid", &sw_theta_grid);
      cfg.apply_string(sw_agrid_opt, "alpha1_grid", &sw_alpha1_grid);
      cfg.apply_string(sw_out_opt, "out", &sw_out);
      cfg.apply_flag(sw_plot_opt, "emit_plot", &sw_emit_plot);
    }
    sw_args.validate_cli_ranges();

    SweepHandle h;
    if (!sw_preset.empty()) {
      for (const CLI::Option* o : {sw_axis_opt, sw_grid_opt, sw_users_opt, sw_methods_opt,
                                   sw_tgrid_opt, sw_agrid_opt})
        if (o->count() > 0)
          die_usage("sweep: --preset conflicts with --" + o->get_name(false, true));
      check_status(nf_sweep_create_preset(sw_preset.c_str(), &h.s), "sweep");
    } else {
      if (sw_grid.empty() || sw_users.empty() || sw_methods.empty())
        die_usage("sweep: need --preset or --grid/--users/--methods");
      const std::vector<double> grid = parse_grid(sw_grid);
      std::vector<std::string> users = split_list(sw_users);
      std::vector<std::string> methods = split_list(sw_methods);
      std::vector<const char*> user_ptrs, method_ptrs;
      for (const auto& u : users) user_ptrs.push_back(u.c_str());
      for (const auto& m : methods) method_ptrs.push_back(m.c_str());
      const nf_link_params link = sw_args.link(1.0);
      check_status(nf_sweep_create(snake(sw_axis).c_str(), grid.data(), grid.size(), &link,
                                   sw_args.rho_db, sw_args.theta, user_ptrs.data(),
                                   user_ptrs.size(), method_ptrs.data(), method_ptrs.size(),
                                   &h.s),
                   "sweep");
      if (!sw_theta_grid.empty()) {
        const std::vector<double> tg = parse_grid(sw_theta_grid);
        check_status(nf_sweep_set_theta_grid(h.s, tg.data(), tg.size()), "sweep");
      }
      if (!sw_alpha1_grid.empty()) {
        const std::vector<double> ag = parse_grid(sw_alpha1_grid);
        check_status(nf_sweep_set_alpha1_grid(h.s, ag.data(), ag.size()), "sweep");
      }
    }
    const nf_mc_params mc = sw_args.mc();
    const nf_calc_options opts = sw_args.options();
    const nf_multiuser_params mu = sw_args.multiuser();
    nf_sweep_set_mc(h.s, &mc);
    nf_sweep_set_options(h.s, &opts);
    nf_sweep_set_multiuser(h.s, &mu);
    nf_sweep_set_threads(h.s, sw_args.threads);

    // a plot script needs a CSV file to point at
    if (sw_emit_plot && sw_out.empty())
      sw_out = sw_preset.empty() ? "sweep.csv" : sw_preset + ".csv";

    if (sw_args.verbose) std::cerr << "sweep: evaluating cells...\n";
    check_status(nf_sweep_run(h.s), "sweep");
    if (sw_args.verbose)
      std::cerr << "sweep: " << nf_sweep_row_count(h.s) << " rows done\n";

    const char* text = nullptr;
    check_status(nf_sweep_csv(h.s, &text), "sweep");
    if (sw_out.empty()) {
      std::cout << text;
    } else {
      check_status(nf_sweep_write_csv(h.s, sw_out.c_str()), "sweep");
      if (sw_args.verbose) std::cerr << "sweep: wrote " << sw_out << "\n";
      if (sw_emit_plot) {
        const char* axis = nullptr;
        check_status(nf_sweep_axis_column(h.s, &axis), "sweep");
        emit_plot_script(sw_out, axis);
      }
    }
    return kExitOk;
  }

  if (va->parsed()) {
    if (!va_args.config_path.empty()) {
      const KvConfig cfg = KvConfig::load(va_args.config_path);
      va_args.merge_config(cfg);
      cfg.apply_string(va_profile_opt, "tolerance_profile", &va_profile);
    }
    if (va_profile != "default" && va_profile != "strict")
      die_usage("validate: --tolerance-profile must be default or strict");
    char* report = nullptr;
    int all_passed = 0;
    check_status(nf_validate_run(va_profile == "strict" ? 1 : 0, va_args.samples,
                                 va_args.seed, &report, &all_passed),
                 "validate");
    std::cout << report;
    nf_string_free(report);
    return all_passed ? kExitOk : kExitError;
  }

  return kExitUsage;
}
