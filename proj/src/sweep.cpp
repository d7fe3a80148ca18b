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

#include "nomafbl/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <thread>

#include "nomafbl/errors.hpp"

namespace nomafbl::sweep {

namespace {

struct CellCoord {
  double axis_value;
  double theta;
  double alpha1;
  UserSel user;
  effcap::Method method;
  std::size_t index;
};

const char* user_scheme(UserSel u) {
  switch (u) {
    case UserSel::noma_strong:
    case UserSel::noma_weak:
    case UserSel::noma_total:
    case UserSel::multi_noma_total:
      return "noma";
    default:
      return "oma";
  }
}

const char* user_field(UserSel u) {
  switch (u) {
    case UserSel::noma_strong:
    case UserSel::oma_strong:
      return "strong";
    case UserSel::noma_weak:
    case UserSel::oma_weak:
      return "weak";
    case UserSel::noma_total:
    case UserSel::oma_total:
      return "total";
    default:
      return "multi_total";
  }
}

std::string fmt_g12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

int status_of_exception(const std::exception& e) {
  if (dynamic_cast<const std::domain_error*>(&e)) return 1;
  if (dynamic_cast<const ConvergenceError*>(&e)) return 2;
  if (dynamic_cast<const ConfigError*>(&e)) return 3;
  return 6;
}

std::string sanitize_diag(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ' ';
  return s;
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
  unsigned n = threads > 0 ? static_cast<unsigned>(threads)
                           : std::max(1u, std::thread::hardware_concurrency());
  n = std::min<std::size_t>(n, count);
  if (n <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(n);
  for (unsigned t = 0; t < n; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        fn(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

const char* axis_name(Axis a) {
  switch (a) {
    case Axis::rho_db:
      return "rho_db";
    case Axis::theta:
      return "theta";
    case Axis::alpha_pair:
      return "alpha_pair";
    case Axis::blocklength:
      return "blocklength";
    case Axis::epsilon:
      return "epsilon";
  }
  return "?";
}

const char* method_name(effcap::Method m) {
  switch (m) {
    case effcap::Method::closed_form:
      return "closed_form";
    case effcap::Method::quadrature:
      return "quadrature";
    case effcap::Method::monte_carlo:
      return "monte_carlo";
  }
  return "?";
}

bool parse_axis(const std::string& s, Axis* out) {
  for (Axis a : {Axis::rho_db, Axis::theta, Axis::alpha_pair, Axis::blocklength, Axis::epsilon})
    if (s == axis_name(a)) {
      *out = a;
      return true;
    }
  return false;
}

bool parse_user_sel(const std::string& s, UserSel* out) {
  static const std::pair<const char*, UserSel> table[] = {
      {"noma_strong", UserSel::noma_strong},
      {"noma_weak", UserSel::noma_weak},
      {"oma_strong", UserSel::oma_strong},
      {"oma_weak", UserSel::oma_weak},
      {"noma_total", UserSel::noma_total},
      {"oma_total", UserSel::oma_total},
      {"multi_noma_total", UserSel::multi_noma_total},
      {"multi_oma_total", UserSel::multi_oma_total}};
  for (const auto& [name, sel] : table)
    if (s == name) {
      *out = sel;
      return true;
    }
  return false;
}

bool parse_method(const std::string& s, effcap::Method* out) {
  for (effcap::Method m : {effcap::Method::closed_form, effcap::Method::quadrature,
                           effcap::Method::monte_carlo})
    if (s == method_name(m)) {
      *out = m;
      return true;
    }
  return false;
}

void SweepSpec::validate() const {
  if (grid.empty()) throw ConfigError("SweepSpec: grid must be nonempty");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1]))
      throw ConfigError("SweepSpec: grid must be strictly increasing");
  if (users.empty()) throw ConfigError("SweepSpec: users must be nonempty");
  if (methods.empty()) throw ConfigError("SweepSpec: methods must be nonempty");
  if (axis == Axis::theta && !theta_grid.empty())
    throw ConfigError("SweepSpec: theta cannot be both the axis and a secondary grid");
  if (axis == Axis::alpha_pair && !alpha1_grid.empty())
    throw ConfigError("SweepSpec: alpha_pair cannot be both the axis and a secondary grid");
  // fixed parameters are validated cell-wise after axis substitution, but a
  // clearly broken fixed config should fail fast
  if (axis != Axis::theta && theta_grid.empty()) qos.validate();
  multi.validate();
}

std::size_t SweepSpec::cell_count() const {
  const std::size_t nt = theta_grid.empty() ? 1 : theta_grid.size();
  const std::size_t na = alpha1_grid.empty() ? 1 : alpha1_grid.size();
  return grid.size() * nt * na * users.size() * methods.size();
}

std::vector<ResultRow> run_sweep(const SweepSpec& spec) {
  spec.validate();

  const std::vector<double> thetas =
      spec.theta_grid.empty() ? std::vector<double>{spec.qos.theta} : spec.theta_grid;
  const std::vector<double> alphas =
      spec.alpha1_grid.empty() ? std::vector<double>{spec.link.alpha1} : spec.alpha1_grid;

  std::vector<CellCoord> cells;
  cells.reserve(spec.cell_count());
  std::size_t idx = 0;
  for (double g : spec.grid)
    for (double th : thetas)
      for (double a1 : alphas)
        for (UserSel u : spec.users)
          for (effcap::Method m : spec.methods) cells.push_back({g, th, a1, u, m, idx++});

  std::vector<ResultRow> rows(cells.size());

  auto eval_cell = [&](std::size_t i) {
    const CellCoord& c = cells[i];
    ResultRow& row = rows[i];

    channel::LinkConfig link = spec.link;
    double rho_db = spec.rho_db;
    effcap::QosConfig qos{c.theta};
    double alpha1 = c.alpha1;
    switch (spec.axis) {
      case Axis::rho_db:
        rho_db = c.axis_value;
        break;
      case Axis::theta:
        qos.theta = c.axis_value;
        break;
      case Axis::alpha_pair:
        alpha1 = c.axis_value;
        break;
      case Axis::blocklength:
        link.blocklength_n = static_cast<std::uint64_t>(std::llround(c.axis_value));
        break;
      case Axis::epsilon:
        link.epsilon = c.axis_value;
        break;
    }
    link.rho = std::pow(10.0, rho_db / 10.0);
    link.alpha1 = alpha1;
    link.alpha2 = 1.0 - alpha1;

    effcap::MultiUserConfig mu = spec.multi;
    mu.alpha1 = link.alpha1;
    mu.alpha2 = link.alpha2;

    effcap::McConfig mc = spec.mc;
    mc.master_seed = channel::derive_stream(spec.mc.master_seed, c.index);

    const bool is_multi =
        c.user == UserSel::multi_noma_total || c.user == UserSel::multi_oma_total;
    row.scheme = user_scheme(c.user);
    row.user = user_field(c.user);
    row.method = method_name(c.method);
    row.rho_db = rho_db;
    row.theta = qos.theta;
    row.epsilon = link.epsilon;
    row.blocklength = link.blocklength_n;
    row.alpha1 = link.alpha1;
    row.alpha2 = link.alpha2;
    row.num_pairs = is_multi ? mu.served_users / 2 : 1;

    try {
      double ec = 0.0, se = 0.0;
      std::uint64_t nodes = 0;
      switch (c.user) {
        case UserSel::noma_strong:
        case UserSel::noma_weak:
        case UserSel::oma_strong:
        case UserSel::oma_weak: {
          effcap::UserRole role = effcap::UserRole::noma_strong;
          if (c.user == UserSel::noma_weak) role = effcap::UserRole::noma_weak;
          if (c.user == UserSel::oma_strong) role = effcap::UserRole::oma_strong;
          if (c.user == UserSel::oma_weak) role = effcap::UserRole::oma_weak;
          const effcap::EcEstimate est =
              effcap::ec_estimate(role, c.method, link, qos, mc, spec.opts);
          ec = est.value;
          se = est.std_error;
          nodes = est.samples_or_nodes;
          break;
        }
        case UserSel::noma_total:
        case UserSel::oma_total: {
          const effcap::Scheme s = c.user == UserSel::noma_total ? effcap::Scheme::noma
                                                                 : effcap::Scheme::oma;
          const effcap::TotalEc t =
              effcap::total_ec_detailed(s, c.method, link, qos, qos, mc, spec.opts);
          ec = t.value;
          se = t.std_error;
          nodes = t.strong.samples_or_nodes + t.weak.samples_or_nodes;
          break;
        }
        case UserSel::multi_noma_total:
        case UserSel::multi_oma_total: {
          const effcap::Scheme s = c.user == UserSel::multi_noma_total ? effcap::Scheme::noma
                                                                       : effcap::Scheme::oma;
          const effcap::MultiTotal t =
              effcap::multiuser_total_ec_detailed(mu, s, c.method, link, qos, mc, spec.opts);
          ec = t.value;
          se = t.std_error;
          break;
        }
      }
      row.ec = ec;
      row.std_err = se;
      char diag[96];
      if (c.method == effcap::Method::monte_carlo) {
        std::snprintf(diag, sizeof(diag), "seed=0x%016llx;samples=%llu",
                      static_cast<unsigned long long>(mc.master_seed),
                      static_cast<unsigned long long>(mc.num_samples));
      } else if (c.method == effcap::Method::quadrature) {
        std::snprintf(diag, sizeof(diag), "evals=%llu",
                      static_cast<unsigned long long>(nodes));
      } else {
        std::snprintf(diag, sizeof(diag), "terms_or_evals=%llu",
                      static_cast<unsigned long long>(nodes));
      }
      row.diag = diag;
    } catch (const std::exception& e) {
      row.ec = std::numeric_limits<double>::quiet_NaN();
      row.std_err = std::numeric_limits<double>::quiet_NaN();
      row.error_code = status_of_exception(e);
      row.diag = sanitize_diag(std::string("error=") + e.what());
    }
  };

  parallel_for(cells.size(), spec.threads, eval_cell);
  return rows;
}

SweepSpec figure_preset(const std::string& name) {
  SweepSpec s;
  auto db_grid = [] {
    std::vector<double> g;
    for (int v = 0; v <= 40; v += 5) g.push_back(v);
    return g;
  };
  const std::vector<effcap::Method> both = {effcap::Method::closed_form,
                                            effcap::Method::monte_carlo};
  if (name == "fig1") {
    s.axis = Axis::rho_db;
    s.grid = db_grid();
    s.qos.theta = 0.01;
    s.users = {UserSel::noma_strong, UserSel::noma_weak, UserSel::oma_strong,
               UserSel::oma_weak};
    s.methods = both;
  } else if (name == "fig2") {
    s.axis = Axis::rho_db;
    s.grid = db_grid();
    s.theta_grid = {0.001, 0.01};
    s.users = {UserSel::noma_total, UserSel::oma_total};
    s.methods = both;
  } else if (name == "fig3") {
    s.axis = Axis::rho_db;
    s.grid = db_grid();
    s.theta_grid = {0.001, 0.01};
    s.users = {UserSel::multi_noma_total, UserSel::multi_oma_total, UserSel::noma_total,
               UserSel::oma_total};
    s.methods = both;
    s.multi.total_users = 12;
    s.multi.served_users = 6;
  } else if (name == "fig4") {
    s.axis = Axis::theta;
    s.grid = {1e-4, 2e-4, 5e-4, 1e-3, 2e-3, 5e-3, 1e-2, 2e-2, 5e-2, 1e-1};
    s.rho_db = 20.0;
    s.users = {UserSel::noma_strong, UserSel::noma_weak, UserSel::oma_strong,
               UserSel::oma_weak};
    s.methods = both;
  } else if (name == "fig5") {
    s.axis = Axis::rho_db;
    s.grid = db_grid();
    s.alpha1_grid = {0.2, 0.3, 0.4};
    s.qos.theta = 0.01;
    s.users = {UserSel::noma_strong, UserSel::noma_weak};
    s.methods = both;
  } else {
    throw ConfigError("figure_preset: unknown preset '" + name + "'");
  }
  return s;
}

std::string csv_header() {
  return "scheme,user,method,rho_db,theta,epsilon,blocklength,alpha1,alpha2,num_pairs,ec,"
         "std_err,diag";
}

std::string to_csv_row(const ResultRow& r) {
  std::string out;
  out.reserve(160);
  out += r.scheme;
  out += ',';
  out += r.user;
  out += ',';
  out += r.method;
  out += ',';
  out += fmt_g12(r.rho_db);
  out += ',';
  out += fmt_g12(r.theta);
  out += ',';
  out += fmt_g12(r.epsilon);
  out += ',';
  out += std::to_string(r.blocklength);
  out += ',';
  out += fmt_g12(r.alpha1);
  out += ',';
  out += fmt_g12(r.alpha2);
  out += ',';
  out += std::to_string(r.num_pairs);
  out += ',';
  out += fmt_g12(r.ec);
  out += ',';
  out += fmt_g12(r.std_err);
  out += ',';
  out += r.diag;
  return out;
}

std::string to_csv(const std::vector<ResultRow>& rows) {
  std::string out = csv_header();
  out += '\n';
  for (const ResultRow& r : rows) {
    out += to_csv_row(r);
    out += '\n';
  }
  return out;
}

}  // namespace nomafbl::sweep
