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

#include "nomafbl.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

#include "nomafbl/effcap.hpp"
#include "nomafbl/errors.hpp"
#include "nomafbl/specfun.hpp"
#include "nomafbl/sweep.hpp"
#include "nomafbl/validate.hpp"

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

// Runs fn, translating C++ exceptions into status codes. ConvergenceError
// writes its best estimate through best (when provided) before reporting.
template <typename Fn>
nf_status guarded(double* best, Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return NF_OK;
  } catch (const nomafbl::ConvergenceError& e) {
    set_error(e.what());
    if (best) *best = e.best_estimate();
    return NF_ERR_CONVERGENCE;
  } catch (const nomafbl::ConfigError& e) {
    set_error(e.what());
    return NF_ERR_CONFIG;
  } catch (const std::domain_error& e) {
    set_error(e.what());
    return NF_ERR_DOMAIN;
  } catch (const std::invalid_argument& e) {
    set_error(e.what());
    return NF_ERR_CONFIG;
  } catch (const std::exception& e) {
    set_error(e.what());
    return NF_ERR_INTERNAL;
  }
}

nomafbl::channel::LinkConfig to_link(const nf_link_params& p) {
  return {p.rho, p.alpha1, p.alpha2, p.blocklength, p.epsilon};
}

nomafbl::effcap::CalcOptions to_opts(const nf_calc_options* o) {
  nomafbl::effcap::CalcOptions opts;
  if (o) {
    opts.clamp_negative_rate = o->clamp_negative_rate != 0;
    opts.oma_weak_as_printed = o->oma_weak_as_printed != 0;
    opts.approx_dispersion = o->approx_dispersion != 0;
  }
  return opts;
}

nomafbl::effcap::McConfig to_mc(const nf_mc_params* m) {
  nomafbl::effcap::McConfig mc;
  if (m) {
    mc.num_samples = m->num_samples;
    mc.master_seed = m->seed;
  }
  return mc;
}

nomafbl::effcap::MultiUserConfig to_multi(const nf_multiuser_params& p) {
  nomafbl::effcap::MultiUserConfig mu;
  mu.total_users = p.total_users;
  mu.served_users = p.served_users;
  mu.pairing = static_cast<nomafbl::effcap::Pairing>(p.pairing);
  mu.alpha1 = p.alpha1;
  mu.alpha2 = p.alpha2;
  mu.pairing_seed = p.pairing_seed;
  return mu;
}

}  // namespace

struct nf_sweep {
  nomafbl::sweep::SweepSpec spec;
  std::vector<nomafbl::sweep::ResultRow> rows;
  std::string csv;
  bool ran = false;
};

extern "C" {

const char* nf_version(void) { return "1.0.0"; }

const char* nf_status_name(nf_status status) {
  switch (status) {
    case NF_OK:
      return "ok";
    case NF_ERR_DOMAIN:
      return "domain_error";
    case NF_ERR_CONVERGENCE:
      return "convergence_error";
    case NF_ERR_CONFIG:
      return "config_error";
    case NF_ERR_IO:
      return "io_error";
    case NF_ERR_INVALID_ARGUMENT:
      return "invalid_argument";
    case NF_ERR_INTERNAL:
      return "internal_error";
  }
  return "unknown";
}

const char* nf_last_error_message(void) { return g_last_error.c_str(); }

nf_link_params nf_link_params_default(void) { return {100.0, 0.3, 0.7, 400, 1e-6}; }
nf_mc_params nf_mc_params_default(void) { return {100000, 0x9e3779b97f4a7c15ULL}; }
nf_calc_options nf_calc_options_default(void) { return {0, 0, 0}; }
nf_multiuser_params nf_multiuser_params_default(void) {
  return {12, 6, NF_PAIRING_STRONGEST_WEAKEST, 0.3, 0.7, 0};
}

nf_status nf_gaussian_q(double x, double* out) {
  if (!out) {
    set_error("nf_gaussian_q: out is null");
    return NF_ERR_INVALID_ARGUMENT;
  }
  return guarded(nullptr, [&] { *out = nomafbl::specfun::gaussian_q(x); });
}

nf_status nf_inv_gaussian_q(double eps, double* out) {
  if (!out) {
    set_error("nf_inv_gaussian_q: out is null");
    return NF_ERR_INVALID_ARGUMENT;
  }
  return guarded(nullptr, [&] { *out = nomafbl::specfun::inv_gaussian_q(eps); });
}

nf_status nf_tricomi_u(double a, double b, double z, double* out) {
  if (!out) {
    set_error("nf_tricomi_u: out is null");
    return NF_ERR_INVALID_ARGUMENT;
  }
  return guarded(out, [&] { *out = nomafbl::specfun::tricomi_u(a, b, z); });
}

nf_status nf_exp_integral_ei(double x, double* out) {
  if (!out) {
    set_error("nf_exp_integral_ei: out is null");
    return NF_ERR_INVALID_ARGUMENT;
  }
  return guarded(nullptr, [&] { *out = nomafbl::specfun::exp_integral_ei(x); });
}

nf_status nf_ec(nf_user user, nf_method method, const nf_link_params* link, double theta,
                const nf_mc_params* mc, const nf_calc_options* opts, nf_ec_result* out) {
  if (!link || !out) {
    set_error("nf_ec: link/out must not be null");
    return NF_ERR_INVALID_ARGUMENT;
  }
  *out = {0.0, 0.0, 0};
  return guarded(&out->value, [&] {
    const auto est = nomafbl::effcap::ec_estimate(
        static_cast<nomafbl::effcap::UserRole>(user),
        static_cast<nomafbl::effcap::Method>(method), to_link(*link),
        nomafbl::effcap::QosConfig{theta}, to_mc(mc), to_opts(opts));
    *out = {est.value, est.std_error, est.samples_or_nodes};
  });
}

nf_status nf_total_ec(nf_scheme scheme, nf_method method, const nf_link_params* link,
                      double theta, const nf_mc_params* mc, const nf_calc_options* opts,
                      nf_ec_result* out) {
  if (!link || !out) {
    set_error("nf_total_ec: link/out must not be null");
    return NF_ERR_INVALID_ARGUMENT;
  }
  *out = {0.0, 0.0, 0};
  return guarded(&out->value, [&] {
    const auto t = nomafbl::effcap::total_ec_detailed(
        static_cast<nomafbl::effcap::Scheme>(scheme),
        static_cast<nomafbl::effcap::Method>(method), to_link(*link),
        nomafbl::effcap::QosConfig{theta}, nomafbl::effcap::QosConfig{theta}, to_mc(mc),
        to_opts(opts));
    *out = {t.value, t.std_error, t.strong.samples_or_nodes + t.weak.samples_or_nodes};
  });
}

nf_status nf_multiuser_total_ec(const nf_multiuser_params* mu, nf_scheme scheme,
                                nf_method method, const nf_link_params* link, double theta,
                                const nf_mc_params* mc, const nf_calc_options* opts,
                                nf_ec_result* out) {
  if (!mu || !link || !out) {
    set_error("nf_multiuser_total_ec: mu/link/out must not be null");
    return NF_ERR_INVALID_ARGUMENT;
  }
  *out = {0.0, 0.0, 0};
  return guarded(&out->value, [&] {
    const auto t = nomafbl::effcap::multiuser_total_ec_detailed(
        to_multi(*mu), static_cast<nomafbl::effcap::Scheme>(scheme),
        static_cast<nomafbl::effcap::Method>(method), to_link(*link),
        nomafbl::effcap::QosConfig{theta}, to_mc(mc), to_opts(opts));
    *out = {t.value, t.std_error, 0};
  });
}

nf_status nf_delay_violation_prob(double theta, double mu, double d_max, double p_nonempty,
                                  double* out) {
  if (!out) {
    set_error("nf_delay_violation_prob: out is null");
    return NF_ERR_INVALID_ARGUMENT;
  }
  return guarded(nullptr, [&] {
    *out = nomafbl::effcap::delay_violation_prob(
        nomafbl::effcap::DelayModel{d_max, mu, p_nonempty}, nomafbl::effcap::QosConfig{theta});
  });
}

nf_status nf_sweep_create_preset(const char* name, nf_sweep** out) {
  if (!name || !out) {
    set_error("nf_sweep_create_preset: name/out must not be null");
    return NF_ERR_INVALID_ARGUMENT;
  }
  return guarded(nullptr, [&] {
    auto* s = new nf_sweep();
    try {
      s->spec = nomafbl::sweep::figure_preset(name);
    } catch (...) {
      delete s;
      throw;
    }
    *out = s;
  });
}

nf_status nf_sweep_create(const char* axis, const double* grid, size_t grid_len,
                          const nf_link_params* link, double rho_db, double theta,
                          const char* const* users, size_t users_len,
                          const char* const* methods, size_t methods_len, nf_sweep** out) {
  if (!axis || !grid || !link || !users || !methods || !out) {
    set_error("nf_sweep_create: null argument");
    return NF_ERR_INVALID_ARGUMENT;
  }
  nomafbl::sweep::SweepSpec spec;
  if (!nomafbl::sweep::parse_axis(axis, &spec.axis)) {
    set_error(std::string("nf_sweep_create: unknown axis '") + axis + "'");
    return NF_ERR_INVALID_ARGUMENT;
  }
  spec.grid.assign(grid, grid + grid_len);
  spec.link = to_link(*link);
  spec.rho_db = rho_db;
  spec.qos.theta = theta;
  for (size_t i = 0; i < users_len; ++i) {
    nomafbl::sweep::UserSel u;
    if (!users[i] || !nomafbl::sweep::parse_user_sel(users[i], &u)) {
      set_error(std::string("nf_sweep_create: unknown user '") +
                (users[i] ? users[i] : "(null)") + "'");
      return NF_ERR_INVALID_ARGUMENT;
    }
    spec.users.push_back(u);
  }
  for (size_t i = 0; i < methods_len; ++i) {
    nomafbl::effcap::Method m;
    if (!methods[i] || !nomafbl::sweep::parse_method(methods[i], &m)) {
      set_error(std::string("nf_sweep_create: unknown method '") +
                (methods[i] ? methods[i] : "(null)") + "'");
      return NF_ERR_INVALID_ARGUMENT;
    }
    spec.methods.push_back(m);
  }
  return guarded(nullptr, [&] {
    spec.validate();
    auto* s = new nf_sweep();
    s->spec = std::move(spec);
    *out = s;
  });
}

nf_status nf_sweep_set_theta_grid(nf_sweep* s, const double* values, size_t len) {
  if (!s || (!values && len > 0)) return NF_ERR_INVALID_ARGUMENT;
  s->spec.theta_grid.assign(values, values + len);
  return NF_OK;
}

nf_status nf_sweep_set_alpha1_grid(nf_sweep* s, const double* values, size_t len) {
  if (!s || (!values && len > 0)) return NF_ERR_INVALID_ARGUMENT;
  s->spec.alpha1_grid.assign(values, values + len);
  return NF_OK;
}

nf_status nf_sweep_set_mc(nf_sweep* s, const nf_mc_params* mc) {
  if (!s || !mc) return NF_ERR_INVALID_ARGUMENT;
  s->spec.mc = to_mc(mc);
  return NF_OK;
}

nf_status nf_sweep_set_options(nf_sweep* s, const nf_calc_options* opts) {
  if (!s || !opts) return NF_ERR_INVALID_ARGUMENT;
  s->spec.opts = to_opts(opts);
  return NF_OK;
}

nf_status nf_sweep_set_multiuser(nf_sweep* s, const nf_multiuser_params* mu) {
  if (!s || !mu) return NF_ERR_INVALID_ARGUMENT;
  s->spec.multi = to_multi(*mu);
  return NF_OK;
}

nf_status nf_sweep_set_threads(nf_sweep* s, int threads) {
  if (!s) return NF_ERR_INVALID_ARGUMENT;
  s->spec.threads = threads;
  return NF_OK;
}

nf_status nf_sweep_run(nf_sweep* s) {
  if (!s) return NF_ERR_INVALID_ARGUMENT;
  return guarded(nullptr, [&] {
    s->rows = nomafbl::sweep::run_sweep(s->spec);
    s->csv = nomafbl::sweep::to_csv(s->rows);
    s->ran = true;
  });
}

int64_t nf_sweep_row_count(const nf_sweep* s) {
  if (!s || !s->ran) return -1;
  return static_cast<int64_t>(s->rows.size());
}

nf_status nf_sweep_cell_status(const nf_sweep* s, int64_t row, nf_status* out) {
  if (!s || !out || !s->ran || row < 0 || row >= static_cast<int64_t>(s->rows.size())) {
    set_error("nf_sweep_cell_status: bad handle or row index");
    return NF_ERR_INVALID_ARGUMENT;
  }
  *out = static_cast<nf_status>(s->rows[static_cast<size_t>(row)].error_code);
  return NF_OK;
}

nf_status nf_sweep_csv(nf_sweep* s, const char** text) {
  if (!s || !text) return NF_ERR_INVALID_ARGUMENT;
  if (!s->ran) {
    set_error("nf_sweep_csv: call nf_sweep_run first");
    return NF_ERR_CONFIG;
  }
  *text = s->csv.c_str();
  return NF_OK;
}

nf_status nf_sweep_write_csv(nf_sweep* s, const char* path) {
  if (!s || !path) return NF_ERR_INVALID_ARGUMENT;
  if (!s->ran) {
    set_error("nf_sweep_write_csv: call nf_sweep_run first");
    return NF_ERR_CONFIG;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    set_error(std::string("nf_sweep_write_csv: cannot open '") + path + "' for writing");
    return NF_ERR_IO;
  }
  f << s->csv;
  f.close();
  if (!f) {
    set_error(std::string("nf_sweep_write_csv: write to '") + path + "' failed");
    return NF_ERR_IO;
  }
  return NF_OK;
}

nf_status nf_sweep_axis_column(const nf_sweep* s, const char** name) {
  if (!s || !name) return NF_ERR_INVALID_ARGUMENT;
  *name = nomafbl::sweep::axis_name(s->spec.axis);
  return NF_OK;
}

void nf_sweep_destroy(nf_sweep* s) { delete s; }

nf_status nf_validate_run(int strict, uint64_t mc_samples, uint64_t seed, char** report,
                          int* all_passed) {
  return guarded(nullptr, [&] {
    nomafbl::validate::ValidationOptions opts;
    opts.strict = strict != 0;
    if (mc_samples > 0) opts.mc_samples = mc_samples;
    if (seed > 0) opts.seed = seed;
    const nomafbl::validate::Report rep = nomafbl::validate::run_validation(opts);
    if (all_passed) *all_passed = rep.all_passed ? 1 : 0;
    if (report) {
      const std::string text = rep.text();
      char* buf = static_cast<char*>(std::malloc(text.size() + 1));
      if (!buf) throw std::runtime_error("nf_validate_run: out of memory");
      std::memcpy(buf, text.c_str(), text.size() + 1);
      *report = buf;
    }
  });
}

void nf_string_free(char* s) { std::free(s); }

}  // extern "C"
