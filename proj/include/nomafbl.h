/*
 * nomafbl - link-layer rate analysis for NOMA/OMA downlinks with finite blocklength
 * Copyright (C) 2026 the nomafbl developers
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 * ------------------------------------------------------------------------
 *
 * C interface of the nomafbl shared library. All entry points return an
 * nf_status; results come back through out-parameters. On failure,
 * nf_last_error_message() returns a thread-local description valid until
 * the next nomafbl call on the same thread.
 */

#ifndef NOMAFBL_H
#define NOMAFBL_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define NF_API __declspec(dllexport)
#else
#define NF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nf_status {
  NF_OK = 0,
  NF_ERR_DOMAIN = 1,      /* argument outside the supported domain */
  NF_ERR_CONVERGENCE = 2, /* tolerance not reached; *out holds the best estimate */
  NF_ERR_CONFIG = 3,      /* invalid configuration */
  NF_ERR_IO = 4,          /* file could not be written */
  NF_ERR_INVALID_ARGUMENT = 5, /* null pointer, unknown name string, ... */
  NF_ERR_INTERNAL = 6
} nf_status;

typedef enum nf_user {
  NF_USER_NOMA_STRONG = 0,
  NF_USER_NOMA_WEAK = 1,
  NF_USER_OMA_STRONG = 2,
  NF_USER_OMA_WEAK = 3
} nf_user;

typedef enum nf_scheme { NF_SCHEME_NOMA = 0, NF_SCHEME_OMA = 1 } nf_scheme;

typedef enum nf_method {
  NF_METHOD_CLOSED_FORM = 0,
  NF_METHOD_QUADRATURE = 1,
  NF_METHOD_MONTE_CARLO = 2
} nf_method;

typedef enum nf_pairing {
  NF_PAIRING_STRONGEST_WEAKEST = 0,
  NF_PAIRING_ADJACENT = 1,
  NF_PAIRING_RANDOM = 2
} nf_pairing;

/* rho is the linear transmit SNR (callers convert from dB themselves;
 * the sweep API takes dB since that is the usual axis unit). */
typedef struct nf_link_params {
  double rho;
  double alpha1;
  double alpha2;
  uint64_t blocklength;
  double epsilon;
} nf_link_params;

typedef struct nf_mc_params {
  uint64_t num_samples;
  uint64_t seed;
} nf_mc_params;

typedef struct nf_calc_options {
  int clamp_negative_rate;  /* zero out negative finite-blocklength rates */
  int oma_weak_as_printed;  /* legacy H-argument variant of the weak OMA closed form */
  int approx_dispersion;    /* quadrature with sqrt(V) ~ 1 instead of exact dispersion */
} nf_calc_options;

typedef struct nf_multiuser_params {
  int32_t total_users;
  int32_t served_users; /* even; the strongest gains are served */
  nf_pairing pairing;
  double alpha1; /* per-pair power split */
  double alpha2;
  uint64_t pairing_seed; /* NF_PAIRING_RANDOM only */
} nf_multiuser_params;

typedef struct nf_ec_result {
  double value;      /* b/s/Hz */
  double std_error;  /* delta-method standard error; Monte-Carlo only, else 0 */
  uint64_t samples_or_nodes;
} nf_ec_result;

NF_API const char* nf_version(void);
NF_API const char* nf_status_name(nf_status status);
NF_API const char* nf_last_error_message(void);

NF_API nf_link_params nf_link_params_default(void);
NF_API nf_mc_params nf_mc_params_default(void);
NF_API nf_calc_options nf_calc_options_default(void);
NF_API nf_multiuser_params nf_multiuser_params_default(void);

/* ---- special functions ------------------------------------------------ */

NF_API nf_status nf_gaussian_q(double x, double* out);
NF_API nf_status nf_inv_gaussian_q(double eps, double* out);
/* Confluent hypergeometric function of the second kind (a > 0, z > 0). */
NF_API nf_status nf_tricomi_u(double a, double b, double z, double* out);
/* Exponential integral Ei(x), x < 0 only. */
NF_API nf_status nf_exp_integral_ei(double x, double* out);

/* ---- effective capacity ------------------------------------------------ */

/* mc may be NULL unless method == NF_METHOD_MONTE_CARLO; opts may be NULL. */
NF_API nf_status nf_ec(nf_user user, nf_method method, const nf_link_params* link,
                       double theta, const nf_mc_params* mc, const nf_calc_options* opts,
                       nf_ec_result* out);

NF_API nf_status nf_total_ec(nf_scheme scheme, nf_method method, const nf_link_params* link,
                             double theta, const nf_mc_params* mc,
                             const nf_calc_options* opts, nf_ec_result* out);

NF_API nf_status nf_multiuser_total_ec(const nf_multiuser_params* mu, nf_scheme scheme,
                                       nf_method method, const nf_link_params* link,
                                       double theta, const nf_mc_params* mc,
                                       const nf_calc_options* opts, nf_ec_result* out);

/* p_nonempty * exp(-theta*mu*d_max), clamped to [0,1]. */
NF_API nf_status nf_delay_violation_prob(double theta, double mu, double d_max,
                                         double p_nonempty, double* out);

/* ---- parameter sweeps -------------------------------------------------- */

typedef struct nf_sweep nf_sweep; /* opaque */

/* Built-in figure presets: "fig1" .. "fig5". */
NF_API nf_status nf_sweep_create_preset(const char* name, nf_sweep** out);

/* Custom sweep. axis is one of "rho_db", "theta", "alpha_pair",
 * "blocklength", "epsilon". users entries: "noma_strong", "noma_weak",
 * "oma_strong", "oma_weak", "noma_total", "oma_total", "multi_noma_total",
 * "multi_oma_total". methods entries: "closed_form", "quadrature",
 * "monte_carlo". rho_db/theta are the fixed values used when the axis
 * sweeps something else. link->rho is ignored by sweeps (rho_db rules). */
NF_API nf_status nf_sweep_create(const char* axis, const double* grid, size_t grid_len,
                                 const nf_link_params* link, double rho_db, double theta,
                                 const char* const* users, size_t users_len,
                                 const char* const* methods, size_t methods_len,
                                 nf_sweep** out);

NF_API nf_status nf_sweep_set_theta_grid(nf_sweep* s, const double* values, size_t len);
NF_API nf_status nf_sweep_set_alpha1_grid(nf_sweep* s, const double* values, size_t len);
NF_API nf_status nf_sweep_set_mc(nf_sweep* s, const nf_mc_params* mc);
NF_API nf_status nf_sweep_set_options(nf_sweep* s, const nf_calc_options* opts);
NF_API nf_status nf_sweep_set_multiuser(nf_sweep* s, const nf_multiuser_params* mu);
NF_API nf_status nf_sweep_set_threads(nf_sweep* s, int threads);

NF_API nf_status nf_sweep_run(nf_sweep* s);

/* Number of result rows; -1 before nf_sweep_run. */
NF_API int64_t nf_sweep_row_count(const nf_sweep* s);
/* Per-row evaluation status (cells record their errors instead of aborting
 * the sweep). */
NF_API nf_status nf_sweep_cell_status(const nf_sweep* s, int64_t row, nf_status* out);
/* Full CSV text (header + rows). Owned by the handle, valid until destroy. */
NF_API nf_status nf_sweep_csv(nf_sweep* s, const char** text);
NF_API nf_status nf_sweep_write_csv(nf_sweep* s, const char* path);
/* Name of the column the sweep varies (for plotting). */
NF_API nf_status nf_sweep_axis_column(const nf_sweep* s, const char** name);

NF_API void nf_sweep_destroy(nf_sweep* s);

/* ---- validation --------------------------------------------------------- */

/* Runs the built-in cross-method checks. *report (if non-null) receives a
 * malloc'd text to release with nf_string_free; *all_passed receives 1/0.
 * Returns NF_OK when the checks executed, regardless of their outcome. */
NF_API nf_status nf_validate_run(int strict, uint64_t mc_samples, uint64_t seed,
                                 char** report, int* all_passed);
NF_API void nf_string_free(char* s);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* NOMAFBL_H */
