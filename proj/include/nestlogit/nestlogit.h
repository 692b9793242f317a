/*
   Copyright 2026 The nestlogit Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

/* C interface to the nestlogit library.
 *
 * Objects are opaque handles created by nl_*_create / nl_*_compute functions
 * and released with the matching nl_*_free. Every fallible function returns
 * an nl_status; on failure nl_last_error() describes the problem for the
 * calling thread. Per-product arrays follow the hierarchy's product order,
 * which is the order of the rows it was built from. Matrices are row-major.
 */

#ifndef NESTLOGIT_H
#define NESTLOGIT_H

#include <stddef.h>
#include <stdint.h>

#if defined(NESTLOGIT_BUILDING_LIBRARY)
#  define NL_API __attribute__((visibility("default")))
#else
#  define NL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nl_status {
  NL_OK = 0,
  NL_ERR_INVALID_ARGUMENT = 1,
  NL_ERR_EMPTY_INPUT = 2,
  NL_ERR_DUPLICATE_PRODUCT = 3,
  NL_ERR_OUT_OF_DOMAIN = 4,
  NL_ERR_EMPTY_CHOICE_SET = 5,
  NL_ERR_DEGENERATE_SHARE = 6,
  NL_ERR_NO_CONVERGENCE = 7,
  NL_ERR_UNKNOWN_ID = 8,
  NL_ERR_BAD_DIMENSIONS = 9,
  NL_ERR_SINGULAR_DESIGN = 10,
  NL_ERR_INTERNAL = 11
} nl_status;

/* Static name of a status code, e.g. "NL_ERR_OUT_OF_DOMAIN". */
NL_API const char* nl_status_name(nl_status status);

/* Message for the last failure on this thread; empty after success. */
NL_API const char* nl_last_error(void);

NL_API const char* nl_version(void);

/* ---------------------------------------------------------------- hierarchy */

typedef struct nl_hierarchy nl_hierarchy;

typedef struct nl_row {
  const char* group_id;
  const char* subgroup_id;
  const char* product_id;
} nl_row;

typedef struct nl_product_info {
  const char* product_id;
  const char* group_id;
  const char* subgroup_id;
  size_t group;    /* group index */
  size_t subgroup; /* flat subgroup index */
  size_t position; /* position inside the subgroup */
} nl_product_info;

typedef struct nl_params {
  double sigma1;
  double sigma2;
  int ordering_ok; /* 1 iff sigma2 <= sigma1 */
} nl_params;

/* Fails with NL_ERR_OUT_OF_DOMAIN unless both values lie in [0, 1). */
NL_API nl_status nl_params_validate(double sigma1, double sigma2, nl_params* out);

NL_API nl_status nl_hierarchy_create(const char* market_id, const nl_row* rows, size_t n_rows,
                                     nl_hierarchy** out);
NL_API void nl_hierarchy_free(nl_hierarchy* hierarchy);

NL_API const char* nl_hierarchy_market_id(const nl_hierarchy* hierarchy);
NL_API size_t nl_hierarchy_product_count(const nl_hierarchy* hierarchy);
NL_API size_t nl_hierarchy_subgroup_count(const nl_hierarchy* hierarchy);
NL_API size_t nl_hierarchy_group_count(const nl_hierarchy* hierarchy);

/* Strings stay valid for the lifetime of the hierarchy. */
NL_API nl_status nl_hierarchy_product(const nl_hierarchy* hierarchy, size_t index, nl_product_info* out);
NL_API nl_status nl_hierarchy_find_product(const nl_hierarchy* hierarchy, const char* product_id, size_t* index);
NL_API nl_status nl_hierarchy_subgroup(const nl_hierarchy* hierarchy, size_t index, const char** subgroup_id,
                                       size_t* group);
NL_API nl_status nl_hierarchy_group(const nl_hierarchy* hierarchy, size_t index, const char** group_id);

/* ------------------------------------------------------------------- shares */

typedef struct nl_share_table nl_share_table;

typedef enum nl_share_field {
  NL_JOINT = 0,             /* per product */
  NL_COND_PRODUCT = 1,      /* per product */
  NL_COND_SUBGROUP = 2,     /* per subgroup */
  NL_GROUP = 3,             /* per group */
  NL_LOG_JOINT = 4,         /* per product */
  NL_LOG_COND_PRODUCT = 5,  /* per product */
  NL_LOG_COND_SUBGROUP = 6, /* per subgroup */
  NL_LOG_GROUP = 7,         /* per group */
  NL_IV_SUBGROUP = 8,       /* per subgroup; computed tables only */
  NL_IV_GROUP = 9           /* per group; computed tables only */
} nl_share_field;

typedef enum nl_share_scalar {
  NL_OUTSIDE = 0,
  NL_LOG_OUTSIDE = 1,
  NL_IV_TOP = 2 /* computed tables only */
} nl_share_scalar;

/* Shares and inclusive values for mean utilities `delta` (length n). */
NL_API nl_status nl_shares_compute(const nl_hierarchy* hierarchy, const double* delta, size_t n,
                                   const nl_params* params, nl_share_table** out);

/* Share table from observed joint shares (length n) and the outside share.
 * Fails with NL_ERR_DEGENERATE_SHARE for nonpositive shares. */
NL_API nl_status nl_shares_observed(const nl_hierarchy* hierarchy, const double* joint, size_t n, double outside,
                                    nl_share_table** out);

NL_API void nl_share_table_free(nl_share_table* table);

/* Number of entries of `field`; 0 when the field is unavailable. */
NL_API size_t nl_share_table_size(const nl_share_table* table, nl_share_field field);

/* Copies `field` into out, which must hold exactly `len` entries. */
NL_API nl_status nl_share_table_get(const nl_share_table* table, nl_share_field field, double* out, size_t len);
NL_API nl_status nl_share_table_scalar(const nl_share_table* table, nl_share_scalar which, double* out);

/* Inclusive-value and conditional-share primitives. */
NL_API nl_status nl_subgroup_inclusive_value(const double* deltas, size_t n, double sigma1, double* out);
NL_API nl_status nl_group_inclusive_value(const double* subgroup_ivs, size_t n, double sigma2, double* out);
NL_API nl_status nl_top_inclusive_value(const double* group_ivs, size_t n, int include_outside, double* out);

/* ---------------------------------------------------------------- inversion */

/* Closed-form inversion; delta_out has n entries. */
NL_API nl_status nl_berry_invert(const nl_hierarchy* hierarchy, const nl_share_table* table,
                                 const nl_params* params, double* delta_out, size_t n);

/* Regressand and regressors y = log(s_j/s_0), x1 = log s_{j|hg}, x2 = log s_{h|g}. */
NL_API nl_status nl_regression_rows(const nl_hierarchy* hierarchy, const nl_share_table* table, double* y,
                                    double* x1, double* x2, size_t n);

typedef struct nl_newton_report {
  int iterations;
  double residual; /* max |log s_j(delta) - log target_j| */
} nl_newton_report;

/* Damped Newton inversion. On NL_ERR_NO_CONVERGENCE the report (if given)
 * still holds the iteration count and last residual. */
NL_API nl_status nl_numeric_invert(const nl_hierarchy* hierarchy, const nl_share_table* target,
                                   const nl_params* params, double tol, int max_iter, double* delta_out, size_t n,
                                   nl_newton_report* report);

/* ----------------------------------------------------------------- jacobian */

/* Index accepted by nl_d_group for the outside option. */
#define NL_OUTSIDE_GROUP ((size_t)-1)

NL_API nl_status nl_d_cond_product(const nl_hierarchy* hierarchy, const nl_share_table* table,
                                   const nl_params* params, size_t j, size_t k, double* out);
NL_API nl_status nl_d_cond_subgroup(const nl_hierarchy* hierarchy, const nl_share_table* table,
                                    const nl_params* params, size_t subgroup, size_t k, double* out);
NL_API nl_status nl_d_group(const nl_hierarchy* hierarchy, const nl_share_table* table, size_t group, size_t k,
                            double* out);

/* Analytic d s / d delta. matrix_out holds n*n entries, outside_row n. */
NL_API nl_status nl_jacobian(const nl_hierarchy* hierarchy, const double* delta, size_t n,
                             const nl_params* params, double* matrix_out, double* outside_row);

/* Central-difference d s / d delta with the given step. */
NL_API nl_status nl_jacobian_fd(const nl_hierarchy* hierarchy, const double* delta, size_t n,
                                const nl_params* params, double step, double* matrix_out, double* outside_row);

/* max |a - b| over both Jacobians of size n, relative to their largest entry
 * magnitude (floored at 1e-12). */
NL_API nl_status nl_jacobian_max_relative_error(const double* matrix_a, const double* outside_a,
                                                const double* matrix_b, const double* outside_b, size_t n,
                                                double* out);

/* --------------------------------------------------------------- montecarlo */

typedef struct nl_sim_config {
  uint64_t draws;
  uint64_t seed;
  uint64_t chunk_size; /* 0 selects the default */
  unsigned threads;    /* 0 selects hardware concurrency */
} nl_sim_config;

/* Simulated choice counts; counts_out has n entries. */
NL_API nl_status nl_simulate(const nl_hierarchy* hierarchy, const double* delta, size_t n,
                             const nl_params* params, const nl_sim_config* config, uint64_t* counts_out,
                             uint64_t* outside_count);

/* n standard Gumbel draws from substream 0 of `seed`. */
NL_API nl_status nl_sample_gumbel(uint64_t seed, double* out, size_t n);

/* Frequencies and binomial standard errors from counts over `total` draws. */
NL_API nl_status nl_empirical_shares(const uint64_t* counts, size_t n, uint64_t outside_count, uint64_t total,
                                     double* frequency, double* std_error, double* outside_frequency,
                                     double* outside_std_error);

/* -------------------------------------------------------------------- synth */

typedef struct nl_synth_market nl_synth_market;

typedef struct nl_synth_config {
  size_t n_groups;
  size_t n_subgroups_per_group;
  size_t n_products_per_subgroup;
  const double* beta;
  size_t beta_len;
  double x_low;
  double x_high;
  double xi_scale;
  double sigma1;
  double sigma2;
  uint64_t seed;
} nl_synth_config;

NL_API nl_status nl_synth_generate(const nl_synth_config* config, nl_synth_market** out);
NL_API void nl_synth_market_free(nl_synth_market* market);

/* Borrowed; valid while the market lives. */
NL_API const nl_hierarchy* nl_synth_market_hierarchy(const nl_synth_market* market);
NL_API nl_status nl_synth_market_delta(const nl_synth_market* market, double* out, size_t n);
/* Row-major n x beta_len covariates. */
NL_API nl_status nl_synth_market_covariates(const nl_synth_market* market, double* out, size_t len);

typedef struct nl_estimate {
  double sigma1_hat;
  double sigma2_hat;
  double residual_norm;
} nl_estimate;

/* Least squares of y on [X, x1, x2]; X is row-major n_rows x k. */
NL_API nl_status nl_estimate_linear(const double* y, const double* x1, const double* x2, size_t n_rows,
                                    const double* covariates, size_t k, double* beta_hat, nl_estimate* out);

#ifdef __cplusplus
}
#endif

#endif /* NESTLOGIT_H */
