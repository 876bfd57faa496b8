// Copyright 2026 The symsec Authors
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


#ifndef SYMSEC_SYMSEC_H_
#define SYMSEC_SYMSEC_H_

/* C interface of the symsec library. All handles are opaque; every function
 * returning int yields SYMSEC_OK or one of the error codes below, and
 * symsec_last_error() holds a message for the calling thread. */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define SYMSEC_API __declspec(dllexport)
#else
#define SYMSEC_API __attribute__((visibility("default")))
#endif

enum {
  SYMSEC_OK = 0,
  SYMSEC_E_INVALID_PARAMETER = 1,
  SYMSEC_E_INVALID_INPUT = 2,
  SYMSEC_E_UNSUPPORTED = 3,
  SYMSEC_E_INFEASIBLE = 4,
  SYMSEC_E_SOLVER = 5,
  SYMSEC_E_IO = 6,
  SYMSEC_E_NULL_ARGUMENT = 7,
  SYMSEC_E_BUFFER_TOO_SMALL = 8,
  SYMSEC_E_INTERNAL = 9
};

typedef struct symsec_config symsec_config;
typedef struct symsec_channels symsec_channels;
typedef struct symsec_solution symsec_solution;
typedef struct symsec_sweep symsec_sweep;

SYMSEC_API const char *symsec_version(void);
SYMSEC_API const char *symsec_error_name(int code);
SYMSEC_API const char *symsec_last_error(void);

/* Experiment configuration (JSON). NULL or "" gives the defaults. */
SYMSEC_API int symsec_config_parse(const char *json, symsec_config **out);
SYMSEC_API int symsec_config_load(const char *path, symsec_config **out);
/* Copies the JSON form into buf (NUL-terminated); *needed receives the
 * required size including the terminator. buf may be NULL when cap is 0. */
SYMSEC_API int symsec_config_to_json(const symsec_config *cfg, char *buf, size_t cap, size_t *needed);
/* Overrides the master seed, and the method list (comma-separated). */
SYMSEC_API int symsec_config_set_seed(symsec_config *cfg, uint64_t seed);
SYMSEC_API int symsec_config_set_methods(symsec_config *cfg, const char *methods);
SYMSEC_API void symsec_config_free(symsec_config *cfg);

/* Channel realization `realization` of the config's base point. */
SYMSEC_API int symsec_channels_draw(const symsec_config *cfg, uint64_t seed, uint64_t realization,
                                    symsec_channels **out);
SYMSEC_API int symsec_channels_dims(const symsec_channels *ch, int *n_beams, int *n_sat, int *n_antennas);
SYMSEC_API void symsec_channels_free(symsec_channels *ch);

/* method: "proposed", "pa_an" or "zf"; budgets and Q from cfg. */
SYMSEC_API int symsec_solve(const symsec_config *cfg, const symsec_channels *ch, const char *method,
                            symsec_solution **out);
/* SCA objective in bit/s/Hz. */
SYMSEC_API int symsec_solution_objective(const symsec_solution *sol, double *out);
/* Realized sum secrecy rate of the SUs (bit/s/Hz) with true (1) or estimated (0) Eve channels. */
SYMSEC_API int symsec_solution_sum_rate(const symsec_solution *sol, int use_true_eve, double *out);
/* Worst TU secrecy margin over the beams (bit/s/Hz), estimated Eve channels. */
SYMSEC_API int symsec_solution_tu_margin(const symsec_solution *sol, double *out);
SYMSEC_API int symsec_solution_iterations(const symsec_solution *sol, int *out);
/* Per-beam SINRs and rates as JSON. */
SYMSEC_API int symsec_solution_report(const symsec_solution *sol, int use_true_eve, char *buf, size_t cap,
                                      size_t *needed);
/* Tightness, rank and power-minimization checks as JSON; *passed is 1 when
 * all hold. Only the proposed method has the power-minimization check. */
SYMSEC_API int symsec_solution_verify(const symsec_solution *sol, int *passed, char *buf, size_t cap,
                                      size_t *needed);
SYMSEC_API int symsec_solution_to_json(const symsec_solution *sol, char *buf, size_t cap, size_t *needed);
SYMSEC_API void symsec_solution_free(symsec_solution *sol);

SYMSEC_API int symsec_sweep_run(const symsec_config *cfg, symsec_sweep **out);
SYMSEC_API int symsec_sweep_infeasible(const symsec_sweep *sw, int *out);
SYMSEC_API int symsec_sweep_to_csv(const symsec_sweep *sw, char *buf, size_t cap, size_t *needed);
SYMSEC_API int symsec_sweep_write_csv(const symsec_sweep *sw, const char *path);
/* Script refers to csv_name relative to its own directory. */
SYMSEC_API int symsec_sweep_write_plot(const symsec_sweep *sw, const char *path, const char *csv_name);
SYMSEC_API void symsec_sweep_free(symsec_sweep *sw);

#ifdef __cplusplus
}
#endif

#endif /* SYMSEC_SYMSEC_H_ */
