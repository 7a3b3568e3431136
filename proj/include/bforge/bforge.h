/*
 * Copyright 2026 The bforge Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface to bforge. Handles are opaque; every call returns a status and
 * records a message retrievable with bf_last_error. Strings returned through
 * char** are owned by the caller and released with bf_string_free.
 */
#ifndef BFORGE_BFORGE_H_
#define BFORGE_BFORGE_H_

#include <stdint.h>

#if defined(BFORGE_BUILDING_LIBRARY)
#define BF_API __attribute__((visibility("default")))
#else
#define BF_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  BF_OK = 0,
  /* Malformed input, unknown name or violated precondition. */
  BF_ERR_INPUT = 1,
  /* A structural or numerical invariant failed. */
  BF_ERR_NUMERIC = 2,
  BF_ERR_INTERNAL = 3
} bf_status;

typedef struct bf_context bf_context;
typedef struct bf_operator bf_operator;

BF_API const char* bf_version(void);
BF_API const char* bf_status_name(bf_status s);

BF_API bf_status bf_context_new(bf_context** out);
BF_API void bf_context_free(bf_context* ctx);
/* Default 1e-8; must be positive. */
BF_API bf_status bf_context_set_tol(bf_context* ctx, double tol);
BF_API bf_status bf_context_set_seed(bf_context* ctx, uint64_t seed);
/* Message of the last failed call on this context; empty after success. */
BF_API const char* bf_last_error(const bf_context* ctx);

BF_API void bf_string_free(char* s);

/* Operators. JSON uses {dA, dB, matrix} or {dA, dB, perm}. */
BF_API bf_status bf_operator_from_json(bf_context* ctx, const char* json, bf_operator** out);
BF_API bf_status bf_operator_from_file(bf_context* ctx, const char* path, bf_operator** out);
/* params_json may be NULL; see bf_fixture_names for the names. */
BF_API bf_status bf_operator_fixture(bf_context* ctx, const char* name, const char* params_json,
                                     bf_operator** out);
BF_API void bf_operator_free(bf_operator* op);
BF_API bf_status bf_operator_dims(const bf_operator* op, int* dA, int* dB);
BF_API bf_status bf_operator_to_json(bf_context* ctx, const bf_operator* op, int dense, char** out);
BF_API bf_status bf_fixture_names(bf_context* ctx, char** out_json);

BF_API bf_status bf_schmidt_rank(bf_context* ctx, const bf_operator* op, int* out);
BF_API bf_status bf_analyze(bf_context* ctx, const bf_operator* op, char** out_json);

/* Cost bounds, as CostReport JSON. */
BF_API bf_status bf_bound_permutation(bf_context* ctx, int r, char** out_json);
BF_API bf_status bf_bound_rank3(bf_context* ctx, int dA, int dB, char** out_json);
BF_API bf_status bf_bound_controlled(bf_context* ctx, int n_terms, char** out_json);
BF_API bf_status bf_bound_classical(bf_context* ctx, int r, int restore, long* out);
BF_API bf_status bf_recommend(bf_context* ctx, const bf_operator* op, char** out_json);

/*
 * Protocol simulation. options_json keys: mode ("enumerate" or "sample"),
 * group, extra_terms, force_mixed, events (bool), corrupt (bool, test hook).
 * A run that completes returns BF_OK; *pass reports the verification result.
 */
BF_API bf_status bf_protocol_names(bf_context* ctx, char** out_json);
BF_API bf_status bf_simulate(bf_context* ctx, const bf_operator* op, const char* protocol,
                             const char* options_json, char** out_json, int* pass);

/* Entangling power. options_json keys: restarts, max_iter, tol, dRA, dRB. */
BF_API bf_status bf_entpower_maximize(bf_context* ctx, const bf_operator* op,
                                      const char* options_json, char** out_json);
/* Closed-form input of a named case ("I.1", "I.3", "II", "III"); params_json may be NULL. */
BF_API bf_status bf_entpower_case(bf_context* ctx, const char* tag, const char* params_json,
                                  char** out_json);

/*
 * Classical synthesis. n_bits_A < 0 reads a "# bits-a N" line from the table.
 * regime is "restore" or "no_restore".
 */
BF_API bf_status bf_synthesize(bf_context* ctx, const char* truth_table, int n_bits_A,
                               const char* regime, char** out_json);
/* Truth table of a named map: identity, cnot, dcnot, swap, random, structured. */
BF_API bf_status bf_classical_map(bf_context* ctx, const char* name, const char* params_json,
                                  char** out_table);

/* Full acceptance table; *all_pass is set when every criterion passes. */
BF_API bf_status bf_report(bf_context* ctx, int timing, char** out_json, int* all_pass);

/* Indented text rendering of any JSON document produced above. */
BF_API bf_status bf_json_to_text(bf_context* ctx, const char* json, char** out_text);

#ifdef __cplusplus
}
#endif

#endif /* BFORGE_BFORGE_H_ */
