// Copyright 2026 The tndpq Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* C interface to the tndpq library. Every function returns a status; on
 * failure tndpq_last_error() describes the problem for the calling thread.
 * Strings returned through char** are owned by the caller and released
 * with tndpq_string_free. */
#ifndef TNDPQ_TNDPQ_H_
#define TNDPQ_TNDPQ_H_

#include <stddef.h>

#if defined(TNDPQ_BUILDING_LIBRARY)
#define TNDPQ_API __attribute__((visibility("default")))
#else
#define TNDPQ_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tndpq_status {
  TNDPQ_OK = 0,
  TNDPQ_SYNTAX_ERROR,
  TNDPQ_UNKNOWN_SYMBOL,
  TNDPQ_ILL_FORMED,
  TNDPQ_MIXED_VARIABLES,
  TNDPQ_NON_DETERMINISTIC_VALUE,
  TNDPQ_SHAPE_MISMATCH,
  TNDPQ_ORACLE_TOO_LARGE,
  TNDPQ_ZERO_DENOMINATOR,
  TNDPQ_SIDE_CONDITION_UNPROVED,
  TNDPQ_CONSISTENCY_ERROR,
  TNDPQ_PROVENANCE_MISMATCH,
  TNDPQ_UNKNOWN_CONDITION,
  TNDPQ_PARSE_ERROR,
  TNDPQ_SCHEMA_MISMATCH,
  TNDPQ_EMPTY_SUPPORT,
  TNDPQ_INVARIANT_VIOLATION,
  TNDPQ_INCOMPARABLE_SYSTEMS,
  TNDPQ_PRECONDITION_FAILED,
  TNDPQ_DERIVATION_FAILED,
  TNDPQ_RULE_NOT_ALLOWED,
  TNDPQ_THEOREM_DOES_NOT_APPLY,
  TNDPQ_UNSUPPORTED_TARGET,
  TNDPQ_IO_ERROR,
  TNDPQ_INVALID_ARGUMENT,
  TNDPQ_INTERNAL_ERROR
} tndpq_status;

typedef enum tndpq_format {
  TNDPQ_FORMAT_HUMAN = 0,
  TNDPQ_FORMAT_TSV = 1
} tndpq_format;

typedef struct tndpq_schema tndpq_schema;
typedef struct tndpq_training tndpq_training;
typedef struct tndpq_system tndpq_system;
typedef struct tndpq_source tndpq_source;

TNDPQ_API const char* tndpq_last_error(void);
TNDPQ_API const char* tndpq_status_name(tndpq_status status);
TNDPQ_API void tndpq_string_free(char* s);

/* Schemas */
TNDPQ_API tndpq_status tndpq_schema_load(const char* path, tndpq_schema** out);
TNDPQ_API tndpq_status tndpq_schema_parse(const char* text,
                                          tndpq_schema** out);
TNDPQ_API void tndpq_schema_free(tndpq_schema* schema);

/* Canonical form of a judgment (the probability may be omitted), followed
 * by its projection-reduced subject on a second line. */
TNDPQ_API tndpq_status tndpq_parse(const tndpq_schema* schema,
                                   const char* judgment, char** canonical);

/* Sets *exclusive to 1 or 0; the trace is optional. */
TNDPQ_API tndpq_status tndpq_exclusive(const tndpq_schema* schema,
                                       const char* term, const char* left,
                                       const char* right, int* exclusive,
                                       char** trace);

/* Training data and applied systems */
TNDPQ_API tndpq_status tndpq_training_load(const tndpq_schema* schema,
                                           const char* csv_path,
                                           tndpq_training** out);
TNDPQ_API void tndpq_training_free(tndpq_training* training);

/* `estimator` is "freq" or "laplace:<alpha>"; sigma may be empty. */
TNDPQ_API tndpq_status tndpq_learn(const tndpq_training* training,
                                   const char* sigma, const char* target,
                                   const char* estimator, tndpq_system** out);
TNDPQ_API tndpq_status tndpq_system_load(const tndpq_schema* schema,
                                         const char* path, tndpq_system** out);
TNDPQ_API tndpq_status tndpq_system_save(const tndpq_system* system,
                                         const char* path);
TNDPQ_API tndpq_status tndpq_system_text(const tndpq_system* system,
                                         char** text);
/* Number of atoms of the system's variable. */
TNDPQ_API tndpq_status tndpq_system_size(const tndpq_system* system,
                                         size_t* atoms);
TNDPQ_API void tndpq_system_free(tndpq_system* system);

/* Probability sources for derivations. A table source borrows the
 * training set, which must outlive it. A system source treats the modelled
 * variables as independent when `independent_variables` is nonzero. */
TNDPQ_API tndpq_status tndpq_source_from_training(
    const tndpq_training* training, const char* estimator, tndpq_source** out);
TNDPQ_API tndpq_status tndpq_source_from_systems(
    const tndpq_system* const* systems, size_t count,
    int independent_variables, tndpq_source** out);
TNDPQ_API void tndpq_source_free(tndpq_source* source);

/* Trust */

/* `kind` is "jt", "et:<m>", "wt:<m>" or "at:<m>". */
TNDPQ_API tndpq_status tndpq_compare(const tndpq_system* original,
                                     const tndpq_system* copy,
                                     const char* kind, double tol,
                                     tndpq_format format, int* verdict,
                                     char** report);

/* `variant` is "at", "nonet-at", "wt", "nonet-wt" or "et". Indices are
 * 1-based. Sets *certified when every step holds. */
TNDPQ_API tndpq_status tndpq_chain(const tndpq_system* system,
                                   const char* variant, size_t m, size_t k,
                                   size_t l, size_t steps, tndpq_format format,
                                   int* certified, char** table);

/* Proof scripts. With `check` set the claimed probabilities are kept and
 * every root is re-verified; *ok is 0 when a violation was found. */
TNDPQ_API tndpq_status tndpq_derive(const tndpq_schema* schema,
                                    const tndpq_source* source,
                                    const char* script_path, int check,
                                    int* ok, char** report);

/* `kind` is "jt", "et", "at" or "wt"; `mode` is "construct" or
 * "deconstruct". Nonzero `empirical` computes a verdict where no theorem
 * applies. */
TNDPQ_API tndpq_status tndpq_preserve(const tndpq_schema* schema,
                                      const tndpq_source* original,
                                      const tndpq_source* copy,
                                      const char* plan_path, const char* kind,
                                      const char* mode, int empirical,
                                      double tol, tndpq_format format,
                                      int* verdict, char** report);

/* Runs the property suites. *passed is 1 when no suite failed. */
TNDPQ_API tndpq_status tndpq_selftest(unsigned long long seed, size_t cases,
                                      int* passed, char** report);

#ifdef __cplusplus
}
#endif

#endif /* TNDPQ_TNDPQ_H_ */
