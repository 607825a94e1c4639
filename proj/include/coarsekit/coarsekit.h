/* Copyright 2026 The coarsekit Authors
 * SPDX-License-Identifier: Apache-2.0 */

/* C interface to the coarsekit library.
 *
 * Every function returns a ck_status. On failure the message for the calling
 * thread is available from ck_last_error() until the next call on that thread.
 * Strings handed out by the library are released with ck_string_free. */

#ifndef COARSEKIT_COARSEKIT_H_
#define COARSEKIT_COARSEKIT_H_

#include <stddef.h>
#include <stdint.h>

#if defined(COARSEKIT_BUILDING)
#define CK_API __attribute__((visibility("default")))
#else
#define CK_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ck_status {
  CK_OK = 0,
  CK_REFUTED = 2,
  CK_INPUT_ERROR = 3,
  CK_STUCK_LIFT = 4,
  CK_INTERNAL = 5
} ck_status;

typedef struct ck_space ck_space;

typedef struct ck_run_options {
  uint64_t seed;
  int seed_set;          /* nonzero: seed overrides the spec's seed */
  unsigned threads;      /* 0: COARSEKIT_THREADS, else 1 */
  double tolerance;
  int tolerance_set;     /* nonzero: tolerance overrides every stage */
  const char* out_dir;   /* NULL: do not write files */
} ck_run_options;

CK_API const char* ck_version(void);
CK_API const char* ck_last_error(void);
CK_API void ck_string_free(char* s);

/* Spaces. */
CK_API ck_status ck_space_from_json(const char* json_text, const char* base_dir, ck_space** out);
CK_API ck_status ck_space_load_edges(const char* path, size_t basepoint, ck_space** out);
CK_API ck_status ck_cone_from_json(const char* json_text, ck_space** out);
CK_API void ck_space_free(ck_space* space);
CK_API ck_status ck_space_size(const ck_space* space, size_t* out);
CK_API ck_status ck_space_distance(const ck_space* space, size_t a, size_t b, double* out);
/* JSON summary of the space. */
CK_API ck_status ck_space_describe(const ck_space* space, char** out_json);

/* Experiments. The report JSON is stored in *report (may be NULL). The
 * return value reflects the run: CK_OK, CK_REFUTED, CK_INPUT_ERROR or
 * CK_STUCK_LIFT. */
CK_API ck_status ck_run_experiment(const char* spec_path, const ck_run_options* opts, char** report);
CK_API ck_status ck_run_verb(const char* verb, const char* params_path, const ck_run_options* opts,
                             char** report);
/* Human-readable summary of a space descriptor, edge list, certificate or report. */
CK_API ck_status ck_describe_file(const char* path, char** out_text);

#ifdef __cplusplus
}
#endif

#endif /* COARSEKIT_COARSEKIT_H_ */
