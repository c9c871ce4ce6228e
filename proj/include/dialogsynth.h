// Copyright 2026 The dialogsynth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DIALOGSYNTH_H_
#define DIALOGSYNTH_H_

/* C interface to the dialogsynth corpus-synthesis pipeline.
 *
 * Every function returns a ds_status. On failure ds_last_error() describes
 * the error for the calling thread until its next call into the library.
 * Strings returned through char** out-parameters are owned by the caller
 * and released with ds_string_free(). */

#include <stddef.h>
#include <stdint.h>

#if defined(DS_BUILDING_LIBRARY)
#define DS_API __attribute__((visibility("default")))
#else
#define DS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ds_status {
  DS_OK = 0,
  DS_ERR_INVALID_ARGUMENT = 1,
  DS_ERR_PRECONDITION = 2,
  DS_ERR_PARSE = 3,
  DS_ERR_VALIDATION = 4,
  DS_ERR_IO = 5,
  DS_ERR_BACKEND = 6,
  DS_ERR_BACKEND_UNREACHABLE = 7,
  DS_ERR_MISSING_INPUT = 8,
  DS_ERR_INTERNAL = 9
} ds_status;

typedef struct ds_pipeline ds_pipeline;

typedef void (*ds_progress_fn)(const char* stage, size_t done, size_t total, void* user);

typedef struct ds_error_rate {
  size_t substitutions;
  size_t deletions;
  size_t insertions;
  size_t ref_len;
  double rate;
} ds_error_rate;

DS_API const char* ds_version(void);
DS_API const char* ds_last_error(void);
DS_API void ds_string_free(char* s);

/* Process exit status for a status: 0 ok, 2 missing input, 3 unreachable
 * backend, 1 otherwise. */
DS_API int ds_exit_code(ds_status status);

/* Stage names in execution order. Returns NULL past the end. */
DS_API const char* ds_stage_name(size_t index);

/* Loads a JSON config; overrides are "dotted.key=value" strings applied
 * before validation. */
DS_API ds_status ds_pipeline_open(const char* config_path, const char* const* overrides,
                                  size_t override_count, ds_pipeline** out);
DS_API void ds_pipeline_close(ds_pipeline* pipeline);
DS_API ds_status ds_pipeline_set_progress(ds_pipeline* pipeline, ds_progress_fn fn, void* user);
/* Effective configuration as JSON. */
DS_API ds_status ds_pipeline_config(ds_pipeline* pipeline, char** config_json);
/* Validates inputs and backend reachability without writing anything. */
DS_API ds_status ds_pipeline_dry_run(ds_pipeline* pipeline, char** report_json);
/* Runs one stage. report_json and summary may be NULL. */
DS_API ds_status ds_pipeline_run_stage(ds_pipeline* pipeline, const char* stage, int force,
                                       char** report_json, char** summary);

/* Decodes and validates a metadata file; *valid is set to 0 or 1. */
DS_API ds_status ds_validate_metadata(const char* path, int check_audio, char** report_json,
                                      int* valid);

/* Writes demo inputs and a config into dir; *config_path may be NULL. */
DS_API ds_status ds_write_demo_fixtures(const char* dir, size_t instructions, uint64_t seed,
                                        char** config_path);

/* CER ("zh") or WER ("en") of hyp against ref after normalization. */
DS_API ds_status ds_error_rate_compute(const char* ref, const char* hyp, const char* language,
                                       ds_error_rate* out);

#ifdef __cplusplus
}
#endif

#endif /* DIALOGSYNTH_H_ */
