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

#include "dialogsynth.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>
#include <vector>

#include "pipeline/config.hpp"
#include "pipeline/fixtures.hpp"
#include "pipeline/pipeline.hpp"
#include "qa/qa_filter.hpp"
#include "util/error.hpp"

struct ds_pipeline {
  std::unique_ptr<dialogsynth::pipeline::Pipeline> impl;
  ds_progress_fn progress = nullptr;
  void* progress_user = nullptr;
};

namespace {

using dialogsynth::Error;
using dialogsynth::ErrorCode;
namespace pl = dialogsynth::pipeline;

thread_local std::string g_last_error;

ds_status to_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return DS_ERR_INVALID_ARGUMENT;
    case ErrorCode::kPrecondition: return DS_ERR_PRECONDITION;
    case ErrorCode::kParse: return DS_ERR_PARSE;
    case ErrorCode::kValidation: return DS_ERR_VALIDATION;
    case ErrorCode::kIo: return DS_ERR_IO;
    case ErrorCode::kBackend: return DS_ERR_BACKEND;
    case ErrorCode::kBackendUnreachable: return DS_ERR_BACKEND_UNREACHABLE;
    case ErrorCode::kMissingInput: return DS_ERR_MISSING_INPUT;
    case ErrorCode::kInternal: return DS_ERR_INTERNAL;
  }
  return DS_ERR_INTERNAL;
}

ds_status fail(ds_status s, const std::string& message) {
  g_last_error = message;
  return s;
}

// Runs fn, translating every exception into a status.
template <typename Fn>
ds_status guarded(Fn&& fn) {
  g_last_error.clear();
  try {
    fn();
    return DS_OK;
  } catch (const Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(DS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(DS_ERR_INTERNAL, e.what());
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void set_out(char** out, const std::string& s) {
  if (out) *out = dup_string(s);
}

}  // namespace

extern "C" {

const char* ds_version(void) { return "0.1.0"; }

const char* ds_last_error(void) { return g_last_error.c_str(); }

void ds_string_free(char* s) { std::free(s); }

int ds_exit_code(ds_status status) {
  switch (status) {
    case DS_OK: return 0;
    case DS_ERR_MISSING_INPUT: return pl::exit_code(ErrorCode::kMissingInput);
    case DS_ERR_BACKEND_UNREACHABLE: return pl::exit_code(ErrorCode::kBackendUnreachable);
    default: return 1;
  }
}

const char* ds_stage_name(size_t index) {
  const auto& stages = pl::all_stages();
  return index < stages.size() ? pl::to_string(stages[index]).data() : nullptr;
}

ds_status ds_pipeline_open(const char* config_path, const char* const* overrides,
                           size_t override_count, ds_pipeline** out) {
  if (!config_path || !out || (override_count && !overrides)) {
    return fail(DS_ERR_INVALID_ARGUMENT, "null argument");
  }
  *out = nullptr;
  return guarded([&] {
    std::vector<std::string> ov;
    for (size_t i = 0; i < override_count; ++i) {
      if (!overrides[i]) throw Error(ErrorCode::kInvalidArgument, "null override");
      ov.emplace_back(overrides[i]);
    }
    auto p = std::make_unique<ds_pipeline>();
    p->impl = std::make_unique<pl::Pipeline>(pl::load_config(config_path, ov));
    *out = p.release();
  });
}

void ds_pipeline_close(ds_pipeline* pipeline) { delete pipeline; }

ds_status ds_pipeline_set_progress(ds_pipeline* pipeline, ds_progress_fn fn, void* user) {
  if (!pipeline) return fail(DS_ERR_INVALID_ARGUMENT, "null pipeline");
  pipeline->progress = fn;
  pipeline->progress_user = user;
  if (!fn) {
    pipeline->impl->set_progress(nullptr);
  } else {
    pipeline->impl->set_progress([pipeline](pl::Stage s, std::size_t done, std::size_t total) {
      pipeline->progress(pl::to_string(s).data(), done, total, pipeline->progress_user);
    });
  }
  return DS_OK;
}

ds_status ds_pipeline_config(ds_pipeline* pipeline, char** config_json) {
  if (!pipeline || !config_json) return fail(DS_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { set_out(config_json, pl::config_to_json(pipeline->impl->config()).dump(2)); });
}

ds_status ds_pipeline_dry_run(ds_pipeline* pipeline, char** report_json) {
  if (!pipeline) return fail(DS_ERR_INVALID_ARGUMENT, "null pipeline");
  return guarded([&] { set_out(report_json, pipeline->impl->dry_run().dump(2)); });
}

ds_status ds_pipeline_run_stage(ds_pipeline* pipeline, const char* stage, int force,
                                char** report_json, char** summary) {
  if (!pipeline || !stage) return fail(DS_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const pl::StageReport r = pipeline->impl->run(pl::parse_stage(stage), force != 0);
    set_out(report_json, r.report.dump(2));
    set_out(summary, r.summary);
  });
}

ds_status ds_validate_metadata(const char* path, int check_audio, char** report_json,
                               int* valid) {
  if (!path) return fail(DS_ERR_INVALID_ARGUMENT, "null path");
  return guarded([&] {
    if (!std::filesystem::exists(path)) throw dialogsynth::MissingInputError(path);
    const auto report = pl::validate_corpus(path, check_audio != 0);
    if (valid) *valid = report.at("valid").get<bool>() ? 1 : 0;
    set_out(report_json, report.dump(2));
  });
}

ds_status ds_write_demo_fixtures(const char* dir, size_t instructions, uint64_t seed,
                                 char** config_path) {
  if (!dir) return fail(DS_ERR_INVALID_ARGUMENT, "null dir");
  return guarded([&] {
    pl::DemoOptions opts;
    opts.instructions = instructions;
    opts.seed = seed;
    set_out(config_path, pl::write_demo_fixtures(dir, opts).string());
  });
}

ds_status ds_error_rate_compute(const char* ref, const char* hyp, const char* language,
                                ds_error_rate* out) {
  if (!ref || !hyp || !language || !out) return fail(DS_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto r = dialogsynth::qa::score_transcript(ref, hyp, dialogsynth::parse_language(language));
    if (r.ref_len == 0) throw dialogsynth::PreconditionError("empty reference");
    *out = {r.substitutions, r.deletions, r.insertions, r.ref_len, r.rate()};
  });
}

}  // extern "C"
