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

// Command-line front-end. Talks to the pipeline only through the C API.

#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dialogsynth.h"

namespace {

struct Options {
  std::string config;
  std::vector<std::string> overrides;
  double scale = 0.0;
  bool force = false;
  bool dry_run = false;
  bool json = false;
  bool quiet = false;
};

int report_failure(ds_status s) {
  std::fprintf(stderr, "error: %s\n", ds_last_error());
  return ds_exit_code(s);
}

void on_progress(const char* stage, size_t done, size_t total, void*) {
  // Roughly every tenth of the stage, plus the last item.
  const size_t step = total < 10 ? 1 : total / 10;
  if (done == total || done % step == 0) {
    std::fprintf(stderr, "[%s] %zu/%zu\n", stage, done, total);
  }
}

// Opens the pipeline and runs the given stages in order.
int run_stages(const Options& o, const std::vector<std::string>& stages) {
  if (o.config.empty()) {
    std::fprintf(stderr, "error: --config is required\n");
    return 1;
  }
  std::vector<std::string> overrides = o.overrides;
  if (o.scale > 0.0) overrides.push_back("partition.scale=" + std::to_string(o.scale));
  std::vector<const char*> argv;
  for (const auto& s : overrides) argv.push_back(s.c_str());

  ds_pipeline* p = nullptr;
  ds_status s = ds_pipeline_open(o.config.c_str(), argv.data(), argv.size(), &p);
  if (s != DS_OK) return report_failure(s);
  if (!o.quiet) ds_pipeline_set_progress(p, on_progress, nullptr);

  int rc = 0;
  if (o.dry_run) {
    char* report = nullptr;
    s = ds_pipeline_dry_run(p, &report);
    if (s == DS_OK) {
      std::printf("%s\ndry run ok\n", report);
      ds_string_free(report);
    } else {
      rc = report_failure(s);
    }
  } else {
    for (const auto& stage : stages) {
      char* report = nullptr;
      char* summary = nullptr;
      s = ds_pipeline_run_stage(p, stage.c_str(), o.force ? 1 : 0, o.json ? &report : nullptr,
                                &summary);
      if (s != DS_OK) {
        std::fprintf(stderr, "stage %s failed\n", stage.c_str());
        rc = report_failure(s);
        break;
      }
      std::printf("%s\n", summary);
      if (report) std::printf("%s\n", report);
      ds_string_free(summary);
      ds_string_free(report);
    }
  }
  ds_pipeline_close(p);
  return rc;
}

std::vector<std::string> all_stage_names() {
  std::vector<std::string> out;
  for (size_t i = 0; const char* name = ds_stage_name(i); ++i) out.emplace_back(name);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spoken-dialogue corpus synthesis pipeline"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ds_version()));

  Options o;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("-c,--config", o.config, "Pipeline config (JSON)");
    cmd->add_option("--set", o.overrides, "Override a config field, e.g. thresholds.wer_en=0.08");
    cmd->add_option("--scale", o.scale, "Multiply partition targets")->check(CLI::PositiveNumber);
    cmd->add_flag("--force", o.force, "Discard previous stage outputs");
    cmd->add_flag("--dry-run", o.dry_run, "Validate config, inputs and backends only");
    cmd->add_flag("--json", o.json, "Print each stage report as JSON");
    cmd->add_flag("-q,--quiet", o.quiet, "No progress output");
  };

  std::vector<std::string> stage_names = all_stage_names();
  std::string chosen;
  for (const auto& name : stage_names) {
    auto* cmd = app.add_subcommand(name, "Run the " + name + " stage");
    add_common(cmd);
    cmd->callback([&, name] { chosen = name; });
  }

  std::string run_stage;
  auto* run = app.add_subcommand("run", "Run one stage, or every stage in order");
  add_common(run);
  run->add_option("stage", run_stage, "Stage name")->check(CLI::IsMember(stage_names));

  std::string metadata;
  bool skip_audio = false;
  auto* validate = app.add_subcommand("validate", "Validate a metadata file");
  validate->add_option("metadata", metadata, "metadata.json")->required();
  validate->add_flag("--no-audio", skip_audio, "Do not check audio files");

  std::string demo_dir;
  std::size_t demo_count = 200;
  std::uint64_t demo_seed = 7;
  auto* demo = app.add_subcommand("demo", "Write demo inputs and a config");
  demo->add_option("dir", demo_dir, "Output directory")->required();
  demo->add_option("--instructions", demo_count, "Number of seed instructions");
  demo->add_option("--seed", demo_seed, "Seed");

  CLI11_PARSE(app, argc, argv);

  if (validate->parsed()) {
    char* report = nullptr;
    int valid = 0;
    const ds_status s = ds_validate_metadata(metadata.c_str(), skip_audio ? 0 : 1, &report, &valid);
    if (s != DS_OK) return report_failure(s);
    std::printf("%s\n", report);
    ds_string_free(report);
    return valid ? 0 : 1;
  }
  if (demo->parsed()) {
    char* config = nullptr;
    const ds_status s = ds_write_demo_fixtures(demo_dir.c_str(), demo_count, demo_seed, &config);
    if (s != DS_OK) return report_failure(s);
    std::printf("%s\n", config);
    ds_string_free(config);
    return 0;
  }
  if (run->parsed()) {
    return run_stages(o, run_stage.empty() ? stage_names : std::vector<std::string>{run_stage});
  }
  return run_stages(o, {chosen});
}
