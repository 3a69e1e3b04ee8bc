/*
 * Copyright 2026 The seedcomm Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Command-line front end over the C API.

#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "seedcomm/seedcomm.h"

namespace {

constexpr int kExitGeneric = 1;
constexpr int kExitUsage = 2;

int exit_code(sc_status status) {
  if (status == SC_OK) return 0;
  const sc_stage stage = sc_last_stage();
  std::fprintf(stderr, "seedcomm: %s\n", sc_last_error());
  if (stage == SC_STAGE_NONE) {
    return status == SC_ERR_PARSE || status == SC_ERR_INVALID_ARGUMENT
               ? kExitUsage
               : kExitGeneric;
  }
  if (stage == SC_STAGE_CONFIG) return kExitUsage;
  // ingest = 3 ... output = 10
  return static_cast<int>(stage) + 1;
}

struct RunOptions {
  std::string config;
  std::string out;
  std::vector<std::string> overrides;
  long long seed = -1;
  long long workers = -1;
};

void add_run_options(CLI::App* cmd, RunOptions& o) {
  cmd->add_option("--config", o.config, "key=value configuration file");
  cmd->add_option("--seed", o.seed, "master seed")->check(CLI::NonNegativeNumber);
  cmd->add_option("--workers", o.workers, "worker threads")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--set", o.overrides, "override a config key (key=value)");
}

// Builds the config; returns nullptr after reporting on failure.
sc_config* build_config(const RunOptions& o, int& code) {
  sc_config* config = nullptr;
  sc_status s = o.config.empty() ? sc_config_new(&config)
                                 : sc_config_load(o.config.c_str(), &config);
  auto set = [&](const std::string& key, const std::string& value) {
    if (s == SC_OK) s = sc_config_set(config, key.c_str(), value.c_str());
  };
  for (const std::string& kv : o.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "seedcomm: --set expects key=value, got '%s'\n",
                   kv.c_str());
      sc_config_free(config);
      code = kExitUsage;
      return nullptr;
    }
    set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (o.seed >= 0) set("seed", std::to_string(o.seed));
  if (o.workers >= 0) set("workers", std::to_string(o.workers));
  if (!o.out.empty()) set("out", o.out);
  if (s == SC_OK) s = sc_config_validate(config);
  if (s != SC_OK) {
    code = exit_code(s);
    if (sc_last_stage() == SC_STAGE_NONE) code = kExitUsage;
    sc_config_free(config);
    return nullptr;
  }
  return config;
}

void print_report(const char* label, const sc_report& r) {
  if (label != nullptr) {
    std::printf("%s\t%.6f\t%.6f\t%.6f\n", label, r.f1, r.jaccard, r.onmi);
    return;
  }
  std::printf("f1\t%.17g\njaccard\t%.17g\nonmi\t%.17g\n", r.f1, r.jaccard,
              r.onmi);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Seeded community detection: locate and rewrite communities"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(sc_version()));

  struct Command {
    const char* name;
    const char* help;
    sc_command command;
  };
  const Command commands[] = {
      {"pipeline", "train both stages, detect and evaluate", SC_CMD_PIPELINE},
      {"train-locator", "train the order-embedding locator", SC_CMD_TRAIN_LOCATOR},
      {"train-rewriter", "train the rewriter from a saved locator",
       SC_CMD_TRAIN_REWRITER},
      {"detect", "locate and rewrite with saved checkpoints", SC_CMD_DETECT},
  };
  std::vector<RunOptions> run_options(std::size(commands));
  std::vector<CLI::App*> run_apps;
  for (std::size_t i = 0; i < std::size(commands); ++i) {
    CLI::App* cmd = app.add_subcommand(commands[i].name, commands[i].help);
    add_run_options(cmd, run_options[i]);
    run_apps.push_back(cmd);
  }

  RunOptions ablate_options;
  CLI::App* ablate = app.add_subcommand(
      "ablate", "score random ego nets, locator and rewriter outputs");
  add_run_options(ablate, ablate_options);

  std::string predictions, truths, eval_out;
  CLI::App* eval = app.add_subcommand("eval", "score predictions against truth");
  eval->add_option("predictions", predictions, "predicted community file")
      ->required();
  eval->add_option("truths", truths, "ground-truth community file")->required();
  eval->add_option("--out", eval_out, "directory for metrics.tsv");

  sc_synth_params synth_params;
  sc_synth_defaults(&synth_params);
  std::string synth_out = "synth";
  CLI::App* synth = app.add_subcommand("synth", "write a planted-partition benchmark");
  synth->add_option("--communities", synth_params.communities, "group count");
  synth->add_option("--min-size", synth_params.min_size, "smallest group");
  synth->add_option("--max-size", synth_params.max_size, "largest group");
  synth->add_option("--p-in", synth_params.p_in, "intra-group edge probability");
  synth->add_option("--links", synth_params.cross_links, "random cross links");
  synth->add_option("--seed", synth_params.seed, "generator seed");
  synth->add_option("--out", synth_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  for (std::size_t i = 0; i < run_apps.size(); ++i) {
    if (!run_apps[i]->parsed()) continue;
    int code = 0;
    sc_config* config = build_config(run_options[i], code);
    if (config == nullptr) return code;
    const sc_status s = sc_run(config, commands[i].command);
    sc_config_free(config);
    return exit_code(s);
  }

  if (ablate->parsed()) {
    int code = 0;
    sc_config* config = build_config(ablate_options, code);
    if (config == nullptr) return code;
    sc_ablation rows{};
    const sc_status s = sc_ablate(config, &rows);
    sc_config_free(config);
    if (s != SC_OK) return exit_code(s);
    std::printf("method\tf1\tjaccard\tonmi\n");
    print_report("random", rows.random);
    print_report("locator", rows.locator);
    print_report("rewriter", rows.rewriter);
    return 0;
  }

  if (eval->parsed()) {
    sc_report report{};
    const sc_status s = sc_eval_files(predictions.c_str(), truths.c_str(),
                                      eval_out.c_str(), &report);
    if (s != SC_OK) return exit_code(s);
    print_report(nullptr, report);
    return 0;
  }

  if (synth->parsed()) {
    return exit_code(sc_synth(&synth_params, synth_out.c_str()));
  }
  return kExitUsage;
}
