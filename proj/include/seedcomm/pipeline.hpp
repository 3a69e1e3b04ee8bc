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

// End-to-end orchestration: ingestion, preprocessing, locator and rewriter
// training, detection, evaluation, synthetic benchmarks and the ablation
// report. Every command writes its artifacts plus a manifest into the
// configured output directory.

#ifndef SEEDCOMM_PIPELINE_HPP_
#define SEEDCOMM_PIPELINE_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "seedcomm/config.hpp"
#include "seedcomm/error.hpp"
#include "seedcomm/graph.hpp"
#include "seedcomm/locator.hpp"
#include "seedcomm/metrics.hpp"
#include "seedcomm/rewriter.hpp"

namespace seedcomm {

enum class Stage {
  config,
  ingest,
  preprocess,
  locator,
  match,
  rewriter,
  rewrite,
  evaluate,
  output,
};

const char* stage_name(Stage stage);

class StageError : public Error {
 public:
  StageError(Stage stage, ErrorCode code, const std::string& what)
      : Error(code, std::string(stage_name(stage)) + ": " + what),
        stage_(stage) {}
  Stage stage() const noexcept { return stage_; }

 private:
  Stage stage_;
};

// Verbosity 0 (quiet) to 2 (debug), read from SEEDCOMM_LOG; default 1.
int log_level();
void log_message(int level, const std::string& message);

// Per-stage seeds derived from the master seed.
struct StageSeeds {
  std::uint64_t preprocess = 0;
  std::uint64_t locator = 0;
  std::uint64_t rewriter = 0;
  std::uint64_t baseline = 0;
};
StageSeeds derive_seeds(std::uint64_t master);

// Ingested (and optionally preprocessed) graph with the configured split.
struct Prepared {
  Graph graph;
  CommunitySet communities;
  std::size_t size_cap = 0;
  std::size_t n_output = 0;
};
Prepared prepare(const RunConfig& config);

locator::LocatorConfig locator_config(const RunConfig& config);
rewriter::RewriterConfig rewriter_config(const RunConfig& config,
                                         std::size_t size_cap);

// Centers that belong to no training or validation community, when the
// config asks to exclude known centers; otherwise empty (all eligible).
std::vector<bool> eligible_centers(const RunConfig& config,
                                   const Prepared& prepared);

struct Located {
  std::vector<locator::Match> matches;
  std::vector<Community> communities;
};
Located locate(const RunConfig& config, const Prepared& prepared,
               const locator::Encoder& encoder);

// `count` distinct random centers drawn from the eligible nodes (all nodes
// when `eligible` is empty), each with its capped k-ego net.
std::vector<Community> random_ego_baseline(const Graph& graph,
                                           std::size_t count, int k,
                                           std::size_t size_cap,
                                           const std::vector<bool>& eligible,
                                           std::uint64_t seed);

struct Detection {
  Located located;
  std::vector<Community> rewritten;
};
Detection detect(const RunConfig& config, const Prepared& prepared,
                 const locator::Encoder& encoder,
                 const rewriter::Agent& agent);

// --- commands -----------------------------------------------------------------

void cmd_pipeline(const RunConfig& config);
void cmd_train_locator(const RunConfig& config);
void cmd_train_rewriter(const RunConfig& config);
void cmd_detect(const RunConfig& config);
// Scores two community files against each other; writes metrics.tsv under
// `out` when it is non-empty.
metrics::ScoreReport cmd_eval(const std::string& predictions,
                              const std::string& truths,
                              const std::string& out = {});
void cmd_synth(const SynthParams& params, const std::string& out);

struct AblationRow {
  std::string method;
  metrics::ScoreReport report;
};
std::vector<AblationRow> cmd_ablate(const RunConfig& config);

}  // namespace seedcomm

#endif  // SEEDCOMM_PIPELINE_HPP_
