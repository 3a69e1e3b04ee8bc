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

#include "seedcomm/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <unordered_map>

namespace seedcomm {

namespace fs = std::filesystem;

const char* stage_name(Stage stage) {
  switch (stage) {
    case Stage::config: return "config";
    case Stage::ingest: return "ingest";
    case Stage::preprocess: return "preprocess";
    case Stage::locator: return "locator";
    case Stage::match: return "match";
    case Stage::rewriter: return "rewriter";
    case Stage::rewrite: return "rewrite";
    case Stage::evaluate: return "evaluate";
    case Stage::output: return "output";
  }
  return "unknown";
}

int log_level() {
  const char* env = std::getenv("SEEDCOMM_LOG");
  if (env == nullptr || *env == '\0') return 1;
  return std::clamp(std::atoi(env), 0, 2);
}

void log_message(int level, const std::string& message) {
  if (level <= log_level()) std::cerr << "[seedcomm] " << message << '\n';
}

namespace {

template <typename F>
auto run_stage(Stage stage, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(stage, e.code(), e.what());
  } catch (const std::exception& e) {
    throw StageError(stage, ErrorCode::state, e.what());
  }
}

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::ofstream open_artifact(const std::string& out, const std::string& name) {
  std::ofstream file(fs::path(out) / name, std::ios::binary);
  if (!file) fail(ErrorCode::io, "cannot write " + (fs::path(out) / name).string());
  file << std::setprecision(17);
  return file;
}

void ensure_dir(const std::string& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) fail(ErrorCode::io, "cannot create " + out + ": " + ec.message());
}

std::string artifact_path(const std::string& out, const std::string& name) {
  return (fs::path(out) / name).string();
}

void write_manifest(const std::string& command, const RunConfig& config,
                    const std::vector<std::string>& artifacts) {
  const StageSeeds seeds = derive_seeds(config.seed);
  std::ofstream m = open_artifact(config.out, command + ".manifest.tsv");
  m << "command\t" << command << '\n'
    << "config_hash\t" << config_hash(config) << '\n'
    << "seed\t" << config.seed << '\n'
    << "seed.preprocess\t" << seeds.preprocess << '\n'
    << "seed.locator\t" << seeds.locator << '\n'
    << "seed.rewriter\t" << seeds.rewriter << '\n'
    << "seed.baseline\t" << seeds.baseline << '\n';
  for (const std::string& a : artifacts) m << "artifact\t" << a << '\n';
}

void write_config_artifact(const RunConfig& config) {
  std::ofstream c = open_artifact(config.out, "config.txt");
  c << write_config(config);
}

locator::Distance distance_metric(const RunConfig& config) {
  return config.metric == "order" ? locator::Distance::order
                                  : locator::Distance::euclidean;
}

std::vector<Community> known_communities(const CommunitySet& set) {
  std::vector<Community> out = set.train();
  for (Community& c : set.validation()) out.push_back(std::move(c));
  return out;
}

void write_report(const std::string& out, const std::string& name,
                  const metrics::ScoreReport& report) {
  std::ofstream f = open_artifact(out, name);
  metrics::write_report_tsv(f, report);
}

locator::Encoder train_encoder(const RunConfig& config,
                               const Prepared& prepared) {
  return run_stage(Stage::locator, [&] {
    const auto train = prepared.communities.train();
    std::ofstream log = open_artifact(config.out, "locator_log.tsv");
    auto encoder = locator::train_locator(
        prepared.graph, train, locator_config(config),
        [&](std::size_t epoch, std::size_t batch, double loss) {
          log << epoch << '\t' << batch << '\t' << loss << '\n';
          log_message(2, "locator epoch " + std::to_string(epoch) + " batch " +
                             std::to_string(batch) + " loss " +
                             std::to_string(loss));
        });
    nd::save_checkpoint(artifact_path(config.out, "locator.ckpt"),
                        encoder.params);
    return encoder;
  });
}

rewriter::Agent train_agent(const RunConfig& config, const Prepared& prepared,
                            const nd::DenseArray& z) {
  return run_stage(Stage::rewriter, [&] {
    const auto train = prepared.communities.train();
    std::ofstream log = open_artifact(config.out, "rewriter_log.tsv");
    auto agent = rewriter::train_rewriter(
        prepared.graph, train, z, rewriter_config(config, prepared.size_cap),
        [&](std::size_t epoch, double mean_return, double mean_length) {
          log << epoch << '\t' << mean_return << '\t' << mean_length << '\n';
          if (epoch % 100 == 0) {
            log_message(2, "rewriter epoch " + std::to_string(epoch) +
                               " return " + std::to_string(mean_return));
          }
        });
    nd::save_checkpoint(artifact_path(config.out, "rewriter.ckpt"),
                        agent.params);
    return agent;
  });
}

locator::Encoder load_encoder(const RunConfig& config) {
  return run_stage(Stage::locator, [&] {
    auto encoder = locator::Encoder::from_params(
        nd::load_checkpoint(artifact_path(config.out, "locator.ckpt")));
    require(encoder.layers == config.k,
            "locator checkpoint depth differs from k");
    return encoder;
  });
}

rewriter::Agent load_agent(const RunConfig& config) {
  return run_stage(Stage::rewriter, [&] {
    return rewriter::Agent::from_params(
        nd::load_checkpoint(artifact_path(config.out, "rewriter.ckpt")));
  });
}

// Writes predictions and, when test truth exists, the score reports.
std::vector<std::string> write_detection(const RunConfig& config,
                                         const Prepared& prepared,
                                         const Detection& detection) {
  std::vector<std::string> artifacts;
  run_stage(Stage::output, [&] {
    const Graph& g = prepared.graph;
    write_communities(artifact_path(config.out, "predictions.txt"),
                      detection.rewritten, g);
    write_communities(artifact_path(config.out, "located.txt"),
                      detection.located.communities, g);
    std::ofstream m = open_artifact(config.out, "matches.tsv");
    locator::write_matches_tsv(m, detection.located.matches, g);
    artifacts = {"predictions.txt", "located.txt", "matches.tsv"};
  });
  const auto test = prepared.communities.test();
  if (!test.empty()) {
    run_stage(Stage::evaluate, [&] {
      const auto rewritten = metrics::score(detection.rewritten, test);
      const auto located = metrics::score(detection.located.communities, test);
      write_report(config.out, "metrics.tsv", rewritten);
      write_report(config.out, "located_metrics.tsv", located);
      std::ofstream b = open_artifact(config.out, "best_matches.tsv");
      metrics::write_best_matches_tsv(b, rewritten);
      log_message(1, "f1 " + std::to_string(rewritten.f1) + " (locator " +
                         std::to_string(located.f1) + ")");
    });
    artifacts.insert(artifacts.end(),
                     {"metrics.tsv", "located_metrics.tsv", "best_matches.tsv"});
  }
  return artifacts;
}

void start_output(const RunConfig& config, const Prepared& prepared) {
  run_stage(Stage::output, [&] {
    ensure_dir(config.out);
    write_config_artifact(config);
    write_id_map(artifact_path(config.out, "id_map.tsv"), prepared.graph);
  });
}

}  // namespace

StageSeeds derive_seeds(std::uint64_t master) {
  return {splitmix(master ^ 0x01), splitmix(master ^ 0x02),
          splitmix(master ^ 0x03), splitmix(master ^ 0x04)};
}

Prepared prepare(const RunConfig& config) {
  run_stage(Stage::config, [&] { validate(config); });
  Dataset data = run_stage(Stage::ingest, [&] {
    require(!config.edges.empty(), "no edge list configured");
    require(!config.communities.empty(), "no community file configured");
    Graph graph = load_edge_list(config.edges);
    if (!config.features.empty()) graph = load_features(config.features, graph);
    CommunitySet comms = load_communities(config.communities, graph);
    return Dataset{std::move(graph), std::move(comms)};
  });
  if (config.preprocess) {
    data = run_stage(Stage::preprocess, [&] {
      return seedcomm::preprocess(data.graph, data.communities,
                                  config.percentile, config.sample_count,
                                  derive_seeds(config.seed).preprocess);
    });
  }
  return run_stage(Stage::preprocess, [&] {
    CommunitySet split =
        data.communities.resplit(config.train_count, config.valid_count);
    const std::size_t cap =
        config.size_cap > 0 ? config.size_cap : split.max_train_size();
    const std::size_t n_out = config.n_output > 0
                                  ? config.n_output
                                  : 10 * split.split.train.size();
    return Prepared{std::move(data.graph), std::move(split), cap, n_out};
  });
}

locator::LocatorConfig locator_config(const RunConfig& config) {
  locator::LocatorConfig c;
  c.dim = config.dim;
  c.layers = config.k;
  c.epochs = config.locator_epochs;
  c.batches_per_epoch = config.locator_batches;
  c.pairs_per_batch = config.locator_pairs;
  c.lr = config.locator_lr;
  c.margin = config.margin;
  c.dropout = config.dropout;
  c.seed = derive_seeds(config.seed).locator;
  return c;
}

rewriter::RewriterConfig rewriter_config(const RunConfig& config,
                                         std::size_t size_cap) {
  rewriter::RewriterConfig c;
  c.k = config.k;
  c.epochs = config.rewriter_epochs;
  c.episodes_per_epoch = config.rewriter_episodes;
  c.lr = config.rewriter_lr;
  c.caps.community_size = size_cap;
  c.caps.boundary = config.boundary_cap;
  c.seed = derive_seeds(config.seed).rewriter;
  return c;
}

std::vector<bool> eligible_centers(const RunConfig& config,
                                   const Prepared& prepared) {
  if (!config.exclude_known_centers) return {};
  std::vector<bool> eligible(prepared.graph.node_count(), true);
  for (const Community& c : known_communities(prepared.communities)) {
    for (NodeId u : c) eligible[u] = false;
  }
  return eligible;
}

Located locate(const RunConfig& config, const Prepared& prepared,
               const locator::Encoder& encoder) {
  return run_stage(Stage::match, [&] {
    const Graph& g = prepared.graph;
    const auto train = prepared.communities.train();
    const auto table = locator::encode_all_candidates(
        g, encoder, prepared.size_cap, config.workers);
    const auto patterns = locator::embed_patterns(g, train, encoder);
    const auto eligible = eligible_centers(config, prepared);
    Located out;
    if (config.eta) {
      out.matches = locator::match_threshold(patterns, table, *config.eta,
                                             eligible, distance_metric(config));
    } else {
      std::size_t n_out = prepared.n_output;
      if (config.n_output == 0) {
        // The default of 10 x m is capped by the eligible pool.
        const std::size_t pool =
            eligible.empty()
                ? g.node_count()
                : static_cast<std::size_t>(
                      std::count(eligible.begin(), eligible.end(), true));
        n_out = std::min(n_out, pool);
      }
      const auto quota = locator::split_quota(n_out, train.size());
      out.matches = locator::match(patterns, table, quota, eligible,
                                   distance_metric(config));
    }
    out.communities = locator::matched_communities(out.matches, table);
    return out;
  });
}

std::vector<Community> random_ego_baseline(const Graph& graph,
                                           std::size_t count, int k,
                                           std::size_t size_cap,
                                           const std::vector<bool>& eligible,
                                           std::uint64_t seed) {
  require(eligible.empty() || eligible.size() == graph.node_count(),
          "random baseline: eligibility mask size");
  std::vector<NodeId> nodes;
  for (std::size_t i = 0; i < graph.node_count(); ++i) {
    if (eligible.empty() || eligible[i]) nodes.push_back(static_cast<NodeId>(i));
  }
  require(count <= nodes.size(),
          "random baseline: more centers requested than eligible nodes");
  nd::Rng rng(seed);
  std::shuffle(nodes.begin(), nodes.end(), rng);
  std::vector<Community> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(capped_ego_net(graph, nodes[i], k, size_cap));
  }
  return out;
}

Detection detect(const RunConfig& config, const Prepared& prepared,
                 const locator::Encoder& encoder,
                 const rewriter::Agent& agent) {
  Detection out;
  out.located = locate(config, prepared, encoder);
  out.rewritten = run_stage(Stage::rewrite, [&] {
    const Graph& g = prepared.graph;
    const nd::DenseArray z = locator::embed_all_nodes(g, encoder);
    const auto caps = rewriter_config(config, prepared.size_cap).caps;
    std::vector<Community> rewritten;
    rewritten.reserve(out.located.communities.size());
    for (const Community& c : out.located.communities) {
      rewritten.push_back(rewriter::rewrite(g, c, z, agent, caps));
    }
    return rewritten;
  });
  if (config.filter_overlap) {
    const auto known = known_communities(prepared.communities);
    out.rewritten =
        metrics::filter_overlap(out.rewritten, known, config.overlap_threshold);
    out.located.communities = metrics::filter_overlap(
        out.located.communities, known, config.overlap_threshold);
  }
  return out;
}

void cmd_pipeline(const RunConfig& config) {
  const Prepared prepared = prepare(config);
  log_message(1, "graph: " + std::to_string(prepared.graph.node_count()) +
                     " nodes, " + std::to_string(prepared.graph.edge_count()) +
                     " edges, " +
                     std::to_string(prepared.communities.communities.size()) +
                     " communities");
  start_output(config, prepared);
  const auto encoder = train_encoder(config, prepared);
  const nd::DenseArray z = run_stage(Stage::rewriter, [&] {
    return locator::embed_all_nodes(prepared.graph, encoder);
  });
  const auto agent = train_agent(config, prepared, z);
  const Detection detection = detect(config, prepared, encoder, agent);
  std::vector<std::string> artifacts = {
      "config.txt",   "id_map.tsv",       "locator.ckpt",
      "locator_log.tsv", "rewriter.ckpt", "rewriter_log.tsv"};
  const auto written = write_detection(config, prepared, detection);
  artifacts.insert(artifacts.end(), written.begin(), written.end());
  run_stage(Stage::output, [&] { write_manifest("pipeline", config, artifacts); });
}

void cmd_train_locator(const RunConfig& config) {
  const Prepared prepared = prepare(config);
  start_output(config, prepared);
  train_encoder(config, prepared);
  run_stage(Stage::output, [&] {
    write_manifest("train-locator", config,
                   {"config.txt", "id_map.tsv", "locator.ckpt",
                    "locator_log.tsv"});
  });
}

void cmd_train_rewriter(const RunConfig& config) {
  const Prepared prepared = prepare(config);
  start_output(config, prepared);
  const auto encoder = load_encoder(config);
  const nd::DenseArray z = run_stage(Stage::rewriter, [&] {
    return locator::embed_all_nodes(prepared.graph, encoder);
  });
  train_agent(config, prepared, z);
  run_stage(Stage::output, [&] {
    write_manifest("train-rewriter", config,
                   {"config.txt", "id_map.tsv", "rewriter.ckpt",
                    "rewriter_log.tsv"});
  });
}

void cmd_detect(const RunConfig& config) {
  const Prepared prepared = prepare(config);
  start_output(config, prepared);
  const auto encoder = load_encoder(config);
  const auto agent = load_agent(config);
  const Detection detection = detect(config, prepared, encoder, agent);
  std::vector<std::string> artifacts = {"config.txt", "id_map.tsv"};
  const auto written = write_detection(config, prepared, detection);
  artifacts.insert(artifacts.end(), written.begin(), written.end());
  run_stage(Stage::output, [&] { write_manifest("detect", config, artifacts); });
}

metrics::ScoreReport cmd_eval(const std::string& predictions,
                              const std::string& truths,
                              const std::string& out) {
  const auto [preds, truth] = run_stage(Stage::ingest, [&] {
    const auto raw_preds = load_raw_communities(predictions);
    const auto raw_truth = load_raw_communities(truths);
    // Dense ids over the union of both files; scores depend only on set
    // structure.
    std::map<OriginalId, NodeId> ids;
    for (const auto* raw : {&raw_preds, &raw_truth}) {
      for (const auto& c : *raw) {
        for (OriginalId id : c) ids.emplace(id, 0);
      }
    }
    NodeId next = 0;
    for (auto& [id, internal] : ids) internal = next++;
    auto convert = [&](const std::vector<std::vector<OriginalId>>& raw) {
      std::vector<Community> comms;
      for (const auto& c : raw) {
        std::vector<NodeId> members;
        for (OriginalId id : c) members.push_back(ids.at(id));
        comms.emplace_back(std::move(members));
      }
      return comms;
    };
    return std::make_pair(convert(raw_preds), convert(raw_truth));
  });
  const auto report = run_stage(Stage::evaluate, [&] {
    require(!preds.empty(), "no predicted communities");
    require(!truth.empty(), "no ground-truth communities");
    return metrics::score(preds, truth);
  });
  if (!out.empty()) {
    run_stage(Stage::output, [&] {
      ensure_dir(out);
      write_report(out, "metrics.tsv", report);
    });
  }
  return report;
}

void cmd_synth(const SynthParams& params, const std::string& out) {
  const Dataset data =
      run_stage(Stage::preprocess, [&] { return synth_planted(params); });
  run_stage(Stage::output, [&] {
    ensure_dir(out);
    write_edge_list(artifact_path(out, "edges.txt"), data.graph);
    write_communities(artifact_path(out, "communities.txt"),
                      data.communities.communities, data.graph);
    std::ofstream m = open_artifact(out, "synth.manifest.tsv");
    m << "command\tsynth\n"
      << "seed\t" << params.seed << '\n'
      << "communities\t" << params.communities << '\n'
      << "min_size\t" << params.min_size << '\n'
      << "max_size\t" << params.max_size << '\n'
      << "p_in\t" << params.p_in << '\n'
      << "cross_links\t" << params.cross_links << '\n'
      << "artifact\tedges.txt\n"
      << "artifact\tcommunities.txt\n";
  });
}

std::vector<AblationRow> cmd_ablate(const RunConfig& config) {
  const Prepared prepared = prepare(config);
  const auto test = prepared.communities.test();
  run_stage(Stage::evaluate, [&] {
    require(!test.empty(), "ablation needs test communities");
  });
  start_output(config, prepared);
  const bool trained = fs::exists(artifact_path(config.out, "locator.ckpt")) &&
                       fs::exists(artifact_path(config.out, "rewriter.ckpt"));
  locator::Encoder encoder;
  rewriter::Agent agent;
  if (trained) {
    encoder = load_encoder(config);
    agent = load_agent(config);
  } else {
    encoder = train_encoder(config, prepared);
    const nd::DenseArray z = run_stage(Stage::rewriter, [&] {
      return locator::embed_all_nodes(prepared.graph, encoder);
    });
    agent = train_agent(config, prepared, z);
  }
  const Detection detection = detect(config, prepared, encoder, agent);
  const auto random = run_stage(Stage::match, [&] {
    return random_ego_baseline(prepared.graph,
                               detection.located.communities.size(), config.k,
                               prepared.size_cap,
                               eligible_centers(config, prepared),
                               derive_seeds(config.seed).baseline);
  });
  std::vector<AblationRow> rows = run_stage(Stage::evaluate, [&] {
    return std::vector<AblationRow>{
        {"random", metrics::score(random, test)},
        {"locator", metrics::score(detection.located.communities, test)},
        {"rewriter", metrics::score(detection.rewritten, test)},
    };
  });
  run_stage(Stage::output, [&] {
    std::ofstream f = open_artifact(config.out, "ablation.tsv");
    f << "method\tf1\tjaccard\tonmi\n";
    for (const AblationRow& r : rows) {
      f << r.method << '\t' << r.report.f1 << '\t' << r.report.jaccard << '\t'
        << r.report.onmi << '\n';
    }
    std::vector<std::string> artifacts = {"config.txt", "id_map.tsv",
                                          "ablation.tsv"};
    if (!trained) {
      artifacts.insert(artifacts.end(), {"locator.ckpt", "locator_log.tsv",
                                         "rewriter.ckpt", "rewriter_log.tsv"});
    }
    write_manifest("ablate", config, artifacts);
  });
  return rows;
}

}  // namespace seedcomm
