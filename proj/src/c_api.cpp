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

#include "seedcomm/seedcomm.h"

#include <cstring>
#include <new>
#include <string>

#include "seedcomm/config.hpp"
#include "seedcomm/pipeline.hpp"

struct sc_config {
  seedcomm::RunConfig value;
};

struct sc_graph {
  seedcomm::Graph value;
};

struct sc_cover {
  std::vector<seedcomm::Community> value;
};

namespace {

thread_local std::string last_error;
thread_local sc_stage last_stage = SC_STAGE_NONE;

sc_status status_of(seedcomm::ErrorCode code) {
  switch (code) {
    case seedcomm::ErrorCode::invalid_argument: return SC_ERR_INVALID_ARGUMENT;
    case seedcomm::ErrorCode::io: return SC_ERR_IO;
    case seedcomm::ErrorCode::parse: return SC_ERR_PARSE;
    case seedcomm::ErrorCode::numeric: return SC_ERR_NUMERIC;
    case seedcomm::ErrorCode::state: return SC_ERR_STATE;
  }
  return SC_ERR_INTERNAL;
}

sc_stage stage_of(seedcomm::Stage stage) {
  return static_cast<sc_stage>(static_cast<int>(stage) + 1);
}

sc_status fail_with(sc_status status, const std::string& message,
                    sc_stage stage = SC_STAGE_NONE) {
  last_error = message;
  last_stage = stage;
  return status;
}

template <typename F>
sc_status guarded(F&& body) {
  last_error.clear();
  last_stage = SC_STAGE_NONE;
  try {
    body();
    return SC_OK;
  } catch (const seedcomm::StageError& e) {
    return fail_with(status_of(e.code()), e.what(), stage_of(e.stage()));
  } catch (const seedcomm::Error& e) {
    return fail_with(status_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail_with(SC_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail_with(SC_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail_with(SC_ERR_INTERNAL, "unknown error");
  }
}

void check(const void* p, const char* what) {
  if (p == nullptr) {
    seedcomm::fail(seedcomm::ErrorCode::invalid_argument,
                   std::string(what) + " is null");
  }
}

sc_status copy_out(const std::string& text, char* buf, std::size_t cap,
                   std::size_t* needed) {
  if (needed != nullptr) *needed = text.size() + 1;
  if (buf == nullptr || cap < text.size() + 1) {
    return fail_with(SC_ERR_BUFFER_TOO_SMALL, "buffer too small");
  }
  std::memcpy(buf, text.c_str(), text.size() + 1);
  return SC_OK;
}

sc_report to_report(const seedcomm::metrics::ScoreReport& r) {
  return {r.f1, r.jaccard, r.onmi};
}

}  // namespace

extern "C" {

const char* sc_version(void) { return "0.1.0"; }

const char* sc_last_error(void) { return last_error.c_str(); }

sc_stage sc_last_stage(void) { return last_stage; }

const char* sc_stage_name(sc_stage stage) {
  if (stage <= SC_STAGE_NONE || stage > SC_STAGE_OUTPUT) return "none";
  return seedcomm::stage_name(static_cast<seedcomm::Stage>(stage - 1));
}

sc_status sc_config_new(sc_config** out) {
  return guarded([&] {
    check(out, "out");
    *out = new sc_config{};
  });
}

sc_status sc_config_parse(const char* text, sc_config** out) {
  return guarded([&] {
    check(text, "text");
    check(out, "out");
    *out = new sc_config{seedcomm::parse_config_text(text)};
  });
}

sc_status sc_config_load(const char* path, sc_config** out) {
  return guarded([&] {
    check(path, "path");
    check(out, "out");
    *out = new sc_config{seedcomm::load_config(path)};
  });
}

void sc_config_free(sc_config* config) { delete config; }

sc_status sc_config_set(sc_config* config, const char* key,
                        const char* value) {
  return guarded([&] {
    check(config, "config");
    check(key, "key");
    check(value, "value");
    seedcomm::RunConfig updated = config->value;
    seedcomm::set_config_value(updated, key, value);
    config->value = std::move(updated);
  });
}

sc_status sc_config_get(const sc_config* config, const char* key, char* buf,
                        size_t cap, size_t* needed) {
  std::string text;
  const sc_status s = guarded([&] {
    check(config, "config");
    check(key, "key");
    text = seedcomm::get_config_value(config->value, key);
  });
  return s == SC_OK ? copy_out(text, buf, cap, needed) : s;
}

sc_status sc_config_write(const sc_config* config, char* buf, size_t cap,
                          size_t* needed) {
  std::string text;
  const sc_status s = guarded([&] {
    check(config, "config");
    text = seedcomm::write_config(config->value);
  });
  return s == SC_OK ? copy_out(text, buf, cap, needed) : s;
}

sc_status sc_config_validate(const sc_config* config) {
  return guarded([&] {
    check(config, "config");
    seedcomm::validate(config->value);
  });
}

sc_status sc_run(const sc_config* config, sc_command command) {
  return guarded([&] {
    check(config, "config");
    switch (command) {
      case SC_CMD_PIPELINE: seedcomm::cmd_pipeline(config->value); return;
      case SC_CMD_TRAIN_LOCATOR:
        seedcomm::cmd_train_locator(config->value);
        return;
      case SC_CMD_TRAIN_REWRITER:
        seedcomm::cmd_train_rewriter(config->value);
        return;
      case SC_CMD_DETECT: seedcomm::cmd_detect(config->value); return;
      case SC_CMD_ABLATE: seedcomm::cmd_ablate(config->value); return;
    }
    seedcomm::fail(seedcomm::ErrorCode::invalid_argument, "unknown command");
  });
}

sc_status sc_ablate(const sc_config* config, sc_ablation* out) {
  return guarded([&] {
    check(config, "config");
    check(out, "out");
    const auto rows = seedcomm::cmd_ablate(config->value);
    out->random = to_report(rows.at(0).report);
    out->locator = to_report(rows.at(1).report);
    out->rewriter = to_report(rows.at(2).report);
  });
}

sc_status sc_eval_files(const char* predictions, const char* truths,
                        const char* out_dir, sc_report* out) {
  return guarded([&] {
    check(predictions, "predictions");
    check(truths, "truths");
    check(out, "out");
    *out = to_report(seedcomm::cmd_eval(predictions, truths,
                                        out_dir == nullptr ? "" : out_dir));
  });
}

void sc_synth_defaults(sc_synth_params* params) {
  if (params == nullptr) return;
  const seedcomm::SynthParams d;
  *params = {d.communities, d.min_size, d.max_size, d.p_in, d.cross_links,
             d.seed};
}

sc_status sc_synth(const sc_synth_params* params, const char* out_dir) {
  return guarded([&] {
    check(params, "params");
    check(out_dir, "out_dir");
    seedcomm::SynthParams p;
    p.communities = params->communities;
    p.min_size = params->min_size;
    p.max_size = params->max_size;
    p.p_in = params->p_in;
    p.cross_links = params->cross_links;
    p.seed = params->seed;
    seedcomm::cmd_synth(p, out_dir);
  });
}

sc_status sc_graph_load(const char* edges_path, sc_graph** out) {
  return guarded([&] {
    check(edges_path, "edges_path");
    check(out, "out");
    *out = new sc_graph{seedcomm::load_edge_list(edges_path)};
  });
}

void sc_graph_free(sc_graph* graph) { delete graph; }

size_t sc_graph_node_count(const sc_graph* graph) {
  return graph == nullptr ? 0 : graph->value.node_count();
}

size_t sc_graph_edge_count(const sc_graph* graph) {
  return graph == nullptr ? 0 : graph->value.edge_count();
}

sc_status sc_cover_load(const sc_graph* graph, const char* path,
                        sc_cover** out) {
  return guarded([&] {
    check(graph, "graph");
    check(path, "path");
    check(out, "out");
    *out = new sc_cover{
        seedcomm::load_communities(path, graph->value).communities};
  });
}

void sc_cover_free(sc_cover* cover) { delete cover; }

size_t sc_cover_size(const sc_cover* cover) {
  return cover == nullptr ? 0 : cover->value.size();
}

size_t sc_cover_community_size(const sc_cover* cover, size_t index) {
  if (cover == nullptr || index >= cover->value.size()) return 0;
  return cover->value[index].size();
}

sc_status sc_cover_score(const sc_cover* predictions, const sc_cover* truths,
                         sc_report* out) {
  return guarded([&] {
    check(predictions, "predictions");
    check(truths, "truths");
    check(out, "out");
    seedcomm::require(!predictions->value.empty() && !truths->value.empty(),
                      "covers must be non-empty");
    *out = to_report(seedcomm::metrics::score(predictions->value, truths->value));
  });
}

}  // extern "C"
