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

/* C interface of the seedcomm shared library. All objects are opaque
 * handles owned by the caller and released with the matching *_free
 * function. Every call returns an sc_status; on failure the message and
 * the pipeline stage are available through sc_last_error() and
 * sc_last_stage() on the calling thread. */

#ifndef SEEDCOMM_H_
#define SEEDCOMM_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(SEEDCOMM_BUILDING)
#define SC_API __declspec(dllexport)
#else
#define SC_API __declspec(dllimport)
#endif
#else
#define SC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sc_status {
  SC_OK = 0,
  SC_ERR_INVALID_ARGUMENT = 1,
  SC_ERR_IO = 2,
  SC_ERR_PARSE = 3,
  SC_ERR_NUMERIC = 4,
  SC_ERR_STATE = 5,
  SC_ERR_BUFFER_TOO_SMALL = 6,
  SC_ERR_INTERNAL = 7
} sc_status;

typedef enum sc_stage {
  SC_STAGE_NONE = 0,
  SC_STAGE_CONFIG = 1,
  SC_STAGE_INGEST = 2,
  SC_STAGE_PREPROCESS = 3,
  SC_STAGE_LOCATOR = 4,
  SC_STAGE_MATCH = 5,
  SC_STAGE_REWRITER = 6,
  SC_STAGE_REWRITE = 7,
  SC_STAGE_EVALUATE = 8,
  SC_STAGE_OUTPUT = 9
} sc_stage;

typedef enum sc_command {
  SC_CMD_PIPELINE = 0,
  SC_CMD_TRAIN_LOCATOR = 1,
  SC_CMD_TRAIN_REWRITER = 2,
  SC_CMD_DETECT = 3,
  SC_CMD_ABLATE = 4
} sc_command;

typedef struct sc_config sc_config;
typedef struct sc_graph sc_graph;
typedef struct sc_cover sc_cover;

typedef struct sc_report {
  double f1;
  double jaccard;
  double onmi;
} sc_report;

typedef struct sc_synth_params {
  size_t communities;
  size_t min_size;
  size_t max_size;
  double p_in;
  size_t cross_links;
  uint64_t seed;
} sc_synth_params;

typedef struct sc_ablation {
  sc_report random;
  sc_report locator;
  sc_report rewriter;
} sc_ablation;

SC_API const char* sc_version(void);
/* Message of the last failed call on this thread; "" if none. */
SC_API const char* sc_last_error(void);
SC_API sc_stage sc_last_stage(void);
SC_API const char* sc_stage_name(sc_stage stage);

/* --- configuration ------------------------------------------------------ */

SC_API sc_status sc_config_new(sc_config** out);
SC_API sc_status sc_config_parse(const char* text, sc_config** out);
SC_API sc_status sc_config_load(const char* path, sc_config** out);
SC_API void sc_config_free(sc_config* config);
SC_API sc_status sc_config_set(sc_config* config, const char* key,
                               const char* value);
/* Copies the value (NUL-terminated) into buf. *needed receives the size
 * including the terminator; SC_ERR_BUFFER_TOO_SMALL if it exceeds cap. */
SC_API sc_status sc_config_get(const sc_config* config, const char* key,
                               char* buf, size_t cap, size_t* needed);
/* Normalized text, same buffer convention as sc_config_get. */
SC_API sc_status sc_config_write(const sc_config* config, char* buf,
                                 size_t cap, size_t* needed);
SC_API sc_status sc_config_validate(const sc_config* config);

/* --- commands ----------------------------------------------------------- */

SC_API sc_status sc_run(const sc_config* config, sc_command command);
SC_API sc_status sc_ablate(const sc_config* config, sc_ablation* out);
/* Scores two community files; writes metrics.tsv into out_dir unless it
 * is NULL or empty. */
SC_API sc_status sc_eval_files(const char* predictions, const char* truths,
                               const char* out_dir, sc_report* out);
SC_API sc_status sc_synth(const sc_synth_params* params, const char* out_dir);
SC_API void sc_synth_defaults(sc_synth_params* params);

/* --- graphs and covers -------------------------------------------------- */

SC_API sc_status sc_graph_load(const char* edges_path, sc_graph** out);
SC_API void sc_graph_free(sc_graph* graph);
SC_API size_t sc_graph_node_count(const sc_graph* graph);
SC_API size_t sc_graph_edge_count(const sc_graph* graph);

/* Communities of a file, restricted to nodes of `graph`. */
SC_API sc_status sc_cover_load(const sc_graph* graph, const char* path,
                               sc_cover** out);
SC_API void sc_cover_free(sc_cover* cover);
SC_API size_t sc_cover_size(const sc_cover* cover);
SC_API size_t sc_cover_community_size(const sc_cover* cover, size_t index);
SC_API sc_status sc_cover_score(const sc_cover* predictions,
                                const sc_cover* truths, sc_report* out);

#ifdef __cplusplus
}
#endif

#endif /* SEEDCOMM_H_ */
