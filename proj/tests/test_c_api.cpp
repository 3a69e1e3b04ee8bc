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

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "seedcomm/seedcomm.h"

namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "seedcomm_c_api_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("version and stage names") {
  CHECK(std::strlen(sc_version()) > 0);
  CHECK(std::string(sc_stage_name(SC_STAGE_INGEST)) == "ingest");
  CHECK(std::string(sc_stage_name(SC_STAGE_OUTPUT)) == "output");
}

TEST_CASE("config handles and buffers") {
  sc_config* cfg = nullptr;
  REQUIRE(sc_config_new(&cfg) == SC_OK);
  CHECK(sc_config_set(cfg, "seed", "12") == SC_OK);

  size_t needed = 0;
  char tiny[2];
  CHECK(sc_config_get(cfg, "seed", tiny, sizeof tiny, &needed) == SC_ERR_BUFFER_TOO_SMALL);
  CHECK(needed == 3);
  char buf[8];
  CHECK(sc_config_get(cfg, "seed", buf, sizeof buf, &needed) == SC_OK);
  CHECK(std::string(buf) == "12");

  CHECK(sc_config_write(cfg, nullptr, 0, &needed) == SC_ERR_BUFFER_TOO_SMALL);
  std::vector<char> text(needed);
  CHECK(sc_config_write(cfg, text.data(), text.size(), &needed) == SC_OK);
  CHECK(std::string(text.data()).find("seed=12\n") != std::string::npos);

  sc_config* copy = nullptr;
  REQUIRE(sc_config_parse(text.data(), &copy) == SC_OK);
  CHECK(sc_config_get(copy, "seed", buf, sizeof buf, &needed) == SC_OK);
  CHECK(std::string(buf) == "12");
  sc_config_free(copy);

  CHECK(sc_config_set(cfg, "nope", "1") != SC_OK);
  CHECK(std::strlen(sc_last_error()) > 0);
  CHECK(sc_config_set(cfg, "dropout", "3") == SC_OK);
  CHECK(sc_config_validate(cfg) == SC_ERR_INVALID_ARGUMENT);
  sc_config_free(cfg);

  sc_config* bad = nullptr;
  CHECK(sc_config_parse("seed=1\nseed=2\n", &bad) == SC_ERR_PARSE);
  CHECK(bad == nullptr);
  CHECK(std::string(sc_last_error()).find("seed") != std::string::npos);
  CHECK(sc_config_load("/nonexistent/run.cfg", &bad) != SC_OK);
}

TEST_CASE("null arguments are rejected") {
  CHECK(sc_config_new(nullptr) == SC_ERR_INVALID_ARGUMENT);
  CHECK(sc_config_parse(nullptr, nullptr) == SC_ERR_INVALID_ARGUMENT);
  CHECK(sc_run(nullptr, SC_CMD_PIPELINE) == SC_ERR_INVALID_ARGUMENT);
  CHECK(sc_graph_load(nullptr, nullptr) == SC_ERR_INVALID_ARGUMENT);
  CHECK(sc_eval_files(nullptr, nullptr, nullptr, nullptr) == SC_ERR_INVALID_ARGUMENT);
  sc_config_free(nullptr);
  sc_graph_free(nullptr);
  sc_cover_free(nullptr);
}

TEST_CASE("synth, graphs, covers and scores") {
  const fs::path dir = fresh_dir("synth");
  sc_synth_params params;
  sc_synth_defaults(&params);
  params.communities = 6;
  params.seed = 4;
  REQUIRE(sc_synth(&params, dir.string().c_str()) == SC_OK);

  const std::string edges = (dir / "edges.txt").string();
  const std::string comms = (dir / "communities.txt").string();
  sc_graph* g = nullptr;
  REQUIRE(sc_graph_load(edges.c_str(), &g) == SC_OK);
  CHECK(sc_graph_node_count(g) > 0);
  CHECK(sc_graph_edge_count(g) > 0);

  sc_cover* cover = nullptr;
  REQUIRE(sc_cover_load(g, comms.c_str(), &cover) == SC_OK);
  CHECK(sc_cover_size(cover) == 6);
  CHECK(sc_cover_community_size(cover, 0) >= params.min_size);
  sc_report r{};
  CHECK(sc_cover_score(cover, cover, &r) == SC_OK);
  CHECK(r.f1 == doctest::Approx(1.0));
  CHECK(r.onmi == doctest::Approx(1.0));

  sc_report e{};
  CHECK(sc_eval_files(comms.c_str(), comms.c_str(), dir.string().c_str(), &e) == SC_OK);
  CHECK(e.jaccard == doctest::Approx(1.0));
  CHECK(fs::exists(dir / "metrics.tsv"));
  sc_cover_free(cover);
  sc_graph_free(g);
}

TEST_CASE("run failures report their stage") {
  sc_config* cfg = nullptr;
  REQUIRE(sc_config_new(&cfg) == SC_OK);
  const fs::path out = fresh_dir("run");
  sc_config_set(cfg, "edges", "/nonexistent/edges.txt");
  sc_config_set(cfg, "communities", "/nonexistent/communities.txt");
  sc_config_set(cfg, "out", out.string().c_str());
  CHECK(sc_run(cfg, SC_CMD_PIPELINE) == SC_ERR_IO);
  CHECK(sc_last_stage() == SC_STAGE_INGEST);
  CHECK(std::string(sc_last_error()).rfind("ingest: ", 0) == 0);

  sc_config_set(cfg, "dropout", "5");
  CHECK(sc_run(cfg, SC_CMD_PIPELINE) == SC_ERR_INVALID_ARGUMENT);
  CHECK(sc_last_stage() == SC_STAGE_CONFIG);
  sc_config_free(cfg);

  sc_config* ok = nullptr;
  REQUIRE(sc_config_new(&ok) == SC_OK);
  CHECK(sc_config_validate(ok) == SC_OK);
  CHECK(std::string(sc_last_error()).empty());
  sc_config_free(ok);
}

TEST_CASE("a small end-to-end run through the C API") {
  const fs::path dir = fresh_dir("e2e");
  sc_synth_params params;
  sc_synth_defaults(&params);
  params.communities = 10;
  params.seed = 9;
  REQUIRE(sc_synth(&params, (dir / "data").string().c_str()) == SC_OK);

  sc_config* cfg = nullptr;
  REQUIRE(sc_config_new(&cfg) == SC_OK);
  const std::pair<const char*, std::string> settings[] = {
      {"edges", (dir / "data" / "edges.txt").string()},
      {"communities", (dir / "data" / "communities.txt").string()},
      {"out", (dir / "out").string()},
      {"dim", "8"},
      {"locator_batches", "2"},
      {"locator_pairs", "4"},
      {"rewriter_epochs", "2"},
      {"rewriter_episodes", "2"},
      {"train_count", "4"},
      {"valid_count", "2"},
      {"n_output", "8"},
  };
  for (const auto& [k, v] : settings) REQUIRE(sc_config_set(cfg, k, v.c_str()) == SC_OK);
  CHECK(sc_run(cfg, SC_CMD_PIPELINE) == SC_OK);
  CHECK(fs::exists(dir / "out" / "predictions.txt"));
  sc_ablation ab{};
  CHECK(sc_ablate(cfg, &ab) == SC_OK);
  CHECK(ab.rewriter.onmi >= 0.0);
  CHECK(ab.rewriter.onmi <= 1.0);
  sc_config_free(cfg);
}
