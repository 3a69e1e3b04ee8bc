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

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "doctest.h"
#include "seedcomm/config.hpp"
#include "seedcomm/error.hpp"
#include "seedcomm/metrics.hpp"
#include "seedcomm/pipeline.hpp"

using namespace seedcomm;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "seedcomm_pipeline_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  return std::string((std::istreambuf_iterator<char>(in)), {});
}

std::size_t line_count(const fs::path& p) {
  const std::string s = slurp(p);
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

const fs::path& dataset() {
  static const fs::path dir = [] {
    const fs::path d = fresh_dir("data");
    cmd_synth({12, 5, 9, 0.7, 20, 5}, d.string());
    return d;
  }();
  return dir;
}

RunConfig small_config(const std::string& out) {
  RunConfig c;
  c.edges = (dataset() / "edges.txt").string();
  c.communities = (dataset() / "communities.txt").string();
  c.out = fresh_dir(out).string();
  c.seed = 3;
  c.dim = 8;
  c.locator_epochs = 1;
  c.locator_batches = 3;
  c.locator_pairs = 5;
  c.locator_lr = 1e-3;
  c.rewriter_epochs = 3;
  c.rewriter_episodes = 3;
  c.train_count = 5;
  c.valid_count = 2;
  c.n_output = 10;
  return c;
}

}  // namespace

TEST_CASE("synth command writes loadable files") {
  const fs::path d = dataset();
  const Graph g = load_edge_list((d / "edges.txt").string());
  const auto set = load_communities((d / "communities.txt").string(), g);
  CHECK(set.communities.size() == 12);
  const std::string manifest = slurp(d / "synth.manifest.tsv");
  CHECK(manifest.find("command\tsynth\n") != std::string::npos);
  CHECK(manifest.find("seed\t5\n") != std::string::npos);

  const fs::path cliques = fresh_dir("cliques");
  cmd_synth({4, 3, 3, 1.0, 0, 1}, cliques.string());
  const Graph c = load_edge_list((cliques / "edges.txt").string());
  CHECK(c.node_count() == 12);
  CHECK(c.edge_count() == 12);
}

TEST_CASE("eval command") {
  const fs::path d = fresh_dir("eval");
  {
    std::ofstream(d / "a.txt") << "1 2 3\n4 5\n";
    std::ofstream(d / "b.txt") << "4 5\n1 2 3\n";
    std::ofstream(d / "c.txt") << "7 8\n9\n";
  }
  const auto same = cmd_eval((d / "a.txt").string(), (d / "b.txt").string(), d.string());
  CHECK(same.f1 == doctest::Approx(1.0));
  CHECK(same.jaccard == doctest::Approx(1.0));
  CHECK(same.onmi == doctest::Approx(1.0));
  CHECK(slurp(d / "metrics.tsv").rfind("f1\t1.000000\n", 0) == 0);
  const auto disjoint = cmd_eval((d / "a.txt").string(), (d / "c.txt").string());
  CHECK(disjoint.f1 == 0.0);
  CHECK(disjoint.jaccard == 0.0);
  CHECK_THROWS_AS(cmd_eval((d / "missing.txt").string(), (d / "a.txt").string()), Error);
}

TEST_CASE("stage errors name the failing stage") {
  RunConfig c = small_config("missing");
  c.communities = "/nonexistent/communities.txt";
  try {
    cmd_pipeline(c);
    FAIL("expected a stage error");
  } catch (const StageError& e) {
    CHECK(e.stage() == Stage::ingest);
    CHECK(std::string(e.what()).rfind("ingest: ", 0) == 0);
  }
  RunConfig bad = small_config("bad");
  bad.dropout = 2.0;
  try {
    cmd_pipeline(bad);
    FAIL("expected a stage error");
  } catch (const StageError& e) {
    CHECK(e.stage() == Stage::config);
  }
  CHECK(std::string(stage_name(Stage::rewrite)) == "rewrite");
}

TEST_CASE("seeds and baselines") {
  const StageSeeds a = derive_seeds(1), b = derive_seeds(1), c = derive_seeds(2);
  CHECK(a.locator == b.locator);
  CHECK(a.rewriter == b.rewriter);
  CHECK(a.locator != c.locator);
  const std::set<std::uint64_t> distinct{a.preprocess, a.locator, a.rewriter, a.baseline};
  CHECK(distinct.size() == 4);

  const Prepared p = prepare(small_config("baseline"));
  CHECK(p.communities.train().size() == 5);
  CHECK(p.communities.validation().size() == 2);
  const auto eligible = eligible_centers(small_config("baseline"), p);
  const auto base = random_ego_baseline(p.graph, 6, 2, p.size_cap, eligible, 8);
  CHECK(base.size() == 6);
  CHECK(base == random_ego_baseline(p.graph, 6, 2, p.size_cap, eligible, 8));
  for (const auto& c : base) CHECK(c.size() <= p.size_cap);
  for (const auto& known : p.communities.train()) {
    for (NodeId u : known) CHECK(!eligible[u]);
  }
}

TEST_CASE("pipeline artifacts and determinism") {
  const RunConfig c = small_config("pipeline");
  cmd_pipeline(c);
  const fs::path out = c.out;
  for (const char* name : {"config.txt", "id_map.tsv", "locator.ckpt", "locator_log.tsv",
                           "rewriter.ckpt", "rewriter_log.tsv", "predictions.txt",
                           "located.txt", "matches.tsv", "metrics.tsv",
                           "pipeline.manifest.tsv"}) {
    CHECK_MESSAGE(fs::exists(out / name), name);
  }
  CHECK(line_count(out / "predictions.txt") == 10);
  CHECK(line_count(out / "located.txt") == 10);
  CHECK(line_count(out / "locator_log.tsv") == 3);
  CHECK(load_config((out / "config.txt").string()) == c);
  const std::string manifest = slurp(out / "pipeline.manifest.tsv");
  CHECK(manifest.find("config_hash\t" + config_hash(c)) != std::string::npos);

  RunConfig parallel = c;
  parallel.workers = 3;
  parallel.out = fresh_dir("pipeline_workers").string();
  cmd_pipeline(parallel);
  CHECK(slurp(fs::path(parallel.out) / "predictions.txt") == slurp(out / "predictions.txt"));
  CHECK(slurp(fs::path(parallel.out) / "metrics.tsv") == slurp(out / "metrics.tsv"));

  RunConfig staged = c;
  staged.out = fresh_dir("staged").string();
  cmd_train_locator(staged);
  cmd_train_rewriter(staged);
  cmd_detect(staged);
  CHECK(slurp(fs::path(staged.out) / "locator.ckpt") == slurp(out / "locator.ckpt"));
  CHECK(slurp(fs::path(staged.out) / "rewriter.ckpt") == slurp(out / "rewriter.ckpt"));
  CHECK(slurp(fs::path(staged.out) / "predictions.txt") == slurp(out / "predictions.txt"));
  CHECK(fs::exists(fs::path(staged.out) / "detect.manifest.tsv"));
}

TEST_CASE("ablation report") {
  const RunConfig c = small_config("ablate");
  const auto rows = cmd_ablate(c);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].method == "random");
  CHECK(rows[1].method == "locator");
  CHECK(rows[2].method == "rewriter");
  for (const auto& r : rows) {
    CHECK(r.report.onmi >= 0.0);
    CHECK(r.report.onmi <= 1.0);
  }
  const std::string first = slurp(fs::path(c.out) / "ablation.tsv");
  RunConfig again = c;
  again.out = fresh_dir("ablate_again").string();
  const auto rows2 = cmd_ablate(again);
  CHECK(slurp(fs::path(again.out) / "ablation.tsv") == first);
  CHECK(rows2[2].report.f1 == rows[2].report.f1);
}
