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

// Acceptance suite: one PASS/FAIL line per criterion. Exits non-zero when
// any criterion fails.

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "seedcomm/config.hpp"
#include "seedcomm/graph.hpp"
#include "seedcomm/locator.hpp"
#include "seedcomm/metrics.hpp"
#include "seedcomm/pipeline.hpp"
#include "seedcomm/rewriter.hpp"

namespace {

using namespace seedcomm;
namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0,
                double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c, d);
  return buf;
}

// --- gradient oracle ----------------------------------------------------------

Outcome gradient_oracle() {
  double worst_locator = 0.0, worst_rewriter = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SynthParams sp{4, 4, 6, 0.7, 4, seed + 1};
    const Dataset data = synth_planted(sp);
    const Graph& g = data.graph;
    const auto train = data.communities.train();

    // Locator margin loss with a fixed dropout mask per community.
    const auto enc = locator::Encoder::init(g.feature_dim(), 6, 2, seed);
    const auto batch = locator::sample_pairs(g, train, 3, seed * 31 + 5);
    auto loss_on = [&](nd::Tape& tape, const nd::ParamSet& params) {
      locator::Encoder e = enc;
      e.params = params;
      std::uint64_t mask_seed = seed * 1000;
      auto embed = [&](const Community& c) {
        return locator::encode_community(tape, g, c, e,
                                         {true, 0.2, ++mask_seed});
      };
      std::vector<locator::EmbeddedPair> pos, neg;
      for (const auto& [a, b] : batch.positives) {
        const nd::Var za = embed(a);
        pos.emplace_back(za, embed(b));
      }
      for (const auto& [a, b] : batch.negatives) {
        const nd::Var za = embed(a);
        neg.emplace_back(za, embed(b));
      }
      return locator::margin_loss(pos, neg, 0.4);
    };
    nd::Tape tape;
    const nd::ParamSet analytic =
        tape.backward(loss_on(tape, enc.params), enc.params);
    const nd::ParamSet numeric =
        oracle::finite_difference(enc.params, [&](const nd::ParamSet& p) {
          nd::Tape t;
          return loss_on(t, p).scalar();
        });
    worst_locator = std::max(worst_locator, oracle::relative_error(analytic, numeric));

    // Rewriter surrogate on a frozen sampled episode.
    const std::size_t d = 4;
    nd::Rng rng(seed + 99);
    nd::DenseArray z(g.node_count(), d);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (double& v : z.values()) v = normal(rng);
    rewriter::Agent agent = rewriter::Agent::init(d, seed + 7);
    // Zero-initialized biases put the all-zero virtual row exactly on a ReLU
    // kink; move them off it so the objective is differentiable there.
    for (const char* bias : {"exclude.b1", "exclude.b2", "expand.b1", "expand.b2"}) {
      for (double& v : agent.params.get(bias).values()) v = normal(rng) * 0.5;
    }
    rewriter::Caps caps;
    caps.community_size = 8;
    caps.boundary = 5;
    const Community& truth = train[seed % train.size()];
    const Community start = capped_ego_net(g, truth.members()[0], 1, 8);
    std::vector<rewriter::Trajectory> trajs;
    trajs.push_back(rewriter::rollout(g, start, &truth, z, agent,
                                      rewriter::Mode::sample, caps, seed));
    const nd::ParamSet surrogate = rewriter::surrogate_gradient(trajs, agent);
    const nd::ParamSet fd =
        oracle::finite_difference(agent.params, [&](const nd::ParamSet& p) {
          rewriter::Agent a = agent;
          a.params = p;
          nd::Tape t;
          return rewriter::replay_objective(t, g, trajs[0], z, a, caps).scalar();
        });
    worst_rewriter = std::max(worst_rewriter, oracle::relative_error(surrogate, fd));
  }
  return {worst_locator < 1e-4 && worst_rewriter < 1e-3,
          fmt("worst relative error locator %.2e, rewriter %.2e", worst_locator,
              worst_rewriter)};
}

// --- metric oracles -----------------------------------------------------------

std::vector<Community> random_cover(nd::Rng& rng) {
  std::uniform_int_distribution<std::size_t> count(1, 10), size(1, 20);
  std::vector<Community> cover;
  const std::size_t m = count(rng);
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<NodeId> nodes(20);
    for (NodeId u = 0; u < 20; ++u) nodes[u] = u;
    std::shuffle(nodes.begin(), nodes.end(), rng);
    nodes.resize(size(rng));
    cover.emplace_back(std::move(nodes));
  }
  return cover;
}

Outcome metric_oracles() {
  nd::Rng rng(2024);
  double worst = 0.0;
  for (int instance = 0; instance < 50; ++instance) {
    const auto preds = random_cover(rng);
    const auto truths = random_cover(rng);
    for (const auto& a : preds) {
      for (const auto& b : truths) {
        worst = std::max(worst, std::abs(metrics::f1_pair(a, b) - oracle::f1(a, b)));
        worst = std::max(worst, std::abs(metrics::jaccard_pair(a, b) -
                                         oracle::jaccard(a, b)));
      }
    }
    worst = std::max(worst, std::abs(metrics::bimatch(preds, truths,
                                                      metrics::PairScore::f1) -
                                     oracle::bimatch(preds, truths, oracle::f1)));
    worst = std::max(worst,
                     std::abs(metrics::bimatch(preds, truths,
                                               metrics::PairScore::jaccard) -
                              oracle::bimatch(preds, truths, oracle::jaccard)));
    worst = std::max(worst, std::abs(metrics::onmi(preds, truths) -
                                     oracle::onmi(preds, truths)));
  }
  return {worst <= 1e-9, fmt("max deviation %.2e over 50 instances", worst)};
}

// --- matcher oracle -----------------------------------------------------------

Outcome matcher_oracle() {
  nd::Rng rng(77);
  std::size_t mismatches = 0, compared = 0;
  for (int table = 0; table < 20; ++table) {
    const std::size_t dim = 8, m = 5;
    // Coarse values force many distance ties.
    std::uniform_int_distribution<int> level(0, 3);
    locator::CandidateTable cands;
    cands.embeddings = nd::DenseArray(1000, dim);
    cands.communities.resize(1000);
    for (double& v : cands.embeddings.values()) v = level(rng);
    nd::DenseArray patterns(m, dim);
    for (double& v : patterns.values()) v = level(rng);
    std::vector<bool> eligible(1000);
    std::bernoulli_distribution keep(0.8);
    for (std::size_t i = 0; i < eligible.size(); ++i) eligible[i] = keep(rng);
    const auto metric = table % 2 == 0 ? locator::Distance::euclidean
                                       : locator::Distance::order;
    const auto quota = locator::split_quota(53, m);
    const auto got = locator::match(patterns, cands, quota, eligible, metric);
    const auto want =
        oracle::scan_match(patterns, cands.embeddings, quota, eligible, metric);
    ++compared;
    bool same = got.size() == want.size();
    for (std::size_t i = 0; same && i < got.size(); ++i) {
      same = got[i].pattern == want[i].pattern &&
             got[i].center == want[i].center &&
             got[i].distance == want[i].distance;
    }
    mismatches += !same;
  }
  return {mismatches == 0,
          fmt("%.0f of %.0f tables identical", double(compared - mismatches),
              double(compared))};
}

// --- order-embedding separation ----------------------------------------------

Outcome order_separation() {
  const Dataset data = synth_planted({20, 6, 10, 0.8, 50, 7});
  const auto train = data.communities.train();
  locator::LocatorConfig cfg;
  cfg.seed = 7;
  const auto encoder = locator::train_locator(data.graph, train, cfg);
  const auto fresh = locator::sample_pairs(data.graph, train, 200, 0xfeed);
  auto mean_penalty = [&](const auto& pairs) {
    double total = 0.0;
    for (const auto& [a, b] : pairs) {
      total += locator::order_penalty(
          locator::embed_community(data.graph, a, encoder),
          locator::embed_community(data.graph, b, encoder));
    }
    return total / static_cast<double>(pairs.size());
  };
  const double pos = mean_penalty(fresh.positives);
  const double neg = mean_penalty(fresh.negatives);
  return {pos < 0.5 * neg,
          fmt("positive mean %.4g, negative mean %.4g, ratio %.3f", pos, neg,
              neg > 0 ? pos / neg : INFINITY)};
}

// --- end-to-end planted recovery ------------------------------------------

struct Benchmark {
  Dataset data;
  CommunitySet split;
  std::size_t size_cap = 0;
};

Benchmark planted_benchmark() {
  Dataset data = synth_planted({40, 6, 12, 0.6, 200, 11});
  CommunitySet split = data.communities.resplit(10, 0);
  const std::size_t cap = split.max_train_size();
  return {std::move(data), std::move(split), cap};
}

constexpr int kBenchmarkK = 2;

std::vector<bool> unknown_centers(const Benchmark& b) {
  std::vector<bool> eligible(b.data.graph.node_count(), true);
  for (const Community& c : b.split.train()) {
    for (NodeId u : c) eligible[u] = false;
  }
  return eligible;
}

locator::Encoder benchmark_encoder(const Benchmark& b) {
  locator::LocatorConfig cfg;
  cfg.layers = kBenchmarkK;
  cfg.seed = 11;
  return locator::train_locator(b.data.graph, b.split.train(), cfg);
}

Outcome planted_recovery() {
  const Benchmark b = planted_benchmark();
  const Graph& g = b.data.graph;
  const auto train = b.split.train();
  const auto test = b.split.test();
  const auto encoder = benchmark_encoder(b);
  const auto table = locator::encode_all_candidates(g, encoder, b.size_cap, 1);
  const auto patterns = locator::embed_patterns(g, train, encoder);
  const auto eligible = unknown_centers(b);
  const auto quota = locator::split_quota(test.size(), train.size());
  const auto matches = locator::match(patterns, table, quota, eligible);
  const auto located = locator::matched_communities(matches, table);
  const auto random = random_ego_baseline(g, located.size(), kBenchmarkK,
                                          b.size_cap, eligible, 11);
  const double f1 = metrics::bimatch(located, test, metrics::PairScore::f1);
  const double base = metrics::bimatch(random, test, metrics::PairScore::f1);
  return {f1 >= 0.50 && f1 >= base + 0.15,
          fmt("locator F1 %.4f, random k-ego F1 %.4f, gap %.4f", f1, base,
              f1 - base)};
}

// --- rewriter improvement ---------------------------------------------------

Outcome rewriter_improvement() {
  const Benchmark b = planted_benchmark();
  const Graph& g = b.data.graph;
  const auto train = b.split.train();
  const auto test = b.split.test();
  const auto encoder = benchmark_encoder(b);
  const nd::DenseArray z = locator::embed_all_nodes(g, encoder);
  rewriter::RewriterConfig cfg;
  cfg.k = kBenchmarkK;
  cfg.caps.community_size = b.size_cap;
  cfg.seed = 11;
  const auto agent = rewriter::train_rewriter(g, train, z, cfg);
  auto gain = [&](std::span<const Community> comms, std::uint64_t seed,
                  double& before, double& after) {
    const auto samples =
        rewriter::make_training_samples(g, comms, kBenchmarkK, 100, cfg.caps, seed);
    before = after = 0.0;
    for (const auto& s : samples) {
      before += metrics::f1_pair(s.seed_community, s.truth);
      const Community r = rewriter::rewrite(g, s.seed_community, z, agent, cfg.caps);
      after += metrics::f1_pair(r, s.truth);
    }
    before /= 100.0;
    after /= 100.0;
  };
  double held_before, held_after, train_before, train_after;
  gain(test, 0xabc, held_before, held_after);
  gain(train, 0xdef, train_before, train_after);
  return {held_after >= held_before && train_after - train_before >= 0.01,
          fmt("held-out %.4f -> %.4f, training %.4f -> %.4f", held_before,
              held_after, train_before, train_after)};
}

// --- episode invariants fuzz ------------------------------------------------

Outcome episode_fuzz() {
  nd::Rng rng(4242);
  std::size_t violations = 0;
  std::string first;
  auto violate = [&](const std::string& what) {
    if (violations++ == 0) first = what;
  };
  double worst_telescope = 0.0;
  for (int run = 0; run < 1000; ++run) {
    const std::uint64_t seed = rng();
    nd::Rng local(seed);
    SynthParams sp{3 + seed % 4, 3, 8, 0.5 + 0.1 * (seed % 5), seed % 10, seed};
    const Dataset data = synth_planted(sp);
    const Graph& g = data.graph;
    const std::size_t d = 3;
    nd::DenseArray z(g.node_count(), d);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (double& v : z.values()) v = normal(local);
    const auto agent = rewriter::Agent::init(d, seed);
    rewriter::Caps caps;
    caps.community_size = 4 + seed % 8;
    caps.boundary = 1 + seed % 10;
    const auto& comms = data.communities.communities;
    const Community& truth = comms[seed % comms.size()];
    std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(g.node_count() - 1));
    const Community start =
        capped_ego_net(g, pick(local), 1 + static_cast<int>(seed % 2),
                       1 + seed % caps.community_size);
    bool exclude_stopped = false, expand_stopped = false;
    auto observer = [&](const rewriter::EpisodeState& before,
                        const rewriter::StepDecision& dec,
                        const rewriter::EpisodeState& after) {
      if (after.community.empty()) violate("empty community");
      if (dec.exclude && !before.community.contains(*dec.exclude)) {
        violate("exclude outside community");
      }
      if (dec.expand &&
          !std::binary_search(before.boundary.begin(), before.boundary.end(),
                              *dec.expand)) {
        violate("expand outside boundary");
      }
      if (before.boundary != boundary(g, before.community, caps.boundary)) {
        violate("stale boundary");
      }
      if ((exclude_stopped && dec.exclude) || (expand_stopped && dec.expand)) {
        violate("action after STOP");
      }
      if (dec.expand && before.community.size() >= caps.community_size) {
        violate("expanded past the size cap");
      }
      exclude_stopped = exclude_stopped || !dec.exclude;
      expand_stopped = expand_stopped || !dec.expand;
      if (after.exclude_done != exclude_stopped ||
          after.expand_done != expand_stopped) {
        violate("done flags disagree with STOP history");
      }
      Community expected = before.community;
      if (dec.exclude) expected = expected.without(*dec.exclude);
      if (dec.expand) expected = expected.with(*dec.expand);
      if (after.community != expected) violate("community update mismatch");
      if (after.reps.rows() != after.nodes.size() + 1) violate("reps shape");
    };
    const auto traj = rewriter::rollout(g, start, &truth, z, agent,
                                        rewriter::Mode::sample, caps, seed,
                                        observer);
    if (traj.steps.size() > caps.step_cap()) violate("step cap exceeded");
    if (traj.steps.size() < caps.step_cap() &&
        !(exclude_stopped && expand_stopped)) {
      violate("episode ended before both STOPs");
    }
    const double telescoped =
        metrics::f1_pair(traj.final, truth) - metrics::f1_pair(start, truth);
    worst_telescope =
        std::max(worst_telescope, std::abs(traj.total_reward() - telescoped));
  }
  if (worst_telescope > 1e-12) violate("reward telescoping");
  std::string detail = violations == 0
                           ? "1000 rollouts clean"
                           : std::to_string(violations) + " violations, first: " + first;
  detail += fmt(", telescoping error %.1e", worst_telescope);
  return {violations == 0, detail};
}

// --- determinism ----------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() /
                        ("seedcomm_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  cmd_synth({16, 6, 10, 0.7, 40, 5}, (root / "data").string());
  RunConfig cfg;
  cfg.edges = (root / "data" / "edges.txt").string();
  cfg.communities = (root / "data" / "communities.txt").string();
  cfg.train_count = 6;
  cfg.valid_count = 2;
  cfg.seed = 3;
  cfg.out = (root / "run1").string();
  cmd_pipeline(cfg);
  cfg.out = (root / "run2").string();
  cmd_pipeline(cfg);
  const std::string a = slurp(root / "run1" / "predictions.txt");
  const std::string b = slurp(root / "run2" / "predictions.txt");
  const bool same = !a.empty() && a == b;
  fs::remove_all(root);
  return {same, same ? std::to_string(std::count(a.begin(), a.end(), '\n')) +
                           " predicted communities, byte-identical"
                     : "prediction files differ"};
}

struct Criterion {
  const char* name;
  double budget_seconds;
  std::function<Outcome()> check;
};

}  // namespace

int main() {
  const Criterion criteria[] = {
      {"gradient-oracle", 30, gradient_oracle},
      {"metric-oracles", 10, metric_oracles},
      {"matcher-oracle", 5, matcher_oracle},
      {"order-embedding-separation", 120, order_separation},
      {"end-to-end-planted-recovery", 300, planted_recovery},
      {"rewriter-improvement", 300, rewriter_improvement},
      {"episode-invariants-fuzz", 60, episode_fuzz},
      {"pipeline-determinism", 600, determinism},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
    const bool in_time = secs < c.budget_seconds;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("%s %-28s %s; %.1fs of %.0fs%s\n", pass ? "PASS" : "FAIL",
                c.name, o.detail.c_str(), secs, c.budget_seconds,
                in_time ? "" : " (over budget)");
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
