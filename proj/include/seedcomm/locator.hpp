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

// Community order embedding: a GCN encoder whose summed node embeddings
// place subcommunities elementwise below their supersets, trained with a
// max-margin loss, then used to rank every node's ego net against the
// training communities.

#ifndef SEEDCOMM_LOCATOR_HPP_
#define SEEDCOMM_LOCATOR_HPP_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "seedcomm/graph.hpp"
#include "seedcomm/ndiff.hpp"

namespace seedcomm::locator {

// Parameters: "w_in" (f+5) x d, "gcn.<l>" d x d for l < layers, "w_out"
// ((layers+1) d) x d.
struct Encoder {
  int layers = 2;
  std::size_t dim = 64;
  nd::ParamSet params;

  static Encoder init(std::size_t feature_dim, std::size_t dim, int layers,
                      std::uint64_t seed);
  // Recovers layers and dim from parameter shapes.
  static Encoder from_params(nd::ParamSet params);
  std::size_t feature_dim() const { return params.get("w_in").rows(); }
};

using Embedding = std::vector<double>;

struct EncodeOptions {
  bool training = false;
  double dropout = 0.0;
  std::uint64_t seed = 0;
};

// Per-node embeddings z(u) (n x d) of an induced subgraph.
nd::Var encode_nodes(nd::Tape& tape, const Graph& graph,
                     const InducedSubgraph& sub, const Encoder& encoder,
                     const EncodeOptions& options = {});
// Sum of z(u) over the community's induced subgraph, 1 x d.
nd::Var encode_community(nd::Tape& tape, const Graph& graph,
                         const Community& community, const Encoder& encoder,
                         const EncodeOptions& options = {});
Embedding embed_community(const Graph& graph, const Community& community,
                          const Encoder& encoder);
// z(u) for every node from one pass over the whole graph, |V| x d.
nd::DenseArray embed_all_nodes(const Graph& graph, const Encoder& encoder);

// sum_i max(0, a_i - b_i)^2; zero when a sits elementwise below b.
double order_penalty(std::span<const double> a, std::span<const double> b);
nd::Var order_penalty(nd::Var a, nd::Var b);

struct PairBatch {
  // (sub, super) with sub a strict subset of super.
  std::vector<std::pair<Community, Community>> positives;
  // (a, b) with a not a subset of b.
  std::vector<std::pair<Community, Community>> negatives;
};

using EmbeddedPair = std::pair<nd::Var, nd::Var>;

// sum over positives of E + sum over negatives of max(0, alpha - E).
nd::Var margin_loss(std::span<const EmbeddedPair> positives,
                    std::span<const EmbeddedPair> negatives, double alpha);

PairBatch sample_pairs(const Graph& graph, std::span<const Community> train,
                       std::size_t per_batch, std::uint64_t seed);

struct LocatorConfig {
  std::size_t dim = 64;
  int layers = 2;
  std::size_t epochs = 2;
  std::size_t batches_per_epoch = 32;
  std::size_t pairs_per_batch = 50;
  double lr = 1e-4;
  double margin = 0.4;
  double dropout = 0.2;
  std::uint64_t seed = 0;
};

using LossLog = std::function<void(std::size_t epoch, std::size_t batch,
                                   double loss)>;

Encoder train_locator(const Graph& graph, std::span<const Community> train,
                      const LocatorConfig& config, const LossLog& log = {});
// Continues training an existing encoder.
Encoder train_locator(const Graph& graph, std::span<const Community> train,
                      Encoder encoder, const LocatorConfig& config,
                      const LossLog& log = {});

// Candidate i is the (capped) k-ego net of node i.
struct CandidateTable {
  std::vector<Community> communities;
  nd::DenseArray embeddings;  // |V| x d
  std::size_t size() const { return communities.size(); }
};

// k is the encoder depth; ego nets above `size_cap` are truncated by hop
// distance then id. `workers` > 1 splits nodes across threads.
CandidateTable encode_all_candidates(const Graph& graph,
                                     const Encoder& encoder,
                                     std::size_t size_cap,
                                     std::size_t workers = 1);

// m x d matrix of community embeddings.
nd::DenseArray embed_patterns(const Graph& graph,
                              std::span<const Community> patterns,
                              const Encoder& encoder);

enum class Distance { euclidean, order };

double distance(std::span<const double> pattern,
                std::span<const double> candidate, Distance metric);

struct Match {
  std::size_t pattern = 0;
  NodeId center = 0;
  double distance = 0.0;
};

// Per-pattern quota: ceil(total / m) for the first total mod m patterns,
// floor(total / m) for the rest.
std::vector<std::size_t> split_quota(std::size_t total, std::size_t patterns);

// For each pattern in order, its quota of nearest unclaimed eligible
// candidates (ties by smaller center). An empty `eligible` admits every
// candidate.
std::vector<Match> match(const nd::DenseArray& patterns,
                         const CandidateTable& candidates,
                         std::span<const std::size_t> quota,
                         const std::vector<bool>& eligible = {},
                         Distance metric = Distance::euclidean);
std::vector<Match> match(const nd::DenseArray& patterns,
                         const CandidateTable& candidates,
                         std::size_t per_pattern,
                         const std::vector<bool>& eligible = {},
                         Distance metric = Distance::euclidean);

// Every eligible candidate whose distance to its closest pattern is at most
// `eta`, ascending by that distance then center.
std::vector<Match> match_threshold(const nd::DenseArray& patterns,
                                   const CandidateTable& candidates,
                                   double eta,
                                   const std::vector<bool>& eligible = {},
                                   Distance metric = Distance::euclidean);

std::vector<Community> matched_communities(std::span<const Match> matches,
                                           const CandidateTable& candidates);

// `pattern<TAB>center<TAB>distance`, center in original ids.
void write_matches_tsv(std::ostream& out, std::span<const Match> matches,
                       const Graph& graph);

}  // namespace seedcomm::locator

#endif  // SEEDCOMM_LOCATOR_HPP_
