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

// Immutable undirected graph, community sets, file ingestion, ego-net and
// boundary extraction, and the dataset builders (preprocessing, hybrid
// stacking, planted-partition synthesis).

#ifndef SEEDCOMM_GRAPH_HPP_
#define SEEDCOMM_GRAPH_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "seedcomm/ndiff.hpp"

namespace seedcomm {

using NodeId = std::uint32_t;
using OriginalId = std::int64_t;
using Edge = std::pair<NodeId, NodeId>;

// Sorted, duplicate-free set of node ids.
class Community {
 public:
  Community() = default;
  explicit Community(std::vector<NodeId> members);
  Community(std::initializer_list<NodeId> members)
      : Community(std::vector<NodeId>(members)) {}

  std::span<const NodeId> members() const noexcept { return members_; }
  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }
  bool contains(NodeId u) const;
  auto begin() const noexcept { return members_.begin(); }
  auto end() const noexcept { return members_.end(); }

  // Set algebra helpers; each returns a new sorted set.
  Community without(NodeId u) const;
  Community with(NodeId u) const;
  bool subset_of(const Community& other) const;
  std::size_t intersection_size(const Community& other) const;

  friend bool operator==(const Community&, const Community&) = default;
  friend auto operator<=>(const Community&, const Community&) = default;

 private:
  std::vector<NodeId> members_;
};

struct CommunitySplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;
};

struct CommunitySet {
  std::vector<Community> communities;
  CommunitySplit split;

  // All communities in `train`.
  static CommunitySet all_train(std::vector<Community> communities);
  // First `train_count` train, next `validation_count` validation, the rest
  // test.
  CommunitySet resplit(std::size_t train_count,
                       std::size_t validation_count) const;

  std::vector<Community> train() const;
  std::vector<Community> validation() const;
  std::vector<Community> test() const;
  std::size_t max_train_size() const;
};

class Graph {
 public:
  // Builds from an edge list over ids [0, node_count). Self-loops and
  // duplicate edges are dropped. `original_ids` defaults to the identity;
  // `raw_features`, when given, needs node_count rows.
  static Graph from_edges(std::size_t node_count, std::span<const Edge> edges,
                          std::vector<OriginalId> original_ids = {},
                          std::optional<nd::DenseArray> raw_features = {});

  std::size_t node_count() const noexcept { return offsets_.size() - 1; }
  std::size_t edge_count() const noexcept { return targets_.size() / 2; }
  std::span<const NodeId> neighbors(NodeId u) const {
    return {targets_.data() + offsets_[u], targets_.data() + offsets_[u + 1]};
  }
  std::size_t degree(NodeId u) const {
    return offsets_[u + 1] - offsets_[u];
  }
  bool has_edge(NodeId u, NodeId v) const;
  bool valid(NodeId u) const noexcept { return u < node_count(); }

  OriginalId original_id(NodeId u) const { return original_ids_[u]; }
  std::span<const OriginalId> original_ids() const noexcept {
    return original_ids_;
  }
  std::optional<NodeId> internal_id(OriginalId id) const;

  const std::optional<nd::DenseArray>& raw_features() const noexcept {
    return raw_features_;
  }
  // node_count x (f + 5), see augment_features().
  const nd::DenseArray& augmented_features() const noexcept {
    return augmented_;
  }
  std::size_t feature_dim() const noexcept { return augmented_.cols(); }

  std::vector<Edge> edges() const;
  Graph with_features(nd::DenseArray raw_features) const;

 private:
  Graph() = default;

  std::vector<std::size_t> offsets_{0};
  std::vector<NodeId> targets_;
  std::vector<OriginalId> original_ids_;
  std::unordered_map<OriginalId, NodeId> by_original_;
  std::optional<nd::DenseArray> raw_features_;
  nd::DenseArray augmented_;
};

// x'(u) = [x(u), deg(u), max, min, mean, std of neighbor degrees]; x(u) = 1
// without raw features. Population std; isolated nodes get zero statistics.
nd::DenseArray augment_features(const Graph& graph);

// Induced subgraph with local ids: local index i is nodes[i].
struct InducedSubgraph {
  std::vector<NodeId> nodes;
  nd::Adjacency adjacency;
};
InducedSubgraph induce(const Graph& graph, std::span<const NodeId> nodes);

// --- extraction -----------------------------------------------------------

Community k_ego_net(const Graph& graph, NodeId center, int k);
// k-ego net truncated to `cap` nodes, keeping the smallest (hop, id).
Community capped_ego_net(const Graph& graph, NodeId center, int k,
                         std::size_t cap);
// Hop distance of every node of the k-ego net, in BFS order.
std::vector<std::pair<NodeId, int>> ego_hops(const Graph& graph,
                                             NodeId center, int k);

inline constexpr std::size_t kDefaultBoundaryCap = 10;

// Outer boundary, sorted by id. Above `cap`, keeps the nodes with the most
// links into the community, smaller id first on ties.
std::vector<NodeId> boundary(const Graph& graph, const Community& community,
                             std::size_t cap = kDefaultBoundaryCap);

// --- ingestion --------------------------------------------------------------

Graph parse_edge_list(std::istream& in, const std::string& source = "<input>");
Graph load_edge_list(const std::string& path);
CommunitySet parse_communities(std::istream& in, const Graph& graph,
                               const std::string& source = "<input>");
CommunitySet load_communities(const std::string& path, const Graph& graph);
// `id f1 ... ff` rows; nodes without a row get zeros, unknown ids are
// ignored.
Graph load_features(const std::string& path, const Graph& graph);

void write_edge_list(const std::string& path, const Graph& graph);
void write_communities(std::ostream& out, std::span<const Community> comms,
                       const Graph& graph);
void write_communities(const std::string& path,
                       std::span<const Community> comms, const Graph& graph);
// Two columns: original id, internal id.
void write_id_map(const std::string& path, const Graph& graph);

// Communities read verbatim (no graph remapping), for scoring files against
// each other.
std::vector<std::vector<OriginalId>> load_raw_communities(
    const std::string& path);

// --- dataset builders ---------------------------------------------------------

// Size threshold at fraction `percentile` of the sorted sizes, taken at
// index floor(percentile * (n - 1)).
std::size_t size_percentile(std::vector<std::size_t> sizes, double percentile);

struct Dataset {
  Graph graph;
  CommunitySet communities;
};

Dataset preprocess(const Graph& graph, const CommunitySet& comms,
                   double percentile, std::size_t sample_count,
                   std::uint64_t seed);

// Disjoint union (b offset by a.node_count()) plus `link_count` random
// cross edges.
Graph build_hybrid(const Graph& a, const Graph& b, std::size_t link_count,
                   std::uint64_t seed);
// Shifts communities of the second graph of a hybrid into its id space.
std::vector<Community> offset_communities(std::span<const Community> comms,
                                          std::size_t offset);

struct SynthParams {
  std::size_t communities = 10;
  std::size_t min_size = 6;
  std::size_t max_size = 10;
  double p_in = 0.8;
  std::size_t cross_links = 0;
  std::uint64_t seed = 1;
};

Dataset synth_planted(const SynthParams& params);

}  // namespace seedcomm

#endif  // SEEDCOMM_GRAPH_HPP_
