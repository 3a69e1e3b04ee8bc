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

#include "seedcomm/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include "seedcomm/error.hpp"

namespace seedcomm {

// --- Community --------------------------------------------------------------

Community::Community(std::vector<NodeId> members) : members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
}

bool Community::contains(NodeId u) const {
  return std::binary_search(members_.begin(), members_.end(), u);
}

Community Community::without(NodeId u) const {
  Community out;
  out.members_.reserve(members_.size());
  for (NodeId v : members_) {
    if (v != u) out.members_.push_back(v);
  }
  return out;
}

Community Community::with(NodeId u) const {
  Community out = *this;
  auto it = std::lower_bound(out.members_.begin(), out.members_.end(), u);
  if (it == out.members_.end() || *it != u) out.members_.insert(it, u);
  return out;
}

bool Community::subset_of(const Community& other) const {
  return std::includes(other.members_.begin(), other.members_.end(),
                       members_.begin(), members_.end());
}

std::size_t Community::intersection_size(const Community& other) const {
  std::size_t n = 0;
  auto a = members_.begin();
  auto b = other.members_.begin();
  while (a != members_.end() && b != other.members_.end()) {
    if (*a < *b) {
      ++a;
    } else if (*b < *a) {
      ++b;
    } else {
      ++n;
      ++a;
      ++b;
    }
  }
  return n;
}

// --- CommunitySet -----------------------------------------------------------

CommunitySet CommunitySet::all_train(std::vector<Community> communities) {
  CommunitySet out;
  out.split.train.resize(communities.size());
  std::iota(out.split.train.begin(), out.split.train.end(), std::size_t{0});
  out.communities = std::move(communities);
  return out;
}

CommunitySet CommunitySet::resplit(std::size_t train_count,
                                   std::size_t validation_count) const {
  require(train_count >= 1, "split: at least one training community needed");
  require(train_count <= communities.size(),
          "split: " + std::to_string(train_count) +
              " training communities requested but only " +
              std::to_string(communities.size()) + " available");
  CommunitySet out;
  out.communities = communities;
  const std::size_t n = communities.size();
  const std::size_t val_end = std::min(n, train_count + validation_count);
  for (std::size_t i = 0; i < n; ++i) {
    if (i < train_count) {
      out.split.train.push_back(i);
    } else if (i < val_end) {
      out.split.validation.push_back(i);
    } else {
      out.split.test.push_back(i);
    }
  }
  return out;
}

namespace {

std::vector<Community> pick(const std::vector<Community>& all,
                            const std::vector<std::size_t>& idx) {
  std::vector<Community> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(all.at(i));
  return out;
}

}  // namespace

std::vector<Community> CommunitySet::train() const {
  return pick(communities, split.train);
}
std::vector<Community> CommunitySet::validation() const {
  return pick(communities, split.validation);
}
std::vector<Community> CommunitySet::test() const {
  return pick(communities, split.test);
}

std::size_t CommunitySet::max_train_size() const {
  std::size_t m = 0;
  for (std::size_t i : split.train) m = std::max(m, communities.at(i).size());
  return m;
}

// --- Graph ------------------------------------------------------------------

Graph Graph::from_edges(std::size_t node_count, std::span<const Edge> edges,
                        std::vector<OriginalId> original_ids,
                        std::optional<nd::DenseArray> raw_features) {
  require(node_count >= 1, "graph must have at least one node");
  if (original_ids.empty()) {
    original_ids.resize(node_count);
    std::iota(original_ids.begin(), original_ids.end(), OriginalId{0});
  }
  require(original_ids.size() == node_count,
          "original id count does not match node count");
  if (raw_features) {
    require(raw_features->rows() == node_count,
            "raw feature rows do not match node count");
  }

  std::vector<std::vector<NodeId>> adj(node_count);
  for (const auto& [u, v] : edges) {
    require(u < node_count && v < node_count, "edge endpoint out of range");
    if (u == v) continue;
    adj[u].push_back(v);
    adj[v].push_back(u);
  }

  Graph g;
  g.offsets_.assign(1, 0);
  g.offsets_.reserve(node_count + 1);
  for (auto& list : adj) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    g.targets_.insert(g.targets_.end(), list.begin(), list.end());
    g.offsets_.push_back(g.targets_.size());
  }
  g.original_ids_ = std::move(original_ids);
  g.by_original_.reserve(node_count);
  for (NodeId u = 0; u < node_count; ++u) {
    const bool fresh = g.by_original_.emplace(g.original_ids_[u], u).second;
    require(fresh, "duplicate original id " +
                       std::to_string(g.original_ids_[u]));
  }
  g.raw_features_ = std::move(raw_features);
  g.augmented_ = augment_features(g);
  return g;
}

bool Graph::has_edge(NodeId u, NodeId v) const {
  auto n = neighbors(u);
  return std::binary_search(n.begin(), n.end(), v);
}

std::optional<NodeId> Graph::internal_id(OriginalId id) const {
  auto it = by_original_.find(id);
  if (it == by_original_.end()) return std::nullopt;
  return it->second;
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count());
  for (NodeId u = 0; u < node_count(); ++u) {
    for (NodeId v : neighbors(u)) {
      if (u < v) out.emplace_back(u, v);
    }
  }
  return out;
}

Graph Graph::with_features(nd::DenseArray raw_features) const {
  const auto e = edges();
  return from_edges(node_count(), e, original_ids_, std::move(raw_features));
}

nd::DenseArray augment_features(const Graph& graph) {
  const std::size_t n = graph.node_count();
  const auto& raw = graph.raw_features();
  const std::size_t f = raw ? raw->cols() : 1;
  nd::DenseArray out(n, f + 5);
  for (NodeId u = 0; u < n; ++u) {
    for (std::size_t j = 0; j < f; ++j) out(u, j) = raw ? (*raw)(u, j) : 1.0;
    const auto nbrs = graph.neighbors(u);
    out(u, f) = static_cast<double>(nbrs.size());
    if (nbrs.empty()) continue;
    double mx = 0.0, mn = 0.0, total = 0.0;
    bool first = true;
    for (NodeId v : nbrs) {
      const double d = static_cast<double>(graph.degree(v));
      mx = first ? d : std::max(mx, d);
      mn = first ? d : std::min(mn, d);
      total += d;
      first = false;
    }
    const double count = static_cast<double>(nbrs.size());
    const double mean = total / count;
    double var = 0.0;
    for (NodeId v : nbrs) {
      const double diff = static_cast<double>(graph.degree(v)) - mean;
      var += diff * diff;
    }
    out(u, f + 1) = mx;
    out(u, f + 2) = mn;
    out(u, f + 3) = mean;
    out(u, f + 4) = std::sqrt(var / count);
  }
  return out;
}

InducedSubgraph induce(const Graph& graph, std::span<const NodeId> nodes) {
  InducedSubgraph sub;
  sub.nodes.assign(nodes.begin(), nodes.end());
  std::unordered_map<NodeId, std::uint32_t> local;
  local.reserve(nodes.size() * 2);
  for (std::uint32_t i = 0; i < nodes.size(); ++i) {
    require(graph.valid(nodes[i]), "induce: invalid node id");
    local.emplace(nodes[i], i);
  }
  sub.adjacency.resize(nodes.size());
  for (std::uint32_t i = 0; i < nodes.size(); ++i) {
    for (NodeId v : graph.neighbors(nodes[i])) {
      if (auto it = local.find(v); it != local.end()) {
        sub.adjacency[i].push_back(it->second);
      }
    }
  }
  return sub;
}

// --- extraction -------------------------------------------------------------

std::vector<std::pair<NodeId, int>> ego_hops(const Graph& graph,
                                             NodeId center, int k) {
  require(graph.valid(center), "ego net: invalid center " +
                                   std::to_string(center));
  require(k >= 0, "ego net: k must be non-negative");
  std::vector<std::pair<NodeId, int>> order{{center, 0}};
  std::unordered_map<NodeId, int> seen{{center, 0}};
  std::deque<NodeId> queue{center};
  while (!queue.empty()) {
    const NodeId u = queue.front();
    queue.pop_front();
    const int hop = seen[u];
    if (hop == k) continue;
    for (NodeId v : graph.neighbors(u)) {
      if (seen.emplace(v, hop + 1).second) {
        order.emplace_back(v, hop + 1);
        queue.push_back(v);
      }
    }
  }
  return order;
}

Community k_ego_net(const Graph& graph, NodeId center, int k) {
  require(k >= 1, "ego net: k must be at least 1");
  std::vector<NodeId> members;
  for (const auto& [u, _] : ego_hops(graph, center, k)) members.push_back(u);
  return Community(std::move(members));
}

Community capped_ego_net(const Graph& graph, NodeId center, int k,
                         std::size_t cap) {
  require(k >= 1, "ego net: k must be at least 1");
  require(cap >= 1, "ego net: cap must be at least 1");
  auto hops = ego_hops(graph, center, k);
  if (hops.size() > cap) {
    std::sort(hops.begin(), hops.end(), [](const auto& a, const auto& b) {
      return a.second != b.second ? a.second < b.second : a.first < b.first;
    });
    hops.resize(cap);
  }
  std::vector<NodeId> members;
  members.reserve(hops.size());
  for (const auto& [u, _] : hops) members.push_back(u);
  return Community(std::move(members));
}

std::vector<NodeId> boundary(const Graph& graph, const Community& community,
                             std::size_t cap) {
  std::unordered_map<NodeId, std::size_t> links;
  for (NodeId u : community) {
    require(graph.valid(u), "boundary: community member out of range");
    for (NodeId v : graph.neighbors(u)) {
      if (!community.contains(v)) ++links[v];
    }
  }
  std::vector<std::pair<NodeId, std::size_t>> ranked(links.begin(),
                                                     links.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  if (ranked.size() > cap) ranked.resize(cap);
  std::vector<NodeId> out;
  out.reserve(ranked.size());
  for (const auto& [v, _] : ranked) out.push_back(v);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace seedcomm
