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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "seedcomm/error.hpp"
#include "seedcomm/graph.hpp"

namespace seedcomm {

namespace {

// Draws `count` distinct pairs uniformly from a space of `total` candidates.
// `draw` returns a random pair from the full space and `admissible` filters
// it. Dense requests fall back to enumerating the admissible set.
template <typename Draw, typename Enumerate>
std::vector<Edge> distinct_pairs(std::size_t count, std::size_t total,
                                 nd::Rng& rng, Draw draw,
                                 Enumerate enumerate) {
  std::vector<Edge> out;
  if (count == 0) return out;
  if (count * 4 >= total) {
    std::vector<Edge> all = enumerate();
    std::shuffle(all.begin(), all.end(), rng);
    all.resize(count);
    return all;
  }
  std::set<Edge> seen;
  while (out.size() < count) {
    auto e = draw();
    if (!e) continue;
    Edge key = std::minmax(e->first, e->second);
    if (seen.insert(key).second) out.push_back(*e);
  }
  return out;
}

bool connected(std::size_t n, const std::vector<Edge>& edges) {
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::size_t components = n;
  for (const auto& [u, v] : edges) {
    const std::size_t a = find(u), b = find(v);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components == 1;
}

}  // namespace

std::size_t size_percentile(std::vector<std::size_t> sizes, double percentile) {
  require(!sizes.empty(), "size_percentile: no sizes");
  require(percentile > 0.0 && percentile <= 1.0,
          "percentile must be in (0, 1]");
  std::sort(sizes.begin(), sizes.end());
  const auto idx = static_cast<std::size_t>(
      std::floor(percentile * static_cast<double>(sizes.size() - 1)));
  return sizes[std::min(idx, sizes.size() - 1)];
}

Dataset preprocess(const Graph& graph, const CommunitySet& comms,
                   double percentile, std::size_t sample_count,
                   std::uint64_t seed) {
  require(sample_count >= 1, "preprocess: sample_count must be >= 1");
  require(!comms.communities.empty(), "preprocess: no communities");
  std::vector<std::size_t> sizes;
  for (const auto& c : comms.communities) sizes.push_back(c.size());
  const std::size_t threshold = size_percentile(sizes, percentile);

  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < comms.communities.size(); ++i) {
    if (comms.communities[i].size() <= threshold) kept.push_back(i);
  }
  if (kept.empty()) fail(ErrorCode::state, "preprocess: no communities survive");

  if (sample_count < kept.size()) {
    nd::Rng rng(seed);
    std::vector<std::size_t> shuffled = kept;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    shuffled.resize(sample_count);
    std::sort(shuffled.begin(), shuffled.end());
    kept = std::move(shuffled);
  }

  std::vector<NodeId> retained;
  for (std::size_t i : kept) {
    const Community& c = comms.communities[i];
    retained.insert(retained.end(), c.begin(), c.end());
    const auto outer =
        boundary(graph, c, std::numeric_limits<std::size_t>::max());
    retained.insert(retained.end(), outer.begin(), outer.end());
  }
  std::sort(retained.begin(), retained.end());
  retained.erase(std::unique(retained.begin(), retained.end()),
                 retained.end());

  const InducedSubgraph sub = induce(graph, retained);
  std::vector<Edge> edges;
  for (std::uint32_t i = 0; i < sub.adjacency.size(); ++i) {
    for (std::uint32_t j : sub.adjacency[i]) {
      if (i < j) edges.emplace_back(i, j);
    }
  }
  std::vector<OriginalId> ids;
  ids.reserve(retained.size());
  for (NodeId u : retained) ids.push_back(graph.original_id(u));
  std::optional<nd::DenseArray> features;
  if (graph.raw_features()) {
    const auto& raw = *graph.raw_features();
    nd::DenseArray f(retained.size(), raw.cols());
    for (std::size_t i = 0; i < retained.size(); ++i) {
      auto src = raw.row(retained[i]);
      std::copy(src.begin(), src.end(), f.row(i).begin());
    }
    features = std::move(f);
  }
  Graph out = Graph::from_edges(retained.size(), edges, std::move(ids),
                                std::move(features));

  std::vector<Community> remapped;
  remapped.reserve(kept.size());
  for (std::size_t i : kept) {
    std::vector<NodeId> members;
    for (NodeId u : comms.communities[i]) {
      members.push_back(static_cast<NodeId>(
          std::lower_bound(retained.begin(), retained.end(), u) -
          retained.begin()));
    }
    remapped.emplace_back(std::move(members));
  }
  return Dataset{std::move(out), CommunitySet::all_train(std::move(remapped))};
}

Graph build_hybrid(const Graph& a, const Graph& b, std::size_t link_count,
                   std::uint64_t seed) {
  const std::size_t na = a.node_count(), nb = b.node_count();
  const bool fits = nb == 0 || na <= std::numeric_limits<std::size_t>::max() / nb;
  require(!fits || link_count <= na * nb,
          "build_hybrid: more cross links requested than node pairs");
  require(a.raw_features().has_value() == b.raw_features().has_value(),
          "build_hybrid: both graphs need raw features, or neither");

  std::vector<Edge> edges = a.edges();
  for (const auto& [u, v] : b.edges()) {
    edges.emplace_back(static_cast<NodeId>(u + na), static_cast<NodeId>(v + na));
  }

  nd::Rng rng(seed);
  std::uniform_int_distribution<NodeId> pick_a(0, static_cast<NodeId>(na - 1));
  std::uniform_int_distribution<NodeId> pick_b(0, static_cast<NodeId>(nb - 1));
  const auto cross = distinct_pairs(
      link_count, na * nb, rng,
      [&]() -> std::optional<Edge> {
        const NodeId u = pick_a(rng);
        const NodeId v = pick_b(rng);
        return Edge{u, static_cast<NodeId>(v + na)};
      },
      [&] {
        std::vector<Edge> all;
        all.reserve(na * nb);
        for (NodeId u = 0; u < na; ++u) {
          for (NodeId v = 0; v < nb; ++v) {
            all.emplace_back(u, static_cast<NodeId>(v + na));
          }
        }
        return all;
      });
  edges.insert(edges.end(), cross.begin(), cross.end());

  const auto a_ids = a.original_ids();
  const auto b_ids = b.original_ids();
  const OriginalId a_max = *std::max_element(a_ids.begin(), a_ids.end());
  const OriginalId b_min = *std::min_element(b_ids.begin(), b_ids.end());
  std::vector<OriginalId> ids(a_ids.begin(), a_ids.end());
  for (OriginalId id : b_ids) ids.push_back(id - b_min + a_max + 1);

  std::optional<nd::DenseArray> features;
  if (a.raw_features()) {
    const auto& fa = *a.raw_features();
    const auto& fb = *b.raw_features();
    require(fa.cols() == fb.cols(), "build_hybrid: feature widths differ");
    std::vector<double> values(fa.values().begin(), fa.values().end());
    values.insert(values.end(), fb.values().begin(), fb.values().end());
    features = nd::DenseArray(na + nb, fa.cols(), std::move(values));
  }
  return Graph::from_edges(na + nb, edges, std::move(ids), std::move(features));
}

std::vector<Community> offset_communities(std::span<const Community> comms,
                                          std::size_t offset) {
  std::vector<Community> out;
  out.reserve(comms.size());
  for (const Community& c : comms) {
    std::vector<NodeId> members;
    for (NodeId u : c) members.push_back(static_cast<NodeId>(u + offset));
    out.emplace_back(std::move(members));
  }
  return out;
}

Dataset synth_planted(const SynthParams& p) {
  require(p.communities >= 1, "synth: need at least one community");
  require(p.min_size >= 3, "synth: minimum community size must be >= 3");
  require(p.max_size >= p.min_size, "synth: max size below min size");
  require(p.p_in > 0.0 && p.p_in <= 1.0, "synth: p_in must be in (0, 1]");

  nd::Rng rng(p.seed);
  std::uniform_int_distribution<std::size_t> size_dist(p.min_size, p.max_size);
  std::vector<std::size_t> sizes(p.communities);
  for (auto& s : sizes) s = size_dist(rng);
  const std::size_t n = std::accumulate(sizes.begin(), sizes.end(),
                                        std::size_t{0});

  std::size_t intra_pairs = 0;
  for (std::size_t s : sizes) intra_pairs += s * (s - 1) / 2;
  const std::size_t inter_pairs = n * (n - 1) / 2 - intra_pairs;
  require(p.cross_links <= inter_pairs,
          "synth: more cross links requested than inter-group pairs");

  std::vector<NodeId> perm(n);
  std::iota(perm.begin(), perm.end(), NodeId{0});
  std::shuffle(perm.begin(), perm.end(), rng);

  std::vector<std::size_t> group_of(n);
  std::vector<Community> comms;
  std::vector<Edge> edges;
  std::bernoulli_distribution coin(p.p_in);
  std::size_t offset = 0;
  for (std::size_t g = 0; g < sizes.size(); ++g) {
    const std::size_t s = sizes[g];
    std::vector<Edge> local;
    constexpr int kMaxAttempts = 10000;
    int attempt = 0;
    do {
      if (++attempt > kMaxAttempts) {
        fail(ErrorCode::invalid_argument,
             "synth: could not draw a connected group; p_in too small");
      }
      local.clear();
      for (NodeId i = 0; i < s; ++i) {
        for (NodeId j = i + 1; j < s; ++j) {
          if (coin(rng)) local.emplace_back(i, j);
        }
      }
    } while (!connected(s, local));
    std::vector<NodeId> members;
    for (std::size_t i = 0; i < s; ++i) {
      members.push_back(perm[offset + i]);
      group_of[perm[offset + i]] = g;
    }
    for (const auto& [i, j] : local) {
      edges.emplace_back(perm[offset + i], perm[offset + j]);
    }
    comms.emplace_back(std::move(members));
    offset += s;
  }

  std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(n - 1));
  const auto cross = distinct_pairs(
      p.cross_links, inter_pairs, rng,
      [&]() -> std::optional<Edge> {
        const NodeId u = pick(rng);
        const NodeId v = pick(rng);
        if (group_of[u] == group_of[v]) return std::nullopt;
        return Edge{u, v};
      },
      [&] {
        std::vector<Edge> all;
        for (NodeId u = 0; u < n; ++u) {
          for (NodeId v = u + 1; v < n; ++v) {
            if (group_of[u] != group_of[v]) all.emplace_back(u, v);
          }
        }
        return all;
      });
  edges.insert(edges.end(), cross.begin(), cross.end());

  return Dataset{Graph::from_edges(n, edges),
                 CommunitySet::all_train(std::move(comms))};
}

}  // namespace seedcomm
