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
#include <ostream>
#include <thread>

#include "seedcomm/error.hpp"
#include "seedcomm/locator.hpp"

namespace seedcomm::locator {

CandidateTable encode_all_candidates(const Graph& graph,
                                     const Encoder& encoder,
                                     std::size_t size_cap,
                                     std::size_t workers) {
  const std::size_t n = graph.node_count();
  CandidateTable table;
  table.communities.resize(n);
  table.embeddings = nd::DenseArray(n, encoder.dim);
  auto run = [&](std::size_t begin, std::size_t end) {
    for (std::size_t u = begin; u < end; ++u) {
      Community ego = capped_ego_net(graph, static_cast<NodeId>(u),
                                     encoder.layers, size_cap);
      const Embedding z = embed_community(graph, ego, encoder);
      std::copy(z.begin(), z.end(), table.embeddings.row(u).begin());
      table.communities[u] = std::move(ego);
    }
  };
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
  if (workers == 1) {
    run(0, n);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(n, begin + chunk);
      if (begin < end) pool.emplace_back(run, begin, end);
    }
    for (auto& t : pool) t.join();
  }
  return table;
}

nd::DenseArray embed_patterns(const Graph& graph,
                              std::span<const Community> patterns,
                              const Encoder& encoder) {
  nd::DenseArray out(patterns.size(), encoder.dim);
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    const Embedding z = embed_community(graph, patterns[i], encoder);
    std::copy(z.begin(), z.end(), out.row(i).begin());
  }
  return out;
}

double distance(std::span<const double> pattern,
                std::span<const double> candidate, Distance metric) {
  require(pattern.size() == candidate.size(), "distance: dimension mismatch");
  if (metric == Distance::order) return order_penalty(candidate, pattern);
  double s = 0.0;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    const double d = pattern[i] - candidate[i];
    s += d * d;
  }
  return std::sqrt(s);
}

std::vector<std::size_t> split_quota(std::size_t total, std::size_t patterns) {
  require(patterns >= 1, "split_quota: no patterns");
  std::vector<std::size_t> quota(patterns, total / patterns);
  for (std::size_t i = 0; i < total % patterns; ++i) ++quota[i];
  return quota;
}

namespace {

bool admits(const std::vector<bool>& eligible, std::size_t i) {
  return eligible.empty() || eligible[i];
}

}  // namespace

std::vector<Match> match(const nd::DenseArray& patterns,
                         const CandidateTable& candidates,
                         std::span<const std::size_t> quota,
                         const std::vector<bool>& eligible, Distance metric) {
  require(quota.size() == patterns.rows(), "match: one quota per pattern");
  require(eligible.empty() || eligible.size() == candidates.size(),
          "match: eligibility mask size");
  require(patterns.cols() == candidates.embeddings.cols(),
          "match: embedding dimensions differ");
  std::size_t pool = 0;
  for (std::size_t i = 0; i < candidates.size(); ++i) pool += admits(eligible, i);
  std::size_t wanted = 0;
  for (std::size_t q : quota) {
    require(q >= 1, "match: every pattern needs a quota of at least 1");
    wanted += q;
  }
  require(wanted <= pool, "match: " + std::to_string(wanted) +
                              " communities requested but only " +
                              std::to_string(pool) + " candidates");

  std::vector<bool> claimed(candidates.size(), false);
  std::vector<Match> out;
  out.reserve(wanted);
  std::vector<std::pair<double, NodeId>> ranked;
  for (std::size_t p = 0; p < patterns.rows(); ++p) {
    ranked.clear();
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      if (!admits(eligible, c) || claimed[c]) continue;
      ranked.emplace_back(distance(patterns.row(p),
                                   candidates.embeddings.row(c), metric),
                          static_cast<NodeId>(c));
    }
    const std::size_t take = std::min(quota[p], ranked.size());
    std::partial_sort(ranked.begin(), ranked.begin() + take, ranked.end());
    for (std::size_t i = 0; i < take; ++i) {
      claimed[ranked[i].second] = true;
      out.push_back(Match{p, ranked[i].second, ranked[i].first});
    }
  }
  return out;
}

std::vector<Match> match(const nd::DenseArray& patterns,
                         const CandidateTable& candidates,
                         std::size_t per_pattern,
                         const std::vector<bool>& eligible, Distance metric) {
  const std::vector<std::size_t> quota(patterns.rows(), per_pattern);
  return match(patterns, candidates, quota, eligible, metric);
}

std::vector<Match> match_threshold(const nd::DenseArray& patterns,
                                   const CandidateTable& candidates,
                                   double eta,
                                   const std::vector<bool>& eligible,
                                   Distance metric) {
  require(eta >= 0.0, "match_threshold: eta must be non-negative");
  require(patterns.rows() >= 1, "match_threshold: no patterns");
  require(eligible.empty() || eligible.size() == candidates.size(),
          "match_threshold: eligibility mask size");
  std::vector<Match> out;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    if (!admits(eligible, c)) continue;
    Match best{0, static_cast<NodeId>(c),
               std::numeric_limits<double>::infinity()};
    for (std::size_t p = 0; p < patterns.rows(); ++p) {
      const double d =
          distance(patterns.row(p), candidates.embeddings.row(c), metric);
      if (d < best.distance) {
        best.pattern = p;
        best.distance = d;
      }
    }
    if (best.distance <= eta) out.push_back(best);
  }
  std::sort(out.begin(), out.end(), [](const Match& a, const Match& b) {
    return a.distance != b.distance ? a.distance < b.distance
                                    : a.center < b.center;
  });
  return out;
}

std::vector<Community> matched_communities(std::span<const Match> matches,
                                           const CandidateTable& candidates) {
  std::vector<Community> out;
  out.reserve(matches.size());
  for (const Match& m : matches) out.push_back(candidates.communities.at(m.center));
  return out;
}

void write_matches_tsv(std::ostream& out, std::span<const Match> matches,
                       const Graph& graph) {
  const auto old = out.precision(10);
  for (const Match& m : matches) {
    out << m.pattern << '\t' << graph.original_id(m.center) << '\t'
        << m.distance << '\n';
  }
  out.precision(old);
}

}  // namespace seedcomm::locator
