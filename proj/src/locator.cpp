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

#include "seedcomm/locator.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <unordered_set>

#include "seedcomm/error.hpp"

namespace seedcomm::locator {

namespace {

std::string gcn_name(int layer) { return "gcn." + std::to_string(layer); }

}  // namespace

Encoder Encoder::init(std::size_t feature_dim, std::size_t dim, int layers,
                      std::uint64_t seed) {
  require(layers >= 1, "encoder: at least one GCN layer");
  require(dim >= 1 && feature_dim >= 1, "encoder: dimensions must be >= 1");
  nd::Rng rng(seed);
  Encoder e;
  e.layers = layers;
  e.dim = dim;
  e.params.add("w_in", nd::glorot_uniform(feature_dim, dim, rng));
  for (int l = 0; l < layers; ++l) {
    e.params.add(gcn_name(l), nd::glorot_uniform(dim, dim, rng));
  }
  e.params.add("w_out", nd::glorot_uniform((layers + 1) * dim, dim, rng));
  return e;
}

Encoder Encoder::from_params(nd::ParamSet params) {
  Encoder e;
  require(params.contains("w_in") && params.contains("w_out"),
          "encoder checkpoint lacks w_in/w_out");
  e.dim = params.get("w_in").cols();
  int layers = 0;
  while (params.contains(gcn_name(layers))) ++layers;
  require(layers >= 1, "encoder checkpoint has no GCN layers");
  require(params.size() == static_cast<std::size_t>(layers) + 2,
          "encoder checkpoint has unexpected arrays");
  for (int l = 0; l < layers; ++l) {
    const auto& w = params.get(gcn_name(l));
    require(w.rows() == e.dim && w.cols() == e.dim,
            "encoder checkpoint: bad GCN shape");
  }
  const auto& w_out = params.get("w_out");
  require(w_out.rows() == (layers + 1) * e.dim && w_out.cols() == e.dim,
          "encoder checkpoint: bad w_out shape");
  e.layers = layers;
  e.params = std::move(params);
  return e;
}

nd::Var encode_nodes(nd::Tape& tape, const Graph& graph,
                     const InducedSubgraph& sub, const Encoder& encoder,
                     const EncodeOptions& options) {
  require(!sub.nodes.empty(), "encode: empty subgraph");
  const auto& features = graph.augmented_features();
  require(features.cols() == encoder.feature_dim(),
          "encode: graph feature width " + std::to_string(features.cols()) +
              " does not match encoder input " +
              std::to_string(encoder.feature_dim()));
  nd::DenseArray x(sub.nodes.size(), features.cols());
  for (std::size_t i = 0; i < sub.nodes.size(); ++i) {
    auto src = features.row(sub.nodes[i]);
    std::copy(src.begin(), src.end(), x.row(i).begin());
  }
  nd::Var h = nd::apply_linear(tape.constant(std::move(x)),
                               tape.parameter(encoder.params, "w_in"));
  h = nd::dropout(h, options.dropout, options.training, options.seed);
  std::vector<nd::Var> layers{h};
  for (int l = 0; l < encoder.layers; ++l) {
    h = nd::gcn_layer(h, sub.adjacency,
                      tape.parameter(encoder.params, gcn_name(l)));
    layers.push_back(h);
  }
  return nd::apply_linear(nd::concat_cols(layers),
                          tape.parameter(encoder.params, "w_out"));
}

nd::Var encode_community(nd::Tape& tape, const Graph& graph,
                         const Community& community, const Encoder& encoder,
                         const EncodeOptions& options) {
  require(!community.empty(), "encode_community: empty community");
  const InducedSubgraph sub = induce(graph, community.members());
  return nd::sum_rows(encode_nodes(tape, graph, sub, encoder, options));
}

Embedding embed_community(const Graph& graph, const Community& community,
                          const Encoder& encoder) {
  nd::Tape tape;
  const auto& v = encode_community(tape, graph, community, encoder).value();
  return Embedding(v.values().begin(), v.values().end());
}

nd::DenseArray embed_all_nodes(const Graph& graph, const Encoder& encoder) {
  std::vector<NodeId> all(graph.node_count());
  std::iota(all.begin(), all.end(), NodeId{0});
  const InducedSubgraph sub = induce(graph, all);
  nd::Tape tape;
  return encode_nodes(tape, graph, sub, encoder).value();
}

double order_penalty(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), "order_penalty: dimension mismatch");
  double e = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (d > 0.0) e += d * d;
  }
  return e;
}

nd::Var order_penalty(nd::Var a, nd::Var b) {
  return nd::sum(nd::square(nd::relu(nd::sub(a, b))));
}

nd::Var margin_loss(std::span<const EmbeddedPair> positives,
                    std::span<const EmbeddedPair> negatives, double alpha) {
  require(alpha > 0.0, "margin_loss: alpha must be positive");
  require(!positives.empty() || !negatives.empty(),
          "margin_loss: empty batch");
  std::vector<nd::Var> terms;
  terms.reserve(positives.size() + negatives.size());
  for (const auto& [a, b] : positives) terms.push_back(order_penalty(a, b));
  for (const auto& [a, b] : negatives) {
    terms.push_back(
        nd::relu(nd::add_scalar(nd::scale(order_penalty(a, b), -1.0), alpha)));
  }
  return nd::sum(nd::concat_rows(terms));
}

namespace {

// Connected subset of `within` grown from a random member by repeatedly
// absorbing a uniformly chosen frontier node. Stops early when the
// member's component inside `within` is exhausted.
Community grow_connected(const Graph& graph, const Community& within,
                         std::size_t target, nd::Rng& rng) {
  std::uniform_int_distribution<std::size_t> pick_start(0, within.size() - 1);
  const NodeId start = within.members()[pick_start(rng)];
  std::vector<NodeId> grown{start};
  std::unordered_set<NodeId> seen{start};
  std::vector<NodeId> frontier;
  auto extend = [&](NodeId u) {
    for (NodeId v : graph.neighbors(u)) {
      if (within.contains(v) && seen.insert(v).second) frontier.push_back(v);
    }
  };
  extend(start);
  while (grown.size() < target && !frontier.empty()) {
    std::uniform_int_distribution<std::size_t> pick(0, frontier.size() - 1);
    const std::size_t i = pick(rng);
    const NodeId u = frontier[i];
    frontier[i] = frontier.back();
    frontier.pop_back();
    grown.push_back(u);
    extend(u);
  }
  return Community(std::move(grown));
}

std::size_t uniform_size(std::size_t lo, std::size_t hi, nd::Rng& rng) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

}  // namespace

PairBatch sample_pairs(const Graph& graph, std::span<const Community> train,
                       std::size_t per_batch, std::uint64_t seed) {
  require(!train.empty(), "sample_pairs: no training communities");
  require(train.size() >= 2,
          "sample_pairs: negatives need at least two training communities");
  nd::Rng rng(seed);
  std::uniform_int_distribution<std::size_t> pick_comm(0, train.size() - 1);
  constexpr std::size_t kAttemptsPerPair = 200;

  PairBatch batch;
  std::size_t attempts = 0;
  while (batch.positives.size() < per_batch) {
    if (++attempts > kAttemptsPerPair * (per_batch + 1)) {
      fail(ErrorCode::state,
           "sample_pairs: no training community has a connected pair");
    }
    const Community& source = train[pick_comm(rng)];
    if (source.size() < 2) continue;
    Community super =
        grow_connected(graph, source, uniform_size(2, source.size(), rng), rng);
    if (super.size() < 2) continue;
    Community sub =
        grow_connected(graph, super, uniform_size(1, super.size() - 1, rng), rng);
    batch.positives.emplace_back(std::move(sub), std::move(super));
  }

  attempts = 0;
  while (batch.negatives.size() < per_batch) {
    if (++attempts > kAttemptsPerPair * (per_batch + 1)) {
      fail(ErrorCode::state, "sample_pairs: no valid negatives constructible");
    }
    const std::size_t p = pick_comm(rng);
    std::size_t q = pick_comm(rng);
    if (p == q) continue;
    const Community& cp = train[p];
    const Community& cq = train[q];
    Community a = grow_connected(graph, cp, uniform_size(1, cp.size(), rng), rng);
    Community b = grow_connected(graph, cq, uniform_size(1, cq.size(), rng), rng);
    if (a.subset_of(b)) continue;
    batch.negatives.emplace_back(std::move(a), std::move(b));
  }
  return batch;
}

Encoder train_locator(const Graph& graph, std::span<const Community> train,
                      const LocatorConfig& config, const LossLog& log) {
  return train_locator(
      graph, train,
      Encoder::init(graph.feature_dim(), config.dim, config.layers, config.seed),
      config, log);
}

Encoder train_locator(const Graph& graph, std::span<const Community> train,
                      Encoder encoder, const LocatorConfig& config,
                      const LossLog& log) {
  require(!train.empty(), "train_locator: no training communities");
  nd::OptimState optim = nd::make_optim_state(encoder.params, config.lr);
  nd::Rng rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t b = 0; b < config.batches_per_epoch; ++b) {
      const PairBatch batch =
          sample_pairs(graph, train, config.pairs_per_batch, rng());
      nd::Tape tape;
      auto embed = [&](const Community& c) {
        EncodeOptions opts{true, config.dropout, rng()};
        return encode_community(tape, graph, c, encoder, opts);
      };
      std::vector<EmbeddedPair> pos, neg;
      for (const auto& [a, sup] : batch.positives) {
        const nd::Var za = embed(a);
        pos.emplace_back(za, embed(sup));
      }
      for (const auto& [a, other] : batch.negatives) {
        const nd::Var za = embed(a);
        neg.emplace_back(za, embed(other));
      }
      const nd::Var loss = margin_loss(pos, neg, config.margin);
      const nd::ParamSet grads = tape.backward(loss, encoder.params);
      nd::adam_step(encoder.params, grads, optim);
      if (log) log(epoch, b, loss.scalar());
    }
  }
  return encoder;
}

}  // namespace seedcomm::locator
