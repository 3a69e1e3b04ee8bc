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

#include "seedcomm/rewriter.hpp"

#include <algorithm>
#include <iterator>
#include <string>

#include "seedcomm/error.hpp"
#include "seedcomm/metrics.hpp"

namespace seedcomm::rewriter {

namespace {

const char* const kNets[] = {"exclude", "expand"};

std::string param(const char* net, const char* leaf) {
  return std::string(net) + "." + leaf;
}

}  // namespace

Agent Agent::init(std::size_t dim, std::uint64_t seed) {
  require(dim >= 1, "agent: dimension must be >= 1");
  nd::Rng rng(seed);
  Agent a;
  a.dim = dim;
  a.params.add("updater.w", nd::glorot_uniform(dim + 1, dim, rng));
  for (const char* net : kNets) {
    a.params.add(param(net, "w1"), nd::glorot_uniform(dim + 1, kPolicyHidden, rng));
    a.params.add(param(net, "b1"), nd::DenseArray(1, kPolicyHidden));
    a.params.add(param(net, "w2"), nd::glorot_uniform(kPolicyHidden, 1, rng));
    a.params.add(param(net, "b2"), nd::DenseArray(1, 1));
  }
  return a;
}

Agent Agent::from_params(nd::ParamSet params) {
  require(params.contains("updater.w"), "agent checkpoint lacks updater.w");
  const std::size_t dim = params.get("updater.w").cols();
  const Agent reference = init(dim, 0);
  require(params.size() == reference.params.size(),
          "agent checkpoint has unexpected arrays");
  for (const auto& [name, a] : reference.params) {
    require(params.contains(name) && params.get(name).same_shape(a),
            "agent checkpoint: missing or misshapen " + name);
  }
  Agent out;
  out.dim = dim;
  out.params = std::move(params);
  return out;
}

std::size_t EpisodeState::row_of(NodeId u) const {
  auto it = std::lower_bound(nodes.begin(), nodes.end(), u);
  require(it != nodes.end() && *it == u, "episode: node not in state");
  return static_cast<std::size_t>(it - nodes.begin());
}

namespace {

std::vector<NodeId> merge_sorted(const Community& c,
                                 const std::vector<NodeId>& b) {
  std::vector<NodeId> out;
  out.reserve(c.size() + b.size());
  std::merge(c.begin(), c.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

void check_embeddings(const nd::DenseArray& z, const Graph& graph) {
  require(z.rows() == graph.node_count(),
          "node embeddings need one row per graph node");
}

}  // namespace

EpisodeState init_state(nd::Tape& tape, const Graph& graph,
                        const Community& community,
                        const nd::DenseArray& node_embeddings,
                        const Caps& caps) {
  require(!community.empty(), "init_state: empty community");
  check_embeddings(node_embeddings, graph);
  EpisodeState s;
  s.community = community;
  s.boundary = boundary(graph, community, caps.boundary);
  s.nodes = merge_sorted(s.community, s.boundary);
  const std::size_t d = node_embeddings.cols();
  nd::DenseArray reps(s.nodes.size() + 1, d + 1);
  for (std::size_t i = 0; i < s.nodes.size(); ++i) {
    auto z = node_embeddings.row(s.nodes[i]);
    std::copy(z.begin(), z.end(), reps.row(i).begin());
    reps(i, d) = community.contains(s.nodes[i]) ? 1.0 : 0.0;
  }
  s.reps = tape.constant(std::move(reps));
  return s;
}

namespace {

enum class Side { exclude, expand };

nd::Var policy_scores(const EpisodeState& s, const Agent& agent,
                      const char* net) {
  nd::Tape& t = *s.reps.tape;
  const nd::Var hidden = nd::relu(nd::apply_linear(
      s.reps, t.parameter(agent.params, param(net, "w1")),
      t.parameter(agent.params, param(net, "b1"))));
  return nd::apply_linear(hidden, t.parameter(agent.params, param(net, "w2")),
                          t.parameter(agent.params, param(net, "b2")));
}

std::vector<bool> action_mask(const EpisodeState& s, Side side) {
  std::vector<bool> mask(s.nodes.size() + 1, false);
  if (side == Side::exclude) {
    for (NodeId u : s.community) mask[s.row_of(u)] = true;
  } else {
    for (NodeId u : s.boundary) mask[s.row_of(u)] = true;
  }
  mask[s.virtual_row()] = true;
  return mask;
}

bool forced_stop(const EpisodeState& s, Side side, const Caps& caps) {
  if (side == Side::exclude) {
    return s.exclude_done || s.community.size() <= 1;
  }
  return s.expand_done || s.community.size() >= caps.community_size ||
         s.boundary.empty();
}

Action row_action(const EpisodeState& s, std::size_t row) {
  if (row == s.virtual_row()) return std::nullopt;
  return s.nodes[row];
}

// `choose(mask, probabilities)` returns the chosen row.
template <typename Choose>
StepDecision decide(const EpisodeState& s, const Agent& agent,
                    const Caps& caps, Choose choose) {
  StepDecision out;
  for (Side side : {Side::exclude, Side::expand}) {
    Action action;
    std::optional<nd::Var> logp;
    if (!forced_stop(s, side, caps)) {
      const char* net = side == Side::exclude ? kNets[0] : kNets[1];
      const nd::Var scores = policy_scores(s, agent, net);
      const std::vector<bool> mask = action_mask(s, side);
      const std::vector<double> probs =
          nd::masked_softmax(scores.value().values(), mask);
      const std::size_t row = choose(side, mask, probs);
      action = row_action(s, row);
      logp = nd::masked_log_softmax_at(scores, mask, row);
    }
    if (side == Side::exclude) {
      out.exclude = action;
      out.exclude_logp = logp;
    } else {
      out.expand = action;
      out.expand_logp = logp;
    }
  }
  return out;
}

}  // namespace

StepDecision step_policy(const EpisodeState& state, const Agent& agent,
                         Mode mode, const Caps& caps, nd::Rng& rng) {
  return decide(state, agent, caps,
                [&](Side, const std::vector<bool>& mask,
                    const std::vector<double>& probs) -> std::size_t {
                  if (mode == Mode::greedy) {
                    std::size_t best = state.virtual_row();
                    for (std::size_t i = 0; i < probs.size(); ++i) {
                      if (mask[i] && probs[i] > probs[best]) best = i;
                    }
                    // Lowest row wins ties, including against STOP.
                    for (std::size_t i = 0; i < probs.size(); ++i) {
                      if (mask[i] && probs[i] == probs[best]) return i;
                    }
                    return best;
                  }
                  const double u =
                      std::uniform_real_distribution<double>(0.0, 1.0)(rng);
                  double cumulative = 0.0;
                  std::size_t last = state.virtual_row();
                  for (std::size_t i = 0; i < probs.size(); ++i) {
                    if (!mask[i]) continue;
                    cumulative += probs[i];
                    last = i;
                    if (u < cumulative) return i;
                  }
                  return last;
                });
}

StepDecision replay_policy(const EpisodeState& state, const Agent& agent,
                           const Caps& caps, Action exclude, Action expand) {
  return decide(state, agent, caps,
                [&](Side side, const std::vector<bool>& mask,
                    const std::vector<double>&) -> std::size_t {
                  const Action& a = side == Side::exclude ? exclude : expand;
                  const std::size_t row =
                      a ? state.row_of(*a) : state.virtual_row();
                  require(mask[row], "replay: action outside its space");
                  return row;
                });
}

EpisodeState apply_actions(const Graph& graph, const EpisodeState& state,
                           const StepDecision& decision, const Agent& agent,
                           const nd::DenseArray& node_embeddings,
                           const Caps& caps) {
  check_embeddings(node_embeddings, graph);
  if (decision.exclude) {
    require(state.community.contains(*decision.exclude),
            "apply_actions: exclude action outside the community");
  }
  if (decision.expand) {
    require(std::binary_search(state.boundary.begin(), state.boundary.end(),
                               *decision.expand),
            "apply_actions: expand action outside the boundary");
  }

  EpisodeState next;
  next.step = state.step + 1;
  next.exclude_done = state.exclude_done || !decision.exclude;
  next.expand_done = state.expand_done || !decision.expand;
  if (!decision.exclude && !decision.expand) {
    next.community = state.community;
    next.boundary = state.boundary;
    next.nodes = state.nodes;
    next.reps = state.reps;
    return next;
  }

  next.community = state.community;
  if (decision.exclude) next.community = next.community.without(*decision.exclude);
  if (decision.expand) next.community = next.community.with(*decision.expand);
  require(!next.community.empty(), "apply_actions: community became empty");
  next.boundary = boundary(graph, next.community, caps.boundary);
  next.nodes = merge_sorted(next.community, next.boundary);

  nd::Tape& tape = *state.reps.tape;
  const std::size_t d = node_embeddings.cols();
  // Rows of `extended`: the previous reps (virtual last), then fresh rows for
  // nodes that were not in S_t.
  std::vector<std::size_t> gather;
  gather.reserve(next.nodes.size() + 1);
  std::vector<NodeId> fresh;
  for (NodeId u : next.nodes) {
    auto it = std::lower_bound(state.nodes.begin(), state.nodes.end(), u);
    if (it != state.nodes.end() && *it == u) {
      gather.push_back(static_cast<std::size_t>(it - state.nodes.begin()));
    } else {
      gather.push_back(state.nodes.size() + 1 + fresh.size());
      fresh.push_back(u);
    }
  }
  gather.push_back(state.virtual_row());

  nd::Var extended = state.reps;
  if (!fresh.empty()) {
    nd::DenseArray rows(fresh.size(), d + 1);
    for (std::size_t i = 0; i < fresh.size(); ++i) {
      auto z = node_embeddings.row(fresh[i]);
      std::copy(z.begin(), z.end(), rows.row(i).begin());
    }
    const nd::Var parts[] = {state.reps, tape.constant(std::move(rows))};
    extended = nd::concat_rows(parts);
  }
  const nd::Var input = nd::gather_rows(extended, gather);

  InducedSubgraph sub = induce(graph, next.nodes);
  sub.adjacency.emplace_back();  // virtual node, isolated
  const nd::Var updated = nd::gin_layer(
      input, sub.adjacency, tape.parameter(agent.params, "updater.w"));

  nd::DenseArray indicator(next.nodes.size() + 1, 1);
  for (std::size_t i = 0; i < next.nodes.size(); ++i) {
    indicator(i, 0) = next.community.contains(next.nodes[i]) ? 1.0 : 0.0;
  }
  const nd::Var parts[] = {updated, tape.constant(std::move(indicator))};
  next.reps = nd::concat_cols(parts);
  return next;
}

double reward(const Community& prev, const Community& next,
              const Community& truth) {
  require(!truth.empty(), "reward: empty truth");
  return metrics::f1_pair(next, truth) - metrics::f1_pair(prev, truth);
}

double Trajectory::total_reward() const {
  double r = 0.0;
  for (const Step& s : steps) r += s.exclude_reward + s.expand_reward;
  return r;
}

Trajectory rollout(const Graph& graph, const Community& start,
                   const Community* truth,
                   const nd::DenseArray& node_embeddings, const Agent& agent,
                   Mode mode, const Caps& caps, std::uint64_t seed,
                   const StepObserver& observer) {
  Trajectory traj;
  traj.tape = std::make_unique<nd::Tape>();
  traj.initial = start;
  nd::Rng rng(seed);
  EpisodeState state = init_state(*traj.tape, graph, start, node_embeddings, caps);
  while (!state.finished() && state.step < caps.step_cap()) {
    const StepDecision decision = step_policy(state, agent, mode, caps, rng);
    Step step{decision.exclude, decision.expand, decision.exclude_logp,
              decision.expand_logp, 0.0, 0.0};
    if (truth != nullptr) {
      const Community mid = decision.exclude
                                ? state.community.without(*decision.exclude)
                                : state.community;
      const Community after =
          decision.expand ? mid.with(*decision.expand) : mid;
      step.exclude_reward = reward(state.community, mid, *truth);
      step.expand_reward = reward(mid, after, *truth);
    }
    EpisodeState next = apply_actions(graph, state, decision, agent,
                                      node_embeddings, caps);
    if (observer) observer(state, decision, next);
    traj.steps.push_back(step);
    state = std::move(next);
  }
  traj.final = state.community;
  return traj;
}

namespace {

nd::Var surrogate(nd::Tape& tape, std::span<const Step> steps) {
  std::vector<nd::Var> terms;
  for (const Step& s : steps) {
    if (s.exclude_logp) terms.push_back(nd::scale(*s.exclude_logp, s.exclude_reward));
    if (s.expand_logp) terms.push_back(nd::scale(*s.expand_logp, s.expand_reward));
  }
  if (terms.empty()) return tape.constant(nd::DenseArray(1, 1));
  return nd::sum(nd::concat_rows(terms));
}

}  // namespace

nd::Var replay_objective(nd::Tape& tape, const Graph& graph,
                         const Trajectory& trajectory,
                         const nd::DenseArray& node_embeddings,
                         const Agent& agent, const Caps& caps) {
  EpisodeState state =
      init_state(tape, graph, trajectory.initial, node_embeddings, caps);
  std::vector<Step> replayed;
  for (std::size_t t = 0; t < trajectory.steps.size(); ++t) {
    const Step& recorded = trajectory.steps[t];
    const StepDecision decision =
        replay_policy(state, agent, caps, recorded.exclude, recorded.expand);
    replayed.push_back(Step{decision.exclude, decision.expand,
                            decision.exclude_logp, decision.expand_logp,
                            recorded.exclude_reward, recorded.expand_reward});
    if (t + 1 < trajectory.steps.size()) {
      state = apply_actions(graph, state, decision, agent, node_embeddings, caps);
    }
  }
  return surrogate(tape, replayed);
}

nd::ParamSet surrogate_gradient(std::span<Trajectory> trajectories,
                                const Agent& agent) {
  nd::ParamSet total = agent.params.zeros_like();
  for (Trajectory& traj : trajectories) {
    const bool any = std::any_of(
        traj.steps.begin(), traj.steps.end(),
        [](const Step& s) { return s.exclude_logp || s.expand_logp; });
    if (!any) continue;
    const nd::Var objective = surrogate(*traj.tape, traj.steps);
    total.add_scaled(traj.tape->backward(objective, agent.params));
  }
  return total;
}

double policy_update(std::span<Trajectory> trajectories, Agent& agent,
                     nd::OptimState& optim) {
  require(!trajectories.empty(), "policy_update: empty batch");
  double objective = 0.0;
  for (const Trajectory& traj : trajectories) {
    for (const Step& s : traj.steps) {
      if (s.exclude_logp) objective += s.exclude_logp->scalar() * s.exclude_reward;
      if (s.expand_logp) objective += s.expand_logp->scalar() * s.expand_reward;
    }
  }
  nd::ParamSet descent = agent.params.zeros_like();
  descent.add_scaled(surrogate_gradient(trajectories, agent), -1.0);
  nd::adam_step(agent.params, descent, optim);
  return objective;
}

std::vector<TrainingSample> make_training_samples(
    const Graph& graph, std::span<const Community> train, int k,
    std::size_t count, const Caps& caps, std::uint64_t seed) {
  require(count >= 1, "make_training_samples: count must be >= 1");
  require(!train.empty(), "make_training_samples: no training communities");
  nd::Rng rng(seed);
  std::uniform_int_distribution<std::size_t> pick_comm(0, train.size() - 1);
  std::vector<TrainingSample> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const Community& truth = train[pick_comm(rng)];
    require(!truth.empty(), "make_training_samples: empty community");
    std::uniform_int_distribution<std::size_t> pick_node(0, truth.size() - 1);
    const NodeId u = truth.members()[pick_node(rng)];
    TrainingSample s;
    s.center = u;
    s.seed_community = capped_ego_net(graph, u, k, caps.community_size);
    s.boundary = boundary(graph, s.seed_community, caps.boundary);
    s.truth = truth;
    out.push_back(std::move(s));
  }
  return out;
}

Agent train_rewriter(const Graph& graph, std::span<const Community> train,
                     const nd::DenseArray& node_embeddings,
                     const RewriterConfig& config, const EpochLog& log) {
  return train_rewriter(graph, train, node_embeddings,
                        Agent::init(node_embeddings.cols(), config.seed),
                        config, log);
}

Agent train_rewriter(const Graph& graph, std::span<const Community> train,
                     const nd::DenseArray& node_embeddings, Agent agent,
                     const RewriterConfig& config, const EpochLog& log) {
  require(agent.dim == node_embeddings.cols(),
          "train_rewriter: agent and embedding dimensions differ");
  nd::OptimState optim = nd::make_optim_state(agent.params, config.lr);
  nd::Rng rng(config.seed ^ 0x5851f42d4c957f2dULL);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const auto samples = make_training_samples(
        graph, train, config.k, config.episodes_per_epoch, config.caps, rng());
    std::vector<Trajectory> batch;
    batch.reserve(samples.size());
    double total_return = 0.0, total_length = 0.0;
    for (const TrainingSample& s : samples) {
      batch.push_back(rollout(graph, s.seed_community, &s.truth,
                              node_embeddings, agent, Mode::sample,
                              config.caps, rng()));
      total_return += batch.back().total_reward();
      total_length += static_cast<double>(batch.back().steps.size());
    }
    policy_update(batch, agent, optim);
    if (log) {
      const double n = static_cast<double>(batch.size());
      log(epoch, total_return / n, total_length / n);
    }
  }
  return agent;
}

Community rewrite(const Graph& graph, const Community& located,
                  const nd::DenseArray& node_embeddings, const Agent& agent,
                  const Caps& caps) {
  return rollout(graph, located, nullptr, node_embeddings, agent, Mode::greedy,
                 caps, 0)
      .final;
}

}  // namespace seedcomm::rewriter
