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

// Reinforcement-learned community rewriting. An episode starts from a
// located community C and its outer boundary; each step the Exclude policy
// may drop a member and the Expand policy may absorb a boundary node, until
// both pick the virtual STOP node.

#ifndef SEEDCOMM_REWRITER_HPP_
#define SEEDCOMM_REWRITER_HPP_

#include <algorithm>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "seedcomm/graph.hpp"
#include "seedcomm/ndiff.hpp"

namespace seedcomm::rewriter {

inline constexpr std::size_t kPolicyHidden = 32;

// Parameters for embedding dimension d (reps are d + 1 wide):
//   "updater.w"   (d+1) x d      GIN representation updater
//   "exclude.w1"  (d+1) x 32, "exclude.b1" 1 x 32,
//   "exclude.w2"  32 x 1,     "exclude.b2" 1 x 1     Exclude-Net
//   "expand.*"    same shapes                       Expand-Net
struct Agent {
  std::size_t dim = 64;
  nd::ParamSet params;

  static Agent init(std::size_t dim, std::uint64_t seed);
  static Agent from_params(nd::ParamSet params);
};

struct Caps {
  std::size_t community_size = 30;
  std::size_t boundary = kDefaultBoundaryCap;
  std::size_t step_cap() const { return std::max<std::size_t>(community_size, 20); }
};

// std::nullopt is STOP (the virtual node).
using Action = std::optional<NodeId>;

struct EpisodeState {
  Community community;
  std::vector<NodeId> boundary;
  // S_t = community + boundary, sorted. Row i of `reps` belongs to nodes[i];
  // the last row is the virtual node.
  std::vector<NodeId> nodes;
  nd::Var reps;
  bool exclude_done = false;
  bool expand_done = false;
  std::size_t step = 0;

  bool finished() const { return exclude_done && expand_done; }
  std::size_t virtual_row() const { return nodes.size(); }
  std::size_t row_of(NodeId u) const;
};

// reps[u] = [z(u); 1{u in C}] for C and its capped boundary, plus an
// all-zero virtual row. `node_embeddings` is |V| x d.
EpisodeState init_state(nd::Tape& tape, const Graph& graph,
                        const Community& community,
                        const nd::DenseArray& node_embeddings,
                        const Caps& caps);

enum class Mode { sample, greedy };

struct StepDecision {
  Action exclude;
  Action expand;
  // Absent when the sub-policy was forced to STOP.
  std::optional<nd::Var> exclude_logp;
  std::optional<nd::Var> expand_logp;
};

// Exclude scores C_t + virtual, Expand scores the boundary + virtual. A
// finished sub-policy emits STOP; Exclude is forced to STOP at |C_t| = 1 and
// Expand when |C_t| reached the size cap or the boundary is empty.
StepDecision step_policy(const EpisodeState& state, const Agent& agent,
                         Mode mode, const Caps& caps, nd::Rng& rng);
// Same, but takes the given actions and only evaluates their
// log-probabilities.
StepDecision replay_policy(const EpisodeState& state, const Agent& agent,
                           const Caps& caps, Action exclude, Action expand);

// Applies exclude then expand, recomputes the capped boundary, and refreshes
// every rep with one GIN pass over S_{t+1} + virtual followed by the new
// membership indicators. Nodes new to S take [z(u); 0] as GIN input.
EpisodeState apply_actions(const Graph& graph, const EpisodeState& state,
                           const StepDecision& decision, const Agent& agent,
                           const nd::DenseArray& node_embeddings,
                           const Caps& caps);

// F1(next, truth) - F1(prev, truth).
double reward(const Community& prev, const Community& next,
              const Community& truth);

struct Step {
  Action exclude;
  Action expand;
  std::optional<nd::Var> exclude_logp;
  std::optional<nd::Var> expand_logp;
  double exclude_reward = 0.0;
  double expand_reward = 0.0;
};

struct Trajectory {
  std::unique_ptr<nd::Tape> tape;
  Community initial;
  Community final;
  std::vector<Step> steps;

  double total_reward() const;
};

using StepObserver = std::function<void(const EpisodeState& before,
                                        const StepDecision& decision,
                                        const EpisodeState& after)>;

// Runs until both sub-policies stop or the step cap. Rewards are computed
// only when `truth` is given: exclude is rewarded against the post-exclude
// set, expand against the final set of the step.
Trajectory rollout(const Graph& graph, const Community& start,
                   const Community* truth,
                   const nd::DenseArray& node_embeddings, const Agent& agent,
                   Mode mode, const Caps& caps, std::uint64_t seed,
                   const StepObserver& observer = {});

// Re-runs a recorded trajectory's actions under `agent` on a fresh tape and
// returns sum_t (logp_exclude * r_exclude + logp_expand * r_expand).
nd::Var replay_objective(nd::Tape& tape, const Graph& graph,
                         const Trajectory& trajectory,
                         const nd::DenseArray& node_embeddings,
                         const Agent& agent, const Caps& caps);

// Gradient of the REINFORCE surrogate sum_t logp * r (ascent direction),
// summed over trajectories.
nd::ParamSet surrogate_gradient(std::span<Trajectory> trajectories,
                                const Agent& agent);

// One Adam step descending the negated surrogate. Returns the surrogate.
double policy_update(std::span<Trajectory> trajectories, Agent& agent,
                     nd::OptimState& optim);

struct TrainingSample {
  NodeId center = 0;
  Community seed_community;
  std::vector<NodeId> boundary;
  Community truth;
};

std::vector<TrainingSample> make_training_samples(
    const Graph& graph, std::span<const Community> train, int k,
    std::size_t count, const Caps& caps, std::uint64_t seed);

struct RewriterConfig {
  int k = 2;
  std::size_t epochs = 1200;
  std::size_t episodes_per_epoch = 20;
  double lr = 1e-3;
  Caps caps;
  std::uint64_t seed = 0;
};

using EpochLog = std::function<void(std::size_t epoch, double mean_return,
                                    double mean_length)>;

Agent train_rewriter(const Graph& graph, std::span<const Community> train,
                     const nd::DenseArray& node_embeddings,
                     const RewriterConfig& config, const EpochLog& log = {});
Agent train_rewriter(const Graph& graph, std::span<const Community> train,
                     const nd::DenseArray& node_embeddings, Agent agent,
                     const RewriterConfig& config, const EpochLog& log = {});

// Greedy rollout without rewards.
Community rewrite(const Graph& graph, const Community& located,
                  const nd::DenseArray& node_embeddings, const Agent& agent,
                  const Caps& caps);

}  // namespace seedcomm::rewriter

#endif  // SEEDCOMM_REWRITER_HPP_
