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

// Minimal dense reverse-mode differentiation: row-major float64 arrays, a
// recording tape, the handful of primitives the encoder and the agent need,
// and an Adam optimizer over named parameter sets.

#ifndef SEEDCOMM_NDIFF_HPP_
#define SEEDCOMM_NDIFF_HPP_

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <initializer_list>
#include <iosfwd>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace seedcomm::nd {

using Rng = std::mt19937_64;

// Local neighbor lists of a (sub)graph; index i lists the neighbors of row i.
using Adjacency = std::vector<std::vector<std::uint32_t>>;

class DenseArray {
 public:
  DenseArray() = default;
  DenseArray(std::size_t rows, std::size_t cols, double fill = 0.0);
  DenseArray(std::size_t rows, std::size_t cols, std::vector<double> values);

  static DenseArray from_rows(
      std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  double& operator()(std::size_t r, std::size_t c) {
    return values_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    return values_[r * cols_ + c];
  }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> row(std::size_t r) {
    return {values_.data() + r * cols_, cols_};
  }
  std::span<const double> row(std::size_t r) const {
    return {values_.data() + r * cols_, cols_};
  }

  bool same_shape(const DenseArray& other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }
  bool all_finite() const noexcept;

  friend bool operator==(const DenseArray&, const DenseArray&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

std::string shape_string(const DenseArray& a);

// Named trainable arrays. Iteration order is by name, which keeps
// checkpoints and optimizer updates deterministic.
class ParamSet {
 public:
  void add(const std::string& name, DenseArray value);
  bool contains(const std::string& name) const;
  const DenseArray& get(const std::string& name) const;
  DenseArray& get(const std::string& name);
  std::vector<std::string> names() const;
  std::size_t size() const noexcept { return arrays_.size(); }
  std::size_t scalar_count() const noexcept;

  // Same names and shapes, all zeros.
  ParamSet zeros_like() const;
  // this += scale * other; names and shapes must agree.
  void add_scaled(const ParamSet& other, double scale = 1.0);

  auto begin() const { return arrays_.begin(); }
  auto end() const { return arrays_.end(); }
  auto begin() { return arrays_.begin(); }
  auto end() { return arrays_.end(); }

  friend bool operator==(const ParamSet&, const ParamSet&) = default;

 private:
  std::map<std::string, DenseArray> arrays_;
};

class Tape;

// Handle to a value recorded on a tape. Cheap to copy; valid while the tape
// lives.
struct Var {
  Tape* tape = nullptr;
  std::size_t id = 0;

  const DenseArray& value() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
  double scalar() const;
};

// Records primitive applications in order. backward() replays the recorded
// pullbacks in exact reverse order.
class Tape {
 public:
  using Pullback = std::function<void(Tape&, const DenseArray& upstream)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(DenseArray value);
  // Leaf bound to `params[name]`; repeated calls return the same leaf.
  Var parameter(const ParamSet& params, const std::string& name);

  // Appends a node. Throws Error(numeric) if `value` holds NaN or Inf.
  Var record(DenseArray value, Pullback pullback);

  const DenseArray& value(Var v) const;
  // Gradient accumulated by the last backward(); all zeros if unreached.
  DenseArray grad(Var v) const;
  void accumulate(Var v, const DenseArray& contribution);

  // Gradient of the 1x1 node `loss` with respect to every array of `params`.
  // Parameters never bound on this tape, or not reached from `loss`, get
  // zeros.
  ParamSet backward(Var loss, const ParamSet& params);

  std::size_t size() const noexcept { return nodes_.size(); }
  // Order in which the last backward() visited node ids.
  const std::vector<std::size_t>& last_visit_order() const noexcept {
    return visit_order_;
  }

 private:
  struct Node {
    DenseArray value;
    DenseArray grad;
    Pullback pullback;
  };

  // deque keeps value() references valid while later nodes are recorded.
  std::deque<Node> nodes_;
  std::map<std::string, std::size_t> param_leaves_;
  std::vector<std::size_t> visit_order_;
};

// --- primitives -----------------------------------------------------------

Var matmul(Var a, Var b);
Var add(Var a, Var b);
Var sub(Var a, Var b);
// a (n x c) plus a 1 x c row broadcast over every row.
Var add_row(Var a, Var row);
Var scale(Var a, double s);
Var add_scalar(Var a, double s);
Var relu(Var a);
Var square(Var a);
// Elementwise product with a constant array of the same shape.
Var mul_constant(Var a, const DenseArray& c);
// Sum of all entries, 1 x 1.
Var sum(Var a);
// Column sums, 1 x cols.
Var sum_rows(Var a);
Var concat_cols(std::span<const Var> parts);
Var concat_rows(std::span<const Var> parts);
Var gather_rows(Var a, std::span<const std::size_t> rows);
// Entry (r, c) as a 1 x 1 value.
Var element(Var a, std::size_t r, std::size_t c);

// A_hat * h with A_hat the symmetric-normalized adjacency with self-loops.
Var gcn_propagate(Var h, const Adjacency& adj);
// h_u + sum of h_v over neighbors v.
Var gin_propagate(Var h, const Adjacency& adj);

// x * w (+ bias).
Var apply_linear(Var x, Var w);
Var apply_linear(Var x, Var w, Var bias);
// ReLU(A_hat * h * w).
Var gcn_layer(Var h, const Adjacency& adj, Var w);
// ReLU(((1 + 0) * h_u + sum_{v in N(u)} h_v) * w).
Var gin_layer(Var h, const Adjacency& adj, Var w);

// Inverted dropout; identity when !training or rate == 0.
Var dropout(Var h, double rate, bool training, std::uint64_t seed);

// log softmax(logits restricted to mask)[index]. `logits` is a row or column
// vector; `index` must be masked in.
Var masked_log_softmax_at(Var logits, const std::vector<bool>& mask,
                          std::size_t index);

// Plain (untaped) masked softmax; masked-out entries are exactly 0.
std::vector<double> masked_softmax(std::span<const double> logits,
                                   const std::vector<bool>& mask);

// --- initialization, optimization, checkpoints ----------------------------

// Uniform in +-sqrt(6 / (rows + cols)).
DenseArray glorot_uniform(std::size_t rows, std::size_t cols, Rng& rng);

struct OptimState {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::uint64_t step = 0;
  ParamSet first_moment;
  ParamSet second_moment;
};

OptimState make_optim_state(const ParamSet& params, double lr);

// One bias-corrected Adam update of `params` (descent on `grads`).
void adam_step(ParamSet& params, const ParamSet& grads, OptimState& state);

// Named-array container: "NDCK" magic, u32 version, u32 count, then per
// array u32 name length, name bytes, u64 rows, u64 cols, little-endian f64
// payload.
inline constexpr std::uint32_t kCheckpointVersion = 1;
void write_checkpoint(std::ostream& out, const ParamSet& params);
ParamSet read_checkpoint(std::istream& in);
void save_checkpoint(const std::string& path, const ParamSet& params);
ParamSet load_checkpoint(const std::string& path);

}  // namespace seedcomm::nd

#endif  // SEEDCOMM_NDIFF_HPP_
