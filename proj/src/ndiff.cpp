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

#include "seedcomm/ndiff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "seedcomm/error.hpp"

namespace seedcomm::nd {

// --- DenseArray -----------------------------------------------------------

DenseArray::DenseArray(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

DenseArray::DenseArray(std::size_t rows, std::size_t cols,
                       std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  require(values_.size() == rows_ * cols_,
          "DenseArray: value count does not match shape");
}

DenseArray DenseArray::from_rows(
    std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<double> values;
  values.reserve(r * c);
  for (const auto& row : rows) {
    require(row.size() == c, "DenseArray::from_rows: ragged rows");
    values.insert(values.end(), row.begin(), row.end());
  }
  return DenseArray(r, c, std::move(values));
}

bool DenseArray::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return std::isfinite(v); });
}

std::string shape_string(const DenseArray& a) {
  std::ostringstream os;
  os << a.rows() << "x" << a.cols();
  return os.str();
}

// --- ParamSet -------------------------------------------------------------

void ParamSet::add(const std::string& name, DenseArray value) {
  require(!arrays_.contains(name), "ParamSet: duplicate name " + name);
  arrays_.emplace(name, std::move(value));
}

bool ParamSet::contains(const std::string& name) const {
  return arrays_.contains(name);
}

const DenseArray& ParamSet::get(const std::string& name) const {
  auto it = arrays_.find(name);
  require(it != arrays_.end(), "ParamSet: unknown parameter " + name);
  return it->second;
}

DenseArray& ParamSet::get(const std::string& name) {
  auto it = arrays_.find(name);
  require(it != arrays_.end(), "ParamSet: unknown parameter " + name);
  return it->second;
}

std::vector<std::string> ParamSet::names() const {
  std::vector<std::string> out;
  out.reserve(arrays_.size());
  for (const auto& [name, _] : arrays_) out.push_back(name);
  return out;
}

std::size_t ParamSet::scalar_count() const noexcept {
  std::size_t n = 0;
  for (const auto& [_, a] : arrays_) n += a.size();
  return n;
}

ParamSet ParamSet::zeros_like() const {
  ParamSet out;
  for (const auto& [name, a] : arrays_) {
    out.add(name, DenseArray(a.rows(), a.cols()));
  }
  return out;
}

void ParamSet::add_scaled(const ParamSet& other, double scale) {
  require(other.size() == size(), "ParamSet::add_scaled: size mismatch");
  for (auto& [name, a] : arrays_) {
    const DenseArray& b = other.get(name);
    require(a.same_shape(b), "ParamSet::add_scaled: shape mismatch for " +
                                 name);
    auto dst = a.values();
    auto src = b.values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += scale * src[i];
  }
}

// --- Tape -----------------------------------------------------------------

const DenseArray& Var::value() const {
  require(tape != nullptr, "Var: not bound to a tape");
  return tape->value(*this);
}

double Var::scalar() const {
  const DenseArray& v = value();
  require(v.rows() == 1 && v.cols() == 1, "Var::scalar: not 1x1");
  return v(0, 0);
}

Var Tape::constant(DenseArray value) { return record(std::move(value), {}); }

Var Tape::parameter(const ParamSet& params, const std::string& name) {
  if (auto it = param_leaves_.find(name); it != param_leaves_.end()) {
    return Var{this, it->second};
  }
  Var v = record(params.get(name), {});
  param_leaves_.emplace(name, v.id);
  return v;
}

Var Tape::record(DenseArray value, Pullback pullback) {
  if (!value.all_finite()) {
    fail(ErrorCode::numeric, "non-finite value produced on tape (node " +
                                 std::to_string(nodes_.size()) + ")");
  }
  nodes_.push_back(Node{std::move(value), DenseArray(), std::move(pullback)});
  return Var{this, nodes_.size() - 1};
}

const DenseArray& Tape::value(Var v) const {
  require(v.tape == this && v.id < nodes_.size(), "Tape: foreign variable");
  return nodes_[v.id].value;
}

DenseArray Tape::grad(Var v) const {
  require(v.tape == this && v.id < nodes_.size(), "Tape: foreign variable");
  const Node& n = nodes_[v.id];
  if (n.grad.empty()) return DenseArray(n.value.rows(), n.value.cols());
  return n.grad;
}

void Tape::accumulate(Var v, const DenseArray& contribution) {
  Node& n = nodes_[v.id];
  if (n.grad.empty()) {
    n.grad = DenseArray(n.value.rows(), n.value.cols());
  }
  auto dst = n.grad.values();
  auto src = contribution.values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

ParamSet Tape::backward(Var loss, const ParamSet& params) {
  require(loss.tape == this && loss.id < nodes_.size(),
          "backward: loss is not recorded on this tape");
  const DenseArray& lv = nodes_[loss.id].value;
  require(lv.rows() == 1 && lv.cols() == 1,
          "backward: loss must be a scalar, got " + shape_string(lv));

  for (Node& n : nodes_) n.grad = DenseArray();
  nodes_[loss.id].grad = DenseArray(1, 1, 1.0);
  visit_order_.clear();
  visit_order_.reserve(loss.id + 1);
  for (std::size_t i = loss.id + 1; i-- > 0;) {
    visit_order_.push_back(i);
    Node& n = nodes_[i];
    if (n.grad.empty() || !n.pullback) continue;
    n.pullback(*this, n.grad);
  }

  ParamSet out;
  for (const auto& [name, value] : params) {
    auto it = param_leaves_.find(name);
    if (it != param_leaves_.end() && !nodes_[it->second].grad.empty()) {
      const DenseArray& g = nodes_[it->second].grad;
      require(g.same_shape(value), "backward: parameter shape changed: " +
                                       name);
      out.add(name, g);
    } else {
      out.add(name, DenseArray(value.rows(), value.cols()));
    }
  }
  return out;
}

// --- primitives -----------------------------------------------------------

namespace {

Tape& same_tape(Var a, Var b) {
  require(a.tape != nullptr && a.tape == b.tape,
          "operands recorded on different tapes");
  return *a.tape;
}

void require_same_shape(const DenseArray& a, const DenseArray& b,
                        const char* op) {
  if (!a.same_shape(b)) {
    fail(ErrorCode::invalid_argument, std::string(op) + ": shape mismatch " +
                                          shape_string(a) + " vs " +
                                          shape_string(b));
  }
}

std::vector<double> normalization(const Adjacency& adj) {
  std::vector<double> c(adj.size());
  for (std::size_t u = 0; u < adj.size(); ++u) {
    c[u] = 1.0 / std::sqrt(static_cast<double>(adj[u].size()) + 1.0);
  }
  return c;
}

}  // namespace

Var matmul(Var a, Var b) {
  Tape& t = same_tape(a, b);
  const DenseArray& A = a.value();
  const DenseArray& B = b.value();
  if (A.cols() != B.rows()) {
    fail(ErrorCode::invalid_argument, "matmul: inner dimensions differ " +
                                          shape_string(A) + " * " +
                                          shape_string(B));
  }
  const std::size_t n = A.rows(), k = A.cols(), m = B.cols();
  DenseArray C(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = A(i, p);
      if (aip == 0.0) continue;
      for (std::size_t j = 0; j < m; ++j) C(i, j) += aip * B(p, j);
    }
  }
  return t.record(std::move(C), [a, b, n, k, m](Tape& tp, const DenseArray& G) {
    const DenseArray& A = tp.value(a);
    const DenseArray& B = tp.value(b);
    DenseArray dA(n, k);
    DenseArray dB(k, m);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t p = 0; p < k; ++p) {
        double acc = 0.0;
        const double aip = A(i, p);
        for (std::size_t j = 0; j < m; ++j) {
          const double g = G(i, j);
          acc += g * B(p, j);
          dB(p, j) += aip * g;
        }
        dA(i, p) = acc;
      }
    }
    tp.accumulate(a, dA);
    tp.accumulate(b, dB);
  });
}

Var add(Var a, Var b) {
  Tape& t = same_tape(a, b);
  require_same_shape(a.value(), b.value(), "add");
  DenseArray out = a.value();
  auto dst = out.values();
  auto src = b.value().values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  return t.record(std::move(out), [a, b](Tape& tp, const DenseArray& G) {
    tp.accumulate(a, G);
    tp.accumulate(b, G);
  });
}

Var sub(Var a, Var b) {
  Tape& t = same_tape(a, b);
  require_same_shape(a.value(), b.value(), "sub");
  DenseArray out = a.value();
  auto dst = out.values();
  auto src = b.value().values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] -= src[i];
  return t.record(std::move(out), [a, b](Tape& tp, const DenseArray& G) {
    tp.accumulate(a, G);
    DenseArray neg = G;
    for (double& v : neg.values()) v = -v;
    tp.accumulate(b, neg);
  });
}

Var add_row(Var a, Var row) {
  Tape& t = same_tape(a, row);
  const DenseArray& A = a.value();
  const DenseArray& R = row.value();
  if (R.rows() != 1 || R.cols() != A.cols()) {
    fail(ErrorCode::invalid_argument, "add_row: expected 1x" +
                                          std::to_string(A.cols()) +
                                          " row, got " + shape_string(R));
  }
  DenseArray out = A;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) += R(0, j);
  }
  return t.record(std::move(out), [a, row](Tape& tp, const DenseArray& G) {
    tp.accumulate(a, G);
    DenseArray dr(1, G.cols());
    for (std::size_t i = 0; i < G.rows(); ++i) {
      for (std::size_t j = 0; j < G.cols(); ++j) dr(0, j) += G(i, j);
    }
    tp.accumulate(row, dr);
  });
}

Var scale(Var a, double s) {
  DenseArray out = a.value();
  for (double& v : out.values()) v *= s;
  return a.tape->record(std::move(out), [a, s](Tape& tp, const DenseArray& G) {
    DenseArray d = G;
    for (double& v : d.values()) v *= s;
    tp.accumulate(a, d);
  });
}

Var add_scalar(Var a, double s) {
  DenseArray out = a.value();
  for (double& v : out.values()) v += s;
  return a.tape->record(std::move(out), [a](Tape& tp, const DenseArray& G) {
    tp.accumulate(a, G);
  });
}

Var relu(Var a) {
  DenseArray out = a.value();
  for (double& v : out.values()) v = v > 0.0 ? v : 0.0;
  return a.tape->record(std::move(out), [a](Tape& tp, const DenseArray& G) {
    const DenseArray& x = tp.value(a);
    DenseArray d = G;
    auto dv = d.values();
    auto xv = x.values();
    for (std::size_t i = 0; i < dv.size(); ++i) {
      if (!(xv[i] > 0.0)) dv[i] = 0.0;
    }
    tp.accumulate(a, d);
  });
}

Var square(Var a) {
  DenseArray out = a.value();
  for (double& v : out.values()) v = v * v;
  return a.tape->record(std::move(out), [a](Tape& tp, const DenseArray& G) {
    const DenseArray& x = tp.value(a);
    DenseArray d = G;
    auto dv = d.values();
    auto xv = x.values();
    for (std::size_t i = 0; i < dv.size(); ++i) dv[i] *= 2.0 * xv[i];
    tp.accumulate(a, d);
  });
}

Var mul_constant(Var a, const DenseArray& c) {
  require_same_shape(a.value(), c, "mul_constant");
  DenseArray out = a.value();
  auto ov = out.values();
  auto cv = c.values();
  for (std::size_t i = 0; i < ov.size(); ++i) ov[i] *= cv[i];
  return a.tape->record(std::move(out), [a, c](Tape& tp, const DenseArray& G) {
    DenseArray d = G;
    auto dv = d.values();
    auto cv = c.values();
    for (std::size_t i = 0; i < dv.size(); ++i) dv[i] *= cv[i];
    tp.accumulate(a, d);
  });
}

Var sum(Var a) {
  double s = 0.0;
  for (double v : a.value().values()) s += v;
  return a.tape->record(DenseArray(1, 1, s),
                        [a](Tape& tp, const DenseArray& G) {
                          const DenseArray& x = tp.value(a);
                          tp.accumulate(a, DenseArray(x.rows(), x.cols(),
                                                      G(0, 0)));
                        });
}

Var sum_rows(Var a) {
  const DenseArray& A = a.value();
  DenseArray out(1, A.cols());
  for (std::size_t i = 0; i < A.rows(); ++i) {
    for (std::size_t j = 0; j < A.cols(); ++j) out(0, j) += A(i, j);
  }
  return a.tape->record(std::move(out), [a](Tape& tp, const DenseArray& G) {
    const DenseArray& x = tp.value(a);
    DenseArray d(x.rows(), x.cols());
    for (std::size_t i = 0; i < d.rows(); ++i) {
      for (std::size_t j = 0; j < d.cols(); ++j) d(i, j) = G(0, j);
    }
    tp.accumulate(a, d);
  });
}

Var concat_cols(std::span<const Var> parts) {
  require(!parts.empty(), "concat_cols: no inputs");
  Tape* t = parts.front().tape;
  const std::size_t rows = parts.front().rows();
  std::size_t cols = 0;
  for (const Var& p : parts) {
    require(p.tape == t, "concat_cols: operands on different tapes");
    if (p.rows() != rows) {
      fail(ErrorCode::invalid_argument, "concat_cols: row counts differ");
    }
    cols += p.cols();
  }
  DenseArray out(rows, cols);
  std::size_t offset = 0;
  for (const Var& p : parts) {
    const DenseArray& v = p.value();
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < v.cols(); ++j) out(i, offset + j) = v(i, j);
    }
    offset += v.cols();
  }
  std::vector<Var> inputs(parts.begin(), parts.end());
  return t->record(std::move(out), [inputs](Tape& tp, const DenseArray& G) {
    std::size_t offset = 0;
    for (const Var& p : inputs) {
      const DenseArray& v = tp.value(p);
      DenseArray d(v.rows(), v.cols());
      for (std::size_t i = 0; i < d.rows(); ++i) {
        for (std::size_t j = 0; j < d.cols(); ++j) d(i, j) = G(i, offset + j);
      }
      tp.accumulate(p, d);
      offset += v.cols();
    }
  });
}

Var concat_rows(std::span<const Var> parts) {
  require(!parts.empty(), "concat_rows: no inputs");
  Tape* t = parts.front().tape;
  const std::size_t cols = parts.front().cols();
  std::vector<double> values;
  std::size_t rows = 0;
  for (const Var& p : parts) {
    require(p.tape == t, "concat_rows: operands on different tapes");
    if (p.cols() != cols) {
      fail(ErrorCode::invalid_argument, "concat_rows: column counts differ");
    }
    auto v = p.value().values();
    values.insert(values.end(), v.begin(), v.end());
    rows += p.rows();
  }
  std::vector<Var> inputs(parts.begin(), parts.end());
  return t->record(DenseArray(rows, cols, std::move(values)),
                   [inputs](Tape& tp, const DenseArray& G) {
                     std::size_t offset = 0;
                     for (const Var& p : inputs) {
                       const DenseArray& v = tp.value(p);
                       std::vector<double> d(
                           G.values().begin() + offset,
                           G.values().begin() + offset + v.size());
                       tp.accumulate(p, DenseArray(v.rows(), v.cols(),
                                                   std::move(d)));
                       offset += v.size();
                     }
                   });
}

Var gather_rows(Var a, std::span<const std::size_t> rows) {
  const DenseArray& A = a.value();
  DenseArray out(rows.size(), A.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    require(rows[i] < A.rows(), "gather_rows: row index out of range");
    auto src = A.row(rows[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  std::vector<std::size_t> idx(rows.begin(), rows.end());
  return a.tape->record(std::move(out),
                        [a, idx](Tape& tp, const DenseArray& G) {
                          const DenseArray& x = tp.value(a);
                          DenseArray d(x.rows(), x.cols());
                          for (std::size_t i = 0; i < idx.size(); ++i) {
                            auto dst = d.row(idx[i]);
                            auto src = G.row(i);
                            for (std::size_t j = 0; j < dst.size(); ++j) {
                              dst[j] += src[j];
                            }
                          }
                          tp.accumulate(a, d);
                        });
}

Var element(Var a, std::size_t r, std::size_t c) {
  const DenseArray& A = a.value();
  require(r < A.rows() && c < A.cols(), "element: index out of range");
  return a.tape->record(DenseArray(1, 1, A(r, c)),
                        [a, r, c](Tape& tp, const DenseArray& G) {
                          const DenseArray& x = tp.value(a);
                          DenseArray d(x.rows(), x.cols());
                          d(r, c) = G(0, 0);
                          tp.accumulate(a, d);
                        });
}

Var gcn_propagate(Var h, const Adjacency& adj) {
  const DenseArray& H = h.value();
  if (H.rows() != adj.size()) {
    fail(ErrorCode::invalid_argument,
         "gcn_propagate: " + std::to_string(H.rows()) + " rows but " +
             std::to_string(adj.size()) + " nodes");
  }
  const std::vector<double> c = normalization(adj);
  DenseArray out(H.rows(), H.cols());
  for (std::size_t u = 0; u < adj.size(); ++u) {
    auto dst = out.row(u);
    auto self = H.row(u);
    for (std::size_t j = 0; j < dst.size(); ++j) dst[j] = c[u] * c[u] * self[j];
    for (std::uint32_t v : adj[u]) {
      const double w = c[u] * c[v];
      auto src = H.row(v);
      for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += w * src[j];
    }
  }
  return h.tape->record(
      std::move(out), [h, adj, c](Tape& tp, const DenseArray& G) {
        DenseArray d(G.rows(), G.cols());
        for (std::size_t u = 0; u < adj.size(); ++u) {
          auto g = G.row(u);
          auto self = d.row(u);
          for (std::size_t j = 0; j < g.size(); ++j) self[j] += c[u] * c[u] * g[j];
          for (std::uint32_t v : adj[u]) {
            const double w = c[u] * c[v];
            auto dst = d.row(v);
            for (std::size_t j = 0; j < g.size(); ++j) dst[j] += w * g[j];
          }
        }
        tp.accumulate(h, d);
      });
}

Var gin_propagate(Var h, const Adjacency& adj) {
  const DenseArray& H = h.value();
  if (H.rows() != adj.size()) {
    fail(ErrorCode::invalid_argument,
         "gin_propagate: " + std::to_string(H.rows()) + " rows but " +
             std::to_string(adj.size()) + " nodes");
  }
  DenseArray out = H;
  for (std::size_t u = 0; u < adj.size(); ++u) {
    auto dst = out.row(u);
    for (std::uint32_t v : adj[u]) {
      auto src = H.row(v);
      for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += src[j];
    }
  }
  return h.tape->record(std::move(out),
                        [h, adj](Tape& tp, const DenseArray& G) {
                          DenseArray d = G;
                          for (std::size_t u = 0; u < adj.size(); ++u) {
                            auto g = G.row(u);
                            for (std::uint32_t v : adj[u]) {
                              auto dst = d.row(v);
                              for (std::size_t j = 0; j < g.size(); ++j) {
                                dst[j] += g[j];
                              }
                            }
                          }
                          tp.accumulate(h, d);
                        });
}

Var apply_linear(Var x, Var w) { return matmul(x, w); }

Var apply_linear(Var x, Var w, Var bias) { return add_row(matmul(x, w), bias); }

Var gcn_layer(Var h, const Adjacency& adj, Var w) {
  return relu(gcn_propagate(matmul(h, w), adj));
}

Var gin_layer(Var h, const Adjacency& adj, Var w) {
  return relu(matmul(gin_propagate(h, adj), w));
}

Var dropout(Var h, double rate, bool training, std::uint64_t seed) {
  require(rate >= 0.0 && rate < 1.0, "dropout: rate must be in [0, 1)");
  if (!training || rate == 0.0) return h;
  const DenseArray& H = h.value();
  Rng rng(seed);
  std::bernoulli_distribution keep(1.0 - rate);
  DenseArray mask(H.rows(), H.cols());
  const double survivor = 1.0 / (1.0 - rate);
  for (double& m : mask.values()) m = keep(rng) ? survivor : 0.0;
  return mul_constant(h, mask);
}

Var masked_log_softmax_at(Var logits, const std::vector<bool>& mask,
                          std::size_t index) {
  const DenseArray& L = logits.value();
  require(L.rows() == 1 || L.cols() == 1,
          "masked_log_softmax_at: logits must be a vector");
  require(mask.size() == L.size(), "masked_log_softmax_at: mask size");
  require(index < L.size() && mask[index],
          "masked_log_softmax_at: index not in the masked-in support");
  auto lv = L.values();
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < lv.size(); ++i) {
    if (mask[i]) mx = std::max(mx, lv[i]);
  }
  double z = 0.0;
  for (std::size_t i = 0; i < lv.size(); ++i) {
    if (mask[i]) z += std::exp(lv[i] - mx);
  }
  const double lse = mx + std::log(z);
  return logits.tape->record(
      DenseArray(1, 1, lv[index] - lse),
      [logits, mask, index, lse](Tape& tp, const DenseArray& G) {
        const DenseArray& L = tp.value(logits);
        DenseArray d(L.rows(), L.cols());
        auto lv = L.values();
        auto dv = d.values();
        const double g = G(0, 0);
        for (std::size_t i = 0; i < lv.size(); ++i) {
          if (!mask[i]) continue;
          const double p = std::exp(lv[i] - lse);
          dv[i] = g * ((i == index ? 1.0 : 0.0) - p);
        }
        tp.accumulate(logits, d);
      });
}

std::vector<double> masked_softmax(std::span<const double> logits,
                                   const std::vector<bool>& mask) {
  require(mask.size() == logits.size(), "masked_softmax: mask size");
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (mask[i]) mx = std::max(mx, logits[i]);
  }
  require(std::isfinite(mx), "masked_softmax: empty mask");
  std::vector<double> p(logits.size(), 0.0);
  double z = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (mask[i]) {
      p[i] = std::exp(logits[i] - mx);
      z += p[i];
    }
  }
  for (double& v : p) v /= z;
  return p;
}

}  // namespace seedcomm::nd
