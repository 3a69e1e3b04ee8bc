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
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "seedcomm/error.hpp"
#include "seedcomm/ndiff.hpp"

namespace seedcomm::nd {

DenseArray glorot_uniform(std::size_t rows, std::size_t cols, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  std::uniform_real_distribution<double> dist(-limit, limit);
  DenseArray out(rows, cols);
  for (double& v : out.values()) v = dist(rng);
  return out;
}

OptimState make_optim_state(const ParamSet& params, double lr) {
  require(lr >= 0.0, "learning rate must be non-negative");
  OptimState state;
  state.lr = lr;
  state.first_moment = params.zeros_like();
  state.second_moment = params.zeros_like();
  return state;
}

void adam_step(ParamSet& params, const ParamSet& grads, OptimState& state) {
  require(grads.size() == params.size() &&
              state.first_moment.size() == params.size(),
          "adam_step: parameter, gradient and moment sets differ");
  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  for (auto& [name, p] : params) {
    const DenseArray& g = grads.get(name);
    DenseArray& m = state.first_moment.get(name);
    DenseArray& v = state.second_moment.get(name);
    require(p.same_shape(g) && p.same_shape(m) && p.same_shape(v),
            "adam_step: shape mismatch for " + name);
    auto pv = p.values();
    auto gv = g.values();
    auto mv = m.values();
    auto vv = v.values();
    for (std::size_t i = 0; i < pv.size(); ++i) {
      mv[i] = state.beta1 * mv[i] + (1.0 - state.beta1) * gv[i];
      vv[i] = state.beta2 * vv[i] + (1.0 - state.beta2) * gv[i] * gv[i];
      const double mhat = mv[i] / c1;
      const double vhat = vv[i] / c2;
      pv[i] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
    }
  }
}

namespace {

constexpr char kMagic[4] = {'N', 'D', 'C', 'K'};

template <typename T>
void put(std::ostream& out, T value) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(value);
    std::reverse(bytes.begin(), bytes.end());
    value = std::bit_cast<T>(bytes);
  }
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.write(buf, sizeof(T));
}

template <typename T>
T take(std::istream& in) {
  char buf[sizeof(T)];
  if (!in.read(buf, sizeof(T))) {
    fail(ErrorCode::parse, "checkpoint: truncated stream");
  }
  T value;
  std::memcpy(&value, buf, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(value);
    std::reverse(bytes.begin(), bytes.end());
    value = std::bit_cast<T>(bytes);
  }
  return value;
}

}  // namespace

void write_checkpoint(std::ostream& out, const ParamSet& params) {
  out.write(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(params.size()));
  for (const auto& [name, a] : params) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    put<std::uint64_t>(out, a.rows());
    put<std::uint64_t>(out, a.cols());
    for (double v : a.values()) put<double>(out, v);
  }
  if (!out) fail(ErrorCode::io, "checkpoint: write failed");
}

ParamSet read_checkpoint(std::istream& in) {
  char magic[4];
  if (!in.read(magic, sizeof(magic)) ||
      std::memcmp(magic, kMagic, sizeof(magic)) != 0) {
    fail(ErrorCode::parse, "checkpoint: bad magic");
  }
  const auto version = take<std::uint32_t>(in);
  if (version != kCheckpointVersion) {
    fail(ErrorCode::parse,
         "checkpoint: unsupported version " + std::to_string(version));
  }
  const auto count = take<std::uint32_t>(in);
  ParamSet params;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto len = take<std::uint32_t>(in);
    if (len > 4096) fail(ErrorCode::parse, "checkpoint: name too long");
    std::string name(len, '\0');
    if (!in.read(name.data(), len)) {
      fail(ErrorCode::parse, "checkpoint: truncated name");
    }
    const auto rows = take<std::uint64_t>(in);
    const auto cols = take<std::uint64_t>(in);
    if (rows > (1u << 24) || cols > (1u << 24)) {
      fail(ErrorCode::parse, "checkpoint: implausible shape for " + name);
    }
    std::vector<double> values(rows * cols);
    for (double& v : values) v = take<double>(in);
    DenseArray a(rows, cols, std::move(values));
    if (!a.all_finite()) {
      fail(ErrorCode::numeric, "checkpoint: non-finite values in " + name);
    }
    params.add(name, std::move(a));
  }
  return params;
}

void save_checkpoint(const std::string& path, const ParamSet& params) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::io, "cannot open " + path + " for writing");
  write_checkpoint(out, params);
}

ParamSet load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io, "cannot open checkpoint " + path);
  return read_checkpoint(in);
}

}  // namespace seedcomm::nd
