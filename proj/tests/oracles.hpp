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

// Independent reference implementations used as test oracles: brute-force
// metrics over explicit node sets, a full-sort matcher, and central finite
// differences.

#ifndef SEEDCOMM_TESTS_ORACLES_HPP_
#define SEEDCOMM_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <tuple>
#include <vector>

#include "seedcomm/graph.hpp"
#include "seedcomm/locator.hpp"
#include "seedcomm/ndiff.hpp"

namespace oracle {

using seedcomm::Community;
using seedcomm::NodeId;

inline std::set<NodeId> as_set(const Community& c) {
  return {c.begin(), c.end()};
}

inline std::size_t common(const Community& a, const Community& b) {
  const auto sa = as_set(a);
  std::size_t n = 0;
  for (NodeId u : b) n += sa.count(u);
  return n;
}

inline double f1(const Community& a, const Community& b) {
  // Precision/recall form.
  const double inter = static_cast<double>(common(a, b));
  if (inter == 0.0) return 0.0;
  const double precision = inter / static_cast<double>(a.size());
  const double recall = inter / static_cast<double>(b.size());
  return 2.0 * precision * recall / (precision + recall);
}

inline double jaccard(const Community& a, const Community& b) {
  auto u = as_set(a);
  for (NodeId x : b) u.insert(x);
  return static_cast<double>(common(a, b)) / static_cast<double>(u.size());
}

inline double bimatch(const std::vector<Community>& preds,
                      const std::vector<Community>& truths,
                      double (*delta)(const Community&, const Community&)) {
  auto side = [&](const std::vector<Community>& from,
                  const std::vector<Community>& to, bool flip) {
    double total = 0.0;
    for (const auto& x : from) {
      double best = 0.0;
      for (const auto& y : to) best = std::max(best, flip ? delta(y, x) : delta(x, y));
      total += best;
    }
    return total / static_cast<double>(from.size());
  };
  return 0.5 * (side(preds, truths, false) + side(truths, preds, true));
}

// Overlapping NMI with max normalization, from explicit per-node counts.
inline double onmi(const std::vector<Community>& xs,
                   const std::vector<Community>& ys) {
  std::set<NodeId> universe;
  for (const auto* cover : {&xs, &ys}) {
    for (const auto& c : *cover) universe.insert(c.begin(), c.end());
  }
  const double n = static_cast<double>(universe.size());
  auto h = [n](double count) {
    return count <= 0.0 ? 0.0 : -(count / n) * std::log(count / n) / std::log(2.0);
  };
  auto entropy = [&](const Community& c) {
    return h(static_cast<double>(c.size())) + h(n - static_cast<double>(c.size()));
  };
  auto conditional = [&](const std::vector<Community>& a,
                         const std::vector<Community>& b) {
    double total = 0.0;
    for (const auto& x : a) {
      const auto sx = as_set(x);
      double best = entropy(x);
      for (const auto& y : b) {
        const auto sy = as_set(y);
        double n00 = 0, n01 = 0, n10 = 0, n11 = 0;
        for (NodeId u : universe) {
          const bool in_x = sx.count(u) > 0, in_y = sy.count(u) > 0;
          if (!in_x && !in_y) ++n00;
          if (!in_x && in_y) ++n01;
          if (in_x && !in_y) ++n10;
          if (in_x && in_y) ++n11;
        }
        if (h(n00) + h(n11) >= h(n01) + h(n10)) {
          const double joint = h(n00) + h(n01) + h(n10) + h(n11);
          const double hy = h(n01 + n11) + h(n00 + n10);
          best = std::min(best, joint - hy);
        }
      }
      total += std::max(0.0, best);
    }
    return total;
  };
  double hx = 0.0, hy = 0.0;
  for (const auto& x : xs) hx += entropy(x);
  for (const auto& y : ys) hy += entropy(y);
  const double norm = std::max(hx, hy);
  if (norm == 0.0) return 1.0;
  const double mi = 0.5 * (hx - conditional(xs, ys) + hy - conditional(ys, xs));
  return std::clamp(mi / norm, 0.0, 1.0);
}

// Full sort of every (distance, center) pair per pattern, then the first
// `quota` unclaimed eligible entries.
inline std::vector<seedcomm::locator::Match> scan_match(
    const seedcomm::nd::DenseArray& patterns,
    const seedcomm::nd::DenseArray& candidates,
    const std::vector<std::size_t>& quota, const std::vector<bool>& eligible,
    seedcomm::locator::Distance metric) {
  std::vector<bool> claimed(candidates.rows(), false);
  std::vector<seedcomm::locator::Match> out;
  for (std::size_t p = 0; p < patterns.rows(); ++p) {
    std::vector<std::pair<double, std::size_t>> all;
    for (std::size_t c = 0; c < candidates.rows(); ++c) {
      double d = 0.0;
      for (std::size_t k = 0; k < patterns.cols(); ++k) {
        if (metric == seedcomm::locator::Distance::euclidean) {
          const double diff = patterns(p, k) - candidates(c, k);
          d += diff * diff;
        } else {
          const double v = std::max(0.0, candidates(c, k) - patterns(p, k));
          d += v * v;
        }
      }
      if (metric == seedcomm::locator::Distance::euclidean) d = std::sqrt(d);
      all.emplace_back(d, c);
    }
    std::sort(all.begin(), all.end());
    std::size_t taken = 0;
    for (const auto& [d, c] : all) {
      if (taken == quota[p]) break;
      if (claimed[c] || (!eligible.empty() && !eligible[c])) continue;
      claimed[c] = true;
      out.push_back({p, static_cast<NodeId>(c), d});
      ++taken;
    }
  }
  return out;
}

// Central differences of f over every scalar of `params`.
inline seedcomm::nd::ParamSet finite_difference(
    const seedcomm::nd::ParamSet& params,
    const std::function<double(const seedcomm::nd::ParamSet&)>& f,
    double step = 1e-6) {
  seedcomm::nd::ParamSet grads = params.zeros_like();
  seedcomm::nd::ParamSet probe = params;
  for (const auto& name : params.names()) {
    auto values = probe.get(name).values();
    auto g = grads.get(name).values();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + step;
      const double up = f(probe);
      values[i] = saved - step;
      const double down = f(probe);
      values[i] = saved;
      g[i] = (up - down) / (2.0 * step);
    }
  }
  return grads;
}

// ||a - b|| / max(||a||, ||b||) over all scalars; 0 when both vanish.
inline double relative_error(const seedcomm::nd::ParamSet& a,
                             const seedcomm::nd::ParamSet& b) {
  double diff = 0.0, na = 0.0, nb = 0.0;
  for (const auto& name : a.names()) {
    const auto va = a.get(name).values();
    const auto vb = b.get(name).values();
    for (std::size_t i = 0; i < va.size(); ++i) {
      diff += (va[i] - vb[i]) * (va[i] - vb[i]);
      na += va[i] * va[i];
      nb += vb[i] * vb[i];
    }
  }
  const double scale = std::sqrt(std::max(na, nb));
  return scale == 0.0 ? 0.0 : std::sqrt(diff) / scale;
}

}  // namespace oracle

#endif  // SEEDCOMM_TESTS_ORACLES_HPP_
