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

#include "seedcomm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <unordered_map>

#include "seedcomm/error.hpp"

namespace seedcomm::metrics {

double f1_pair(const Community& a, const Community& b) {
  require(!a.empty() && !b.empty(), "f1_pair: empty community");
  const double inter = static_cast<double>(a.intersection_size(b));
  return 2.0 * inter / static_cast<double>(a.size() + b.size());
}

double jaccard_pair(const Community& a, const Community& b) {
  require(!a.empty() && !b.empty(), "jaccard_pair: empty community");
  const std::size_t inter = a.intersection_size(b);
  return static_cast<double>(inter) /
         static_cast<double>(a.size() + b.size() - inter);
}

double bimatch(std::span<const Community> preds,
               std::span<const Community> truths, PairScore delta) {
  require(!preds.empty() && !truths.empty(), "bimatch: empty cover");
  const auto fn = delta == PairScore::f1 ? f1_pair : jaccard_pair;
  std::vector<double> best_truth(truths.size(), 0.0);
  double pred_side = 0.0;
  for (const Community& p : preds) {
    double best = 0.0;
    for (std::size_t j = 0; j < truths.size(); ++j) {
      const double s = fn(p, truths[j]);
      best = std::max(best, s);
      best_truth[j] = std::max(best_truth[j], s);
    }
    pred_side += best;
  }
  double truth_side = 0.0;
  for (double s : best_truth) truth_side += s;
  return 0.5 * (pred_side / static_cast<double>(preds.size()) +
                truth_side / static_cast<double>(truths.size()));
}

namespace {

double h(double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; }

double binary_entropy(double size, double n) {
  return h(size / n) + h((n - size) / n);
}

// H(X_i | Y) summed over X, given the |X| x |Y| intersection counts.
double conditional_entropy(const std::vector<std::size_t>& x_sizes,
                           const std::vector<std::size_t>& y_sizes,
                           const std::vector<std::vector<std::size_t>>& inter,
                           bool transpose, double n) {
  double total = 0.0;
  for (std::size_t i = 0; i < x_sizes.size(); ++i) {
    const double xi = static_cast<double>(x_sizes[i]);
    const double h_xi = binary_entropy(xi, n);
    double best = h_xi;
    for (std::size_t j = 0; j < y_sizes.size(); ++j) {
      const double yj = static_cast<double>(y_sizes[j]);
      const double d = static_cast<double>(transpose ? inter[j][i] : inter[i][j]);
      const double c = xi - d;
      const double b = yj - d;
      const double a = n - d - b - c;
      const double ha = h(a / n), hb = h(b / n), hc = h(c / n), hd = h(d / n);
      if (ha + hd >= hb + hc) {
        const double joint_minus_y =
            ha + hb + hc + hd - h((b + d) / n) - h((a + c) / n);
        best = std::min(best, joint_minus_y);
      }
    }
    total += std::max(0.0, best);
  }
  return total;
}

}  // namespace

double onmi(std::span<const Community> preds,
            std::span<const Community> truths) {
  require(!preds.empty() && !truths.empty(), "onmi: empty cover");
  std::unordered_map<NodeId, std::size_t> universe;
  std::vector<std::vector<std::size_t>> pred_of, truth_of;
  auto register_cover = [&](std::span<const Community> cover,
                            std::vector<std::vector<std::size_t>>& owner) {
    for (std::size_t c = 0; c < cover.size(); ++c) {
      require(!cover[c].empty(), "onmi: empty community");
      for (NodeId u : cover[c]) {
        auto [it, fresh] = universe.emplace(u, universe.size());
        if (fresh) {
          pred_of.emplace_back();
          truth_of.emplace_back();
        }
        owner[it->second].push_back(c);
      }
    }
  };
  // Universe indices follow first appearance, predictions before truths.
  register_cover(preds, pred_of);
  register_cover(truths, truth_of);
  const double n = static_cast<double>(universe.size());

  std::vector<std::vector<std::size_t>> inter(
      preds.size(), std::vector<std::size_t>(truths.size(), 0));
  for (std::size_t u = 0; u < pred_of.size(); ++u) {
    for (std::size_t i : pred_of[u]) {
      for (std::size_t j : truth_of[u]) ++inter[i][j];
    }
  }
  std::vector<std::size_t> x_sizes, y_sizes;
  for (const auto& c : preds) x_sizes.push_back(c.size());
  for (const auto& c : truths) y_sizes.push_back(c.size());

  double hx = 0.0, hy = 0.0;
  for (std::size_t s : x_sizes) hx += binary_entropy(static_cast<double>(s), n);
  for (std::size_t s : y_sizes) hy += binary_entropy(static_cast<double>(s), n);
  const double norm = std::max(hx, hy);
  if (norm <= 0.0) return 1.0;

  const double hx_y = conditional_entropy(x_sizes, y_sizes, inter, false, n);
  const double hy_x = conditional_entropy(y_sizes, x_sizes, inter, true, n);
  const double mutual = 0.5 * (hx - hx_y + hy - hy_x);
  return std::clamp(mutual / norm, 0.0, 1.0);
}

std::vector<Community> filter_overlap(std::span<const Community> detected,
                                      std::span<const Community> reference,
                                      double threshold) {
  require(threshold >= 0.0 && threshold <= 1.0,
          "filter_overlap: threshold must be in [0, 1]");
  std::vector<Community> kept;
  for (const Community& c : detected) {
    double worst = 0.0;
    for (const Community& r : reference) {
      worst = std::max(worst, static_cast<double>(c.intersection_size(r)) /
                                  static_cast<double>(c.size()));
    }
    if (!(worst > threshold)) kept.push_back(c);
  }
  return kept;
}

ScoreReport score(std::span<const Community> preds,
                  std::span<const Community> truths) {
  ScoreReport r;
  r.f1 = bimatch(preds, truths, PairScore::f1);
  r.jaccard = bimatch(preds, truths, PairScore::jaccard);
  r.onmi = onmi(preds, truths);
  for (std::size_t i = 0; i < preds.size(); ++i) {
    BestMatch best{i, 0, -1.0};
    for (std::size_t j = 0; j < truths.size(); ++j) {
      const double s = f1_pair(preds[i], truths[j]);
      if (s > best.f1) best = BestMatch{i, j, s};
    }
    r.best_matches.push_back(best);
  }
  return r;
}

void write_report_text(std::ostream& out, const ScoreReport& report) {
  out << std::setprecision(6) << std::fixed;
  out << "f1: " << report.f1 << '\n'
      << "jaccard: " << report.jaccard << '\n'
      << "onmi: " << report.onmi << '\n';
}

void write_report_tsv(std::ostream& out, const ScoreReport& report) {
  out << std::setprecision(6) << std::fixed;
  out << "f1\t" << report.f1 << '\n'
      << "jaccard\t" << report.jaccard << '\n'
      << "onmi\t" << report.onmi << '\n';
}

void write_best_matches_tsv(std::ostream& out, const ScoreReport& report) {
  out << std::setprecision(6) << std::fixed;
  for (const auto& m : report.best_matches) {
    out << m.prediction << '\t' << m.truth << '\t' << m.f1 << '\n';
  }
}

}  // namespace seedcomm::metrics
