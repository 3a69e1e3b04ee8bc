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

#ifndef SEEDCOMM_METRICS_HPP_
#define SEEDCOMM_METRICS_HPP_

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "seedcomm/graph.hpp"

namespace seedcomm::metrics {

double f1_pair(const Community& a, const Community& b);
double jaccard_pair(const Community& a, const Community& b);

enum class PairScore { f1, jaccard };

// 1/2 (mean over predictions of the best truth score + mean over truths of
// the best prediction score).
double bimatch(std::span<const Community> preds,
               std::span<const Community> truths, PairScore delta);

// Overlapping NMI (LFK conditional entropies, normalized by the larger
// cover entropy). The universe is the union of all members of both covers.
double onmi(std::span<const Community> preds,
            std::span<const Community> truths);

// Drops every detected community whose largest overlap |c & r| / |c| with a
// reference community exceeds `threshold`.
std::vector<Community> filter_overlap(std::span<const Community> detected,
                                      std::span<const Community> reference,
                                      double threshold);

struct BestMatch {
  std::size_t prediction = 0;
  std::size_t truth = 0;
  double f1 = 0.0;
};

struct ScoreReport {
  double f1 = 0.0;
  double jaccard = 0.0;
  double onmi = 0.0;
  std::vector<BestMatch> best_matches;
};

ScoreReport score(std::span<const Community> preds,
                  std::span<const Community> truths);

// `metric: value` lines.
void write_report_text(std::ostream& out, const ScoreReport& report);
// `metric<TAB>value` rows.
void write_report_tsv(std::ostream& out, const ScoreReport& report);
// `prediction<TAB>truth<TAB>f1` rows.
void write_best_matches_tsv(std::ostream& out, const ScoreReport& report);

}  // namespace seedcomm::metrics

#endif  // SEEDCOMM_METRICS_HPP_
