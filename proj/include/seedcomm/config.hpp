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

// Run configuration: flat `key=value` text with `#` comments. Every key is
// optional; omitted keys keep their defaults.

#ifndef SEEDCOMM_CONFIG_HPP_
#define SEEDCOMM_CONFIG_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace seedcomm {

struct RunConfig {
  // Inputs and output directory. `features` may be empty.
  std::string edges;
  std::string communities;
  std::string features;
  std::string out = "out";

  std::uint64_t seed = 0;
  std::size_t workers = 1;

  // Ego-net radius; also the encoder depth.
  int k = 2;
  std::size_t dim = 64;
  double dropout = 0.2;
  double margin = 0.4;
  double locator_lr = 1e-4;
  std::size_t locator_epochs = 2;
  std::size_t locator_batches = 32;
  std::size_t locator_pairs = 50;

  double rewriter_lr = 1e-3;
  std::size_t rewriter_epochs = 1200;
  std::size_t rewriter_episodes = 20;
  std::size_t boundary_cap = 10;
  // 0 means the largest training community.
  std::size_t size_cap = 0;

  // 0 means 10 x the number of training communities.
  std::size_t n_output = 0;
  std::optional<double> eta;
  // "euclidean" or "order".
  std::string metric = "euclidean";
  bool exclude_known_centers = true;

  std::size_t train_count = 90;
  std::size_t valid_count = 10;

  bool preprocess = true;
  double percentile = 0.9;
  std::size_t sample_count = 1000;

  bool filter_overlap = false;
  double overlap_threshold = 0.5;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// Throws Error(parse) on malformed lines, unknown or repeated keys, and
// Error(invalid_argument) when a value is out of range.
RunConfig parse_config(std::istream& in, const std::string& source = "<config>");
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

// Normalized text: every key, fixed order, canonical values.
std::string write_config(const RunConfig& config);

// Names of all keys in normalized order.
std::vector<std::string> config_keys();
// Single-key access using the text representation.
void set_config_value(RunConfig& config, const std::string& key,
                      const std::string& value);
std::string get_config_value(const RunConfig& config, const std::string& key);

void validate(const RunConfig& config);

// FNV-1a of the normalized text, as 16 hex digits.
std::string config_hash(const RunConfig& config);

}  // namespace seedcomm

#endif  // SEEDCOMM_CONFIG_HPP_
