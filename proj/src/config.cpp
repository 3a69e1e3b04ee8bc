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

#include "seedcomm/config.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "seedcomm/error.hpp"

namespace seedcomm {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

template <typename T>
T parse_integer(const std::string& key, const std::string& text) {
  T v{};
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (text.empty() || ec != std::errc{} || ptr != last) {
    fail(ErrorCode::parse, key + ": expected an integer, got '" + text + "'");
  }
  return v;
}

double parse_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (text.empty() || ec != std::errc{} || ptr != last || !std::isfinite(v)) {
    fail(ErrorCode::parse, key + ": expected a number, got '" + text + "'");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  fail(ErrorCode::parse, key + ": expected true or false, got '" + text + "'");
}

struct Field {
  const char* key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

Field text_field(const char* key, std::string RunConfig::*member) {
  return {key, [member](const RunConfig& c) { return c.*member; },
          [member](RunConfig& c, const std::string& v) { c.*member = v; }};
}

template <typename T>
Field integer_field(const char* key, T RunConfig::*member) {
  return {key,
          [member](const RunConfig& c) { return std::to_string(c.*member); },
          [key, member](RunConfig& c, const std::string& v) {
            c.*member = parse_integer<T>(key, v);
          }};
}

Field double_field(const char* key, double RunConfig::*member) {
  return {key, [member](const RunConfig& c) { return format_double(c.*member); },
          [key, member](RunConfig& c, const std::string& v) {
            c.*member = parse_double(key, v);
          }};
}

Field bool_field(const char* key, bool RunConfig::*member) {
  return {key,
          [member](const RunConfig& c) {
            return std::string(c.*member ? "true" : "false");
          },
          [key, member](RunConfig& c, const std::string& v) {
            c.*member = parse_bool(key, v);
          }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      text_field("edges", &RunConfig::edges),
      text_field("communities", &RunConfig::communities),
      text_field("features", &RunConfig::features),
      text_field("out", &RunConfig::out),
      integer_field("seed", &RunConfig::seed),
      integer_field("workers", &RunConfig::workers),
      integer_field("k", &RunConfig::k),
      integer_field("dim", &RunConfig::dim),
      double_field("dropout", &RunConfig::dropout),
      double_field("margin", &RunConfig::margin),
      double_field("locator_lr", &RunConfig::locator_lr),
      integer_field("locator_epochs", &RunConfig::locator_epochs),
      integer_field("locator_batches", &RunConfig::locator_batches),
      integer_field("locator_pairs", &RunConfig::locator_pairs),
      double_field("rewriter_lr", &RunConfig::rewriter_lr),
      integer_field("rewriter_epochs", &RunConfig::rewriter_epochs),
      integer_field("rewriter_episodes", &RunConfig::rewriter_episodes),
      integer_field("boundary_cap", &RunConfig::boundary_cap),
      integer_field("size_cap", &RunConfig::size_cap),
      integer_field("n_output", &RunConfig::n_output),
      {"eta",
       [](const RunConfig& c) {
         return c.eta ? format_double(*c.eta) : std::string();
       },
       [](RunConfig& c, const std::string& v) {
         if (v.empty()) {
           c.eta.reset();
         } else {
           c.eta = parse_double("eta", v);
         }
       }},
      text_field("metric", &RunConfig::metric),
      bool_field("exclude_known_centers", &RunConfig::exclude_known_centers),
      integer_field("train_count", &RunConfig::train_count),
      integer_field("valid_count", &RunConfig::valid_count),
      bool_field("preprocess", &RunConfig::preprocess),
      double_field("percentile", &RunConfig::percentile),
      integer_field("sample_count", &RunConfig::sample_count),
      bool_field("filter_overlap", &RunConfig::filter_overlap),
      double_field("overlap_threshold", &RunConfig::overlap_threshold),
  };
  return table;
}

const Field& field(const std::string& key) {
  for (const Field& f : fields()) {
    if (key == f.key) return f;
  }
  fail(ErrorCode::parse, "unknown config key '" + key + "'");
}

}  // namespace

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const Field& f : fields()) out.emplace_back(f.key);
  return out;
}

void set_config_value(RunConfig& config, const std::string& key,
                      const std::string& value) {
  field(key).set(config, value);
}

std::string get_config_value(const RunConfig& config, const std::string& key) {
  return field(key).get(config);
}

void validate(const RunConfig& c) {
  require(c.k == 1 || c.k == 2, "k must be 1 or 2");
  require(c.dim >= 1, "dim must be >= 1");
  require(c.workers >= 1, "workers must be >= 1");
  require(c.dropout >= 0.0 && c.dropout < 1.0, "dropout must be in [0, 1)");
  require(c.margin > 0.0, "margin must be > 0");
  require(c.locator_lr > 0.0, "locator_lr must be > 0");
  require(c.rewriter_lr > 0.0, "rewriter_lr must be > 0");
  require(c.locator_epochs >= 1 && c.locator_batches >= 1 &&
              c.locator_pairs >= 1,
          "locator epochs, batches and pairs must be >= 1");
  require(c.rewriter_episodes >= 1, "rewriter_episodes must be >= 1");
  require(c.boundary_cap >= 1, "boundary_cap must be >= 1");
  require(!c.eta || *c.eta >= 0.0, "eta must be >= 0");
  require(c.metric == "euclidean" || c.metric == "order",
          "metric must be euclidean or order");
  require(c.train_count >= 1, "train_count must be >= 1");
  require(c.percentile > 0.0 && c.percentile <= 1.0,
          "percentile must be in (0, 1]");
  require(c.sample_count >= 1, "sample_count must be >= 1");
  require(c.overlap_threshold >= 0.0 && c.overlap_threshold <= 1.0,
          "overlap_threshold must be in [0, 1]");
}

RunConfig parse_config(std::istream& in, const std::string& source) {
  RunConfig config;
  std::set<std::string> seen;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string where = source + ":" + std::to_string(number) + ": ";
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCode::parse, where + "expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!seen.insert(key).second) {
      fail(ErrorCode::parse, where + "repeated key '" + key + "'");
    }
    try {
      set_config_value(config, key, value);
    } catch (const Error& e) {
      fail(e.code(), where + e.what());
    }
  }
  validate(config);
  return config;
}

RunConfig parse_config_text(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open config " + path);
  return parse_config(in, path);
}

std::string write_config(const RunConfig& config) {
  std::string out;
  for (const Field& f : fields()) {
    out += f.key;
    out += '=';
    out += f.get(config);
    out += '\n';
  }
  return out;
}

std::string config_hash(const RunConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : write_config(config)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace seedcomm
