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
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "seedcomm/error.hpp"
#include "seedcomm/graph.hpp"

namespace seedcomm {

namespace {

std::vector<std::string_view> tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

bool is_comment(const std::vector<std::string_view>& toks) {
  return toks.empty() || toks.front().front() == '#';
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

[[noreturn]] void parse_error(const std::string& source, std::size_t line,
                              const std::string& what) {
  fail(ErrorCode::parse,
       source + ":" + std::to_string(line) + ": " + what);
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open " + path);
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorCode::io, "cannot open " + path + " for writing");
  return out;
}

}  // namespace

Graph parse_edge_list(std::istream& in, const std::string& source) {
  std::vector<std::pair<OriginalId, OriginalId>> raw;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto toks = tokens(line);
    if (is_comment(toks)) continue;
    OriginalId u = 0, v = 0;
    if (toks.size() != 2 || !parse_number(toks[0], u) ||
        !parse_number(toks[1], v)) {
      parse_error(source, lineno, "expected two integer node ids");
    }
    raw.emplace_back(u, v);
  }
  if (raw.empty()) fail(ErrorCode::parse, source + ": empty graph");

  std::vector<OriginalId> ids;
  ids.reserve(raw.size() * 2);
  for (const auto& [u, v] : raw) {
    ids.push_back(u);
    ids.push_back(v);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  auto index = [&](OriginalId id) {
    return static_cast<NodeId>(
        std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
  };
  std::vector<Edge> edges;
  edges.reserve(raw.size());
  for (const auto& [u, v] : raw) edges.emplace_back(index(u), index(v));
  const std::size_t n = ids.size();
  return Graph::from_edges(n, edges, std::move(ids));
}

Graph load_edge_list(const std::string& path) {
  auto in = open_input(path);
  return parse_edge_list(in, path);
}

CommunitySet parse_communities(std::istream& in, const Graph& graph,
                               const std::string& source) {
  std::vector<Community> comms;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto toks = tokens(line);
    if (is_comment(toks)) continue;
    std::vector<NodeId> members;
    for (auto t : toks) {
      OriginalId id = 0;
      if (!parse_number(t, id)) parse_error(source, lineno, "bad node id");
      if (auto u = graph.internal_id(id)) members.push_back(*u);
    }
    if (!members.empty()) comms.emplace_back(std::move(members));
  }
  if (comms.empty()) {
    fail(ErrorCode::parse, source + ": no communities after cleaning");
  }
  return CommunitySet::all_train(std::move(comms));
}

CommunitySet load_communities(const std::string& path, const Graph& graph) {
  auto in = open_input(path);
  return parse_communities(in, graph, path);
}

Graph load_features(const std::string& path, const Graph& graph) {
  auto in = open_input(path);
  std::map<NodeId, std::vector<double>> rows;
  std::size_t width = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto toks = tokens(line);
    if (is_comment(toks)) continue;
    OriginalId id = 0;
    if (toks.size() < 2 || !parse_number(toks[0], id)) {
      parse_error(path, lineno, "expected `id f1 ... ff`");
    }
    std::vector<double> values;
    for (std::size_t i = 1; i < toks.size(); ++i) {
      double v = 0.0;
      if (!parse_number(toks[i], v)) parse_error(path, lineno, "bad feature");
      values.push_back(v);
    }
    if (width == 0) width = values.size();
    if (values.size() != width) {
      parse_error(path, lineno, "inconsistent feature width");
    }
    if (auto u = graph.internal_id(id)) rows[*u] = std::move(values);
  }
  if (width == 0) fail(ErrorCode::parse, path + ": no feature rows");
  nd::DenseArray features(graph.node_count(), width);
  for (const auto& [u, values] : rows) {
    std::copy(values.begin(), values.end(), features.row(u).begin());
  }
  return graph.with_features(std::move(features));
}

void write_edge_list(const std::string& path, const Graph& graph) {
  auto out = open_output(path);
  for (const auto& [u, v] : graph.edges()) {
    out << graph.original_id(u) << ' ' << graph.original_id(v) << '\n';
  }
  if (!out) fail(ErrorCode::io, "write failed: " + path);
}

void write_communities(std::ostream& out, std::span<const Community> comms,
                       const Graph& graph) {
  for (const Community& c : comms) {
    std::vector<OriginalId> ids;
    ids.reserve(c.size());
    for (NodeId u : c) ids.push_back(graph.original_id(u));
    std::sort(ids.begin(), ids.end());
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (i) out << ' ';
      out << ids[i];
    }
    out << '\n';
  }
}

void write_communities(const std::string& path,
                       std::span<const Community> comms, const Graph& graph) {
  auto out = open_output(path);
  write_communities(out, comms, graph);
  if (!out) fail(ErrorCode::io, "write failed: " + path);
}

void write_id_map(const std::string& path, const Graph& graph) {
  auto out = open_output(path);
  for (NodeId u = 0; u < graph.node_count(); ++u) {
    out << graph.original_id(u) << '\t' << u << '\n';
  }
  if (!out) fail(ErrorCode::io, "write failed: " + path);
}

std::vector<std::vector<OriginalId>> load_raw_communities(
    const std::string& path) {
  auto in = open_input(path);
  std::vector<std::vector<OriginalId>> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto toks = tokens(line);
    if (is_comment(toks)) continue;
    std::vector<OriginalId> ids;
    for (auto t : toks) {
      OriginalId id = 0;
      if (!parse_number(t, id)) parse_error(path, lineno, "bad node id");
      ids.push_back(id);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    out.push_back(std::move(ids));
  }
  return out;
}

}  // namespace seedcomm
