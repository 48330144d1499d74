// Copyright 2026 The MKPNet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "mkp/enrich.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>
#include <tuple>

MKP_NAMESPACE_BEGIN

namespace {

constexpr const char* kNodesHeader = "id\ttext";
constexpr const char* kEdgesHeader =
    "event1\tevent2\trelation\tprobability\tfrequency\tconfidence\ttier\tsource";
constexpr const char* kConflictsHeader =
    "event1\tevent2\texplicit_relation\timplicit_relation\tconfidence";

// Shortest representation that parses back to the same double.
std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
    if (tab == std::string::npos) return out;
    start = tab + 1;
  }
}

template <typename T>
T parse_number(const std::string& s, const std::string& where) {
  T v{};
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw DataError(where + ": not a number: '" + s + "'");
  }
  return v;
}

// Reads a TSV file, checking the header's first column; calls `row` with
// the fields and a "path:line" location for every data line.
template <typename F>
void read_tsv(const std::filesystem::path& path, const std::string& first_column, F row) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path.string());
  std::string line;
  std::size_t lineno = 0;
  bool header = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_tabs(line);
    if (header) {
      header = false;
      if (fields.front() != first_column) {
        throw DataError(path.string() + ":1: expected a header row starting with '" +
                        first_column + "'");
      }
      continue;
    }
    row(fields, path.string() + ":" + std::to_string(lineno));
  }
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

void check_field(const std::string& s, const char* what) {
  if (s.empty() || s.find_first_of("\t\n\r") != std::string::npos) {
    throw DataError(std::string(what) + " must be non-empty and free of tabs and newlines: '" +
                    s + "'");
  }
}

auto edge_key(const EnrichedEdge& e) { return std::tie(e.event1, e.event2, e.relation); }

}  // namespace

std::string_view tier_name(Tier tier) {
  switch (tier) {
    case Tier::kCore: return "core";
    case Tier::kHigh: return "high";
    case Tier::kFull: return "full";
  }
  return "?";
}

std::optional<Tier> parse_tier(std::string_view name) {
  for (Tier t : {Tier::kCore, Tier::kHigh, Tier::kFull}) {
    if (tier_name(t) == name) return t;
  }
  return std::nullopt;
}

std::string_view source_name(EdgeSource source) {
  return source == EdgeSource::kExplicit ? "explicit" : "implicit";
}

std::optional<EdgeSource> parse_source(std::string_view name) {
  if (name == "explicit") return EdgeSource::kExplicit;
  if (name == "implicit") return EdgeSource::kImplicit;
  return std::nullopt;
}

void TierThresholds::validate() const {
  const bool finite = std::isfinite(core) && std::isfinite(high) && std::isfinite(full);
  if (!finite || !(core > high && high > full && full > 0)) {
    throw ConfigError("tier thresholds must be positive and strictly decreasing (core > high > full)");
  }
}

double score_edge(double prob, std::int64_t freq) {
  if (!(prob > 0 && prob <= 1)) throw DataError("edge probability must lie in (0, 1]");
  if (freq < 1) throw DataError("edge frequency must be at least 1");
  return prob * static_cast<double>(freq);
}

std::optional<Tier> assign_tier(double confidence, const TierThresholds& t) {
  t.validate();
  if (confidence >= t.core) return Tier::kCore;
  if (confidence >= t.high) return Tier::kHigh;
  if (confidence >= t.full) return Tier::kFull;
  return std::nullopt;
}

void EventGraph::validate() const {
  std::set<std::tuple<std::string, std::string, std::string>> seen;
  for (const auto& e : edges) {
    for (const auto* id : {&e.event1, &e.event2}) {
      if (!nodes.count(*id)) throw DataError("edge references unknown event '" + *id + "'");
    }
    if (!seen.emplace(e.event1, e.event2, e.relation).second) {
      throw DataError("duplicate edge (" + e.event1 + ", " + e.event2 + ", " + e.relation + ")");
    }
    if (score_edge(e.probability, e.frequency) != e.confidence) {
      throw DataError("edge (" + e.event1 + ", " + e.event2 +
                      ") confidence differs from probability x frequency");
    }
  }
}

void EventGraph::sort_edges() {
  std::sort(edges.begin(), edges.end(),
            [](const EnrichedEdge& a, const EnrichedEdge& b) { return edge_key(a) < edge_key(b); });
}

std::vector<EnrichedEdge> EventGraph::view(Tier tier) const {
  std::vector<EnrichedEdge> out;
  for (const auto& e : edges) {
    if (e.source == EdgeSource::kExplicit || static_cast<int>(e.tier) <= static_cast<int>(tier)) {
      out.push_back(e);
    }
  }
  return out;
}

std::vector<Candidate> dedup_candidates(std::span<const Candidate> candidates) {
  std::map<std::pair<std::string, std::string>, std::int64_t> merged;
  for (const auto& c : candidates) {
    if (c.frequency < 1) {
      throw DataError("candidate (" + c.event1 + ", " + c.event2 + ") has frequency < 1");
    }
    merged[{c.event1, c.event2}] += c.frequency;
  }
  std::vector<Candidate> out;
  out.reserve(merged.size());
  for (const auto& [pair, freq] : merged) out.push_back({pair.first, pair.second, freq});
  return out;
}

std::vector<Candidate> cooccurrence_candidates(std::istream& docs) {
  std::vector<Candidate> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(docs, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw DataError("docs:" + std::to_string(lineno) + ": expected 'doc_id<TAB>event ids'");
    }
    std::istringstream ids(line.substr(tab + 1));
    std::set<std::string> events{std::istream_iterator<std::string>(ids),
                                 std::istream_iterator<std::string>()};
    for (auto a = events.begin(); a != events.end(); ++a) {
      for (auto b = std::next(a); b != events.end(); ++b) out.push_back({*a, *b, 1});
    }
  }
  return dedup_candidates(out);
}

EnrichResult enrich_graph(const EventGraph& graph, std::span<const Candidate> candidates,
                          const PairClassifier& classify, const TierThresholds& thresholds) {
  thresholds.validate();
  graph.validate();
  EnrichResult result;
  result.graph = graph;
  const auto merged = dedup_candidates(candidates);
  if (merged.empty()) {
    result.graph.sort_edges();
    return result;
  }

  std::vector<std::pair<std::string, std::string>> texts;
  texts.reserve(merged.size());
  for (const auto& c : merged) {
    for (const auto* id : {&c.event1, &c.event2}) {
      if (!graph.nodes.count(*id)) {
        throw DataError("candidate references unknown event '" + *id + "'");
      }
    }
    texts.emplace_back(graph.nodes.at(c.event1), graph.nodes.at(c.event2));
  }
  const auto labels = classify(texts);
  if (labels.size() != merged.size()) throw DataError("classifier returned the wrong number of results");
  result.classified = merged.size();

  auto& edges = result.graph.edges;
  std::map<std::tuple<std::string, std::string, std::string>, std::size_t> index;
  std::map<std::pair<std::string, std::string>, std::vector<std::string>> explicit_rel;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    index[{edges[i].event1, edges[i].event2, edges[i].relation}] = i;
    if (edges[i].source == EdgeSource::kExplicit) {
      explicit_rel[{edges[i].event1, edges[i].event2}].push_back(edges[i].relation);
    }
  }

  for (std::size_t i = 0; i < merged.size(); ++i) {
    const Candidate& c = merged[i];
    const Classified& label = labels[i];
    const double confidence = score_edge(label.probability, c.frequency);
    const auto tier = assign_tier(confidence, thresholds);
    if (!tier) {
      ++result.rejected;
      continue;
    }
    EnrichedEdge edge{c.event1, c.event2, label.relation, label.probability,
                      c.frequency, confidence, *tier, EdgeSource::kImplicit};
    if (auto it = explicit_rel.find({c.event1, c.event2}); it != explicit_rel.end()) {
      const auto& rels = it->second;
      if (std::find(rels.begin(), rels.end(), label.relation) != rels.end()) continue;
      for (const auto& r : rels) {
        result.conflicts.push_back({c.event1, c.event2, r, label.relation, confidence});
      }
    }
    if (auto it = index.find({edge.event1, edge.event2, edge.relation}); it != index.end()) {
      edges[it->second] = edge;
    } else {
      index[{edge.event1, edge.event2, edge.relation}] = edges.size();
      edges.push_back(edge);
    }
  }
  result.graph.sort_edges();
  result.graph.validate();
  return result;
}

PairClassifier model_classifier(const MkpNet& net) {
  return [&net](std::span<const std::pair<std::string, std::string>> texts) {
    std::vector<Example> batch;
    batch.reserve(texts.size());
    for (const auto& [a, b] : texts) {
      InstancePair p;
      p.task = Task::kEre;
      p.arg1 = a;
      p.arg2 = b;
      batch.push_back(net.prepare(p));
    }
    std::vector<Classified> out;
    if (batch.empty()) return out;
    const auto& labels = net.specs().ere.fine_labels;
    for (const auto& pred : net.predict(batch, false)) {
      out.push_back({labels.at(static_cast<std::size_t>(pred.fine)),
                     static_cast<double>(pred.fine_probs.at(static_cast<std::size_t>(pred.fine)))});
    }
    return out;
  };
}

EventGraph load_nodes_tsv(const std::filesystem::path& path) {
  EventGraph g;
  read_tsv(path, "id", [&](const std::vector<std::string>& f, const std::string& where) {
    if (f.size() != 2) throw DataError(where + ": expected 2 columns (id, text)");
    check_field(f[0], "event id");
    if (!g.nodes.emplace(f[0], f[1]).second) throw DataError(where + ": duplicate event id '" + f[0] + "'");
  });
  return g;
}

void load_edges_tsv(const std::filesystem::path& path, EventGraph& graph) {
  read_tsv(path, "event1", [&](const std::vector<std::string>& f, const std::string& where) {
    EnrichedEdge e;
    if (f.size() == 3 || f.size() == 4) {
      e.event1 = f[0];
      e.event2 = f[1];
      e.relation = f[2];
      e.frequency = f.size() == 4 ? parse_number<std::int64_t>(f[3], where) : 1;
      e.probability = 1;
      e.confidence = score_edge(1.0, e.frequency);
      e.tier = Tier::kCore;
      e.source = EdgeSource::kExplicit;
    } else if (f.size() == 8) {
      e.event1 = f[0];
      e.event2 = f[1];
      e.relation = f[2];
      e.probability = parse_number<double>(f[3], where);
      e.frequency = parse_number<std::int64_t>(f[4], where);
      e.confidence = parse_number<double>(f[5], where);
      const auto tier = parse_tier(f[6]);
      const auto source = parse_source(f[7]);
      if (!tier || !source) throw DataError(where + ": bad tier or source");
      e.tier = *tier;
      e.source = *source;
    } else {
      throw DataError(where + ": expected 3, 4 or 8 columns");
    }
    graph.edges.push_back(std::move(e));
  });
  graph.sort_edges();
  graph.validate();
}

std::vector<Candidate> load_candidates_tsv(const std::filesystem::path& path) {
  std::vector<Candidate> out;
  read_tsv(path, "event1", [&](const std::vector<std::string>& f, const std::string& where) {
    if (f.size() != 2 && f.size() != 3) {
      throw DataError(where + ": expected (event1, event2[, frequency])");
    }
    out.push_back({f[0], f[1], f.size() == 3 ? parse_number<std::int64_t>(f[2], where) : 1});
  });
  return out;
}

void save_nodes_tsv(const std::filesystem::path& path, const EventGraph& graph) {
  auto out = open_out(path);
  out << kNodesHeader << '\n';
  for (const auto& [id, text] : graph.nodes) {
    if (text.find_first_of("\t\n\r") != std::string::npos) {
      throw DataError("event '" + id + "' text contains a tab or newline");
    }
    out << id << '\t' << text << '\n';
  }
}

void save_edges_tsv(const std::filesystem::path& path, std::span<const EnrichedEdge> edges) {
  auto out = open_out(path);
  out << kEdgesHeader << '\n';
  for (const auto& e : edges) {
    out << e.event1 << '\t' << e.event2 << '\t' << e.relation << '\t'
        << format_double(e.probability) << '\t' << e.frequency << '\t'
        << format_double(e.confidence) << '\t' << tier_name(e.tier) << '\t'
        << source_name(e.source) << '\n';
  }
}

void save_conflicts_tsv(const std::filesystem::path& path, std::span<const Conflict> conflicts) {
  auto out = open_out(path);
  out << kConflictsHeader << '\n';
  for (const auto& c : conflicts) {
    out << c.event1 << '\t' << c.event2 << '\t' << c.explicit_relation << '\t'
        << c.implicit_relation << '\t' << format_double(c.confidence) << '\n';
  }
}

MKP_NAMESPACE_END
