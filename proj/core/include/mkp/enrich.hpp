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
#ifndef MKP_ENRICH_HPP_
#define MKP_ENRICH_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mkp/model.hpp"

MKP_NAMESPACE_BEGIN

enum class Tier { kCore, kHigh, kFull };
enum class EdgeSource { kExplicit, kImplicit };

std::string_view tier_name(Tier tier);
std::optional<Tier> parse_tier(std::string_view name);
std::string_view source_name(EdgeSource source);
std::optional<EdgeSource> parse_source(std::string_view name);

struct TierThresholds {
  double core = 3;
  double high = 2;
  double full = 1;

  // Strictly decreasing and positive.
  void validate() const;
};

// prob * freq. prob must lie in (0, 1] and freq be >= 1.
double score_edge(double prob, std::int64_t freq);
// Highest tier whose threshold the confidence reaches (inclusive), or
// nullopt when it is below the full threshold.
std::optional<Tier> assign_tier(double confidence, const TierThresholds& t);

struct EnrichedEdge {
  std::string event1;
  std::string event2;
  std::string relation;
  double probability = 1;
  std::int64_t frequency = 1;
  double confidence = 1;
  Tier tier = Tier::kCore;
  EdgeSource source = EdgeSource::kExplicit;

  bool operator==(const EnrichedEdge&) const = default;
};

struct EventGraph {
  std::map<std::string, std::string> nodes;  // id -> text
  std::vector<EnrichedEdge> edges;           // sorted by (event1, event2, relation)

  // Endpoints exist, (pair, relation) unique, confidence arithmetic exact.
  void validate() const;
  void sort_edges();
  // Edges at or above `tier`; explicit edges are always kept.
  std::vector<EnrichedEdge> view(Tier tier) const;
  bool operator==(const EventGraph&) const = default;
};

struct Candidate {
  std::string event1;
  std::string event2;
  std::int64_t frequency = 1;
};

struct Classified {
  std::string relation;
  double probability = 0;
};

// Classifies (text1, text2) pairs; one result per input, in order.
using PairClassifier =
    std::function<std::vector<Classified>(std::span<const std::pair<std::string, std::string>>)>;

struct Conflict {
  std::string event1;
  std::string event2;
  std::string explicit_relation;
  std::string implicit_relation;
  double confidence = 0;

  bool operator==(const Conflict&) const = default;
};

struct EnrichResult {
  EventGraph graph;
  std::vector<Conflict> conflicts;
  std::size_t classified = 0;
  std::size_t rejected = 0;
};

// Merges candidates on the ordered pair, summing frequencies; output is
// sorted by (event1, event2).
std::vector<Candidate> dedup_candidates(std::span<const Candidate> candidates);

// All unordered within-document pairs from lines "doc_id<TAB>ev1 ev2 ...".
// Each pair is emitted with its ids in ascending order; frequency counts
// the documents in which the pair co-occurs.
std::vector<Candidate> cooccurrence_candidates(std::istream& docs);

// Classifies candidates, scores and tiers them, and merges the accepted
// implicit edges into `graph`. An implicit edge never replaces an explicit
// edge with the same relation; a different relation on an explicit pair is
// kept and reported as a conflict.
EnrichResult enrich_graph(const EventGraph& graph, std::span<const Candidate> candidates,
                          const PairClassifier& classify, const TierThresholds& thresholds);

// ERE classifier backed by a trained model: argmax label with its softmax
// probability.
PairClassifier model_classifier(const MkpNet& net);

// TSV I/O. Every file carries a header row.
EventGraph load_nodes_tsv(const std::filesystem::path& path);
// Explicit edge files may hold just (event1, event2, relation[, frequency]);
// full 8-column rows are read verbatim.
void load_edges_tsv(const std::filesystem::path& path, EventGraph& graph);
std::vector<Candidate> load_candidates_tsv(const std::filesystem::path& path);
void save_nodes_tsv(const std::filesystem::path& path, const EventGraph& graph);
void save_edges_tsv(const std::filesystem::path& path, std::span<const EnrichedEdge> edges);
void save_conflicts_tsv(const std::filesystem::path& path, std::span<const Conflict> conflicts);

MKP_NAMESPACE_END

#endif  // MKP_ENRICH_HPP_
