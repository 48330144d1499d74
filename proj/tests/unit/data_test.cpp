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
#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "mkp/data.hpp"
#include "test_util.hpp"

namespace mkp {
namespace {

InstancePair ere(std::string id, std::string fine, std::string coarse, std::optional<double> conf = {},
                 std::optional<std::string> conn = {}) {
  InstancePair p;
  p.id = std::move(id);
  p.task = Task::kEre;
  p.arg1 = "PER orders two hamburgers";
  p.arg2 = "PER is so hungry";
  p.fine_label = std::move(fine);
  p.coarse_label = std::move(coarse);
  p.confidence = conf;
  p.connective = std::move(conn);
  return p;
}

TEST(TaskSpec, DefaultsAreConsistent) {
  const TaskSpecs s = default_task_specs();
  EXPECT_EQ(s.ere.size(), 14u);
  EXPECT_EQ(s.drr.size(), 11u);
  EXPECT_NO_THROW(s.ere.validate());
  EXPECT_EQ(s.ere.parent(*s.ere.fine_id("Reason")), CoarseLabel::kContingency);
  EXPECT_EQ(s.drr.parent(*s.drr.fine_id("Synchrony")), CoarseLabel::kTemporal);
  const TaskSpec back = TaskSpec::from_json(s.drr.to_json());
  EXPECT_EQ(back.fine_labels, s.drr.fine_labels);
  EXPECT_EQ(back.parents, s.drr.parents);
}

TEST(TaskSpec, RejectsDuplicatesAndEmpty) {
  TaskSpec t;
  EXPECT_THROW(t.validate(), DataError);
  t.fine_labels = {"A", "A"};
  t.parents = {CoarseLabel::kTemporal, CoarseLabel::kTemporal};
  EXPECT_THROW(t.validate(), DataError);
}

TEST(Jsonl, EmptyFileGivesEmptyList) {
  std::istringstream in("");
  EXPECT_TRUE(read_jsonl(in, default_task_specs()).empty());
}

TEST(Jsonl, RoundTripKeepsAllFieldsAndUnknownOnes) {
  const auto dir = testing::scratch_dir("jsonl_roundtrip");
  auto a = ere("a1", "Reason", "Contingency", 4.5, "because");
  a.extra["source_doc"] = "d17";
  const auto b = ere("a2", "Contrast", "Comparison");
  const std::vector<InstancePair> pairs{a, b};
  save_jsonl(dir / "x.jsonl", pairs);
  const auto back = load_jsonl(dir / "x.jsonl", default_task_specs());
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0], a);
  EXPECT_EQ(back[1], b);
}

TEST(Jsonl, ErrorsNameLineAndLabel) {
  std::istringstream in(
      "{\"id\":\"1\",\"task\":\"ERE\",\"arg1\":\"a\",\"arg2\":\"b\",\"fine_label\":\"Reason\",\"coarse_label\":\"Contingency\"}\n"
      "{\"id\":\"2\",\"task\":\"ERE\",\"arg1\":\"a\",\"arg2\":\"b\",\"fine_label\":\"Bogus\",\"coarse_label\":\"Contingency\"}\n");
  try {
    read_jsonl(in, default_task_specs(), "f.jsonl");
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("f.jsonl:2"), std::string::npos) << msg;
    EXPECT_NE(msg.find("Bogus"), std::string::npos) << msg;
  }
  std::istringstream bad_json("{not json\n");
  EXPECT_THROW(read_jsonl(bad_json, default_task_specs()), DataError);
  std::istringstream bad_parent(
      "{\"id\":\"1\",\"task\":\"ERE\",\"arg1\":\"a\",\"arg2\":\"b\",\"fine_label\":\"Reason\",\"coarse_label\":\"Temporal\"}\n");
  EXPECT_THROW(read_jsonl(bad_parent, default_task_specs()), DataError);
}

TEST(StripConnectives, FigureOneExample) {
  const std::vector<InstancePair> in{ere("x", "Reason", "Contingency", 2.0, "because")};
  const auto out = strip_connectives(in);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].arg1, in[0].arg1);
  EXPECT_EQ(out[0].arg2, in[0].arg2);
  EXPECT_EQ(out[0].fine_label, "Reason");
  EXPECT_EQ(out[0].connective, std::string());
  EXPECT_EQ(strip_connectives(out), out);
}

TEST(StripConnectives, MissingConnectiveIsAnError) {
  const std::vector<InstancePair> in{ere("x", "Reason", "Contingency")};
  EXPECT_THROW(strip_connectives(in), DataError);
}

TEST(CapPerCategory, Examples) {
  const std::vector<InstancePair> three{ere("a", "Reason", "Contingency", 3), ere("b", "Reason", "Contingency", 5),
                                        ere("c", "Reason", "Contingency", 4), ere("d", "Result", "Contingency", 1)};
  const auto capped = cap_per_category(three, 2);
  ASSERT_EQ(capped.size(), 3u);
  EXPECT_EQ(capped[0].id, "b");
  EXPECT_EQ(capped[1].id, "c");
  EXPECT_EQ(capped[2].id, "d");
  EXPECT_EQ(cap_per_category(three, 5).size(), 4u);
}

TEST(CapPerCategory, TiesBrokenByIdAndMissingConfidenceRejected) {
  const std::vector<InstancePair> tied{ere("z", "Reason", "Contingency", 1), ere("a", "Reason", "Contingency", 1)};
  const auto kept = cap_per_category(tied, 1);
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(kept[0].id, "a");
  const std::vector<InstancePair> missing{ere("a", "Reason", "Contingency")};
  EXPECT_THROW(cap_per_category(missing, 1), DataError);
}

TEST(CapPerCategory, CommutesWithStripConnectives) {
  Rng rng(5);
  const auto& labels = default_ere_spec();
  std::vector<InstancePair> pairs;
  for (int i = 0; i < 300; ++i) {
    const std::size_t l = rng.uniform_index(labels.size());
    pairs.push_back(ere("i" + std::to_string(i), labels.fine_labels[l],
                        std::string(coarse_name(labels.parents[l])),
                        static_cast<double>(rng.uniform_index(20)), "so"));
  }
  EXPECT_EQ(strip_connectives(cap_per_category(pairs, 7)), cap_per_category(strip_connectives(pairs), 7));
}

TEST(StratifiedSplit, DisjointSizedAndStratified) {
  const auto corpus = synth_generate(testing::tiny_synth());
  const auto& all = corpus.ere.train;
  const Splits s = stratified_split(all, 20, 30, 1);
  EXPECT_EQ(s.dev.size(), 20u);
  EXPECT_EQ(s.test.size(), 30u);
  EXPECT_EQ(s.train.size(), all.size() - 50);
  std::set<std::string> ids;
  for (const auto* part : {&s.train, &s.dev, &s.test}) {
    for (const auto& p : *part) EXPECT_TRUE(ids.insert(p.id).second);
  }
  const Splits again = stratified_split(all, 20, 30, 1);
  EXPECT_EQ(again.dev, s.dev);
  EXPECT_THROW(stratified_split(all, 100, 100, 1), DataError);
}

TEST(Manifest, SaveLoadAndCountCheck) {
  const auto dir = testing::scratch_dir("manifest");
  const auto corpus = synth_generate(testing::tiny_synth());
  const auto path = write_corpus(dir, corpus, testing::tiny_synth());
  const DatasetManifest m = load_manifest(path);
  EXPECT_EQ(m.splits.at("ere_train").count, corpus.ere.train.size());
  EXPECT_EQ(load_split(path, m, "drr_dev"), corpus.drr.dev);
  // A truncated split file no longer matches the recorded count.
  testing::write_text(dir / "ere_dev.jsonl", "");
  EXPECT_THROW(load_manifest(path), DataError);
}

}  // namespace
}  // namespace mkp
