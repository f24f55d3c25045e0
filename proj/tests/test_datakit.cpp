// Copyright 2026 The RidgeSVM Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "test_util.hpp"

namespace ridgesvm {
namespace {

std::vector<Sample> parse(const std::string& text, DatasetSpec spec = {}) {
  std::istringstream in(text);
  return parse_csv(in, spec);
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("ridgesvm_test_" + name);
}

TEST(ParseCsv, LabelLastZeroOneMapped) {
  const auto s = parse("1.0,2.0,1\n3.0,4.0,0\n");
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].features, (FeatureVector{1.0, 2.0}));
  EXPECT_EQ(s[0].target, 1.0);
  EXPECT_EQ(s[1].target, -1.0);
  EXPECT_EQ(s[1].id, 1u);
}

TEST(ParseCsv, HeaderSkipped) {
  DatasetSpec spec;
  spec.has_header = true;
  const auto s = parse("x,y,label\n1.0,2.0,1\n3.0,4.0,-1\n", spec);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[1].target, -1.0);
}

TEST(ParseCsv, LabelColumnChosen) {
  DatasetSpec spec;
  spec.label_column = 0;
  spec.task = Task::regression;
  const auto s = parse("0.5,1,2\n-0.5,3,4\n", spec);
  EXPECT_EQ(s[0].target, 0.5);
  EXPECT_EQ(s[1].features, (FeatureVector{3.0, 4.0}));
}

TEST(ParseCsv, NonNumericCellNamesPosition) {
  try {
    parse("1.0,2.0,1\n3.0,abc,0\n");
    FAIL() << "expected ParseError";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::parse_error);
    const std::string what = e.what();
    EXPECT_NE(what.find("line 2"), std::string::npos) << what;
    EXPECT_NE(what.find("column 2"), std::string::npos) << what;
  }
}

TEST(ParseCsv, RaggedRow) { EXPECT_ERRC(parse("1,2,1\n3,0\n"), Errc::parse_error); }

TEST(ParseCsv, LabelDomain) {
  EXPECT_ERRC(parse("1,2\n3,2\n"), Errc::label_domain_error);
  EXPECT_ERRC(parse("1,0\n3,-1\n"), Errc::label_domain_error);
}

TEST(ParseCsv, RegressionKeepsRealTargets) {
  DatasetSpec spec;
  spec.task = Task::regression;
  const auto s = parse("1,2.5\n3,-7.25\n", spec);
  EXPECT_EQ(s[1].target, -7.25);
}

TEST(LoadCsv, MissingFile) {
  DatasetSpec spec;
  spec.path = "/nonexistent/ridgesvm.csv";
  EXPECT_ERRC(load_csv(spec), Errc::parse_error);
}

TEST(Standardizer, PopulationStd) {
  const std::vector<Sample> train{{0, {0.0}, 1.0}, {1, {2.0}, -1.0}};
  const auto st = fit_standardizer(train, Task::classification);
  EXPECT_DOUBLE_EQ(st.mean[0], 1.0);
  EXPECT_DOUBLE_EQ(st.stddev[0], 1.0);
  EXPECT_DOUBLE_EQ(st.apply(train[0]).features[0], -1.0);
  EXPECT_DOUBLE_EQ(st.apply(train[1]).features[0], 1.0);
  EXPECT_FALSE(st.label_mean.has_value());
}

TEST(Standardizer, RefitOnTransformedIsIdentity) {
  const auto data = two_gaussians(50, 3);
  const auto st = fit_standardizer(data, Task::classification);
  const auto once = st.apply(data);
  const auto again = fit_standardizer(once, Task::classification);
  for (std::size_t j = 0; j < again.mean.size(); ++j) {
    EXPECT_NEAR(again.mean[j], 0.0, 1e-12);
    EXPECT_NEAR(again.stddev[j], 1.0, 1e-12);
  }
  const auto id = StandardizationStats::identity(2);
  EXPECT_EQ(id.apply(once[7]).features, once[7].features);
}

TEST(Standardizer, TestRowsUseTrainStats) {
  const std::vector<Sample> train{{0, {0.0}, 1.0}, {1, {2.0}, -1.0}};
  const std::vector<Sample> test{{5, {10.0}, 1.0}, {6, {12.0}, -1.0}};
  const auto st = fit_standardizer(train, Task::classification);
  EXPECT_DOUBLE_EQ(st.apply(test[0]).features[0], 9.0);
  EXPECT_DOUBLE_EQ(st.apply(test[1]).features[0], 11.0);
}

TEST(Standardizer, RegressionLabels) {
  const std::vector<Sample> train{{0, {0.0}, 1.0}, {1, {2.0}, 3.0}};
  const auto st = fit_standardizer(train, Task::regression);
  ASSERT_TRUE(st.label_mean.has_value());
  EXPECT_DOUBLE_EQ(*st.label_mean, 2.0);
  EXPECT_DOUBLE_EQ(st.apply(train[1]).target, 1.0);
}

TEST(Standardizer, ConstantColumn) {
  const std::vector<Sample> train{{0, {1.0, 0.0}, 1.0}, {1, {1.0, 2.0}, -1.0}};
  EXPECT_ERRC(fit_standardizer(train, Task::classification), Errc::constant_column);
}

TEST(Split, Sizes) {
  const auto r = split(two_gaussians(100, 1), SplitPlan{});
  EXPECT_EQ(r.train.size(), 80u);
  EXPECT_EQ(r.incremental_pool.size(), 10u);
  EXPECT_EQ(r.test.size(), 10u);
}

std::vector<SampleId> ids_of(const std::vector<Sample>& v) {
  std::vector<SampleId> out;
  for (const auto& s : v) out.push_back(s.id);
  return out;
}

TEST(Split, SameSeedSameSplit) {
  SplitPlan plan;
  plan.seed = 42;
  const auto a = split(two_gaussians(100, 1), plan);
  const auto b = split(two_gaussians(100, 1), plan);
  EXPECT_EQ(ids_of(a.train), ids_of(b.train));
  EXPECT_EQ(ids_of(a.test), ids_of(b.test));
  plan.seed = 43;
  const auto c = split(two_gaussians(100, 1), plan);
  EXPECT_NE(ids_of(a.train), ids_of(c.train));
}

TEST(Split, DisjointAndCovering) {
  const auto r = split(two_gaussians(100, 1), SplitPlan{});
  std::set<SampleId> all;
  for (const auto* part : {&r.train, &r.incremental_pool, &r.test}) {
    for (const auto& s : *part) EXPECT_TRUE(all.insert(s.id).second);
  }
  EXPECT_EQ(all.size(), 100u);
}

TEST(Split, BadFractions) {
  SplitPlan plan;
  plan.test_fraction = 0.3;
  EXPECT_ERRC(split(two_gaussians(10, 1), plan), Errc::invalid_hyperparams);
}

TEST(ScheduleRounds, FiveRoundsDisjointAdds) {
  const auto pool = two_gaussians(30, 2, 0.8, 2, 100);
  std::vector<SampleId> model;
  for (SampleId i = 0; i < 20; ++i) model.push_back(i);
  const auto batches = schedule_rounds(pool, model, RoundSchedule{5, 6, 2, 7});
  ASSERT_EQ(batches.size(), 5u);
  std::set<SampleId> added;
  std::set<SampleId> current(model.begin(), model.end());
  for (const auto& b : batches) {
    EXPECT_EQ(b.add.size(), 6u);
    EXPECT_EQ(b.remove.size(), 2u);
    for (auto id : b.remove) EXPECT_EQ(current.erase(id), 1u) << "removed id must be in the model";
    for (const auto& s : b.add) {
      EXPECT_TRUE(added.insert(s.id).second);
      current.insert(s.id);
    }
  }
}

TEST(ScheduleRounds, Deterministic) {
  const auto pool = two_gaussians(30, 2, 0.8, 2, 100);
  std::vector<SampleId> model{0, 1, 2, 3, 4, 5, 6, 7};
  const auto a = schedule_rounds(pool, model, RoundSchedule{3, 6, 2, 11});
  const auto b = schedule_rounds(pool, model, RoundSchedule{3, 6, 2, 11});
  for (std::size_t r = 0; r < a.size(); ++r) EXPECT_EQ(a[r].remove, b[r].remove);
}

TEST(ScheduleRounds, PoolExhausted) {
  const auto pool = two_gaussians(10, 2);
  EXPECT_ERRC(schedule_rounds(pool, {1, 2, 3}, RoundSchedule{2, 6, 2, 0}), Errc::pool_exhausted);
  EXPECT_ERRC(schedule_rounds(pool, {1}, RoundSchedule{1, 1, 2, 0}), Errc::pool_exhausted);
}

TEST(ModelFile, RoundTripPredictions) {
  const SvmState s = train_svm_batch({{0, {1.0}, 1.0}, {1, {-1.0}, -1.0}}, KernelSpec::linear(0.5), {});
  const auto path = temp_path("roundtrip.json");
  save_model(s, path, StandardizationStats::identity(1));
  const ModelDocument doc = load_model(path);
  ASSERT_TRUE(doc.standardizer.has_value());
  const SvmState back = to_state<Task::classification>(doc);
  for (double x : {-2.0, -0.3, 0.0, 1.0, 5.0}) {
    const std::vector<double> p{x};
    EXPECT_EQ(decision_value(p, back), decision_value(p, s));
  }
  EXPECT_EQ(back.multipliers, s.multipliers);
  EXPECT_EQ(back.partition, s.partition);
  EXPECT_TRUE(validate(back).ok());
  std::filesystem::remove(path);
}

TEST(ModelFile, RoundTripBitExactAfterTraining) {
  const SvrState s = train_svr_batch(noisy_sine(40, 5), KernelSpec::rbf(1.0, 0.5), Hyperparams{1.0, 0.2});
  const auto doc = from_json(nlohmann::json::parse(to_json(to_document(s)).dump()));
  EXPECT_EQ(doc.multipliers, s.multipliers);
  EXPECT_EQ(doc.bias, s.bias);
  EXPECT_ERRC(to_state<Task::classification>(doc), Errc::corrupt_file);
}

TEST(ModelFile, UnknownVersion) {
  const SvmState s = train_svm_batch({{0, {1.0}, 1.0}, {1, {-1.0}, -1.0}}, KernelSpec::linear(0.5), {});
  auto j = to_json(to_document(s));
  j["format_version"] = 99;
  EXPECT_ERRC(from_json(j), Errc::schema_version_mismatch);
}

TEST(ModelFile, TruncatedFile) {
  const SvmState s = train_svm_batch({{0, {1.0}, 1.0}, {1, {-1.0}, -1.0}}, KernelSpec::linear(0.5), {});
  const std::string text = to_json(to_document(s)).dump();
  const auto path = temp_path("truncated.json");
  {
    std::ofstream out(path);
    out << text.substr(0, text.size() / 2);
  }
  EXPECT_ERRC(load_model(path), Errc::corrupt_file);
  std::filesystem::remove(path);
}

TEST(ModelFile, MissingField) {
  const SvmState s = train_svm_batch({{0, {1.0}, 1.0}, {1, {-1.0}, -1.0}}, KernelSpec::linear(0.5), {});
  auto j = to_json(to_document(s));
  j.erase("multipliers");
  EXPECT_ERRC(from_json(j), Errc::corrupt_file);
}

}  // namespace
}  // namespace ridgesvm
