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


#include <cmath>

#include "test_util.hpp"

namespace ridgesvm {
namespace {

using testing::hand_state;

/// x = ±1 with labels ±1, linear kernel, ρ = 0.5, α = 0.4 each, b = 0.
SvmState toy_model() {
  return hand_state<Task::classification>({{0, {1.0}, 1.0}, {1, {-1.0}, -1.0}}, {0.4, 0.4}, 0.0,
                                          {Region::S, Region::S}, KernelSpec::linear(0.5), Hyperparams{1.0, 0.0});
}

TEST(DecisionValue, EmptyModelIsBias) {
  SvmState s = hand_state<Task::classification>({{0, {1.0}, 1.0}, {1, {-1.0}, -1.0}}, {0.0, 0.0}, 0.3,
                                                {Region::O, Region::O}, KernelSpec::rbf(1.0, 0.5), {});
  const std::vector<double> x{0.25};
  EXPECT_DOUBLE_EQ(decision_value(x, s), 0.3);
}

TEST(DecisionValue, ToyTestPoint) {
  const std::vector<double> x{1.0};
  EXPECT_NEAR(decision_value(x, toy_model()), 0.8, 1e-15);
}

TEST(DecisionValue, ToyTrainingIndexAddsRidgeSelfTerm) {
  const SvmState s = toy_model();
  EXPECT_NEAR(decision_value_at(s, 0), 1.0, 1e-15);
  EXPECT_NEAR(s.samples[0].target * decision_value_at(s, 0), 1.0, 1e-15);
}

TEST(Margins, EmptyModel) {
  SvmState s = hand_state<Task::classification>({{0, {1.0}, 1.0}, {1, {-1.0}, -1.0}, {2, {3.0}, 1.0}},
                                                {0.0, 0.0, 0.0}, 0.0, {Region::O, Region::O, Region::O},
                                                KernelSpec::linear(0.5), {});
  for (double g : compute_margins_svm(s)) EXPECT_DOUBLE_EQ(g, -1.0);
}

TEST(Margins, ToyModelOnMargin) {
  for (double g : compute_margins_svm(toy_model())) EXPECT_NEAR(g, 0.0, 1e-15);
}

TEST(Margins, LinearInBias) {
  SvmState s = toy_model();
  const auto before = compute_margins_svm(s);
  s.bias += 0.37;
  const auto after = compute_margins_svm(s);
  for (std::size_t i = 0; i < before.size(); ++i) EXPECT_NEAR(after[i] - before[i], s.samples[i].target * 0.37, 1e-15);
}

TEST(ClassifySvm, Examples) {
  const double C = 1.0;
  auto one = [&](double a, double g) {
    const std::vector<double> av{a};
    const std::vector<double> gv{g};
    return classify_regions_svm(av, gv, C).front();
  };
  EXPECT_EQ(one(0.0, 0.5), Region::O);
  EXPECT_EQ(one(C, -0.2), Region::B);
  EXPECT_EQ(one(C / 2, 0.0), Region::S);
}

TEST(ClassifySvm, InteriorOffMarginIsInconsistent) {
  const std::vector<double> a{0.5};
  const std::vector<double> g{0.3};
  EXPECT_ERRC(classify_regions_svm(a, g, 1.0), Errc::inconsistent_state);
}

TEST(ClassifySvr, Examples) {
  const double C = 1.0;
  const double eps = 0.2;
  auto one = [&](double t, double f) {
    const std::vector<double> tv{t};
    const std::vector<double> fv{f};
    return classify_regions_svr(tv, fv, C, eps).front();
  };
  EXPECT_EQ(one(0.0, 0.1), Region::O);
  EXPECT_EQ(one(0.0, -0.1), Region::O);
  EXPECT_EQ(one(-C, 0.5), Region::B);
  EXPECT_EQ(one(0.3, -0.2), Region::S);
}

TEST(Validate, FreshBatchModelIsClean) {
  const auto data = two_gaussians(60, 4);
  const SvmState s = train_svm_batch(data, KernelSpec::rbf(1.0, 0.5), Hyperparams{1.0, 0.0});
  const auto rep = validate(s);
  EXPECT_TRUE(rep.ok()) << rep.summary();
}

TEST(Validate, UnbalancedMultipliers) {
  // Far-apart samples decouple the Gram matrix; both sit on their margins but
  // Σ yα = 0.1.
  const double a = 2.15 / 3.0;
  SvmState s = hand_state<Task::classification>({{0, {0.0}, 1.0}, {1, {100.0}, -1.0}}, {a, a - 0.1}, 1.0 - 1.5 * a,
                                                {Region::S, Region::S}, KernelSpec::rbf(1.0, 0.5), {});
  const auto rep = validate(s);
  ASSERT_EQ(rep.violations.size(), 1u) << rep.summary();
  EXPECT_NE(rep.violations[0].invariant.find("orthogonal"), std::string::npos);
  EXPECT_NEAR(rep.violations[0].magnitude, 0.1, 1e-12);
}

TEST(Validate, MultiplierAboveC) {
  // Orthogonal linear features; norms chosen so every margin is exactly zero at b = 0.
  SvmState s = hand_state<Task::classification>(
      {{0, {std::sqrt(1.0 / 6.0), 0.0, 0.0}, 1.0},
       {1, {0.0, std::sqrt(5.0 / 6.0), 0.0}, -1.0},
       {2, {0.0, 0.0, std::sqrt(5.0 / 6.0)}, -1.0}},
      {1.5, 0.75, 0.75}, 0.0, {Region::S, Region::S, Region::S}, KernelSpec::linear(0.5), Hyperparams{1.0, 0.0});
  const auto rep = validate(s);
  ASSERT_EQ(rep.violations.size(), 1u) << rep.summary();
  EXPECT_NE(rep.violations[0].invariant.find("box"), std::string::npos);
  EXPECT_EQ(rep.violations[0].index, 0u);
  EXPECT_NEAR(rep.violations[0].magnitude, 0.5, 1e-12);
}

TEST(Validate, WrongRegionTag) {
  SvmState s = toy_model();
  s.partition[0] = Region::O;
  EXPECT_FALSE(validate(s).ok());
}

TEST(Validate, StaleResidualCache) {
  SvmState s = toy_model();
  s.residuals[1] += 0.01;
  const auto rep = validate(s);
  ASSERT_FALSE(rep.ok());
  EXPECT_NE(rep.summary().find("drift"), std::string::npos);
}

TEST(Validate, SvrBatchModelIsClean) {
  const auto data = noisy_sine(50, 2);
  const SvrState s = train_svr_batch(data, KernelSpec::rbf(1.0, 0.5), Hyperparams{1.0, 0.2});
  const auto rep = validate(s);
  EXPECT_TRUE(rep.ok()) << rep.summary();
  EXPECT_LE(kkt_residual(s, s.residuals), 1e-6);
}

}  // namespace
}  // namespace ridgesvm
