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


#include "test_util.hpp"

namespace ridgesvm {
namespace {

std::vector<Sample> toy_pair() { return {{0, {1.0}, 1.0}, {1, {-1.0}, -1.0}}; }

TEST(TrainSvmBatch, TwoPointClosedForm) {
  const SvmState s = train_svm_batch(toy_pair(), KernelSpec::linear(0.5), Hyperparams{1.0, 0.0});
  EXPECT_NEAR(s.multipliers[0], 0.4, 1e-9);
  EXPECT_NEAR(s.multipliers[1], 0.4, 1e-9);
  EXPECT_NEAR(s.bias, 0.0, 1e-9);
  EXPECT_EQ(s.partition[0], Region::S);
  EXPECT_EQ(s.partition[1], Region::S);
}

TEST(TrainSvmBatch, BoxClamped) {
  const SvmState s = train_svm_batch(toy_pair(), KernelSpec::linear(0.5), Hyperparams{0.3, 0.0});
  EXPECT_NEAR(s.multipliers[0], 0.3, 1e-12);
  EXPECT_NEAR(s.multipliers[1], 0.3, 1e-12);
  EXPECT_NEAR(s.bias, 0.0, 1e-9);
  EXPECT_EQ(s.partition[0], Region::B);
  EXPECT_EQ(s.partition[1], Region::B);
  EXPECT_TRUE(validate(s).ok()) << validate(s).summary();
}

TEST(TrainSvmBatch, SymmetricPairs) {
  std::vector<Sample> data{{0, {1.0, 0.5}, 1.0}, {1, {-1.0, -0.5}, -1.0}, {2, {2.0, -1.0}, 1.0}, {3, {-2.0, 1.0}, -1.0}};
  const SvmState s = train_svm_batch(data, KernelSpec::rbf(1.0, 0.5), Hyperparams{1.0, 0.0});
  EXPECT_NEAR(s.bias, 0.0, 1e-8);
  EXPECT_NEAR(s.multipliers[0], s.multipliers[1], 1e-8);
  EXPECT_NEAR(s.multipliers[2], s.multipliers[3], 1e-8);
}

TEST(TrainSvmBatch, SingleClass) {
  std::vector<Sample> data{{0, {1.0}, 1.0}, {1, {2.0}, 1.0}};
  EXPECT_ERRC(train_svm_batch(data, KernelSpec::linear(0.5), {}), Errc::single_class_input);
}

TEST(TrainSvmBatch, BadLabel) {
  std::vector<Sample> data{{0, {1.0}, 1.0}, {1, {2.0}, 0.5}};
  EXPECT_ERRC(train_svm_batch(data, KernelSpec::linear(0.5), {}), Errc::label_domain_error);
}

TEST(TrainSvmBatch, DualObjectiveBeatsFeasiblePoints) {
  const auto data = two_gaussians(40, 9);
  const Hyperparams h{1.0, 0.0};
  const SvmState s = train_svm_batch(data, KernelSpec::rbf(1.0, 0.5), h);
  const double best = dual_objective(s);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    SvmState t = s;
    double pos = 0.0;
    double neg = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      t.multipliers[i] = u(rng) * h.C;
      (t.samples[i].target > 0 ? pos : neg) += t.multipliers[i];
    }
    // Scale the heavier class down so that Σ yα = 0 within the box.
    const double scale_pos = pos > neg ? neg / pos : 1.0;
    const double scale_neg = neg > pos ? pos / neg : 1.0;
    for (std::size_t i = 0; i < t.size(); ++i) t.multipliers[i] *= t.samples[i].target > 0 ? scale_pos : scale_neg;
    EXPECT_LE(dual_objective(t), best + 1e-9);
  }
}

TEST(TrainSvmBatch, Deterministic) {
  const auto data = two_gaussians(80, 12);
  const SvmState a = train_svm_batch(data, KernelSpec::rbf(1.0, 0.5), {});
  const SvmState b = train_svm_batch(data, KernelSpec::rbf(1.0, 0.5), {});
  EXPECT_EQ(a.multipliers, b.multipliers);
  EXPECT_EQ(a.bias, b.bias);
}

TEST(TrainSvrBatch, ConstantTargets) {
  std::vector<Sample> data;
  for (SampleId i = 0; i < 6; ++i) data.push_back({i, {static_cast<double>(i)}, 0.7});
  const SvrState s = train_svr_batch(data, KernelSpec::rbf(1.0, 0.5), Hyperparams{1.0, 0.1});
  for (double t : s.multipliers) EXPECT_EQ(t, 0.0);
  EXPECT_NEAR(s.bias, 0.7, 1e-9);
}

TEST(TrainSvrBatch, TwoPointClosedForm) {
  // θ = (t, −t) reduces the dual to 2t − 2.5t², so t = 0.4.
  const SvrState s = train_svr_batch(toy_pair(), KernelSpec::linear(0.5), Hyperparams{1.0, 0.0});
  EXPECT_NEAR(s.multipliers[0], 0.4, 1e-9);
  EXPECT_NEAR(s.multipliers[1], -0.4, 1e-9);
  EXPECT_NEAR(s.bias, 0.0, 1e-9);
  for (double r : s.residuals) EXPECT_NEAR(r, 0.0, 1e-9);
}

TEST(TrainSvrBatch, WideTubeSwallowsData) {
  const auto data = noisy_sine(30, 5);
  const SvrState s = train_svr_batch(data, KernelSpec::rbf(1.0, 0.5), Hyperparams{1.0, 5.0});
  for (double t : s.multipliers) EXPECT_EQ(t, 0.0);
  EXPECT_TRUE(validate(s).ok()) << validate(s).summary();
}

TEST(TrainSvrBatch, KktAndObjective) {
  const auto data = noisy_sine(60, 8);
  const SvrState s = train_svr_batch(data, KernelSpec::rbf(1.0, 0.5), Hyperparams{1.0, 0.2});
  EXPECT_TRUE(validate(s).ok()) << validate(s).summary();
  const double best = dual_objective(s);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0.0, 0.05);
  for (int trial = 0; trial < 100; ++trial) {
    // Pairwise moves keep Σθ = 0.
    SvrState t = s;
    for (std::size_t i = 0; i + 1 < t.size(); i += 2) {
      const double d = g(rng);
      const double lo = std::max(-1.0 - t.multipliers[i], t.multipliers[i + 1] - 1.0);
      const double hi = std::min(1.0 - t.multipliers[i], t.multipliers[i + 1] + 1.0);
      const double step = std::clamp(d, lo, hi);
      t.multipliers[i] += step;
      t.multipliers[i + 1] -= step;
    }
    EXPECT_LE(dual_objective(t), best + 1e-9);
  }
}

}  // namespace
}  // namespace ridgesvm
