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

using testing::hand_state;

const KernelSpec kRbf = KernelSpec::rbf(1.0, 0.5);
const SolverConfig kTight{1e-10};

/// S = {s: y=+1, Q_S=[[2]]} and an outside sample d (y=−1, Q_sd=−0.5) at α = 0.
SvmState pair_state() {
  return hand_state<Task::classification>({{0, {1.0}, 1.0}, {1, {0.5}, -1.0}}, {0.5, 0.0}, 0.0,
                                          {Region::S, Region::O}, KernelSpec::linear(1.0), Hyperparams{1.0, 0.0});
}

/// Residuals after moving every S member and mover by h times the direction.
template <Task T>
std::vector<double> residuals_after(DualState<T> s, const PathState& path, const PathDirections& dir, double h) {
  for (std::size_t a = 0; a < s.active.members.size(); ++a) {
    s.multipliers[*s.position_of(s.active.members[a])] += h * dir.dx_s[a];
  }
  for (std::size_t m = 0; m < path.movers.size(); ++m) {
    s.multipliers[*s.position_of(path.movers[m].id)] += h * dir.dx_movers[m];
  }
  s.bias += h * dir.db;
  return compute_residuals(s);
}

template <Task T>
void expect_phi_matches_finite_difference(DualState<T>& s, const PathState& path) {
  const PathDirections dir = path_direction(s, path);
  const auto phi = sensitivity_phi(s, path, dir);
  const double h = 1e-6;
  const auto r0 = compute_residuals(s);
  const auto r1 = residuals_after(s, path, dir, h);
  for (std::size_t i = 0; i < phi.size(); ++i) EXPECT_NEAR((r1[i] - r0[i]) / h, phi[i], 1e-6) << "sample " << i;
  for (std::size_t a = 0; a < s.active.members.size(); ++a) {
    EXPECT_NEAR(phi[*s.position_of(s.active.members[a])], 0.0, 1e-10);
  }
}

TEST(MinRatioStep, SmallestCandidate) {
  const std::vector<double> c{std::abs(-0.1 / 0.5), std::abs(-0.3 / 0.2)};
  EXPECT_DOUBLE_EQ(min_ratio_step(c, 1.0), 0.2);
}

TEST(MinRatioStep, CappedByRemaining) {
  const std::vector<double> c{1.5, 2.0};
  EXPECT_DOUBLE_EQ(min_ratio_step(c, 0.7), 0.7);
}

TEST(MinRatioStep, IgnoresNonpositive) {
  const std::vector<double> c{-0.5, 0.0, 0.4};
  EXPECT_DOUBLE_EQ(min_ratio_step(c, 1.0), 0.4);
}

TEST(PathDirection, CompletedPathIsFlat) {
  SvmState s = pair_state();
  PathState path;
  path.movers = {{1, 0.0, false}};
  const auto dir = path_direction(s, path);
  EXPECT_EQ(dir.db, 0.0);
  EXPECT_EQ(dir.dx_s[0], 0.0);
  EXPECT_EQ(dir.dx_movers[0], 0.0);
  const auto phi = sensitivity_phi(s, path, dir);
  for (double f : phi) EXPECT_EQ(f, 0.0);
}

TEST(PathDirection, MatchesEquilibriumSolve) {
  SvmState s = pair_state();
  PathState path;
  path.movers = {{1, 0.3, false}};
  const auto dir = path_direction(s, path);
  EXPECT_NEAR(dir.dx_movers[0], 0.3, 1e-15);
  EXPECT_NEAR(dir.dx_s[0], 0.3, 1e-14);
  EXPECT_NEAR(dir.db, -0.45, 1e-14);
  EXPECT_NEAR(s.samples[0].target * dir.dx_s[0] + s.samples[1].target * dir.dx_movers[0], 0.0, 1e-14);
}

TEST(PathDirection, EmptyS) {
  SvmState s = hand_state<Task::classification>({{0, {1.0}, 1.0}, {1, {-1.0}, -1.0}}, {0.3, 0.3}, 0.0,
                                                {Region::B, Region::B}, KernelSpec::linear(0.5), Hyperparams{0.3, 0.0});
  EXPECT_ERRC(path_direction(s, PathState{}), Errc::empty_s);
}

TEST(SensitivityPhi, FiniteDifferenceSvm) {
  auto all = two_gaussians(44, 7);
  SvmState s = train_svm_batch(std::vector<Sample>(all.begin(), all.begin() + 40), kRbf, Hyperparams{1.0, 0.0}, kTight);
  UpdateBatch b;
  b.add.assign(all.begin() + 40, all.end());
  b.remove = {s.samples[3].id};
  PathState path = detail::start_path(s, b);
  expect_phi_matches_finite_difference(s, path);
}

TEST(SensitivityPhi, FiniteDifferenceSvr) {
  auto all = noisy_sine(44, 7);
  SvrState s = train_svr_batch(std::vector<Sample>(all.begin(), all.begin() + 40), kRbf, Hyperparams{1.0, 0.2}, kTight);
  UpdateBatch b;
  b.add.assign(all.begin() + 40, all.end());
  b.remove = {s.samples[5].id};
  PathState path = detail::start_path(s, b);
  expect_phi_matches_finite_difference(s, path);
}

TEST(StepSelect, NoEventsReachesPathEnd) {
  SvmState s = pair_state();
  PathState path;
  path.movers = {{1, 0.0, false}};
  const auto dir = path_direction(s, path);
  const auto phi = sensitivity_phi(s, path, dir);
  const PathEvent ev = step_select(s, path, phi, dir, 1.0);
  EXPECT_EQ(ev.kind, PathEventKind::path_end);
  EXPECT_DOUBLE_EQ(ev.eta, 1.0);
}

TEST(StepSelect, FirstEventLandsOnItsBoundary) {
  auto all = two_gaussians(48, 19);
  SvmState s = train_svm_batch(std::vector<Sample>(all.begin(), all.begin() + 40), kRbf, Hyperparams{1.0, 0.0}, kTight);
  UpdateBatch b;
  b.add.assign(all.begin() + 40, all.end());
  PathState path = detail::start_path(s, b);
  ASSERT_FALSE(path.movers.empty());
  const auto dir = path_direction(s, path);
  const auto phi = sensitivity_phi(s, path, dir);
  const PathEvent ev = step_select(s, path, phi, dir, 1.0);
  ASSERT_NE(ev.kind, PathEventKind::path_end);
  EXPECT_GT(ev.eta, 0.0);
  EXPECT_LT(ev.eta, 1.0);
  const auto r = residuals_after(s, path, dir, ev.eta);
  const std::size_t p = *s.position_of(ev.id);
  if (ev.kind == PathEventKind::margin_crossing) {
    EXPECT_NEAR(r[p], 0.0, 1e-9);
  } else {
    const std::size_t a = static_cast<std::size_t>(
        std::find(s.active.members.begin(), s.active.members.end(), ev.id) - s.active.members.begin());
    EXPECT_NEAR(s.multipliers[p] + ev.eta * dir.dx_s[a], ev.bound, 1e-12);
  }
  // No other sample crosses its boundary earlier.
  const auto r_half = residuals_after(s, path, dir, 0.5 * ev.eta);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const bool mover = std::any_of(path.movers.begin(), path.movers.end(),
                                   [&](const PathMover& m) { return m.id == s.samples[i].id; });
    if (s.partition[i] == Region::O && !mover) {
      EXPECT_GE(r_half[i], -1e-12) << "sample " << i;
    }
  }
}

TEST(Migrate, SToB) {
  SvmState s = pair_state();
  PathState path;
  migrate(s, path, PathEvent{PathEventKind::reaches_bound, 0, 0.0, 0.0, Region::S, Region::B, 1.0, 1.0});
  EXPECT_EQ(s.partition[0], Region::B);
  EXPECT_EQ(s.multipliers[0], 1.0);
  EXPECT_TRUE(s.active.members.empty());
}

TEST(Migrate, SToO) {
  SvmState s = pair_state();
  PathState path;
  migrate(s, path, PathEvent{PathEventKind::reaches_zero, 0, 0.0, 0.0, Region::S, Region::O, 1.0, 0.0});
  EXPECT_EQ(s.partition[0], Region::O);
  EXPECT_EQ(s.multipliers[0], 0.0);
  EXPECT_EQ(s.residuals, compute_residuals(s));
}

TEST(Migrate, OToS) {
  SvmState s = pair_state();
  PathState path;
  migrate(s, path, PathEvent{PathEventKind::margin_crossing, 1, 0.0, 0.0, Region::O, Region::S, 1.0, 0.0});
  EXPECT_EQ(s.partition[1], Region::S);
  EXPECT_EQ(s.active.members, (std::vector<SampleId>{0, 1}));
  EXPECT_EQ(s.active.order(), 2);
}

TEST(Migrate, InconsistentEvent) {
  SvmState s = pair_state();
  PathState path;
  EXPECT_ERRC(migrate(s, path, PathEvent{PathEventKind::reaches_bound, 1, 0.0, 0.0, Region::S, Region::B, 1.0, 1.0}),
              Errc::inconsistent_event);
  EXPECT_ERRC(migrate(s, path, PathEvent{PathEventKind::reaches_bound, 77, 0.0, 0.0, Region::S, Region::B, 1.0, 1.0}),
              Errc::inconsistent_event);
}

TEST(PathUpdateSvm, EmptyBatch) {
  SvmState s = train_svm_batch(two_gaussians(30, 2), kRbf, {});
  const SvmState before = s;
  const PathState path = path_update_svm(s, {});
  EXPECT_TRUE(path.log.empty());
  EXPECT_EQ(s.multipliers, before.multipliers);
  EXPECT_EQ(s.bias, before.bias);
}

TEST(PathUpdateSvm, EqualsRetrain) {
  const auto all = two_gaussians(140, 31);
  SvmState s = train_svm_batch(std::vector<Sample>(all.begin(), all.begin() + 100), kRbf, {}, kTight);
  std::mt19937_64 rng(9);
  std::size_t next = 100;
  for (int r = 0; r < 5; ++r) {
    const PathState path = path_update_svm(s, testing::random_batch(s, all, next, 6, 2, rng));
    ASSERT_TRUE(validate(s).ok()) << validate(s).summary();
    ASSERT_FALSE(path.log.empty());
    EXPECT_DOUBLE_EQ(path.log.back().cumulative_eta, 1.0);
  }
  const SvmState oracle = train_svm_batch(s.samples, kRbf, {}, kTight);
  EXPECT_LE(max_prediction_gap(s, oracle, testing::grid(2, 15, -3.0, 3.0)), 1e-6);
}

TEST(PathUpdateSvm, SingleAdditionKeepsEquilibriumAtEveryEvent) {
  const auto all = two_gaussians(61, 43);
  SvmState s = train_svm_batch(std::vector<Sample>(all.begin(), all.begin() + 60), kRbf, {}, kTight);
  UpdateBatch b;
  b.add = {all.back()};
  const PathState path = path_update_svm(s, b);
  double last = 0.0;
  for (const auto& ev : path.log) {
    EXPECT_GE(ev.cumulative_eta, last);
    last = ev.cumulative_eta;
  }
  EXPECT_DOUBLE_EQ(last, 1.0);
  EXPECT_TRUE(validate(s).ok()) << validate(s).summary();
  EXPECT_EQ(path.polish_migrations, 0u);
}

TEST(PathUpdateSvm, AgreesWithProposedEngine) {
  const auto all = two_gaussians(120, 47);
  SvmState a = train_svm_batch(std::vector<Sample>(all.begin(), all.begin() + 100), kRbf, {}, kTight);
  SvmState b = a;
  UpdateBatch batch;
  batch.add.assign(all.begin() + 100, all.end());
  batch.remove = {0, 1, 2, 3, 4};
  path_update_svm(a, batch);
  update_multi_svm(b, batch);
  EXPECT_LE(max_prediction_gap(a, b, testing::grid(2, 15, -3.0, 3.0)), 1e-6);
}

TEST(PathUpdateSvr, EmptyBatch) {
  SvrState s = train_svr_batch(noisy_sine(30, 2), kRbf, Hyperparams{1.0, 0.2});
  const SvrState before = s;
  path_update_svr(s, {});
  EXPECT_EQ(s.multipliers, before.multipliers);
}

TEST(PathUpdateSvr, EqualsRetrain) {
  const Hyperparams h{1.0, 0.2};
  const auto all = noisy_sine(140, 33);
  SvrState s = train_svr_batch(std::vector<Sample>(all.begin(), all.begin() + 100), kRbf, h, kTight);
  std::mt19937_64 rng(10);
  std::size_t next = 100;
  for (int r = 0; r < 5; ++r) {
    path_update_svr(s, testing::random_batch(s, all, next, 6, 2, rng));
    ASSERT_TRUE(validate(s).ok()) << validate(s).summary();
  }
  const SvrState oracle = train_svr_batch(s.samples, kRbf, h, kTight);
  EXPECT_LE(max_prediction_gap(s, oracle, testing::grid(1, 101, -3.5, 3.5)), 1e-6);
}

TEST(PathEventKind, Names) {
  EXPECT_EQ(to_string(PathEventKind::margin_crossing), "margin_crossing");
  EXPECT_EQ(to_string(PathEventKind::path_end), "path_end");
}

}  // namespace
}  // namespace ridgesvm
