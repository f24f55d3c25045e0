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

#ifndef RIDGESVM_DETAIL_UPDATE_ENGINE_HPP
#define RIDGESVM_DETAIL_UPDATE_ENGINE_HPP

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_set>
#include <utility>
#include <vector>

#include "ridgesvm/batch_solver.hpp"
#include "ridgesvm/detail/active_set.hpp"
#include "ridgesvm/model.hpp"

namespace ridgesvm {

struct RepairOptions {
  std::size_t max_passes = 50;
  /// After this many all-at-once passes only the worst violator migrates per pass.
  std::size_t single_migration_after = 10;
  double enter_tolerance = 1e-9;
};

/// Defect below which a settled S needs no further Newton polish.
inline constexpr double kPolishThreshold = 1e-6;

struct RepairStats {
  std::size_t passes = 0;
  std::size_t migrations = 0;
  std::size_t rebuilds = 0;
};

/// Δb and Δx for every S member, in `state.active.members` order.
struct EquilibriumDelta {
  double db = 0.0;
  std::vector<double> dx_s;
};

namespace detail {

/// −[bordered inverse] · coupling, the shared core of every equilibrium solve.
inline EquilibriumDelta equilibrium_from_coupling(const ActiveSet& act, const Vector& coupling) {
  const Vector d = -act.solve(coupling);
  EquilibriumDelta out;
  out.db = d(0);
  out.dx_s.assign(d.data() + 1, d.data() + d.size());
  return out;
}

template <Task T>
void check_batch(const DualState<T>& s, const UpdateBatch& batch) {
  std::unordered_set<SampleId> present;
  for (const auto& smp : s.samples) present.insert(smp.id);
  std::unordered_set<SampleId> seen;
  for (auto id : batch.remove) {
    if (!present.count(id)) throw Error(Errc::unknown_id, "remove id " + std::to_string(id) + " not in model");
    if (!seen.insert(id).second) throw Error(Errc::duplicate_id, "remove id " + std::to_string(id) + " repeated");
  }
  std::unordered_set<SampleId> fresh;
  const std::size_t dim = s.samples.empty() ? 0 : s.samples.front().features.size();
  for (const auto& smp : batch.add) {
    if (present.count(smp.id) || !fresh.insert(smp.id).second) {
      throw Error(Errc::duplicate_id, "add id " + std::to_string(smp.id) + " is not fresh");
    }
    if (dim != 0 && smp.features.size() != dim) {
      throw Error(Errc::dimension_mismatch, "added sample " + std::to_string(smp.id) + " has wrong dimension");
    }
    if constexpr (T == Task::classification) {
      if (smp.target != 1.0 && smp.target != -1.0) {
        throw Error(Errc::label_domain_error, "classification labels must be +1/-1");
      }
    }
  }
}

/// Appends samples with zero multipliers, tags them O, and extends cached columns.
/// Residuals of the new rows are the test-form values (x_new = 0).
template <Task T>
void append_samples(DualState<T>& s, std::span<const Sample> add) {
  using Tr = DualTraits<T>;
  const std::size_t n0 = s.samples.size();
  for (const auto& smp : add) {
    s.samples.push_back(smp);
    s.multipliers.push_back(0.0);
    s.residuals.push_back(0.0);
    s.partition.push_back(Region::O);
  }
  const PositionMap pos = s.position_map();
  s.columns.append_rows(s.samples, n0, s.kernel, pos);
  for (std::size_t p = n0; p < s.samples.size(); ++p) {
    const Vector& col = column(s, p);
    double f = s.bias;
    for (std::size_t j = 0; j < n0; ++j) {
      const double x = s.multipliers[j];
      if (x != 0.0) f += border_at(s, j) * x * col(static_cast<Eigen::Index>(j));
    }
    s.residuals[p] = Tr::border(s.samples[p]) * f - Tr::linear(s.samples[p]);
  }
}

/// Retrains the multipliers of `subset` from scratch with every other multiplier
/// held at zero, then restores residuals, tags and S. Falls back to all samples
/// when the subset alone is not trainable.
template <Task T>
void rebuild_from_subset(DualState<T>& s, std::span<const std::size_t> subset) {
  SolverConfig cfg;
  cfg.kkt_tolerance = 1e-9;
  std::vector<Sample> sub;
  for (auto p : subset) sub.push_back(s.samples[p]);
  std::vector<std::size_t> used(subset.begin(), subset.end());
  DualState<T> trained;
  try {
    trained = ridgesvm::train_batch<T>(sub, s.kernel, s.hyper, cfg);
  } catch (const Error& e) {
    if (e.code() != Errc::single_class_input && e.code() != Errc::no_convergence) throw;
    used.resize(s.samples.size());
    for (std::size_t i = 0; i < used.size(); ++i) used[i] = i;
    trained = ridgesvm::train_batch<T>(s.samples, s.kernel, s.hyper, cfg);
  }
  std::fill(s.multipliers.begin(), s.multipliers.end(), 0.0);
  for (std::size_t k = 0; k < used.size(); ++k) s.multipliers[used[k]] = trained.multipliers[k];
  s.bias = trained.bias;
  s.residuals = compute_residuals(s);
  s.partition = partition_from_values(s);
  rebuild_active_set(s);
}

/// Candidate migration found by a repair scan.
struct Migration {
  std::size_t pos = 0;
  Region to = Region::S;
  double side = 1.0;     // for entries into S
  double new_value = 0;  // for exits from S
  double severity = 0;
};

/*
 * Restores the KKT conditions after a one-shot update:
 *   settle S (bordered Newton solve), then
 *   S members that left (lower, C) or changed sign are clamped and move to B/O,
 *   B/O members whose residual crossed their threshold move into S,
 * until no migration occurs.
 */
template <Task T>
RepairStats repair(DualState<T>& s, const RepairOptions& opt) {
  using Tr = DualTraits<T>;
  const double C = s.hyper.C;
  const double lower = Tr::lower(s.hyper);
  const double eps = Tr::eps(s.hyper);
  const double tol = opt.enter_tolerance;
  RepairStats stats;
  PositionMap pos = s.position_map();

  for (stats.passes = 1; stats.passes <= opt.max_passes; ++stats.passes) {
    if (s.active.members.empty()) {
      // Without S the bias is free; accept the state only if it is already optimal.
      const double viol = kkt_residual(s, s.residuals);
      if (viol <= tol) return stats;
      std::vector<std::size_t> subset;
      for (std::size_t i = 0; i < s.samples.size(); ++i) {
        if (s.partition[i] != Region::O || s.residuals[i] + eps < -tol ||
            (lower < 0.0 && s.residuals[i] - eps > tol)) {
          subset.push_back(i);
        }
      }
      rebuild_from_subset(s, subset);
      ++stats.rebuilds;
      pos = s.position_map();
      if (stats.rebuilds > 3) throw Error(Errc::repair_divergence, "S stays empty after rebuild");
      continue;
    }

    const double last_defect = settle_active_set(s, pos);

    std::vector<Migration> moves;
    const auto& act = s.active;
    for (std::size_t a = 0; a < act.members.size(); ++a) {
      const std::size_t p = pos.at(act.members[a]);
      const double x = s.multipliers[p];
      const double side = act.sides[a];
      if (x * side <= 0.0) {
        moves.push_back({p, Region::O, side, 0.0, std::abs(x)});
      } else if (x >= C) {
        moves.push_back({p, Region::B, side, C, x - C});
      } else if (lower < 0.0 && x <= lower) {
        moves.push_back({p, Region::B, side, lower, lower - x});
      }
    }
    for (std::size_t i = 0; i < s.samples.size(); ++i) {
      const double r = s.residuals[i];
      const double x = s.multipliers[i];
      if (s.partition[i] == Region::O) {
        if (r + eps < -tol) {
          moves.push_back({i, Region::S, 1.0, 0.0, -(r + eps)});
        } else if (lower < 0.0 && r - eps > tol) {
          moves.push_back({i, Region::S, -1.0, 0.0, r - eps});
        }
      } else if (s.partition[i] == Region::B) {
        if (x > 0.0 && r + eps > tol) {
          moves.push_back({i, Region::S, 1.0, 0.0, r + eps});
        } else if (x < 0.0 && r - eps < -tol) {
          moves.push_back({i, Region::S, -1.0, 0.0, eps - r});
        }
      }
    }

    if (moves.empty()) {
      // Converged partition. One Newton step from a defect of d leaves about
      // d·1e-12; polish further only when the last defect was large.
      if (last_defect > kPolishThreshold) {
        for (int k = 0; k < 3; ++k) {
          if (settle_active_set(s, pos) <= kPolishThreshold) break;
          if (k == 1) refresh_inverse(s, pos);
        }
      }
      return stats;
    }

    if (stats.passes > opt.single_migration_after) {
      auto worst = std::max_element(moves.begin(), moves.end(),
                                    [](const Migration& a, const Migration& b) { return a.severity < b.severity; });
      moves = {*worst};
    }
    stats.migrations += moves.size();

    std::vector<SampleId> leaving;
    std::vector<std::pair<SampleId, double>> entering;
    std::vector<std::size_t> clamp_pos;
    std::vector<double> clamp_delta;
    for (const auto& mv : moves) {
      const SampleId id = s.samples[mv.pos].id;
      if (mv.to == Region::S) {
        entering.emplace_back(id, mv.side);
      } else {
        leaving.push_back(id);
        clamp_pos.push_back(mv.pos);
        clamp_delta.push_back(mv.new_value - s.multipliers[mv.pos]);
      }
      s.partition[mv.pos] = mv.to;
    }
    apply_delta(s, clamp_pos, clamp_delta, 0.0);
    // Snap clamped values exactly onto their bounds.
    for (const auto& mv : moves) {
      if (mv.to != Region::S) s.multipliers[mv.pos] = mv.new_value;
    }
    update_active_set(s, pos, leaving, entering);
  }
  std::ostringstream os;
  os << "KKT repair did not settle within " << opt.max_passes << " passes";
  throw Error(Errc::repair_divergence, os.str());
}

/*
 * One-shot multiple incremental/decremental update:
 *   1. append 𝒟 and evaluate its test-form residuals,
 *   2. predict Δx_𝒟 from the residuals (caller-supplied WEC),
 *   3. Δx_ℛ = −x_ℛ, and ℛ leaves S,
 *   4. one bordered solve for [Δb; Δx_S] with the cached inverse,
 *   5. apply, drop ℛ, tag 𝒟, repair.
 */
template <Task T, class Predict>
RepairStats one_shot_update(DualState<T>& s, const UpdateBatch& batch, Predict&& predict,
                            const RepairOptions& opt) {
  using Tr = DualTraits<T>;
  if (batch.empty()) return {};
  check_batch(s, batch);
  const std::size_t n0 = s.samples.size();
  append_samples(s, std::span<const Sample>(batch.add));
  PositionMap pos = s.position_map();

  std::vector<std::size_t> d_pos;
  std::vector<double> d_delta;
  for (std::size_t p = n0; p < s.samples.size(); ++p) {
    const double f = (s.residuals[p] + Tr::linear(s.samples[p])) * Tr::border(s.samples[p]);
    d_pos.push_back(p);
    d_delta.push_back(predict(f, s.samples[p]));
  }
  std::vector<std::size_t> r_pos;
  std::vector<double> r_delta;
  std::vector<SampleId> r_in_s;
  for (auto id : batch.remove) {
    const std::size_t p = pos.at(id);
    r_pos.push_back(p);
    r_delta.push_back(-s.multipliers[p]);
    if (s.partition[p] == Region::S) r_in_s.push_back(id);
  }
  update_active_set(s, pos, r_in_s, {});

  RepairStats extra;
  if (s.active.members.empty()) {
    // Nothing can absorb the change: drop ℛ and retrain on B ∪ 𝒟.
    std::sort(r_pos.begin(), r_pos.end());
    erase_positions(s, r_pos);
    std::vector<std::size_t> subset;
    for (std::size_t i = 0; i < s.samples.size(); ++i) {
      if (s.partition[i] == Region::B || i >= n0 - r_pos.size()) subset.push_back(i);
    }
    rebuild_from_subset(s, subset);
    extra.rebuilds = 1;
  } else {
    const auto& act = s.active;
    const auto k = static_cast<Eigen::Index>(act.members.size());
    Vector coupling = Vector::Zero(k + 1);
    auto couple = [&](std::size_t p, double d) {
      if (d == 0.0) return;
      const Vector& col = column(s, p);
      const double vp = border_at(s, p);
      coupling(0) += vp * d;
      for (Eigen::Index a = 0; a < k; ++a) {
        const std::size_t pa = pos.at(act.members[static_cast<std::size_t>(a)]);
        coupling(a + 1) += border_at(s, pa) * vp * col(static_cast<Eigen::Index>(pa)) * d;
      }
    };
    for (std::size_t q = 0; q < d_pos.size(); ++q) couple(d_pos[q], d_delta[q]);
    for (std::size_t q = 0; q < r_pos.size(); ++q) couple(r_pos[q], r_delta[q]);
    const EquilibriumDelta eq = equilibrium_from_coupling(act, coupling);

    std::vector<std::size_t> all_pos;
    std::vector<double> all_delta;
    for (std::size_t a = 0; a < act.members.size(); ++a) {
      all_pos.push_back(pos.at(act.members[a]));
      all_delta.push_back(eq.dx_s[a]);
    }
    all_pos.insert(all_pos.end(), d_pos.begin(), d_pos.end());
    all_delta.insert(all_delta.end(), d_delta.begin(), d_delta.end());
    all_pos.insert(all_pos.end(), r_pos.begin(), r_pos.end());
    all_delta.insert(all_delta.end(), r_delta.begin(), r_delta.end());
    apply_delta(s, all_pos, all_delta, eq.db);

    // Tag 𝒟 by value; predictions the residual now contradicts are reset to zero.
    const double eps = Tr::eps(s.hyper);
    const double lower = Tr::lower(s.hyper);
    std::vector<std::size_t> reset_pos;
    std::vector<double> reset_delta;
    for (auto p : d_pos) {
      const double x = s.multipliers[p];
      const double r = s.residuals[p];
      const bool o_side = lower < 0.0 ? std::abs(r) < eps - opt.enter_tolerance : r > opt.enter_tolerance;
      if (x != 0.0 && o_side) {
        reset_pos.push_back(p);
        reset_delta.push_back(-x);
      }
    }
    apply_delta(s, reset_pos, reset_delta, 0.0);
    for (auto p : reset_pos) s.multipliers[p] = 0.0;

    std::sort(r_pos.begin(), r_pos.end());
    erase_positions(s, r_pos);
    pos = s.position_map();

    std::vector<std::pair<SampleId, double>> entering;
    for (std::size_t p = n0 - r_pos.size(); p < s.samples.size(); ++p) {
      s.partition[p] = region_of_value<T>(s.multipliers[p], s.hyper);
      if (s.partition[p] == Region::S) entering.emplace_back(s.samples[p].id, side_of(s, p));
    }
    update_active_set(s, pos, {}, entering);
  }

  RepairStats stats = repair(s, opt);
  stats.rebuilds += extra.rebuilds;
  trim_cache(s);
  return stats;
}

}  // namespace detail
}  // namespace ridgesvm

#endif  // RIDGESVM_DETAIL_UPDATE_ENGINE_HPP
