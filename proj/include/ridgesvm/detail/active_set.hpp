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

#ifndef RIDGESVM_DETAIL_ACTIVE_SET_HPP
#define RIDGESVM_DETAIL_ACTIVE_SET_HPP

#include <algorithm>
#include <cmath>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "ridgesvm/linalg.hpp"
#include "ridgesvm/model.hpp"

namespace ridgesvm::detail {

using PositionMap = std::unordered_map<SampleId, std::size_t>;

/// Full refresh of Q_S⁻¹ after this many block updates.
inline constexpr std::size_t kRefreshEvery = 64;

template <Task T>
double border_at(const DualState<T>& s, std::size_t i) {
  return DualTraits<T>::border(s.samples[i]);
}

template <Task T>
Region region_of_value(double x, const Hyperparams& h) {
  const double lower = DualTraits<T>::lower(h);
  if (std::abs(x) <= kBoundTolerance) return Region::O;
  if (x >= h.C - kBoundTolerance) return Region::B;
  if (lower < 0.0 && x <= lower + kBoundTolerance) return Region::B;
  return Region::S;
}

template <Task T>
std::vector<Region> partition_from_values(const DualState<T>& s) {
  std::vector<Region> out(s.samples.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = region_of_value<T>(s.multipliers[i], s.hyper);
  return out;
}

/// Side of an S member: sign of x, or the side its residual points to when x = 0.
template <Task T>
double side_of(const DualState<T>& s, std::size_t i) {
  const double x = s.multipliers[i];
  if (x > 0.0) return 1.0;
  if (x < 0.0) return -1.0;
  if constexpr (T == Task::classification) {
    return 1.0;
  } else {
    return s.residuals[i] > 0.0 ? -1.0 : 1.0;
  }
}

/// Residual an S member is pinned to: −ε·side.
template <Task T>
double s_target(const DualState<T>& s, double side) {
  return -DualTraits<T>::eps(s.hyper) * side;
}

template <Task T>
const Vector& column(DualState<T>& s, std::size_t pos) {
  return s.columns.get(s.samples[pos].id, pos, s.samples, s.kernel);
}

/// Q_S = v_S v_Sᵀ ⊙ (K + ρI)_SS for the current member list.
template <Task T>
DenseMatrix member_block(DualState<T>& s, const PositionMap& pos) {
  const auto& m = s.active.members;
  const auto k = static_cast<Eigen::Index>(m.size());
  DenseMatrix q(k, k);
  for (Eigen::Index b = 0; b < k; ++b) {
    const std::size_t pb = pos.at(m[static_cast<std::size_t>(b)]);
    const Vector& col = column(s, pb);
    const double vb = border_at(s, pb);
    for (Eigen::Index a = 0; a < k; ++a) {
      const std::size_t pa = pos.at(m[static_cast<std::size_t>(a)]);
      q(a, b) = border_at(s, pa) * vb * col(static_cast<Eigen::Index>(pa));
    }
  }
  return q;
}

template <Task T>
Vector member_border(const DualState<T>& s, const PositionMap& pos) {
  const auto& m = s.active.members;
  Vector v(static_cast<Eigen::Index>(m.size()));
  for (std::size_t a = 0; a < m.size(); ++a) v(static_cast<Eigen::Index>(a)) = border_at(s, pos.at(m[a]));
  return v;
}

/// Recomputes Q_S⁻¹ and the bordered inverse for the current member list.
template <Task T>
void refresh_inverse(DualState<T>& s, const PositionMap& pos) {
  auto& act = s.active;
  act.incremental_updates = 0;
  if (act.members.empty()) {
    act.inv_store = DenseMatrix(0, 0);
    act.bordered = BorderedFactor{};
    return;
  }
  const DenseMatrix inv = invert_spd(member_block(s, pos));
  const Eigen::Index k = inv.rows();
  const Eigen::Index cap = k + std::max<Eigen::Index>(64, k / 8);
  act.inv_store.resize(cap, cap);
  act.inv_store.topLeftCorner(k, k) = inv;
  act.bordered = bordered_factor(act.q_inv(), member_border(s, pos));
}

/// Sets S from the partition tags (position order) and refreshes the inverse.
template <Task T>
void rebuild_active_set(DualState<T>& s) {
  const PositionMap pos = s.position_map();
  auto& act = s.active;
  act.members.clear();
  act.sides.clear();
  for (std::size_t i = 0; i < s.samples.size(); ++i) {
    if (s.partition[i] == Region::S) {
      act.members.push_back(s.samples[i].id);
      act.sides.push_back(side_of(s, i));
    }
  }
  refresh_inverse(s, pos);
}

/// Removes `leaving` from S and appends `entering` (with sides) using the
/// block shrink/grow inverse updates.
template <Task T>
void update_active_set(DualState<T>& s, const PositionMap& pos, std::span<const SampleId> leaving,
                       std::span<const std::pair<SampleId, double>> entering) {
  auto& act = s.active;
  if (leaving.empty() && entering.empty()) return;

  const std::unordered_set<SampleId> drop(leaving.begin(), leaving.end());
  std::vector<Eigen::Index> removed;
  std::vector<SampleId> members;
  std::vector<double> sides;
  for (std::size_t a = 0; a < act.members.size(); ++a) {
    if (drop.count(act.members[a])) {
      removed.push_back(static_cast<Eigen::Index>(a));
    } else {
      members.push_back(act.members[a]);
      sides.push_back(act.sides[a]);
    }
  }

  const auto k_old = static_cast<Eigen::Index>(act.members.size());
  const auto m = static_cast<Eigen::Index>(entering.size());
  DenseMatrix cross(k_old, m);
  DenseMatrix fresh(m, m);
  for (Eigen::Index b = 0; b < m; ++b) {
    const std::size_t pb = pos.at(entering[static_cast<std::size_t>(b)].first);
    const Vector& col = column(s, pb);
    const double vb = border_at(s, pb);
    for (Eigen::Index a = 0; a < k_old; ++a) {
      const std::size_t pa = pos.at(act.members[static_cast<std::size_t>(a)]);
      cross(a, b) = border_at(s, pa) * vb * col(static_cast<Eigen::Index>(pa));
    }
    for (Eigen::Index a = 0; a < m; ++a) {
      const std::size_t pa = pos.at(entering[static_cast<std::size_t>(a)].first);
      fresh(a, b) = border_at(s, pa) * vb * col(static_cast<Eigen::Index>(pa));
    }
  }
  for (const auto& [id, side] : entering) {
    members.push_back(id);
    sides.push_back(side);
  }

  const bool needs_refresh = act.incremental_updates + 1 >= kRefreshEvery || members.empty() ||
                             removed.size() == act.members.size();
  act.members = std::move(members);
  act.sides = std::move(sides);
  if (needs_refresh) {
    refresh_inverse(s, pos);
    return;
  }
  try {
    inverse_grow_shrink_lower(act.inv_store, k_old, cross, fresh, removed);
    act.bordered = bordered_factor(act.q_inv(), member_border(s, pos));
    ++act.incremental_updates;
  } catch (const Error&) {
    refresh_inverse(s, pos);
  }
}

/// x_p += δ_p for the given positions, b += db, and the matching residual update
/// r_i += v_i (Σ_p v_p δ_p 𝒬_ip + db).
template <Task T>
void apply_delta(DualState<T>& s, std::span<const std::size_t> positions, std::span<const double> deltas,
                 double db) {
  const auto n = static_cast<Eigen::Index>(s.samples.size());
  Vector acc = Vector::Constant(n, db);
  for (std::size_t k = 0; k < positions.size(); ++k) {
    const double d = deltas[k];
    if (d == 0.0) continue;
    const std::size_t p = positions[k];
    s.multipliers[p] += d;
    acc.noalias() += (border_at(s, p) * d) * column(s, p);
  }
  s.bias += db;
  for (Eigen::Index i = 0; i < n; ++i) {
    s.residuals[static_cast<std::size_t>(i)] += border_at(s, static_cast<std::size_t>(i)) * acc(i);
  }
}

template <Task T>
double balance(const DualState<T>& s) {
  double sum = 0.0;
  for (std::size_t i = 0; i < s.samples.size(); ++i) sum += border_at(s, i) * s.multipliers[i];
  return sum;
}

/// One Newton correction on the equality system of S: pins every S residual at
/// its target and restores the balance vᵀx = 0. Returns the pre-step defect.
template <Task T>
double settle_active_set(DualState<T>& s, const PositionMap& pos) {
  auto& act = s.active;
  const auto k = static_cast<Eigen::Index>(act.members.size());
  if (k == 0) return 0.0;
  Vector rhs(k + 1);
  rhs(0) = -balance(s);
  double defect = std::abs(rhs(0));
  std::vector<std::size_t> positions(static_cast<std::size_t>(k));
  for (Eigen::Index a = 0; a < k; ++a) {
    const std::size_t p = pos.at(act.members[static_cast<std::size_t>(a)]);
    positions[static_cast<std::size_t>(a)] = p;
    rhs(a + 1) = s_target(s, act.sides[static_cast<std::size_t>(a)]) - s.residuals[p];
    defect = std::max(defect, std::abs(rhs(a + 1)));
  }
  const Vector delta = act.solve(rhs);
  std::vector<double> dx(delta.data() + 1, delta.data() + 1 + k);
  apply_delta(s, positions, dx, delta(0));
  return defect;
}

/// Erases samples at ascending positions from every per-sample array and the cache.
template <Task T>
void erase_positions(DualState<T>& s, std::span<const std::size_t> sorted_positions) {
  if (sorted_positions.empty()) return;
  std::vector<SampleId> ids;
  for (auto p : sorted_positions) ids.push_back(s.samples[p].id);
  s.columns.erase_rows(sorted_positions, ids);
  std::vector<bool> drop(s.samples.size(), false);
  for (auto p : sorted_positions) drop[p] = true;
  std::size_t w = 0;
  for (std::size_t i = 0; i < s.samples.size(); ++i) {
    if (drop[i]) continue;
    if (w != i) {
      s.samples[w] = std::move(s.samples[i]);
      s.multipliers[w] = s.multipliers[i];
      s.residuals[w] = s.residuals[i];
      s.partition[w] = s.partition[i];
    }
    ++w;
  }
  s.samples.resize(w);
  s.multipliers.resize(w);
  s.residuals.resize(w);
  s.partition.resize(w);
}

/// Keeps only the columns of current S members in the cache.
template <Task T>
void trim_cache(DualState<T>& s) {
  std::unordered_set<SampleId> keep(s.active.members.begin(), s.active.members.end());
  s.columns.retain(keep);
}

}  // namespace ridgesvm::detail

#endif  // RIDGESVM_DETAIL_ACTIVE_SET_HPP
