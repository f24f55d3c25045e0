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


#ifndef RIDGESVM_ONLINE_SVM_HPP
#define RIDGESVM_ONLINE_SVM_HPP

#include <algorithm>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ridgesvm/batch_solver.hpp"
#include "ridgesvm/detail/active_set.hpp"
#include "ridgesvm/detail/update_engine.hpp"
#include "ridgesvm/model.hpp"

namespace ridgesvm {

/// Intercept convention of the weight-error-curve ramp.
///   derived:       α = ρ⁻¹(1 − y f)
///   paper_literal: α = ρ ∓ ρ⁻¹ f  (intercept ρ; converges only through repair)
enum class WecMode { derived, paper_literal };

inline double wec_predict_svm(double f_value, double label, double rho, double C, WecMode mode = WecMode::derived) {
  if (!(rho > 0.0)) throw Error(Errc::nonpositive_rho, "WEC prediction needs rho > 0");
  double raw = 0.0;
  if (mode == WecMode::derived) {
    raw = (1.0 - label * f_value) / rho;
  } else {
    raw = label > 0.0 ? rho - f_value / rho : rho + f_value / rho;
  }
  return std::clamp(raw, 0.0, C);
}

/// Δx_r = −x_r for every id, in input order.
template <Task T>
std::vector<double> assign_removals(const DualState<T>& state, std::span<const SampleId> remove_ids) {
  std::vector<double> out;
  out.reserve(remove_ids.size());
  for (auto id : remove_ids) {
    const auto p = state.position_of(id);
    if (!p) throw Error(Errc::unknown_id, "id " + std::to_string(id) + " not in model");
    out.push_back(-state.multipliers[*p]);
  }
  return out;
}

namespace detail {

/// [Δb; Δx_S] for multiplier changes on samples outside the model (`add`) and
/// on current samples (`remove`), using the cached bordered inverse.
template <Task T>
EquilibriumDelta equilibrium_solve(const DualState<T>& s, std::span<const Sample> add, std::span<const double> delta_add,
                                   std::span<const SampleId> remove, std::span<const double> delta_remove) {
  using Tr = DualTraits<T>;
  const auto& act = s.active;
  if (act.members.empty()) throw Error(Errc::empty_s, "equilibrium solve needs a nonempty S");
  if (add.size() != delta_add.size() || remove.size() != delta_remove.size()) {
    throw Error(Errc::dimension_mismatch, "delta count does not match sample count");
  }
  const auto k = static_cast<Eigen::Index>(act.members.size());
  std::vector<std::size_t> spos(act.members.size());
  for (std::size_t a = 0; a < spos.size(); ++a) spos[a] = *s.position_of(act.members[a]);

  Vector coupling = Vector::Zero(k + 1);
  auto couple = [&](const Sample& smp, double d, std::optional<std::size_t> self) {
    if (d == 0.0) return;
    const double vd = Tr::border(smp);
    coupling(0) += vd * d;
    for (Eigen::Index a = 0; a < k; ++a) {
      const std::size_t pa = spos[static_cast<std::size_t>(a)];
      double q = kernel_eval(s.samples[pa].features, smp.features, s.kernel);
      if (self && *self == pa) q += s.kernel.ridge;
      coupling(a + 1) += Tr::border(s.samples[pa]) * vd * q * d;
    }
  };
  for (std::size_t q = 0; q < add.size(); ++q) couple(add[q], delta_add[q], std::nullopt);
  for (std::size_t q = 0; q < remove.size(); ++q) {
    const auto p = s.position_of(remove[q]);
    if (!p) throw Error(Errc::unknown_id, "id " + std::to_string(remove[q]) + " not in model");
    couple(s.samples[*p], delta_remove[q], p);
  }
  return equilibrium_from_coupling(act, coupling);
}

/// Makes the cached S list agree with the partition tags.
template <Task T>
void sync_active_set(DualState<T>& s) {
  std::vector<SampleId> tagged;
  for (std::size_t i = 0; i < s.samples.size(); ++i) {
    if (s.partition[i] == Region::S) tagged.push_back(s.samples[i].id);
  }
  auto current = s.active.members;
  std::sort(tagged.begin(), tagged.end());
  std::sort(current.begin(), current.end());
  if (tagged != current || s.active.bordered.order != static_cast<Eigen::Index>(tagged.size())) {
    rebuild_active_set(s);
  }
}

/// Appends `incoming` to a state whose S is empty and retrains B ∪ incoming
/// with every O member held at zero.
template <Task T>
void rebuild_empty_s(DualState<T>& s, std::span<const Sample> incoming) {
  if (!s.active.members.empty()) throw Error(Errc::inconsistent_state, "rebuild requested while S is nonempty");
  if (s.samples.empty()) {
    s = ridgesvm::train_batch<T>(std::vector<Sample>(incoming.begin(), incoming.end()), s.kernel, s.hyper);
    return;
  }
  UpdateBatch check;
  check.add.assign(incoming.begin(), incoming.end());
  check_batch(s, check);
  const std::size_t n0 = s.samples.size();
  append_samples(s, incoming);
  std::vector<std::size_t> subset;
  for (std::size_t i = 0; i < s.samples.size(); ++i) {
    if (i >= n0 || s.partition[i] == Region::B) subset.push_back(i);
  }
  rebuild_from_subset(s, subset);
  repair(s, RepairOptions{});
  trim_cache(s);
}

}  // namespace detail

/// [Δb; Δα_S] = −(bordered inverse)·[y_𝒟ᵀ, y_ℛᵀ; Q_{S,𝒟}, Q_{S,ℛ}]·[Δα_𝒟; Δα_ℛ].
inline EquilibriumDelta equilibrium_solve_svm(const SvmState& state, std::span<const Sample> add,
                                              std::span<const double> delta_add, std::span<const SampleId> remove,
                                              std::span<const double> delta_remove) {
  return detail::equilibrium_solve(state, add, delta_add, remove, delta_remove);
}

/// Restores the KKT conditions by migrating samples between S, B and O and
/// re-solving the equilibrium of S. Throws RepairDivergence after
/// `options.max_passes` passes.
template <Task T>
RepairStats kkt_repair(DualState<T>& state, const RepairOptions& options = {}) {
  detail::sync_active_set(state);
  RepairStats stats = detail::repair(state, options);
  detail::trim_cache(state);
  return stats;
}

inline void rebuild_empty_S(SvmState& state, std::span<const Sample> incoming) {
  detail::rebuild_empty_s(state, incoming);
}

/// Adds and removes several samples at once: WEC prediction for the additions,
/// full removal of ℛ, one equilibrium solve, then KKT repair.
inline RepairStats update_multi_svm(SvmState& state, const UpdateBatch& batch, WecMode mode = WecMode::derived,
                                    const RepairOptions& options = {}) {
  if (batch.empty()) return {};
  const double rho = state.kernel.ridge;
  const double C = state.hyper.C;
  if (!(rho > 0.0)) throw Error(Errc::nonpositive_rho, "online update needs rho > 0");
  detail::sync_active_set(state);
  return detail::one_shot_update(
      state, batch, [&](double f, const Sample& smp) { return wec_predict_svm(f, smp.target, rho, C, mode); },
      options);
}

}  // namespace ridgesvm

#endif  // RIDGESVM_ONLINE_SVM_HPP
