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


#ifndef RIDGESVM_ONLINE_SVR_HPP
#define RIDGESVM_ONLINE_SVR_HPP

#include <algorithm>
#include <span>
#include <vector>

#include "ridgesvm/online_svm.hpp"

namespace ridgesvm {

/// θ from the weight-error curve: slope −ρ⁻¹ through (±ε, 0), zero inside the tube.
inline double wec_predict_svr(double f_value, double target, double rho, double C, double epsilon) {
  if (!(rho > 0.0)) throw Error(Errc::nonpositive_rho, "WEC prediction needs rho > 0");
  const double e = f_value - target;
  if (e > epsilon) return std::clamp((epsilon - e) / rho, -C, 0.0);
  if (e < -epsilon) return std::clamp((-epsilon - e) / rho, 0.0, C);
  return 0.0;
}

inline std::vector<double> assign_removals_svr(const SvrState& state, std::span<const SampleId> remove_ids) {
  return assign_removals(state, remove_ids);
}

/// [Δb; Δθ_S] with the all-ones border.
inline EquilibriumDelta equilibrium_solve_svr(const SvrState& state, std::span<const Sample> add,
                                              std::span<const double> delta_add, std::span<const SampleId> remove,
                                              std::span<const double> delta_remove) {
  return detail::equilibrium_solve(state, add, delta_add, remove, delta_remove);
}

inline void rebuild_empty_S(SvrState& state, std::span<const Sample> incoming) {
  detail::rebuild_empty_s(state, incoming);
}

inline RepairStats update_multi_svr(SvrState& state, const UpdateBatch& batch, const RepairOptions& options = {}) {
  if (batch.empty()) return {};
  const double rho = state.kernel.ridge;
  const double C = state.hyper.C;
  const double eps = state.hyper.epsilon;
  if (!(rho > 0.0)) throw Error(Errc::nonpositive_rho, "online update needs rho > 0");
  detail::sync_active_set(state);
  return detail::one_shot_update(
      state, batch, [&](double f, const Sample& smp) { return wec_predict_svr(f, smp.target, rho, C, eps); },
      options);
}

}  // namespace ridgesvm

#endif  // RIDGESVM_ONLINE_SVR_HPP
