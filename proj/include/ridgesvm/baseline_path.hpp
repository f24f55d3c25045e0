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


#ifndef RIDGESVM_BASELINE_PATH_HPP
#define RIDGESVM_BASELINE_PATH_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "ridgesvm/detail/active_set.hpp"
#include "ridgesvm/detail/update_engine.hpp"
#include "ridgesvm/model.hpp"
#include "ridgesvm/online_svm.hpp"

namespace ridgesvm {

/// Steps below this size count toward the cycling guard.
inline constexpr double kTinyStep = 1e-12;
/// Sensitivities and directions at or below this magnitude never trigger events.
inline constexpr double kFlatDirection = 1e-12;

enum class PathEventKind { reaches_bound, reaches_zero, margin_crossing, path_end, rebuild };

constexpr std::string_view to_string(PathEventKind k) {
  switch (k) {
    case PathEventKind::reaches_bound: return "reaches_bound";
    case PathEventKind::reaches_zero: return "reaches_zero";
    case PathEventKind::margin_crossing: return "margin_crossing";
    case PathEventKind::path_end: return "path_end";
    case PathEventKind::rebuild: return "rebuild";
  }
  return "?";
}

struct PathEvent {
  PathEventKind kind = PathEventKind::path_end;
  SampleId id = 0;
  double eta = 1.0;             // local step, fraction of the remaining path
  double cumulative_eta = 0.0;  // filled in when the step is taken
  Region from = Region::O;
  Region to = Region::O;
  double side = 1.0;            // side taken by a sample entering S
  double bound = 0.0;           // value a sample leaving S is clamped to
};

/// A sample driven along the path: an added sample heading to its bound, or a
/// removed one heading to zero.
struct PathMover {
  SampleId id = 0;
  double target = 0.0;
  bool removing = false;
};

struct PathState {
  double cumulative_eta = 0.0;
  std::vector<PathMover> movers;
  std::vector<PathEvent> log;
  std::size_t tiny_steps = 0;
  /// Migrations the closing polish had to make (zero when the path tracked exactly).
  std::size_t polish_migrations = 0;
};

/// Per-unit-η change of b, of x on S (member order) and of x on the movers.
struct PathDirections {
  double db = 0.0;
  std::vector<double> dx_s;
  std::vector<double> dx_movers;
};

/// Smallest candidate step capped at `remaining`; nonpositive candidates are ignored.
inline double min_ratio_step(std::span<const double> candidates, double remaining) {
  double eta = remaining;
  for (double c : candidates) {
    if (c > 0.0 && c < eta) eta = c;
  }
  return eta;
}

template <Task T>
PathDirections path_direction(DualState<T>& state, const PathState& path) {
  using detail::border_at;
  const auto& act = state.active;
  if (act.members.empty()) throw Error(Errc::empty_s, "path direction needs a nonempty S");
  const detail::PositionMap pos = state.position_map();
  const auto k = static_cast<Eigen::Index>(act.members.size());
  PathDirections dir;
  Vector coupling = Vector::Zero(k + 1);
  for (const auto& mv : path.movers) {
    const std::size_t p = pos.at(mv.id);
    const double d = mv.target - state.multipliers[p];
    dir.dx_movers.push_back(d);
    if (d == 0.0) continue;
    const Vector& col = detail::column(state, p);
    const double vp = border_at(state, p);
    coupling(0) += vp * d;
    for (Eigen::Index a = 0; a < k; ++a) {
      const std::size_t pa = pos.at(act.members[static_cast<std::size_t>(a)]);
      coupling(a + 1) += border_at(state, pa) * vp * col(static_cast<Eigen::Index>(pa)) * d;
    }
  }
  const EquilibriumDelta eq = detail::equilibrium_from_coupling(act, coupling);
  dir.db = eq.db;
  dir.dx_s = eq.dx_s;
  return dir;
}

/// φ_i = dr_i/dη for every sample under the given directions.
template <Task T>
std::vector<double> sensitivity_phi(DualState<T>& state, const PathState& path, const PathDirections& dir) {
  using detail::border_at;
  const detail::PositionMap pos = state.position_map();
  const auto n = static_cast<Eigen::Index>(state.samples.size());
  Vector acc = Vector::Constant(n, dir.db);
  auto add = [&](std::size_t p, double d) {
    if (d != 0.0) acc.noalias() += (border_at(state, p) * d) * detail::column(state, p);
  };
  for (std::size_t a = 0; a < state.active.members.size(); ++a) add(pos.at(state.active.members[a]), dir.dx_s[a]);
  for (std::size_t m = 0; m < path.movers.size(); ++m) add(pos.at(path.movers[m].id), dir.dx_movers[m]);
  std::vector<double> phi(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    phi[static_cast<std::size_t>(i)] = border_at(state, static_cast<std::size_t>(i)) * acc(i);
  }
  return phi;
}

/// Smallest local step at which a sample changes region, or the path end.
/// Ties go to the lowest sample id.
template <Task T>
PathEvent step_select(const DualState<T>& state, const PathState& path, std::span<const double> phi,
                      const PathDirections& dir, double remaining = 1.0) {
  using Tr = DualTraits<T>;
  const double C = state.hyper.C;
  const double lower = Tr::lower(state.hyper);
  const double eps = Tr::eps(state.hyper);
  const detail::PositionMap pos = state.position_map();

  PathEvent best;
  best.kind = PathEventKind::path_end;
  best.eta = remaining;
  bool have = false;
  auto offer = [&](PathEvent ev, double eta) {
    eta = std::max(eta, 0.0);
    ev.eta = eta;
    if (eta > remaining) return;
    if (!have || eta < best.eta || (eta == best.eta && ev.id < best.id)) {
      best = ev;
      have = true;
    }
  };

  const auto& act = state.active;
  for (std::size_t a = 0; a < act.members.size(); ++a) {
    const double d = dir.dx_s[a];
    if (std::abs(d) <= kFlatDirection) continue;
    const std::size_t p = pos.at(act.members[a]);
    const double x = state.multipliers[p];
    const double side = act.sides[a];
    PathEvent ev;
    ev.id = act.members[a];
    ev.from = Region::S;
    if (d * side < 0.0) {
      ev.kind = PathEventKind::reaches_zero;
      ev.to = Region::O;
      ev.bound = 0.0;
      offer(ev, -x / d);
    } else {
      const double bound = side > 0.0 ? C : lower;
      if (side < 0.0 && lower == 0.0) continue;
      ev.kind = PathEventKind::reaches_bound;
      ev.to = Region::B;
      ev.bound = bound;
      offer(ev, (bound - x) / d);
    }
  }

  std::vector<signed char> mover_kind(state.samples.size(), 0);  // 1 = adding, 2 = removing
  for (const auto& mv : path.movers) mover_kind[pos.at(mv.id)] = mv.removing ? 2 : 1;

  for (std::size_t i = 0; i < state.samples.size(); ++i) {
    const Region reg = state.partition[i];
    if (reg == Region::S || mover_kind[i] == 2) continue;
    const double f = phi[i];
    if (std::abs(f) <= kFlatDirection) continue;
    const double r = state.residuals[i];
    const double x = state.multipliers[i];
    PathEvent ev;
    ev.id = state.samples[i].id;
    ev.kind = PathEventKind::margin_crossing;
    ev.from = reg;
    ev.to = Region::S;
    if (mover_kind[i] == 1) {
      // Moving toward +C stops once r reaches −ε; toward −C once r reaches +ε.
      const double target = std::find_if(path.movers.begin(), path.movers.end(),
                                         [&](const PathMover& m) { return m.id == ev.id; })->target;
      if (target > 0.0 && f > 0.0) {
        ev.side = 1.0;
        offer(ev, (-eps - r) / f);
      } else if (target < 0.0 && f < 0.0) {
        ev.side = -1.0;
        offer(ev, (eps - r) / f);
      }
    } else if (reg == Region::O) {
      if (f < 0.0) {
        ev.side = 1.0;
        offer(ev, (-eps - r) / f);
      } else if (lower < 0.0) {
        ev.side = -1.0;
        offer(ev, (eps - r) / f);
      }
    } else if (x > 0.0 && f > 0.0) {
      ev.side = 1.0;
      offer(ev, (-eps - r) / f);
    } else if (x < 0.0 && f < 0.0) {
      ev.side = -1.0;
      offer(ev, (eps - r) / f);
    }
  }
  return best;
}

/// Moves the event's sample between regions and updates S and its inverse.
template <Task T>
void migrate(DualState<T>& state, PathState& path, const PathEvent& event) {
  if (event.kind == PathEventKind::path_end || event.kind == PathEventKind::rebuild) return;
  const auto p = state.position_of(event.id);
  if (!p) throw Error(Errc::inconsistent_event, "event names unknown id " + std::to_string(event.id));
  if (state.partition[*p] != event.from) {
    throw Error(Errc::inconsistent_event, "event source region does not match sample " + std::to_string(event.id));
  }
  const detail::PositionMap pos = state.position_map();
  if (event.to == Region::S) {
    if (event.kind != PathEventKind::margin_crossing) throw Error(Errc::inconsistent_event, "only crossings enter S");
    auto it = std::find_if(path.movers.begin(), path.movers.end(),
                           [&](const PathMover& m) { return m.id == event.id; });
    if (it != path.movers.end()) {
      if (it->removing) throw Error(Errc::inconsistent_event, "removed samples never enter S");
      path.movers.erase(it);
    }
    state.partition[*p] = Region::S;
    const std::pair<SampleId, double> entering{event.id, event.side};
    detail::update_active_set(state, pos, {}, std::span(&entering, 1));
  } else {
    if (event.from != Region::S) throw Error(Errc::inconsistent_event, "only S members leave S");
    const double d = event.bound - state.multipliers[*p];
    const std::size_t pp = *p;
    detail::apply_delta(state, std::span(&pp, 1), std::span(&d, 1), 0.0);
    state.multipliers[*p] = event.bound;
    state.partition[*p] = event.to;
    const SampleId id = event.id;
    detail::update_active_set(state, pos, std::span(&id, 1), {});
  }
}

namespace detail {

/// Sets up movers: added samples already satisfying their conditions at zero
/// stay in O; the rest head to the bound opposite their error. Removed samples
/// leave S and head to zero.
template <Task T>
PathState start_path(DualState<T>& s, const UpdateBatch& batch) {
  using Tr = DualTraits<T>;
  const double eps = Tr::eps(s.hyper);
  const double lower = Tr::lower(s.hyper);
  check_batch(s, batch);
  const std::size_t n0 = s.samples.size();
  append_samples(s, std::span<const Sample>(batch.add));
  PathState path;
  for (std::size_t p = n0; p < s.samples.size(); ++p) {
    const double r = s.residuals[p];
    if (r + eps < 0.0) {
      path.movers.push_back({s.samples[p].id, s.hyper.C, false});
    } else if (lower < 0.0 && r - eps > 0.0) {
      path.movers.push_back({s.samples[p].id, lower, false});
    }
  }
  std::vector<SampleId> leaving;
  const PositionMap pos = s.position_map();
  for (auto id : batch.remove) {
    path.movers.push_back({id, 0.0, true});
    const std::size_t p = pos.at(id);
    if (s.partition[p] == Region::S) leaving.push_back(id);
    s.partition[p] = region_of_value<T>(s.multipliers[p], s.hyper);
    if (s.partition[p] == Region::S) s.partition[p] = Region::B;  // tag only; its residual is unconstrained
  }
  update_active_set(s, pos, leaving, {});
  return path;
}

/// Drops removed samples, tags movers at their targets and polishes S.
template <Task T>
void finish_path(DualState<T>& s, PathState& path) {
  const PositionMap pos = s.position_map();
  std::vector<std::size_t> gone;
  std::vector<std::size_t> snap_pos;
  std::vector<double> snap;
  for (const auto& mv : path.movers) {
    const std::size_t p = pos.at(mv.id);
    snap_pos.push_back(p);
    snap.push_back(mv.target - s.multipliers[p]);
    if (mv.removing) {
      gone.push_back(p);
    } else {
      s.partition[p] = Region::B;
    }
  }
  // Movers sit within round-off of their targets; make that exact.
  apply_delta(s, snap_pos, snap, 0.0);
  for (const auto& mv : path.movers) s.multipliers[pos.at(mv.id)] = mv.target;
  path.movers.clear();
  std::sort(gone.begin(), gone.end());
  erase_positions(s, gone);
  path.polish_migrations = repair(s, RepairOptions{}).migrations;
  trim_cache(s);
}

template <Task T>
PathState path_update(DualState<T>& s, const UpdateBatch& batch) {
  if (batch.empty()) return {};
  sync_active_set(s);
  PathState path = start_path(s, batch);
  const std::size_t guard = s.samples.size() + batch.add.size() + batch.remove.size();

  while (path.cumulative_eta < 1.0) {
    if (s.active.members.empty()) {
      // Nothing can keep the equality constraint: drop ℛ and retrain on B ∪ 𝒟.
      const PositionMap pos = s.position_map();
      std::vector<std::size_t> gone;
      std::unordered_set<SampleId> added;
      for (const auto& smp : batch.add) added.insert(smp.id);
      for (const auto& mv : path.movers) {
        if (mv.removing) gone.push_back(pos.at(mv.id));
      }
      std::sort(gone.begin(), gone.end());
      erase_positions(s, gone);
      std::vector<std::size_t> subset;
      for (std::size_t i = 0; i < s.samples.size(); ++i) {
        if (s.partition[i] == Region::B || added.count(s.samples[i].id)) subset.push_back(i);
      }
      rebuild_from_subset(s, subset);
      repair(s, RepairOptions{});
      trim_cache(s);
      PathEvent ev;
      ev.kind = PathEventKind::rebuild;
      ev.eta = 1.0 - path.cumulative_eta;
      ev.cumulative_eta = 1.0;
      path.log.push_back(ev);
      path.cumulative_eta = 1.0;
      path.movers.clear();
      return path;
    }

    const PathDirections dir = path_direction(s, path);
    const std::vector<double> phi = sensitivity_phi(s, path, dir);
    PathEvent ev = step_select(s, path, phi, dir, 1.0);
    const double eta = ev.eta;

    if (eta <= kTinyStep && ev.kind != PathEventKind::path_end) {
      if (++path.tiny_steps > guard) throw Error(Errc::stalled_path, "path makes no progress");
    } else {
      path.tiny_steps = 0;
    }

    if (eta > 0.0) {
      const PositionMap pos = s.position_map();
      std::vector<std::size_t> positions;
      std::vector<double> deltas;
      for (std::size_t a = 0; a < s.active.members.size(); ++a) {
        positions.push_back(pos.at(s.active.members[a]));
        deltas.push_back(eta * dir.dx_s[a]);
      }
      for (std::size_t m = 0; m < path.movers.size(); ++m) {
        positions.push_back(pos.at(path.movers[m].id));
        deltas.push_back(eta * dir.dx_movers[m]);
      }
      apply_delta(s, positions, deltas, eta * dir.db);
    }
    path.cumulative_eta = ev.kind == PathEventKind::path_end
                              ? 1.0
                              : std::min(1.0, path.cumulative_eta + (1.0 - path.cumulative_eta) * eta);
    ev.cumulative_eta = path.cumulative_eta;
    path.log.push_back(ev);
    if (ev.kind == PathEventKind::path_end) break;
    migrate(s, path, ev);
  }
  finish_path(s, path);
  return path;
}

}  // namespace detail

/// Step-size/bookkeeping update: moves the batch along a piecewise-linear
/// solution path, stopping at every region change.
inline PathState path_update_svm(SvmState& state, const UpdateBatch& batch) { return detail::path_update(state, batch); }

inline PathState path_update_svr(SvrState& state, const UpdateBatch& batch) { return detail::path_update(state, batch); }

}  // namespace ridgesvm

#endif  // RIDGESVM_BASELINE_PATH_HPP
