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

#ifndef RIDGESVM_BATCH_SOLVER_HPP
#define RIDGESVM_BATCH_SOLVER_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <list>
#include <numeric>
#include <random>
#include <sstream>
#include <vector>

#include "ridgesvm/detail/active_set.hpp"
#include "ridgesvm/model.hpp"

namespace ridgesvm {

struct SolverConfig {
  double kkt_tolerance = 1e-6;
  std::size_t max_passes = 10000;  // iteration budget is max_passes × n
  std::uint64_t seed = 0;
};

namespace detail {

/// LRU cache of K + ρI columns for the pairwise solver.
class LruColumns {
 public:
  LruColumns(std::span<const Sample> samples, const KernelSpec& spec, std::size_t budget_bytes)
      : samples_(samples), spec_(spec), slots_(samples.size()) {
    const std::size_t per_col = std::max<std::size_t>(1, samples.size() * sizeof(double));
    capacity_ = std::max<std::size_t>(2, budget_bytes / per_col);
  }

  const Vector& get(std::size_t i) {
    auto& slot = slots_[i];
    if (slot.col.size() > 0) {
      order_.splice(order_.begin(), order_, slot.it);
      return slot.col;
    }
    if (order_.size() >= capacity_) {
      const std::size_t victim = order_.back();
      order_.pop_back();
      slots_[victim].col = Vector();
    }
    Vector col(static_cast<Eigen::Index>(samples_.size()));
    const auto& x = samples_[i].features;
    for (std::size_t j = 0; j < samples_.size(); ++j) {
      col(static_cast<Eigen::Index>(j)) = kernel_eval(samples_[j].features, x, spec_);
    }
    col(static_cast<Eigen::Index>(i)) += spec_.ridge;
    order_.push_front(i);
    slot.it = order_.begin();
    slot.col = std::move(col);
    return slot.col;
  }

 private:
  struct Slot {
    Vector col;
    std::list<std::size_t>::iterator it;
  };
  std::span<const Sample> samples_;
  KernelSpec spec_;
  std::vector<Slot> slots_;
  std::list<std::size_t> order_;
  std::size_t capacity_ = 2;
};

/*
 * Exact minimizer over t ∈ [0, t_max] of
 *   ½ a t² + g t + ε (|z_i + t| + |z_j − t|),
 * a convex piecewise quadratic with kinks at t = −z_i and t = z_j.
 */
inline double pair_step(double a, double g, double eps, double zi, double zj, double t_max) {
  std::vector<double> cuts{0.0};
  if (eps > 0.0) {
    for (double k : {-zi, zj}) {
      if (k > 0.0 && k < t_max) cuts.push_back(k);
    }
  }
  cuts.push_back(t_max);
  std::sort(cuts.begin(), cuts.end());
  auto sgn = [](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); };
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double t0 = cuts[s];
    const double t1 = cuts[s + 1];
    if (t1 <= t0) continue;
    const double mid = 0.5 * (t0 + t1);
    const double lin = g + eps * (sgn(zi + mid) - sgn(zj - mid));
    const double t_star = std::clamp(-lin / a, t0, t1);
    if (t_star < t1) return t_star;
  }
  return t_max;
}

/*
 * Pairwise coordinate descent (maximal-violating pair) on
 *   min ½ zᵀ(K + ρI)z − c̃ᵀz + ε Σ|z_i|,  Σ z = 0,  zlo ≤ z ≤ zhi,
 * where z_i = v_i x_i. Returns z and b.
 */
struct PairSolution {
  std::vector<double> z;
  double bias = 0.0;
  std::size_t iterations = 0;
};

inline PairSolution solve_pairwise(std::span<const Sample> samples, const KernelSpec& spec,
                                   std::span<const double> c_tilde, std::span<const double> zlo,
                                   std::span<const double> zhi, double eps, const SolverConfig& cfg) {
  const std::size_t n = samples.size();
  LruColumns cols(samples, spec, std::size_t{256} << 20);
  std::vector<double> z(n, 0.0);
  std::vector<double> grad(c_tilde.begin(), c_tilde.end());
  for (auto& g : grad) g = -g;

  // Scan order fixed by the seed; ties resolve to the earliest index in it.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (cfg.seed != 0) {
    std::mt19937_64 rng(cfg.seed);
    std::shuffle(order.begin(), order.end(), rng);
  }

  const double inf = std::numeric_limits<double>::infinity();
  const std::size_t budget = cfg.max_passes * std::max<std::size_t>(n, 1);
  auto up_value = [&](std::size_t i) { return -(grad[i] + eps * (z[i] >= 0.0 ? 1.0 : -1.0)); };
  auto down_value = [&](std::size_t j) { return -(grad[j] + eps * (z[j] > 0.0 ? 1.0 : -1.0)); };

  PairSolution out;
  double gap = inf;
  for (; out.iterations < budget; ++out.iterations) {
    double best_up = -inf;
    double best_down = inf;
    std::size_t i = n;
    std::size_t j = n;
    for (std::size_t k : order) {
      if (z[k] < zhi[k]) {
        const double u = up_value(k);
        if (u > best_up) {
          best_up = u;
          i = k;
        }
      }
      if (z[k] > zlo[k]) {
        const double w = down_value(k);
        if (w < best_down) {
          best_down = w;
          j = k;
        }
      }
    }
    gap = best_up - best_down;
    if (i == n || j == n || gap < cfg.kkt_tolerance) break;

    const Vector& qi = cols.get(i);
    const Vector& qj = cols.get(j);
    double a = qi(static_cast<Eigen::Index>(i)) + qj(static_cast<Eigen::Index>(j)) -
               2.0 * qi(static_cast<Eigen::Index>(j));
    a = std::max(a, 1e-12);
    const double t_max = std::min(zhi[i] - z[i], z[j] - zlo[j]);
    double t = pair_step(a, grad[i] - grad[j], eps, z[i], z[j], t_max);
    if (t <= 0.0) t = std::min(t_max, 1e-15);
    // Snap to bounds to keep the box exact.
    double zi_new = z[i] + t;
    double zj_new = z[j] - t;
    if (t == zhi[i] - z[i]) zi_new = zhi[i];
    if (t == z[j] - zlo[j]) zj_new = zlo[j];
    const double ti = zi_new - z[i];
    const double tj = z[j] - zj_new;
    z[i] = zi_new;
    z[j] = zj_new;
    const Vector& ci = cols.get(i);
    for (std::size_t k = 0; k < n; ++k) grad[k] += ti * ci(static_cast<Eigen::Index>(k));
    const Vector& cj = cols.get(j);
    for (std::size_t k = 0; k < n; ++k) grad[k] -= tj * cj(static_cast<Eigen::Index>(k));
  }
  if (!(gap < cfg.kkt_tolerance)) {
    std::ostringstream os;
    os << "pairwise solver stopped after " << out.iterations << " iterations with KKT gap " << gap;
    throw Error(Errc::no_convergence, os.str());
  }

  // b: mean over unbounded, nonzero z of −F_i − ε sgn(z_i); otherwise the midpoint
  // of the feasible interval [max up-value, min down-value].
  double sum = 0.0;
  std::size_t cnt = 0;
  double lo = -inf;
  double hi = inf;
  for (std::size_t k = 0; k < n; ++k) {
    if (z[k] > zlo[k] && z[k] < zhi[k] && z[k] != 0.0) {
      sum += -grad[k] - eps * (z[k] > 0.0 ? 1.0 : -1.0);
      ++cnt;
    }
    if (z[k] < zhi[k]) lo = std::max(lo, up_value(k));
    if (z[k] > zlo[k]) hi = std::min(hi, down_value(k));
  }
  if (cnt > 0) {
    out.bias = sum / static_cast<double>(cnt);
  } else if (std::isfinite(lo) && std::isfinite(hi)) {
    out.bias = 0.5 * (lo + hi);
  } else if (std::isfinite(lo)) {
    out.bias = lo;
  } else if (std::isfinite(hi)) {
    out.bias = hi;
  }
  out.z = std::move(z);
  return out;
}

/// Runs the pairwise solver on `samples` and packs the result into a state.
template <Task T>
DualState<T> train_dual(std::vector<Sample> samples, const KernelSpec& spec, const Hyperparams& hyper,
                        const SolverConfig& cfg) {
  using Tr = DualTraits<T>;
  spec.validate();
  hyper.validate();
  const std::size_t n = samples.size();
  std::vector<double> c_tilde(n), zlo(n), zhi(n);
  const double lower = Tr::lower(hyper);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = Tr::border(samples[i]);
    c_tilde[i] = v * Tr::linear(samples[i]);
    const double a = v * lower;
    const double b = v * hyper.C;
    zlo[i] = std::min(a, b);
    zhi[i] = std::max(a, b);
  }
  const PairSolution sol = solve_pairwise(samples, spec, c_tilde, zlo, zhi, Tr::eps(hyper), cfg);

  DualState<T> state;
  state.kernel = spec;
  state.hyper = hyper;
  state.samples = std::move(samples);
  state.multipliers.resize(n);
  for (std::size_t i = 0; i < n; ++i) state.multipliers[i] = Tr::border(state.samples[i]) * sol.z[i];
  state.bias = sol.bias;
  state.residuals = compute_residuals(state);
  state.partition = partition_from_values(state);
  rebuild_active_set(state);
  return state;
}

}  // namespace detail

/// Nonincremental Ridge SVM training by pairwise coordinate ascent on the dual.
inline SvmState train_svm_batch(std::vector<Sample> samples, const KernelSpec& spec, const Hyperparams& hyper,
                                const SolverConfig& config = {}) {
  if (samples.size() < 2) throw Error(Errc::single_class_input, "need at least two samples");
  bool pos = false;
  bool neg = false;
  for (const auto& s : samples) {
    if (s.target == 1.0) {
      pos = true;
    } else if (s.target == -1.0) {
      neg = true;
    } else {
      throw Error(Errc::label_domain_error, "classification labels must be +1/-1");
    }
  }
  if (!pos || !neg) throw Error(Errc::single_class_input, "both classes must be present");
  return detail::train_dual<Task::classification>(std::move(samples), spec, hyper, config);
}

/// Nonincremental Ridge SVR training over θ with box [−C, C].
inline SvrState train_svr_batch(std::vector<Sample> samples, const KernelSpec& spec, const Hyperparams& hyper,
                                const SolverConfig& config = {}) {
  if (samples.size() < 2) throw Error(Errc::no_convergence, "need at least two samples");
  return detail::train_dual<Task::regression>(std::move(samples), spec, hyper, config);
}

template <Task T>
DualState<T> train_batch(std::vector<Sample> samples, const KernelSpec& spec, const Hyperparams& hyper,
                         const SolverConfig& config = {}) {
  if constexpr (T == Task::classification) {
    return train_svm_batch(std::move(samples), spec, hyper, config);
  } else {
    return train_svr_batch(std::move(samples), spec, hyper, config);
  }
}

/// Dual objective value (to be maximized): cᵀx − ½xᵀQx − ε Σ|x|.
template <Task T>
double dual_objective(const DualState<T>& state) {
  using Tr = DualTraits<T>;
  const std::size_t n = state.samples.size();
  double lin = 0.0;
  double quad = 0.0;
  double l1 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = state.multipliers[i];
    lin += Tr::linear(state.samples[i]) * xi;
    l1 += std::abs(xi);
    if (xi == 0.0) continue;
    const double vi = Tr::border(state.samples[i]);
    for (std::size_t j = 0; j < n; ++j) {
      const double xj = state.multipliers[j];
      if (xj == 0.0) continue;
      double k = kernel_eval(state.samples[i].features, state.samples[j].features, state.kernel);
      if (i == j) k += state.kernel.ridge;
      quad += vi * Tr::border(state.samples[j]) * xi * xj * k;
    }
  }
  return lin - 0.5 * quad - Tr::eps(state.hyper) * l1;
}

}  // namespace ridgesvm

#endif  // RIDGESVM_BATCH_SOLVER_HPP
