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

#ifndef RIDGESVM_MODEL_HPP
#define RIDGESVM_MODEL_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ridgesvm/detail/column_cache.hpp"
#include "ridgesvm/error.hpp"
#include "ridgesvm/kernels.hpp"
#include "ridgesvm/linalg.hpp"

namespace ridgesvm {

using SampleId = std::uint64_t;

struct Sample {
  SampleId id = 0;
  FeatureVector features;
  double target = 0.0;  // ±1 for classification, standardized real for regression
};

struct Hyperparams {
  double C = 1.0;
  double epsilon = 0.0;  // tube half-width, regression only

  void validate() const {
    if (!(C > 0.0) || !std::isfinite(C)) throw Error(Errc::invalid_hyperparams, "C must be > 0");
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
      throw Error(Errc::invalid_hyperparams, "epsilon must be >= 0");
    }
  }
  bool operator==(const Hyperparams&) const = default;
};

/// KKT region: unbounded SV, bounded SV, non-SV.
enum class Region : std::uint8_t { S, B, O };

constexpr std::string_view to_string(Region r) {
  switch (r) {
    case Region::S: return "S";
    case Region::B: return "B";
    case Region::O: return "O";
  }
  return "?";
}

inline Region region_from_string(std::string_view s) {
  if (s == "S") return Region::S;
  if (s == "B") return Region::B;
  if (s == "O") return Region::O;
  throw Error(Errc::corrupt_file, "unknown region tag '" + std::string(s) + "'");
}

enum class Task { classification, regression };

constexpr std::string_view to_string(Task t) {
  return t == Task::classification ? "classification" : "regression";
}

/// Samples to add (fresh ids) and ids to remove, applied atomically.
struct UpdateBatch {
  std::vector<Sample> add;
  std::vector<SampleId> remove;

  bool empty() const { return add.empty() && remove.empty(); }
};

/// S members in solve order with Q_S⁻¹ and the bordered inverse factored from it.
/// `sides` holds the sign each member's multiplier keeps while it is in S
/// (always +1 for classification). Q_S⁻¹ lives in the lower triangle of the
/// leading |S|×|S| block of `inv_store`; the remainder is spare capacity.
struct ActiveSet {
  std::vector<SampleId> members;
  std::vector<double> sides;
  DenseMatrix inv_store;
  BorderedFactor bordered;
  std::size_t incremental_updates = 0;

  Eigen::Index order() const { return static_cast<Eigen::Index>(members.size()); }

  auto q_inv() const { return inv_store.topLeftCorner(order(), order()).template selfadjointView<Eigen::Lower>(); }

  /// Full symmetric copy of Q_S⁻¹.
  DenseMatrix q_inv_dense() const {
    DenseMatrix out(order(), order());
    out = q_inv();
    return out;
  }

  /// Applies the bordered inverse: M [Δb; Δx_S] = rhs.
  Vector solve(const Vector& rhs) const { return bordered.solve(q_inv(), rhs); }
};

/*
 * Per-task view of the dual. Both problems are written as
 *
 *   min ½ xᵀ Q x − cᵀ x + ε Σ|x_i|   s.t.  vᵀ x = 0,  lower ≤ x ≤ C,
 *   Q = v vᵀ ⊙ (K + ρI),
 *
 * with residual r_i = (Q x)_i + v_i b − c_i. For classification x = α, v = y,
 * c = 1, ε = 0, lower = 0 and r is the margin G. For regression x = θ, v = 1,
 * c = y, lower = −C and r is the training-form error 𝔉.
 */
template <Task T>
struct DualTraits;

template <>
struct DualTraits<Task::classification> {
  static double border(const Sample& s) { return s.target; }
  static double linear(const Sample&) { return 1.0; }
  static double lower(const Hyperparams&) { return 0.0; }
  static double eps(const Hyperparams&) { return 0.0; }
};

template <>
struct DualTraits<Task::regression> {
  static double border(const Sample&) { return 1.0; }
  static double linear(const Sample& s) { return s.target; }
  static double lower(const Hyperparams& h) { return -h.C; }
  static double eps(const Hyperparams& h) { return h.epsilon; }
};

/// Model state shared by the classification and regression variants.
///   multipliers: α (classification) or θ = α − α* (regression)
///   residuals:   margins G_i or training-form errors 𝔉_i
template <Task kTask>
struct DualState {
  static constexpr Task task = kTask;
  using Traits = DualTraits<kTask>;

  KernelSpec kernel;
  Hyperparams hyper;
  std::vector<Sample> samples;
  std::vector<double> multipliers;
  double bias = 0.0;
  std::vector<double> residuals;
  std::vector<Region> partition;
  ActiveSet active;
  detail::ColumnCache columns;

  std::size_t size() const { return samples.size(); }

  std::optional<std::size_t> position_of(SampleId id) const {
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (samples[i].id == id) return i;
    }
    return std::nullopt;
  }

  std::unordered_map<SampleId, std::size_t> position_map() const {
    std::unordered_map<SampleId, std::size_t> m;
    m.reserve(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) m.emplace(samples[i].id, i);
    return m;
  }

  std::size_t count(Region r) const {
    std::size_t n = 0;
    for (auto p : partition) n += (p == r);
    return n;
  }
};

using SvmState = DualState<Task::classification>;
using SvrState = DualState<Task::regression>;

// Evaluation ---------------------------------------------------------------

/// Test-point decision value: Σ_j v_j x_j K(x, x_j) + b. No ridge self-term.
template <Task T>
double decision_value(std::span<const double> x, const DualState<T>& state) {
  double f = state.bias;
  for (std::size_t j = 0; j < state.samples.size(); ++j) {
    const double m = state.multipliers[j];
    if (m == 0.0) continue;
    f += DualTraits<T>::border(state.samples[j]) * m * kernel_eval(x, state.samples[j].features, state.kernel);
  }
  return f;
}

/// Training-index decision value; adds the ridge self-term ρ v_i x_i so that
/// residuals agree with the Q diagonal.
template <Task T>
double decision_value_at(const DualState<T>& state, std::size_t index) {
  return decision_value(state.samples[index].features, state) +
         state.kernel.ridge * DualTraits<T>::border(state.samples[index]) * state.multipliers[index];
}

template <Task T>
std::vector<double> decision_values(std::span<const FeatureVector> xs, const DualState<T>& state) {
  std::vector<double> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(decision_value(x, state));
  return out;
}

/// Residuals recomputed from scratch: r_i = v_i f_i − c_i with training-form f.
template <Task T>
std::vector<double> compute_residuals(const DualState<T>& state) {
  using Tr = DualTraits<T>;
  const std::size_t n = state.samples.size();
  std::vector<double> f(n, state.bias);
  for (std::size_t j = 0; j < n; ++j) {
    const double m = state.multipliers[j];
    if (m == 0.0) continue;
    const double w = Tr::border(state.samples[j]) * m;
    const auto& xj = state.samples[j].features;
    for (std::size_t i = 0; i < n; ++i) f[i] += w * kernel_eval(state.samples[i].features, xj, state.kernel);
    f[j] += state.kernel.ridge * w;
  }
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i) {
    r[i] = Tr::border(state.samples[i]) * f[i] - Tr::linear(state.samples[i]);
  }
  return r;
}

/// G_i = Σ_j Q_ij α_j + y_i b − 1.
inline std::vector<double> compute_margins_svm(const SvmState& state) { return compute_residuals(state); }

/// 𝔉_i = Σ_j 𝒬_ij θ_j − y_i + b.
inline std::vector<double> compute_outputs_svr(const SvrState& state) { return compute_residuals(state); }

// Region classification ----------------------------------------------------

inline constexpr double kRegionTolerance = 1e-6;
inline constexpr double kHardViolation = 1e-3;
inline constexpr double kBoundTolerance = 1e-9;

inline std::vector<Region> classify_regions_svm(std::span<const double> alpha, std::span<const double> margins,
                                                double C) {
  if (alpha.size() != margins.size()) {
    throw Error(Errc::dimension_mismatch, "classify_regions_svm: size mismatch");
  }
  std::vector<Region> out(alpha.size());
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    const double a = alpha[i];
    const double g = margins[i];
    const bool at_upper = a >= C - kBoundTolerance;
    const bool at_lower = a <= kBoundTolerance;
    if (at_upper || at_lower) {
      out[i] = std::abs(g) <= kRegionTolerance ? Region::S : (at_upper ? Region::B : Region::O);
      continue;
    }
    if (std::abs(g) > kHardViolation) {
      std::ostringstream os;
      os << "sample " << i << " has interior alpha " << a << " but margin " << g;
      throw Error(Errc::inconsistent_state, os.str());
    }
    out[i] = Region::S;
  }
  return out;
}

inline std::vector<Region> classify_regions_svr(std::span<const double> theta, std::span<const double> outputs,
                                                double C, double epsilon) {
  if (theta.size() != outputs.size()) {
    throw Error(Errc::dimension_mismatch, "classify_regions_svr: size mismatch");
  }
  std::vector<Region> out(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double t = theta[i];
    const double f = outputs[i];
    const double gap = std::abs(std::abs(f) - epsilon);
    const bool at_bound = std::abs(t) >= C - kBoundTolerance;
    const bool at_zero = std::abs(t) <= kBoundTolerance;
    if (at_bound || at_zero) {
      out[i] = gap <= kRegionTolerance ? Region::S : (at_bound ? Region::B : Region::O);
      continue;
    }
    // Interior θ sits on the tube edge opposite its sign: θ < 0 ⇔ 𝔉 = +ε.
    const double signed_gap = t < 0.0 ? std::abs(f - epsilon) : std::abs(f + epsilon);
    if (signed_gap > kHardViolation) {
      std::ostringstream os;
      os << "sample " << i << " has interior theta " << t << " but output error " << f;
      throw Error(Errc::inconsistent_state, os.str());
    }
    out[i] = Region::S;
  }
  return out;
}

// Validation ---------------------------------------------------------------

struct Violation {
  std::string invariant;
  std::size_t index = 0;  // sample position, or state size for global invariants
  double magnitude = 0.0;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }

  /// Largest violation magnitude (0 when clean).
  double worst() const {
    double w = 0.0;
    for (const auto& v : violations) w = std::max(w, v.magnitude);
    return w;
  }

  std::string summary() const {
    std::ostringstream os;
    for (const auto& v : violations) os << v.invariant << " [" << v.index << "] " << v.magnitude << "\n";
    return os.str();
  }
};

/// Largest KKT residual of a state (0 at an exact optimum). Used for reporting.
template <Task T>
double kkt_residual(const DualState<T>& state, std::span<const double> residuals);

/// Checks every state invariant at `tol`, recomputing residuals from scratch.
template <Task T>
ValidationReport validate(const DualState<T>& state, double tol = kRegionTolerance) {
  using Tr = DualTraits<T>;
  ValidationReport rep;
  const std::size_t n = state.samples.size();
  auto add = [&](std::string what, std::size_t idx, double mag) {
    rep.violations.push_back({std::move(what), idx, mag});
  };
  if (state.multipliers.size() != n || state.partition.size() != n || state.residuals.size() != n) {
    add("layout: multipliers/partition/residuals sizes differ from sample count", n, 1.0);
    return rep;
  }
  std::unordered_set<SampleId> ids;
  for (std::size_t i = 0; i < n; ++i) {
    if (!ids.insert(state.samples[i].id).second) add("duplicate sample id", i, 1.0);
    if constexpr (T == Task::classification) {
      const double y = state.samples[i].target;
      if (y != 1.0 && y != -1.0) add("classification target not in {-1,+1}", i, std::abs(y));
    }
  }

  const double C = state.hyper.C;
  const double lower = Tr::lower(state.hyper);
  const double eps = Tr::eps(state.hyper);

  double balance = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = state.multipliers[i];
    balance += Tr::border(state.samples[i]) * x;
    if (x < lower - kBoundTolerance) add("box constraint: multiplier below lower bound", i, lower - x);
    if (x > C + kBoundTolerance) add("box constraint: multiplier above C", i, x - C);
  }
  if (std::abs(balance) > 1e-9) add("orthogonal-hyperplane property: sum of signed multipliers", n, std::abs(balance));

  const std::vector<double> r = compute_residuals(state);
  for (std::size_t i = 0; i < n; ++i) {
    const double drift = std::abs(r[i] - state.residuals[i]);
    if (drift > tol) add("cached residual drift", i, drift);
  }

  for (std::size_t i = 0; i < n; ++i) {
    const double x = state.multipliers[i];
    const double ri = r[i];
    switch (state.partition[i]) {
      case Region::S: {
        // Interior multiplier, residual pinned at −ε·sign(x).
        const double target = x < 0.0 ? eps : -eps;
        const double gap = (x == 0.0 && eps > 0.0) ? std::abs(std::abs(ri) - eps) : std::abs(ri - target);
        if (gap > tol) add("region S: active constraint not satisfied", i, gap);
        break;
      }
      case Region::B: {
        const bool upper = x > 0.0;
        const double dist = upper ? std::abs(x - C) : std::abs(x - lower);
        if (dist > kBoundTolerance || (!upper && lower == 0.0)) add("region B: multiplier not at its bound", i, std::max(dist, kBoundTolerance));
        const double viol = upper ? (ri + eps) : (eps - ri);
        if (viol > tol) add("region B: residual on wrong side", i, viol);
        break;
      }
      case Region::O: {
        if (std::abs(x) > kBoundTolerance) add("region O: multiplier not zero", i, std::abs(x));
        const double viol = lower < 0.0 ? std::abs(ri) - eps : -(ri + eps);
        if (viol > tol) add("region O: residual on wrong side", i, viol);
        break;
      }
    }
  }
  return rep;
}

template <Task T>
double kkt_residual(const DualState<T>& state, std::span<const double> r) {
  using Tr = DualTraits<T>;
  const double C = state.hyper.C;
  const double lower = Tr::lower(state.hyper);
  const double eps = Tr::eps(state.hyper);
  double worst = 0.0;
  double balance = 0.0;
  for (std::size_t i = 0; i < state.samples.size(); ++i) {
    const double x = state.multipliers[i];
    balance += Tr::border(state.samples[i]) * x;
    double v = 0.0;
    if (x >= C - kBoundTolerance) {
      v = std::max(0.0, r[i] + eps);
    } else if (x <= lower + kBoundTolerance && lower < 0.0) {
      v = std::max(0.0, eps - r[i]);
    } else if (std::abs(x) <= kBoundTolerance) {
      v = lower < 0.0 ? std::max(0.0, std::abs(r[i]) - eps) : std::max(0.0, -(r[i] + eps));
    } else {
      v = std::abs(r[i] - (x < 0.0 ? eps : -eps));
    }
    worst = std::max(worst, v);
  }
  return std::max(worst, std::abs(balance));
}

}  // namespace ridgesvm

#endif  // RIDGESVM_MODEL_HPP
