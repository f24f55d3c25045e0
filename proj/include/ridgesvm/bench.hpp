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


#ifndef RIDGESVM_BENCH_HPP
#define RIDGESVM_BENCH_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <map>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ridgesvm/baseline_path.hpp"
#include "ridgesvm/batch_solver.hpp"
#include "ridgesvm/datakit.hpp"
#include "ridgesvm/model.hpp"
#include "ridgesvm/online_svm.hpp"
#include "ridgesvm/online_svr.hpp"

namespace ridgesvm {

// ---------------------------------------------------------------------------
// Synthetic data

/// Two isotropic Gaussians in `dim` dimensions centred at ±shift·1, labels alternating ±1.
inline std::vector<Sample> two_gaussians(std::size_t n, std::uint64_t seed, double shift = 0.8, std::size_t dim = 2,
                                         SampleId first_id = 0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise;
  std::vector<Sample> out;
  for (std::size_t i = 0; i < n; ++i) {
    const double y = i % 2 == 0 ? 1.0 : -1.0;
    Sample s{first_id + i, FeatureVector(dim), y};
    for (auto& f : s.features) f = y * shift + noise(rng);
    out.push_back(std::move(s));
  }
  return out;
}

/// y = sin(x) + noise with x uniform on [−π, π].
inline std::vector<Sample> noisy_sine(std::size_t n, std::uint64_t seed, double noise_sd = 0.1, SampleId first_id = 0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(-std::numbers::pi, std::numbers::pi);
  std::normal_distribution<double> noise(0.0, noise_sd);
  std::vector<Sample> out;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = ux(rng);
    out.push_back({first_id + i, {x}, std::sin(x) + noise(rng)});
  }
  return out;
}

/// Stand-in for the skin-segmentation data: B, G, R values in [0, 255] where
/// about a fifth of the rows are skin tones drawn around a few warm centres and
/// the rest are broad background colours. Labels are ±1 (+1 = skin).
inline std::vector<Sample> skin_like(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise;
  const double skin[3][3] = {{120, 160, 220}, {90, 130, 190}, {150, 180, 235}};
  const double back[4][3] = {{60, 60, 60}, {200, 200, 200}, {150, 90, 40}, {40, 140, 60}};
  std::vector<Sample> out;
  for (std::size_t i = 0; i < n; ++i) {
    const bool is_skin = unit(rng) < 0.21;
    FeatureVector f(3);
    if (is_skin) {
      const auto& c = skin[static_cast<std::size_t>(unit(rng) * 3) % 3];
      for (int j = 0; j < 3; ++j) f[static_cast<std::size_t>(j)] = c[j] + 15.0 * noise(rng);
    } else {
      const auto& c = back[static_cast<std::size_t>(unit(rng) * 4) % 4];
      for (int j = 0; j < 3; ++j) f[static_cast<std::size_t>(j)] = c[j] + 45.0 * noise(rng);
    }
    for (auto& v : f) v = std::clamp(std::round(v), 0.0, 255.0);
    out.push_back({i, std::move(f), is_skin ? 1.0 : -1.0});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Metrics

/// Percentage of samples whose decision value has the sign of the label.
template <Task T>
double accuracy(const DualState<T>& s, std::span<const Sample> test) {
  if (test.empty()) throw Error(Errc::dimension_mismatch, "empty test set");
  std::size_t hit = 0;
  for (const auto& t : test) hit += (decision_value(t.features, s) >= 0.0 ? 1.0 : -1.0) == t.target;
  return 100.0 * static_cast<double>(hit) / static_cast<double>(test.size());
}

template <Task T>
double mean_squared_error(const DualState<T>& s, std::span<const Sample> test) {
  if (test.empty()) throw Error(Errc::dimension_mismatch, "empty test set");
  double acc = 0.0;
  for (const auto& t : test) {
    const double e = decision_value(t.features, s) - t.target;
    acc += e * e;
  }
  return acc / static_cast<double>(test.size());
}

/// Accuracy (%) for classification, MSE for regression.
template <Task T>
double task_metric(const DualState<T>& s, std::span<const Sample> test) {
  if constexpr (T == Task::classification) {
    return accuracy(s, test);
  } else {
    return mean_squared_error(s, test);
  }
}

template <Task T>
double max_prediction_gap(const DualState<T>& a, const DualState<T>& b, std::span<const Sample> points) {
  double gap = 0.0;
  for (const auto& p : points) {
    gap = std::max(gap, std::abs(decision_value(p.features, a) - decision_value(p.features, b)));
  }
  return gap;
}

// ---------------------------------------------------------------------------
// Weight-error curve

struct WecPoint {
  SampleId id = 0;
  double output = 0.0;  // test-form decision value f
  double error = 0.0;   // y·f for classification, f − y for regression
  double multiplier = 0.0;
  double label = 0.0;
  Region region = Region::O;
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t points = 0;
  /// Abscissa where the fitted line crosses zero.
  double zero_crossing() const { return -intercept / slope; }
};

template <Task T>
std::vector<WecPoint> wec_points(const DualState<T>& s) {
  std::vector<WecPoint> out;
  for (std::size_t i = 0; i < s.samples.size(); ++i) {
    const auto& smp = s.samples[i];
    const double f = decision_value(smp.features, s);
    const double e = T == Task::classification ? smp.target * f : f - smp.target;
    out.push_back({smp.id, f, e, s.multipliers[i], smp.target, s.partition[i]});
  }
  return out;
}

/// Least-squares line multiplier = slope·error + intercept over the selected points.
template <class Pred>
LineFit fit_wec(std::span<const WecPoint> pts, Pred&& keep) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (const auto& p : pts) {
    if (!keep(p)) continue;
    sx += p.error;
    sy += p.multiplier;
    sxx += p.error * p.error;
    sxy += p.error * p.multiplier;
    ++n;
  }
  LineFit fit;
  fit.points = n;
  const double dn = static_cast<double>(n);
  const double den = dn * sxx - sx * sx;
  if (n < 2 || den == 0.0) return fit;
  fit.slope = (dn * sxy - sx * sy) / den;
  fit.intercept = (sy - fit.slope * sx) / dn;
  return fit;
}

/// Fits of the S-region ramp: one line for classification; for regression the
/// positive (θ > 0) and negative (θ < 0) branches separately.
struct WecSummary {
  LineFit positive;
  LineFit negative;
};

inline WecSummary summarize_wec(std::span<const WecPoint> pts) {
  WecSummary out;
  out.positive = fit_wec(pts, [](const WecPoint& p) { return p.region == Region::S && p.multiplier > 0.0; });
  out.negative = fit_wec(pts, [](const WecPoint& p) { return p.region == Region::S && p.multiplier < 0.0; });
  return out;
}

inline void write_wec_csv(std::ostream& os, std::span<const WecPoint> pts) {
  os << "id,output,error,multiplier,label,region\n" << std::setprecision(17);
  for (const auto& p : pts) {
    os << p.id << ',' << p.output << ',' << p.error << ',' << p.multiplier << ',' << p.label << ','
       << to_string(p.region) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Round benchmark

enum class Arm { proposed, baseline, retrain };

constexpr std::string_view to_string(Arm a) {
  switch (a) {
    case Arm::proposed: return "proposed";
    case Arm::baseline: return "baseline";
    case Arm::retrain: return "retrain";
  }
  return "?";
}

struct BenchRecord {
  std::size_t round = 0;
  Arm arm = Arm::proposed;
  std::size_t samples = 0;
  double wall_seconds = 0.0;
  double cumulative_seconds = 0.0;
  double metric = 0.0;  // accuracy % or MSE
};

struct BenchReport {
  std::vector<BenchRecord> records;
  std::map<std::string, std::string> metadata;
  double parity_gap = 0.0;
  bool parity_pass = true;
  bool complete = true;
  std::string failure;
};

struct BenchConfig {
  std::vector<Arm> arms{Arm::proposed, Arm::baseline, Arm::retrain};
  RoundSchedule schedule;
  double parity_tolerance = 1e-3;
};

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Applies a batch to a plain sample list (the retrain arm's view of the model).
inline void apply_batch(std::vector<Sample>& samples, const UpdateBatch& b) {
  std::unordered_set<SampleId> drop(b.remove.begin(), b.remove.end());
  std::erase_if(samples, [&](const Sample& s) { return drop.count(s.id) != 0; });
  samples.insert(samples.end(), b.add.begin(), b.add.end());
}

}  // namespace detail

/// Runs the same schedule through every arm from the same initial model.
/// Each round's update (or retrain) is timed with a monotonic clock; data
/// preparation is excluded. Predictions of all arms on `test` must agree
/// within `parity_tolerance` after every round.
template <Task T>
BenchReport run_bench(const DualState<T>& initial, std::span<const Sample> pool, std::span<const Sample> test,
                      const BenchConfig& cfg) {
  BenchReport rep;
  rep.metadata["task"] = std::string(to_string(T));
  rep.metadata["kernel"] = std::string(to_string(initial.kernel.family));
  rep.metadata["rho"] = std::to_string(initial.kernel.ridge);
  rep.metadata["C"] = std::to_string(initial.hyper.C);
  rep.metadata["epsilon"] = std::to_string(initial.hyper.epsilon);
  rep.metadata["seed"] = std::to_string(cfg.schedule.seed);
  rep.metadata["schedule"] = std::to_string(cfg.schedule.rounds) + "x(+" + std::to_string(cfg.schedule.add_per_round) +
                             "/-" + std::to_string(cfg.schedule.remove_per_round) + ")";
  rep.metadata["initial_samples"] = std::to_string(initial.samples.size());

  std::vector<SampleId> ids;
  for (const auto& s : initial.samples) ids.push_back(s.id);
  const auto batches = schedule_rounds(pool, ids, cfg.schedule);

  std::vector<DualState<T>> models(cfg.arms.size(), initial);
  std::vector<std::vector<Sample>> plain(cfg.arms.size(), initial.samples);
  std::vector<double> cumulative(cfg.arms.size(), 0.0);
  try {
    for (std::size_t r = 0; r < batches.size(); ++r) {
      for (std::size_t a = 0; a < cfg.arms.size(); ++a) {
        const auto t0 = std::chrono::steady_clock::now();
        switch (cfg.arms[a]) {
          case Arm::proposed:
            if constexpr (T == Task::classification) {
              update_multi_svm(models[a], batches[r]);
            } else {
              update_multi_svr(models[a], batches[r]);
            }
            break;
          case Arm::baseline:
            detail::path_update(models[a], batches[r]);
            break;
          case Arm::retrain:
            detail::apply_batch(plain[a], batches[r]);
            models[a] = train_batch<T>(plain[a], initial.kernel, initial.hyper);
            break;
        }
        const double wall = detail::seconds_since(t0);
        cumulative[a] += wall;
        rep.records.push_back(
            {r + 1, cfg.arms[a], models[a].samples.size(), wall, cumulative[a], task_metric(models[a], test)});
      }
      for (std::size_t a = 1; a < cfg.arms.size(); ++a) {
        rep.parity_gap = std::max(rep.parity_gap, max_prediction_gap(models[0], models[a], test));
      }
    }
  } catch (const Error& e) {
    rep.complete = false;
    rep.failure = std::string(to_string(e.code())) + ": " + e.what();
  }
  rep.parity_pass = rep.complete && rep.parity_gap <= cfg.parity_tolerance;
  return rep;
}

inline void write_bench_csv(std::ostream& os, const BenchReport& rep) {
  os << "round,arm,samples,wall_seconds,cumulative_seconds,metric\n" << std::setprecision(9);
  for (const auto& r : rep.records) {
    os << r.round << ',' << to_string(r.arm) << ',' << r.samples << ',' << r.wall_seconds << ','
       << r.cumulative_seconds << ',' << r.metric << '\n';
  }
}

/// Human-readable table: one column per round, one row per arm (seconds).
inline void write_bench_table(std::ostream& os, const BenchReport& rep) {
  std::vector<std::size_t> rounds;
  std::map<std::size_t, std::size_t> samples;
  std::map<Arm, std::map<std::size_t, double>> wall;
  std::vector<Arm> arms;
  for (const auto& r : rep.records) {
    if (std::find(rounds.begin(), rounds.end(), r.round) == rounds.end()) rounds.push_back(r.round);
    if (std::find(arms.begin(), arms.end(), r.arm) == arms.end()) arms.push_back(r.arm);
    samples[r.round] = r.samples;
    wall[r.arm][r.round] = r.wall_seconds;
  }
  const int w = 12;
  os << std::left << std::setw(16) << "#Samples" << std::right;
  for (auto r : rounds) os << std::setw(w) << samples[r];
  os << '\n';
  for (auto a : arms) {
    os << std::left << std::setw(16) << (a == Arm::retrain ? "Nonincremental" : std::string(to_string(a)))
       << std::right << std::fixed << std::setprecision(4);
    for (auto r : rounds) os << std::setw(w) << wall[a][r];
    os << '\n' << std::defaultfloat;
  }
  os << "Unit is seconds. Parity gap " << std::setprecision(3) << rep.parity_gap
     << (rep.parity_pass ? " (pass)" : " (FAIL)") << (rep.complete ? "" : " [incomplete: " + rep.failure + "]")
     << '\n';
}

}  // namespace ridgesvm

#endif  // RIDGESVM_BENCH_HPP
