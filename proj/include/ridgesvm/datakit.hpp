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


#ifndef RIDGESVM_DATAKIT_HPP
#define RIDGESVM_DATAKIT_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "ridgesvm/detail/active_set.hpp"
#include "ridgesvm/error.hpp"
#include "ridgesvm/kernels.hpp"
#include "ridgesvm/model.hpp"

namespace ridgesvm {

// ---------------------------------------------------------------------------
// CSV loading

struct DatasetSpec {
  std::filesystem::path path;
  /// Zero-based label column; empty means the last column.
  std::optional<std::size_t> label_column;
  bool has_header = false;
  Task task = Task::classification;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline double parse_cell(const std::string& cell, std::size_t line, std::size_t col) {
  std::size_t used = 0;
  double v = 0.0;
  bool ok = !cell.empty();
  if (ok) {
    try {
      v = std::stod(cell, &used);
    } catch (const std::exception&) {
      ok = false;
    }
  }
  if (!ok || used != cell.size() || !std::isfinite(v)) {
    std::ostringstream os;
    os << "line " << line << ", column " << (col + 1) << ": '" << cell << "' is not a real number";
    throw Error(Errc::parse_error, os.str());
  }
  return v;
}

/// Maps {0,1} labels to {−1,+1}; keeps ±1 labels; rejects anything else.
inline void normalize_labels(std::vector<Sample>& samples) {
  bool zero = false;
  bool minus = false;
  for (const auto& s : samples) {
    if (s.target == 0.0) {
      zero = true;
    } else if (s.target == -1.0) {
      minus = true;
    } else if (s.target != 1.0) {
      throw Error(Errc::label_domain_error, "classification label " + std::to_string(s.target) + " is not in {0,1} or {-1,+1}");
    }
  }
  if (zero && minus) throw Error(Errc::label_domain_error, "labels mix 0 and -1");
  if (zero) {
    for (auto& s : samples) s.target = s.target == 0.0 ? -1.0 : 1.0;
  }
}

}  // namespace detail

/// Parses comma-separated reals; sample ids are the zero-based data row index.
inline std::vector<Sample> parse_csv(std::istream& in, const DatasetSpec& spec) {
  std::vector<Sample> out;
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::size_t> width;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && spec.has_header) continue;
    if (detail::trim(line).empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    std::size_t col = 0;
    while (std::getline(ss, cell, ',')) row.push_back(detail::parse_cell(detail::trim(cell), line_no, col++));
    if (!line.empty() && line.back() == ',') row.push_back(detail::parse_cell("", line_no, col));
    if (!width) width = row.size();
    if (row.size() != *width) {
      std::ostringstream os;
      os << "line " << line_no << ": expected " << *width << " columns, found " << row.size();
      throw Error(Errc::parse_error, os.str());
    }
    if (row.size() < 2) throw Error(Errc::parse_error, "line " + std::to_string(line_no) + ": need a feature and a label");
    const std::size_t label = spec.label_column.value_or(row.size() - 1);
    if (label >= row.size()) {
      throw Error(Errc::parse_error, "label column " + std::to_string(label + 1) + " out of range");
    }
    Sample s;
    s.id = out.size();
    s.target = row[label];
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j != label) s.features.push_back(row[j]);
    }
    out.push_back(std::move(s));
  }
  if (spec.task == Task::classification) detail::normalize_labels(out);
  return out;
}

inline std::vector<Sample> load_csv(const DatasetSpec& spec) {
  std::ifstream in(spec.path);
  if (!in) throw Error(Errc::parse_error, "cannot open '" + spec.path.string() + "'");
  return parse_csv(in, spec);
}

// ---------------------------------------------------------------------------
// Standardization

struct StandardizationStats {
  std::vector<double> mean;
  std::vector<double> stddev;
  std::optional<double> label_mean;
  std::optional<double> label_stddev;

  bool operator==(const StandardizationStats&) const = default;

  static StandardizationStats identity(std::size_t dim) {
    return {std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0), std::nullopt, std::nullopt};
  }

  Sample apply(Sample s) const {
    if (s.features.size() != mean.size()) throw Error(Errc::dimension_mismatch, "sample width differs from standardizer");
    for (std::size_t j = 0; j < mean.size(); ++j) s.features[j] = (s.features[j] - mean[j]) / stddev[j];
    if (label_mean) s.target = (s.target - *label_mean) / *label_stddev;
    return s;
  }

  std::vector<Sample> apply(std::vector<Sample> samples) const {
    for (auto& s : samples) s = apply(std::move(s));
    return samples;
  }
};

/// Population mean/std per feature (and of the labels for regression).
inline StandardizationStats fit_standardizer(std::span<const Sample> train, Task task) {
  if (train.size() < 2) throw Error(Errc::constant_column, "standardizer needs at least two samples");
  const std::size_t d = train.front().features.size();
  const double n = static_cast<double>(train.size());
  auto moments = [&](auto get) {
    double m = 0.0;
    for (const auto& s : train) m += get(s);
    m /= n;
    double v = 0.0;
    for (const auto& s : train) v += (get(s) - m) * (get(s) - m);
    return std::pair{m, std::sqrt(v / n)};
  };
  StandardizationStats st;
  for (std::size_t j = 0; j < d; ++j) {
    const auto [m, sd] = moments([j](const Sample& s) { return s.features.at(j); });
    if (!(sd > 0.0)) throw Error(Errc::constant_column, "feature column " + std::to_string(j + 1) + " is constant");
    st.mean.push_back(m);
    st.stddev.push_back(sd);
  }
  if (task == Task::regression) {
    const auto [m, sd] = moments([](const Sample& s) { return s.target; });
    if (!(sd > 0.0)) throw Error(Errc::constant_column, "regression labels are constant");
    st.label_mean = m;
    st.label_stddev = sd;
  }
  return st;
}

// ---------------------------------------------------------------------------
// Splitting and scheduling

struct SplitPlan {
  double train_fraction = 0.8;
  double incremental_fraction = 0.1;
  double test_fraction = 0.1;
  std::uint64_t seed = 0;

  void validate() const {
    const double sum = train_fraction + incremental_fraction + test_fraction;
    if (train_fraction < 0 || incremental_fraction < 0 || test_fraction < 0 || std::abs(sum - 1.0) > 1e-9) {
      throw Error(Errc::invalid_hyperparams, "split fractions must be nonnegative and sum to 1");
    }
  }
};

struct SplitResult {
  std::vector<Sample> train;
  std::vector<Sample> incremental_pool;
  std::vector<Sample> test;
};

/// One seeded shuffle, then contiguous slices.
inline SplitResult split(std::vector<Sample> samples, const SplitPlan& plan) {
  plan.validate();
  std::mt19937_64 rng(plan.seed);
  std::shuffle(samples.begin(), samples.end(), rng);
  const std::size_t n = samples.size();
  const auto n_train = static_cast<std::size_t>(std::llround(plan.train_fraction * static_cast<double>(n)));
  const auto n_inc = std::min(n - n_train, static_cast<std::size_t>(std::llround(plan.incremental_fraction * static_cast<double>(n))));
  SplitResult out;
  out.train.assign(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(n_train));
  out.incremental_pool.assign(samples.begin() + static_cast<std::ptrdiff_t>(n_train),
                              samples.begin() + static_cast<std::ptrdiff_t>(n_train + n_inc));
  out.test.assign(samples.begin() + static_cast<std::ptrdiff_t>(n_train + n_inc), samples.end());
  return out;
}

struct RoundSchedule {
  std::size_t rounds = 1;
  std::size_t add_per_round = 6;
  std::size_t remove_per_round = 2;
  std::uint64_t seed = 0;
};

/// Each round takes the next `add_per_round` pool samples and removes
/// `remove_per_round` distinct ids drawn uniformly from the model as it stands
/// after the previous rounds.
inline std::vector<UpdateBatch> schedule_rounds(std::span<const Sample> pool, std::vector<SampleId> model_ids,
                                                const RoundSchedule& schedule) {
  if (schedule.rounds * schedule.add_per_round > pool.size()) {
    throw Error(Errc::pool_exhausted, "pool of " + std::to_string(pool.size()) + " samples cannot feed " +
                                          std::to_string(schedule.rounds) + " rounds of +" +
                                          std::to_string(schedule.add_per_round));
  }
  std::mt19937_64 rng(schedule.seed);
  std::vector<UpdateBatch> out;
  std::size_t next = 0;
  for (std::size_t r = 0; r < schedule.rounds; ++r) {
    if (schedule.remove_per_round > model_ids.size()) {
      throw Error(Errc::pool_exhausted, "round " + std::to_string(r + 1) + " removes more samples than the model holds");
    }
    UpdateBatch b;
    for (std::size_t a = 0; a < schedule.add_per_round; ++a) b.add.push_back(pool[next++]);
    // Partial Fisher-Yates: the first remove_per_round slots become the draw.
    for (std::size_t k = 0; k < schedule.remove_per_round; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, model_ids.size() - 1);
      std::swap(model_ids[k], model_ids[pick(rng)]);
      b.remove.push_back(model_ids[k]);
    }
    model_ids.erase(model_ids.begin(), model_ids.begin() + static_cast<std::ptrdiff_t>(schedule.remove_per_round));
    for (const auto& s : b.add) model_ids.push_back(s.id);
    out.push_back(std::move(b));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Model persistence

inline constexpr int kModelFormatVersion = 1;

/// Task-independent contents of a model file.
struct ModelDocument {
  Task task = Task::classification;
  KernelSpec kernel;
  Hyperparams hyper;
  std::optional<StandardizationStats> standardizer;
  std::vector<Sample> samples;
  std::vector<double> multipliers;
  double bias = 0.0;
  std::vector<Region> partition;
};

template <Task T>
ModelDocument to_document(const DualState<T>& s, std::optional<StandardizationStats> stats = std::nullopt) {
  return {T, s.kernel, s.hyper, std::move(stats), s.samples, s.multipliers, s.bias, s.partition};
}

/// Rebuilds a live state (residuals, S and its inverse) from a document.
template <Task T>
DualState<T> to_state(const ModelDocument& doc) {
  if (doc.task != T) throw Error(Errc::corrupt_file, "model file holds a " + std::string(to_string(doc.task)) + " model");
  DualState<T> s;
  s.kernel = doc.kernel;
  s.hyper = doc.hyper;
  s.samples = doc.samples;
  s.multipliers = doc.multipliers;
  s.bias = doc.bias;
  s.partition = doc.partition;
  s.residuals = compute_residuals(s);
  detail::rebuild_active_set(s);
  detail::trim_cache(s);
  return s;
}

inline nlohmann::json to_json(const ModelDocument& doc) {
  using nlohmann::json;
  json j;
  j["format_version"] = kModelFormatVersion;
  j["task"] = std::string(to_string(doc.task));
  j["kernel"] = {{"family", std::string(to_string(doc.kernel.family))},
                 {"degree", doc.kernel.degree},
                 {"offset", doc.kernel.offset},
                 {"sigma", doc.kernel.sigma},
                 {"ridge", doc.kernel.ridge}};
  j["hyper"] = {{"C", doc.hyper.C}, {"epsilon", doc.hyper.epsilon}};
  if (doc.standardizer) {
    json st = {{"mean", doc.standardizer->mean}, {"stddev", doc.standardizer->stddev}};
    if (doc.standardizer->label_mean) {
      st["label_mean"] = *doc.standardizer->label_mean;
      st["label_stddev"] = *doc.standardizer->label_stddev;
    }
    j["standardizer"] = st;
  } else {
    j["standardizer"] = nullptr;
  }
  json samples = json::array();
  for (const auto& s : doc.samples) samples.push_back({{"id", s.id}, {"features", s.features}, {"target", s.target}});
  j["samples"] = samples;
  j["multipliers"] = doc.multipliers;
  j["bias"] = doc.bias;
  json part = json::array();
  for (auto r : doc.partition) part.push_back(std::string(to_string(r)));
  j["partition"] = part;
  return j;
}

inline ModelDocument from_json(const nlohmann::json& j) {
  try {
    if (!j.is_object() || !j.contains("format_version")) throw Error(Errc::corrupt_file, "missing format_version");
    const int version = j.at("format_version").get<int>();
    if (version != kModelFormatVersion) {
      throw Error(Errc::schema_version_mismatch, "model format_version " + std::to_string(version) +
                                                     " (expected " + std::to_string(kModelFormatVersion) + ")");
    }
    ModelDocument doc;
    const auto task = j.at("task").get<std::string>();
    if (task == "classification") {
      doc.task = Task::classification;
    } else if (task == "regression") {
      doc.task = Task::regression;
    } else {
      throw Error(Errc::corrupt_file, "unknown task '" + task + "'");
    }
    const auto& k = j.at("kernel");
    doc.kernel.family = kernel_family_from_string(k.at("family").get<std::string>());
    doc.kernel.degree = k.at("degree").get<int>();
    doc.kernel.offset = k.at("offset").get<double>();
    doc.kernel.sigma = k.at("sigma").get<double>();
    doc.kernel.ridge = k.at("ridge").get<double>();
    doc.kernel.validate();
    doc.hyper.C = j.at("hyper").at("C").get<double>();
    doc.hyper.epsilon = j.at("hyper").at("epsilon").get<double>();
    doc.hyper.validate();
    if (!j.at("standardizer").is_null()) {
      const auto& st = j.at("standardizer");
      StandardizationStats stats;
      stats.mean = st.at("mean").get<std::vector<double>>();
      stats.stddev = st.at("stddev").get<std::vector<double>>();
      if (st.contains("label_mean")) {
        stats.label_mean = st.at("label_mean").get<double>();
        stats.label_stddev = st.at("label_stddev").get<double>();
      }
      doc.standardizer = std::move(stats);
    }
    for (const auto& s : j.at("samples")) {
      doc.samples.push_back({s.at("id").get<SampleId>(), s.at("features").get<std::vector<double>>(),
                             s.at("target").get<double>()});
    }
    doc.multipliers = j.at("multipliers").get<std::vector<double>>();
    doc.bias = j.at("bias").get<double>();
    for (const auto& r : j.at("partition")) doc.partition.push_back(region_from_string(r.get<std::string>()));
    if (doc.multipliers.size() != doc.samples.size() || doc.partition.size() != doc.samples.size()) {
      throw Error(Errc::corrupt_file, "per-sample arrays have different lengths");
    }
    return doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::corrupt_file, std::string("malformed model file: ") + e.what());
  }
}

/// Writes the model as JSON through a temporary file and a rename.
inline void save_model(const ModelDocument& doc, const std::filesystem::path& path) {
  // nlohmann/json prints the shortest decimal that round-trips (at most 17 digits).
  const std::string text = to_json(doc).dump(1);
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::io_error, "cannot write '" + tmp.string() + "'");
    out << text << '\n';
    out.flush();
    if (!out) throw Error(Errc::io_error, "short write to '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(Errc::io_error, "cannot rename '" + tmp.string() + "': " + ec.message());
}

template <Task T>
void save_model(const DualState<T>& s, const std::filesystem::path& path,
                std::optional<StandardizationStats> stats = std::nullopt) {
  save_model(to_document(s, std::move(stats)), path);
}

inline ModelDocument load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot open '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(buf.str());
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::corrupt_file, std::string("unreadable model file: ") + e.what());
  }
  return from_json(j);
}

}  // namespace ridgesvm

#endif  // RIDGESVM_DATAKIT_HPP
