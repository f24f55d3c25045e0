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


// Command-line front end: train, update, eval, bench and wec subcommands.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ridgesvm.hpp"

namespace fs = std::filesystem;
using namespace ridgesvm;

namespace {

int exit_code_for(Errc c) {
  switch (c) {
    case Errc::single_class_input:
    case Errc::no_convergence:
    case Errc::not_positive_definite:
      return 3;
    case Errc::repair_divergence:
    case Errc::stalled_path:
    case Errc::inconsistent_event:
    case Errc::inconsistent_state:
    case Errc::empty_s:
    case Errc::singular_border:
    case Errc::singular_schur_block:
    case Errc::singular_corner_block:
      return 4;
    default:
      return 2;
  }
}

struct DataFlags {
  std::string path;
  std::string label_col = "last";
  bool header = false;
  std::string task = "classification";
};

struct KernelFlags {
  std::string kernel = "rbf";
  int degree = 2;
  double offset = 1.0;
  double sigma = 1.0;
  double ridge = 0.5;
  double C = 1.0;
  double epsilon = 0.0;
};

void add_data_flags(CLI::App* app, DataFlags& f, bool required) {
  auto* opt = app->add_option("--data", f.path, "CSV file of comma-separated reals");
  if (required) opt->required();
  app->add_option("--label-col", f.label_col, "zero-based label column or 'last'");
  app->add_flag("--header", f.header, "first line is a header");
  app->add_option("--task", f.task, "classification or regression")
      ->check(CLI::IsMember({"classification", "regression"}));
}

void add_kernel_flags(CLI::App* app, KernelFlags& f) {
  app->add_option("--kernel", f.kernel, "linear, poly2, poly3 or rbf")
      ->check(CLI::IsMember({"linear", "poly2", "poly3", "rbf", "poly"}));
  app->add_option("--degree", f.degree, "polynomial degree (with --kernel poly)");
  app->add_option("--offset", f.offset, "polynomial offset");
  app->add_option("--sigma", f.sigma, "rbf width: exp(-|a-b|^2 / (2 sigma^2))");
  app->add_option("--ridge", f.ridge, "ridge rho added to the kernel diagonal");
  app->add_option("--C", f.C, "box bound");
  app->add_option("--epsilon", f.epsilon, "tube half-width (regression)");
}

Task task_of(const std::string& s) { return s == "regression" ? Task::regression : Task::classification; }

KernelSpec kernel_of(const KernelFlags& f) {
  KernelSpec k;
  if (f.kernel == "linear") {
    k = KernelSpec::linear(f.ridge);
  } else if (f.kernel == "poly2") {
    k = KernelSpec::polynomial(2, f.offset, f.ridge);
  } else if (f.kernel == "poly3") {
    k = KernelSpec::polynomial(3, f.offset, f.ridge);
  } else if (f.kernel == "poly") {
    k = KernelSpec::polynomial(f.degree, f.offset, f.ridge);
  } else {
    k = KernelSpec::rbf(f.sigma, f.ridge);
  }
  k.validate();
  return k;
}

DatasetSpec dataset_of(const DataFlags& f) {
  DatasetSpec d;
  d.path = f.path;
  d.has_header = f.header;
  d.task = task_of(f.task);
  if (f.label_col != "last") {
    try {
      d.label_column = static_cast<std::size_t>(std::stoul(f.label_col));
    } catch (const std::exception&) {
      throw Error(Errc::parse_error, "--label-col must be an index or 'last'");
    }
  }
  return d;
}

std::vector<SampleId> parse_ids(const std::string& s) {
  std::vector<SampleId> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    try {
      out.push_back(std::stoull(tok));
    } catch (const std::exception&) {
      throw Error(Errc::parse_error, "remove id '" + tok + "' is not an integer");
    }
  }
  return out;
}

template <Task T>
void print_summary(const DualState<T>& s, std::span<const Sample> eval_on) {
  std::printf("samples %zu  |S| %zu  |B| %zu  |O| %zu\n", s.samples.size(), s.count(Region::S), s.count(Region::B),
              s.count(Region::O));
  if (s.samples.size() <= 10) {
    std::printf("multipliers");
    for (double x : s.multipliers) std::printf(" %.10g", x);
    std::printf("\nbias %.10g\n", s.bias);
  }
  if constexpr (T == Task::classification) {
    std::printf("train accuracy %.4f%%\n", accuracy(s, eval_on));
  } else {
    std::printf("train mse %.6g\n", mean_squared_error(s, eval_on));
  }
}

// ---------------------------------------------------------------------------

struct TrainArgs {
  DataFlags data;
  KernelFlags kern;
  bool no_standardize = false;
  std::string out = "model.json";
};

int cmd_train(const TrainArgs& a) {
  const DatasetSpec ds = dataset_of(a.data);
  auto samples = load_csv(ds);
  std::optional<StandardizationStats> stats;
  if (!a.no_standardize) {
    stats = fit_standardizer(samples, ds.task);
    samples = stats->apply(std::move(samples));
  }
  const KernelSpec k = kernel_of(a.kern);
  const Hyperparams h{a.kern.C, a.kern.epsilon};
  if (ds.task == Task::classification) {
    auto s = train_svm_batch(samples, k, h);
    print_summary(s, std::span<const Sample>(s.samples));
    save_model(s, a.out, stats);
  } else {
    auto s = train_svr_batch(samples, k, h);
    print_summary(s, std::span<const Sample>(s.samples));
    save_model(s, a.out, stats);
  }
  std::printf("wrote %s\n", a.out.c_str());
  return 0;
}

struct UpdateArgs {
  std::string model;
  std::string add;
  std::string remove;
  DataFlags data;
  std::string engine = "proposed";
  std::string out;
};

template <Task T>
int run_update(const ModelDocument& doc, const UpdateArgs& a) {
  DualState<T> s = to_state<T>(doc);
  UpdateBatch batch;
  if (!a.add.empty()) {
    DatasetSpec ds = dataset_of(a.data);
    ds.path = a.add;
    ds.task = T;
    auto rows = load_csv(ds);
    SampleId next = 0;
    for (const auto& smp : s.samples) next = std::max(next, smp.id + 1);
    for (auto& r : rows) {
      r.id = next++;
      batch.add.push_back(doc.standardizer ? doc.standardizer->apply(r) : r);
    }
  }
  batch.remove = parse_ids(a.remove);
  const std::size_t s_before = s.count(Region::S);
  const auto t0 = std::chrono::steady_clock::now();
  if (a.engine == "baseline") {
    detail::path_update(s, batch);
  } else if constexpr (T == Task::classification) {
    update_multi_svm(s, batch);
  } else {
    update_multi_svr(s, batch);
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const auto report = validate(s);
  std::printf("engine %s  added %zu  removed %zu  delta|S| %+lld  wall %.6f s\n", a.engine.c_str(), batch.add.size(),
              batch.remove.size(), static_cast<long long>(s.count(Region::S)) - static_cast<long long>(s_before), wall);
  std::printf("kkt residual %.3g  validate %s\n", kkt_residual(s, s.residuals),
              report.ok() ? "ok" : report.summary().c_str());
  const std::string out = a.out.empty() ? a.model : a.out;
  save_model(s, out, doc.standardizer);
  std::printf("wrote %s\n", out.c_str());
  return report.ok() ? 0 : 4;
}

int cmd_update(const UpdateArgs& a) {
  const ModelDocument doc = load_model(a.model);
  return doc.task == Task::classification ? run_update<Task::classification>(doc, a)
                                          : run_update<Task::regression>(doc, a);
}

struct EvalArgs {
  std::string model;
  DataFlags data;
};

int cmd_eval(const EvalArgs& a) {
  const ModelDocument doc = load_model(a.model);
  DatasetSpec ds = dataset_of(a.data);
  ds.task = doc.task;
  auto rows = load_csv(ds);
  if (rows.empty()) throw Error(Errc::parse_error, "test file has no rows");
  if (doc.standardizer) rows = doc.standardizer->apply(std::move(rows));
  if (doc.task == Task::classification) {
    const auto s = to_state<Task::classification>(doc);
    std::printf("accuracy %.4f%% on %zu samples\n", accuracy(s, rows), rows.size());
  } else {
    const auto s = to_state<Task::regression>(doc);
    std::printf("mse %.6g on %zu samples (standardized labels)\n", mean_squared_error(s, rows), rows.size());
  }
  return 0;
}

struct BenchArgs {
  DataFlags data;
  KernelFlags kern;
  std::string synthetic = "auto";
  std::size_t n = 2000;
  std::size_t rounds = 5;
  std::size_t add_per_round = 6;
  std::size_t remove_per_round = 2;
  std::uint64_t seed = 0;
  std::string arms = "proposed,baseline,retrain";
  std::string out = "bench_out";
};

template <Task T>
int run_bench_cmd(std::vector<Sample> all, const BenchArgs& a, const std::string& dataset_name) {
  SplitPlan plan;
  plan.seed = a.seed;
  auto parts = split(std::move(all), plan);
  const auto stats = fit_standardizer(parts.train, T);
  parts.train = stats.apply(std::move(parts.train));
  parts.incremental_pool = stats.apply(std::move(parts.incremental_pool));
  parts.test = stats.apply(std::move(parts.test));
  if (parts.test.empty()) parts.test = parts.train;

  const KernelSpec k = kernel_of(a.kern);
  const Hyperparams h{a.kern.C, a.kern.epsilon};
  const auto initial = train_batch<T>(parts.train, k, h);

  BenchConfig cfg;
  cfg.arms.clear();
  std::stringstream ss(a.arms);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok == "proposed") {
      cfg.arms.push_back(Arm::proposed);
    } else if (tok == "baseline") {
      cfg.arms.push_back(Arm::baseline);
    } else if (tok == "retrain") {
      cfg.arms.push_back(Arm::retrain);
    } else {
      throw Error(Errc::parse_error, "unknown arm '" + tok + "'");
    }
  }
  cfg.schedule = {a.rounds, a.add_per_round, a.remove_per_round, a.seed};
  auto rep = run_bench(initial, parts.incremental_pool, parts.test, cfg);
  rep.metadata["dataset"] = dataset_name;
  rep.metadata["threads"] = "1";

  fs::create_directories(a.out);
  {
    std::ofstream csv(fs::path(a.out) / "bench.csv");
    write_bench_csv(csv, rep);
  }
  {
    std::ofstream txt(fs::path(a.out) / "bench.txt");
    for (const auto& [key, val] : rep.metadata) txt << key << ": " << val << '\n';
    write_bench_table(txt, rep);
  }
  for (const auto& [key, val] : rep.metadata) std::cout << key << ": " << val << '\n';
  write_bench_table(std::cout, rep);
  if (!rep.complete) return 4;
  return rep.parity_pass ? 0 : 4;
}

int cmd_bench(const BenchArgs& a) {
  const Task task = task_of(a.data.task);
  std::vector<Sample> all;
  std::string name;
  if (!a.data.path.empty()) {
    all = load_csv(dataset_of(a.data));
    name = a.data.path;
  } else {
    std::string gen = a.synthetic;
    if (gen == "auto") gen = task == Task::classification ? "gaussians" : "sine";
    if (gen == "gaussians") {
      all = two_gaussians(a.n, a.seed);
    } else if (gen == "sine") {
      all = noisy_sine(a.n, a.seed);
    } else if (gen == "skin") {
      all = skin_like(a.n, a.seed);
    } else {
      throw Error(Errc::parse_error, "unknown synthetic generator '" + gen + "'");
    }
    name = "synthetic:" + gen;
  }
  return task == Task::classification ? run_bench_cmd<Task::classification>(std::move(all), a, name)
                                      : run_bench_cmd<Task::regression>(std::move(all), a, name);
}

struct WecArgs {
  std::string model;
  std::string out = "wec.csv";
};

int cmd_wec(const WecArgs& a) {
  const ModelDocument doc = load_model(a.model);
  std::vector<WecPoint> pts;
  if (doc.task == Task::classification) {
    pts = wec_points(to_state<Task::classification>(doc));
  } else {
    pts = wec_points(to_state<Task::regression>(doc));
  }
  {
    std::ofstream out(a.out);
    if (!out) throw Error(Errc::io_error, "cannot write '" + a.out + "'");
    write_wec_csv(out, pts);
  }
  const auto sum = summarize_wec(pts);
  std::printf("wrote %zu points to %s (rho %.6g, expected slope %.6g)\n", pts.size(), a.out.c_str(), doc.kernel.ridge,
              doc.kernel.ridge > 0.0 ? -1.0 / doc.kernel.ridge : 0.0);
  if (doc.task == Task::classification) {
    std::printf("S-region fit: slope %.6g intercept %.6g (%zu points)\n", sum.positive.slope, sum.positive.intercept,
                sum.positive.points);
  } else {
    std::printf("theta>0 branch: slope %.6g zero crossing %.6g (%zu points)\n", sum.positive.slope,
                sum.positive.points >= 2 ? sum.positive.zero_crossing() : 0.0, sum.positive.points);
    std::printf("theta<0 branch: slope %.6g zero crossing %.6g (%zu points)\n", sum.negative.slope,
                sum.negative.points >= 2 ? sum.negative.zero_crossing() : 0.0, sum.negative.points);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ridge SVM/SVR with multiple incremental/decremental updates"};
  app.require_subcommand(1);

  TrainArgs train;
  auto* c_train = app.add_subcommand("train", "batch-train a model from a CSV file");
  add_data_flags(c_train, train.data, true);
  add_kernel_flags(c_train, train.kern);
  c_train->add_flag("--no-standardize", train.no_standardize, "keep raw features and labels");
  c_train->add_option("--out", train.out, "model file to write");

  UpdateArgs update;
  auto* c_update = app.add_subcommand("update", "add and remove samples in one batch");
  c_update->add_option("--model", update.model, "model file")->required();
  c_update->add_option("--add", update.add, "CSV of samples to add");
  c_update->add_option("--remove", update.remove, "comma-separated sample ids to remove");
  c_update->add_option("--label-col", update.data.label_col, "zero-based label column of --add or 'last'");
  c_update->add_flag("--header", update.data.header, "--add file has a header");
  c_update->add_option("--engine", update.engine, "proposed or baseline")
      ->check(CLI::IsMember({"proposed", "baseline"}));
  c_update->add_option("--out", update.out, "output model file (default: overwrite --model)");

  EvalArgs eval;
  auto* c_eval = app.add_subcommand("eval", "accuracy or MSE on a test CSV");
  c_eval->add_option("--model", eval.model, "model file")->required();
  c_eval->add_option("--data", eval.data.path, "test CSV")->required();
  c_eval->add_option("--label-col", eval.data.label_col, "zero-based label column or 'last'");
  c_eval->add_flag("--header", eval.data.header, "first line is a header");

  BenchArgs bench;
  auto* c_bench = app.add_subcommand("bench", "time proposed, baseline and retrain arms over update rounds");
  add_data_flags(c_bench, bench.data, false);
  add_kernel_flags(c_bench, bench.kern);
  c_bench->add_option("--synthetic", bench.synthetic, "generator when --data is absent: auto, gaussians, sine, skin");
  c_bench->add_option("--n", bench.n, "synthetic sample count");
  c_bench->add_option("--rounds", bench.rounds, "update rounds");
  c_bench->add_option("--add-per-round", bench.add_per_round, "samples added per round");
  c_bench->add_option("--remove-per-round", bench.remove_per_round, "samples removed per round");
  c_bench->add_option("--seed", bench.seed, "seed for data, split and schedule");
  c_bench->add_option("--arms", bench.arms, "comma-separated subset of proposed,baseline,retrain");
  c_bench->add_option("--out", bench.out, "output directory for bench.csv and bench.txt");

  WecArgs wec;
  auto* c_wec = app.add_subcommand("wec", "dump weight-error-curve points of a model");
  c_wec->add_option("--model", wec.model, "model file")->required();
  c_wec->add_option("--out", wec.out, "CSV to write");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*c_train) return cmd_train(train);
    if (*c_update) return cmd_update(update);
    if (*c_eval) return cmd_eval(eval);
    if (*c_bench) return cmd_bench(bench);
    if (*c_wec) return cmd_wec(wec);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
