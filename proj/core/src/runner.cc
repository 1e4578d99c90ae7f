// Copyright 2026 The MTR Lab Authors
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

#include "mtr/runner.h"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <mutex>
#include <nlohmann/json.hpp>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "mtr/belief.h"
#include "mtr/csv.h"
#include "mtr/errors.h"
#include "mtr/rl_trainer.h"
#include "mtr/sl_trainer.h"

namespace mtr {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

constexpr int64_t kBeliefTail = 1000;
constexpr int64_t kBeliefBurnIn = 1000;

fs::path SeedDir(const fs::path& root, uint64_t seed) {
  return root / ("seed_" + std::to_string(seed));
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

std::string ReadText(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Json OptionalJson(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

std::optional<double> Cell(const CsvTable& t, size_t row, size_t col) {
  const std::string& s = t.rows[row][col];
  if (s.empty()) return std::nullopt;
  try {
    size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw FormatError("bad number '" + s + "' in column " + t.header[col]);
  }
}

double RequiredCell(const CsvTable& t, size_t row, size_t col) {
  const auto v = Cell(t, row, col);
  if (!v) throw FormatError("empty cell in column " + t.header[col]);
  return *v;
}

std::optional<double> MeanOf(const std::vector<double>& v) {
  if (v.empty()) return std::nullopt;
  return Mean(v);
}

// ---- Per-seed writers ----------------------------------------------------

void WriteRlSeed(const RlRunResult& r, const fs::path& dir, bool descriptors) {
  {
    CsvWriter csv(dir / "rl_metrics.csv",
                  {"step", "phase", "eval_return_clean", "mean_trust_reliable",
                   "mean_trust_unreliable", "trust_rho_auroc",
                   "mean_policy_entropy", "lr"});
    for (const auto& row : r.eval) {
      csv.Add(row.step)
          .Add(PhaseName(row.phase))
          .Add(row.eval_return_clean)
          .Add(row.mean_trust_reliable)
          .Add(row.mean_trust_unreliable)
          .Add(row.trust_rho_auroc)
          .Add(row.mean_policy_entropy)
          .Add(row.lr);
      csv.EndRow();
    }
  }
  {
    CsvWriter csv(dir / "trust.csv", {"step", "key", "w_raw", "w_smoothed",
                                      "stable_component_mean_drift"});
    for (const auto& rec : r.refits) {
      csv.Add(rec.step)
          .Add(static_cast<uint64_t>(rec.key))
          .Add(rec.w_raw)
          .Add(rec.w_smoothed)
          .Add(rec.stable_component_mean_drift);
      csv.EndRow();
    }
  }
  if (descriptors) {
    CsvWriter csv(dir / "descriptors.csv",
                  {"step", "state", "drift", "consensus", "entropy_var"});
    for (const auto& rec : r.descriptors) {
      csv.Add(rec.step)
          .Add(rec.state)
          .Add(rec.descriptors.policy_drift)
          .Add(rec.descriptors.action_consensus)
          .Add(rec.descriptors.entropy_variance);
      csv.EndRow();
    }
  }
}

void WriteSlSeed(const SlConfig& config, const SlRunResult& r, int classes,
                 const fs::path& dir) {
  {
    CsvWriter csv(dir / "sl_metrics.csv",
                  {"step", "phase", "train_loss", "batch_mean_entropy",
                   "clean_test_accuracy"});
    for (const auto& row : r.rows) {
      csv.Add(row.step)
          .Add(row.biased ? "biased" : "clean")
          .Add(row.train_loss)
          .Add(row.batch_mean_entropy)
          .Add(row.clean_test_accuracy);
      csv.EndRow();
    }
  }
  Json j;
  j["final_accuracy"] = r.final_accuracy;
  std::vector<double> post;
  for (const auto& row : r.rows) {
    if (row.step >= config.bias.active_until_step) {
      post.push_back(row.batch_mean_entropy);
    }
  }
  j["post_restoration_mean_entropy"] = OptionalJson(MeanOf(post));
  try {
    const SlDiagnostics d = DiagnoseEntropy(r.rows, classes);
    j["phase_entropy_auroc"] = d.auroc;
    j["orientation"] = d.orientation;
    j["brier"] = d.brier;
    j["nll"] = d.nll;
    j["nll_clamped"] = d.nll_clamped;
    Json bins = Json::array();
    for (const auto& b : d.reliability_bins) {
      bins.push_back({{"edge_lo", b.edge_lo},
                      {"edge_hi", b.edge_hi},
                      {"count", b.count},
                      {"mean_score", OptionalJson(b.mean_score)},
                      {"positive_rate", OptionalJson(b.positive_rate)}});
    }
    j["reliability_bins"] = bins;
  } catch (const UndefinedMetricError&) {
    // A run without a biased phase has nothing to classify.
    j["phase_entropy_auroc"] = nullptr;
    j["orientation"] = nullptr;
    j["brier"] = nullptr;
    j["nll"] = nullptr;
    j["nll_clamped"] = nullptr;
    j["reliability_bins"] = Json::array();
  }
  WriteText(dir / "sl_diagnostics.json", j.dump(2) + "\n");
}

void WriteBeliefSeed(const BeliefRun& r, const fs::path& dir) {
  CsvWriter csv(dir / "belief.csv", {"step", "theta", "abs_error",
                                     "trust_of_current_obs", "rho"});
  for (size_t t = 0; t < r.theta.size(); ++t) {
    csv.Add(static_cast<int64_t>(t))
        .Add(r.theta[t])
        .Add(r.abs_error[t])
        .Add(r.trust.empty() ? std::optional<double>() : r.trust[t])
        .Add(r.rho[t]);
    csv.EndRow();
  }
}

// ---- Seed dispatch -------------------------------------------------------

// Runs fn(i) for i in [0, n) on up to `parallel` threads. Returns one entry
// per index: empty on success, else the error text.
template <class F>
std::vector<std::optional<std::string>> ForEachSeed(size_t n, int parallel,
                                                     F&& fn) {
  std::vector<std::optional<std::string>> errors(n);
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const size_t threads =
      std::clamp<size_t>(static_cast<size_t>(std::max(parallel, 1)), 1, n);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  return errors;
}

// Executes every seed of `config` under `root`; `on_rl` sees each RL result.
// Returns false after writing the partial marker if any seed failed.
template <class OnRl>
bool RunSeeds(const RunConfig& config, const fs::path& root, int parallel,
              std::ostream& log, OnRl&& on_rl) {
  fs::create_directories(root);
  fs::remove(root / kPartialMarker);
  WriteText(root / "effective_config.json", EmitConfig(config));
  std::mutex log_mutex;
  auto note = [&](const std::string& msg) {
    std::lock_guard lock(log_mutex);
    log << msg << '\n';
  };

  const auto errors = ForEachSeed(
      config.seeds.size(), parallel, [&](size_t i) {
        const uint64_t seed = config.seeds[i];
        const fs::path dir = SeedDir(root, seed);
        fs::create_directories(dir);
        switch (config.experiment) {
          case ExperimentKind::kRl: {
            const RlRunResult r = TrainRl(config.rl, seed);
            WriteRlSeed(r, dir, config.rl.record_descriptors);
            on_rl(i, r);
            break;
          }
          case ExperimentKind::kSl: {
            const Dataset data = LoadSlDataset(config.sl, seed);
            const SlRunResult r = TrainSl(config.sl, data, seed);
            WriteSlSeed(config.sl, r, data.classes, dir);
            break;
          }
          case ExperimentKind::kBelief: {
            WriteBeliefSeed(RunBelief(config.belief, config.SdEnabled(), seed),
                            dir);
            break;
          }
        }
        note("seed " + std::to_string(seed) + " done");
      });

  std::string failures;
  for (size_t i = 0; i < errors.size(); ++i) {
    if (errors[i]) {
      failures += "seed " + std::to_string(config.seeds[i]) + ": " +
                  *errors[i] + "\n";
    }
  }
  if (failures.empty()) return true;
  WriteText(root / kPartialMarker, failures);
  log << failures;
  return false;
}

// ---- Aggregation ---------------------------------------------------------

Json AggregateJson(const ReturnSummary& s) {
  return {{"mean", s.mean},
          {"std", s.std},
          {"worst_case", s.worst_seed_mean},
          {"worst_seed_mean", s.worst_seed_mean},
          {"worst_checkpoint", s.worst_checkpoint}};
}

ReturnCurve ReadCurve(const CsvTable& t, std::string_view column) {
  const size_t step = t.Column("step");
  const size_t col = t.Column(column);
  ReturnCurve curve;
  for (size_t r = 0; r < t.rows.size(); ++r) {
    if (const auto v = Cell(t, r, col)) {
      curve.push_back({static_cast<int64_t>(RequiredCell(t, r, step)), *v});
    }
  }
  return curve;
}

void SummarizeRl(const RunConfig& c, const fs::path& dir, Json& j) {
  j["method"] = c.SdEnabled() ? "ppo+sd" : "ppo";
  j["env"] = c.rl.env;
  j["corruption"] = CorruptionName(c.rl.corruption);
  j["metric"] = "eval_return_clean";
  std::vector<ReturnCurve> curves;
  Json diag = Json::array();
  for (uint64_t seed : c.seeds) {
    const CsvTable t = ReadCsv(SeedDir(dir, seed) / "rl_metrics.csv");
    curves.push_back(ReadCurve(t, "eval_return_clean"));
    const size_t phase = t.Column("phase");
    const size_t rel = t.Column("mean_trust_reliable");
    const size_t unrel = t.Column("mean_trust_unreliable");
    const size_t auc = t.Column("trust_rho_auroc");
    std::vector<double> v_rel, v_unrel, v_auc;
    for (size_t r = 0; r < t.rows.size(); ++r) {
      if (t.rows[r][phase] != PhaseName(Phase::kCorrupt)) continue;
      if (const auto v = Cell(t, r, rel)) v_rel.push_back(*v);
      if (const auto v = Cell(t, r, unrel)) v_unrel.push_back(*v);
      if (const auto v = Cell(t, r, auc)) v_auc.push_back(*v);
    }
    diag.push_back(
        {{"seed", seed},
         {"corrupt_mean_trust_reliable", OptionalJson(MeanOf(v_rel))},
         {"corrupt_mean_trust_unreliable", OptionalJson(MeanOf(v_unrel))},
         {"corrupt_trust_rho_auroc", OptionalJson(MeanOf(v_auc))}});
  }
  const ReturnSummary s = SummarizeReturns(curves);
  j["per_seed_last10"] = s.per_seed;
  j["aggregate"] = AggregateJson(s);
  j["diagnostics"] = {{"per_seed", diag}};
}

void SummarizeSl(const RunConfig& c, const fs::path& dir, Json& j) {
  j["method"] = c.sl.regulator ? "mlp+regulator" : "mlp";
  j["dataset"] = c.sl.dataset;
  j["corruption"] = c.sl.bias.flips.empty() ? "none" : "label_bias";
  j["metric"] = "clean_test_accuracy";
  std::vector<ReturnCurve> curves;
  Json diag = Json::array();
  for (uint64_t seed : c.seeds) {
    const fs::path sd = SeedDir(dir, seed);
    curves.push_back(
        ReadCurve(ReadCsv(sd / "sl_metrics.csv"), "clean_test_accuracy"));
    Json d;
    try {
      d = Json::parse(ReadText(sd / "sl_diagnostics.json"));
    } catch (const Json::exception& e) {
      throw FormatError((sd / "sl_diagnostics.json").string() + ": " +
                        e.what());
    }
    diag.push_back({{"seed", seed},
                    {"final_accuracy", d.at("final_accuracy")},
                    {"phase_entropy_auroc", d.at("phase_entropy_auroc")},
                    {"orientation", d.at("orientation")},
                    {"post_restoration_mean_entropy",
                     d.at("post_restoration_mean_entropy")}});
  }
  const ReturnSummary s = SummarizeReturns(curves);
  j["per_seed_last10"] = s.per_seed;
  j["aggregate"] = AggregateJson(s);
  j["diagnostics"] = {{"per_seed", diag}};
}

// Lower is better here, so the worst case is the largest error.
void SummarizeBelief(const RunConfig& c, const fs::path& dir, Json& j) {
  j["method"] = c.SdEnabled() ? "sgd+sd" : "sgd";
  j["env"] = "belief";
  j["corruption"] = "biased_source";
  j["metric"] = "final_abs_error";
  std::vector<double> per_seed;
  double worst_step = 0.0;
  Json diag = Json::array();
  for (uint64_t seed : c.seeds) {
    const CsvTable t = ReadCsv(SeedDir(dir, seed) / "belief.csv");
    const size_t theta = t.Column("theta");
    const size_t err = t.Column("abs_error");
    const size_t trust = t.Column("trust_of_current_obs");
    const size_t rho = t.Column("rho");
    const size_t n = t.rows.size();
    if (n == 0) throw FormatError("empty belief.csv for seed " +
                                  std::to_string(seed));
    const size_t tail = std::min<size_t>(kBeliefTail, n);
    std::vector<double> tail_theta, tail_err;
    for (size_t r = n - tail; r < n; ++r) {
      tail_theta.push_back(RequiredCell(t, r, theta));
      tail_err.push_back(RequiredCell(t, r, err));
      worst_step = std::max(worst_step, tail_err.back());
    }
    std::vector<double> scores;
    std::vector<int> labels;
    for (size_t r = kBeliefBurnIn; r < n; ++r) {
      if (const auto w = Cell(t, r, trust)) {
        scores.push_back(*w);
        labels.push_back(static_cast<int>(RequiredCell(t, r, rho)));
      }
    }
    std::optional<double> auroc;
    try {
      if (!scores.empty()) auroc = Auroc(scores, labels);
    } catch (const UndefinedMetricError&) {
    }
    per_seed.push_back(Mean(tail_err));
    diag.push_back({{"seed", seed},
                    {"final_theta_mean", Mean(tail_theta)},
                    {"final_theta_std", PopulationStd(tail_theta)},
                    {"trust_rho_auroc", OptionalJson(auroc)}});
  }
  j["per_seed_last10"] = per_seed;
  j["aggregate"] = {{"mean", Mean(per_seed)},
                    {"std", PopulationStd(per_seed)},
                    {"median", Median(per_seed)},
                    {"worst_case", *std::max_element(per_seed.begin(),
                                                     per_seed.end())},
                    {"worst_seed_mean", *std::max_element(per_seed.begin(),
                                                          per_seed.end())},
                    {"worst_checkpoint", worst_step}};
  j["diagnostics"] = {{"mixture_fixed_point", c.belief.MixtureFixedPoint()},
                      {"per_seed", diag}};
}

void WriteSummary(const RunConfig& c, const fs::path& dir) {
  Json j;
  j["experiment"] = ExperimentName(c.experiment);
  j["seeds"] = c.seeds;
  switch (c.experiment) {
    case ExperimentKind::kRl:
      SummarizeRl(c, dir, j);
      break;
    case ExperimentKind::kSl:
      SummarizeSl(c, dir, j);
      break;
    case ExperimentKind::kBelief:
      SummarizeBelief(c, dir, j);
      break;
  }
  j["sl_regulator"] = c.experiment == ExperimentKind::kSl && c.sl.regulator;
  WriteText(dir / "summary.json", j.dump(2) + "\n");
}

}  // namespace

RunConfig ApplyOptions(RunConfig config, const RunOptions& options) {
  if (options.dump_descriptors) config.rl.record_descriptors = true;
  if (options.enable_sl_regulator) config.sl.regulator = true;
  return config;
}

int Run(const RunConfig& raw, const RunOptions& options, std::ostream& log) {
  const RunConfig config = ApplyOptions(raw, options);
  config.Validate();
  const fs::path root = config.ResolvedOutputDir();
  if (!RunSeeds(config, root, options.parallel, log,
                [](size_t, const RlRunResult&) {})) {
    return 1;
  }
  WriteSummary(config, root);
  log << "wrote " << (root / "summary.json").string() << '\n';
  return 0;
}

void Report(const fs::path& dir) {
  if (fs::exists(dir / kPartialMarker)) {
    throw FormatError(dir.string() + " holds partial results");
  }
  RunConfig config;
  try {
    config = ParseConfig(ReadText(dir / "effective_config.json"));
  } catch (const ConfigError& e) {
    throw FormatError((dir / "effective_config.json").string() + ": " +
                      e.what());
  }
  WriteSummary(config, dir);
}

double Reactivity(std::span<const double> signal) {
  if (signal.size() < 2) {
    throw InsufficientDataError("Reactivity: need >= 2 steps");
  }
  std::vector<double> diffs(signal.size() - 1);
  for (size_t t = 1; t < signal.size(); ++t) {
    diffs[t - 1] = signal[t] - signal[t - 1];
  }
  const double sd = PopulationStd(diffs);
  return sd * sd;
}

double AdaptationLag(std::span<const double> signal,
                     const PhaseSchedule& schedule) {
  const int64_t total = schedule.total_steps;
  if (static_cast<int64_t>(signal.size()) != total) {
    throw ShapeError("AdaptationLag: signal length must equal total_steps");
  }
  const int64_t changes[2] = {schedule.CorruptStart(), schedule.RecoverStart()};
  const int64_t ends[2] = {schedule.RecoverStart(), total};
  const int64_t pre_window = std::max<int64_t>(total / 10, 1);
  double sum = 0.0;
  int counted = 0;
  for (int i = 0; i < 2; ++i) {
    const int64_t change = changes[i];
    const int64_t length = ends[i] - change;
    if (length <= 0 || change <= 0) continue;
    auto mean = [&](int64_t a, int64_t b) {
      return Mean(signal.subspan(static_cast<size_t>(a),
                                 static_cast<size_t>(b - a)));
    };
    const double pre = mean(std::max<int64_t>(0, change - pre_window), change);
    const double post =
        mean(ends[i] - std::max<int64_t>(length / 10, 1), ends[i]);
    int64_t lag = length;
    if (pre == post) {
      lag = 0;
    } else {
      const double mid = 0.5 * (pre + post);
      for (int64_t t = change; t < ends[i]; ++t) {
        const double v = signal[static_cast<size_t>(t)];
        if ((post > pre && v >= mid) || (post < pre && v <= mid)) {
          lag = t - change;
          break;
        }
      }
    }
    sum += static_cast<double>(lag);
    ++counted;
  }
  return counted > 0 ? sum / counted : 0.0;
}

std::vector<KSweepRow> SweepK(const RunConfig& base,
                              std::span<const int64_t> k_values,
                              const RunOptions& options, std::ostream& log) {
  if (k_values.empty()) throw ConfigError("sweep-k: empty k_values");
  if (base.experiment != ExperimentKind::kRl) {
    throw ConfigError("sweep-k: requires experiment rl");
  }
  const RunConfig config0 = ApplyOptions(base, options);
  const fs::path root = config0.ResolvedOutputDir();
  fs::create_directories(root);
  std::vector<KSweepRow> rows;
  for (int64_t k : k_values) {
    RunConfig config = config0;
    config.rl.sd.enabled = true;
    config.rl.sd.refit_interval = k;
    config.output_dir = (root / ("k_" + std::to_string(k))).string();
    config.Validate();
    const PhaseSchedule schedule = config.rl.Schedule();
    std::vector<double> reactivity(config.seeds.size());
    std::vector<double> lag(config.seeds.size());
    log << "K=" << k << '\n';
    const bool ok = RunSeeds(
        config, config.output_dir, options.parallel, log,
        [&](size_t i, const RlRunResult& r) {
          const std::vector<double> signal =
              TrustSignalPerStep(r.trust_signal, schedule.total_steps);
          reactivity[i] = Reactivity(signal);
          lag[i] = AdaptationLag(signal, schedule);
        });
    if (!ok) {
      WriteText(root / kPartialMarker, "sweep-k failed at K=" +
                                           std::to_string(k) + "\n");
      throw Error("sweep-k: seed failure at K=" + std::to_string(k));
    }
    WriteSummary(config, config.output_dir);
    std::vector<ReturnCurve> curves;
    for (uint64_t seed : config.seeds) {
      curves.push_back(ReadCurve(
          ReadCsv(SeedDir(config.output_dir, seed) / "rl_metrics.csv"),
          "eval_return_clean"));
    }
    rows.push_back({k, Mean(reactivity), Mean(lag), SummarizeReturns(curves)});
  }

  CsvWriter csv(root / "ksweep.csv",
                {"k", "reactivity", "adaptation_lag", "perf_mean", "perf_std",
                 "perf_worst_seed_mean", "perf_worst_checkpoint"});
  for (const auto& row : rows) {
    csv.Add(row.k)
        .Add(row.reactivity)
        .Add(row.adaptation_lag)
        .Add(row.performance.mean)
        .Add(row.performance.std)
        .Add(row.performance.worst_seed_mean)
        .Add(row.performance.worst_checkpoint);
    csv.EndRow();
  }
  return rows;
}

}  // namespace mtr
