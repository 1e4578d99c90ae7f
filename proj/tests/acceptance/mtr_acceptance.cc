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

// Acceptance suite: prints one PASS/FAIL line per criterion.
//
//   mtr_acceptance [--out DIR] [--only N[,N...]]
//
// Exits nonzero when a criterion outside kExpectedFailures fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mtr/belief.h"
#include "mtr/config.h"
#include "mtr/csv.h"
#include "mtr/errors.h"
#include "mtr/gmm.h"
#include "mtr/loss_heads.h"
#include "mtr/metrics.h"
#include "mtr/prob.h"
#include "mtr/rl_trainer.h"
#include "mtr/runner.h"
#include "mtr/sl_trainer.h"

namespace mtr {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::json;

// SL lock-in does not reproduce at this scale; see README.
const std::set<int> kExpectedFailures = {11};

// Tolerances.
constexpr double kFdStep = 1e-5;
constexpr double kFdMaxRelError = 1e-4;
// Relative error denominator floor; below it the error is effectively
// absolute.
constexpr double kFdFloor = 1e-6;
constexpr double kGmmMeanTol = 0.05;
constexpr double kLlSlack = 1e-9;
constexpr double kTrustAurocMin = 0.7;
constexpr double kReversibleRatio = 0.9;
constexpr double kNonConfusionMinTrust = 0.5;
constexpr double kFixedPointStds = 3.0;
constexpr double kSlMinAccuracy = 0.95;
constexpr double kSlAurocMin = 0.7;
constexpr int kSeeds = 5;
constexpr int kMinSeedsPassing = 4;
constexpr int kBeliefSeeds = 10;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

std::string Fixed(double v) { return Fmt("%.4g", v); }

// ---------------------------------------------------------------- 1

Matrix RandomMatrix(Eigen::Index rows, Eigen::Index cols, SeededRng& rng) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.Normal();
  return m;
}

double FdError(const std::function<double(const Matrix&)>& loss, Matrix x,
               const Matrix& grad) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double saved = x.data()[i];
    x.data()[i] = saved + kFdStep;
    const double up = loss(x);
    x.data()[i] = saved - kFdStep;
    const double down = loss(x);
    x.data()[i] = saved;
    const double fd = (up - down) / (2 * kFdStep);
    const double a = grad.data()[i];
    worst = std::max(worst, std::abs(a - fd) /
                                std::max({std::abs(a), std::abs(fd), kFdFloor}));
  }
  return worst;
}

Outcome GradientCheck() {
  SeededRng rng(101);
  double worst_policy = 0.0, worst_value = 0.0, worst_ce = 0.0;
  constexpr double kClip = 0.2;
  for (int trial = 0; trial < 100; ++trial) {
    const int batch = 1 + static_cast<int>(rng.UniformInt(8));
    const int actions = 2 + static_cast<int>(rng.UniformInt(4));
    // Policy head, with ratios kept away from the clip kinks.
    Matrix logits;
    std::vector<int> acts;
    std::vector<double> old_lp, adv, w;
    for (bool near_kink = true; near_kink;) {
      near_kink = false;
      logits = RandomMatrix(batch, actions, rng);
      acts.clear();
      old_lp.clear();
      adv.clear();
      w.clear();
      for (int i = 0; i < batch; ++i) {
        const int a = static_cast<int>(rng.UniformInt(actions));
        const double ratio = std::exp(rng.Normal(0.0, 0.3));
        near_kink |= std::abs(ratio - (1 - kClip)) < 1e-3 ||
                     std::abs(ratio - (1 + kClip)) < 1e-3;
        const RowVector row = logits.row(i);
        const auto p = Softmax(std::span<const double>(row.data(), row.size()));
        acts.push_back(a);
        old_lp.push_back(std::log(p[a]) - std::log(ratio));
        adv.push_back(rng.Normal());
        w.push_back(rng.Uniform01());
      }
    }
    const LossAndGrad pg =
        TrustWeightedPolicyLoss(logits, acts, old_lp, adv, w, kClip);
    worst_policy = std::max(
        worst_policy, FdError(
                          [&](const Matrix& x) {
                            return TrustWeightedPolicyLoss(x, acts, old_lp,
                                                           adv, w, kClip)
                                .loss;
                          },
                          logits, pg.grad));

    const Matrix pred = RandomMatrix(batch, 1, rng);
    std::vector<double> targets(batch);
    for (double& t : targets) t = rng.Normal();
    worst_value = std::max(
        worst_value,
        FdError([&](const Matrix& x) { return ValueMse(x, targets).loss; },
                pred, ValueMse(pred, targets).grad));

    const int classes = 2 + static_cast<int>(rng.UniformInt(9));
    const Matrix ce_logits = RandomMatrix(batch, classes, rng);
    std::vector<int> labels(batch);
    for (int& y : labels) y = static_cast<int>(rng.UniformInt(classes));
    worst_ce = std::max(
        worst_ce, FdError(
                      [&](const Matrix& x) {
                        return CrossEntropy(x, labels, w).loss;
                      },
                      ce_logits, CrossEntropy(ce_logits, labels, w).grad));
  }
  const double worst = std::max({worst_policy, worst_value, worst_ce});
  return {worst < kFdMaxRelError,
          "max rel err policy " + Fixed(worst_policy) + ", value " +
              Fixed(worst_value) + ", ce " + Fixed(worst_ce)};
}

// ---------------------------------------------------------------- 2

bool SameParams(const MlpParams& a, const MlpParams& b) {
  if (a.layers.size() != b.layers.size()) return false;
  for (size_t l = 0; l < a.layers.size(); ++l) {
    if (a.layers[l].weight != b.layers[l].weight ||
        a.layers[l].bias != b.layers[l].bias) {
      return false;
    }
  }
  return true;
}

Outcome RegulatorIdentity() {
  RlConfig rl;
  rl.ppo.total_steps = 16384;
  rl.corruption = UniformReplace{};
  RlConfig rl_inert = rl;
  rl_inert.sd.enabled = true;
  rl_inert.sd.refit_interval = rl.ppo.total_steps + 1;
  bool rl_ok = true;
  for (uint64_t seed : {0, 1}) {
    const RlRunResult a = TrainRl(rl, seed), b = TrainRl(rl_inert, seed);
    rl_ok &= a.eval.size() == b.eval.size();
    for (size_t i = 0; rl_ok && i < a.eval.size(); ++i) {
      rl_ok &= a.eval[i].eval_return_clean == b.eval[i].eval_return_clean &&
               a.eval[i].mean_policy_entropy == b.eval[i].mean_policy_entropy;
    }
    rl_ok &= SameParams(a.final_policy, b.final_policy) &&
             SameParams(a.final_value, b.final_value);
  }

  SlConfig sl;
  sl.total_steps = 2000;
  sl.bias.active_until_step = 600;
  SlConfig sl_inert = sl;
  sl_inert.regulator = true;
  sl_inert.refit_interval = sl.total_steps + 1;
  bool sl_ok = true;
  for (uint64_t seed : {0, 1}) {
    const Dataset data = LoadSlDataset(sl, seed);
    const SlRunResult a = TrainSl(sl, data, seed),
                      b = TrainSl(sl_inert, data, seed);
    for (size_t i = 0; sl_ok && i < a.rows.size(); ++i) {
      sl_ok &= a.rows[i].train_loss == b.rows[i].train_loss &&
               a.rows[i].batch_mean_entropy == b.rows[i].batch_mean_entropy;
    }
    sl_ok &= SameParams(a.final_params, b.final_params);
  }

  BeliefConfig belief;
  belief.refit_interval = belief.steps + 1;
  bool belief_ok = true;
  for (uint64_t seed : {0, 1, 2}) {
    belief_ok &= RunBelief(belief, false, seed).theta ==
                 RunBelief(belief, true, seed).theta;
  }
  auto word = [](bool ok) { return ok ? "identical" : "DIFFER"; };
  return {rl_ok && sl_ok && belief_ok,
          std::string("rl ") + word(rl_ok) + ", sl " + word(sl_ok) +
              ", belief " + word(belief_ok)};
}

// ---------------------------------------------------------------- 3

// Two spherical clusters in 3-d: 1000 points at (0, 0, 0) and 1500 at
// (3, -2, 1), per-coordinate sd 0.3. Sampling error of a cluster mean is
// about 0.01 per coordinate, well inside the tolerance.
Outcome GmmOracle() {
  const Point3 mu_a{0.0, 0.0, 0.0}, mu_b{3.0, -2.0, 1.0};
  double worst_mean = 0.0;
  for (uint64_t seed = 0; seed < 10; ++seed) {
    SeededRng rng(seed);
    std::vector<Point3> pts;
    for (int i = 0; i < 2500; ++i) {
      const Point3& mu = i < 1000 ? mu_a : mu_b;
      pts.push_back({rng.Normal(mu[0], 0.3), rng.Normal(mu[1], 0.3),
                     rng.Normal(mu[2], 0.3)});
    }
    SeededRng fit_rng(seed + 1000);
    const GmmFit fit = FitGmm(pts, fit_rng);
    for (const Point3& truth : {mu_a, mu_b}) {
      double best = 1e300;
      for (const auto& c : fit.model.components) {
        double err = 0.0;
        for (int d = 0; d < 3; ++d) {
          err = std::max(err, std::abs(c.mean[d] - truth[d]));
        }
        best = std::min(best, err);
      }
      worst_mean = std::max(worst_mean, best);
    }
  }

  // Log-likelihood monotonicity over random mixtures of varied shape.
  double worst_drop = 0.0;
  SeededRng rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 4 + static_cast<int>(rng.UniformInt(300));
    const int k = 1 + static_cast<int>(rng.UniformInt(3));
    std::vector<Point3> centers(k);
    for (auto& c : centers) c = {rng.Normal(0, 3), rng.Normal(0, 3), rng.Normal(0, 3)};
    std::vector<Point3> pts;
    const double sd = std::exp(rng.Normal(-1, 1));
    for (int i = 0; i < n; ++i) {
      const Point3& c = centers[rng.UniformInt(k)];
      pts.push_back({rng.Normal(c[0], sd), rng.Normal(c[1], sd),
                     rng.Normal(c[2], sd)});
    }
    const GmmFit fit = FitGmm(pts, rng);
    for (size_t i = 1; i < fit.log_likelihood.size(); ++i) {
      worst_drop = std::max(
          worst_drop, fit.log_likelihood[i - 1] - fit.log_likelihood[i]);
    }
  }

  // Degenerate inputs: identical points, a line, one outlier among copies.
  bool finite = true;
  const std::vector<std::vector<Point3>> degenerate{
      std::vector<Point3>(20, Point3{1.0, 2.0, 3.0}),
      [] {
        std::vector<Point3> v;
        for (int i = 0; i < 20; ++i) v.push_back({double(i), 0.0, 0.0});
        return v;
      }(),
      [] {
        std::vector<Point3> v(19, Point3{0.0, 0.0, 0.0});
        v.push_back({5.0, 5.0, 5.0});
        return v;
      }()};
  for (const auto& pts : degenerate) {
    SeededRng r(5);
    const GmmFit fit = FitGmm(pts, r);
    for (double ll : fit.log_likelihood) finite &= std::isfinite(ll);
    for (const auto& c : fit.model.components) {
      finite &= std::isfinite(c.weight);
      for (int d = 0; d < 3; ++d) {
        finite &= std::isfinite(c.mean[d]) && std::isfinite(c.variance[d]);
      }
    }
    for (const auto& p : pts) {
      finite &= std::isfinite(TrustWeight(fit.model, p));
    }
  }
  return {worst_mean < kGmmMeanTol && worst_drop <= kLlSlack && finite,
          "worst mean err " + Fixed(worst_mean) + ", worst ll drop " +
              Fixed(worst_drop) + ", degenerate " +
              (finite ? "finite" : "NON-FINITE")};
}

// ---------------------------------------------------------------- 4

Outcome AurocEquivalence() {
  SeededRng rng(404);
  int mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const size_t n = 2 + rng.UniformInt(199);
    std::vector<double> s(n);
    std::vector<int> y(n);
    const bool coarse = trial % 2 == 0;  // Many ties.
    for (size_t i = 0; i < n; ++i) {
      s[i] = coarse ? static_cast<double>(rng.UniformInt(5)) : rng.Normal();
      y[i] = static_cast<int>(rng.UniformInt(2));
    }
    y[0] = 0;
    y[1] = 1;
    mismatches += Auroc(s, y) != AurocBruteForce(s, y);
  }
  return {mismatches == 0,
          std::to_string(mismatches) + "/1000 instances differ (exact ==)"};
}

// ---------------------------------------------------------------- 5-9, 12

RlConfig ChainConfig(CorruptionMode mode, bool sd, int64_t k = 1000) {
  RlConfig c;
  c.corruption = mode;
  c.sd.enabled = sd;
  c.sd.refit_interval = k;
  return c;
}

struct RlBatch {
  RlConfig config;
  std::vector<RlRunResult> runs;
};

RlBatch RunBatch(const RlConfig& config) {
  RlBatch b{config, {}};
  for (int seed = 0; seed < kSeeds; ++seed) {
    b.runs.push_back(TrainRl(config, static_cast<uint64_t>(seed)));
  }
  return b;
}

ReturnSummary Returns(const RlBatch& b) {
  std::vector<ReturnCurve> curves;
  for (const auto& r : b.runs) {
    ReturnCurve c;
    for (const auto& e : r.eval) c.push_back({e.step, e.eval_return_clean});
    curves.push_back(std::move(c));
  }
  return SummarizeReturns(curves);
}

Outcome CalibratedSkepticism(const RlBatch& sd) {
  const PhaseSchedule s = sd.config.Schedule();
  int passing = 0;
  std::string detail;
  for (const auto& r : sd.runs) {
    const TrustWindowStats w =
        SummarizeTrust(r.experience_trust, s.CorruptStart(), s.RecoverStart());
    const bool ok = w.mean_reliable && w.mean_unreliable && w.auroc &&
                    *w.mean_unreliable < *w.mean_reliable &&
                    *w.auroc > kTrustAurocMin;
    passing += ok;
    detail += " [rel " + Fixed(w.mean_reliable.value_or(NAN)) + " unrel " +
              Fixed(w.mean_unreliable.value_or(NAN)) + " auroc " +
              Fixed(w.auroc.value_or(NAN)) + "]";
  }
  return {passing >= kMinSeedsPassing,
          std::to_string(passing) + "/5 seeds;" + detail};
}

Outcome Reversibility(const RlBatch& sd) {
  const PhaseSchedule s = sd.config.Schedule();
  const int64_t clean_len = s.CorruptStart();
  const int64_t recover_len = s.total_steps - s.RecoverStart();
  int passing = 0;
  std::string detail;
  for (const auto& r : sd.runs) {
    const auto clean = SummarizeTrust(
        r.experience_trust, s.CorruptStart() - clean_len / 10, s.CorruptStart());
    const auto recover = SummarizeTrust(
        r.experience_trust, s.total_steps - recover_len / 10, s.total_steps);
    const bool ok = clean.mean_all && recover.mean_all &&
                    *recover.mean_all >= kReversibleRatio * *clean.mean_all;
    passing += ok;
    detail += " [" + Fixed(recover.mean_all.value_or(NAN)) + " vs " +
              Fixed(clean.mean_all.value_or(NAN)) + "]";
  }
  return {passing >= kMinSeedsPassing,
          std::to_string(passing) + "/5 seeds recover/clean;" + detail};
}

Outcome NonConfusion(const RlBatch& noise) {
  const PhaseSchedule s = noise.config.Schedule();
  int passing = 0;
  int64_t flags = 0;
  std::string detail;
  for (const auto& r : noise.runs) {
    for (const auto& e : r.experience_trust) flags += e.reliability == 0;
    const auto all = SummarizeTrust(r.experience_trust, 0, s.total_steps);
    passing += all.mean_all && *all.mean_all >= kNonConfusionMinTrust;
    detail += " " + Fixed(all.mean_all.value_or(NAN));
  }
  return {passing >= kMinSeedsPassing && flags == 0,
          std::to_string(passing) + "/5 seeds mean trust >= 0.5, " +
              std::to_string(flags) + " rho=0 flags; trust" + detail};
}

Outcome Compare(const RlBatch& sd, const RlBatch& base, bool check_worst) {
  const ReturnSummary a = Returns(sd), b = Returns(base);
  bool ok = a.mean >= b.mean;
  if (check_worst) ok &= a.worst_seed_mean >= b.worst_seed_mean;
  return {ok, "sd mean " + Fixed(a.mean) + " worst " +
                  Fixed(a.worst_seed_mean) + " vs baseline mean " +
                  Fixed(b.mean) + " worst " + Fixed(b.worst_seed_mean) +
                  " (optimal " + Fixed(sd.runs[0].optimal_return) + ")"};
}

Outcome KSweep(const std::map<int64_t, const RlBatch*>& by_k) {
  std::vector<double> reactivity, lag;
  std::string detail;
  for (const auto& [k, batch] : by_k) {
    const PhaseSchedule s = batch->config.Schedule();
    double r_sum = 0.0, l_sum = 0.0;
    for (const auto& run : batch->runs) {
      const auto signal = TrustSignalPerStep(run.trust_signal, s.total_steps);
      r_sum += Reactivity(signal);
      l_sum += AdaptationLag(signal, s);
    }
    reactivity.push_back(r_sum / batch->runs.size());
    lag.push_back(l_sum / batch->runs.size());
    detail += " [K=" + std::to_string(k) + " reactivity " +
              Fmt("%.3g", reactivity.back()) + " lag " + Fixed(lag.back()) +
              "]";
  }
  bool ok = true;
  for (size_t i = 1; i < reactivity.size(); ++i) {
    ok &= reactivity[i] < reactivity[i - 1] && lag[i] >= lag[i - 1];
  }
  return {ok, detail.substr(1)};
}

// ---------------------------------------------------------------- 10

Outcome Identifiability() {
  const BeliefConfig c;
  const double fixed_point = c.MixtureFixedPoint();
  int near_fixed_point = 0;
  std::vector<double> err_base, err_sd;
  for (int seed = 0; seed < kBeliefSeeds; ++seed) {
    const BeliefRun a = RunBelief(c, false, static_cast<uint64_t>(seed));
    const BeliefRun b = RunBelief(c, true, static_cast<uint64_t>(seed));
    near_fixed_point +=
        std::abs(a.final_mean - fixed_point) <= kFixedPointStds * a.final_std;
    err_base.push_back(a.final_error);
    err_sd.push_back(b.final_error);
  }
  const double med_base = Median(err_base), med_sd = Median(err_sd);
  const double pooled = std::sqrt(
      0.5 * (std::pow(PopulationStd(err_base), 2) +
             std::pow(PopulationStd(err_sd), 2)));
  const bool ok = near_fixed_point == kBeliefSeeds && med_sd < med_base &&
                  med_base - med_sd > pooled;
  return {ok, std::to_string(near_fixed_point) +
                  "/10 baseline seeds within 3 std of " + Fixed(fixed_point) +
                  "; median err sd " + Fixed(med_sd) + " vs baseline " +
                  Fixed(med_base) + ", gap " + Fixed(med_base - med_sd) +
                  " vs pooled std " + Fixed(pooled)};
}

// ---------------------------------------------------------------- 11

double PostRestorationEntropy(const SlRunResult& r, int64_t from) {
  double sum = 0.0;
  int64_t n = 0;
  for (const auto& row : r.rows) {
    if (row.step >= from) {
      sum += row.batch_mean_entropy;
      ++n;
    }
  }
  return sum / static_cast<double>(n);
}

Outcome SlLockIn() {
  const SlConfig biased;
  SlConfig control = biased;
  control.bias.flips.clear();
  int passing = 0, acc_ok = 0, entropy_ok = 0, auroc_ok = 0;
  std::string detail;
  for (int seed = 0; seed < kSeeds; ++seed) {
    const Dataset data = LoadSlDataset(biased, static_cast<uint64_t>(seed));
    const SlRunResult r = TrainSl(biased, data, static_cast<uint64_t>(seed));
    const SlRunResult ctl = TrainSl(control, data, static_cast<uint64_t>(seed));
    const int64_t from = biased.bias.active_until_step;
    const double h = PostRestorationEntropy(r, from);
    const double h_ctl = PostRestorationEntropy(ctl, from);
    const SlDiagnostics d = DiagnoseEntropy(r.rows, data.classes);
    const bool a = r.final_accuracy >= kSlMinAccuracy;
    const bool e = h < h_ctl;
    const bool u = d.auroc > kSlAurocMin;
    acc_ok += a;
    entropy_ok += e;
    auroc_ok += u;
    passing += a && e && u;
    detail += " [acc " + Fixed(r.final_accuracy) + " H " + Fmt("%.3g", h) +
              " vs ctl " + Fmt("%.3g", h_ctl) + " auroc " + Fixed(d.auroc) +
              "]";
  }
  return {passing >= kMinSeedsPassing,
          std::to_string(passing) + "/5 seeds (accuracy " +
              std::to_string(acc_ok) + ", entropy below control " +
              std::to_string(entropy_ok) + ", auroc " +
              std::to_string(auroc_ok) + ");" + detail};
}

// ---------------------------------------------------------------- 13

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::map<std::string, std::vector<std::string>>& CsvSchemas() {
  static const std::map<std::string, std::vector<std::string>> schemas{
      {"rl_metrics.csv",
       {"step", "phase", "eval_return_clean", "mean_trust_reliable",
        "mean_trust_unreliable", "trust_rho_auroc", "mean_policy_entropy",
        "lr"}},
      {"trust.csv",
       {"step", "key", "w_raw", "w_smoothed", "stable_component_mean_drift"}},
      {"descriptors.csv",
       {"step", "state", "drift", "consensus", "entropy_var"}},
      {"sl_metrics.csv",
       {"step", "phase", "train_loss", "batch_mean_entropy",
        "clean_test_accuracy"}},
      {"belief.csv",
       {"step", "theta", "abs_error", "trust_of_current_obs", "rho"}},
      {"ksweep.csv",
       {"k", "reactivity", "adaptation_lag", "perf_mean", "perf_std",
        "perf_worst_seed_mean", "perf_worst_checkpoint"}}};
  return schemas;
}

const std::set<std::string> kPhaseValues{"clean", "corrupt", "recover",
                                         "biased"};

bool IsNumber(const std::string& s) {
  if (s.empty()) return false;
  char* end = nullptr;
  std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

// Empty string when valid.
std::string ValidateCsv(const fs::path& p) {
  const auto& schemas = CsvSchemas();
  const auto it = schemas.find(p.filename().string());
  if (it == schemas.end()) return "unknown csv " + p.string();
  CsvTable t;
  try {
    t = ReadCsv(p);
  } catch (const Error& e) {
    return e.what();
  }
  if (t.header != it->second) return "bad header in " + p.string();
  for (const auto& row : t.rows) {
    for (size_t j = 0; j < row.size(); ++j) {
      const std::string& col = t.header[j];
      if (col == "phase") {
        if (!kPhaseValues.count(row[j])) return "bad phase in " + p.string();
      } else if (!row[j].empty() && !IsNumber(row[j])) {
        return "non-numeric " + col + " in " + p.string();
      }
    }
  }
  return "";
}

std::string ValidateJson(const fs::path& p) {
  Json j;
  try {
    j = Json::parse(Slurp(p));
  } catch (const std::exception& e) {
    return p.string() + ": " + e.what();
  }
  const std::string name = p.filename().string();
  std::vector<std::string> required;
  if (name == "summary.json") {
    required = {"experiment", "seeds",       "method",      "corruption",
                "metric",     "per_seed_last10", "aggregate", "diagnostics",
                "sl_regulator"};
    for (const char* k : {"mean", "std", "worst_case", "worst_seed_mean",
                          "worst_checkpoint"}) {
      if (!j.contains("aggregate") || !j["aggregate"].contains(k)) {
        return p.string() + ": aggregate." + k + " missing";
      }
    }
  } else if (name == "sl_diagnostics.json") {
    required = {"final_accuracy", "post_restoration_mean_entropy",
                "phase_entropy_auroc", "orientation", "brier", "nll",
                "nll_clamped", "reliability_bins"};
  } else if (name == "effective_config.json") {
    try {
      ParseConfig(Slurp(p));
    } catch (const Error& e) {
      return p.string() + ": " + e.what();
    }
    return "";
  } else {
    return "unknown json " + p.string();
  }
  for (const auto& k : required) {
    if (!j.contains(k)) return p.string() + ": " + k + " missing";
  }
  return "";
}

// Relative path -> contents, for every regular file under `root`.
std::map<std::string, std::string> Snapshot(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) {
      out[fs::relative(e.path(), root).string()] = Slurp(e.path());
    }
  }
  return out;
}

std::vector<RunConfig> DeterminismConfigs() {
  std::vector<RunConfig> out;
  RunConfig rl;
  rl.seeds = {0, 1};
  rl.rl.ppo.total_steps = 10240;
  rl.rl.corruption = UniformReplace{};
  rl.rl.sd.enabled = true;
  rl.rl.record_descriptors = true;
  out.push_back(rl);
  RunConfig rl_state = rl;
  rl_state.rl.corruption = StateDependent{};
  rl_state.rl.sd.enabled = false;
  rl_state.rl.record_descriptors = false;
  out.push_back(rl_state);
  RunConfig sl;
  sl.experiment = ExperimentKind::kSl;
  sl.seeds = {0, 1};
  sl.sl.total_steps = 2000;
  sl.sl.eval_interval = 100;
  sl.sl.bias.active_until_step = 600;
  out.push_back(sl);
  RunConfig sl_reg = sl;
  sl_reg.sl.regulator = true;
  sl_reg.sl.refit_interval = 250;
  out.push_back(sl_reg);
  RunConfig belief;
  belief.experiment = ExperimentKind::kBelief;
  belief.seeds = {0, 1, 2};
  belief.rl.sd.enabled = true;
  out.push_back(belief);
  return out;
}

Outcome DeterminismAndSchema(const fs::path& out) {
  const fs::path root = out / "determinism";
  fs::remove_all(root);
  std::ostringstream log;
  std::vector<std::string> problems;
  const auto configs = DeterminismConfigs();
  // Both passes write to the same path, since the effective config records
  // it; the first pass is moved aside before the second.
  const fs::path live = root / "run";
  for (const char* pass : {"a", "b"}) {
    for (size_t i = 0; i < configs.size(); ++i) {
      RunConfig c = configs[i];
      c.output_dir = (live / ("cfg_" + std::to_string(i))).string();
      if (Run(c, {}, log) != 0) problems.push_back("run failed: " + c.output_dir);
    }
    RunConfig sweep = configs[0];
    sweep.seeds = {0};
    sweep.rl.ppo.total_steps = 6144;
    sweep.output_dir = (live / "sweep").string();
    const std::vector<int64_t> ks{100, 2000};
    SweepK(sweep, ks, {}, log);
    fs::rename(live, root / pass);
  }
  const auto a = Snapshot(root / "a"), b = Snapshot(root / "b");
  int differing = 0;
  for (const auto& [path, bytes] : a) {
    const auto it = b.find(path);
    if (it == b.end() || it->second != bytes) ++differing;
  }
  differing += static_cast<int>(b.size()) - static_cast<int>(a.size());
  int validated = 0;
  for (const auto& [path, bytes] : a) {
    const fs::path p = root / "a" / path;
    std::string err;
    if (p.extension() == ".csv") {
      err = ValidateCsv(p);
    } else if (p.extension() == ".json") {
      err = ValidateJson(p);
    } else {
      err = "unexpected file " + p.string();
    }
    if (err.empty()) {
      ++validated;
    } else {
      problems.push_back(err);
    }
  }
  std::string detail = std::to_string(a.size()) + " files, " +
                       std::to_string(differing) + " differ on rerun, " +
                       std::to_string(validated) + " schema-valid";
  for (const auto& p : problems) detail += "; " + p;
  return {differing == 0 && problems.empty() && !a.empty(), detail};
}

// ----------------------------------------------------------------

int Main(int argc, char** argv) {
  fs::path out = "acceptance_runs";
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--out" && i + 1 < argc) {
      out = argv[++i];
    } else if (arg == "--only" && i + 1 < argc) {
      std::stringstream ss(argv[++i]);
      for (std::string tok; std::getline(ss, tok, ',');) only.insert(std::stoi(tok));
    } else {
      std::cerr << "usage: mtr_acceptance [--out DIR] [--only N[,N...]]\n";
      return 2;
    }
  }
  fs::create_directories(out);
  auto wanted = [&](std::initializer_list<int> ids) {
    if (only.empty()) return true;
    for (int id : ids) {
      if (only.count(id)) return true;
    }
    return false;
  };

  std::map<int, Outcome> results;
  auto timed = [&](int id, const std::function<Outcome()>& fn) {
    if (!wanted({id})) return;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
    o.detail += " (" + Fmt("%.1f", secs) + " s)";
    std::printf("criterion %2d %s: %s\n", id, o.pass ? "PASS" : "FAIL",
                o.detail.c_str());
    std::fflush(stdout);
    results[id] = o;
  };

  timed(1, GradientCheck);
  timed(2, RegulatorIdentity);
  timed(3, GmmOracle);
  timed(4, AurocEquivalence);

  // The RL criteria share runs; K = 1000 is the default refit interval.
  RlBatch uniform_sd, uniform_base, noise_sd, state_sd, state_base;
  RlBatch k_small, k_large;
  const bool need_uniform = wanted({5, 6, 8, 12});
  if (need_uniform) uniform_sd = RunBatch(ChainConfig(UniformReplace{}, true));
  if (wanted({8})) uniform_base = RunBatch(ChainConfig(UniformReplace{}, false));
  if (wanted({7})) noise_sd = RunBatch(ChainConfig(GaussianNoise{0.5}, true));
  if (wanted({9})) {
    state_sd = RunBatch(ChainConfig(StateDependent{}, true));
    state_base = RunBatch(ChainConfig(StateDependent{}, false));
  }
  if (wanted({12})) {
    k_small = RunBatch(ChainConfig(UniformReplace{}, true, 50));
    k_large = RunBatch(ChainConfig(UniformReplace{}, true, 20000));
  }
  timed(5, [&] { return CalibratedSkepticism(uniform_sd); });
  timed(6, [&] { return Reversibility(uniform_sd); });
  timed(7, [&] { return NonConfusion(noise_sd); });
  timed(8, [&] { return Compare(uniform_sd, uniform_base, true); });
  timed(9, [&] { return Compare(state_sd, state_base, false); });
  timed(10, Identifiability);
  timed(11, SlLockIn);
  timed(12, [&] {
    return KSweep({{50, &k_small}, {1000, &uniform_sd}, {20000, &k_large}});
  });
  timed(13, [&] { return DeterminismAndSchema(out); });

  int unexpected = 0;
  for (const auto& [id, o] : results) {
    if (!o.pass && !kExpectedFailures.count(id)) ++unexpected;
    if (!o.pass && kExpectedFailures.count(id)) {
      std::printf("criterion %2d failure is known and documented\n", id);
    }
  }
  std::printf("%d unexpected failure(s)\n", unexpected);
  return unexpected == 0 ? 0 : 1;
}

}  // namespace
}  // namespace mtr

int main(int argc, char** argv) {
  try {
    return mtr::Main(argc, argv);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "mtr_acceptance: %s\n", e.what());
    return 1;
  }
}
