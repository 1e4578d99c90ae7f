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

#ifndef MTR_RL_TRAINER_H_
#define MTR_RL_TRAINER_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mtr/corruption.h"
#include "mtr/environment.h"
#include "mtr/experience.h"
#include "mtr/monitor.h"
#include "mtr/phase.h"
#include "mtr/ppo.h"
#include "mtr/trust.h"

namespace mtr {

// What a trust weight is attached to.
//   kExperience: (state, action, next_state, observed-reward bin).
//   kState: the state alone.
enum class TrustKeyMode { kExperience, kState };

std::string_view TrustKeyModeName(TrustKeyMode mode);
TrustKeyMode ParseTrustKeyMode(std::string_view name);

struct SdConfig {
  bool enabled = false;
  int window = 50;                // W, policy snapshots kept by the monitor.
  int64_t refit_interval = 1000;  // K, in environment steps.
  double alpha = 0.1;             // Trust EMA rate.
  DescriptorSet descriptors = DescriptorSet::kKlEntropy;
  TrustKeyMode key = TrustKeyMode::kExperience;
  double reward_bin_width = 0.1;
  // Logit step of the counterfactual response used by experience descriptors.
  double probe_step = 1.0;
  // Drift gap (nats) below which a refit finds no unstable population.
  double min_drift_gap = 1e-3;

  void Validate() const;
  bool operator==(const SdConfig&) const = default;
};

struct RlConfig {
  std::string env = "chain";  // "chain" or "grid".
  int chain_states = 8;
  int grid_side = 5;
  double clean_end = 0.3;
  double corrupt_end = 0.7;
  CorruptionMode corruption = NoCorruption{};
  PpoConfig ppo;
  SdConfig sd;
  bool record_descriptors = false;

  PhaseSchedule Schedule() const;
  std::unique_ptr<Environment> MakeEnv() const;
  void Validate() const;
  bool operator==(const RlConfig&) const = default;
};

// Weight applied to one experience, with its hidden reliability for scoring.
struct ExperienceTrustRecord {
  int64_t step = 0;
  double weight = 1.0;
  int reliability = 1;
};

struct RlEvalRow {
  int64_t step = 0;
  Phase phase = Phase::kClean;
  double eval_return_clean = 0.0;
  // Over experiences collected since the previous row.
  std::optional<double> mean_trust_reliable;
  std::optional<double> mean_trust_unreliable;
  std::optional<double> trust_rho_auroc;
  double mean_policy_entropy = 0.0;
  double lr = 0.0;
};

struct DescriptorRecord {
  int64_t step = 0;
  int state = 0;
  DescriptorVector descriptors;
};

// Mean smoothed trust over the experiences of a refit's fit window, taken
// right after the refit.
struct TrustSignalPoint {
  int64_t step = 0;
  double value = 1.0;
};

struct RlRunResult {
  std::vector<RlEvalRow> eval;
  std::vector<RefitRecord> refits;
  std::vector<DescriptorRecord> descriptors;
  std::vector<ExperienceTrustRecord> experience_trust;
  std::vector<TrustSignalPoint> trust_signal;
  double optimal_return = 0.0;
  // Policy parameters after training, for identity checks.
  MlpParams final_policy;
  MlpParams final_value;
};

// Greedy rollout of `policy` on true rewards; consumes no randomness.
double EvaluateGreedy(const Environment& env, const MlpParams& policy);

RlRunResult TrainRl(const RlConfig& config, uint64_t seed);

// Summary statistics over experience_trust for steps in [begin, end).
struct TrustWindowStats {
  std::optional<double> mean_reliable;
  std::optional<double> mean_unreliable;
  std::optional<double> mean_all;
  std::optional<double> auroc;  // Trust as a score for rho == 1.
};

TrustWindowStats SummarizeTrust(const std::vector<ExperienceTrustRecord>& recs,
                                int64_t begin, int64_t end);

// Per-step trust signal on [0, total): the latest refit value, 1 before the
// first refit.
std::vector<double> TrustSignalPerStep(const std::vector<TrustSignalPoint>& pts,
                                       int64_t total);

}  // namespace mtr

#endif  // MTR_RL_TRAINER_H_
