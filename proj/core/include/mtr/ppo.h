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

#ifndef MTR_PPO_H_
#define MTR_PPO_H_

#include <cstdint>
#include <span>
#include <vector>

#include "mtr/matrix.h"
#include "mtr/mlp.h"
#include "mtr/optim.h"
#include "mtr/rng.h"

namespace mtr {

struct PpoConfig {
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double clip_eps = 0.2;
  int epochs_per_batch = 4;
  int minibatch_size = 64;
  int rollout_length = 512;
  double value_coef = 0.5;
  double entropy_coef = 0.0;
  double lr0 = 3e-4;
  int64_t total_steps = 100000;
  // 0: total_steps / 30.
  int64_t eval_interval = 0;

  int64_t EffectiveEvalInterval() const;
  // Throws ConfigError naming the offending field.
  void Validate() const;
  bool operator==(const PpoConfig&) const = default;
};

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;
};

// delta_t = r_t + gamma V(s_{t+1}) (1 - done_t) - V(s_t),
// A_t = delta_t + gamma lambda (1 - done_t) A_{t+1}, returns = A + V.
// V(s_{t+1}) for the last step is `bootstrap_value`. Throws ShapeError on a
// length mismatch and ConfigError on gamma or lambda outside [0, 1].
GaeResult Gae(std::span<const double> rewards, std::span<const double> values,
              std::span<const uint8_t> dones, double bootstrap_value,
              double gamma, double lambda);

// Learner-visible rollout. Ground-truth reliability lives in RolloutAudit so
// that nothing here can feed it to a loss.
struct RolloutBuffer {
  std::vector<int> states;
  std::vector<int> actions;
  std::vector<double> rewards;  // Observed (possibly corrupted).
  std::vector<int> next_states;
  std::vector<uint8_t> dones;
  std::vector<double> log_probs;
  std::vector<double> values;
  std::vector<int64_t> steps;
  std::vector<double> advantages;
  std::vector<double> returns;

  size_t size() const { return states.size(); }
  void Clear();
};

struct RolloutAudit {
  std::vector<int> reliability;
  std::vector<double> reward_true;

  void Clear();
};

struct ActorCritic {
  MlpParams policy;
  MlpParams value;
  AdamState policy_opt;
  AdamState value_opt;

  static ActorCritic Init(int obs_dim, int num_actions, SeededRng& rng);
};

struct PpoDiagnostics {
  double policy_loss = 0.0;  // Mean over minibatches of the last epoch.
  double value_loss = 0.0;
  double entropy = 0.0;
  // Mean KL(pi_old || pi_new) over the buffer states.
  double mean_kl = 0.0;
};

// epochs_per_batch passes of shuffled minibatch Adam. Advantages are
// normalized over the whole buffer, then multiplied by trust inside the
// policy loss. `weights` has one entry per buffer row; empty means w == 1.
// The value loss is never weighted. `observations` row i encodes
// buffer.states[i].
PpoDiagnostics PpoUpdate(const RolloutBuffer& buffer,
                         const Matrix& observations, ActorCritic& net,
                         std::span<const double> weights,
                         const PpoConfig& config, double lr,
                         SeededRng& minibatch_rng);

// Rows of `table` selected by `rows`.
Matrix GatherRows(const Matrix& table, std::span<const int> rows);

}  // namespace mtr

#endif  // MTR_PPO_H_
