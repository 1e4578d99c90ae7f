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

#include "mtr/ppo.h"

#include <cmath>
#include <numeric>
#include <string>

#include "mtr/errors.h"
#include "mtr/loss_heads.h"
#include "mtr/monitor.h"
#include "mtr/prob.h"

namespace mtr {

int64_t PpoConfig::EffectiveEvalInterval() const {
  if (eval_interval > 0) return eval_interval;
  return std::max<int64_t>(1, total_steps / 30);
}

void PpoConfig::Validate() const {
  auto fail = [](const std::string& what) {
    throw ConfigError("ppo." + what);
  };
  if (!(gamma >= 0.0 && gamma <= 1.0)) fail("gamma must be in [0, 1]");
  if (!(gae_lambda >= 0.0 && gae_lambda <= 1.0)) {
    fail("gae_lambda must be in [0, 1]");
  }
  if (!(clip_eps > 0.0)) fail("clip_eps must be > 0");
  if (epochs_per_batch < 1) fail("epochs_per_batch must be >= 1");
  if (minibatch_size < 1) fail("minibatch_size must be >= 1");
  if (rollout_length < 1) fail("rollout_length must be >= 1");
  if (!(value_coef >= 0.0)) fail("value_coef must be >= 0");
  if (!(entropy_coef >= 0.0)) fail("entropy_coef must be >= 0");
  if (!(lr0 > 0.0)) fail("lr0 must be > 0");
  if (total_steps < 1) fail("total_steps must be >= 1");
  if (eval_interval < 0) fail("eval_interval must be >= 0");
}

GaeResult Gae(std::span<const double> rewards, std::span<const double> values,
              std::span<const uint8_t> dones, double bootstrap_value,
              double gamma, double lambda) {
  const size_t n = rewards.size();
  if (values.size() != n || dones.size() != n) {
    throw ShapeError("Gae: rewards, values and dones must have equal length");
  }
  if (!(gamma >= 0.0 && gamma <= 1.0) || !(lambda >= 0.0 && lambda <= 1.0)) {
    throw ConfigError("Gae: gamma and lambda must be in [0, 1]");
  }
  GaeResult out;
  out.advantages.assign(n, 0.0);
  out.returns.assign(n, 0.0);
  double next_adv = 0.0;
  double next_value = bootstrap_value;
  for (size_t i = n; i-- > 0;) {
    const double live = dones[i] ? 0.0 : 1.0;
    const double delta = rewards[i] + gamma * next_value * live - values[i];
    next_adv = delta + gamma * lambda * live * next_adv;
    out.advantages[i] = next_adv;
    out.returns[i] = next_adv + values[i];
    next_value = values[i];
  }
  return out;
}

void RolloutBuffer::Clear() {
  states.clear();
  actions.clear();
  rewards.clear();
  next_states.clear();
  dones.clear();
  log_probs.clear();
  values.clear();
  steps.clear();
  advantages.clear();
  returns.clear();
}

void RolloutAudit::Clear() {
  reliability.clear();
  reward_true.clear();
}

ActorCritic ActorCritic::Init(int obs_dim, int num_actions, SeededRng& rng) {
  ActorCritic net;
  net.policy = MlpParams::GlorotUniform(RlLayerSizes(obs_dim, num_actions),
                                        Activation::kTanh, rng);
  net.value = MlpParams::GlorotUniform(RlLayerSizes(obs_dim, 1),
                                       Activation::kTanh, rng);
  net.policy_opt = AdamState::For(net.policy);
  net.value_opt = AdamState::For(net.value);
  return net;
}

Matrix GatherRows(const Matrix& table, std::span<const int> rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), table.cols());
  for (size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = table.row(rows[i]);
  }
  return out;
}

PpoDiagnostics PpoUpdate(const RolloutBuffer& buffer,
                         const Matrix& observations, ActorCritic& net,
                         std::span<const double> weights,
                         const PpoConfig& config, double lr,
                         SeededRng& minibatch_rng) {
  const size_t n = buffer.size();
  if (n == 0) throw ShapeError("PpoUpdate: empty buffer");
  if (buffer.advantages.size() != n || buffer.returns.size() != n) {
    throw ShapeError("PpoUpdate: advantages not populated");
  }
  if (static_cast<size_t>(observations.rows()) != n) {
    throw ShapeError("PpoUpdate: one observation row per buffer entry");
  }
  if (!weights.empty() && weights.size() != n) {
    throw ShapeError("PpoUpdate: one weight per buffer entry");
  }

  std::vector<double> adv(buffer.advantages);
  double mean = std::accumulate(adv.begin(), adv.end(), 0.0) / n;
  double var = 0.0;
  for (double a : adv) var += (a - mean) * (a - mean);
  const double sd = std::sqrt(var / n);
  for (double& a : adv) a = (a - mean) / (sd + 1e-8);

  const Matrix old_probs = SoftmaxRows(MlpForward(net.policy, observations));

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  const size_t mb = static_cast<size_t>(config.minibatch_size);
  PpoDiagnostics diag;
  for (int epoch = 0; epoch < config.epochs_per_batch; ++epoch) {
    minibatch_rng.Shuffle(std::span<int>(order));
    double policy_sum = 0.0, value_sum = 0.0, entropy_sum = 0.0;
    int batches = 0;
    for (size_t start = 0; start < n; start += mb) {
      const size_t len = std::min(mb, n - start);
      std::span<const int> idx(order.data() + start, len);
      const Matrix obs = GatherRows(observations, idx);
      std::vector<int> actions(len);
      std::vector<double> old_lp(len), a(len), w, ret(len);
      if (!weights.empty()) w.resize(len);
      for (size_t i = 0; i < len; ++i) {
        const int j = idx[i];
        actions[i] = buffer.actions[j];
        old_lp[i] = buffer.log_probs[j];
        a[i] = adv[j];
        ret[i] = buffer.returns[j];
        if (!weights.empty()) w[i] = weights[j];
      }

      MlpCache pcache;
      const Matrix logits = MlpForward(net.policy, obs, &pcache);
      LossAndGrad pl = TrustWeightedPolicyLoss(logits, actions, old_lp, a, w,
                                               config.clip_eps);
      const LossAndGrad ent = MeanEntropy(logits);
      if (config.entropy_coef != 0.0) {
        pl.grad -= config.entropy_coef * ent.grad;
      }
      AdamStep(net.policy, MlpBackward(net.policy, pcache, pl.grad),
               net.policy_opt, lr);

      MlpCache vcache;
      const Matrix pred = MlpForward(net.value, obs, &vcache);
      LossAndGrad vl = ValueMse(pred, ret);
      vl.grad *= config.value_coef;
      AdamStep(net.value, MlpBackward(net.value, vcache, vl.grad),
               net.value_opt, lr);

      policy_sum += pl.loss;
      value_sum += vl.loss;
      entropy_sum += ent.loss;
      ++batches;
    }
    diag.policy_loss = policy_sum / batches;
    diag.value_loss = value_sum / batches;
    diag.entropy = entropy_sum / batches;
  }

  const Matrix new_probs = SoftmaxRows(MlpForward(net.policy, observations));
  double kl = 0.0;
  for (Eigen::Index r = 0; r < new_probs.rows(); ++r) {
    const RowVector p = old_probs.row(r);
    const RowVector q = new_probs.row(r);
    kl += KlDivergence(std::span<const double>(p.data(), p.size()),
                       std::span<const double>(q.data(), q.size()));
  }
  diag.mean_kl = kl / static_cast<double>(n);
  return diag;
}

}  // namespace mtr
