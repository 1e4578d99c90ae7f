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

#include "mtr/rl_trainer.h"

#include <cmath>
#include <deque>
#include <map>
#include <string>

#include "mtr/errors.h"
#include "mtr/metrics.h"
#include "mtr/prob.h"

namespace mtr {
namespace {

constexpr int64_t kBinOffset = int64_t{1} << 23;

TrustKey ExperienceKey(const Transition& t, double bin_width) {
  int64_t bin = std::llround(t.reward_observed / bin_width) + kBinOffset;
  bin = std::clamp<int64_t>(bin, 0, (int64_t{1} << 24) - 1);
  return (static_cast<uint64_t>(t.state) << 48) |
         (static_cast<uint64_t>(t.action) << 40) |
         (static_cast<uint64_t>(t.next_state) << 24) |
         static_cast<uint64_t>(bin);
}

TrustKey KeyOf(const Transition& t, const SdConfig& sd) {
  return sd.key == TrustKeyMode::kState ? static_cast<TrustKey>(t.state)
                                        : ExperienceKey(t, sd.reward_bin_width);
}

Matrix ObservationTable(const Environment& env) {
  const int n = env.num_states();
  Matrix table(n, n);
  for (int s = 0; s < n; ++s) {
    const std::vector<double> o = env.Observe(s);
    for (int j = 0; j < n; ++j) table(s, j) = o[j];
  }
  return table;
}

PolicySnapshot Snapshot(int64_t index, const Matrix& probs) {
  PolicySnapshot snap;
  snap.update_index = index;
  for (Eigen::Index s = 0; s < probs.rows(); ++s) {
    const RowVector row = probs.row(s);
    snap.distributions[static_cast<int>(s)] =
        std::vector<double>(row.data(), row.data() + row.size());
  }
  return snap;
}

double MeanEntropyOf(const Matrix& probs) { return BatchMeanEntropy(probs); }

struct PendingDescriptor {
  int64_t step;
  Point3 point;
  TrustKey key;
};

}  // namespace

std::string_view TrustKeyModeName(TrustKeyMode mode) {
  return mode == TrustKeyMode::kState ? "state" : "experience";
}

TrustKeyMode ParseTrustKeyMode(std::string_view name) {
  if (name == "state") return TrustKeyMode::kState;
  if (name == "experience") return TrustKeyMode::kExperience;
  throw ConfigError("unknown trust key '" + std::string(name) +
                    "' (expected experience or state)");
}

void SdConfig::Validate() const {
  if (window < 2) throw ConfigError("sd.window must be >= 2");
  if (refit_interval < 1) throw ConfigError("sd.refit_interval must be >= 1");
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw ConfigError("sd.alpha must be in (0, 1]");
  }
  if (!(reward_bin_width > 0.0)) {
    throw ConfigError("sd.reward_bin_width must be > 0");
  }
  if (!(probe_step > 0.0)) throw ConfigError("sd.probe_step must be > 0");
  if (!(min_drift_gap >= 0.0)) {
    throw ConfigError("sd.min_drift_gap must be >= 0");
  }
}

PhaseSchedule RlConfig::Schedule() const {
  return PhaseSchedule{ppo.total_steps, clean_end, corrupt_end};
}

std::unique_ptr<Environment> RlConfig::MakeEnv() const {
  if (env == "chain") {
    ChainEnv::Options o;
    o.n_states = chain_states;
    return std::make_unique<ChainEnv>(o);
  }
  if (env == "grid") {
    GridWorld::Options o;
    o.side = grid_side;
    return std::make_unique<GridWorld>(o);
  }
  throw ConfigError("unknown environment '" + env + "' (expected chain or grid)");
}

void RlConfig::Validate() const {
  ppo.Validate();
  sd.Validate();
  Schedule().Validate();
  ValidateCorruption(corruption);
  MakeEnv();
}

double EvaluateGreedy(const Environment& env, const MlpParams& policy) {
  const Matrix logits = MlpForward(policy, ObservationTable(env));
  std::vector<int> actions(env.num_states());
  for (int s = 0; s < env.num_states(); ++s) {
    const RowVector row = logits.row(s);
    actions[s] = Argmax(std::span<const double>(row.data(), row.size()));
  }
  return RolloutReturn(env, actions);
}

TrustWindowStats SummarizeTrust(const std::vector<ExperienceTrustRecord>& recs,
                                int64_t begin, int64_t end) {
  std::vector<double> scores;
  std::vector<int> labels;
  double sum_rel = 0.0, sum_unrel = 0.0;
  int64_t n_rel = 0, n_unrel = 0;
  for (const auto& r : recs) {
    if (r.step < begin || r.step >= end) continue;
    scores.push_back(r.weight);
    labels.push_back(r.reliability);
    if (r.reliability == 1) {
      sum_rel += r.weight;
      ++n_rel;
    } else {
      sum_unrel += r.weight;
      ++n_unrel;
    }
  }
  TrustWindowStats out;
  if (n_rel > 0) out.mean_reliable = sum_rel / n_rel;
  if (n_unrel > 0) out.mean_unreliable = sum_unrel / n_unrel;
  if (n_rel + n_unrel > 0) {
    out.mean_all = (sum_rel + sum_unrel) / static_cast<double>(n_rel + n_unrel);
  }
  if (n_rel > 0 && n_unrel > 0) out.auroc = Auroc(scores, labels);
  return out;
}

std::vector<double> TrustSignalPerStep(const std::vector<TrustSignalPoint>& pts,
                                       int64_t total) {
  std::vector<double> out(static_cast<size_t>(total), 1.0);
  double current = 1.0;
  size_t next = 0;
  for (int64_t t = 0; t < total; ++t) {
    while (next < pts.size() && pts[next].step <= t) current = pts[next++].value;
    out[static_cast<size_t>(t)] = current;
  }
  return out;
}

RlRunResult TrainRl(const RlConfig& config, uint64_t seed) {
  config.Validate();
  const auto env = config.MakeEnv();
  const PhaseSchedule schedule = config.Schedule();
  const PpoConfig& ppo = config.ppo;
  const SdConfig& sd = config.sd;
  const int64_t total = ppo.total_steps;
  const int64_t eval_interval = ppo.EffectiveEvalInterval();

  const SeededRng root(seed);
  SeededRng env_rng = DeriveRng(root, "env/policy");
  SeededRng corrupt_rng = DeriveRng(root, "corrupt");
  SeededRng init_rng = DeriveRng(root, "init");
  SeededRng minibatch_rng = DeriveRng(root, "minibatch");
  SeededRng trust_rng = DeriveRng(root, "trust");

  const Matrix obs_table = ObservationTable(*env);
  ActorCritic net = ActorCritic::Init(env->num_states(), env->num_actions(),
                                      init_rng);

  RlRunResult result;
  result.optimal_return = SolveOptimal(*env).optimal_return;

  DescriptorWindow window(static_cast<size_t>(sd.window));
  int64_t update_index = 0;
  window.Record(
      Snapshot(update_index, SoftmaxRows(MlpForward(net.policy, obs_table))));

  TrustState trust;
  trust.alpha = sd.alpha;
  trust.refit_interval = sd.refit_interval;
  RefitOptions refit;
  refit.min_drift_gap = sd.min_drift_gap;
  std::deque<PendingDescriptor> pending;
  const bool want_descriptors = sd.enabled || config.record_descriptors;

  RolloutBuffer buffer;
  RolloutAudit audit;
  int state = env->start_state();
  int episode_t = 0;
  int64_t t = 0;
  int64_t next_eval = eval_interval;
  int64_t last_eval_step = 0;

  while (t < total) {
    const int64_t t0 = t;
    const int64_t len = std::min<int64_t>(ppo.rollout_length, total - t);
    const Matrix probs = SoftmaxRows(MlpForward(net.policy, obs_table));
    const Matrix values = MlpForward(net.value, obs_table);
    buffer.Clear();
    audit.Clear();

    for (int64_t i = 0; i < len; ++i, ++t) {
      const RowVector row = probs.row(state);
      const int action = env_rng.Categorical(
          std::span<const double>(row.data(), row.size()));
      const StepResult res = env->Step(state, action);
      const CorruptedReward cr = ApplyCorruption(
          res.reward_true, state, t, schedule, config.corruption, corrupt_rng);
      ++episode_t;
      const bool done = res.done || episode_t >= env->horizon();
      buffer.states.push_back(state);
      buffer.actions.push_back(action);
      buffer.rewards.push_back(cr.reward_observed);
      buffer.next_states.push_back(res.next_state);
      buffer.dones.push_back(done ? 1 : 0);
      buffer.log_probs.push_back(std::log(row(action)));
      buffer.values.push_back(values(state, 0));
      buffer.steps.push_back(t);
      audit.reliability.push_back(cr.reliability);
      audit.reward_true.push_back(res.reward_true);
      if (done) {
        state = env->start_state();
        episode_t = 0;
      } else {
        state = res.next_state;
      }
    }

    const bool last_done = buffer.dones.back() != 0;
    const double bootstrap = last_done ? 0.0 : values(state, 0);
    GaeResult gae = Gae(buffer.rewards, buffer.values, buffer.dones, bootstrap,
                        ppo.gamma, ppo.gae_lambda);
    buffer.advantages = std::move(gae.advantages);
    buffer.returns = std::move(gae.returns);

    std::vector<Transition> views(buffer.size());
    for (size_t i = 0; i < buffer.size(); ++i) {
      views[i] = Transition{buffer.states[i],  buffer.actions[i],
                            buffer.rewards[i], buffer.next_states[i],
                            buffer.dones[i] != 0, buffer.steps[i]};
    }

    // Monitor: descriptors of every experience against the window as it
    // stood when the experience was collected.
    if (want_descriptors && window.size() >= 2) {
      std::map<int, StateWindowSummary> summaries;
      for (size_t i = 0; i < buffer.size(); ++i) {
        const Transition& tr = views[i];
        auto it = summaries.find(tr.state);
        if (it == summaries.end()) {
          it = summaries.emplace(tr.state, SummarizeState(tr.state, window))
                   .first;
        }
        DescriptorVector d;
        if (sd.key == TrustKeyMode::kState) {
          d = it->second.window_descriptors;
        } else {
          const double next_v = tr.done ? 0.0 : values(tr.next_state, 0);
          const double td = tr.reward_observed + ppo.gamma * next_v -
                            values(tr.state, 0);
          d = ExperienceDescriptors(it->second, tr.action, td, sd.probe_step);
        }
        if (config.record_descriptors) {
          result.descriptors.push_back({tr.step, tr.state, d});
        }
        if (sd.enabled) {
          pending.push_back(
              {tr.step, MaskDescriptors(d, sd.descriptors), KeyOf(tr, sd)});
        }
      }
    }

    // Trust: refit at every K-th environment step covered by this rollout.
    if (sd.enabled) {
      const int64_t k = sd.refit_interval;
      int64_t first = ((t0 + k - 1) / k) * k;
      for (int64_t r = std::max<int64_t>(first, k); r < t; r += k) {
        if (!ShouldRefit(r, k)) continue;
        std::vector<Point3> points;
        std::vector<TrustKey> keys;
        for (const auto& p : pending) {
          if (p.step > r - k && p.step <= r) {
            points.push_back(p.point);
            keys.push_back(p.key);
          }
        }
        auto records = RefitTrust(trust, r, points, keys, trust_rng, refit);
        if (!records.empty()) {
          double sum = 0.0;
          for (TrustKey key : keys) sum += trust.Get(key);
          result.trust_signal.push_back({r, sum / keys.size()});
          result.refits.insert(result.refits.end(), records.begin(),
                               records.end());
        }
      }
      while (!pending.empty() && pending.front().step <= t - k) {
        pending.pop_front();
      }
    }

    std::vector<double> weights;
    if (sd.enabled) {
      weights.resize(buffer.size());
      for (size_t i = 0; i < buffer.size(); ++i) {
        weights[i] = trust.Get(KeyOf(views[i], sd));
      }
    }
    for (size_t i = 0; i < buffer.size(); ++i) {
      result.experience_trust.push_back(
          {buffer.steps[i], weights.empty() ? 1.0 : weights[i],
           audit.reliability[i]});
    }

    const double lr = LinearDecay(ppo.lr0, t0, total);
    const Matrix batch_obs = GatherRows(obs_table, buffer.states);
    PpoUpdate(buffer, batch_obs, net, weights, ppo, lr, minibatch_rng);

    const Matrix new_probs = SoftmaxRows(MlpForward(net.policy, obs_table));
    window.Record(Snapshot(++update_index, new_probs));

    if (t >= next_eval) {
      RlEvalRow row;
      row.step = t;
      row.phase = PhaseOf(t - 1, schedule);
      row.eval_return_clean = EvaluateGreedy(*env, net.policy);
      const TrustWindowStats stats =
          SummarizeTrust(result.experience_trust, last_eval_step, t);
      row.mean_trust_reliable = stats.mean_reliable;
      row.mean_trust_unreliable = stats.mean_unreliable;
      row.trust_rho_auroc = stats.auroc;
      row.mean_policy_entropy = MeanEntropyOf(new_probs);
      row.lr = lr;
      result.eval.push_back(row);
      last_eval_step = t;
      while (next_eval <= t) next_eval += eval_interval;
    }
  }
  result.final_policy = net.policy;
  result.final_value = net.value;
  return result;
}

}  // namespace mtr
