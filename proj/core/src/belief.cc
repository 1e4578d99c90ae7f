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

#include "mtr/belief.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <map>

#include "mtr/errors.h"
#include "mtr/metrics.h"
#include "mtr/trust.h"

namespace mtr {
namespace {

constexpr int64_t kFinalSteps = 1000;
constexpr int64_t kBurnIn = 1000;
// Neighbours for the source window are searched among the last
// kHistoryFactor * window observations.
constexpr size_t kHistoryFactor = 4;

// Observation roles under the latest mixture.
enum Role { kStableRole = 0, kUnstableRole = 1 };

double Sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// The current observation plus its window - 1 nearest neighbours (by value)
// among the recent history: the observations most likely to share its
// source.
std::vector<double> SourceWindow(const std::deque<double>& history, double y,
                                 size_t window) {
  std::vector<double> pool(history.begin(), history.end());
  const size_t keep = std::min(pool.size(), window - 1);
  std::partial_sort(pool.begin(), pool.begin() + keep, pool.end(),
                    [y](double a, double b) {
                      return std::abs(a - y) < std::abs(b - y);
                    });
  pool.resize(keep);
  pool.push_back(y);
  return pool;
}

// (|residual|, variance, consistency) onto the trust estimator's (drift,
// consensus, entropy variance) axes, masked like policy descriptors.
Point3 ToTrustAxes(const Point3& d, DescriptorSet set) {
  DescriptorVector v;
  v.policy_drift = d[0];
  v.action_consensus = d[2];
  v.entropy_variance = d[1];
  return MaskDescriptors(v, set);
}

}  // namespace

double BeliefConfig::MixtureFixedPoint() const {
  return (1.0 - p_unreliable) * mu_star + p_unreliable * unreliable_bias;
}

void BeliefConfig::Validate() const {
  if (!(p_unreliable >= 0.0 && p_unreliable < 1.0)) {
    throw ConfigError("belief.p_unreliable: probability out of range [0, 1)");
  }
  if (!(eta > 0.0)) throw ConfigError("belief.eta must be > 0");
  if (!(sigma_reliable >= 0.0) || !(unreliable_sigma >= 0.0)) {
    throw ConfigError("belief: noise std must be >= 0");
  }
  if (steps < 1) throw ConfigError("belief.steps must be >= 1");
  if (window < 2) throw ConfigError("belief.window must be >= 2");
  if (refit_interval < 1) {
    throw ConfigError("belief.refit_interval must be >= 1");
  }
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw ConfigError("belief.alpha must be in (0, 1]");
  }
}

Observation GenObservation(int64_t /*step*/, const BeliefConfig& config,
                           SeededRng& rng) {
  if (rng.Bernoulli(config.p_unreliable)) {
    return {rng.Normal(config.unreliable_bias, config.unreliable_sigma), 0};
  }
  return {rng.Normal(config.mu_star, config.sigma_reliable), 1};
}

double BeliefUpdate(double theta, double y, double eta, double w) {
  return theta - eta * w * (theta - y);
}

Point3 BeliefDescriptors(std::span<const double> ys, double theta) {
  if (ys.size() < 2) {
    throw InsufficientDataError("BeliefDescriptors: need >= 2 entries");
  }
  const double n = static_cast<double>(ys.size());
  double mean = 0.0, sign_sum = 0.0;
  for (double y : ys) {
    mean += (y - theta) / n;
    sign_sum += Sign(y - theta);
  }
  double var = 0.0;
  for (double y : ys) var += (y - theta - mean) * (y - theta - mean) / n;
  return {std::abs(ys.back() - theta), var, std::abs(sign_sum / n)};
}

BeliefRun RunBelief(const BeliefConfig& config, bool with_sd, uint64_t seed) {
  config.Validate();
  const SeededRng root(seed);
  SeededRng obs_rng = DeriveRng(root, "obs");
  SeededRng trust_rng = DeriveRng(root, "trust");
  const size_t capacity = static_cast<size_t>(config.window);
  const int64_t k = config.refit_interval;

  BeliefRun run;
  run.theta.reserve(static_cast<size_t>(config.steps));
  TrustState trust;
  trust.alpha = config.alpha;
  trust.refit_interval = k;
  std::optional<TrustModel> model;
  std::deque<double> history;
  const size_t history_capacity = kHistoryFactor * capacity;
  std::vector<Point3> fit_points;

  double theta = config.theta0;
  for (int64_t step = 0; step < config.steps; ++step) {
    if (with_sd && step > 0 && ShouldRefit(step, k)) {
      try {
        TrustModel fitted = FitTrustModel(fit_points, trust_rng);
        std::array<double, 2> sum{0.0, 0.0};
        std::array<int, 2> count{0, 0};
        for (const Point3& p : fit_points) {
          const double w = fitted.Weight(p);
          const int role = w >= 0.5 ? kStableRole : kUnstableRole;
          sum[role] += w;
          ++count[role];
        }
        std::map<TrustKey, double> raw;
        for (int r = 0; r < 2; ++r) {
          if (count[r] > 0) raw[r] = sum[r] / count[r];
        }
        UpdateTrust(trust, raw, trust.alpha);
        trust.last_refit_step = step;
        model = std::move(fitted);
      } catch (const InsufficientDataError&) {
      }
      fit_points.clear();
    }

    const Observation obs = GenObservation(step, config, obs_rng);
    double w = 1.0;
    if (with_sd) {
      if (!history.empty()) {
        const Point3 d = ToTrustAxes(
            BeliefDescriptors(SourceWindow(history, obs.y, capacity), theta),
            config.descriptors);
        fit_points.push_back(d);
        if (model) {
          w = trust.Get(model->Weight(d) >= 0.5 ? kStableRole : kUnstableRole);
        }
      }
      history.push_back(obs.y);
      if (history.size() > history_capacity) history.pop_front();
      run.trust.push_back(w);
    }
    theta = BeliefUpdate(theta, obs.y, config.eta, w);
    run.theta.push_back(theta);
    run.abs_error.push_back(std::abs(theta - config.mu_star));
    run.rho.push_back(obs.reliability);
  }

  const size_t n = run.theta.size();
  const size_t tail = static_cast<size_t>(std::min<int64_t>(kFinalSteps, n));
  const std::span<const double> final_theta(run.theta.data() + n - tail, tail);
  run.final_mean = Mean(final_theta);
  run.final_std = PopulationStd(final_theta);
  run.final_error =
      Mean(std::span<const double>(run.abs_error.data() + n - tail, tail));

  if (with_sd && static_cast<int64_t>(n) > kBurnIn) {
    std::vector<double> scores;
    std::vector<int> labels;
    for (size_t i = kBurnIn; i < n; ++i) {
      scores.push_back(*run.trust[i]);
      labels.push_back(run.rho[i]);
    }
    try {
      run.trust_rho_auroc = Auroc(scores, labels);
    } catch (const UndefinedMetricError&) {
    }
  }
  return run;
}

}  // namespace mtr
