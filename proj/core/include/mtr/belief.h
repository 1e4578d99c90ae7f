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

#ifndef MTR_BELIEF_H_
#define MTR_BELIEF_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mtr/gmm.h"
#include "mtr/monitor.h"
#include "mtr/rng.h"

namespace mtr {

struct BeliefConfig {
  double mu_star = 1.0;
  double sigma_reliable = 0.2;
  double unreliable_bias = -1.0;
  double unreliable_sigma = 0.05;
  double p_unreliable = 0.3;
  double eta = 0.05;
  double theta0 = 0.0;
  int64_t steps = 5000;
  int window = 50;
  int64_t refit_interval = 100;
  double alpha = 0.1;
  // Residual magnitude, consistency and variance play the roles of drift,
  // consensus and entropy variance.
  DescriptorSet descriptors = DescriptorSet::kKlEntropy;

  // (1 - p) mu* + p * unreliable_bias, where the unweighted expected update
  // vanishes.
  double MixtureFixedPoint() const;
  void Validate() const;
  bool operator==(const BeliefConfig&) const = default;
};

struct Observation {
  double y = 0.0;
  int reliability = 1;
};

Observation GenObservation(int64_t step, const BeliefConfig& config,
                           SeededRng& rng);

// theta - eta * w * (theta - y).
double BeliefUpdate(double theta, double y, double eta, double w);

// Descriptors of the last entry of `ys` against belief `theta`:
//   (|y_last - theta|, population variance of the residuals,
//    |mean sign(y - theta)|), with sign(0) = 0.
// Throws InsufficientDataError with fewer than 2 entries.
Point3 BeliefDescriptors(std::span<const double> ys, double theta);

struct BeliefRun {
  std::vector<double> theta;      // After each step's update.
  std::vector<double> abs_error;  // |theta - mu*|.
  std::vector<std::optional<double>> trust;  // Weight applied; empty w/o SD.
  std::vector<int> rho;
  // Over the final min(1000, steps) steps.
  double final_error = 0.0;
  double final_mean = 0.0;
  double final_std = 0.0;
  // Trust of each observation vs rho after the first 1000 steps; empty
  // without SD or when one class is missing.
  std::optional<double> trust_rho_auroc;
};

BeliefRun RunBelief(const BeliefConfig& config, bool with_sd, uint64_t seed);

}  // namespace mtr

#endif  // MTR_BELIEF_H_
