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

#ifndef MTR_CORRUPTION_H_
#define MTR_CORRUPTION_H_

#include <cstdint>
#include <string>
#include <variant>

#include "mtr/phase.h"
#include "mtr/rng.h"

namespace mtr {

struct NoCorruption {
  bool operator==(const NoCorruption&) const = default;
};

// Replace the reward with Uniform[lo, hi] with probability p during the
// Corrupt phase.
struct UniformReplace {
  double p = 0.3;
  double lo = -1.0;
  double hi = 1.0;
  bool operator==(const UniformReplace&) const = default;
};

// Zero-mean Gaussian noise at every step. Unbiased, so never flagged
// unreliable.
struct GaussianNoise {
  double sigma = 0.5;
  bool operator==(const GaussianNoise&) const = default;
};

// r' = -r while step / total < frac.
struct EarlyInvert {
  double frac = 0.3;
  bool operator==(const EarlyInvert&) const = default;
};

// UniformReplace restricted to states >= threshold_state, Corrupt phase only.
struct StateDependent {
  int threshold_state = 4;
  double p = 0.3;
  double lo = -1.0;
  double hi = 1.0;
  bool operator==(const StateDependent&) const = default;
};

using CorruptionMode = std::variant<NoCorruption, UniformReplace, GaussianNoise,
                                    EarlyInvert, StateDependent>;

std::string CorruptionName(const CorruptionMode& mode);

// Throws ConfigError on p outside [0,1], lo >= hi, sigma < 0, frac outside
// (0,1) or a negative threshold.
void ValidateCorruption(const CorruptionMode& mode);

struct CorruptedReward {
  double reward_observed = 0.0;
  int reliability = 1;
};

CorruptedReward ApplyCorruption(double reward_true, int state, int64_t step,
                                const PhaseSchedule& schedule,
                                const CorruptionMode& mode, SeededRng& rng);

// Monte-Carlo fraction of reliability == 0 draws for steps drawn uniformly
// from the Corrupt phase and states drawn uniformly from [0, num_states).
// Requires n_samples >= 1000.
double CorruptionRateEstimate(const CorruptionMode& mode,
                              const PhaseSchedule& schedule, int64_t n_samples,
                              SeededRng& rng, int num_states = 1);

}  // namespace mtr

#endif  // MTR_CORRUPTION_H_
