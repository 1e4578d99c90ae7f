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

#include "mtr/corruption.h"

#include "mtr/errors.h"

namespace mtr {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

void CheckProbability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ConfigError("corruption: probability out of range");
  }
}

void CheckRange(double lo, double hi) {
  if (!(lo < hi)) throw ConfigError("corruption: require lo < hi");
}

}  // namespace

std::string CorruptionName(const CorruptionMode& mode) {
  return std::visit(
      Overloaded{
          [](const NoCorruption&) { return std::string("none"); },
          [](const UniformReplace&) { return std::string("uniform_replace"); },
          [](const GaussianNoise&) { return std::string("gaussian_noise"); },
          [](const EarlyInvert&) { return std::string("early_invert"); },
          [](const StateDependent&) { return std::string("state_dependent"); },
      },
      mode);
}

void ValidateCorruption(const CorruptionMode& mode) {
  std::visit(Overloaded{
                 [](const NoCorruption&) {},
                 [](const UniformReplace& m) {
                   CheckProbability(m.p);
                   CheckRange(m.lo, m.hi);
                 },
                 [](const GaussianNoise& m) {
                   if (!(m.sigma >= 0.0)) {
                     throw ConfigError("corruption: sigma must be >= 0");
                   }
                 },
                 [](const EarlyInvert& m) {
                   if (!(m.frac > 0.0 && m.frac < 1.0)) {
                     throw ConfigError("corruption: frac must be in (0, 1)");
                   }
                 },
                 [](const StateDependent& m) {
                   CheckProbability(m.p);
                   CheckRange(m.lo, m.hi);
                   if (m.threshold_state < 0) {
                     throw ConfigError(
                         "corruption: threshold_state must be >= 0");
                   }
                 },
             },
             mode);
}

CorruptedReward ApplyCorruption(double reward_true, int state, int64_t step,
                                const PhaseSchedule& schedule,
                                const CorruptionMode& mode, SeededRng& rng) {
  const CorruptedReward identity{reward_true, 1};
  return std::visit(
      Overloaded{
          [&](const NoCorruption&) { return identity; },
          [&](const UniformReplace& m) {
            if (PhaseOf(step, schedule) != Phase::kCorrupt) return identity;
            if (!rng.Bernoulli(m.p)) return identity;
            return CorruptedReward{rng.Uniform(m.lo, m.hi), 0};
          },
          [&](const GaussianNoise& m) {
            if (m.sigma == 0.0) return identity;
            return CorruptedReward{reward_true + rng.Normal(0.0, m.sigma), 1};
          },
          [&](const EarlyInvert& m) {
            const double frac = static_cast<double>(step) /
                                static_cast<double>(schedule.total_steps);
            if (!(frac < m.frac)) return identity;
            return CorruptedReward{-reward_true, 0};
          },
          [&](const StateDependent& m) {
            if (PhaseOf(step, schedule) != Phase::kCorrupt) return identity;
            if (state < m.threshold_state) return identity;
            if (!rng.Bernoulli(m.p)) return identity;
            return CorruptedReward{rng.Uniform(m.lo, m.hi), 0};
          },
      },
      mode);
}

double CorruptionRateEstimate(const CorruptionMode& mode,
                              const PhaseSchedule& schedule, int64_t n_samples,
                              SeededRng& rng, int num_states) {
  if (n_samples < 1000) {
    throw RangeError("CorruptionRateEstimate: n_samples must be >= 1000");
  }
  if (num_states < 1) throw RangeError("CorruptionRateEstimate: num_states");
  const int64_t begin = schedule.CorruptStart();
  const int64_t end = schedule.RecoverStart();
  if (end <= begin) return 0.0;
  int64_t unreliable = 0;
  for (int64_t i = 0; i < n_samples; ++i) {
    const int64_t step =
        begin + static_cast<int64_t>(rng.UniformInt(end - begin));
    const int state = static_cast<int>(rng.UniformInt(num_states));
    if (ApplyCorruption(0.0, state, step, schedule, mode, rng).reliability ==
        0) {
      ++unreliable;
    }
  }
  return static_cast<double>(unreliable) / static_cast<double>(n_samples);
}

}  // namespace mtr
