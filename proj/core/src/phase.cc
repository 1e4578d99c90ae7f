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

#include "mtr/phase.h"

#include <string>

#include "mtr/errors.h"

namespace mtr {

std::string_view PhaseName(Phase phase) {
  switch (phase) {
    case Phase::kClean:
      return "clean";
    case Phase::kCorrupt:
      return "corrupt";
    case Phase::kRecover:
      return "recover";
  }
  return "unknown";
}

void PhaseSchedule::Validate() const {
  if (total_steps <= 0) {
    throw ConfigError("schedule: total_steps must be positive");
  }
  if (!(clean_end > 0.0 && clean_end < corrupt_end && corrupt_end <= 1.0)) {
    throw ConfigError(
        "schedule: require 0 < clean_end < corrupt_end <= 1");
  }
}

Phase PhaseOf(int64_t step, const PhaseSchedule& schedule) {
  if (step < 0 || step >= schedule.total_steps) {
    throw RangeError("PhaseOf: step " + std::to_string(step) +
                     " outside [0, " + std::to_string(schedule.total_steps) +
                     ")");
  }
  const double frac =
      static_cast<double>(step) / static_cast<double>(schedule.total_steps);
  if (frac < schedule.clean_end) return Phase::kClean;
  if (frac < schedule.corrupt_end) return Phase::kCorrupt;
  return Phase::kRecover;
}

namespace {

// Smallest step whose fraction is >= boundary, consistent with PhaseOf.
int64_t FirstStepAtOrAbove(const PhaseSchedule& s, double boundary) {
  const double total = static_cast<double>(s.total_steps);
  int64_t step = static_cast<int64_t>(boundary * total);
  while (step > 0 && static_cast<double>(step - 1) / total >= boundary) --step;
  while (step < s.total_steps && static_cast<double>(step) / total < boundary) {
    ++step;
  }
  return step;
}

}  // namespace

int64_t PhaseSchedule::CorruptStart() const {
  return FirstStepAtOrAbove(*this, clean_end);
}

int64_t PhaseSchedule::RecoverStart() const {
  return FirstStepAtOrAbove(*this, corrupt_end);
}

}  // namespace mtr
