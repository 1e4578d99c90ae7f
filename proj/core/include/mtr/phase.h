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

#ifndef MTR_PHASE_H_
#define MTR_PHASE_H_

#include <cstdint>
#include <string_view>

namespace mtr {

enum class Phase { kClean, kCorrupt, kRecover };

std::string_view PhaseName(Phase phase);

// Clean / corrupt / recover partition of a run, as fractions of total steps.
struct PhaseSchedule {
  int64_t total_steps = 100000;
  double clean_end = 0.3;
  double corrupt_end = 0.7;

  // Throws ConfigError unless 0 < clean_end < corrupt_end <= 1 and
  // total_steps > 0.
  void Validate() const;

  // First step of the corrupt / recover phases.
  int64_t CorruptStart() const;
  int64_t RecoverStart() const;

  bool operator==(const PhaseSchedule&) const = default;
};

// Phase containing `step`. The upper bound of each phase is exclusive:
// step/total == clean_end is already Corrupt. Throws RangeError when step is
// outside [0, total_steps).
Phase PhaseOf(int64_t step, const PhaseSchedule& schedule);

}  // namespace mtr

#endif  // MTR_PHASE_H_
