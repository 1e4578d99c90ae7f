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

#ifndef MTR_EXPERIENCE_H_
#define MTR_EXPERIENCE_H_

#include <cstdint>

namespace mtr {

// What the learner, Monitor, Trust Estimator and Regulator are allowed to
// see of an interaction.
struct Transition {
  int state = 0;
  int action = 0;
  double reward_observed = 0.0;
  int next_state = 0;
  bool done = false;
  int64_t step = 0;

  bool operator==(const Transition&) const = default;
};

// Full interaction record. `reward_true` and `reliability` exist for
// evaluation only; learner-side code takes a Transition.
struct Experience {
  Transition transition;
  double reward_true = 0.0;
  // 1: observed reward is faithful (bit-equal to reward_true); 0: replaced or
  // inverted.
  int reliability = 1;

  const Transition& LearnerView() const { return transition; }
};

}  // namespace mtr

#endif  // MTR_EXPERIENCE_H_
