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

#ifndef MTR_OPTIM_H_
#define MTR_OPTIM_H_

#include <cstdint>

#include "mtr/mlp.h"

namespace mtr {

struct AdamState {
  MlpParams first_moment;
  MlpParams second_moment;
  int64_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  // Zero moments shaped like `params`.
  static AdamState For(const MlpParams& params);
};

// One bias-corrected Adam update in place. Increments state.step.
void AdamStep(MlpParams& params, const MlpGrads& grads, AdamState& state,
              double lr);

// params -= lr * grads.
void SgdStep(MlpParams& params, const MlpGrads& grads, double lr);

// lr0 * (1 - step / total), floored at 0.
double LinearDecay(double lr0, int64_t step, int64_t total);

}  // namespace mtr

#endif  // MTR_OPTIM_H_
