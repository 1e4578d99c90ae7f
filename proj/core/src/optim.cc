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

#include "mtr/optim.h"

#include <algorithm>
#include <cmath>

#include "mtr/errors.h"

namespace mtr {
namespace {

void CheckSameLayout(const MlpParams& a, const MlpParams& b, const char* what) {
  if (a.layers.size() != b.layers.size()) throw ShapeError(what);
  for (size_t l = 0; l < a.layers.size(); ++l) {
    if (a.layers[l].weight.rows() != b.layers[l].weight.rows() ||
        a.layers[l].weight.cols() != b.layers[l].weight.cols() ||
        a.layers[l].bias.size() != b.layers[l].bias.size()) {
      throw ShapeError(what);
    }
  }
}

}  // namespace

AdamState AdamState::For(const MlpParams& params) {
  AdamState state;
  state.first_moment = MlpParams::Zeros(params.sizes, params.activation);
  state.second_moment = MlpParams::Zeros(params.sizes, params.activation);
  return state;
}

void AdamStep(MlpParams& params, const MlpGrads& grads, AdamState& state,
              double lr) {
  CheckSameLayout(params, grads, "AdamStep: gradient shape mismatch");
  CheckSameLayout(params, state.first_moment, "AdamStep: state shape mismatch");
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  const double b1 = state.beta1;
  const double b2 = state.beta2;
  const double eps = state.epsilon;

  auto update = [&](auto& p, const auto& g, auto& m, auto& v) {
    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
    p.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
  };
  for (size_t l = 0; l < params.layers.size(); ++l) {
    update(params.layers[l].weight, grads.layers[l].weight,
           state.first_moment.layers[l].weight,
           state.second_moment.layers[l].weight);
    update(params.layers[l].bias, grads.layers[l].bias,
           state.first_moment.layers[l].bias,
           state.second_moment.layers[l].bias);
  }
}

void SgdStep(MlpParams& params, const MlpGrads& grads, double lr) {
  CheckSameLayout(params, grads, "SgdStep: gradient shape mismatch");
  for (size_t l = 0; l < params.layers.size(); ++l) {
    params.layers[l].weight -= lr * grads.layers[l].weight;
    params.layers[l].bias -= lr * grads.layers[l].bias;
  }
}

double LinearDecay(double lr0, int64_t step, int64_t total) {
  if (total <= 0) return 0.0;
  const double frac =
      1.0 - static_cast<double>(step) / static_cast<double>(total);
  return std::max(lr0 * frac, 0.0);
}

}  // namespace mtr
