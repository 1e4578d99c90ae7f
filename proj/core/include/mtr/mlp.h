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

#ifndef MTR_MLP_H_
#define MTR_MLP_H_

#include <functional>
#include <vector>

#include "mtr/matrix.h"
#include "mtr/rng.h"

namespace mtr {

enum class Activation { kTanh, kRelu };

struct DenseLayer {
  Matrix weight;  // fan_in x fan_out
  RowVector bias;  // 1 x fan_out
};

// Fully connected network: hidden layers use `activation`, the output layer
// is linear. sizes = {in, hidden..., out}.
struct MlpParams {
  std::vector<int> sizes;
  Activation activation = Activation::kTanh;
  std::vector<DenseLayer> layers;

  int input_dim() const { return sizes.front(); }
  int output_dim() const { return sizes.back(); }
  size_t num_parameters() const;

  // All weights and biases zero.
  static MlpParams Zeros(std::vector<int> sizes, Activation activation);
  // Weights uniform on +-sqrt(6 / (fan_in + fan_out)), biases zero.
  static MlpParams GlorotUniform(std::vector<int> sizes, Activation activation,
                                 SeededRng& rng);

  // Visits every parameter tensor (weight, bias per layer) in a fixed order.
  void ForEachTensor(const std::function<void(Eigen::Ref<Matrix>)>& fn);
};

// Gradients share the parameter layout.
using MlpGrads = MlpParams;

// Layer inputs and hidden pre-activations retained for the backward pass.
struct MlpCache {
  std::vector<Matrix> inputs;       // inputs[l] feeds layer l.
  std::vector<Matrix> preactivations;  // For hidden layers only.
};

// Throws ShapeError if input.cols() != input_dim().
Matrix MlpForward(const MlpParams& params, const Matrix& input,
                  MlpCache* cache = nullptr);

// Reverse-mode gradients of sum(grad_output .* output) w.r.t. the parameters.
MlpGrads MlpBackward(const MlpParams& params, const MlpCache& cache,
                     const Matrix& grad_output);

// Typical setups.
inline std::vector<int> RlLayerSizes(int in, int out) {
  return {in, 64, 64, out};
}
inline std::vector<int> SlLayerSizes(int in, int classes) {
  return {in, 256, classes};
}

}  // namespace mtr

#endif  // MTR_MLP_H_
