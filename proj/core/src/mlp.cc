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

#include "mtr/mlp.h"

#include <cmath>

#include "mtr/errors.h"

namespace mtr {
namespace {

void CheckSizes(const std::vector<int>& sizes) {
  if (sizes.size() < 2) throw ShapeError("MlpParams: need at least 2 sizes");
  for (int s : sizes) {
    if (s < 1) throw ShapeError("MlpParams: layer sizes must be positive");
  }
}

}  // namespace

size_t MlpParams::num_parameters() const {
  size_t n = 0;
  for (const auto& layer : layers) n += layer.weight.size() + layer.bias.size();
  return n;
}

MlpParams MlpParams::Zeros(std::vector<int> sizes, Activation activation) {
  CheckSizes(sizes);
  MlpParams p;
  p.sizes = std::move(sizes);
  p.activation = activation;
  for (size_t l = 0; l + 1 < p.sizes.size(); ++l) {
    p.layers.push_back({Matrix::Zero(p.sizes[l], p.sizes[l + 1]),
                        RowVector::Zero(p.sizes[l + 1])});
  }
  return p;
}

MlpParams MlpParams::GlorotUniform(std::vector<int> sizes,
                                   Activation activation, SeededRng& rng) {
  MlpParams p = Zeros(std::move(sizes), activation);
  for (auto& layer : p.layers) {
    const double limit =
        std::sqrt(6.0 / static_cast<double>(layer.weight.rows() +
                                            layer.weight.cols()));
    for (Eigen::Index i = 0; i < layer.weight.size(); ++i) {
      layer.weight.data()[i] = rng.Uniform(-limit, limit);
    }
  }
  return p;
}

void MlpParams::ForEachTensor(
    const std::function<void(Eigen::Ref<Matrix>)>& fn) {
  for (auto& layer : layers) {
    fn(layer.weight);
    Eigen::Map<Matrix> bias(layer.bias.data(), 1, layer.bias.size());
    fn(bias);
  }
}

Matrix MlpForward(const MlpParams& params, const Matrix& input,
                  MlpCache* cache) {
  if (input.cols() != params.input_dim()) {
    throw ShapeError("MlpForward: input has " + std::to_string(input.cols()) +
                     " columns, network expects " +
                     std::to_string(params.input_dim()));
  }
  if (cache != nullptr) {
    cache->inputs.clear();
    cache->preactivations.clear();
  }
  Matrix x = input;
  const size_t n_layers = params.layers.size();
  for (size_t l = 0; l < n_layers; ++l) {
    const DenseLayer& layer = params.layers[l];
    Matrix z = x * layer.weight;
    z.rowwise() += layer.bias;
    if (cache != nullptr) cache->inputs.push_back(std::move(x));
    if (l + 1 == n_layers) return z;
    if (cache != nullptr) cache->preactivations.push_back(z);
    if (params.activation == Activation::kTanh) {
      x = z.array().tanh().matrix();
    } else {
      x = z.cwiseMax(0.0);
    }
  }
  return x;
}

MlpGrads MlpBackward(const MlpParams& params, const MlpCache& cache,
                     const Matrix& grad_output) {
  const size_t n_layers = params.layers.size();
  if (cache.inputs.size() != n_layers ||
      cache.preactivations.size() + 1 != n_layers) {
    throw ShapeError("MlpBackward: cache does not match network");
  }
  const Eigen::Index batch = cache.inputs.front().rows();
  CheckShape(grad_output, batch, params.output_dim(), "MlpBackward");

  MlpGrads grads = MlpParams::Zeros(params.sizes, params.activation);
  Matrix g = grad_output;
  for (size_t l = n_layers; l-- > 0;) {
    grads.layers[l].weight.noalias() = cache.inputs[l].transpose() * g;
    grads.layers[l].bias = g.colwise().sum();
    if (l == 0) break;
    Matrix upstream = g * params.layers[l].weight.transpose();
    const Matrix& z = cache.preactivations[l - 1];
    if (params.activation == Activation::kTanh) {
      const Matrix& a = cache.inputs[l];  // tanh(z)
      g = upstream.array() * (1.0 - a.array().square());
    } else {
      g = upstream.array() * (z.array() > 0.0).cast<double>();
    }
  }
  return grads;
}

}  // namespace mtr
