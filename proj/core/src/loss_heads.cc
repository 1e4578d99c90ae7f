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

#include "mtr/loss_heads.h"

#include <algorithm>
#include <cmath>

#include "mtr/errors.h"
#include "mtr/prob.h"

namespace mtr {
namespace {

double LogSumExp(const Eigen::Ref<const RowVector>& row) {
  const double max = row.maxCoeff();
  return max + std::log((row.array() - max).exp().sum());
}

void CheckBatch(size_t batch, size_t n, const char* what) {
  if (batch == 0) throw ShapeError(std::string(what) + ": empty batch");
  if (n != batch) throw ShapeError(std::string(what) + ": length mismatch");
}

double WeightOf(std::span<const double> weights, size_t i) {
  return weights.empty() ? 1.0 : weights[i];
}

}  // namespace

SurrogateTerms ClippedSurrogateTerms(const Matrix& logits,
                                     std::span<const int> actions,
                                     std::span<const double> old_log_probs,
                                     std::span<const double> advantages,
                                     double clip_eps) {
  const size_t batch = static_cast<size_t>(logits.rows());
  CheckBatch(batch, actions.size(), "ClippedSurrogateTerms");
  CheckBatch(batch, old_log_probs.size(), "ClippedSurrogateTerms");
  CheckBatch(batch, advantages.size(), "ClippedSurrogateTerms");

  SurrogateTerms out;
  out.loss.resize(batch);
  out.grad = Matrix::Zero(logits.rows(), logits.cols());
  for (size_t i = 0; i < batch; ++i) {
    const auto row = logits.row(static_cast<Eigen::Index>(i));
    const int a = actions[i];
    if (a < 0 || a >= logits.cols()) {
      throw RangeError("ClippedSurrogateTerms: action out of range");
    }
    const double log_prob = row(a) - LogSumExp(row);
    const double ratio = std::exp(log_prob - old_log_probs[i]);
    const double adv = advantages[i];
    const double clipped = std::clamp(ratio, 1.0 - clip_eps, 1.0 + clip_eps);
    const double unclipped_obj = ratio * adv;
    const double clipped_obj = clipped * adv;
    out.loss[i] = -std::min(unclipped_obj, clipped_obj);
    // Gradient flows only through the unclipped branch when it is the min.
    if (unclipped_obj <= clipped_obj) {
      RowVector p = (row.array() - row.maxCoeff()).exp();
      p /= p.sum();
      RowVector dlogp = -p;
      dlogp(a) += 1.0;
      out.grad.row(static_cast<Eigen::Index>(i)) = -adv * ratio * dlogp;
    }
  }
  return out;
}

double TrustWeightedMean(std::span<const double> values,
                         std::span<const double> weights) {
  if (values.empty()) throw ShapeError("TrustWeightedMean: empty batch");
  if (!weights.empty() && weights.size() != values.size()) {
    throw ShapeError("TrustWeightedMean: length mismatch");
  }
  double sum = 0.0;
  for (size_t i = 0; i < values.size(); ++i) {
    sum += WeightOf(weights, i) * values[i];
  }
  return sum / static_cast<double>(values.size());
}

LossAndGrad TrustWeightedPolicyLoss(const Matrix& logits,
                                    std::span<const int> actions,
                                    std::span<const double> old_log_probs,
                                    std::span<const double> advantages,
                                    std::span<const double> weights,
                                    double clip_eps) {
  SurrogateTerms terms = ClippedSurrogateTerms(logits, actions, old_log_probs,
                                               advantages, clip_eps);
  LossAndGrad out;
  out.loss = TrustWeightedMean(terms.loss, weights);
  const double inv_batch = 1.0 / static_cast<double>(terms.loss.size());
  out.grad = std::move(terms.grad);
  for (Eigen::Index i = 0; i < out.grad.rows(); ++i) {
    out.grad.row(i) *= WeightOf(weights, static_cast<size_t>(i)) * inv_batch;
  }
  return out;
}

LossAndGrad MeanEntropy(const Matrix& logits) {
  if (logits.rows() == 0) throw ShapeError("MeanEntropy: empty batch");
  const Matrix probs = SoftmaxRows(logits);
  const double inv_batch = 1.0 / static_cast<double>(logits.rows());
  LossAndGrad out;
  out.grad = Matrix::Zero(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    double h = 0.0;
    RowVector log_p(logits.cols());
    const double lse = LogSumExp(logits.row(i));
    for (Eigen::Index j = 0; j < logits.cols(); ++j) {
      log_p(j) = logits(i, j) - lse;
      h -= probs(i, j) * log_p(j);
    }
    out.loss += h * inv_batch;
    out.grad.row(i) =
        -(probs.row(i).array() * (log_p.array() + h)) * inv_batch;
  }
  return out;
}

LossAndGrad ValueMse(const Matrix& predictions,
                     std::span<const double> targets) {
  const size_t batch = static_cast<size_t>(predictions.rows());
  CheckBatch(batch, targets.size(), "ValueMse");
  if (predictions.cols() != 1) throw ShapeError("ValueMse: expected B x 1");
  const double inv_batch = 1.0 / static_cast<double>(batch);
  LossAndGrad out;
  out.grad = Matrix::Zero(predictions.rows(), 1);
  for (size_t i = 0; i < batch; ++i) {
    const double diff = predictions(static_cast<Eigen::Index>(i), 0) -
                        targets[i];
    out.loss += diff * diff * inv_batch;
    out.grad(static_cast<Eigen::Index>(i), 0) = 2.0 * diff * inv_batch;
  }
  return out;
}

std::vector<double> CrossEntropyTerms(const Matrix& logits,
                                      std::span<const int> labels) {
  const size_t batch = static_cast<size_t>(logits.rows());
  CheckBatch(batch, labels.size(), "CrossEntropyTerms");
  std::vector<double> out(batch);
  for (size_t i = 0; i < batch; ++i) {
    const auto row = logits.row(static_cast<Eigen::Index>(i));
    if (labels[i] < 0 || labels[i] >= logits.cols()) {
      throw RangeError("CrossEntropy: label out of range");
    }
    out[i] = LogSumExp(row) - row(labels[i]);
  }
  return out;
}

LossAndGrad CrossEntropy(const Matrix& logits, std::span<const int> labels,
                         std::span<const double> weights) {
  const std::vector<double> terms = CrossEntropyTerms(logits, labels);
  LossAndGrad out;
  out.loss = TrustWeightedMean(terms, weights);
  out.grad = SoftmaxRows(logits);
  const double inv_batch = 1.0 / static_cast<double>(terms.size());
  for (Eigen::Index i = 0; i < out.grad.rows(); ++i) {
    out.grad(i, labels[static_cast<size_t>(i)]) -= 1.0;
    out.grad.row(i) *= WeightOf(weights, static_cast<size_t>(i)) * inv_batch;
  }
  return out;
}

}  // namespace mtr
