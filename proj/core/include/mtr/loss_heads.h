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

#ifndef MTR_LOSS_HEADS_H_
#define MTR_LOSS_HEADS_H_

#include <span>
#include <vector>

#include "mtr/matrix.h"

namespace mtr {

struct LossAndGrad {
  double loss = 0.0;
  Matrix grad;  // d loss / d (network output), same shape as the output.
};

// Per-sample PPO clipped-surrogate loss terms
//   l_i = -min(r_i A_i, clip(r_i, 1 - eps, 1 + eps) A_i),
//   r_i = exp(log pi(a_i | s_i) - old_log_prob_i),
// and their gradients w.r.t. the logits row of sample i.
struct SurrogateTerms {
  std::vector<double> loss;
  Matrix grad;
};

SurrogateTerms ClippedSurrogateTerms(const Matrix& logits,
                                     std::span<const int> actions,
                                     std::span<const double> old_log_probs,
                                     std::span<const double> advantages,
                                     double clip_eps);

// sum_i w_i * values_i / n. The divisor is the batch size, not sum(w).
// Empty `weights` means w == 1. Throws on an empty batch or size mismatch.
double TrustWeightedMean(std::span<const double> values,
                         std::span<const double> weights);

// Trust-weighted policy loss and its logits gradient.
LossAndGrad TrustWeightedPolicyLoss(const Matrix& logits,
                                    std::span<const int> actions,
                                    std::span<const double> old_log_probs,
                                    std::span<const double> advantages,
                                    std::span<const double> weights,
                                    double clip_eps);

// Mean policy entropy over the batch and its logits gradient.
LossAndGrad MeanEntropy(const Matrix& logits);

// mean_i (v_i - target_i)^2 for a B x 1 prediction.
LossAndGrad ValueMse(const Matrix& predictions,
                     std::span<const double> targets);

// Mean softmax cross-entropy. With non-empty `weights` this is the
// trust-weighted variant mean_i w_i CE_i.
LossAndGrad CrossEntropy(const Matrix& logits, std::span<const int> labels,
                         std::span<const double> weights = {});

// Per-sample cross-entropy values.
std::vector<double> CrossEntropyTerms(const Matrix& logits,
                                      std::span<const int> labels);

}  // namespace mtr

#endif  // MTR_LOSS_HEADS_H_
