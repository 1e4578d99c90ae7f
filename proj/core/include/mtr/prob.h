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

#ifndef MTR_PROB_H_
#define MTR_PROB_H_

#include <span>
#include <vector>

#include "mtr/matrix.h"

namespace mtr {

// Numerically stable softmax (max-subtracted).
std::vector<double> Softmax(std::span<const double> logits);

// Row-wise softmax of a batch of logits.
Matrix SoftmaxRows(const Matrix& logits);

// Shannon entropy in nats with 0 ln 0 := 0. Throws DomainError on a negative
// entry or when the entries do not sum to 1 within 1e-9.
double Entropy(std::span<const double> probs);

// Index of the largest entry; ties go to the lowest index.
int Argmax(std::span<const double> values);

}  // namespace mtr

#endif  // MTR_PROB_H_
