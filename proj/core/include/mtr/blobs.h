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

#ifndef MTR_BLOBS_H_
#define MTR_BLOBS_H_

#include <cstdint>
#include <utility>
#include <vector>

#include "mtr/matrix.h"
#include "mtr/rng.h"

namespace mtr {

// Deterministic label flips applied while step < active_until_step.
struct LabelBiasRule {
  std::vector<std::pair<int, int>> flips{{3, 8}, {5, 6}};
  int64_t active_until_step = 6000;

  // Throws ConfigError on from == to or a class outside [0, classes).
  void Validate(int classes) const;
  bool operator==(const LabelBiasRule&) const = default;
};

// `rng` is unused by the deterministic rule.
int InjectBias(int label, int64_t step, const LabelBiasRule& rule,
               SeededRng& rng);

// Train/test split of a labelled dense dataset, features row-major.
struct Dataset {
  Matrix train_x;
  std::vector<int> train_y;
  Matrix test_x;
  std::vector<int> test_y;
  int classes = 0;
};

struct BlobOptions {
  int classes = 10;
  int train_per_class = 500;
  int test_per_class = 200;
  int dim = 20;
  double separation = 4.0;
  double noise_sigma = 1.0;

  void Validate() const;
  bool operator==(const BlobOptions&) const = default;
};

// Class k is drawn from N(separation * u_k, noise_sigma^2 I), where the u_k
// are random orthonormal directions (random unit vectors when classes >
// dim). Rows are grouped by class.
Dataset GenBlobs(const BlobOptions& options, SeededRng& rng);

}  // namespace mtr

#endif  // MTR_BLOBS_H_
