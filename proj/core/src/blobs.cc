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

#include "mtr/blobs.h"

#include <cmath>
#include <string>

#include "mtr/errors.h"

namespace mtr {

void LabelBiasRule::Validate(int classes) const {
  for (const auto& [from, to] : flips) {
    if (from == to) {
      throw ConfigError("bias flip " + std::to_string(from) + "->" +
                        std::to_string(to) + " maps a class to itself");
    }
    if (from < 0 || from >= classes || to < 0 || to >= classes) {
      throw ConfigError("bias flip " + std::to_string(from) + "->" +
                        std::to_string(to) + " names a class outside [0, " +
                        std::to_string(classes) + ")");
    }
  }
  if (active_until_step < 0) {
    throw ConfigError("bias.active_until_step must be >= 0");
  }
}

int InjectBias(int label, int64_t step, const LabelBiasRule& rule,
               SeededRng& /*rng*/) {
  if (step >= rule.active_until_step) return label;
  for (const auto& [from, to] : rule.flips) {
    if (label == from) return to;
  }
  return label;
}

void BlobOptions::Validate() const {
  if (classes < 2) throw ConfigError("blobs.classes must be >= 2");
  if (train_per_class < 1 || test_per_class < 1) {
    throw ConfigError("blobs: per-class counts must be >= 1");
  }
  if (dim < 1) throw ConfigError("blobs.dim must be >= 1");
  if (!(separation > 0.0)) throw ConfigError("blobs.separation must be > 0");
  if (!(noise_sigma >= 0.0)) throw ConfigError("blobs.noise_sigma must be >= 0");
}

Dataset GenBlobs(const BlobOptions& options, SeededRng& rng) {
  options.Validate();
  const int k = options.classes;
  const int d = options.dim;

  // Gram-Schmidt on Gaussian vectors; past `dim` classes the directions are
  // only normalized.
  Matrix dirs(k, d);
  for (int c = 0; c < k; ++c) {
    RowVector v(d);
    for (int j = 0; j < d; ++j) v(j) = rng.Normal();
    if (c < d) {
      for (int prev = 0; prev < c; ++prev) {
        v -= v.dot(dirs.row(prev)) * dirs.row(prev);
      }
    }
    dirs.row(c) = v / v.norm();
  }

  Dataset data;
  data.classes = k;
  auto fill = [&](int per_class, Matrix& x, std::vector<int>& y) {
    x.resize(static_cast<Eigen::Index>(k) * per_class, d);
    y.resize(static_cast<size_t>(k) * per_class);
    Eigen::Index row = 0;
    for (int c = 0; c < k; ++c) {
      for (int i = 0; i < per_class; ++i, ++row) {
        for (int j = 0; j < d; ++j) {
          x(row, j) = options.separation * dirs(c, j) +
                      rng.Normal(0.0, 1.0) * options.noise_sigma;
        }
        y[static_cast<size_t>(row)] = c;
      }
    }
  };
  fill(options.train_per_class, data.train_x, data.train_y);
  fill(options.test_per_class, data.test_x, data.test_y);
  return data;
}

}  // namespace mtr
