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

#ifndef MTR_SL_TRAINER_H_
#define MTR_SL_TRAINER_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mtr/blobs.h"
#include "mtr/metrics.h"
#include "mtr/mlp.h"

namespace mtr {

struct SlConfig {
  std::string dataset = "blobs";  // "blobs" or "idx".
  BlobOptions blobs;
  std::string idx_train_images;
  std::string idx_train_labels;
  std::string idx_test_images;
  std::string idx_test_labels;
  LabelBiasRule bias;
  int64_t total_steps = 20000;
  int batch_size = 128;
  double lr = 1e-3;
  int64_t eval_interval = 200;
  // Trust-weighted cross-entropy; off unless explicitly enabled.
  bool regulator = false;
  int64_t refit_interval = 1000;  // K, in optimizer steps.
  double alpha = 0.1;
  // Batch-entropy logging. Has no effect on training.
  bool log_entropy = true;

  void Validate() const;
  bool operator==(const SlConfig&) const = default;
};

struct SlStepRow {
  int64_t step = 0;
  bool biased = false;
  double train_loss = 0.0;
  double batch_mean_entropy = 0.0;
  std::optional<double> clean_test_accuracy;
};

struct SlDiagnostics {
  // max(AUROC, 1 - AUROC) of batch entropy as a score for the biased phase.
  double auroc = 0.5;
  // "entropy" when higher entropy marks the biased phase, else
  // "negated_entropy".
  std::string orientation = "entropy";
  // Calibration of the oriented normalized entropy as P(biased).
  double brier = 0.0;
  double nll = 0.0;
  int64_t nll_clamped = 0;
  std::vector<ReliabilityBin> reliability_bins;
};

struct SlRunResult {
  std::vector<SlStepRow> rows;
  std::vector<double> trust;  // Per step; empty when the regulator is off.
  double final_accuracy = 0.0;
  MlpParams final_params;
};

// mean_i w_i CE_i. Throws ShapeError on a length mismatch or empty batch and
// DomainError on a weight outside [0, 1].
double SlTrustWeightedLoss(std::span<const double> losses,
                           std::span<const double> weights);

// Loads or generates the configured dataset for `seed`.
Dataset LoadSlDataset(const SlConfig& config, uint64_t seed);

SlRunResult TrainSl(const SlConfig& config, const Dataset& data,
                    uint64_t seed);

// Entropy-as-phase-classifier metrics over the logged steps.
SlDiagnostics DiagnoseEntropy(const std::vector<SlStepRow>& rows, int classes);

double Accuracy(const MlpParams& params, const Matrix& x,
                std::span<const int> y);

}  // namespace mtr

#endif  // MTR_SL_TRAINER_H_
