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

#include "mtr/sl_trainer.h"

#include <cmath>
#include <numeric>

#include "mtr/errors.h"
#include "mtr/idx.h"
#include "mtr/loss_heads.h"
#include "mtr/monitor.h"
#include "mtr/optim.h"
#include "mtr/prob.h"
#include "mtr/trust.h"

namespace mtr {

void SlConfig::Validate() const {
  if (dataset == "blobs") {
    blobs.Validate();
    bias.Validate(blobs.classes);
  } else if (dataset == "idx") {
    if (idx_train_images.empty() || idx_train_labels.empty() ||
        idx_test_images.empty() || idx_test_labels.empty()) {
      throw ConfigError("sl.idx_*: all four IDX paths are required");
    }
  } else {
    throw ConfigError("unknown dataset '" + dataset +
                      "' (expected blobs or idx)");
  }
  if (total_steps < 1) throw ConfigError("sl.total_steps must be >= 1");
  if (batch_size < 1) throw ConfigError("sl.batch_size must be >= 1");
  if (!(lr > 0.0)) throw ConfigError("sl.lr must be > 0");
  if (eval_interval < 1) throw ConfigError("sl.eval_interval must be >= 1");
  if (refit_interval < 1) throw ConfigError("sl.refit_interval must be >= 1");
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw ConfigError("sl.alpha must be in (0, 1]");
  }
}

double SlTrustWeightedLoss(std::span<const double> losses,
                           std::span<const double> weights) {
  if (weights.size() != losses.size()) {
    throw ShapeError("SlTrustWeightedLoss: length mismatch");
  }
  for (double w : weights) {
    if (!(w >= 0.0 && w <= 1.0)) {
      throw DomainError("SlTrustWeightedLoss: weight outside [0, 1]");
    }
  }
  return TrustWeightedMean(losses, weights);
}

Dataset LoadSlDataset(const SlConfig& config, uint64_t seed) {
  if (config.dataset == "idx") {
    const IdxDataset train =
        LoadIdx(config.idx_train_images, config.idx_train_labels);
    const IdxDataset test =
        LoadIdx(config.idx_test_images, config.idx_test_labels);
    Dataset data;
    data.train_x = train.Features();
    data.train_y = train.Labels();
    data.test_x = test.Features();
    data.test_y = test.Labels();
    int max_label = 0;
    for (int y : data.train_y) max_label = std::max(max_label, y);
    for (int y : data.test_y) max_label = std::max(max_label, y);
    data.classes = max_label + 1;
    config.bias.Validate(data.classes);
    return data;
  }
  SeededRng rng = DeriveRng(SeededRng(seed), "data");
  return GenBlobs(config.blobs, rng);
}

double Accuracy(const MlpParams& params, const Matrix& x,
                std::span<const int> y) {
  const Matrix logits = MlpForward(params, x);
  int64_t correct = 0;
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const RowVector row = logits.row(i);
    if (Argmax(std::span<const double>(row.data(), row.size())) ==
        y[static_cast<size_t>(i)]) {
      ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(logits.rows());
}

SlRunResult TrainSl(const SlConfig& config, const Dataset& data,
                    uint64_t seed) {
  config.Validate();
  const int classes = data.classes;
  config.bias.Validate(classes);
  const size_t n_train = data.train_y.size();
  if (n_train == 0) throw ShapeError("TrainSl: empty training set");

  const SeededRng root(seed);
  SeededRng init_rng = DeriveRng(root, "init");
  SeededRng batch_rng = DeriveRng(root, "minibatch");
  SeededRng bias_rng = DeriveRng(root, "bias");

  MlpParams params = MlpParams::GlorotUniform(
      SlLayerSizes(static_cast<int>(data.train_x.cols()), classes),
      Activation::kRelu, init_rng);
  AdamState adam = AdamState::For(params);

  const size_t batch = std::min<size_t>(config.batch_size, n_train);
  std::vector<int> order(n_train);
  std::iota(order.begin(), order.end(), 0);
  size_t cursor = n_train;  // Forces a shuffle before the first batch.

  TrustState trust;
  trust.alpha = config.alpha;
  trust.refit_interval = config.refit_interval;
  constexpr TrustKey kPhaseKey = 0;
  const double log_k = std::log(static_cast<double>(classes));
  double risk_sum = 0.0;
  int64_t risk_count = 0;

  SlRunResult result;
  result.rows.reserve(static_cast<size_t>(config.total_steps));
  Matrix x(static_cast<Eigen::Index>(batch), data.train_x.cols());
  std::vector<int> labels(batch);
  for (int64_t step = 0; step < config.total_steps; ++step) {
    if (cursor + batch > n_train) {
      batch_rng.Shuffle(std::span<int>(order));
      cursor = 0;
    }
    for (size_t i = 0; i < batch; ++i) {
      const int j = order[cursor + i];
      x.row(static_cast<Eigen::Index>(i)) = data.train_x.row(j);
      labels[i] = InjectBias(data.train_y[static_cast<size_t>(j)], step,
                             config.bias, bias_rng);
    }
    cursor += batch;

    // Regulator: one phase-level trust, refreshed every K steps from the
    // mean normalized entropy of the preceding K steps.
    if (config.regulator && step > 0 &&
        ShouldRefit(step, config.refit_interval) && risk_count > 0) {
      UpdateTrust(trust, {{kPhaseKey, 1.0 - risk_sum / risk_count}},
                  trust.alpha);
      risk_sum = 0.0;
      risk_count = 0;
    }

    MlpCache cache;
    const Matrix logits = MlpForward(params, x, &cache);
    std::vector<double> weights;
    if (config.regulator) {
      weights.assign(batch, trust.Get(kPhaseKey));
      result.trust.push_back(trust.Get(kPhaseKey));
    }
    const LossAndGrad loss = CrossEntropy(logits, labels, weights);
    AdamStep(params, MlpBackward(params, cache, loss.grad), adam, config.lr);

    SlStepRow row;
    row.step = step;
    row.biased = step < config.bias.active_until_step &&
                 !config.bias.flips.empty();
    row.train_loss = loss.loss;
    if (config.log_entropy || config.regulator) {
      const double h = BatchMeanEntropy(SoftmaxRows(logits));
      row.batch_mean_entropy = config.log_entropy ? h : 0.0;
      risk_sum += h / log_k;
      ++risk_count;
    }
    if ((step + 1) % config.eval_interval == 0 ||
        step + 1 == config.total_steps) {
      row.clean_test_accuracy = Accuracy(params, data.test_x, data.test_y);
    }
    result.rows.push_back(row);
  }
  result.final_accuracy = Accuracy(params, data.test_x, data.test_y);
  result.final_params = std::move(params);
  return result;
}

SlDiagnostics DiagnoseEntropy(const std::vector<SlStepRow>& rows,
                              int classes) {
  std::vector<double> entropy;
  std::vector<int> labels;
  entropy.reserve(rows.size());
  labels.reserve(rows.size());
  for (const auto& r : rows) {
    entropy.push_back(r.batch_mean_entropy);
    labels.push_back(r.biased ? 1 : 0);
  }
  SlDiagnostics out;
  const double raw = Auroc(entropy, labels);
  const bool negate = raw < 0.5;
  out.auroc = negate ? 1.0 - raw : raw;
  out.orientation = negate ? "negated_entropy" : "entropy";

  const double log_k = std::log(static_cast<double>(classes));
  std::vector<double> prob(entropy.size());
  for (size_t i = 0; i < entropy.size(); ++i) {
    const double risk = std::clamp(entropy[i] / log_k, 0.0, 1.0);
    prob[i] = negate ? 1.0 - risk : risk;
  }
  out.brier = Brier(prob, labels);
  const NllResult nll = Nll(prob, labels);
  out.nll = nll.value;
  out.nll_clamped = nll.clamped;
  out.reliability_bins = ReliabilityBins(prob, labels, 10);
  return out;
}

}  // namespace mtr
