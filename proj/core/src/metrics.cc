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

#include "mtr/metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mtr/errors.h"

namespace mtr {
namespace {

void CheckPaired(size_t scores, size_t labels, const char* what) {
  if (scores != labels) {
    throw ShapeError(std::string(what) + ": scores and labels differ in length");
  }
  if (scores == 0) throw ShapeError(std::string(what) + ": empty input");
}

void CheckLabel(int y, const char* what) {
  if (y != 0 && y != 1) throw DomainError(std::string(what) + ": label not 0/1");
}

void CheckUnitInterval(double s, const char* what) {
  if (!(s >= 0.0 && s <= 1.0)) {
    throw DomainError(std::string(what) + ": score outside [0, 1]");
  }
}

}  // namespace

double Auroc(std::span<const double> scores, std::span<const int> labels) {
  CheckPaired(scores.size(), labels.size(), "Auroc");
  const size_t n = scores.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return scores[a] < scores[b]; });

  // Twice the rank sum of positives, so tied groups stay in integers.
  int64_t pos = 0;
  int64_t twice_rank_sum = 0;
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    // Ranks i+1 .. j share the average (i + 1 + j) / 2.
    const int64_t twice_avg = static_cast<int64_t>(i + 1 + j);
    for (size_t k = i; k < j; ++k) {
      CheckLabel(labels[order[k]], "Auroc");
      if (labels[order[k]] == 1) {
        ++pos;
        twice_rank_sum += twice_avg;
      }
    }
    i = j;
  }
  const int64_t neg = static_cast<int64_t>(n) - pos;
  if (pos == 0 || neg == 0) {
    throw UndefinedMetricError("Auroc: both classes must be present");
  }
  // U = R_pos - pos (pos + 1) / 2; AUROC = U / (pos * neg).
  const int64_t twice_u = twice_rank_sum - pos * (pos + 1);
  return static_cast<double>(twice_u) /
         (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
}

double AurocBruteForce(std::span<const double> scores,
                       std::span<const int> labels) {
  CheckPaired(scores.size(), labels.size(), "AurocBruteForce");
  int64_t twice_wins = 0;
  int64_t pairs = 0;
  for (size_t i = 0; i < scores.size(); ++i) {
    CheckLabel(labels[i], "AurocBruteForce");
    if (labels[i] != 1) continue;
    for (size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0) continue;
      ++pairs;
      if (scores[i] > scores[j]) {
        twice_wins += 2;
      } else if (scores[i] == scores[j]) {
        twice_wins += 1;
      }
    }
  }
  if (pairs == 0) {
    throw UndefinedMetricError("AurocBruteForce: both classes must be present");
  }
  return static_cast<double>(twice_wins) / (2.0 * static_cast<double>(pairs));
}

double Brier(std::span<const double> scores, std::span<const int> labels) {
  CheckPaired(scores.size(), labels.size(), "Brier");
  double sum = 0.0;
  for (size_t i = 0; i < scores.size(); ++i) {
    CheckUnitInterval(scores[i], "Brier");
    CheckLabel(labels[i], "Brier");
    const double d = scores[i] - labels[i];
    sum += d * d;
  }
  return sum / static_cast<double>(scores.size());
}

NllResult Nll(std::span<const double> scores, std::span<const int> labels) {
  CheckPaired(scores.size(), labels.size(), "Nll");
  constexpr double kLo = 1e-12;
  constexpr double kHi = 1.0 - 1e-12;
  NllResult out;
  double sum = 0.0;
  for (size_t i = 0; i < scores.size(); ++i) {
    CheckLabel(labels[i], "Nll");
    if (std::isnan(scores[i])) throw DomainError("Nll: NaN score");
    double s = scores[i];
    if (s < kLo || s > kHi) {
      s = std::clamp(s, kLo, kHi);
      ++out.clamped;
    }
    sum -= labels[i] == 1 ? std::log(s) : std::log1p(-s);
  }
  out.value = sum / static_cast<double>(scores.size());
  return out;
}

std::vector<ReliabilityBin> ReliabilityBins(std::span<const double> scores,
                                            std::span<const int> labels,
                                            int n_bins) {
  if (n_bins < 1) throw ConfigError("ReliabilityBins: n_bins must be >= 1");
  if (scores.size() != labels.size()) {
    throw ShapeError("ReliabilityBins: scores and labels differ in length");
  }
  std::vector<ReliabilityBin> bins(n_bins);
  std::vector<double> score_sum(n_bins, 0.0);
  std::vector<int64_t> positives(n_bins, 0);
  for (int b = 0; b < n_bins; ++b) {
    bins[b].edge_lo = static_cast<double>(b) / n_bins;
    bins[b].edge_hi = static_cast<double>(b + 1) / n_bins;
  }
  for (size_t i = 0; i < scores.size(); ++i) {
    CheckUnitInterval(scores[i], "ReliabilityBins");
    CheckLabel(labels[i], "ReliabilityBins");
    int b = static_cast<int>(std::floor(scores[i] * n_bins));
    b = std::min(b, n_bins - 1);
    ++bins[b].count;
    score_sum[b] += scores[i];
    positives[b] += labels[i];
  }
  for (int b = 0; b < n_bins; ++b) {
    if (bins[b].count == 0) continue;
    const double c = static_cast<double>(bins[b].count);
    bins[b].mean_score = score_sum[b] / c;
    bins[b].positive_rate = static_cast<double>(positives[b]) / c;
  }
  return bins;
}

double Mean(std::span<const double> values) {
  if (values.empty()) throw InsufficientDataError("Mean: empty input");
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

double PopulationStd(std::span<const double> values) {
  const double m = Mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size()));
}

double Median(std::vector<double> values) {
  if (values.empty()) throw InsufficientDataError("Median: empty input");
  std::sort(values.begin(), values.end());
  const size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

ReturnSummary SummarizeReturns(std::span<const ReturnCurve> curves) {
  if (curves.empty()) throw ShapeError("SummarizeReturns: no seeds");
  const ReturnCurve& grid = curves.front();
  ReturnSummary out;
  bool first = true;
  for (const ReturnCurve& curve : curves) {
    if (curve.size() < kFinalCheckpoints) {
      throw InsufficientDataError(
          "SummarizeReturns: need at least 10 checkpoints, got " +
          std::to_string(curve.size()));
    }
    if (curve.size() != grid.size()) {
      throw ShapeError("SummarizeReturns: seeds differ in checkpoint count");
    }
    for (size_t i = 0; i < curve.size(); ++i) {
      if (curve[i].step != grid[i].step) {
        throw ShapeError("SummarizeReturns: seeds differ in checkpoint steps");
      }
    }
    double sum = 0.0;
    for (size_t i = curve.size() - kFinalCheckpoints; i < curve.size(); ++i) {
      sum += curve[i].value;
      if (first || curve[i].value < out.worst_checkpoint) {
        out.worst_checkpoint = curve[i].value;
        first = false;
      }
    }
    out.per_seed.push_back(sum / kFinalCheckpoints);
  }
  out.mean = Mean(out.per_seed);
  out.std = PopulationStd(out.per_seed);
  out.worst_seed_mean =
      *std::min_element(out.per_seed.begin(), out.per_seed.end());
  return out;
}

}  // namespace mtr
