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

#ifndef MTR_METRICS_H_
#define MTR_METRICS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace mtr {

// Probability that a random positive outranks a random negative, ties
// credited 1/2 (Mann-Whitney). Computed from average ranks. Throws
// UndefinedMetricError unless both labels occur and ShapeError on a length
// mismatch.
double Auroc(std::span<const double> scores, std::span<const int> labels);

// O(n_pos * n_neg) pairwise count; the reference for Auroc.
double AurocBruteForce(std::span<const double> scores,
                       std::span<const int> labels);

// mean (score - label)^2. Throws DomainError on a score outside [0, 1].
double Brier(std::span<const double> scores, std::span<const int> labels);

struct NllResult {
  double value = 0.0;
  int64_t clamped = 0;  // Scores moved onto [1e-12, 1 - 1e-12].
};

// mean -[y ln s + (1 - y) ln(1 - s)] with scores clamped first.
NllResult Nll(std::span<const double> scores, std::span<const int> labels);

struct ReliabilityBin {
  double edge_lo = 0.0;
  double edge_hi = 0.0;
  int64_t count = 0;
  // Empty for bins with count == 0.
  std::optional<double> mean_score;
  std::optional<double> positive_rate;
};

// Equal-width bins on [0, 1]; bin i is [i/n, (i+1)/n) except the last, which
// is closed on the right. Throws ConfigError for n_bins < 1 and DomainError
// on scores outside [0, 1].
std::vector<ReliabilityBin> ReliabilityBins(std::span<const double> scores,
                                            std::span<const int> labels,
                                            int n_bins = 10);

struct Checkpoint {
  int64_t step = 0;
  double value = 0.0;
};

using ReturnCurve = std::vector<Checkpoint>;

struct ReturnSummary {
  std::vector<double> per_seed;  // Mean of each seed's final 10 checkpoints.
  double mean = 0.0;
  double std = 0.0;  // Population std over seeds.
  double worst_seed_mean = 0.0;
  // Lowest single value among all seeds' final 10 checkpoints.
  double worst_checkpoint = 0.0;
};

inline constexpr int kFinalCheckpoints = 10;

// Throws InsufficientDataError if a curve has fewer than 10 checkpoints and
// ShapeError if seeds do not share the checkpoint grid or there are none.
ReturnSummary SummarizeReturns(std::span<const ReturnCurve> curves);

// Population mean and std.
double Mean(std::span<const double> values);
double PopulationStd(std::span<const double> values);
double Median(std::vector<double> values);

}  // namespace mtr

#endif  // MTR_METRICS_H_
