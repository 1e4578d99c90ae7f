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

#include <gtest/gtest.h>

#include <cmath>

#include "mtr/errors.h"
#include "mtr/metrics.h"
#include "mtr/rng.h"

namespace mtr {
namespace {

TEST(AurocTest, Examples) {
  const std::vector<int> labels{0, 0, 1, 1};
  EXPECT_EQ(Auroc(std::vector<double>{0.1, 0.2, 0.8, 0.9}, labels), 1.0);
  EXPECT_EQ(Auroc(std::vector<double>{0.9, 0.8, 0.2, 0.1}, labels), 0.0);
  EXPECT_EQ(Auroc(std::vector<double>{0.5, 0.5, 0.5, 0.5}, labels), 0.5);
  EXPECT_EQ(Auroc(std::vector<double>{0.1, 0.4, 0.35, 0.8}, labels), 0.75);
}

TEST(AurocTest, Errors) {
  EXPECT_THROW(Auroc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 1}),
               UndefinedMetricError);
  EXPECT_THROW(Auroc(std::vector<double>{0.1}, std::vector<int>{1, 0}),
               ShapeError);
}

TEST(AurocTest, MatchesBruteForce) {
  SeededRng rng(1);
  for (int trial = 0; trial < 1000; ++trial) {
    const size_t n = 2 + rng.UniformInt(40);
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (size_t i = 0; i < n; ++i) {
      // Coarse scores so ties are common.
      s[i] = static_cast<double>(rng.UniformInt(6));
      y[i] = static_cast<int>(rng.UniformInt(2));
    }
    y[0] = 0;
    y[1] = 1;
    ASSERT_NEAR(Auroc(s, y), AurocBruteForce(s, y), 1e-12);
  }
}

TEST(AurocTest, InvariantUnderMonotoneMaps) {
  SeededRng rng(2);
  std::vector<double> s(50), t(50);
  std::vector<int> y(50);
  for (size_t i = 0; i < 50; ++i) {
    s[i] = rng.Normal();
    t[i] = std::exp(3 * s[i]) + 7;
    y[i] = static_cast<int>(i % 2);
  }
  EXPECT_NEAR(Auroc(s, y), Auroc(t, y), 1e-12);
}

TEST(AurocTest, LabelFlipComplements) {
  SeededRng rng(3);
  std::vector<double> s(40);
  std::vector<int> y(40), flipped(40);
  for (size_t i = 0; i < 40; ++i) {
    s[i] = rng.Normal();
    y[i] = static_cast<int>(i % 3 == 0);
    flipped[i] = 1 - y[i];
  }
  EXPECT_NEAR(Auroc(s, y) + Auroc(s, flipped), 1.0, 1e-12);
}

TEST(BrierTest, Examples) {
  EXPECT_EQ(Brier(std::vector<double>{1, 0}, std::vector<int>{1, 0}), 0.0);
  EXPECT_EQ(Brier(std::vector<double>{0.5, 0.5}, std::vector<int>{1, 0}),
            0.25);
  EXPECT_THROW(Brier(std::vector<double>{1.5}, std::vector<int>{1}),
               DomainError);
}

TEST(NllTest, ExamplesAndClamping) {
  const NllResult half =
      Nll(std::vector<double>{0.5, 0.5}, std::vector<int>{1, 0});
  EXPECT_NEAR(half.value, std::log(2.0), 1e-15);
  EXPECT_EQ(half.clamped, 0);
  const NllResult hard = Nll(std::vector<double>{0.0}, std::vector<int>{1});
  EXPECT_NEAR(hard.value, -std::log(1e-12), 1e-9);
  EXPECT_EQ(hard.clamped, 1);
}

TEST(ReliabilityTest, EdgesAndCounts) {
  const auto bins = ReliabilityBins(std::vector<double>{0.0, 0.05, 0.95, 1.0},
                                    std::vector<int>{0, 0, 1, 1}, 10);
  ASSERT_EQ(bins.size(), 10u);
  EXPECT_EQ(bins[0].count, 2);
  EXPECT_EQ(bins[9].count, 2);
  EXPECT_DOUBLE_EQ(*bins[9].mean_score, 0.975);
  EXPECT_EQ(*bins[9].positive_rate, 1.0);
  EXPECT_FALSE(bins[4].mean_score.has_value());
  EXPECT_DOUBLE_EQ(bins[3].edge_lo, 0.3);
  EXPECT_THROW(ReliabilityBins(std::vector<double>{0.5}, std::vector<int>{1},
                               0),
               ConfigError);
}

// Labels drawn from the score itself land near the diagonal.
TEST(ReliabilityTest, CalibratedScoresAreDiagonal) {
  SeededRng rng(4);
  std::vector<double> s(200000);
  std::vector<int> y(s.size());
  for (size_t i = 0; i < s.size(); ++i) {
    s[i] = rng.Uniform01();
    y[i] = rng.Bernoulli(s[i]);
  }
  for (const auto& b : ReliabilityBins(s, y, 10)) {
    ASSERT_GT(b.count, 0);
    EXPECT_NEAR(*b.positive_rate, *b.mean_score, 0.01);
  }
}

ReturnCurve Flat(double value, int n = 10) {
  ReturnCurve c;
  for (int i = 0; i < n; ++i) c.push_back({i * 100, value});
  return c;
}

TEST(SummarizeReturnsTest, Examples) {
  const std::vector<ReturnCurve> curves{Flat(800), Flat(900)};
  const ReturnSummary s = SummarizeReturns(curves);
  EXPECT_EQ(s.mean, 850.0);
  EXPECT_EQ(s.std, 50.0);
  EXPECT_EQ(s.worst_seed_mean, 800.0);
  EXPECT_EQ(s.worst_checkpoint, 800.0);
}

TEST(SummarizeReturnsTest, UsesFinalTenOnly) {
  ReturnCurve c = Flat(1.0, 12);
  c[0].value = -100;
  c[11].value = -1.0;
  const ReturnSummary s = SummarizeReturns(std::vector<ReturnCurve>{c});
  EXPECT_DOUBLE_EQ(s.per_seed[0], 0.8);
  EXPECT_EQ(s.worst_checkpoint, -1.0);
}

TEST(SummarizeReturnsTest, Errors) {
  EXPECT_THROW(SummarizeReturns(std::vector<ReturnCurve>{Flat(1, 9)}),
               InsufficientDataError);
  EXPECT_THROW(SummarizeReturns(std::vector<ReturnCurve>{Flat(1), Flat(1, 11)}),
               ShapeError);
  EXPECT_THROW(SummarizeReturns(std::vector<ReturnCurve>{}), ShapeError);
}

TEST(StatsTest, MeanStdMedian) {
  const std::vector<double> v{1, 2, 3, 4};
  EXPECT_EQ(Mean(v), 2.5);
  EXPECT_DOUBLE_EQ(PopulationStd(v), std::sqrt(1.25));
  EXPECT_EQ(Median(v), 2.5);
  EXPECT_EQ(Median({3, 1, 2}), 2.0);
  EXPECT_THROW(Median({}), InsufficientDataError);
}

}  // namespace
}  // namespace mtr
