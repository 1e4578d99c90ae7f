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
#include "mtr/gmm.h"
#include "mtr/trust.h"

namespace mtr {
namespace {

const Point3 kStableMean{0.05, 0.95, 0.01};
const Point3 kUnstableMean{1.5, 0.4, 0.5};

std::vector<Point3> TwoClusters(SeededRng& rng, int per_cluster, double sd) {
  std::vector<Point3> pts;
  for (const Point3& m : {kStableMean, kUnstableMean}) {
    for (int i = 0; i < per_cluster; ++i) {
      pts.push_back({rng.Normal(m[0], sd), rng.Normal(m[1], sd),
                     rng.Normal(m[2], sd)});
    }
  }
  return pts;
}

double Distance(const Point3& a, const Point3& b) {
  double d = 0.0;
  for (int i = 0; i < 3; ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

GmmModel TwoComponentModel(Point3 m0, Point3 m1, double var = 0.01,
                           double w0 = 0.5) {
  GmmModel m;
  m.components = {{m0, {var, var, var}, w0}, {m1, {var, var, var}, 1 - w0}};
  return m;
}

TEST(GmmTest, RecoversGeneratingMeans) {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    SeededRng data(seed), fit(seed + 100);
    const GmmFit f = FitGmm(TwoClusters(data, 200, 0.02), fit);
    ASSERT_EQ(f.model.size(), 2);
    const auto& c = f.model.components;
    const bool direct = Distance(c[0].mean, kStableMean) <
                        Distance(c[1].mean, kStableMean);
    const Point3& a = direct ? c[0].mean : c[1].mean;
    const Point3& b = direct ? c[1].mean : c[0].mean;
    EXPECT_LT(Distance(a, kStableMean), 0.05) << seed;
    EXPECT_LT(Distance(b, kUnstableMean), 0.05) << seed;
    EXPECT_NEAR(c[0].weight + c[1].weight, 1.0, 1e-12);
  }
}

TEST(GmmTest, SingleGaussianCombinedMean) {
  SeededRng data(1), fit(2);
  std::vector<Point3> pts;
  Point3 sample_mean{};
  for (int i = 0; i < 500; ++i) {
    pts.push_back({data.Normal(1, 0.3), data.Normal(-2, 0.1),
                   data.Normal(0.5, 0.2)});
    for (int k = 0; k < 3; ++k) sample_mean[k] += pts.back()[k] / 500;
  }
  const GmmModel m = FitGmm(pts, fit).model;
  for (int k = 0; k < 3; ++k) {
    double combined = 0.0;
    for (const auto& c : m.components) combined += c.weight * c.mean[k];
    EXPECT_NEAR(combined, sample_mean[k], 0.05);
  }
}

TEST(GmmTest, DegenerateInputNoNan) {
  SeededRng rng(3);
  const std::vector<Point3> same(20, Point3{0.3, 0.7, 0.1});
  const GmmModel m = FitGmm(same, rng).model;
  for (const auto& c : m.components) {
    for (int k = 0; k < 3; ++k) {
      EXPECT_NEAR(c.mean[k], same[0][k], 1e-12);
      EXPECT_GE(c.variance[k], 1e-6);
    }
    EXPECT_FALSE(std::isnan(c.weight));
  }
  EXPECT_EQ(StableComponent(m), 0);
  EXPECT_FALSE(std::isnan(TrustWeight(m, same[0])));
}

TEST(GmmTest, TooFewPointsThrows) {
  SeededRng rng(4);
  const std::vector<Point3> three(3, Point3{0, 0, 0});
  EXPECT_THROW(FitGmm(three, rng), InsufficientDataError);
  std::vector<Point3> with_nan(4, Point3{1, 2, 3});
  with_nan[0][1] = std::nan("");
  EXPECT_THROW(FitGmm(with_nan, rng), InsufficientDataError);
}

TEST(GmmTest, LogLikelihoodNonDecreasing) {
  SeededRng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Point3> pts;
    const int n = 4 + static_cast<int>(rng.UniformInt(150));
    const int shape = trial % 4;
    for (int i = 0; i < n; ++i) {
      Point3 p{rng.Normal(), rng.Normal(), rng.Normal()};
      if (shape == 1) p[1] = 0.0;  // A constant coordinate.
      if (shape == 2 && i % 3 == 0) p = {5, 5, 5};  // Duplicated points.
      if (shape == 3) p[0] = std::exp(3 * p[0]);  // Heavy tail.
      pts.push_back(p);
    }
    GmmFitOptions opt;
    opt.checked = true;
    const GmmFit f = FitGmm(pts, rng, opt);
    for (size_t i = 1; i < f.log_likelihood.size(); ++i) {
      ASSERT_GE(f.log_likelihood[i], f.log_likelihood[i - 1] - 1e-9)
          << "trial " << trial << " iter " << i;
    }
    for (const auto& c : f.model.components) {
      for (int k = 0; k < 3; ++k) ASSERT_TRUE(std::isfinite(c.mean[k]));
    }
  }
}

TEST(ResponsibilitiesTest, Examples) {
  const GmmModel far = TwoComponentModel({0, 0, 0}, {1, 1, 1}, 0.01);
  EXPECT_GT(Responsibilities(far, {0, 0, 0})[0], 0.999);

  const GmmModel same = TwoComponentModel({0, 0, 0}, {0, 0, 0});
  const auto r = Responsibilities(same, {3, -1, 2});
  EXPECT_NEAR(r[0], 0.5, 1e-12);
  EXPECT_NEAR(r[0] + r[1], 1.0, 1e-12);

  const GmmModel prior = TwoComponentModel({0, 0, 0}, {0, 0, 0}, 0.01, 0.9);
  EXPECT_NEAR(Responsibilities(prior, {0.2, 0.1, 0})[0], 0.9, 1e-12);
}

TEST(ResponsibilitiesTest, FarPointsStayFinite) {
  const GmmModel m = TwoComponentModel({0, 0, 0}, {1, 1, 1}, 1e-6);
  const auto r = Responsibilities(m, {1e3, -1e3, 1e3});
  EXPECT_TRUE(std::isfinite(r[0]));
  EXPECT_NEAR(r[0] + r[1], 1.0, 1e-12);
}

TEST(StableComponentTest, Rules) {
  EXPECT_EQ(StableComponent(TwoComponentModel({0.01, 0, 0}, {1.2, 0, 0})), 0);
  EXPECT_EQ(StableComponent(TwoComponentModel({0.5, 0, 0.5}, {0.5, 0, 0.1})),
            1);
  EXPECT_EQ(StableComponent(TwoComponentModel({0.5, 0, 0.5}, {0.5, 0, 0.5})),
            0);
}

TEST(TrustWeightTest, Examples) {
  const GmmModel m = TwoComponentModel({0, 0, 0}, {1, 1, 1}, 0.01);
  EXPECT_GT(TrustWeight(m, {0, 0, 0}), 0.999);
  EXPECT_LT(TrustWeight(m, {1, 1, 1}), 0.001);
  EXPECT_NEAR(TrustWeight(TwoComponentModel({0, 0, 0}, {0, 0, 0}), {1, 2, 3}),
              0.5, 1e-12);
}

TEST(TrustWeightTest, LabelSwapInvariance) {
  SeededRng rng(6);
  for (int t = 0; t < 100; ++t) {
    const GmmModel m = TwoComponentModel(
        {rng.Normal(), rng.Normal(), rng.Normal()},
        {rng.Normal(), rng.Normal(), rng.Normal()}, 0.5, rng.Uniform(0.1, 0.9));
    GmmModel swapped = m;
    std::swap(swapped.components[0], swapped.components[1]);
    const Point3 x{rng.Normal(), rng.Normal(), rng.Normal()};
    const double w = TrustWeight(m, x);
    ASSERT_NEAR(w, TrustWeight(swapped, x), 1e-12);
    ASSERT_GE(w, 0.0);
    ASSERT_LE(w, 1.0);
  }
}

TEST(StandardizerTest, RoundTripAndConstantColumn) {
  const std::vector<Point3> pts{{1, 5, 0}, {3, 5, 2}, {5, 5, 4}};
  const Standardizer s = Standardizer::Fit(pts);
  EXPECT_EQ(s.scale[1], 1.0);
  const Point3 z = s.Apply(pts[2]);
  EXPECT_NEAR(z[1], 0.0, 1e-15);
  const Point3 back = s.Invert(z);
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(back[k], pts[2][k], 1e-12);
}

TEST(UpdateTrustTest, Examples) {
  TrustState s;
  UpdateTrust(s, {{1, 0.3}}, 1.0);
  EXPECT_EQ(s.Get(1), 0.3);
  TrustState t;
  UpdateTrust(t, {{7, 0.0}}, 0.1);
  EXPECT_DOUBLE_EQ(t.Get(7), 0.9);
  TrustState u;
  for (int i = 0; i < 50; ++i) UpdateTrust(u, {{2, 0.0}}, 0.1);
  EXPECT_NEAR(u.Get(2), std::pow(0.9, 50), 1e-12);
  EXPECT_NEAR(u.Get(2), 0.00515, 1e-5);
}

TEST(UpdateTrustTest, DefaultsAndBounds) {
  TrustState s;
  EXPECT_EQ(s.Get(42), 1.0);
  EXPECT_EQ(s.Mean(), 1.0);
  UpdateTrust(s, {{1, 0.5}}, 0.5);
  UpdateTrust(s, {{2, 2.0}, {3, -1.0}}, 1.0);
  EXPECT_EQ(s.Get(1), 0.75);  // Untouched by the second update.
  EXPECT_EQ(s.Get(2), 1.0);
  EXPECT_EQ(s.Get(3), 0.0);
  EXPECT_THROW(UpdateTrust(s, {}, 0.0), ConfigError);
  EXPECT_THROW(UpdateTrust(s, {}, 1.5), ConfigError);
}

// Per refit, no key moves by more than alpha.
TEST(UpdateTrustTest, TimescaleSeparation) {
  SeededRng rng(7);
  TrustState s;
  for (int r = 0; r < 100; ++r) {
    std::map<TrustKey, double> raw;
    for (TrustKey k = 0; k < 10; ++k) raw[k] = rng.Uniform01();
    const TrustState before = s;
    UpdateTrust(s, raw, 0.1);
    for (TrustKey k = 0; k < 10; ++k) {
      ASSERT_LE(std::abs(s.Get(k) - before.Get(k)), 0.1 + 1e-15);
    }
  }
}

TEST(ShouldRefitTest, Examples) {
  EXPECT_TRUE(ShouldRefit(2000, 1000));
  EXPECT_FALSE(ShouldRefit(1500, 1000));
  EXPECT_TRUE(ShouldRefit(0, 1000));
  EXPECT_THROW(ShouldRefit(10, 0), ConfigError);
  EXPECT_THROW(ShouldRefit(10, -5), ConfigError);
}

TEST(RefitTrustTest, SeparatesUnstableKeys) {
  SeededRng data(8), fit(9);
  const std::vector<Point3> pts = TwoClusters(data, 100, 0.02);
  std::vector<TrustKey> keys;
  for (int i = 0; i < 200; ++i) keys.push_back(i < 100 ? 1 : 2);
  TrustState s;
  TrustModel model;
  const auto recs = RefitTrust(s, 1000, pts, keys, fit, {}, &model);
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_GT(s.Get(1), 0.99);
  EXPECT_NEAR(s.Get(2), 0.9, 1e-3);  // One EMA step from 1 toward 0.
  EXPECT_NEAR(model.StableMeanDrift(), kStableMean[0], 0.02);
  EXPECT_NEAR(model.DriftGap(), kUnstableMean[0] - kStableMean[0], 0.05);
}

TEST(RefitTrustTest, DriftGapGateGivesFullTrust) {
  SeededRng data(10), fit(11);
  std::vector<Point3> pts;
  std::vector<TrustKey> keys;
  for (int i = 0; i < 100; ++i) {
    pts.push_back({1e-7 * (i % 2), data.Normal(0.9, 0.05), 0.0});
    keys.push_back(i % 2);
  }
  TrustState s;
  RefitOptions opt;
  opt.min_drift_gap = 1e-3;
  const auto recs = RefitTrust(s, 1000, pts, keys, fit, opt);
  ASSERT_EQ(recs.size(), 2u);
  for (const auto& r : recs) EXPECT_EQ(r.w_raw, 1.0);
}

TEST(RefitTrustTest, InsufficientDataLeavesStateUntouched) {
  SeededRng fit(12);
  TrustState s;
  UpdateTrust(s, {{5, 0.4}}, 1.0);
  const std::vector<Point3> pts(2, Point3{0, 0, 0});
  const std::vector<TrustKey> keys{5, 5};
  EXPECT_TRUE(RefitTrust(s, 0, pts, keys, fit).empty());
  EXPECT_EQ(s.Get(5), 0.4);
}

}  // namespace
}  // namespace mtr
