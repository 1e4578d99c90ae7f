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

#ifndef MTR_TRUST_H_
#define MTR_TRUST_H_

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "mtr/gmm.h"
#include "mtr/rng.h"

namespace mtr {

// Identifies an experience type: a state, a batch phase, or a discretized
// (s, a, s', r) tuple depending on the caller.
using TrustKey = uint64_t;

// Slowly varying per-key trust. Keys never refit default to full trust.
struct TrustState {
  std::map<TrustKey, double> weights;
  double alpha = 0.1;
  int64_t last_refit_step = -1;
  int64_t refit_interval = 1000;

  double Get(TrustKey key) const;
  // Unweighted mean over stored keys; 1 when empty.
  double Mean() const;
};

// w' = (1 - alpha) w_old + alpha w_raw for every key in `raw`, clamped to
// [0, 1]. Keys absent from `raw` keep their value. Requires alpha in (0, 1].
void UpdateTrust(TrustState& state, const std::map<TrustKey, double>& raw,
                 double alpha);

// step mod K == 0. Throws ConfigError when K < 1.
bool ShouldRefit(int64_t step, int64_t refit_interval);

// Fitted mixture plus the standardization it was fitted under.
struct TrustModel {
  Standardizer standardizer;
  GmmModel gmm;
  int stable = 0;

  // Stable-cluster posterior of a raw (unstandardized) descriptor.
  double Weight(const Point3& raw) const;
  // Mean drift of the stable component in original units.
  double StableMeanDrift() const;
  // Largest minus smallest component drift mean, in original units.
  double DriftGap() const;
};

// Standardizes `points`, fits a 2-component mixture and identifies the
// stable component. Propagates InsufficientDataError.
TrustModel FitTrustModel(std::span<const Point3> points, SeededRng& rng,
                         const GmmFitOptions& options = {});

struct RefitRecord {
  int64_t step = 0;
  TrustKey key = 0;
  double w_raw = 0.0;
  double w_smoothed = 0.0;
  double stable_component_mean_drift = 0.0;
};

struct RefitOptions {
  GmmFitOptions gmm;
  // Components whose drift means differ by less than this (in nats) are
  // treated as one stable population: every key gets raw trust 1.
  double min_drift_gap = 0.0;
};

// One refit event: fit on `points`, average the stable posterior per key into
// raw trust, smooth into `state`. Returns one record per refreshed key, or
// an empty vector (state untouched) if there is not enough data.
std::vector<RefitRecord> RefitTrust(TrustState& state, int64_t step,
                                    std::span<const Point3> points,
                                    std::span<const TrustKey> keys,
                                    SeededRng& rng,
                                    const RefitOptions& options = {},
                                    TrustModel* model_out = nullptr);

}  // namespace mtr

#endif  // MTR_TRUST_H_
