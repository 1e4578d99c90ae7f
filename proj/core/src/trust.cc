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

#include "mtr/trust.h"

#include <algorithm>

#include "mtr/errors.h"

namespace mtr {

double TrustState::Get(TrustKey key) const {
  auto it = weights.find(key);
  return it == weights.end() ? 1.0 : it->second;
}

double TrustState::Mean() const {
  if (weights.empty()) return 1.0;
  double sum = 0.0;
  for (const auto& [key, w] : weights) sum += w;
  return sum / static_cast<double>(weights.size());
}

void UpdateTrust(TrustState& state, const std::map<TrustKey, double>& raw,
                 double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw ConfigError("UpdateTrust: alpha must be in (0, 1]");
  }
  for (const auto& [key, w_raw] : raw) {
    const double old = state.Get(key);
    state.weights[key] =
        std::clamp((1.0 - alpha) * old + alpha * w_raw, 0.0, 1.0);
  }
}

bool ShouldRefit(int64_t step, int64_t refit_interval) {
  if (refit_interval < 1) {
    throw ConfigError("refit interval K must be >= 1");
  }
  return step % refit_interval == 0;
}

double TrustModel::Weight(const Point3& raw) const {
  return TrustWeight(gmm, standardizer.Apply(raw));
}

double TrustModel::StableMeanDrift() const {
  return standardizer.Invert(gmm.components[stable].mean)[0];
}

double TrustModel::DriftGap() const {
  double lo = 0.0, hi = 0.0;
  for (int k = 0; k < gmm.size(); ++k) {
    const double d = standardizer.Invert(gmm.components[k].mean)[0];
    if (k == 0 || d < lo) lo = d;
    if (k == 0 || d > hi) hi = d;
  }
  return hi - lo;
}

TrustModel FitTrustModel(std::span<const Point3> points, SeededRng& rng,
                         const GmmFitOptions& options) {
  TrustModel model;
  model.standardizer = Standardizer::Fit(points);
  std::vector<Point3> z;
  z.reserve(points.size());
  for (const auto& p : points) z.push_back(model.standardizer.Apply(p));
  model.gmm = FitGmm(z, rng, options).model;
  model.stable = StableComponent(model.gmm);
  return model;
}

std::vector<RefitRecord> RefitTrust(TrustState& state, int64_t step,
                                    std::span<const Point3> points,
                                    std::span<const TrustKey> keys,
                                    SeededRng& rng,
                                    const RefitOptions& options,
                                    TrustModel* model_out) {
  if (points.size() != keys.size()) {
    throw ShapeError("RefitTrust: one key per point required");
  }
  TrustModel model;
  try {
    model = FitTrustModel(points, rng, options.gmm);
  } catch (const InsufficientDataError&) {
    return {};
  }
  const bool separated = model.DriftGap() >= options.min_drift_gap;
  std::map<TrustKey, std::pair<double, int>> sums;
  for (size_t i = 0; i < points.size(); ++i) {
    auto& [sum, count] = sums[keys[i]];
    sum += separated ? model.Weight(points[i]) : 1.0;
    ++count;
  }
  std::map<TrustKey, double> raw;
  for (const auto& [key, sc] : sums) raw[key] = sc.first / sc.second;
  UpdateTrust(state, raw, state.alpha);
  state.last_refit_step = step;

  const double drift = model.StableMeanDrift();
  std::vector<RefitRecord> records;
  records.reserve(raw.size());
  for (const auto& [key, w] : raw) {
    records.push_back({step, key, w, state.Get(key), drift});
  }
  if (model_out != nullptr) *model_out = model;
  return records;
}

}  // namespace mtr
