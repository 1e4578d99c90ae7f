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

#include "mtr/gmm.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "mtr/errors.h"

namespace mtr {
namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;  // ln(2 pi)

double ComponentLogDensity(const GaussianComponent& c, const Point3& x) {
  double log_p = 0.0;
  for (int d = 0; d < kDescriptorDim; ++d) {
    const double diff = x[d] - c.mean[d];
    log_p -= 0.5 * (kLog2Pi + std::log(c.variance[d]) +
                    diff * diff / c.variance[d]);
  }
  return log_p;
}

// Fills log(pi_k) + log N_k(x) and returns the log-sum-exp.
double JointLogs(const GmmModel& model, const Point3& x,
                 std::vector<double>& logs) {
  logs.resize(model.components.size());
  double max = -std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < model.components.size(); ++k) {
    const auto& c = model.components[k];
    logs[k] = std::log(c.weight) + ComponentLogDensity(c, x);
    max = std::max(max, logs[k]);
  }
  double sum = 0.0;
  for (double l : logs) sum += std::exp(l - max);
  return max + std::log(sum);
}

double SquaredDistance(const Point3& a, const Point3& b) {
  double s = 0.0;
  for (int d = 0; d < kDescriptorDim; ++d) s += (a[d] - b[d]) * (a[d] - b[d]);
  return s;
}

std::vector<Point3> KMeansPlusPlus(const std::vector<Point3>& points, int k,
                                   SeededRng& rng) {
  std::vector<Point3> centers;
  centers.push_back(points[rng.UniformInt(points.size())]);
  std::vector<double> d2(points.size());
  while (static_cast<int>(centers.size()) < k) {
    double total = 0.0;
    for (size_t i = 0; i < points.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : centers) best = std::min(best, SquaredDistance(points[i], c));
      d2[i] = best;
      total += best;
    }
    if (total > 0.0) {
      centers.push_back(points[rng.Categorical(d2)]);
    } else {
      centers.push_back(points[rng.UniformInt(points.size())]);
    }
  }
  return centers;
}

}  // namespace

double GmmModel::LogDensity(const Point3& x) const {
  std::vector<double> logs;
  return JointLogs(*this, x, logs);
}

GmmFit FitGmm(std::span<const Point3> input, SeededRng& rng,
              const GmmFitOptions& options) {
  const int k = options.components;
  if (k < 1) throw ConfigError("FitGmm: components must be >= 1");
  std::vector<Point3> points;
  points.reserve(input.size());
  for (const auto& p : input) {
    if (std::isfinite(p[0]) && std::isfinite(p[1]) && std::isfinite(p[2])) {
      points.push_back(p);
    }
  }
  if (static_cast<int>(points.size()) < 2 * k) {
    throw InsufficientDataError("FitGmm: need at least " +
                                std::to_string(2 * k) + " finite points, got " +
                                std::to_string(points.size()));
  }
  const size_t n = points.size();
  const double inv_n = 1.0 / static_cast<double>(n);
  const double floor = options.variance_floor;

  // Initialization: k-means++ centres, pooled per-coordinate variance, equal
  // weights.
  Point3 mean{};
  for (const auto& p : points)
    for (int d = 0; d < kDescriptorDim; ++d) mean[d] += p[d] * inv_n;
  Point3 pooled{};
  for (const auto& p : points)
    for (int d = 0; d < kDescriptorDim; ++d)
      pooled[d] += (p[d] - mean[d]) * (p[d] - mean[d]) * inv_n;
  for (double& v : pooled) v = std::max(v, floor);

  GmmFit fit;
  for (const auto& c : KMeansPlusPlus(points, k, rng)) {
    fit.model.components.push_back({c, pooled, 1.0 / k});
  }

  std::vector<std::vector<double>> resp(n, std::vector<double>(k));
  std::vector<double> logs;
  for (int iter = 0;; ++iter) {
    // E-step.
    double ll = 0.0;
    for (size_t i = 0; i < n; ++i) {
      const double lse = JointLogs(fit.model, points[i], logs);
      ll += lse;
      for (int c = 0; c < k; ++c) resp[i][c] = std::exp(logs[c] - lse);
    }
    ll *= inv_n;
    if (!fit.log_likelihood.empty()) {
      const double prev = fit.log_likelihood.back();
      if (options.checked && ll < prev - 1e-9 * std::max(1.0, std::abs(prev))) {
        throw DomainError("FitGmm: log-likelihood decreased");
      }
      fit.log_likelihood.push_back(ll);
      if (ll - prev < options.tol) {
        fit.converged = true;
        break;
      }
    } else {
      fit.log_likelihood.push_back(ll);
    }
    if (iter >= options.max_iter) break;
    fit.iterations = iter + 1;

    // M-step.
    for (int c = 0; c < k; ++c) {
      GaussianComponent& comp = fit.model.components[c];
      double nk = 0.0;
      Point3 mu{};
      for (size_t i = 0; i < n; ++i) {
        nk += resp[i][c];
        for (int d = 0; d < kDescriptorDim; ++d) mu[d] += resp[i][c] * points[i][d];
      }
      // An emptied component keeps its parameters; its weight goes to the
      // smallest positive value so log(weight) stays finite.
      if (nk < 1e-10) {
        comp.weight = 1e-12;
        continue;
      }
      for (double& m : mu) m /= nk;
      Point3 var{};
      for (size_t i = 0; i < n; ++i)
        for (int d = 0; d < kDescriptorDim; ++d)
          var[d] += resp[i][c] * (points[i][d] - mu[d]) * (points[i][d] - mu[d]);
      for (int d = 0; d < kDescriptorDim; ++d) {
        var[d] = std::max(var[d] / nk, floor);
      }
      comp.mean = mu;
      comp.variance = var;
      comp.weight = nk * inv_n;
    }
    double wsum = 0.0;
    for (const auto& comp : fit.model.components) wsum += comp.weight;
    for (auto& comp : fit.model.components) comp.weight /= wsum;
  }
  return fit;
}

std::vector<double> Responsibilities(const GmmModel& model, const Point3& x) {
  std::vector<double> logs;
  const double lse = JointLogs(model, x, logs);
  std::vector<double> out(logs.size());
  for (size_t k = 0; k < logs.size(); ++k) out[k] = std::exp(logs[k] - lse);
  return out;
}

int StableComponent(const GmmModel& model) {
  int best = 0;
  for (int k = 1; k < model.size(); ++k) {
    const auto& c = model.components[k];
    const auto& b = model.components[best];
    if (c.mean[0] < b.mean[0] ||
        (c.mean[0] == b.mean[0] && c.mean[2] < b.mean[2])) {
      best = k;
    }
  }
  return best;
}

double TrustWeight(const GmmModel& model, const Point3& d) {
  const double w = Responsibilities(model, d)[StableComponent(model)];
  return std::clamp(w, 0.0, 1.0);
}

Standardizer Standardizer::Fit(std::span<const Point3> points) {
  Standardizer s;
  if (points.empty()) return s;
  const double inv_n = 1.0 / static_cast<double>(points.size());
  for (int d = 0; d < kDescriptorDim; ++d) {
    double mean = 0.0;
    for (const auto& p : points) mean += p[d] * inv_n;
    double var = 0.0;
    for (const auto& p : points) var += (p[d] - mean) * (p[d] - mean) * inv_n;
    s.center[d] = mean;
    const double sd = std::sqrt(var);
    s.scale[d] = sd > 1e-12 ? sd : 1.0;
  }
  return s;
}

Point3 Standardizer::Apply(const Point3& x) const {
  Point3 z;
  for (int d = 0; d < kDescriptorDim; ++d) z[d] = (x[d] - center[d]) / scale[d];
  return z;
}

Point3 Standardizer::Invert(const Point3& z) const {
  Point3 x;
  for (int d = 0; d < kDescriptorDim; ++d) x[d] = z[d] * scale[d] + center[d];
  return x;
}

}  // namespace mtr
