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

#ifndef MTR_GMM_H_
#define MTR_GMM_H_

#include <array>
#include <span>
#include <vector>

#include "mtr/rng.h"

namespace mtr {

inline constexpr int kDescriptorDim = 3;
using Point3 = std::array<double, kDescriptorDim>;

struct GaussianComponent {
  Point3 mean{};
  Point3 variance{};  // Diagonal covariance.
  double weight = 0.0;
};

// Diagonal-covariance Gaussian mixture over 3-dim points.
struct GmmModel {
  std::vector<GaussianComponent> components;

  int size() const { return static_cast<int>(components.size()); }
  // log sum_k pi_k N(x | mu_k, diag(var_k)).
  double LogDensity(const Point3& x) const;
};

struct GmmFitOptions {
  int components = 2;
  int max_iter = 200;
  // Stop once the mean per-point log-likelihood improves by less than tol.
  double tol = 1e-6;
  double variance_floor = 1e-6;
  // Throw DomainError if the log-likelihood ever decreases (beyond 1e-9).
  bool checked = false;
};

struct GmmFit {
  GmmModel model;
  // Mean per-point log-likelihood at every E-step, starting from the
  // initialization.
  std::vector<double> log_likelihood;
  int iterations = 0;
  bool converged = false;
};

// EM from a k-means++ initialization. Non-finite rows are dropped first.
// Throws InsufficientDataError with fewer than 2 * components points left.
GmmFit FitGmm(std::span<const Point3> points, SeededRng& rng,
              const GmmFitOptions& options = {});

// Posterior over components, computed in log space; sums to 1.
std::vector<double> Responsibilities(const GmmModel& model, const Point3& x);

// Component with the lowest mean policy drift (coordinate 0). Ties go to the
// lower entropy-variance mean (coordinate 2), then to the lower index.
int StableComponent(const GmmModel& model);

// Posterior probability of the stable component at (already standardized) d.
double TrustWeight(const GmmModel& model, const Point3& d);

// Per-coordinate z-scoring. Coordinates with zero spread get scale 1.
struct Standardizer {
  Point3 center{0.0, 0.0, 0.0};
  Point3 scale{1.0, 1.0, 1.0};

  static Standardizer Fit(std::span<const Point3> points);
  Point3 Apply(const Point3& x) const;
  Point3 Invert(const Point3& z) const;
};

}  // namespace mtr

#endif  // MTR_GMM_H_
