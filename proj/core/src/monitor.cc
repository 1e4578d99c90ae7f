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

#include "mtr/monitor.h"

#include <cmath>
#include <string>

#include "mtr/errors.h"
#include "mtr/prob.h"

namespace mtr {

double KlDivergence(std::span<const double> p, std::span<const double> q,
                    double cap) {
  if (p.size() != q.size()) throw ShapeError("KlDivergence: length mismatch");
  double kl = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) return cap;
    kl += p[i] * std::log(p[i] / q[i]);
  }
  return std::max(kl, 0.0);
}

std::string_view DescriptorSetName(DescriptorSet set) {
  switch (set) {
    case DescriptorSet::kKlOnly:
      return "kl_only";
    case DescriptorSet::kKlEntropy:
      return "kl_entropy";
    case DescriptorSet::kFull:
      return "full";
  }
  return "full";
}

DescriptorSet ParseDescriptorSet(std::string_view name) {
  if (name == "kl_only") return DescriptorSet::kKlOnly;
  if (name == "kl_entropy") return DescriptorSet::kKlEntropy;
  if (name == "full") return DescriptorSet::kFull;
  throw ConfigError("unknown descriptor set '" + std::string(name) +
                    "' (expected kl_only, kl_entropy or full)");
}

std::array<double, 3> MaskDescriptors(const DescriptorVector& d,
                                      DescriptorSet set) {
  std::array<double, 3> out = d.AsArray();
  if (set != DescriptorSet::kFull) out[1] = 0.0;
  if (set == DescriptorSet::kKlOnly) out[2] = 0.0;
  return out;
}

DescriptorWindow::DescriptorWindow(size_t capacity) : capacity_(capacity) {
  if (capacity_ < 1) throw ConfigError("DescriptorWindow: capacity must be >= 1");
}

void DescriptorWindow::Record(PolicySnapshot snapshot) {
  if (!snapshots_.empty() &&
      snapshot.update_index <= snapshots_.back().update_index) {
    throw RangeError("DescriptorWindow: update_index must strictly increase");
  }
  snapshots_.push_back(std::move(snapshot));
  while (snapshots_.size() > capacity_) snapshots_.pop_front();
}

namespace {

std::vector<const std::vector<double>*> Covering(
    int state, const DescriptorWindow& window) {
  std::vector<const std::vector<double>*> dists;
  dists.reserve(window.size());
  for (const auto& snap : window.snapshots()) {
    auto it = snap.distributions.find(state);
    if (it != snap.distributions.end()) dists.push_back(&it->second);
  }
  if (dists.size() < 2) {
    throw InsufficientDataError("descriptors: state " + std::to_string(state) +
                                " covered by fewer than 2 snapshots");
  }
  return dists;
}

int ModalAction(const std::vector<int>& counts) {
  int best = 0;
  for (size_t a = 1; a < counts.size(); ++a) {
    if (counts[a] > counts[best]) best = static_cast<int>(a);
  }
  return best;
}

}  // namespace

DescriptorVector DescriptorsFor(int state, const DescriptorWindow& window) {
  return SummarizeState(state, window).window_descriptors;
}

StateWindowSummary SummarizeState(int state, const DescriptorWindow& window) {
  const auto dists = Covering(state, window);
  const size_t n_actions = dists.front()->size();
  StateWindowSummary s;
  s.state = state;
  s.count = static_cast<int>(dists.size());
  s.argmax_counts.assign(n_actions, 0);
  double drift_sum = 0.0;
  for (size_t i = 0; i < dists.size(); ++i) {
    const auto& d = *dists[i];
    if (d.size() != n_actions) {
      throw ShapeError("descriptors: inconsistent action count");
    }
    ++s.argmax_counts[Argmax(d)];
    const double h = Entropy(d);
    s.entropy_sum += h;
    s.entropy_sq_sum += h * h;
    if (i > 0) drift_sum += KlDivergence(*dists[i - 1], d);
  }
  s.modal_action = ModalAction(s.argmax_counts);
  s.latest = *dists.back();

  const double n = static_cast<double>(s.count);
  const double mean_h = s.entropy_sum / n;
  DescriptorVector& out = s.window_descriptors;
  out.policy_drift = drift_sum / (n - 1.0);
  out.action_consensus =
      static_cast<double>(s.argmax_counts[s.modal_action]) / n;
  // Two-pass variance keeps the constant-policy case exactly zero.
  double var = 0.0;
  for (const auto* d : dists) {
    const double diff = Entropy(*d) - mean_h;
    var += diff * diff;
  }
  out.entropy_variance = var / n;
  return s;
}

DescriptorVector ExperienceDescriptors(const StateWindowSummary& summary,
                                       int action, double td_error,
                                       double probe_step) {
  const size_t n_actions = summary.latest.size();
  if (action < 0 || static_cast<size_t>(action) >= n_actions) {
    throw RangeError("ExperienceDescriptors: action out of range");
  }
  const double push = probe_step * td_error;
  const double centre = 1.0 / static_cast<double>(n_actions);

  std::vector<double> push_logits(n_actions);
  std::vector<double> response_logits(n_actions);
  for (size_t a = 0; a < n_actions; ++a) {
    const double e = (static_cast<int>(a) == action ? 1.0 : 0.0) - centre;
    push_logits[a] = push * e;
    // Clamp keeps log finite when a probability underflowed to zero.
    response_logits[a] =
        std::log(std::max(summary.latest[a], 1e-300)) + push * e;
  }
  const std::vector<double> uniform(n_actions, centre);
  const std::vector<double> pushed = Softmax(push_logits);
  const std::vector<double> response = Softmax(response_logits);

  DescriptorVector d;
  d.policy_drift = KlDivergence(uniform, pushed);

  const int response_argmax = Argmax(response);
  const double n = static_cast<double>(summary.count + 1);
  d.action_consensus =
      (static_cast<double>(summary.argmax_counts[response_argmax]) + 1.0) / n;

  const double h = Entropy(response);
  const double mean_h = (summary.entropy_sum + h) / n;
  const double second = (summary.entropy_sq_sum + h * h) / n;
  d.entropy_variance = std::max(second - mean_h * mean_h, 0.0);
  return d;
}

double BatchMeanEntropy(const Matrix& probs) {
  if (probs.rows() == 0) throw ShapeError("BatchMeanEntropy: empty batch");
  double sum = 0.0;
  for (Eigen::Index r = 0; r < probs.rows(); ++r) {
    const RowVector row = probs.row(r);
    sum += Entropy(std::span<const double>(row.data(), row.size()));
  }
  return sum / static_cast<double>(probs.rows());
}

}  // namespace mtr
