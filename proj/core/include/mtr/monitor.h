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

#ifndef MTR_MONITOR_H_
#define MTR_MONITOR_H_

#include <array>
#include <cstdint>
#include <deque>
#include <map>
#include <span>
#include <string_view>
#include <vector>

#include "mtr/matrix.h"

namespace mtr {

inline constexpr double kDefaultKlCap = 30.0;

// KL(p || q) in nats with 0 ln(0/q) := 0. If some p_i > 0 has q_i == 0 the
// result is `cap` instead of infinity. Throws ShapeError on a length mismatch.
double KlDivergence(std::span<const double> p, std::span<const double> q,
                    double cap = kDefaultKlCap);

// Policy distributions at the probe states after one learner update.
struct PolicySnapshot {
  int64_t update_index = 0;
  std::map<int, std::vector<double>> distributions;
};

struct DescriptorVector {
  double policy_drift = 0.0;      // Mean successive KL (nats).
  double action_consensus = 1.0;  // Fraction agreeing with the modal argmax.
  double entropy_variance = 0.0;  // Population variance of entropy (nats^2).

  std::array<double, 3> AsArray() const {
    return {policy_drift, action_consensus, entropy_variance};
  }
  bool operator==(const DescriptorVector&) const = default;
};

// Which descriptor coordinates feed the trust estimator. Masked coordinates
// are set to zero (a constant column carries no information after
// standardization).
enum class DescriptorSet { kKlOnly, kKlEntropy, kFull };

std::string_view DescriptorSetName(DescriptorSet set);
DescriptorSet ParseDescriptorSet(std::string_view name);
std::array<double, 3> MaskDescriptors(const DescriptorVector& d,
                                      DescriptorSet set);

// Ring buffer of the most recent `capacity` snapshots.
class DescriptorWindow {
 public:
  explicit DescriptorWindow(size_t capacity = 50);

  // Appends a snapshot, evicting the oldest beyond capacity. Throws
  // RangeError unless update_index is strictly increasing.
  void Record(PolicySnapshot snapshot);

  size_t size() const { return snapshots_.size(); }
  size_t capacity() const { return capacity_; }
  bool empty() const { return snapshots_.empty(); }
  const std::deque<PolicySnapshot>& snapshots() const { return snapshots_; }

 private:
  size_t capacity_;
  std::deque<PolicySnapshot> snapshots_;
};

// Stability descriptors of `state` over the window:
//   drift     = mean over consecutive pairs of KL(pi_t || pi_{t+1}),
//   consensus = fraction of snapshots whose argmax equals the modal argmax
//               (ties toward the lowest action index),
//   entropy_variance = population variance of H(pi_t).
// Throws InsufficientDataError with fewer than 2 snapshots covering state.
DescriptorVector DescriptorsFor(int state, const DescriptorWindow& window);

// Per-state aggregates of a window, reused for every experience at that
// state within one update.
struct StateWindowSummary {
  int state = 0;
  int count = 0;
  std::vector<int> argmax_counts;  // Per action.
  int modal_action = 0;
  double entropy_sum = 0.0;
  double entropy_sq_sum = 0.0;
  std::vector<double> latest;  // Most recent distribution at the state.
  DescriptorVector window_descriptors;  // DescriptorsFor(state), if count>=2.
};

// Throws InsufficientDataError with fewer than 2 snapshots covering state.
StateWindowSummary SummarizeState(int state, const DescriptorWindow& window);

// Descriptors of a single experience (s, a) with TD error `td_error`, built
// from the policy's counterfactual response to that experience alone:
//   response = softmax(log pi_latest(.|s) + step * td_error * (e_a - 1/|A|))
//   drift     = KL(uniform || softmax(step * td_error * (e_a - 1/|A|))),
//               the response of an uncommitted policy, so that experiences at
//               confident and unconfident states are on one scale;
//   consensus = fraction of {window snapshots, response} whose argmax equals
//               argmax(response);
//   entropy_variance = population variance of entropy over {window
//               snapshots, response}.
DescriptorVector ExperienceDescriptors(const StateWindowSummary& summary,
                                       int action, double td_error,
                                       double probe_step);

// Mean entropy of the rows of a batch of probability vectors. Throws on an
// empty batch.
double BatchMeanEntropy(const Matrix& probs);

}  // namespace mtr

#endif  // MTR_MONITOR_H_
