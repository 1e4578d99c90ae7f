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

#ifndef MTR_RUNNER_H_
#define MTR_RUNNER_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mtr/config.h"
#include "mtr/metrics.h"
#include "mtr/phase.h"

namespace mtr {

struct RunOptions {
  bool dump_descriptors = false;
  bool enable_sl_regulator = false;
  int parallel = 1;  // Concurrent seed runs.
};

// Name of the marker left in the output directory when a seed fails.
inline constexpr const char* kPartialMarker = "PARTIAL";

// `config` with the command-line switches folded in.
RunConfig ApplyOptions(RunConfig config, const RunOptions& options);

// Writes effective_config.json, one seed_<n>/ directory per seed and
// summary.json under the resolved output directory. Returns 0 on success.
// If any seed throws, the remaining seeds still finish, a PARTIAL marker
// listing the failures is written, summary.json is not, and the return
// value is 1.
int Run(const RunConfig& config, const RunOptions& options, std::ostream& log);

// Rebuilds summary.json from effective_config.json and the seed
// directories under `dir`. Throws FormatError on missing or malformed files.
void Report(const std::filesystem::path& dir);

// Step-to-step variance of a per-step signal: population variance of its
// first differences.
double Reactivity(std::span<const double> signal);

// Mean over the clean->corrupt and corrupt->recover changes of the steps
// until `signal` first crosses the midpoint between its pre-change level
// (mean of the total/10 steps before the change) and its post-change level
// (mean of the final 10% of the following phase). Censored at the phase
// length; 0 when the levels coincide. Changes with an empty following phase
// are skipped.
double AdaptationLag(std::span<const double> signal,
                     const PhaseSchedule& schedule);

struct KSweepRow {
  int64_t k = 0;
  double reactivity = 0.0;      // Mean over seeds.
  double adaptation_lag = 0.0;  // Mean over seeds.
  ReturnSummary performance;
};

// Runs the RL experiment with SD enabled once per K, each as a full run
// under <out>/k_<K>/, and writes <out>/ksweep.csv. Throws ConfigError for
// an empty `k_values` or a non-RL experiment; rethrows seed failures as
// Error after the partial marker is written.
std::vector<KSweepRow> SweepK(const RunConfig& base,
                              std::span<const int64_t> k_values,
                              const RunOptions& options, std::ostream& log);

}  // namespace mtr

#endif  // MTR_RUNNER_H_
