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

#ifndef MTR_CONFIG_H_
#define MTR_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mtr/belief.h"
#include "mtr/rl_trainer.h"
#include "mtr/sl_trainer.h"

namespace mtr {

enum class ExperimentKind { kRl, kSl, kBelief };

std::string_view ExperimentName(ExperimentKind kind);
ExperimentKind ParseExperiment(std::string_view name);

// Everything needed to reproduce a batch of runs. The `sd` section of the
// document fills rl.sd; sd.enabled also switches trust weighting on for the
// belief experiment.
struct RunConfig {
  ExperimentKind experiment = ExperimentKind::kRl;
  RlConfig rl;
  SlConfig sl;
  BeliefConfig belief;
  std::vector<uint64_t> seeds{0, 1, 2, 3, 4};
  // Empty: $MTR_LAB_OUT/<experiment>, or runs/<experiment> when unset.
  std::string output_dir;
  std::vector<int64_t> k_values{50, 1000, 20000};

  bool SdEnabled() const { return rl.sd.enabled; }
  std::filesystem::path ResolvedOutputDir() const;
  void Validate() const;
  bool operator==(const RunConfig&) const = default;
};

// Parses a YAML document. Omitted keys take their defaults. Throws
// ConfigError with a "line N:" prefix on unknown keys, type mismatches and
// failed validation.
RunConfig ParseConfig(std::string_view text);
RunConfig LoadConfig(const std::filesystem::path& path);

// The effective config as JSON (itself valid YAML), every field explicit.
std::string EmitConfig(const RunConfig& config);

// Parses "a..b" (inclusive) or a single seed.
std::vector<uint64_t> ParseSeedRange(std::string_view text);

}  // namespace mtr

#endif  // MTR_CONFIG_H_
