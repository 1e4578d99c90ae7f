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

// mtr_lab: run, sweep and re-aggregate trust-regulation experiments.
//
//   mtr_lab run --config rl.yaml --seeds 0..4 --out runs/rl --parallel 2
//   mtr_lab sweep-k --config rl.yaml --k 50,1000,20000
//   mtr_lab report --out runs/rl

#include <CLI11.hpp>
#include <iostream>
#include <string>
#include <vector>

#include "mtr/config.h"
#include "mtr/errors.h"
#include "mtr/runner.h"

namespace {

constexpr int kConfigErrorStatus = 2;

struct Flags {
  std::string config_path;
  std::string seeds;
  std::string out;
  std::vector<int64_t> k_values;
  mtr::RunOptions options;
};

mtr::RunConfig LoadWithOverrides(const Flags& flags) {
  mtr::RunConfig config = mtr::LoadConfig(flags.config_path);
  if (!flags.seeds.empty()) config.seeds = mtr::ParseSeedRange(flags.seeds);
  if (!flags.out.empty()) config.output_dir = flags.out;
  if (!flags.k_values.empty()) config.k_values = flags.k_values;
  config.Validate();
  return config;
}

void AddRunFlags(CLI::App* cmd, Flags& flags) {
  cmd->add_option("--config", flags.config_path, "YAML run config")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--seeds", flags.seeds, "Seed range a..b (inclusive)");
  cmd->add_option("--out", flags.out,
                  "Output directory (default $MTR_LAB_OUT/<experiment>)");
  cmd->add_flag("--dump-descriptors", flags.options.dump_descriptors,
                "Write per-experience descriptors.csv (rl)");
  cmd->add_flag("--enable-sl-regulator", flags.options.enable_sl_regulator,
                "Trust-weight the SL loss");
  cmd->add_option("--parallel", flags.options.parallel,
                  "Seeds run concurrently")
      ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trust-regulated learning experiments"};
  app.require_subcommand(1);
  Flags flags;

  CLI::App* run = app.add_subcommand("run", "Run every seed of a config");
  AddRunFlags(run, flags);

  CLI::App* sweep =
      app.add_subcommand("sweep-k", "Run an rl config once per refit interval");
  AddRunFlags(sweep, flags);
  sweep->add_option("--k", flags.k_values, "Refit intervals (default from config)")
      ->delimiter(',');

  CLI::App* report =
      app.add_subcommand("report", "Rebuild summary.json from seed directories");
  report->add_option("--out", flags.out, "Run output directory")
      ->required()
      ->check(CLI::ExistingDirectory);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return mtr::Run(LoadWithOverrides(flags), flags.options, std::cout);
    }
    if (sweep->parsed()) {
      const mtr::RunConfig config = LoadWithOverrides(flags);
      const auto rows =
          mtr::SweepK(config, config.k_values, flags.options, std::cout);
      for (const auto& row : rows) {
        std::cout << "K=" << row.k << " reactivity=" << row.reactivity
                  << " lag=" << row.adaptation_lag
                  << " mean=" << row.performance.mean << '\n';
      }
      return 0;
    }
    mtr::Report(flags.out);
    std::cout << "wrote " << flags.out << "/summary.json\n";
    return 0;
  } catch (const mtr::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigErrorStatus;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
