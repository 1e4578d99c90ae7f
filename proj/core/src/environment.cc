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

#include "mtr/environment.h"

#include <algorithm>
#include <limits>
#include <string>

#include "mtr/errors.h"

namespace mtr {

std::vector<double> Environment::Observe(int state) const {
  if (state < 0 || state >= num_states()) {
    throw RangeError("Observe: invalid state " + std::to_string(state));
  }
  std::vector<double> obs(num_states(), 0.0);
  obs[state] = 1.0;
  return obs;
}

ChainEnv::ChainEnv(Options options)
    : n_states_(options.n_states),
      goal_state_(options.goal_state < 0 ? options.n_states - 1
                                         : options.goal_state),
      step_penalty_(options.step_penalty),
      goal_reward_(options.goal_reward),
      horizon_(options.horizon < 0 ? 4 * options.n_states : options.horizon) {
  if (n_states_ < 3) throw ConfigError("chain: n_states must be >= 3");
  if (goal_state_ <= 0 || goal_state_ >= n_states_) {
    throw ConfigError("chain: goal_state must be in [1, n_states)");
  }
  if (horizon_ < 1) throw ConfigError("chain: horizon must be >= 1");
}

StepResult ChainEnv::Step(int state, int action) const {
  if (state < 0 || state >= n_states_) {
    throw RangeError("chain: invalid state " + std::to_string(state));
  }
  if (action != kLeft && action != kRight) {
    throw RangeError("chain: invalid action " + std::to_string(action));
  }
  const int next = action == kRight ? std::min(state + 1, n_states_ - 1)
                                    : std::max(state - 1, 0);
  if (next == goal_state_) return {next, goal_reward_, true};
  return {next, step_penalty_, false};
}

GridWorld::GridWorld(Options options)
    : side_(options.side),
      step_penalty_(options.step_penalty),
      goal_reward_(options.goal_reward),
      horizon_(options.horizon < 0 ? 4 * options.side * options.side
                                   : options.horizon) {
  if (side_ < 2) throw ConfigError("grid: side must be >= 2");
  if (horizon_ < 1) throw ConfigError("grid: horizon must be >= 1");
}

StepResult GridWorld::Step(int state, int action) const {
  if (state < 0 || state >= side_ * side_) {
    throw RangeError("grid: invalid state " + std::to_string(state));
  }
  if (action < 0 || action > 3) {
    throw RangeError("grid: invalid action " + std::to_string(action));
  }
  int row = state / side_;
  int col = state % side_;
  switch (action) {
    case 0:
      row = std::max(row - 1, 0);
      break;
    case 1:
      col = std::min(col + 1, side_ - 1);
      break;
    case 2:
      row = std::min(row + 1, side_ - 1);
      break;
    default:
      col = std::max(col - 1, 0);
      break;
  }
  const int next = row * side_ + col;
  if (next == goal_state()) return {next, goal_reward_, true};
  return {next, step_penalty_, false};
}

ValueIterationResult SolveOptimal(const Environment& env) {
  const int n = env.num_states();
  const int a_count = env.num_actions();
  const int horizon = env.horizon();
  ValueIterationResult result;
  result.values.assign(horizon + 1, std::vector<double>(n, 0.0));
  result.greedy_action.assign(n, 0);
  for (int h = 1; h <= horizon; ++h) {
    for (int s = 0; s < n; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      int best_action = 0;
      for (int a = 0; a < a_count; ++a) {
        const StepResult r = env.Step(s, a);
        const double q =
            r.reward_true + (r.done ? 0.0 : result.values[h - 1][r.next_state]);
        if (q > best) {
          best = q;
          best_action = a;
        }
      }
      result.values[h][s] = best;
      if (h == horizon) result.greedy_action[s] = best_action;
    }
  }
  result.optimal_return = result.values[horizon][env.start_state()];
  return result;
}

double RolloutReturn(const Environment& env, const std::vector<int>& actions) {
  if (static_cast<int>(actions.size()) != env.num_states()) {
    throw ShapeError("RolloutReturn: one action per state required");
  }
  int state = env.start_state();
  double total = 0.0;
  for (int t = 0; t < env.horizon(); ++t) {
    const StepResult r = env.Step(state, actions[state]);
    total += r.reward_true;
    if (r.done) break;
    state = r.next_state;
  }
  return total;
}

}  // namespace mtr
