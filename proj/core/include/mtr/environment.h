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

#ifndef MTR_ENVIRONMENT_H_
#define MTR_ENVIRONMENT_H_

#include <memory>
#include <string>
#include <vector>

namespace mtr {

struct StepResult {
  int next_state = 0;
  double reward_true = 0.0;
  bool done = false;

  bool operator==(const StepResult&) const = default;
};

// Deterministic, enumerable episodic environment. Episodes start in
// start_state() and end on a terminal transition or after horizon() steps.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::string name() const = 0;
  virtual int num_states() const = 0;
  virtual int num_actions() const = 0;
  virtual int start_state() const = 0;
  virtual int horizon() const = 0;

  // Throws RangeError on an invalid state or action.
  virtual StepResult Step(int state, int action) const = 0;

  // One-hot encoding of `state`; the learner's observation.
  std::vector<double> Observe(int state) const;
};

// 1-D chain: Left/Right moves, walls clamp, terminal reward at the goal.
class ChainEnv final : public Environment {
 public:
  enum Action { kLeft = 0, kRight = 1 };

  struct Options {
    int n_states = 8;
    int goal_state = -1;  // -1: n_states - 1.
    double step_penalty = -0.01;
    double goal_reward = 1.0;
    int horizon = -1;  // -1: 4 * n_states.
  };

  explicit ChainEnv(Options options);

  std::string name() const override { return "chain"; }
  int num_states() const override { return n_states_; }
  int num_actions() const override { return 2; }
  int start_state() const override { return 0; }
  int horizon() const override { return horizon_; }
  StepResult Step(int state, int action) const override;

  int goal_state() const { return goal_state_; }
  double step_penalty() const { return step_penalty_; }
  double goal_reward() const { return goal_reward_; }

 private:
  int n_states_;
  int goal_state_;
  double step_penalty_;
  double goal_reward_;
  int horizon_;
};

// Square grid with four moves (up, right, down, left), goal in the far
// corner, start in state 0 (row 0, column 0).
class GridWorld final : public Environment {
 public:
  struct Options {
    int side = 5;
    double step_penalty = -0.01;
    double goal_reward = 1.0;
    int horizon = -1;  // -1: 4 * side * side.
  };

  explicit GridWorld(Options options);

  std::string name() const override { return "grid"; }
  int num_states() const override { return side_ * side_; }
  int num_actions() const override { return 4; }
  int start_state() const override { return 0; }
  int horizon() const override { return horizon_; }
  StepResult Step(int state, int action) const override;

  int goal_state() const { return side_ * side_ - 1; }

 private:
  int side_;
  double step_penalty_;
  double goal_reward_;
  int horizon_;
};

// Finite-horizon value iteration (undiscounted). values[h][s] is the best
// achievable return from s with h steps remaining.
struct ValueIterationResult {
  std::vector<std::vector<double>> values;
  std::vector<int> greedy_action;  // Greedy action at full horizon.
  double optimal_return = 0.0;     // From start_state() with horizon() steps.
};

ValueIterationResult SolveOptimal(const Environment& env);

// Return of the greedy policy `actions[state]` from the start state, with
// true rewards, stopping at a terminal transition or the horizon.
double RolloutReturn(const Environment& env, const std::vector<int>& actions);

}  // namespace mtr

#endif  // MTR_ENVIRONMENT_H_
