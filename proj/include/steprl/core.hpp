#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

namespace steprl {

// Discrete symbol used for both agent responses and environment observations.
using Token = std::int32_t;

// History cap meaning "keep everything"; used by the trajectory-level
// training path, which never truncates.
inline constexpr std::size_t kUnlimitedHistory =
    std::numeric_limits<std::size_t>::max();

// Stable identifier of a task within a task set.
struct TaskId {
  std::int32_t value = -1;

  friend auto operator<=>(const TaskId&, const TaskId&) = default;
};

// One discrete action from the environment's action alphabet.
struct Action {
  Token token = 0;

  friend auto operator<=>(const Action&, const Action&) = default;
};

// Everything the agent sees when choosing an action: the task, the past
// interaction, and the current observation. Past responses and past
// observations are separate sequences because they are truncated under
// independent caps.
struct State {
  TaskId task;
  std::vector<Token> past_responses;     // oldest first
  std::vector<Token> past_observations;  // oldest first
  Token observation = 0;

  friend bool operator==(const State&, const State&) = default;
};

// A state together with the action taken there.
struct Step {
  State state;
  Action action;

  friend bool operator==(const Step&, const Step&) = default;
};

// A complete episode: the ordered steps plus the terminal scalar reward.
struct Trajectory {
  TaskId task;
  std::vector<Step> steps;
  double reward = 0.0;

  std::size_t length() const { return steps.size(); }

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

// One decomposed training sample. The state history has already been cut to
// the configured caps; `advantage` is the per-step learning signal, and the
// source fields remember which task produced the sample and at what tracked
// success rate.
struct StepSample {
  State state;
  Action action;
  double advantage = 0.0;
  TaskId source_task;
  double source_success_rate = 0.0;

  friend bool operator==(const StepSample&, const StepSample&) = default;
};

// Keeps only the most recent `keep_responses` response tokens and the most
// recent `keep_observations` observation tokens; the task and the current
// observation pass through unchanged. Idempotent under repeated application
// with the same caps.
State truncate_history(const State& state, std::size_t keep_responses,
                       std::size_t keep_observations);

}  // namespace steprl
