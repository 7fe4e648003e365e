#pragma once

#include <atomic>
#include <cstdint>
#include <string>
#include <vector>

#include "steprl/core.hpp"
#include "steprl/rng.hpp"

namespace steprl {

// One synthetic task: reproduce `target_sequence` in order. Difficulty comes
// from the sequence length and the alphabet size; up to `mistake_tolerance`
// wrong actions are absorbed before the episode fails.
struct SyntheticTaskSpec {
  TaskId task;
  std::vector<Action> target_sequence;
  int alphabet_size = 2;
  int mistake_tolerance = 0;
  int step_cap = 0;  // 0 means the default of 2 * length + 2

  int length() const { return static_cast<int>(target_sequence.size()); }
  int effective_step_cap() const {
    return step_cap > 0 ? step_cap : 2 * length() + 2;
  }
  void validate() const;

  friend bool operator==(const SyntheticTaskSpec&, const SyntheticTaskSpec&) = default;
};

// A running episode. Episodes are plain values; stepping one produces the
// next value and leaves the input untouched.
struct EpisodeState {
  SyntheticTaskSpec spec;
  State state;       // what the agent currently sees
  int progress = 0;  // target actions matched so far
  int mistakes = 0;
  bool done = false;
  bool success = false;

  int turns() const { return progress + mistakes; }
};

struct EnvStepResult {
  EpisodeState episode;
  double reward = 0.0;
  bool done = false;
};

// Observation the agent sees at (task, progress). Encodes nothing about past
// mistakes, so two histories that reached the same progress look identical
// going forward.
Token observation_token(TaskId task, int progress);

// Deterministic multi-turn environment over a task suite. The environment
// owns the suite and a monotone counter of step() calls; everything episodic
// lives in EpisodeState values.
class Environment {
 public:
  explicit Environment(std::vector<SyntheticTaskSpec> suite);

  const std::vector<SyntheticTaskSpec>& suite() const { return suite_; }
  const SyntheticTaskSpec& spec(TaskId task) const;
  std::vector<TaskId> task_ids() const;
  int alphabet_size() const { return alphabet_size_; }

  EpisodeState reset(TaskId task) const;

  // Applies one action: the correct next target action advances progress,
  // anything else counts as a mistake. The action and the observation it was
  // taken under are appended to the episode's history. Reward is 0.0 until
  // termination and 1.0 exactly when the full target sequence completes
  // within the mistake and step caps.
  EnvStepResult step(const EpisodeState& episode, const Action& action);

  // Total step() calls served since construction.
  std::int64_t interaction_count() const {
    return interactions_.load(std::memory_order_relaxed);
  }

 private:
  std::vector<SyntheticTaskSpec> suite_;  // sorted by task id
  int alphabet_size_ = 0;
  std::atomic<std::int64_t> interactions_{0};
};

// Fixed mix of target lengths used by the built-in suite; repeats to fill
// whatever task count is requested.
std::vector<int> default_length_pattern();

// Deterministic suite of `task_count` tasks with ids 0..task_count-1. Target
// sequences are drawn from a generator derived from `seed` alone, so the
// same arguments always produce the same suite.
std::vector<SyntheticTaskSpec> generate_suite(int task_count, int alphabet_size,
                                              int mistake_tolerance,
                                              const std::vector<int>& length_pattern,
                                              std::uint64_t seed);

void save_suite(const std::string& path,
                const std::vector<SyntheticTaskSpec>& suite);
std::vector<SyntheticTaskSpec> load_suite(const std::string& path);

}  // namespace steprl
