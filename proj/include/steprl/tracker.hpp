#pragma once

#include <map>
#include <vector>

#include "steprl/core.hpp"

namespace steprl {

// Per-task success statistics: the smoothed estimate plus the raw counts
// from the most recent round.
struct TaskRecord {
  TaskId task;
  double success_rate = 0.0;  // smoothed estimate in [0, 1]
  int sampled = 0;            // trajectories collected for this task last round
  int successes = 0;          // how many of those succeeded
};

// Trajectories collected and succeeded for one task in one round.
struct RoundCounts {
  int sampled = 0;
  int successes = 0;
};

// Success-rate record for a whole task set: one entry per task, sorted by
// task id, plus the round index and the parameters the estimates were
// produced under. `group_size` is the nominal per-task rollout count N that
// anchors the smoothing; `success_threshold` is the upper bound below which
// a task still counts as unmastered.
struct SuccessRateTable {
  std::vector<TaskRecord> records;
  int round = 0;
  int group_size = 0;
  double success_threshold = 0.0;

  const TaskRecord* find(TaskId task) const;

  // Smoothed estimate for `task`; throws for unknown ids.
  double success_rate(TaskId task) const;
};

SuccessRateTable init_table(const std::vector<TaskId>& tasks, int group_size,
                            double success_threshold, double initial_rate);

// One smoothing step, applied once per round:
//
//   discount = 1 - n/N   when n < N, else 0
//   s'       = (u + discount * s * N) / (n + discount * N)
//
// where n and u are the round's sampled/successful counts for the task and N
// is the table's group size. A task with the full N fresh trajectories
// replaces its estimate outright; a task with none keeps it unchanged.
// Returns a new table with the round index advanced by one.
SuccessRateTable update_round(const SuccessRateTable& table,
                              const std::map<TaskId, RoundCounts>& counts);

// Tasks in the intermediate band 0 < rate < success_threshold, ascending by
// id. These are the tasks worth extra rollouts: started but not mastered.
std::vector<TaskId> cache(const SuccessRateTable& table);

}  // namespace steprl
