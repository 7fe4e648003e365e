#pragma once

#include <vector>

#include "steprl/core.hpp"
#include "steprl/rng.hpp"
#include "steprl/tracker.hpp"

namespace steprl {

// One rollout slot in a round's collection budget. `origin` is the batch
// task the slot was expanded from; `assigned` is the task whose trajectory
// the slot will actually collect.
struct AllocationSlot {
  TaskId origin;
  TaskId assigned;
  bool replaced = false;
};

// The full rollout budget for one round: batch tasks times copies-per-task
// slots, in batch order.
struct AllocationPlan {
  std::vector<AllocationSlot> slots;
  int round = 0;
};

// How replacement targets are drawn from the cache.
enum class CacheWeighting {
  kUniform,
  kInverseSuccessRate,  // weight 1 - rate, favoring harder cache tasks
};

// Probability that a single expendable copy of a task is redirected:
//
//   p = 1 / (1 + exp(-sharpness * (rate - threshold)))
//
// Strictly increasing in `rate` and exactly 0.5 at the threshold, so
// well-mastered tasks give up most of their budget while struggling ones
// keep it.
double replacement_probability(double success_rate, double sharpness,
                               double threshold);

// Expands each batch task into `copies` slots. The first copy of every task
// is always kept so no task goes unmeasured; each remaining copy is
// redirected with the logistic probability of the origin's tracked success
// rate to a task drawn from `replacement_cache`. An empty cache leaves the
// plan untouched. The threshold used by the logistic is the table's.
AllocationPlan allocate(const std::vector<TaskId>& tasks,
                        const SuccessRateTable& table,
                        const std::vector<TaskId>& replacement_cache,
                        int copies, double sharpness, Rng& rng,
                        CacheWeighting weighting = CacheWeighting::kUniform);

// Uniform baseline: every task gets exactly `copies` slots, no replacement.
AllocationPlan allocate_uniform(const std::vector<TaskId>& tasks, int copies);

}  // namespace steprl
