#include "steprl/allocator.hpp"

#include <cmath>
#include <stdexcept>

namespace steprl {

double replacement_probability(double success_rate, double sharpness,
                               double threshold) {
  if (!(success_rate >= 0.0 && success_rate <= 1.0)) {
    throw std::invalid_argument("replacement_probability: rate must lie in [0, 1]");
  }
  if (!(sharpness > 0.0)) {
    throw std::invalid_argument("replacement_probability: sharpness must be positive");
  }
  return 1.0 / (1.0 + std::exp(-sharpness * (success_rate - threshold)));
}

AllocationPlan allocate(const std::vector<TaskId>& tasks,
                        const SuccessRateTable& table,
                        const std::vector<TaskId>& replacement_cache,
                        int copies, double sharpness, Rng& rng,
                        CacheWeighting weighting) {
  if (tasks.empty()) {
    throw std::invalid_argument("allocate needs a nonempty task batch");
  }
  if (copies < 2) {
    throw std::invalid_argument("allocate needs at least two copies per task");
  }

  std::vector<double> cache_weights;
  if (weighting == CacheWeighting::kInverseSuccessRate) {
    cache_weights.reserve(replacement_cache.size());
    for (TaskId task : replacement_cache) {
      // Cache rates are strictly below 1, so the weights stay positive.
      cache_weights.push_back(1.0 - table.success_rate(task));
    }
  }

  AllocationPlan plan;
  plan.slots.reserve(tasks.size() * static_cast<std::size_t>(copies));
  for (TaskId origin : tasks) {
    const double p = replacement_probability(table.success_rate(origin),
                                             sharpness, table.success_threshold);
    for (int copy = 0; copy < copies; ++copy) {
      AllocationSlot slot{origin, origin, false};
      if (copy > 0 && !replacement_cache.empty() && rng.bernoulli(p)) {
        const std::size_t pick =
            weighting == CacheWeighting::kInverseSuccessRate
                ? rng.categorical(cache_weights)
                : rng.uniform_index(replacement_cache.size());
        slot.assigned = replacement_cache[pick];
        slot.replaced = true;
      }
      plan.slots.push_back(slot);
    }
  }
  return plan;
}

AllocationPlan allocate_uniform(const std::vector<TaskId>& tasks, int copies) {
  if (copies < 1) {
    throw std::invalid_argument("allocate_uniform needs at least one copy per task");
  }
  AllocationPlan plan;
  plan.slots.reserve(tasks.size() * static_cast<std::size_t>(copies));
  for (TaskId task : tasks) {
    for (int copy = 0; copy < copies; ++copy) {
      plan.slots.push_back(AllocationSlot{task, task, false});
    }
  }
  return plan;
}

}  // namespace steprl
