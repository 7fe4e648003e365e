#include "steprl/tracker.hpp"

#include <algorithm>
#include <stdexcept>

namespace steprl {

const TaskRecord* SuccessRateTable::find(TaskId task) const {
  const auto it = std::lower_bound(
      records.begin(), records.end(), task,
      [](const TaskRecord& record, TaskId id) { return record.task < id; });
  if (it == records.end() || it->task != task) {
    return nullptr;
  }
  return &*it;
}

double SuccessRateTable::success_rate(TaskId task) const {
  const TaskRecord* record = find(task);
  if (record == nullptr) {
    throw std::invalid_argument("success_rate: unknown task id " +
                                std::to_string(task.value));
  }
  return record->success_rate;
}

SuccessRateTable init_table(const std::vector<TaskId>& tasks, int group_size,
                            double success_threshold, double initial_rate) {
  if (tasks.empty()) {
    throw std::invalid_argument("init_table needs at least one task");
  }
  if (group_size < 2) {
    throw std::invalid_argument("init_table needs a group size of at least 2");
  }
  if (!(success_threshold > 0.0 && success_threshold < 1.0)) {
    throw std::invalid_argument("success threshold must lie strictly in (0, 1)");
  }
  if (!(initial_rate >= 0.0 && initial_rate <= 1.0)) {
    throw std::invalid_argument("initial success rate must lie in [0, 1]");
  }

  SuccessRateTable table;
  table.group_size = group_size;
  table.success_threshold = success_threshold;
  table.records.reserve(tasks.size());
  for (TaskId task : tasks) {
    table.records.push_back(TaskRecord{task, initial_rate, 0, 0});
  }
  std::sort(table.records.begin(), table.records.end(),
            [](const TaskRecord& a, const TaskRecord& b) { return a.task < b.task; });
  const auto duplicate = std::adjacent_find(
      table.records.begin(), table.records.end(),
      [](const TaskRecord& a, const TaskRecord& b) { return a.task == b.task; });
  if (duplicate != table.records.end()) {
    throw std::invalid_argument("init_table: duplicate task id " +
                                std::to_string(duplicate->task.value));
  }
  return table;
}

SuccessRateTable update_round(const SuccessRateTable& table,
                              const std::map<TaskId, RoundCounts>& counts) {
  for (const auto& [task, c] : counts) {
    if (table.find(task) == nullptr) {
      throw std::invalid_argument("update_round: counts reference unknown task id " +
                                  std::to_string(task.value));
    }
    if (c.sampled < 0 || c.successes < 0) {
      throw std::invalid_argument("update_round: negative counts");
    }
    if (c.successes > c.sampled) {
      throw std::invalid_argument(
          "update_round: more successes than sampled trajectories");
    }
  }

  SuccessRateTable out = table;
  const double nominal = static_cast<double>(table.group_size);
  for (TaskRecord& record : out.records) {
    const auto it = counts.find(record.task);
    const int sampled = it == counts.end() ? 0 : it->second.sampled;
    const int successes = it == counts.end() ? 0 : it->second.successes;
    if (sampled == 0) {
      // exact identity, not (s*N)/N, which can drift a unit in the last place
      record.sampled = 0;
      record.successes = 0;
      continue;
    }
    const double discount =
        sampled < table.group_size
            ? 1.0 - static_cast<double>(sampled) / nominal
            : 0.0;
    record.success_rate = (static_cast<double>(successes) +
                           discount * record.success_rate * nominal) /
                          (static_cast<double>(sampled) + discount * nominal);
    record.sampled = sampled;
    record.successes = successes;
  }
  out.round = table.round + 1;
  return out;
}

std::vector<TaskId> cache(const SuccessRateTable& table) {
  std::vector<TaskId> tasks;
  for (const TaskRecord& record : table.records) {
    if (record.success_rate > 0.0 &&
        record.success_rate < table.success_threshold) {
      tasks.push_back(record.task);
    }
  }
  return tasks;
}

}  // namespace steprl
