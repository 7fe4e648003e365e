#include "steprl/serialize.hpp"

#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace steprl {

void to_json(nlohmann::json& j, const TaskId& task) { j = task.value; }

void from_json(const nlohmann::json& j, TaskId& task) {
  task.value = j.get<std::int32_t>();
}

void to_json(nlohmann::json& j, const Action& action) { j = action.token; }

void from_json(const nlohmann::json& j, Action& action) {
  action.token = j.get<Token>();
}

void to_json(nlohmann::json& j, const State& state) {
  j = nlohmann::json{{"task", state.task},
                     {"responses", state.past_responses},
                     {"observations", state.past_observations},
                     {"observation", state.observation}};
}

void from_json(const nlohmann::json& j, State& state) {
  j.at("task").get_to(state.task);
  j.at("responses").get_to(state.past_responses);
  j.at("observations").get_to(state.past_observations);
  j.at("observation").get_to(state.observation);
}

void to_json(nlohmann::json& j, const Step& step) {
  j = nlohmann::json{{"state", step.state}, {"action", step.action}};
}

void from_json(const nlohmann::json& j, Step& step) {
  j.at("state").get_to(step.state);
  j.at("action").get_to(step.action);
}

void to_json(nlohmann::json& j, const Trajectory& trajectory) {
  j = nlohmann::json{{"task", trajectory.task},
                     {"steps", trajectory.steps},
                     {"reward", trajectory.reward}};
}

void from_json(const nlohmann::json& j, Trajectory& trajectory) {
  j.at("task").get_to(trajectory.task);
  j.at("steps").get_to(trajectory.steps);
  j.at("reward").get_to(trajectory.reward);
  for (const Step& step : trajectory.steps) {
    if (step.state.task != trajectory.task) {
      throw std::invalid_argument(
          "trajectory step belongs to a different task than the trajectory");
    }
  }
}

void to_json(nlohmann::json& j, const StepSample& sample) {
  j = nlohmann::json{{"state", sample.state},
                     {"action", sample.action},
                     {"advantage", sample.advantage},
                     {"source_task", sample.source_task},
                     {"source_success_rate", sample.source_success_rate}};
}

void from_json(const nlohmann::json& j, StepSample& sample) {
  j.at("state").get_to(sample.state);
  j.at("action").get_to(sample.action);
  j.at("advantage").get_to(sample.advantage);
  j.at("source_task").get_to(sample.source_task);
  j.at("source_success_rate").get_to(sample.source_success_rate);
}

void append_jsonl(std::ostream& out, const nlohmann::json& record) {
  out << record.dump() << '\n';
}

std::vector<nlohmann::json> read_jsonl(std::istream& in) {
  std::vector<nlohmann::json> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    records.push_back(nlohmann::json::parse(line));
  }
  return records;
}

}  // namespace steprl
