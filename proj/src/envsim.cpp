#include "steprl/envsim.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "steprl/serialize.hpp"

namespace steprl {

namespace {

// Progress values live in [0, length]; keeping lengths under the stride
// keeps observation tokens unique across tasks.
constexpr int kObservationStride = 1024;

// Stream tag separating suite generation from every other consumer of the
// seed-derivation scheme.
constexpr std::uint64_t kSuiteSeedStream = 0x517e5;

}  // namespace

void SyntheticTaskSpec::validate() const {
  if (task.value < 0) {
    throw std::invalid_argument("task spec needs a non-negative id");
  }
  if (target_sequence.empty()) {
    throw std::invalid_argument("task spec needs a nonempty target sequence");
  }
  if (length() >= kObservationStride) {
    throw std::invalid_argument("task spec target sequence is too long");
  }
  if (alphabet_size < 2) {
    throw std::invalid_argument("task spec needs an alphabet of at least 2");
  }
  for (const Action& action : target_sequence) {
    if (action.token < 0 || action.token >= alphabet_size) {
      throw std::invalid_argument("task spec target action outside the alphabet");
    }
  }
  if (mistake_tolerance < 0) {
    throw std::invalid_argument("task spec mistake tolerance must be non-negative");
  }
  if (step_cap < 0) {
    throw std::invalid_argument("task spec step cap must be non-negative");
  }
  if (effective_step_cap() < length()) {
    throw std::invalid_argument("task spec step cap leaves the task unsolvable");
  }
}

Token observation_token(TaskId task, int progress) {
  return static_cast<Token>(task.value) * kObservationStride +
         static_cast<Token>(progress);
}

Environment::Environment(std::vector<SyntheticTaskSpec> suite)
    : suite_(std::move(suite)) {
  if (suite_.empty()) {
    throw std::invalid_argument("environment needs at least one task");
  }
  std::sort(suite_.begin(), suite_.end(),
            [](const SyntheticTaskSpec& a, const SyntheticTaskSpec& b) {
              return a.task < b.task;
            });
  alphabet_size_ = suite_.front().alphabet_size;
  for (std::size_t i = 0; i < suite_.size(); ++i) {
    suite_[i].validate();
    if (i > 0 && suite_[i].task == suite_[i - 1].task) {
      throw std::invalid_argument("environment suite has duplicate task ids");
    }
    if (suite_[i].alphabet_size != alphabet_size_) {
      throw std::invalid_argument(
          "environment suite must share one alphabet size across tasks");
    }
  }
}

const SyntheticTaskSpec& Environment::spec(TaskId task) const {
  const auto it = std::lower_bound(
      suite_.begin(), suite_.end(), task,
      [](const SyntheticTaskSpec& s, TaskId id) { return s.task < id; });
  if (it == suite_.end() || it->task != task) {
    throw std::invalid_argument("environment: unknown task id " +
                                std::to_string(task.value));
  }
  return *it;
}

std::vector<TaskId> Environment::task_ids() const {
  std::vector<TaskId> ids;
  ids.reserve(suite_.size());
  for (const SyntheticTaskSpec& s : suite_) {
    ids.push_back(s.task);
  }
  return ids;
}

EpisodeState Environment::reset(TaskId task) const {
  const SyntheticTaskSpec& s = spec(task);
  EpisodeState episode;
  episode.spec = s;
  episode.state.task = s.task;
  episode.state.observation = observation_token(s.task, 0);
  return episode;
}

EnvStepResult Environment::step(const EpisodeState& episode, const Action& action) {
  if (episode.done) {
    throw std::logic_error("step() called on a finished episode");
  }
  if (action.token < 0 || action.token >= episode.spec.alphabet_size) {
    throw std::invalid_argument("step() action outside the alphabet");
  }
  interactions_.fetch_add(1, std::memory_order_relaxed);

  EpisodeState next = episode;
  if (action == episode.spec.target_sequence[static_cast<std::size_t>(episode.progress)]) {
    next.progress += 1;
  } else {
    next.mistakes += 1;
  }
  next.state.past_responses.push_back(action.token);
  next.state.past_observations.push_back(episode.state.observation);
  next.state.observation = observation_token(episode.spec.task, next.progress);

  EnvStepResult result;
  if (next.progress == episode.spec.length()) {
    next.done = true;
    next.success = true;
    result.reward = 1.0;
  } else if (next.mistakes > episode.spec.mistake_tolerance) {
    next.done = true;
  } else if (next.turns() >= episode.spec.effective_step_cap()) {
    next.done = true;
  }
  result.done = next.done;
  result.episode = std::move(next);
  return result;
}

std::vector<int> default_length_pattern() { return {2, 2, 3, 3, 4, 5, 6, 8}; }

std::vector<SyntheticTaskSpec> generate_suite(int task_count, int alphabet_size,
                                              int mistake_tolerance,
                                              const std::vector<int>& length_pattern,
                                              std::uint64_t seed) {
  if (task_count < 1) {
    throw std::invalid_argument("generate_suite needs at least one task");
  }
  if (alphabet_size < 2) {
    throw std::invalid_argument("generate_suite needs an alphabet of at least 2");
  }
  if (length_pattern.empty()) {
    throw std::invalid_argument("generate_suite needs a nonempty length pattern");
  }
  for (int length : length_pattern) {
    if (length < 1 || length >= kObservationStride) {
      throw std::invalid_argument("generate_suite length pattern entry out of range");
    }
  }

  std::vector<SyntheticTaskSpec> suite;
  suite.reserve(static_cast<std::size_t>(task_count));
  for (int i = 0; i < task_count; ++i) {
    const int length = length_pattern[static_cast<std::size_t>(i) % length_pattern.size()];
    Rng rng(derive_seed(seed, kSuiteSeedStream, static_cast<std::uint64_t>(i)));
    SyntheticTaskSpec spec;
    spec.task = TaskId{i};
    spec.alphabet_size = alphabet_size;
    spec.mistake_tolerance = mistake_tolerance;
    spec.target_sequence.reserve(static_cast<std::size_t>(length));
    for (int t = 0; t < length; ++t) {
      spec.target_sequence.push_back(
          Action{static_cast<Token>(rng.uniform_index(static_cast<std::size_t>(alphabet_size)))});
    }
    spec.validate();
    suite.push_back(std::move(spec));
  }
  return suite;
}

namespace {

void to_json(nlohmann::json& j, const SyntheticTaskSpec& spec) {
  j = nlohmann::json{{"id", spec.task},
                     {"target", spec.target_sequence},
                     {"alphabet_size", spec.alphabet_size},
                     {"mistake_tolerance", spec.mistake_tolerance},
                     {"step_cap", spec.step_cap}};
}

SyntheticTaskSpec spec_from_json(const nlohmann::json& j) {
  SyntheticTaskSpec spec;
  j.at("id").get_to(spec.task);
  j.at("target").get_to(spec.target_sequence);
  j.at("alphabet_size").get_to(spec.alphabet_size);
  j.at("mistake_tolerance").get_to(spec.mistake_tolerance);
  spec.step_cap = j.value("step_cap", 0);
  spec.validate();
  return spec;
}

}  // namespace

void save_suite(const std::string& path,
                const std::vector<SyntheticTaskSpec>& suite) {
  nlohmann::json tasks = nlohmann::json::array();
  for (const SyntheticTaskSpec& spec : suite) {
    nlohmann::json j;
    to_json(j, spec);
    tasks.push_back(std::move(j));
  }
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write task suite to " + path);
  }
  out << nlohmann::json{{"tasks", tasks}}.dump(2) << '\n';
}

std::vector<SyntheticTaskSpec> load_suite(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot read task suite from " + path);
  }
  const nlohmann::json doc = nlohmann::json::parse(in);
  std::vector<SyntheticTaskSpec> suite;
  for (const nlohmann::json& j : doc.at("tasks")) {
    suite.push_back(spec_from_json(j));
  }
  if (suite.empty()) {
    throw std::invalid_argument("task suite file has no tasks");
  }
  return suite;
}

}  // namespace steprl
