#include "steprl/harness.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>

#include "steprl/serialize.hpp"

namespace steprl {

namespace {

// Seed-stream tags keeping the round's independent random consumers apart.
constexpr std::uint64_t kSeedAllocate = 1;
constexpr std::uint64_t kSeedRollout = 2;
constexpr std::uint64_t kSeedAugment = 3;

// The built-in suite is fixed (independent of the run seed) so different
// seeds and methods always face the same tasks.
constexpr std::uint64_t kDefaultSuiteSeed = 20250815;
constexpr int kDefaultSuiteTasks = 64;
constexpr int kDefaultSuiteAlphabet = 5;
// Two absorbed mistakes per episode: failed trajectories then still contain
// several correct steps, which is what separates step-level credit from
// trajectory-broadcast credit on this suite.
constexpr int kDefaultSuiteTolerance = 2;

// Rounds per config when not set explicitly: enough passes over the suite
// for the slowest methods to converge at this scale.
constexpr int kDefaultSuitePasses = 8;

constexpr double kHighSuccessCutoff = 0.8;
constexpr double kTasksAboveThreshold = 0.6;

}  // namespace

Method parse_method(const std::string& name) {
  if (name == "tgrpo") return Method::kTgrpo;
  if (name == "gigrpo") return Method::kGigrpo;
  if (name == "step") return Method::kStep;
  if (name == "step_no_srsampling") return Method::kStepNoSrSampling;
  if (name == "step_no_stepaug") return Method::kStepNoStepAug;
  if (name == "step_no_both") return Method::kStepNoBoth;
  throw std::invalid_argument(
      "unknown method '" + name +
      "' (expected tgrpo, gigrpo, step, step_no_srsampling, step_no_stepaug "
      "or step_no_both)");
}

std::string method_name(Method method) {
  switch (method) {
    case Method::kTgrpo: return "tgrpo";
    case Method::kGigrpo: return "gigrpo";
    case Method::kStep: return "step";
    case Method::kStepNoSrSampling: return "step_no_srsampling";
    case Method::kStepNoStepAug: return "step_no_stepaug";
    case Method::kStepNoBoth: return "step_no_both";
  }
  throw std::invalid_argument("unknown method enum value");
}

bool method_uses_sr_sampling(Method method) {
  return method == Method::kStep || method == Method::kStepNoStepAug;
}

bool method_uses_augmentation(Method method) {
  return method == Method::kStep || method == Method::kStepNoSrSampling;
}

bool method_uses_success_only(Method method) {
  return method != Method::kTgrpo && method != Method::kGigrpo;
}

bool method_truncates_history(Method method) {
  return method != Method::kTgrpo;
}

void RunConfig::validate() const {
  if (group_size < 2) {
    throw std::invalid_argument("group_size must be at least 2");
  }
  if (method_uses_augmentation(method) && group_size < 4) {
    throw std::invalid_argument(
        "augmenting methods need group_size of at least 4");
  }
  if (batch_tasks < 1) {
    throw std::invalid_argument("batch_tasks must be at least 1");
  }
  if (rounds < -1) {
    throw std::invalid_argument("rounds must be -1 (auto) or non-negative");
  }
  if (!(success_threshold > 0.0 && success_threshold < 1.0)) {
    throw std::invalid_argument("success_threshold must lie strictly in (0, 1)");
  }
  if (!(low_success_threshold >= 0.0 && low_success_threshold <= 1.0)) {
    throw std::invalid_argument("low_success_threshold must lie in [0, 1]");
  }
  if (!(replacement_sharpness > 0.0)) {
    throw std::invalid_argument("replacement_sharpness must be positive");
  }
  if (!(initial_success_rate >= 0.0 && initial_success_rate <= 1.0)) {
    throw std::invalid_argument("initial_success_rate must lie in [0, 1]");
  }
  if (history_responses < 0 || history_observations < 0) {
    throw std::invalid_argument("history caps must be non-negative");
  }
  if (!(learning_rate > 0.0)) {
    throw std::invalid_argument("learning_rate must be positive");
  }
  if (!(clip_epsilon > 0.0 && clip_epsilon < 1.0)) {
    throw std::invalid_argument("clip_epsilon must lie strictly in (0, 1)");
  }
  if (!(kl_coefficient >= 0.0)) {
    throw std::invalid_argument("kl_coefficient must be non-negative");
  }
  if (!(temperature_train > 0.0)) {
    throw std::invalid_argument("temperature_train must be positive");
  }
  if (!(temperature_eval >= 0.0)) {
    throw std::invalid_argument("temperature_eval must be non-negative");
  }
  if (minibatch_size < 1) {
    throw std::invalid_argument("minibatch_size must be at least 1");
  }
  if (eval_every < 1) {
    throw std::invalid_argument("eval_every must be at least 1");
  }
  if (max_aug_groups < 0) {
    throw std::invalid_argument("max_aug_groups must be non-negative");
  }
  if (metric_window < 1) {
    throw std::invalid_argument("metric_window must be at least 1");
  }
}

UpdateConfig RunConfig::update_config() const {
  UpdateConfig config;
  config.learning_rate = learning_rate;
  config.clip_epsilon = clip_epsilon;
  config.kl_coefficient = kl_coefficient;
  config.temperature_train = temperature_train;
  config.temperature_eval = temperature_eval;
  config.minibatch_size = minibatch_size;
  return config;
}

int RunConfig::resolve_rounds(std::size_t suite_size) const {
  if (rounds >= 0) {
    return rounds;
  }
  const std::size_t batches_per_pass =
      std::max<std::size_t>(1, suite_size / static_cast<std::size_t>(batch_tasks));
  return static_cast<int>(batches_per_pass) * kDefaultSuitePasses;
}

namespace {

CacheWeighting parse_cache_weighting(const std::string& name) {
  if (name == "uniform") return CacheWeighting::kUniform;
  if (name == "inverse_success_rate") return CacheWeighting::kInverseSuccessRate;
  throw std::invalid_argument("unknown cache_weighting '" + name +
                              "' (expected uniform or inverse_success_rate)");
}

std::string cache_weighting_name(CacheWeighting weighting) {
  return weighting == CacheWeighting::kUniform ? "uniform"
                                               : "inverse_success_rate";
}

}  // namespace

RunConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) {
    throw std::invalid_argument("run config must be a JSON object");
  }
  RunConfig config;
  for (const auto& [key, value] : j.items()) {
    if (key == "method") {
      config.method = parse_method(value.get<std::string>());
    } else if (key == "group_size") {
      config.group_size = value.get<int>();
    } else if (key == "batch_tasks") {
      config.batch_tasks = value.get<int>();
    } else if (key == "rounds") {
      config.rounds = value.get<int>();
    } else if (key == "seed") {
      config.seed = value.get<std::uint64_t>();
    } else if (key == "success_threshold") {
      config.success_threshold = value.get<double>();
    } else if (key == "low_success_threshold") {
      config.low_success_threshold = value.get<double>();
    } else if (key == "replacement_sharpness") {
      config.replacement_sharpness = value.get<double>();
    } else if (key == "initial_success_rate") {
      config.initial_success_rate = value.get<double>();
    } else if (key == "cache_weighting") {
      config.cache_weighting = parse_cache_weighting(value.get<std::string>());
    } else if (key == "history_responses") {
      config.history_responses = value.get<int>();
    } else if (key == "history_observations") {
      config.history_observations = value.get<int>();
    } else if (key == "learning_rate") {
      config.learning_rate = value.get<double>();
    } else if (key == "clip_epsilon") {
      config.clip_epsilon = value.get<double>();
    } else if (key == "kl_coefficient") {
      config.kl_coefficient = value.get<double>();
    } else if (key == "temperature_train") {
      config.temperature_train = value.get<double>();
    } else if (key == "temperature_eval") {
      config.temperature_eval = value.get<double>();
    } else if (key == "minibatch_size") {
      config.minibatch_size = value.get<int>();
    } else if (key == "eval_every") {
      config.eval_every = value.get<int>();
    } else if (key == "max_aug_groups") {
      config.max_aug_groups = value.get<int>();
    } else if (key == "metric_window") {
      config.metric_window = value.get<int>();
    } else if (key == "task_suite") {
      config.task_suite = value.get<std::string>();
    } else if (key == "out_dir") {
      config.out_dir = value.get<std::string>();
    } else if (key == "checkpoint_out") {
      config.checkpoint_out = value.get<std::string>();
    } else if (key == "log_plans") {
      config.log_plans = value.get<bool>();
    } else if (key == "log_trajectories") {
      config.log_trajectories = value.get<bool>();
    } else {
      throw std::invalid_argument("unknown run config key '" + key + "'");
    }
  }
  config.validate();
  return config;
}

nlohmann::json config_to_json(const RunConfig& config) {
  return nlohmann::json{
      {"method", method_name(config.method)},
      {"group_size", config.group_size},
      {"batch_tasks", config.batch_tasks},
      {"rounds", config.rounds},
      {"seed", config.seed},
      {"success_threshold", config.success_threshold},
      {"low_success_threshold", config.low_success_threshold},
      {"replacement_sharpness", config.replacement_sharpness},
      {"initial_success_rate", config.initial_success_rate},
      {"cache_weighting", cache_weighting_name(config.cache_weighting)},
      {"history_responses", config.history_responses},
      {"history_observations", config.history_observations},
      {"learning_rate", config.learning_rate},
      {"clip_epsilon", config.clip_epsilon},
      {"kl_coefficient", config.kl_coefficient},
      {"temperature_train", config.temperature_train},
      {"temperature_eval", config.temperature_eval},
      {"minibatch_size", config.minibatch_size},
      {"eval_every", config.eval_every},
      {"max_aug_groups", config.max_aug_groups},
      {"metric_window", config.metric_window},
      {"task_suite", config.task_suite},
      {"out_dir", config.out_dir},
      {"checkpoint_out", config.checkpoint_out},
      {"log_plans", config.log_plans},
      {"log_trajectories", config.log_trajectories},
  };
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot read run config from " + path);
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("malformed run config " + path + ": " + e.what());
  }
  return config_from_json(j);
}

nlohmann::json report_to_json(const RoundReport& report, bool include_plan) {
  nlohmann::json j{{"round", report.round},
                   {"task_ids", report.task_ids},
                   {"sampled", report.sampled},
                   {"successes", report.successes},
                   {"success_rates", report.success_rates},
                   {"tasks_above_60", report.tasks_above_60},
                   {"high_success_fraction", report.high_success_fraction},
                   {"env_steps", report.env_steps},
                   {"inference_calls", report.inference_calls},
                   {"train_samples", report.train_samples},
                   {"aug",
                    {{"groups", report.aug_groups},
                     {"inert_groups", report.aug_inert_groups},
                     {"inference_calls", report.aug_inference_calls},
                     {"env_steps", report.aug_env_steps}}}};
  if (include_plan) {
    nlohmann::json origin = nlohmann::json::array();
    nlohmann::json assigned = nlohmann::json::array();
    nlohmann::json replaced = nlohmann::json::array();
    for (const AllocationSlot& slot : report.plan.slots) {
      origin.push_back(slot.origin);
      assigned.push_back(slot.assigned);
      replaced.push_back(slot.replaced);
    }
    j["plan"] = nlohmann::json{{"origin", std::move(origin)},
                               {"assigned", std::move(assigned)},
                               {"replaced", std::move(replaced)}};
  }
  if (report.eval.has_value()) {
    j["eval"] = nlohmann::json{{"success_rate", report.eval->success_rate},
                               {"solved_tasks", report.eval->solved_tasks}};
  }
  return j;
}

nlohmann::json summary_to_json(const ExperimentSummary& summary) {
  return nlohmann::json{
      {"method", summary.method},
      {"seed", summary.seed},
      {"rounds", summary.rounds},
      {"suite_size", summary.suite_size},
      {"final_tasks_above_60", summary.final_tasks_above_60},
      {"final_mean_success_rate", summary.final_mean_success_rate},
      {"final_eval_success_rate", summary.final_eval_success_rate},
      {"final_eval_solved_tasks", summary.final_eval_solved_tasks},
      {"tasks_above_60_auc", summary.tasks_above_60_auc},
      {"total_env_steps", summary.total_env_steps},
      {"total_inference_calls", summary.total_inference_calls},
      {"total_aug_env_steps", summary.total_aug_env_steps},
      {"total_aug_groups", summary.total_aug_groups},
  };
}

std::vector<SyntheticTaskSpec> default_task_suite() {
  return generate_suite(kDefaultSuiteTasks, kDefaultSuiteAlphabet,
                        kDefaultSuiteTolerance, default_length_pattern(),
                        kDefaultSuiteSeed);
}

std::vector<TaskId> round_batch(const std::vector<TaskId>& all_tasks,
                                int batch_tasks, int round) {
  if (all_tasks.empty()) {
    throw std::invalid_argument("round_batch needs a nonempty task set");
  }
  if (batch_tasks < 1) {
    throw std::invalid_argument("round_batch needs a positive batch size");
  }
  if (round < 0) {
    throw std::invalid_argument("round_batch needs a non-negative round");
  }
  const std::size_t n = all_tasks.size();
  const std::size_t batch = std::min<std::size_t>(static_cast<std::size_t>(batch_tasks), n);
  const std::size_t start = (static_cast<std::size_t>(round) * batch) % n;
  std::vector<TaskId> out;
  out.reserve(batch);
  for (std::size_t i = 0; i < batch; ++i) {
    out.push_back(all_tasks[(start + i) % n]);
  }
  return out;
}

Trajectory rollout(Environment& env, const SyntheticTaskSpec& spec,
                   const Policy& policy, double temperature, Rng& rng) {
  Trajectory trajectory;
  trajectory.task = spec.task;
  EpisodeState episode = env.reset(spec.task);
  while (!episode.done) {
    const Action action = policy.sample_action(episode.state, temperature, rng);
    trajectory.steps.push_back(Step{episode.state, action});
    EnvStepResult result = env.step(episode, action);
    trajectory.reward = result.reward;
    episode = std::move(result.episode);
  }
  return trajectory;
}

AugmentationOutcome augment_samples(std::vector<StepSample> samples,
                                    const Policy& policy, int group_size,
                                    double temperature, double low_threshold,
                                    int max_groups, Rng& rng) {
  if (!(low_threshold >= 0.0 && low_threshold <= 1.0)) {
    throw std::invalid_argument("low threshold must lie in [0, 1]");
  }
  AugmentationOutcome out;
  out.samples.reserve(samples.size());
  for (StepSample& sample : samples) {
    const bool eligible =
        sample.source_success_rate <= low_threshold && out.groups < max_groups;
    if (!eligible) {
      out.samples.push_back(std::move(sample));
      continue;
    }
    Rng group_rng = rng.fork(static_cast<std::uint64_t>(out.groups));
    AugmentationGroup group =
        build_group(sample, policy, group_size, temperature, group_rng);
    group.advantages = aug_advantages(group);
    out.inference_calls += static_cast<std::int64_t>(inference_count(group));
    out.inert_groups += is_inert(group) ? 1 : 0;
    out.groups += 1;
    // The reference sample is replaced by its whole group, reference first.
    for (std::size_t k = 0; k < group.candidates.size(); ++k) {
      StepSample expanded;
      expanded.state = sample.state;
      expanded.action = group.candidates[k].action;
      expanded.advantage = combine_final(sample.advantage, group.advantages[k]);
      expanded.source_task = sample.source_task;
      expanded.source_success_rate = sample.source_success_rate;
      out.samples.push_back(std::move(expanded));
    }
  }
  return out;
}

RoundReport run_round(const RunConfig& config, SuccessRateTable& table,
                      TabularSoftmaxPolicy& policy, Environment& env) {
  config.validate();
  const int round = table.round;
  const SuccessRateTable before = table;  // pre-round estimates guide the round
  const std::vector<TaskId> batch =
      round_batch(env.task_ids(), config.batch_tasks, round);

  AllocationPlan plan;
  if (method_uses_sr_sampling(config.method)) {
    Rng alloc_rng(derive_seed(config.seed, kSeedAllocate,
                              static_cast<std::uint64_t>(round)));
    plan = allocate(batch, before, cache(before), config.group_size,
                    config.replacement_sharpness, alloc_rng,
                    config.cache_weighting);
  } else {
    plan = allocate_uniform(batch, config.group_size);
  }
  plan.round = round;

  // Collect against a frozen snapshot; it is also the ratio denominator in
  // the update below.
  const TabularSoftmaxPolicy snapshot = policy;
  const std::int64_t env_steps_before = env.interaction_count();
  std::vector<Trajectory> trajectories;
  trajectories.reserve(plan.slots.size());
  std::int64_t rollout_inferences = 0;
  for (std::size_t slot = 0; slot < plan.slots.size(); ++slot) {
    Rng slot_rng(derive_seed(config.seed, kSeedRollout,
                             static_cast<std::uint64_t>(round), slot));
    trajectories.push_back(rollout(env, env.spec(plan.slots[slot].assigned),
                                   snapshot, config.temperature_train, slot_rng));
    rollout_inferences += static_cast<std::int64_t>(trajectories.back().length());
  }
  const std::int64_t collect_env_steps = env.interaction_count() - env_steps_before;

  // Every collected trajectory counts toward the task it was collected for,
  // replacement targets included.
  std::map<TaskId, RoundCounts> counts;
  for (std::size_t i = 0; i < plan.slots.size(); ++i) {
    RoundCounts& c = counts[plan.slots[i].assigned];
    c.sampled += 1;
    c.successes += trajectories[i].reward > 0.0 ? 1 : 0;
  }
  table = update_round(table, counts);

  const std::size_t keep_responses =
      method_truncates_history(config.method)
          ? static_cast<std::size_t>(config.history_responses)
          : kUnlimitedHistory;
  const std::size_t keep_observations =
      method_truncates_history(config.method)
          ? static_cast<std::size_t>(config.history_observations)
          : kUnlimitedHistory;

  std::vector<StepSample> samples;
  if (method_uses_success_only(config.method)) {
    // Success-rate-weighted advantages on successful trajectories only.
    for (std::size_t i = 0; i < plan.slots.size(); ++i) {
      const Trajectory& trajectory = trajectories[i];
      if (!(trajectory.reward > 0.0)) {
        continue;
      }
      const double rate = before.success_rate(plan.slots[i].assigned);
      const double advantage = sr_weighted_advantage(trajectory, rate);
      std::vector<StepSample> decomposed = decompose(
          trajectory, advantage, rate, keep_responses, keep_observations);
      samples.insert(samples.end(), std::make_move_iterator(decomposed.begin()),
                     std::make_move_iterator(decomposed.end()));
    }
  } else {
    // Group-normalized advantages over each task's block of rollouts.
    const std::size_t copies = static_cast<std::size_t>(config.group_size);
    for (std::size_t t = 0; t < batch.size(); ++t) {
      TrajectoryGroup group;
      group.task = batch[t];
      group.trajectories.assign(trajectories.begin() + static_cast<std::ptrdiff_t>(t * copies),
                                trajectories.begin() + static_cast<std::ptrdiff_t>((t + 1) * copies));
      const std::vector<double> advantages = tgrpo_advantages(group);
      const double rate = before.success_rate(batch[t]);
      for (std::size_t g = 0; g < group.trajectories.size(); ++g) {
        std::vector<StepSample> decomposed =
            decompose(group.trajectories[g], advantages[g], rate,
                      keep_responses, keep_observations);
        samples.insert(samples.end(), std::make_move_iterator(decomposed.begin()),
                       std::make_move_iterator(decomposed.end()));
      }
    }
  }

  RoundReport report;
  report.round = round;

  if (method_uses_augmentation(config.method)) {
    const std::int64_t env_before_aug = env.interaction_count();
    Rng aug_rng(derive_seed(config.seed, kSeedAugment,
                            static_cast<std::uint64_t>(round)));
    AugmentationOutcome outcome = augment_samples(
        std::move(samples), snapshot, config.group_size,
        config.temperature_train, config.low_success_threshold,
        config.max_aug_groups, aug_rng);
    samples = std::move(outcome.samples);
    report.aug_groups = outcome.groups;
    report.aug_inert_groups = outcome.inert_groups;
    report.aug_inference_calls = outcome.inference_calls;
    report.aug_env_steps = env.interaction_count() - env_before_aug;
  }

  update(policy, samples, snapshot, config.update_config());

  for (const TaskRecord& record : table.records) {
    report.task_ids.push_back(record.task);
    report.sampled.push_back(record.sampled);
    report.successes.push_back(record.successes);
    report.success_rates.push_back(record.success_rate);
  }
  report.tasks_above_60 = metric_tasks_above(table, kTasksAboveThreshold);
  std::size_t high_slots = 0;
  for (const AllocationSlot& slot : plan.slots) {
    if (before.success_rate(slot.assigned) >= kHighSuccessCutoff) {
      high_slots += 1;
    }
  }
  report.high_success_fraction =
      plan.slots.empty() ? 0.0
                         : static_cast<double>(high_slots) /
                               static_cast<double>(plan.slots.size());
  report.env_steps = collect_env_steps;
  report.inference_calls = rollout_inferences + report.aug_inference_calls;
  report.train_samples = samples.size();
  report.plan = std::move(plan);
  if (config.log_trajectories) {
    report.trajectories = std::move(trajectories);
  }
  return report;
}

EvalResult evaluate_policy(const TabularSoftmaxPolicy& policy,
                           const std::vector<SyntheticTaskSpec>& suite,
                           double temperature) {
  Environment env(suite);  // fresh counters, training env untouched
  Rng rng(0);              // unused at temperature 0
  EvalResult result;
  for (const SyntheticTaskSpec& spec : suite) {
    const Trajectory trajectory =
        rollout(env, spec, policy, temperature, rng);
    if (trajectory.reward > 0.0) {
      result.solved_tasks += 1;
    }
  }
  result.success_rate =
      static_cast<double>(result.solved_tasks) / static_cast<double>(suite.size());
  return result;
}

int metric_tasks_above(const SuccessRateTable& table, double threshold) {
  int count = 0;
  for (const TaskRecord& record : table.records) {
    if (record.success_rate > threshold) {
      count += 1;
    }
  }
  return count;
}

std::vector<double> metric_high_success_fraction(
    const std::vector<AllocationPlan>& plans,
    const std::vector<SuccessRateTable>& tables_before, int window) {
  if (window < 1) {
    throw std::invalid_argument("metric window must be at least 1");
  }
  if (plans.size() != tables_before.size()) {
    throw std::invalid_argument(
        "metric_high_success_fraction needs one table per plan");
  }
  std::vector<double> per_round;
  per_round.reserve(plans.size());
  for (std::size_t i = 0; i < plans.size(); ++i) {
    const AllocationPlan& plan = plans[i];
    if (plan.slots.empty()) {
      per_round.push_back(0.0);
      continue;
    }
    std::size_t high = 0;
    for (const AllocationSlot& slot : plan.slots) {
      if (tables_before[i].success_rate(slot.assigned) >= kHighSuccessCutoff) {
        high += 1;
      }
    }
    per_round.push_back(static_cast<double>(high) /
                        static_cast<double>(plan.slots.size()));
  }

  std::vector<double> buckets;
  for (std::size_t begin = 0; begin < per_round.size();
       begin += static_cast<std::size_t>(window)) {
    const std::size_t end =
        std::min(begin + static_cast<std::size_t>(window), per_round.size());
    double sum = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      sum += per_round[i];
    }
    buckets.push_back(sum / static_cast<double>(end - begin));
  }
  return buckets;
}

ExperimentResult run_experiment(const RunConfig& config) {
  config.validate();
  if (config.out_dir.empty()) {
    throw std::invalid_argument("run config needs an output directory");
  }

  std::vector<SyntheticTaskSpec> suite = config.task_suite.empty()
                                             ? default_task_suite()
                                             : load_suite(config.task_suite);
  Environment env(std::move(suite));
  const int rounds = config.resolve_rounds(env.suite().size());

  const std::size_t keep_responses =
      method_truncates_history(config.method)
          ? static_cast<std::size_t>(config.history_responses)
          : kUnlimitedHistory;
  const std::size_t keep_observations =
      method_truncates_history(config.method)
          ? static_cast<std::size_t>(config.history_observations)
          : kUnlimitedHistory;
  TabularSoftmaxPolicy policy(env.alphabet_size(), keep_responses,
                              keep_observations);
  SuccessRateTable table =
      init_table(env.task_ids(), config.group_size, config.success_threshold,
                 config.initial_success_rate);

  const std::filesystem::path out_dir(config.out_dir);
  std::filesystem::create_directories(out_dir);

  {
    nlohmann::json resolved = config_to_json(config);
    resolved["rounds"] = rounds;
    std::ofstream out(out_dir / "config.json");
    if (!out) {
      throw std::runtime_error("cannot write " + (out_dir / "config.json").string());
    }
    out << resolved.dump(2) << '\n';
  }

  std::ofstream metrics(out_dir / "metrics.jsonl");
  if (!metrics) {
    throw std::runtime_error("cannot write " + (out_dir / "metrics.jsonl").string());
  }
  std::ofstream trajectory_log;
  if (config.log_trajectories) {
    trajectory_log.open(out_dir / "trajectories.jsonl");
    if (!trajectory_log) {
      throw std::runtime_error("cannot write " +
                               (out_dir / "trajectories.jsonl").string());
    }
  }

  ExperimentResult result;
  result.summary.method = method_name(config.method);
  result.summary.seed = config.seed;
  result.summary.rounds = rounds;
  result.summary.suite_size = env.suite().size();

  double auc = 0.0;
  for (int round = 0; round < rounds; ++round) {
    RoundReport report = run_round(config, table, policy, env);
    if ((round + 1) % config.eval_every == 0 || round + 1 == rounds) {
      report.eval =
          evaluate_policy(policy, env.suite(), config.temperature_eval);
    }
    append_jsonl(metrics, report_to_json(report, config.log_plans));
    metrics.flush();  // keep partial logs usable if a run dies mid-way
    if (config.log_trajectories) {
      for (const Trajectory& trajectory : report.trajectories) {
        nlohmann::json line;
        to_json(line, trajectory);
        line["round"] = report.round;
        append_jsonl(trajectory_log, line);
      }
      report.trajectories.clear();
    }

    result.summary.total_env_steps += report.env_steps;
    result.summary.total_inference_calls += report.inference_calls;
    result.summary.total_aug_env_steps += report.aug_env_steps;
    result.summary.total_aug_groups += report.aug_groups;
    auc += static_cast<double>(report.tasks_above_60);
    result.reports.push_back(std::move(report));
  }

  result.summary.final_tasks_above_60 = metric_tasks_above(table, kTasksAboveThreshold);
  double rate_sum = 0.0;
  for (const TaskRecord& record : table.records) {
    rate_sum += record.success_rate;
  }
  result.summary.final_mean_success_rate =
      rate_sum / static_cast<double>(table.records.size());
  if (!result.reports.empty() && result.reports.back().eval.has_value()) {
    result.summary.final_eval_success_rate =
        result.reports.back().eval->success_rate;
    result.summary.final_eval_solved_tasks =
        result.reports.back().eval->solved_tasks;
  }
  result.summary.tasks_above_60_auc =
      rounds > 0 ? auc / static_cast<double>(rounds) : 0.0;

  {
    std::ofstream out(out_dir / "summary.json");
    if (!out) {
      throw std::runtime_error("cannot write " + (out_dir / "summary.json").string());
    }
    out << summary_to_json(result.summary).dump(2) << '\n';
  }
  if (!config.checkpoint_out.empty()) {
    std::ofstream out(config.checkpoint_out);
    if (!out) {
      throw std::runtime_error("cannot write policy checkpoint to " +
                               config.checkpoint_out);
    }
    policy.save(out);
  }
  return result;
}

}  // namespace steprl
