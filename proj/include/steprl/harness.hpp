#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "steprl/advantage.hpp"
#include "steprl/allocator.hpp"
#include "steprl/augment.hpp"
#include "steprl/envsim.hpp"
#include "steprl/policy.hpp"
#include "steprl/tracker.hpp"

namespace steprl {

// Training variants. The two baselines differ in sample granularity; the
// step variants toggle the two guided components independently so each can
// be ablated.
enum class Method {
  kTgrpo,             // trajectory-level groups, full history
  kGigrpo,            // group advantage broadcast to truncated step samples
  kStep,              // guided sampling + weighted steps + augmentation
  kStepNoSrSampling,  // uniform sampling, weighted steps + augmentation
  kStepNoStepAug,     // guided sampling + weighted steps, no augmentation
  kStepNoBoth,        // weighted steps only
};

Method parse_method(const std::string& name);
std::string method_name(Method method);

bool method_uses_sr_sampling(Method method);
bool method_uses_augmentation(Method method);
// Step variants train on successes only; the baselines keep failures and
// normalize within the group.
bool method_uses_success_only(Method method);
// Everything except tgrpo truncates per-step history to the configured caps.
bool method_truncates_history(Method method);

// Full description of one training run. Defaults follow the reference
// configuration; rounds = -1 means "derive from the suite size".
struct RunConfig {
  Method method = Method::kStep;
  int group_size = 16;  // rollouts per task and augmentation group anchor
  int batch_tasks = 16;
  int rounds = -1;
  std::uint64_t seed = 0;

  double success_threshold = 0.6;      // cache upper bound / logistic midpoint
  double low_success_threshold = 0.2;  // augmentation eligibility cutoff
  double replacement_sharpness = 10.0;
  double initial_success_rate = 0.0;
  CacheWeighting cache_weighting = CacheWeighting::kUniform;

  int history_responses = 3;
  int history_observations = 0;

  double learning_rate = 0.1;
  double clip_epsilon = 0.2;
  double kl_coefficient = 0.001;
  double temperature_train = 0.7;
  double temperature_eval = 0.0;
  int minibatch_size = 256;

  int eval_every = 4;       // greedy eval pass cadence, in rounds
  int max_aug_groups = 48;  // per-round cap on augmentation groups
  int metric_window = 4;     // rounds per bucket for windowed metrics

  std::string task_suite;  // suite file path; empty uses the built-in suite
  std::string out_dir;
  std::string checkpoint_out;  // optional policy checkpoint path
  bool log_plans = true;
  bool log_trajectories = false;

  void validate() const;
  UpdateConfig update_config() const;
  int resolve_rounds(std::size_t suite_size) const;
};

// Strict parse: unknown keys are rejected so typos fail loudly.
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& config);
RunConfig load_config(const std::string& path);

// Greedy evaluation over a full suite.
struct EvalResult {
  double success_rate = 0.0;  // mean over tasks
  int solved_tasks = 0;       // tasks that earned reward 1
};

// Everything observable about one round.
struct RoundReport {
  int round = 0;

  // Per-task arrays in table (ascending id) order, after the round's update.
  std::vector<TaskId> task_ids;
  std::vector<int> sampled;
  std::vector<int> successes;
  std::vector<double> success_rates;

  int tasks_above_60 = 0;             // tracked estimates strictly above 0.6
  double high_success_fraction = 0.0; // slots spent on tasks already at >= 0.8
  std::int64_t env_steps = 0;         // environment interactions this round
  std::int64_t inference_calls = 0;   // rollout plus augmentation inferences
  std::size_t train_samples = 0;      // step samples fed to the update

  int aug_groups = 0;
  int aug_inert_groups = 0;
  std::int64_t aug_inference_calls = 0;
  std::int64_t aug_env_steps = 0;  // replay-free augmentation keeps this 0

  AllocationPlan plan;
  std::optional<EvalResult> eval;

  // Filled only when the run logs trajectories.
  std::vector<Trajectory> trajectories;
};

struct ExperimentSummary {
  std::string method;
  std::uint64_t seed = 0;
  int rounds = 0;
  std::size_t suite_size = 0;

  int final_tasks_above_60 = 0;
  double final_mean_success_rate = 0.0;
  double final_eval_success_rate = 0.0;
  int final_eval_solved_tasks = 0;
  double tasks_above_60_auc = 0.0;  // mean of the per-round counts

  std::int64_t total_env_steps = 0;
  std::int64_t total_inference_calls = 0;
  std::int64_t total_aug_env_steps = 0;
  int total_aug_groups = 0;
};

struct ExperimentResult {
  ExperimentSummary summary;
  std::vector<RoundReport> reports;
};

nlohmann::json report_to_json(const RoundReport& report, bool include_plan);
nlohmann::json summary_to_json(const ExperimentSummary& summary);

// The built-in default suite all runs share unless a suite file is given.
std::vector<SyntheticTaskSpec> default_task_suite();

// Tasks this round trains on: a round-robin window over the suite.
std::vector<TaskId> round_batch(const std::vector<TaskId>& all_tasks,
                                int batch_tasks, int round);

// Collects one trajectory for `spec` with actions drawn from `policy`.
Trajectory rollout(Environment& env, const SyntheticTaskSpec& spec,
                   const Policy& policy, double temperature, Rng& rng);

// Replaces every augmentation-eligible sample (source success rate at or
// below `low_threshold`, up to `max_groups` groups) by its comparison group;
// other samples pass through unchanged.
struct AugmentationOutcome {
  std::vector<StepSample> samples;
  int groups = 0;
  int inert_groups = 0;
  std::int64_t inference_calls = 0;
};
AugmentationOutcome augment_samples(std::vector<StepSample> samples,
                                    const Policy& policy, int group_size,
                                    double temperature, double low_threshold,
                                    int max_groups, Rng& rng);

// One full collect/update cycle for the configured method. Advances the
// table (round index and estimates) and the policy in place.
RoundReport run_round(const RunConfig& config, SuccessRateTable& table,
                      TabularSoftmaxPolicy& policy, Environment& env);

// Greedy pass over every task on a fresh environment, leaving training
// counters untouched.
EvalResult evaluate_policy(const TabularSoftmaxPolicy& policy,
                           const std::vector<SyntheticTaskSpec>& suite,
                           double temperature);

// Tasks whose tracked estimate is strictly above `threshold`.
int metric_tasks_above(const SuccessRateTable& table, double threshold);

// Fraction of each plan's slots spent on tasks whose pre-round estimate was
// already at or above 0.8, averaged over windows of `window` rounds.
std::vector<double> metric_high_success_fraction(
    const std::vector<AllocationPlan>& plans,
    const std::vector<SuccessRateTable>& tables_before, int window);

// Runs the full experiment: builds the suite, environment, table and policy,
// loops rounds, and writes config.json, metrics.jsonl and summary.json into
// the output directory. Returns the summary plus all round reports.
ExperimentResult run_experiment(const RunConfig& config);

}  // namespace steprl
