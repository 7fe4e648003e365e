#include <pybind11/functional.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "steprl/advantage.hpp"
#include "steprl/allocator.hpp"
#include "steprl/augment.hpp"
#include "steprl/core.hpp"
#include "steprl/envsim.hpp"
#include "steprl/harness.hpp"
#include "steprl/policy.hpp"
#include "steprl/rng.hpp"
#include "steprl/tracker.hpp"

namespace py = pybind11;

using namespace steprl;

namespace {

// update_round keys its counts by TaskId; plain integer keys are friendlier
// from Python, so the binding translates.
std::map<TaskId, RoundCounts> counts_from_ints(
    const std::map<std::int32_t, RoundCounts>& counts) {
  std::map<TaskId, RoundCounts> keyed;
  for (const auto& [task, round_counts] : counts) {
    keyed[TaskId{task}] = round_counts;
  }
  return keyed;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Success-rate-guided step-level policy optimization core";
  m.attr("__version__") = "0.1.0";
  m.attr("UNLIMITED_HISTORY") = kUnlimitedHistory;

  // --- core types ---------------------------------------------------------

  py::class_<TaskId>(m, "TaskId", "Stable identifier of a task within a task set")
      .def(py::init<>())
      .def(py::init([](std::int32_t value) { return TaskId{value}; }), py::arg("value"))
      .def_readwrite("value", &TaskId::value)
      .def(py::self == py::self)
      .def(py::self < py::self)
      .def("__hash__", [](const TaskId& id) { return py::hash(py::int_(id.value)); })
      .def("__repr__", [](const TaskId& id) {
        return "TaskId(" + std::to_string(id.value) + ")";
      });

  py::class_<Action>(m, "Action", "One discrete action from the action alphabet")
      .def(py::init<>())
      .def(py::init([](Token token) { return Action{token}; }), py::arg("token"))
      .def_readwrite("token", &Action::token)
      .def(py::self == py::self)
      .def("__hash__", [](const Action& a) { return py::hash(py::int_(a.token)); })
      .def("__repr__", [](const Action& a) {
        return "Action(" + std::to_string(a.token) + ")";
      });

  py::class_<State>(m, "State",
                    "Task, truncatable interaction history, and current observation")
      .def(py::init<>())
      .def(py::init([](TaskId task, std::vector<Token> responses,
                       std::vector<Token> observations, Token observation) {
             return State{task, std::move(responses), std::move(observations),
                          observation};
           }),
           py::arg("task"), py::arg("past_responses") = std::vector<Token>{},
           py::arg("past_observations") = std::vector<Token>{},
           py::arg("observation") = Token{0})
      .def_readwrite("task", &State::task)
      .def_readwrite("past_responses", &State::past_responses)
      .def_readwrite("past_observations", &State::past_observations)
      .def_readwrite("observation", &State::observation)
      .def(py::self == py::self);

  py::class_<Step>(m, "Step", "A state together with the action taken there")
      .def(py::init<>())
      .def(py::init([](State state, Action action) {
             return Step{std::move(state), action};
           }),
           py::arg("state"), py::arg("action"))
      .def_readwrite("state", &Step::state)
      .def_readwrite("action", &Step::action)
      .def(py::self == py::self);

  py::class_<Trajectory>(m, "Trajectory",
                         "A complete episode: steps plus the terminal reward")
      .def(py::init<>())
      .def(py::init([](TaskId task, std::vector<Step> steps, double reward) {
             return Trajectory{task, std::move(steps), reward};
           }),
           py::arg("task"), py::arg("steps") = std::vector<Step>{},
           py::arg("reward") = 0.0)
      .def_readwrite("task", &Trajectory::task)
      .def_readwrite("steps", &Trajectory::steps)
      .def_readwrite("reward", &Trajectory::reward)
      .def("__len__", &Trajectory::length)
      .def(py::self == py::self);

  py::class_<StepSample>(m, "StepSample",
                         "One decomposed training sample with its advantage")
      .def(py::init<>())
      .def_readwrite("state", &StepSample::state)
      .def_readwrite("action", &StepSample::action)
      .def_readwrite("advantage", &StepSample::advantage)
      .def_readwrite("source_task", &StepSample::source_task)
      .def_readwrite("source_success_rate", &StepSample::source_success_rate)
      .def(py::self == py::self);

  m.def("truncate_history", &truncate_history, py::arg("state"),
        py::arg("keep_responses"), py::arg("keep_observations"),
        "Keep only the most recent response/observation tokens");

  // --- deterministic rng --------------------------------------------------

  m.def("derive_seed", &derive_seed, py::arg("base"), py::arg("a"),
        py::arg("b") = 0, py::arg("c") = 0,
        "Mix a base seed with stream identifiers into a fresh 64-bit seed");

  py::class_<Rng>(m, "Rng", "Deterministic random source")
      .def(py::init<std::uint64_t>(), py::arg("seed"))
      .def("next_u64", &Rng::next_u64)
      .def("next_double", &Rng::next_double)
      .def("bernoulli", &Rng::bernoulli, py::arg("probability"))
      .def("uniform_index", &Rng::uniform_index, py::arg("n"))
      .def("categorical",
           [](Rng& rng, const std::vector<double>& weights) {
             return rng.categorical(weights);
           },
           py::arg("weights"))
      .def("fork", &Rng::fork, py::arg("a"), py::arg("b") = 0, py::arg("c") = 0);

  // --- success-rate tracker -----------------------------------------------

  py::class_<TaskRecord>(m, "TaskRecord", "Per-task success statistics")
      .def(py::init<>())
      .def_readwrite("task", &TaskRecord::task)
      .def_readwrite("success_rate", &TaskRecord::success_rate)
      .def_readwrite("sampled", &TaskRecord::sampled)
      .def_readwrite("successes", &TaskRecord::successes);

  py::class_<RoundCounts>(m, "RoundCounts",
                          "Trajectories collected and succeeded in one round")
      .def(py::init<>())
      .def(py::init([](int sampled, int successes) {
             return RoundCounts{sampled, successes};
           }),
           py::arg("sampled"), py::arg("successes"))
      .def_readwrite("sampled", &RoundCounts::sampled)
      .def_readwrite("successes", &RoundCounts::successes);

  py::class_<SuccessRateTable>(m, "SuccessRateTable",
                               "Smoothed success estimates for a task set")
      .def(py::init<>())
      .def_readwrite("records", &SuccessRateTable::records)
      .def_readwrite("round", &SuccessRateTable::round)
      .def_readwrite("group_size", &SuccessRateTable::group_size)
      .def_readwrite("success_threshold", &SuccessRateTable::success_threshold)
      .def("success_rate", &SuccessRateTable::success_rate, py::arg("task"));

  m.def("init_table", &init_table, py::arg("tasks"), py::arg("group_size"),
        py::arg("success_threshold"), py::arg("initial_rate"));
  m.def("update_round",
        [](const SuccessRateTable& table,
           const std::map<std::int32_t, RoundCounts>& counts) {
          return update_round(table, counts_from_ints(counts));
        },
        py::arg("table"), py::arg("counts"),
        "One smoothing step; counts map task id to that round's RoundCounts");
  m.def("cache", &cache, py::arg("table"),
        "Tasks in the intermediate band 0 < rate < success_threshold");

  // --- rollout allocation ---------------------------------------------------

  py::enum_<CacheWeighting>(m, "CacheWeighting")
      .value("uniform", CacheWeighting::kUniform)
      .value("inverse_success_rate", CacheWeighting::kInverseSuccessRate);

  py::class_<AllocationSlot>(m, "AllocationSlot",
                             "One rollout slot: origin task and assigned task")
      .def(py::init<>())
      .def_readwrite("origin", &AllocationSlot::origin)
      .def_readwrite("assigned", &AllocationSlot::assigned)
      .def_readwrite("replaced", &AllocationSlot::replaced);

  py::class_<AllocationPlan>(m, "AllocationPlan",
                             "The full rollout budget for one round")
      .def(py::init<>())
      .def_readwrite("slots", &AllocationPlan::slots)
      .def_readwrite("round", &AllocationPlan::round);

  m.def("replacement_probability", &replacement_probability,
        py::arg("success_rate"), py::arg("sharpness"), py::arg("threshold"),
        "Logistic probability that an expendable copy is redirected");
  m.def("allocate", &allocate, py::arg("tasks"), py::arg("table"),
        py::arg("replacement_cache"), py::arg("copies"), py::arg("sharpness"),
        py::arg("rng"), py::arg("weighting") = CacheWeighting::kUniform,
        "Expand batch tasks into slots, redirecting expendable copies");
  m.def("allocate_uniform", &allocate_uniform, py::arg("tasks"),
        py::arg("copies"), "Every task gets exactly `copies` slots");

  // --- advantages -----------------------------------------------------------

  py::class_<TrajectoryGroup>(m, "TrajectoryGroup",
                              "A group of rollouts collected for the same task")
      .def(py::init<>())
      .def(py::init([](TaskId task, std::vector<Trajectory> trajectories) {
             return TrajectoryGroup{task, std::move(trajectories)};
           }),
           py::arg("task"), py::arg("trajectories"))
      .def_readwrite("task", &TrajectoryGroup::task)
      .def_readwrite("trajectories", &TrajectoryGroup::trajectories);

  m.def("group_normalize",
        [](const std::vector<double>& values) { return group_normalize(values); },
        py::arg("values"),
        "(x - mean) / population std; zero-variance groups map to zeros");
  m.def("tgrpo_advantages", &tgrpo_advantages, py::arg("group"));
  m.def("sr_weighted_advantage", &sr_weighted_advantage, py::arg("trajectory"),
        py::arg("success_rate"),
        "(1 - success_rate) * reward, for successful trajectories");
  m.def("decompose", &decompose, py::arg("trajectory"), py::arg("advantage"),
        py::arg("source_success_rate"), py::arg("keep_responses"),
        py::arg("keep_observations"),
        "Split a trajectory into per-step samples with truncated histories");
  m.def("combine_final", &combine_final, py::arg("base"), py::arg("aug"),
        "Final per-step advantage: trajectory credit scaled by the local signal");

  // --- policy ---------------------------------------------------------------

  py::class_<UpdateConfig>(m, "UpdateConfig",
                           "Optimization settings for one policy update pass")
      .def(py::init<>())
      .def_readwrite("learning_rate", &UpdateConfig::learning_rate)
      .def_readwrite("clip_epsilon", &UpdateConfig::clip_epsilon)
      .def_readwrite("kl_coefficient", &UpdateConfig::kl_coefficient)
      .def_readwrite("temperature_train", &UpdateConfig::temperature_train)
      .def_readwrite("temperature_eval", &UpdateConfig::temperature_eval)
      .def_readwrite("minibatch_size", &UpdateConfig::minibatch_size);

  py::class_<UpdateStats>(m, "UpdateStats", "Diagnostics from one update pass")
      .def(py::init<>())
      .def_readwrite("sample_count", &UpdateStats::sample_count)
      .def_readwrite("minibatches", &UpdateStats::minibatches)
      .def_readwrite("mean_ratio", &UpdateStats::mean_ratio)
      .def_readwrite("mean_kl", &UpdateStats::mean_kl)
      .def_readwrite("clipped_fraction", &UpdateStats::clipped_fraction);

  py::class_<SurrogateParts>(m, "SurrogateParts",
                             "Per-sample pieces of the clipped-ratio objective")
      .def(py::init<>())
      .def_readwrite("value", &SurrogateParts::value)
      .def_readwrite("ratio", &SurrogateParts::ratio)
      .def_readwrite("kl", &SurrogateParts::kl)
      .def_readwrite("clipped", &SurrogateParts::clipped);

  m.def("surrogate_parts",
        [](const std::vector<double>& logits,
           const std::vector<double>& snapshot_logits, int action_index,
           double advantage, const UpdateConfig& config) {
          return surrogate_parts(logits, snapshot_logits, action_index,
                                 advantage, config);
        },
        py::arg("logits"), py::arg("snapshot_logits"), py::arg("action_index"),
        py::arg("advantage"), py::arg("config"));
  m.def("surrogate_value",
        [](const std::vector<double>& logits,
           const std::vector<double>& snapshot_logits, int action_index,
           double advantage, const UpdateConfig& config) {
          return surrogate_value(logits, snapshot_logits, action_index,
                                 advantage, config);
        },
        py::arg("logits"), py::arg("snapshot_logits"), py::arg("action_index"),
        py::arg("advantage"), py::arg("config"));
  m.def("surrogate_gradient",
        [](const std::vector<double>& logits,
           const std::vector<double>& snapshot_logits, int action_index,
           double advantage, const UpdateConfig& config) {
          return surrogate_gradient(logits, snapshot_logits, action_index,
                                    advantage, config);
        },
        py::arg("logits"), py::arg("snapshot_logits"), py::arg("action_index"),
        py::arg("advantage"), py::arg("config"),
        "Exact gradient of surrogate_value in the current logits");

  py::class_<Policy>(m, "Policy",
                     "Behavior contract for action selection (abstract)");

  py::class_<TabularSoftmaxPolicy, Policy>(
      m, "TabularSoftmaxPolicy",
      "Tabular softmax policy keyed by (task, truncated history, observation)")
      .def(py::init<int, std::size_t, std::size_t>(), py::arg("action_count"),
           py::arg("keep_responses"), py::arg("keep_observations"))
      .def(py::init<const TabularSoftmaxPolicy&>(), py::arg("other"),
           "Copy; the usual way to take a frozen snapshot before an update")
      .def("action_count", &TabularSoftmaxPolicy::action_count)
      .def("keep_responses", &TabularSoftmaxPolicy::keep_responses)
      .def("keep_observations", &TabularSoftmaxPolicy::keep_observations)
      .def("sample_action", &TabularSoftmaxPolicy::sample_action,
           py::arg("state"), py::arg("temperature"), py::arg("rng"))
      .def("action_log_prob", &TabularSoftmaxPolicy::action_log_prob,
           py::arg("state"), py::arg("action"))
      .def("state_logits", &TabularSoftmaxPolicy::state_logits, py::arg("state"))
      .def("state_probabilities", &TabularSoftmaxPolicy::state_probabilities,
           py::arg("state"))
      .def("set_state_logits", &TabularSoftmaxPolicy::set_state_logits,
           py::arg("state"), py::arg("logits"))
      .def("table_size", &TabularSoftmaxPolicy::table_size)
      .def("save",
           [](const TabularSoftmaxPolicy& policy, const std::string& path) {
             std::ofstream out(path);
             if (!out) {
               throw std::runtime_error("cannot write policy checkpoint to " +
                                        path);
             }
             policy.save(out);
           },
           py::arg("path"), "Write the checkpoint to a file")
      .def_static("load",
                  [](const std::string& path) {
                    std::ifstream in(path);
                    if (!in) {
                      throw std::runtime_error(
                          "cannot read policy checkpoint from " + path);
                    }
                    return TabularSoftmaxPolicy::load(in);
                  },
                  py::arg("path"), "Read a checkpoint written by save()");

  m.def("update", &update, py::arg("policy"), py::arg("samples"),
        py::arg("snapshot"), py::arg("config"),
        "One gradient-ascent pass over the samples against a frozen snapshot");

  // --- local augmentation -----------------------------------------------------

  py::class_<AugmentationCandidate>(m, "AugmentationCandidate",
                                    "One alternative action at a reference state")
      .def(py::init<>())
      .def_readwrite("action", &AugmentationCandidate::action)
      .def_readwrite("reward", &AugmentationCandidate::reward);

  py::class_<AugmentationGroup>(m, "AugmentationGroup",
                                "A reference step with regenerated alternatives")
      .def(py::init<>())
      .def_readwrite("reference", &AugmentationGroup::reference)
      .def_readwrite("candidates", &AugmentationGroup::candidates)
      .def_readwrite("advantages", &AugmentationGroup::advantages);

  m.def("exact_match", &exact_match, py::arg("candidate"), py::arg("reference"));
  m.def("select_for_augmentation", &select_for_augmentation, py::arg("samples"),
        py::arg("low_threshold"),
        "Samples whose source success rate is at or below the low threshold");
  m.def("build_group", &build_group, py::arg("reference"), py::arg("policy"),
        py::arg("group_size"), py::arg("temperature"), py::arg("rng"),
        py::arg("matches") = ActionMatcher(exact_match),
        "Reference action plus group_size/2 - 1 policy-sampled alternatives");
  m.def("aug_advantages", &aug_advantages, py::arg("group"));
  m.def("is_inert", &is_inert, py::arg("group"),
        "True when every candidate earned the same reward");
  m.def("env_interaction_count", &env_interaction_count, py::arg("group"),
        "Always zero: augmentation is replay-free by construction");
  m.def("inference_count", &inference_count, py::arg("group"));

  // --- synthetic environment ---------------------------------------------------

  py::class_<SyntheticTaskSpec>(m, "SyntheticTaskSpec",
                                "One task: reproduce the target sequence in order")
      .def(py::init<>())
      .def(py::init([](TaskId task, std::vector<Action> target, int alphabet,
                       int tolerance, int step_cap) {
             return SyntheticTaskSpec{task, std::move(target), alphabet,
                                      tolerance, step_cap};
           }),
           py::arg("task"), py::arg("target_sequence"),
           py::arg("alphabet_size") = 2, py::arg("mistake_tolerance") = 0,
           py::arg("step_cap") = 0)
      .def_readwrite("task", &SyntheticTaskSpec::task)
      .def_readwrite("target_sequence", &SyntheticTaskSpec::target_sequence)
      .def_readwrite("alphabet_size", &SyntheticTaskSpec::alphabet_size)
      .def_readwrite("mistake_tolerance", &SyntheticTaskSpec::mistake_tolerance)
      .def_readwrite("step_cap", &SyntheticTaskSpec::step_cap)
      .def("length", &SyntheticTaskSpec::length)
      .def("effective_step_cap", &SyntheticTaskSpec::effective_step_cap)
      .def("validate", &SyntheticTaskSpec::validate)
      .def(py::self == py::self);

  py::class_<EpisodeState>(m, "EpisodeState", "A running episode")
      .def(py::init<>())
      .def_readwrite("spec", &EpisodeState::spec)
      .def_readwrite("state", &EpisodeState::state)
      .def_readwrite("progress", &EpisodeState::progress)
      .def_readwrite("mistakes", &EpisodeState::mistakes)
      .def_readwrite("done", &EpisodeState::done)
      .def_readwrite("success", &EpisodeState::success)
      .def("turns", &EpisodeState::turns);

  py::class_<EnvStepResult>(m, "EnvStepResult")
      .def(py::init<>())
      .def_readwrite("episode", &EnvStepResult::episode)
      .def_readwrite("reward", &EnvStepResult::reward)
      .def_readwrite("done", &EnvStepResult::done);

  m.def("observation_token", &observation_token, py::arg("task"),
        py::arg("progress"),
        "Observation the agent sees at (task, progress)");

  py::class_<Environment>(m, "Environment",
                          "Deterministic multi-turn environment over a task suite")
      .def(py::init<std::vector<SyntheticTaskSpec>>(), py::arg("suite"))
      .def("suite", &Environment::suite)
      .def("spec", &Environment::spec, py::arg("task"))
      .def("task_ids", &Environment::task_ids)
      .def("alphabet_size", &Environment::alphabet_size)
      .def("reset", &Environment::reset, py::arg("task"))
      .def("step", &Environment::step, py::arg("episode"), py::arg("action"))
      .def("interaction_count", &Environment::interaction_count);

  m.def("default_length_pattern", &default_length_pattern);
  m.def("generate_suite", &generate_suite, py::arg("task_count"),
        py::arg("alphabet_size"), py::arg("mistake_tolerance"),
        py::arg("length_pattern"), py::arg("seed"),
        "Deterministic suite with ids 0..task_count-1");
  m.def("save_suite", &save_suite, py::arg("path"), py::arg("suite"));
  m.def("load_suite", &load_suite, py::arg("path"));

  // --- experiment harness --------------------------------------------------------

  py::enum_<Method>(m, "Method")
      .value("tgrpo", Method::kTgrpo)
      .value("gigrpo", Method::kGigrpo)
      .value("step", Method::kStep)
      .value("step_no_srsampling", Method::kStepNoSrSampling)
      .value("step_no_stepaug", Method::kStepNoStepAug)
      .value("step_no_both", Method::kStepNoBoth);

  m.def("parse_method", &parse_method, py::arg("name"));
  m.def("method_name", &method_name, py::arg("method"));
  m.def("method_uses_sr_sampling", &method_uses_sr_sampling, py::arg("method"));
  m.def("method_uses_augmentation", &method_uses_augmentation, py::arg("method"));
  m.def("method_uses_success_only", &method_uses_success_only, py::arg("method"));
  m.def("method_truncates_history", &method_truncates_history, py::arg("method"));

  py::class_<RunConfig>(m, "RunConfig", "Full description of one training run")
      .def(py::init<>())
      .def_readwrite("method", &RunConfig::method)
      .def_readwrite("group_size", &RunConfig::group_size)
      .def_readwrite("batch_tasks", &RunConfig::batch_tasks)
      .def_readwrite("rounds", &RunConfig::rounds)
      .def_readwrite("seed", &RunConfig::seed)
      .def_readwrite("success_threshold", &RunConfig::success_threshold)
      .def_readwrite("low_success_threshold", &RunConfig::low_success_threshold)
      .def_readwrite("replacement_sharpness", &RunConfig::replacement_sharpness)
      .def_readwrite("initial_success_rate", &RunConfig::initial_success_rate)
      .def_readwrite("cache_weighting", &RunConfig::cache_weighting)
      .def_readwrite("history_responses", &RunConfig::history_responses)
      .def_readwrite("history_observations", &RunConfig::history_observations)
      .def_readwrite("learning_rate", &RunConfig::learning_rate)
      .def_readwrite("clip_epsilon", &RunConfig::clip_epsilon)
      .def_readwrite("kl_coefficient", &RunConfig::kl_coefficient)
      .def_readwrite("temperature_train", &RunConfig::temperature_train)
      .def_readwrite("temperature_eval", &RunConfig::temperature_eval)
      .def_readwrite("minibatch_size", &RunConfig::minibatch_size)
      .def_readwrite("eval_every", &RunConfig::eval_every)
      .def_readwrite("max_aug_groups", &RunConfig::max_aug_groups)
      .def_readwrite("metric_window", &RunConfig::metric_window)
      .def_readwrite("task_suite", &RunConfig::task_suite)
      .def_readwrite("out_dir", &RunConfig::out_dir)
      .def_readwrite("checkpoint_out", &RunConfig::checkpoint_out)
      .def_readwrite("log_plans", &RunConfig::log_plans)
      .def_readwrite("log_trajectories", &RunConfig::log_trajectories)
      .def("validate", &RunConfig::validate)
      .def("update_config", &RunConfig::update_config)
      .def("resolve_rounds", &RunConfig::resolve_rounds, py::arg("suite_size"));

  m.def("load_config", &load_config, py::arg("path"),
        "Strict parse of a run config JSON file; unknown keys are rejected");
  m.def("config_to_json",
        [](const RunConfig& config) { return config_to_json(config).dump(2); },
        py::arg("config"), "The config as a JSON string");
  m.def("config_from_json",
        [](const std::string& text) {
          return config_from_json(nlohmann::json::parse(text));
        },
        py::arg("text"), "Strict parse of a run config from a JSON string");

  py::class_<EvalResult>(m, "EvalResult", "Greedy evaluation over a full suite")
      .def(py::init<>())
      .def_readwrite("success_rate", &EvalResult::success_rate)
      .def_readwrite("solved_tasks", &EvalResult::solved_tasks);

  py::class_<RoundReport>(m, "RoundReport",
                          "Everything observable about one round")
      .def(py::init<>())
      .def_readwrite("round", &RoundReport::round)
      .def_readwrite("task_ids", &RoundReport::task_ids)
      .def_readwrite("sampled", &RoundReport::sampled)
      .def_readwrite("successes", &RoundReport::successes)
      .def_readwrite("success_rates", &RoundReport::success_rates)
      .def_readwrite("tasks_above_60", &RoundReport::tasks_above_60)
      .def_readwrite("high_success_fraction", &RoundReport::high_success_fraction)
      .def_readwrite("env_steps", &RoundReport::env_steps)
      .def_readwrite("inference_calls", &RoundReport::inference_calls)
      .def_readwrite("train_samples", &RoundReport::train_samples)
      .def_readwrite("aug_groups", &RoundReport::aug_groups)
      .def_readwrite("aug_inert_groups", &RoundReport::aug_inert_groups)
      .def_readwrite("aug_inference_calls", &RoundReport::aug_inference_calls)
      .def_readwrite("aug_env_steps", &RoundReport::aug_env_steps)
      .def_readwrite("plan", &RoundReport::plan)
      .def_readwrite("eval", &RoundReport::eval)
      .def_readwrite("trajectories", &RoundReport::trajectories);

  py::class_<ExperimentSummary>(m, "ExperimentSummary")
      .def(py::init<>())
      .def_readwrite("method", &ExperimentSummary::method)
      .def_readwrite("seed", &ExperimentSummary::seed)
      .def_readwrite("rounds", &ExperimentSummary::rounds)
      .def_readwrite("suite_size", &ExperimentSummary::suite_size)
      .def_readwrite("final_tasks_above_60", &ExperimentSummary::final_tasks_above_60)
      .def_readwrite("final_mean_success_rate",
                     &ExperimentSummary::final_mean_success_rate)
      .def_readwrite("final_eval_success_rate",
                     &ExperimentSummary::final_eval_success_rate)
      .def_readwrite("final_eval_solved_tasks",
                     &ExperimentSummary::final_eval_solved_tasks)
      .def_readwrite("tasks_above_60_auc", &ExperimentSummary::tasks_above_60_auc)
      .def_readwrite("total_env_steps", &ExperimentSummary::total_env_steps)
      .def_readwrite("total_inference_calls",
                     &ExperimentSummary::total_inference_calls)
      .def_readwrite("total_aug_env_steps", &ExperimentSummary::total_aug_env_steps)
      .def_readwrite("total_aug_groups", &ExperimentSummary::total_aug_groups);

  py::class_<ExperimentResult>(m, "ExperimentResult")
      .def(py::init<>())
      .def_readwrite("summary", &ExperimentResult::summary)
      .def_readwrite("reports", &ExperimentResult::reports);

  m.def("report_to_json",
        [](const RoundReport& report, bool include_plan) {
          return report_to_json(report, include_plan).dump();
        },
        py::arg("report"), py::arg("include_plan") = false,
        "The round report as a JSON string (one metrics.jsonl line)");
  m.def("summary_to_json",
        [](const ExperimentSummary& summary) {
          return summary_to_json(summary).dump(2);
        },
        py::arg("summary"), "The summary as a JSON string");

  m.def("default_task_suite", &default_task_suite,
        "The built-in suite all runs share unless a suite file is given");
  m.def("round_batch", &round_batch, py::arg("all_tasks"), py::arg("batch_tasks"),
        py::arg("round"), "Round-robin window over the suite");
  m.def("rollout", &rollout, py::arg("env"), py::arg("spec"), py::arg("policy"),
        py::arg("temperature"), py::arg("rng"),
        "Collect one trajectory with actions drawn from the policy");

  py::class_<AugmentationOutcome>(m, "AugmentationOutcome")
      .def(py::init<>())
      .def_readwrite("samples", &AugmentationOutcome::samples)
      .def_readwrite("groups", &AugmentationOutcome::groups)
      .def_readwrite("inert_groups", &AugmentationOutcome::inert_groups)
      .def_readwrite("inference_calls", &AugmentationOutcome::inference_calls);

  m.def("augment_samples", &augment_samples, py::arg("samples"), py::arg("policy"),
        py::arg("group_size"), py::arg("temperature"), py::arg("low_threshold"),
        py::arg("max_groups"), py::arg("rng"),
        "Replace eligible samples by their comparison groups");
  m.def("run_round", &run_round, py::arg("config"), py::arg("table"),
        py::arg("policy"), py::arg("env"),
        "One collect/update cycle; advances the table and policy in place");
  m.def("evaluate_policy", &evaluate_policy, py::arg("policy"), py::arg("suite"),
        py::arg("temperature"),
        "Greedy pass over every task on a fresh environment");
  m.def("metric_tasks_above", &metric_tasks_above, py::arg("table"),
        py::arg("threshold"));
  m.def("metric_high_success_fraction", &metric_high_success_fraction,
        py::arg("plans"), py::arg("tables_before"), py::arg("window"));
  m.def("run_experiment", &run_experiment, py::arg("config"),
        "Run the full experiment and write logs into the output directory");
}
