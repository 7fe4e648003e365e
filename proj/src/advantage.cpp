#include "steprl/advantage.hpp"

#include <cmath>
#include <stdexcept>

namespace steprl {

std::vector<double> group_normalize(std::span<const double> values) {
  if (values.empty()) {
    throw std::invalid_argument("group_normalize needs at least one value");
  }
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("group_normalize: values must be finite");
    }
    mean += v;
  }
  mean /= n;
  double variance = 0.0;
  for (double v : values) {
    variance += (v - mean) * (v - mean);
  }
  variance /= n;
  const double stddev = std::sqrt(variance);

  std::vector<double> out(values.size(), 0.0);
  if (stddev < 1e-12) {
    return out;  // no spread, no signal
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[i] = (values[i] - mean) / stddev;
  }
  return out;
}

std::vector<double> tgrpo_advantages(const TrajectoryGroup& group) {
  if (group.trajectories.size() < 2) {
    throw std::invalid_argument(
        "tgrpo_advantages needs at least two trajectories to normalize");
  }
  std::vector<double> rewards;
  rewards.reserve(group.trajectories.size());
  for (const Trajectory& trajectory : group.trajectories) {
    rewards.push_back(trajectory.reward);
  }
  return group_normalize(rewards);
}

double sr_weighted_advantage(const Trajectory& trajectory, double success_rate) {
  if (!(trajectory.reward > 0.0)) {
    throw std::invalid_argument(
        "sr_weighted_advantage is defined for successful trajectories only");
  }
  if (!(success_rate >= 0.0 && success_rate <= 1.0)) {
    throw std::invalid_argument("sr_weighted_advantage: rate must lie in [0, 1]");
  }
  return (1.0 - success_rate) * trajectory.reward;
}

std::vector<StepSample> decompose(const Trajectory& trajectory, double advantage,
                                  double source_success_rate,
                                  std::size_t keep_responses,
                                  std::size_t keep_observations) {
  if (trajectory.steps.empty()) {
    throw std::invalid_argument("decompose: trajectory has no steps");
  }
  std::vector<StepSample> samples;
  samples.reserve(trajectory.steps.size());
  for (const Step& step : trajectory.steps) {
    StepSample sample;
    sample.state = truncate_history(step.state, keep_responses, keep_observations);
    sample.action = step.action;
    sample.advantage = advantage;
    sample.source_task = trajectory.task;
    sample.source_success_rate = source_success_rate;
    samples.push_back(std::move(sample));
  }
  return samples;
}

double combine_final(double base, double aug) {
  if (base < 0.0) {
    throw std::invalid_argument(
        "combine_final: base advantage must come from a successful trajectory");
  }
  return base * aug;
}

}  // namespace steprl
