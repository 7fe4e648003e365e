#pragma once

#include <span>
#include <vector>

#include "steprl/core.hpp"

namespace steprl {

// A group of rollouts collected for the same task.
struct TrajectoryGroup {
  TaskId task;
  std::vector<Trajectory> trajectories;
};

// (x - mean) / std over the group, with population std. A group whose values
// are all equal carries no relative signal and normalizes to all zeros.
std::vector<double> group_normalize(std::span<const double> values);

// Group-normalized trajectory advantages from the terminal rewards. Needs at
// least two trajectories; a zero-variance group yields all zeros.
std::vector<double> tgrpo_advantages(const TrajectoryGroup& group);

// Success-rate-weighted trajectory advantage, (1 - success_rate) * reward.
// Defined for successful trajectories only (reward > 0): failures are
// dropped before weighting, so rarely-solved tasks get the strongest
// positive signal and mastered ones fade out.
double sr_weighted_advantage(const Trajectory& trajectory, double success_rate);

// Splits a trajectory into per-step samples. Every sample carries the same
// trajectory-level advantage; each state's history is cut to the given caps.
// The source fields record the producing task and the success-rate estimate
// the advantage was computed from.
std::vector<StepSample> decompose(const Trajectory& trajectory, double advantage,
                                  double source_success_rate,
                                  std::size_t keep_responses,
                                  std::size_t keep_observations);

// Final per-step advantage: the trajectory-level credit scaled by the local
// augmentation signal. `base` must be non-negative because it always comes
// from a successful trajectory.
double combine_final(double base, double aug);

}  // namespace steprl
