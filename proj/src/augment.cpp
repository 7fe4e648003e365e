#include "steprl/augment.hpp"

#include <stdexcept>

#include "steprl/advantage.hpp"

namespace steprl {

bool exact_match(const Action& candidate, const Action& reference) {
  return candidate == reference;
}

std::vector<StepSample> select_for_augmentation(
    const std::vector<StepSample>& samples, double low_threshold) {
  if (!(low_threshold >= 0.0 && low_threshold <= 1.0)) {
    throw std::invalid_argument("low threshold must lie in [0, 1]");
  }
  std::vector<StepSample> selected;
  for (const StepSample& sample : samples) {
    if (sample.source_success_rate <= low_threshold) {
      selected.push_back(sample);
    }
  }
  return selected;
}

AugmentationGroup build_group(const StepSample& reference, const Policy& policy,
                              int group_size, double temperature, Rng& rng,
                              const ActionMatcher& matches) {
  if (group_size < 4) {
    throw std::invalid_argument(
        "build_group needs a group size of at least 4 for one alternative");
  }
  if (!matches) {
    throw std::invalid_argument("build_group needs a matcher");
  }
  const int alternatives = group_size / 2 - 1;

  AugmentationGroup group;
  group.reference = reference;
  group.candidates.reserve(static_cast<std::size_t>(alternatives) + 1);
  group.candidates.push_back(AugmentationCandidate{reference.action, 1.0});
  for (int i = 0; i < alternatives; ++i) {
    const Action action = policy.sample_action(reference.state, temperature, rng);
    const double reward = matches(action, reference.action) ? 1.0 : 0.0;
    group.candidates.push_back(AugmentationCandidate{action, reward});
  }
  return group;
}

std::vector<double> aug_advantages(const AugmentationGroup& group) {
  if (group.candidates.empty()) {
    throw std::invalid_argument("aug_advantages: group has no candidates");
  }
  std::vector<double> rewards;
  rewards.reserve(group.candidates.size());
  for (const AugmentationCandidate& candidate : group.candidates) {
    rewards.push_back(candidate.reward);
  }
  return group_normalize(rewards);
}

bool is_inert(const AugmentationGroup& group) {
  if (group.candidates.empty()) {
    return true;
  }
  const double first = group.candidates.front().reward;
  for (const AugmentationCandidate& candidate : group.candidates) {
    if (candidate.reward != first) {
      return false;
    }
  }
  return true;
}

std::size_t env_interaction_count(const AugmentationGroup&) { return 0; }

std::size_t inference_count(const AugmentationGroup& group) {
  // Candidate 0 is the replayed reference action, not a fresh inference.
  return group.candidates.empty() ? 0 : group.candidates.size() - 1;
}

}  // namespace steprl
