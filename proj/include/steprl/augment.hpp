#pragma once

#include <functional>
#include <vector>

#include "steprl/core.hpp"
#include "steprl/policy.hpp"
#include "steprl/rng.hpp"

namespace steprl {

// One alternative action proposed at a reference state, scored by whether it
// reproduces the reference action.
struct AugmentationCandidate {
  Action action;
  double reward = 0.0;  // 1 when the action matches the reference, else 0
};

// A reference step together with locally regenerated alternatives.
// Candidate 0 is always the reference action itself, with reward 1.
struct AugmentationGroup {
  StepSample reference;
  std::vector<AugmentationCandidate> candidates;
  std::vector<double> advantages;  // filled by aug_advantages
};

// Pluggable equivalence test between a candidate and the reference action.
using ActionMatcher = std::function<bool(const Action&, const Action&)>;

bool exact_match(const Action& candidate, const Action& reference);

// Samples eligible for augmentation: source success rate at or below the low
// threshold. Order is preserved.
std::vector<StepSample> select_for_augmentation(
    const std::vector<StepSample>& samples, double low_threshold);

// Builds the local comparison group for one reference step: the reference
// action plus group_size/2 - 1 alternatives sampled from the policy at the
// same state. Each candidate's reward is 1 exactly when `matches` accepts it
// against the reference action. Costs one policy inference per alternative
// and no environment interaction.
AugmentationGroup build_group(const StepSample& reference, const Policy& policy,
                              int group_size, double temperature, Rng& rng,
                              const ActionMatcher& matches = exact_match);

// Group-normalized advantages over the candidate rewards.
std::vector<double> aug_advantages(const AugmentationGroup& group);

// True when every candidate earned the same reward; such a group normalizes
// to all zeros and contributes no gradient signal.
bool is_inert(const AugmentationGroup& group);

// Environment interactions consumed by the group. Always zero: augmentation
// is replay-free by construction.
std::size_t env_interaction_count(const AugmentationGroup& group);

// Policy inferences consumed by the group (the regenerated alternatives).
std::size_t inference_count(const AugmentationGroup& group);

}  // namespace steprl
