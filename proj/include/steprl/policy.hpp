#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <vector>

#include "steprl/core.hpp"
#include "steprl/rng.hpp"

namespace steprl {

// Behavior contract for action selection over a fixed discrete alphabet.
class Policy {
 public:
  virtual ~Policy() = default;

  virtual int action_count() const = 0;

  // Temperature 0 picks the greedy action, breaking ties toward the lowest
  // token; a positive temperature samples from softmax(logits / temperature).
  virtual Action sample_action(const State& state, double temperature,
                               Rng& rng) const = 0;

  virtual double action_log_prob(const State& state, const Action& action) const = 0;
};

// Optimization settings for one policy update pass.
struct UpdateConfig {
  double learning_rate = 0.1;
  double clip_epsilon = 0.2;
  double kl_coefficient = 0.001;
  double temperature_train = 0.7;
  double temperature_eval = 0.0;
  int minibatch_size = 256;
};

// Diagnostics from one update pass.
struct UpdateStats {
  std::size_t sample_count = 0;
  std::size_t minibatches = 0;
  double mean_ratio = 0.0;
  double mean_kl = 0.0;
  double clipped_fraction = 0.0;
};

// Per-sample pieces of the clipped-ratio objective, exposed so tests can
// check the gradient against finite differences term by term.
struct SurrogateParts {
  double value = 0.0;   // min(r*A, clip(r)*A) - kl_coefficient * KL
  double ratio = 0.0;   // current probability over snapshot probability
  double kl = 0.0;      // KL(current || snapshot) at this state
  bool clipped = false; // ratio fell outside the clip band with the worse value
};

// Clipped-ratio surrogate with a KL penalty toward the snapshot distribution,
// for a single state given its current and snapshot logits.
SurrogateParts surrogate_parts(std::span<const double> logits,
                               std::span<const double> snapshot_logits,
                               int action_index, double advantage,
                               const UpdateConfig& config);

double surrogate_value(std::span<const double> logits,
                       std::span<const double> snapshot_logits,
                       int action_index, double advantage,
                       const UpdateConfig& config);

// Exact gradient of surrogate_value with respect to the current logits.
std::vector<double> surrogate_gradient(std::span<const double> logits,
                                       std::span<const double> snapshot_logits,
                                       int action_index, double advantage,
                                       const UpdateConfig& config);

// Tabular softmax policy keyed by a fingerprint of (task, truncated history,
// current observation). States the table has never seen behave as all-zero
// logits, i.e. a uniform distribution, so the policy needs no enumeration of
// the state space up front. The truncation caps decide how aggressively
// distinct histories collapse onto the same table entry.
class TabularSoftmaxPolicy : public Policy {
 public:
  TabularSoftmaxPolicy(int action_count, std::size_t keep_responses,
                       std::size_t keep_observations);

  int action_count() const override { return action_count_; }
  std::size_t keep_responses() const { return keep_responses_; }
  std::size_t keep_observations() const { return keep_observations_; }

  Action sample_action(const State& state, double temperature,
                       Rng& rng) const override;
  double action_log_prob(const State& state, const Action& action) const override;

  // Logits / probabilities for the state's table entry (zeros / uniform when
  // the state was never updated).
  std::vector<double> state_logits(const State& state) const;
  std::vector<double> state_probabilities(const State& state) const;
  void set_state_logits(const State& state, std::vector<double> logits);

  // Number of distinct fingerprints with stored logits.
  std::size_t table_size() const { return logits_.size(); }

  // Checkpoint format: one JSON document per line; first a header with the
  // construction parameters, then one line per table entry.
  void save(std::ostream& out) const;
  static TabularSoftmaxPolicy load(std::istream& in);

  friend UpdateStats update(TabularSoftmaxPolicy& policy,
                            const std::vector<StepSample>& samples,
                            const TabularSoftmaxPolicy& snapshot,
                            const UpdateConfig& config);

 private:
  struct Fingerprint {
    std::int32_t task = -1;
    std::vector<Token> responses;
    std::vector<Token> observations;
    Token observation = 0;

    friend auto operator<=>(const Fingerprint&, const Fingerprint&) = default;
  };

  Fingerprint fingerprint(const State& state) const;

  int action_count_;
  std::size_t keep_responses_;
  std::size_t keep_observations_;
  std::map<Fingerprint, std::vector<double>> logits_;
};

// One gradient-ascent pass over `samples` against the frozen snapshot (the
// policy the samples were drawn from). Samples are split into minibatches of
// config.minibatch_size in order; within a minibatch, per-state gradients
// are summed and applied once with the configured learning rate, so the
// clip band caps how far any one state can move per minibatch.
UpdateStats update(TabularSoftmaxPolicy& policy,
                   const std::vector<StepSample>& samples,
                   const TabularSoftmaxPolicy& snapshot,
                   const UpdateConfig& config);

}  // namespace steprl
