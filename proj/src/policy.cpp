#include "steprl/policy.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace steprl {

namespace {

void check_config(const UpdateConfig& config) {
  if (!(config.learning_rate > 0.0)) {
    throw std::invalid_argument("learning rate must be positive");
  }
  if (!(config.clip_epsilon > 0.0 && config.clip_epsilon < 1.0)) {
    throw std::invalid_argument("clip epsilon must lie strictly in (0, 1)");
  }
  if (!(config.kl_coefficient >= 0.0)) {
    throw std::invalid_argument("KL coefficient must be non-negative");
  }
  if (config.minibatch_size < 1) {
    throw std::invalid_argument("minibatch size must be at least 1");
  }
}

double log_sum_exp(std::span<const double> xs) {
  double max = -std::numeric_limits<double>::infinity();
  for (double x : xs) {
    max = std::max(max, x);
  }
  double sum = 0.0;
  for (double x : xs) {
    sum += std::exp(x - max);
  }
  return max + std::log(sum);
}

std::vector<double> log_softmax(std::span<const double> logits) {
  const double lse = log_sum_exp(logits);
  std::vector<double> out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = logits[i] - lse;
  }
  return out;
}

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> out = log_softmax(logits);
  for (double& x : out) {
    x = std::exp(x);
  }
  return out;
}

void check_surrogate_inputs(std::span<const double> logits,
                            std::span<const double> snapshot_logits,
                            int action_index, double advantage) {
  if (logits.empty() || logits.size() != snapshot_logits.size()) {
    throw std::invalid_argument("surrogate: logit vectors must match and be nonempty");
  }
  if (action_index < 0 || static_cast<std::size_t>(action_index) >= logits.size()) {
    throw std::invalid_argument("surrogate: action index out of range");
  }
  if (!std::isfinite(advantage)) {
    throw std::invalid_argument("surrogate: advantage must be finite");
  }
}

}  // namespace

SurrogateParts surrogate_parts(std::span<const double> logits,
                               std::span<const double> snapshot_logits,
                               int action_index, double advantage,
                               const UpdateConfig& config) {
  check_config(config);
  check_surrogate_inputs(logits, snapshot_logits, action_index, advantage);

  const std::vector<double> lp = log_softmax(logits);
  const std::vector<double> lq = log_softmax(snapshot_logits);

  SurrogateParts parts;
  parts.ratio = std::exp(lp[action_index] - lq[action_index]);
  const double plain = parts.ratio * advantage;
  const double clamped = std::clamp(parts.ratio, 1.0 - config.clip_epsilon,
                                    1.0 + config.clip_epsilon) *
                         advantage;
  parts.clipped = plain > clamped;

  parts.kl = 0.0;
  for (std::size_t k = 0; k < lp.size(); ++k) {
    parts.kl += std::exp(lp[k]) * (lp[k] - lq[k]);
  }
  parts.kl = std::max(parts.kl, 0.0);  // guard tiny negative rounding

  parts.value = std::min(plain, clamped) - config.kl_coefficient * parts.kl;
  return parts;
}

double surrogate_value(std::span<const double> logits,
                       std::span<const double> snapshot_logits,
                       int action_index, double advantage,
                       const UpdateConfig& config) {
  return surrogate_parts(logits, snapshot_logits, action_index, advantage, config)
      .value;
}

std::vector<double> surrogate_gradient(std::span<const double> logits,
                                       std::span<const double> snapshot_logits,
                                       int action_index, double advantage,
                                       const UpdateConfig& config) {
  check_config(config);
  check_surrogate_inputs(logits, snapshot_logits, action_index, advantage);

  const std::vector<double> lp = log_softmax(logits);
  const std::vector<double> lq = log_softmax(snapshot_logits);
  const std::size_t n = lp.size();

  std::vector<double> p(n);
  for (std::size_t k = 0; k < n; ++k) {
    p[k] = std::exp(lp[k]);
  }
  const double ratio = std::exp(lp[action_index] - lq[action_index]);

  std::vector<double> grad(n, 0.0);

  // Ratio term. When the plain ratio branch is active the derivative is the
  // usual policy-gradient form scaled by the ratio; when the clipped branch
  // wins, the clamp is saturated and the term is locally constant.
  const double plain = ratio * advantage;
  const double clamped = std::clamp(ratio, 1.0 - config.clip_epsilon,
                                    1.0 + config.clip_epsilon) *
                         advantage;
  if (plain <= clamped) {
    for (std::size_t j = 0; j < n; ++j) {
      const double indicator = j == static_cast<std::size_t>(action_index) ? 1.0 : 0.0;
      grad[j] = advantage * ratio * (indicator - p[j]);
    }
  }

  // KL penalty term: d/dz_j KL(p || q) = p_j * ((lp_j - lq_j) - KL).
  if (config.kl_coefficient > 0.0) {
    double kl = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      kl += p[k] * (lp[k] - lq[k]);
    }
    for (std::size_t j = 0; j < n; ++j) {
      grad[j] -= config.kl_coefficient * p[j] * ((lp[j] - lq[j]) - kl);
    }
  }
  return grad;
}

TabularSoftmaxPolicy::TabularSoftmaxPolicy(int action_count,
                                           std::size_t keep_responses,
                                           std::size_t keep_observations)
    : action_count_(action_count),
      keep_responses_(keep_responses),
      keep_observations_(keep_observations) {
  if (action_count < 2) {
    throw std::invalid_argument("policy needs an alphabet of at least 2 actions");
  }
}

TabularSoftmaxPolicy::Fingerprint TabularSoftmaxPolicy::fingerprint(
    const State& state) const {
  const State cut = truncate_history(state, keep_responses_, keep_observations_);
  Fingerprint fp;
  fp.task = cut.task.value;
  fp.responses = cut.past_responses;
  fp.observations = cut.past_observations;
  fp.observation = cut.observation;
  return fp;
}

std::vector<double> TabularSoftmaxPolicy::state_logits(const State& state) const {
  const auto it = logits_.find(fingerprint(state));
  if (it == logits_.end()) {
    return std::vector<double>(static_cast<std::size_t>(action_count_), 0.0);
  }
  return it->second;
}

std::vector<double> TabularSoftmaxPolicy::state_probabilities(
    const State& state) const {
  return softmax(state_logits(state));
}

void TabularSoftmaxPolicy::set_state_logits(const State& state,
                                            std::vector<double> logits) {
  if (logits.size() != static_cast<std::size_t>(action_count_)) {
    throw std::invalid_argument("set_state_logits: wrong logit count");
  }
  for (double x : logits) {
    if (!std::isfinite(x)) {
      throw std::invalid_argument("set_state_logits: logits must be finite");
    }
  }
  logits_.insert_or_assign(fingerprint(state), std::move(logits));
}

Action TabularSoftmaxPolicy::sample_action(const State& state, double temperature,
                                           Rng& rng) const {
  if (!(temperature >= 0.0)) {
    throw std::invalid_argument("temperature must be non-negative");
  }
  const std::vector<double> logits = state_logits(state);
  if (temperature == 0.0) {
    // Greedy with ties broken toward the lowest token.
    const auto it = std::max_element(logits.begin(), logits.end());
    return Action{static_cast<Token>(it - logits.begin())};
  }
  std::vector<double> scaled(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    scaled[i] = logits[i] / temperature;
  }
  const std::vector<double> probs = softmax(scaled);
  return Action{static_cast<Token>(rng.categorical(probs))};
}

double TabularSoftmaxPolicy::action_log_prob(const State& state,
                                             const Action& action) const {
  if (action.token < 0 || action.token >= action_count_) {
    throw std::invalid_argument("action_log_prob: action outside the alphabet");
  }
  const std::vector<double> lp = log_softmax(state_logits(state));
  return lp[static_cast<std::size_t>(action.token)];
}

void TabularSoftmaxPolicy::save(std::ostream& out) const {
  nlohmann::json header{{"action_count", action_count_},
                        {"keep_responses", keep_responses_},
                        {"keep_observations", keep_observations_},
                        {"entries", logits_.size()}};
  out << header.dump() << '\n';
  for (const auto& [fp, logits] : logits_) {
    nlohmann::json entry{{"task", fp.task},
                         {"responses", fp.responses},
                         {"observations", fp.observations},
                         {"observation", fp.observation},
                         {"logits", logits}};
    out << entry.dump() << '\n';
  }
}

TabularSoftmaxPolicy TabularSoftmaxPolicy::load(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw std::invalid_argument("policy checkpoint is empty");
  }
  const nlohmann::json header = nlohmann::json::parse(line);
  TabularSoftmaxPolicy policy(header.at("action_count").get<int>(),
                              header.at("keep_responses").get<std::size_t>(),
                              header.at("keep_observations").get<std::size_t>());
  const std::size_t entries = header.at("entries").get<std::size_t>();
  for (std::size_t i = 0; i < entries; ++i) {
    if (!std::getline(in, line)) {
      throw std::invalid_argument("policy checkpoint is truncated");
    }
    const nlohmann::json entry = nlohmann::json::parse(line);
    Fingerprint fp;
    fp.task = entry.at("task").get<std::int32_t>();
    entry.at("responses").get_to(fp.responses);
    entry.at("observations").get_to(fp.observations);
    fp.observation = entry.at("observation").get<Token>();
    std::vector<double> logits = entry.at("logits").get<std::vector<double>>();
    if (logits.size() != static_cast<std::size_t>(policy.action_count_)) {
      throw std::invalid_argument("policy checkpoint entry has wrong logit count");
    }
    policy.logits_.insert_or_assign(std::move(fp), std::move(logits));
  }
  return policy;
}

UpdateStats update(TabularSoftmaxPolicy& policy,
                   const std::vector<StepSample>& samples,
                   const TabularSoftmaxPolicy& snapshot,
                   const UpdateConfig& config) {
  check_config(config);
  if (policy.action_count_ != snapshot.action_count_) {
    throw std::invalid_argument("update: policy and snapshot alphabets differ");
  }

  UpdateStats stats;
  stats.sample_count = samples.size();
  if (samples.empty()) {
    return stats;
  }

  const std::size_t minibatch = static_cast<std::size_t>(config.minibatch_size);
  double ratio_sum = 0.0;
  double kl_sum = 0.0;
  std::size_t clipped = 0;

  for (std::size_t begin = 0; begin < samples.size(); begin += minibatch) {
    const std::size_t end = std::min(begin + minibatch, samples.size());
    // Summed per-state gradients for this minibatch.
    std::map<TabularSoftmaxPolicy::Fingerprint, std::vector<double>> grads;
    for (std::size_t i = begin; i < end; ++i) {
      const StepSample& sample = samples[i];
      if (sample.action.token < 0 || sample.action.token >= policy.action_count_) {
        throw std::invalid_argument("update: sample action outside the alphabet");
      }
      if (!std::isfinite(sample.advantage)) {
        throw std::invalid_argument("update: sample advantage must be finite");
      }
      const std::vector<double> current = policy.state_logits(sample.state);
      const std::vector<double> old = snapshot.state_logits(sample.state);

      const SurrogateParts parts = surrogate_parts(
          current, old, sample.action.token, sample.advantage, config);
      ratio_sum += parts.ratio;
      kl_sum += parts.kl;
      clipped += parts.clipped ? 1 : 0;

      const std::vector<double> grad = surrogate_gradient(
          current, old, sample.action.token, sample.advantage, config);
      auto [it, inserted] = grads.try_emplace(
          policy.fingerprint(sample.state),
          std::vector<double>(static_cast<std::size_t>(policy.action_count_), 0.0));
      for (std::size_t j = 0; j < grad.size(); ++j) {
        it->second[j] += grad[j];
      }
    }
    for (auto& [fp, grad] : grads) {
      auto [it, inserted] = policy.logits_.try_emplace(
          fp,
          std::vector<double>(static_cast<std::size_t>(policy.action_count_), 0.0));
      for (std::size_t j = 0; j < grad.size(); ++j) {
        it->second[j] += config.learning_rate * grad[j];
      }
    }
    stats.minibatches += 1;
  }

  const double n = static_cast<double>(samples.size());
  stats.mean_ratio = ratio_sum / n;
  stats.mean_kl = kl_sum / n;
  stats.clipped_fraction = static_cast<double>(clipped) / n;
  return stats;
}

}  // namespace steprl
