#include "steprl/core.hpp"

#include <algorithm>

namespace steprl {

namespace {

std::vector<Token> tail(const std::vector<Token>& tokens, std::size_t keep) {
  const std::size_t n = std::min(keep, tokens.size());
  return std::vector<Token>(tokens.end() - static_cast<std::ptrdiff_t>(n),
                            tokens.end());
}

}  // namespace

State truncate_history(const State& state, std::size_t keep_responses,
                       std::size_t keep_observations) {
  State out;
  out.task = state.task;
  out.past_responses = tail(state.past_responses, keep_responses);
  out.past_observations = tail(state.past_observations, keep_observations);
  out.observation = state.observation;
  return out;
}

}  // namespace steprl
