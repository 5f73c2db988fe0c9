// Copyright 2026 The robon Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "robon/baselines.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <string>
#include <unordered_map>

#include "robon/errors.hpp"

namespace robon {
namespace {

constexpr std::uint64_t kRemainderStream = 3;

void require_non_empty(std::span<const ScoredCandidate> c, const char* what) {
  if (c.empty()) throw Error(ErrorCode::kEmptySet, std::string(what) + " over no candidates");
}

}  // namespace

std::size_t bon(std::span<const ScoredCandidate> candidates) {
  return argmax_reward(candidates);
}

std::size_t soft_bon(std::span<const ScoredCandidate> candidates, double beta, Rng& rng) {
  require_non_empty(candidates, "soft best-of-n");
  std::vector<double> rewards;
  rewards.reserve(candidates.size());
  for (const auto& c : candidates) rewards.push_back(c.reward);
  const auto w = softmax_weights(rewards, beta);
  return std::discrete_distribution<std::size_t>(w.begin(), w.end())(rng);
}

std::size_t soft_bon(std::span<const ScoredCandidate> candidates, double beta,
                     std::uint64_t seed) {
  Rng rng(seed);
  return soft_bon(candidates, beta, rng);
}

std::size_t majority_vote(std::span<const ScoredCandidate> candidates) {
  require_non_empty(candidates, "majority vote");

  struct Group {
    std::size_t first = 0;
    std::size_t count = 0;
    double reward_sum = 0.0;
    std::size_t best = 0;
  };
  std::vector<Group> groups;
  std::unordered_map<std::string, std::size_t> by_answer;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& c = candidates[i];
    std::size_t g = groups.size();
    if (c.answer.present) {
      auto [it, inserted] = by_answer.try_emplace(c.answer.value, groups.size());
      g = it->second;
    }
    if (g == groups.size()) groups.push_back({i, 0, 0.0, i});
    Group& grp = groups[g];
    ++grp.count;
    grp.reward_sum += c.reward;
    if (c.reward > candidates[grp.best].reward) grp.best = i;
  }

  // Groups are in first-member order, so keeping the first winner on full
  // ties realizes the earliest-insertion rule.
  const Group* win = &groups.front();
  for (const auto& g : groups) {
    if (g.count > win->count || (g.count == win->count && g.reward_sum > win->reward_sum)) {
      win = &g;
    }
  }
  return win->best;
}

std::vector<std::size_t> equal_split_allocation(std::size_t num_models, std::size_t n,
                                                std::uint64_t seed, const std::string& prompt_id) {
  if (num_models == 0) throw Error(ErrorCode::kConfigError, "equal split needs at least one model");
  if (n == 0) throw Error(ErrorCode::kConfigError, "budget n must be positive");
  std::vector<std::size_t> alloc(num_models, n / num_models);
  const std::size_t remainder = n % num_models;
  if (remainder > 0) {
    std::vector<std::size_t> order(num_models);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng = make_rng({seed, fnv1a(prompt_id), kRemainderStream});
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i = 0; i < remainder; ++i) ++alloc[order[i]];
  }
  return alloc;
}

PoolDraw draw_pool(std::span<const SourcePtr> sources, const Prompt& prompt,
                   std::span<const std::size_t> allocation, const RewardFn& reward_fn) {
  if (allocation.size() != sources.size()) {
    throw Error(ErrorCode::kConfigError, "allocation size does not match the portfolio");
  }
  PoolDraw out;
  out.generations.assign(sources.size(), 0);
  for (std::size_t i = 0; i < sources.size(); ++i) {
    for (std::size_t k = 1; k <= allocation[i]; ++k) {
      out.pool.push_back(draw_scored(*sources[i], i, prompt, k, reward_fn));
      ++out.generations[i];
    }
  }
  return out;
}

PoolDraw equal_split(std::span<const SourcePtr> sources, const Prompt& prompt, std::size_t n,
                     const RewardFn& reward_fn, std::uint64_t seed) {
  const auto alloc = equal_split_allocation(sources.size(), n, seed, prompt.id);
  PoolDraw out = draw_pool(sources, prompt, alloc, reward_fn);
  out.selected = bon(out.pool);
  return out;
}

double average_metric(std::span<const double> per_model_accuracies) {
  if (per_model_accuracies.empty()) {
    throw Error(ErrorCode::kEmptySet, "average over no accuracies");
  }
  return std::accumulate(per_model_accuracies.begin(), per_model_accuracies.end(), 0.0) /
         static_cast<double>(per_model_accuracies.size());
}

}  // namespace robon
