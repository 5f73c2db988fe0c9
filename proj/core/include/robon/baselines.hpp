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

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "robon/rng.hpp"
#include "robon/scoring.hpp"
#include "robon/sources.hpp"

namespace robon {

// Hard best-of-n: highest normalized reward, earliest on ties.
std::size_t bon(std::span<const ScoredCandidate> candidates);

// Samples index j with probability softmax(beta * reward)_j.
std::size_t soft_bon(std::span<const ScoredCandidate> candidates, double beta, Rng& rng);
std::size_t soft_bon(std::span<const ScoredCandidate> candidates, double beta,
                     std::uint64_t seed);

// Largest group of equal normalized answers (absent answers are singleton
// groups), ties broken by higher total reward and then by the earliest first
// member. Returns the group's highest-reward member, earliest on ties.
std::size_t majority_vote(std::span<const ScoredCandidate> candidates);

// A pool of draws across the portfolio with the member chosen from it.
struct PoolDraw {
  std::vector<ScoredCandidate> pool;  // model order, then draw order
  std::size_t selected = 0;
  std::vector<std::size_t> generations;  // per model
};

// Per-model draw counts for a budget of n: n / M each, with the remainder
// handed one apiece to a seeded random subset of models. n = 1 therefore
// draws once from a random model.
std::vector<std::size_t> equal_split_allocation(std::size_t num_models, std::size_t n,
                                                std::uint64_t seed, const std::string& prompt_id);

// Draws allocation[i] responses (draw indices 1..allocation[i]) from model i.
PoolDraw draw_pool(std::span<const SourcePtr> sources, const Prompt& prompt,
                   std::span<const std::size_t> allocation, const RewardFn& reward_fn);

// Equal-share portfolio baseline: pool the split draws and take bon().
PoolDraw equal_split(std::span<const SourcePtr> sources, const Prompt& prompt, std::size_t n,
                     const RewardFn& reward_fn, std::uint64_t seed);

// Arithmetic mean of per-model accuracies. Throws kEmptySet.
double average_metric(std::span<const double> per_model_accuracies);

}  // namespace robon
