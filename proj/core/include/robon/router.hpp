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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "robon/scoring.hpp"
#include "robon/sources.hpp"

namespace robon {

enum class TieBreak {
  kLowestModelIndex,
  kSeededRandom,
};

struct RouterConfig {
  std::size_t n = 1;  // total generation budget per prompt
  ScoringParams params;
  std::uint64_t seed = 0;
  TieBreak tie_break = TieBreak::kLowestModelIndex;
  ScoreRule rule = ScoreRule::kMarginalSet;

  // Requires n == 1 or n >= num_models. Throws kConfigError for n == 0 or no
  // models, kBudgetTooSmall for 1 < n < num_models.
  void validate(std::size_t num_models) const;
};

// Per-model routing state: head pointer c_i, the cached head that has been
// drawn but not committed yet, and the number of generations spent.
struct HeadState {
  explicit HeadState(std::size_t num_models)
      : pointer(num_models, 1), head(num_models), generations(num_models, 0) {}

  std::vector<std::size_t> pointer;
  std::vector<std::optional<ScoredCandidate>> head;
  std::vector<std::size_t> generations;

  std::size_t total_generations() const;
};

// Identity of a committed or selected candidate.
struct CandidateDigest {
  std::size_t model_index = 0;
  std::string model_id;
  std::size_t draw_index = 0;
  double reward = 0.0;
  NormalizedAnswer answer;

  static CandidateDigest of(const ScoredCandidate& c);
  friend bool operator==(const CandidateDigest&, const CandidateDigest&) = default;
};

struct RoundRecord {
  std::size_t round = 0;       // 1-based
  std::vector<double> deltas;  // score of S + head_i, per model
  std::size_t chosen_model = 0;
  CandidateDigest chosen;

  friend bool operator==(const RoundRecord&, const RoundRecord&) = default;
};

struct RouteTrace {
  std::string prompt_id;
  std::size_t n = 0;
  std::size_t num_models = 0;
  bool random_choice = false;  // n == 1: one draw from a uniformly chosen model
  std::vector<RoundRecord> rounds;
  std::vector<CandidateDigest> final_set;  // S in commit order
  CandidateDigest selected;
  std::vector<std::size_t> generations;  // per model

  // Models credited with a selection: each committed S entry, or the single
  // random-choice draw when n == 1.
  std::vector<std::size_t> committed_models() const;

  friend bool operator==(const RouteTrace&, const RouteTrace&) = default;
};

struct RouteResult {
  ScoredCandidate selected;
  RouteTrace trace;
};

// Routed online best-of-n for one prompt.
//
// With n == 1 a single response is drawn from a model chosen uniformly at
// random. Otherwise n - M + 1 rounds run. Each round, every model without a
// cached head draws one; each head is scored as score(S + {head}); the best
// head is committed to S and only that model's cache is cleared. Unchosen
// heads carry over, so exactly n responses are drawn in total. The answer is
// the highest-reward member of S.
RouteResult robon_select(std::span<const SourcePtr> sources, const Prompt& prompt,
                         const RewardFn& reward_fn, const RouterConfig& cfg);

// Highest normalized reward in the set, earliest insertion on ties. Throws
// kEmptySet.
std::size_t final_bon(const CandidateSet& set);

// One JSON object per round, followed by one summary object.
std::string trace_to_jsonl(const RouteTrace& trace);

}  // namespace robon
