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

#include <cstddef>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "robon/answers.hpp"

namespace robon {

// One response together with its normalized reward, as committed to (or
// proposed for) a candidate set.
struct ScoredCandidate {
  std::string response_text;
  NormalizedAnswer answer;
  double reward = 0.0;      // normalized, in [0,1]
  std::string model_id;
  std::size_t model_index = 0;  // position in the portfolio
  std::size_t draw_index = 1;   // 1-based per-model sample counter
  bool recycled = false;        // served by a replay source with replacement
};

// Ordered multiset of selected candidates. Keeps a count of each present
// answer so agreement lookups are O(1).
class CandidateSet {
 public:
  CandidateSet() = default;
  explicit CandidateSet(std::vector<ScoredCandidate> items);

  void push_back(ScoredCandidate c);

  std::size_t size() const noexcept { return items_.size(); }
  bool empty() const noexcept { return items_.empty(); }
  const std::vector<ScoredCandidate>& items() const noexcept { return items_; }
  const ScoredCandidate& operator[](std::size_t i) const { return items_[i]; }

  // Number of members whose answer equals `a` (0 for an absent answer).
  std::size_t count_of(const NormalizedAnswer& a) const;

 private:
  std::vector<ScoredCandidate> items_;
  std::unordered_map<std::string, std::size_t> answer_counts_;
};

// Mixing weight alpha between reward and agreement, and inverse temperature
// beta of the reward softmax. Constructor enforces 0 <= alpha <= 1 and a
// finite beta > 0 (kConfigError otherwise).
class ScoringParams {
 public:
  static constexpr double kDefaultAlpha = 0.4;
  static constexpr double kDefaultBeta = 1e5;

  ScoringParams() = default;
  ScoringParams(double alpha, double beta);

  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }

 private:
  double alpha_ = kDefaultAlpha;
  double beta_ = kDefaultBeta;
};

// Which quantity ranks model heads inside the router.
enum class ScoreRule {
  // Score of the tentative set S + {candidate}. The default.
  kMarginalSet,
  // alpha * r + (1 - alpha) * agreement of the candidate alone within the
  // tentative set. Ablation only.
  kPerCandidate,
};

// exp(beta * (r - max r)) normalized to sum to one. Throws kEmptySet or
// kNonFiniteReward.
std::vector<double> softmax_weights(std::span<const double> rewards, double beta);

// Fraction of the set whose answer matches member `index` (0-based). Absent
// answers score 0, self-term included. Throws kIndexOutOfRange.
double agreement(const CandidateSet& set, std::size_t index);

// sum_l w_l * (alpha * r_l + (1 - alpha) * agreement_l). Throws kEmptySet.
double score(const CandidateSet& set, const ScoringParams& params);

// score(set + {candidate}) without copying or mutating `set`. Bit-identical
// to building the tentative set and calling score().
double marginal_score(const CandidateSet& set, const ScoredCandidate& candidate,
                      const ScoringParams& params);

// Index of the highest-reward candidate, earliest on ties. This is the hard
// best-of-n rule shared by the router's final pick and the baselines. Throws
// kEmptySet.
std::size_t argmax_reward(std::span<const ScoredCandidate> candidates);

// The per-candidate ablation variant; see ScoreRule::kPerCandidate.
double per_candidate_score(const CandidateSet& set, const ScoredCandidate& candidate,
                           const ScoringParams& params);

}  // namespace robon
