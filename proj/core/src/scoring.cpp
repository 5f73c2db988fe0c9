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

#include "robon/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "robon/errors.hpp"

namespace robon {

CandidateSet::CandidateSet(std::vector<ScoredCandidate> items) {
  items_.reserve(items.size());
  for (auto& c : items) push_back(std::move(c));
}

void CandidateSet::push_back(ScoredCandidate c) {
  if (c.answer.present) ++answer_counts_[c.answer.value];
  items_.push_back(std::move(c));
}

std::size_t CandidateSet::count_of(const NormalizedAnswer& a) const {
  if (!a.present) return 0;
  auto it = answer_counts_.find(a.value);
  return it == answer_counts_.end() ? 0 : it->second;
}

ScoringParams::ScoringParams(double alpha, double beta) : alpha_(alpha), beta_(beta) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw Error(ErrorCode::kConfigError, "alpha must lie in [0,1], got " + std::to_string(alpha));
  }
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw Error(ErrorCode::kConfigError, "beta must be finite and > 0, got " + std::to_string(beta));
  }
}

std::vector<double> softmax_weights(std::span<const double> rewards, double beta) {
  if (rewards.empty()) throw Error(ErrorCode::kEmptySet, "softmax over an empty reward list");
  double top = -std::numeric_limits<double>::infinity();
  for (double r : rewards) {
    if (!std::isfinite(r)) throw Error(ErrorCode::kNonFiniteReward, "softmax input is not finite");
    top = std::max(top, r);
  }
  std::vector<double> w(rewards.size());
  double z = 0.0;
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    w[i] = std::exp(beta * (rewards[i] - top));
    z += w[i];
  }
  for (double& x : w) x /= z;
  return w;
}

double agreement(const CandidateSet& set, std::size_t index) {
  if (index >= set.size()) {
    throw Error(ErrorCode::kIndexOutOfRange, "agreement index " + std::to_string(index) +
                                                 " for a set of size " + std::to_string(set.size()));
  }
  return static_cast<double>(set.count_of(set[index].answer)) / static_cast<double>(set.size());
}

namespace {

// Shared kernel of score() and marginal_score(): the set's members in order,
// optionally followed by one extra candidate. Both entry points evaluate the
// same expression sequence so that their results agree bit for bit.
double score_impl(const CandidateSet& set, const ScoredCandidate* extra,
                  const ScoringParams& params) {
  const std::size_t base = set.size();
  const std::size_t s = base + (extra ? 1 : 0);
  if (s == 0) throw Error(ErrorCode::kEmptySet, "score of an empty candidate set");

  auto member = [&](std::size_t i) -> const ScoredCandidate& {
    return i < base ? set[i] : *extra;
  };
  auto count = [&](const NormalizedAnswer& a) -> std::size_t {
    if (!a.present) return 0;
    return set.count_of(a) + (extra && answers_equal(extra->answer, a) ? 1 : 0);
  };

  std::vector<double> rewards(s);
  for (std::size_t i = 0; i < s; ++i) rewards[i] = member(i).reward;
  const std::vector<double> w = softmax_weights(rewards, params.beta());

  const double alpha = params.alpha();
  const double sd = static_cast<double>(s);
  double total = 0.0;
  for (std::size_t i = 0; i < s; ++i) {
    const auto& c = member(i);
    const double agree = static_cast<double>(count(c.answer)) / sd;
    total += w[i] * (alpha * c.reward + (1.0 - alpha) * agree);
  }
  return total;
}

}  // namespace

double score(const CandidateSet& set, const ScoringParams& params) {
  return score_impl(set, nullptr, params);
}

double marginal_score(const CandidateSet& set, const ScoredCandidate& candidate,
                      const ScoringParams& params) {
  return score_impl(set, &candidate, params);
}

std::size_t argmax_reward(std::span<const ScoredCandidate> candidates) {
  if (candidates.empty()) throw Error(ErrorCode::kEmptySet, "best-of-n over no candidates");
  std::size_t best = 0;
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    if (candidates[i].reward > candidates[best].reward) best = i;
  }
  return best;
}

double per_candidate_score(const CandidateSet& set, const ScoredCandidate& candidate,
                           const ScoringParams& params) {
  const double s = static_cast<double>(set.size() + 1);
  const double matches =
      candidate.answer.present ? static_cast<double>(set.count_of(candidate.answer) + 1) : 0.0;
  return params.alpha() * candidate.reward + (1.0 - params.alpha()) * (matches / s);
}

}  // namespace robon
