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

#include "robon/router.hpp"

#include <numeric>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "robon/errors.hpp"
#include "robon/rng.hpp"

namespace robon {
namespace {

constexpr std::uint64_t kRandomChoiceStream = 1;
constexpr std::uint64_t kTieBreakStream = 2;

nlohmann::ordered_json digest_json(const CandidateDigest& d) {
  return {{"model", d.model_index},
          {"model_id", d.model_id},
          {"draw_index", d.draw_index},
          {"reward", d.reward},
          {"answer", d.answer.present ? nlohmann::ordered_json(d.answer.value) : nlohmann::ordered_json(nullptr)}};
}

}  // namespace

void RouterConfig::validate(std::size_t num_models) const {
  if (num_models == 0) throw Error(ErrorCode::kConfigError, "router needs at least one model");
  if (n == 0) throw Error(ErrorCode::kConfigError, "budget n must be positive");
  if (n > 1 && n < num_models) {
    throw Error(ErrorCode::kBudgetTooSmall,
                "budget n=" + std::to_string(n) + " with " + std::to_string(num_models) +
                    " models; routing needs n = 1 or n >= number of models");
  }
}

std::size_t HeadState::total_generations() const {
  return std::accumulate(generations.begin(), generations.end(), std::size_t{0});
}

CandidateDigest CandidateDigest::of(const ScoredCandidate& c) {
  return {c.model_index, c.model_id, c.draw_index, c.reward, c.answer};
}

std::vector<std::size_t> RouteTrace::committed_models() const {
  if (random_choice) return {selected.model_index};
  std::vector<std::size_t> out;
  out.reserve(final_set.size());
  for (const auto& d : final_set) out.push_back(d.model_index);
  return out;
}

std::size_t final_bon(const CandidateSet& set) {
  return argmax_reward(set.items());
}

RouteResult robon_select(std::span<const SourcePtr> sources, const Prompt& prompt,
                         const RewardFn& reward_fn, const RouterConfig& cfg) {
  const std::size_t m = sources.size();
  cfg.validate(m);

  HeadState state(m);
  RouteTrace trace;
  trace.prompt_id = prompt.id;
  trace.n = cfg.n;
  trace.num_models = m;

  auto draw_head = [&](std::size_t i) {
    state.head[i] = draw_scored(*sources[i], i, prompt, state.pointer[i], reward_fn);
    ++state.generations[i];
  };

  if (cfg.n == 1) {
    Rng rng = make_rng({cfg.seed, fnv1a(prompt.id), kRandomChoiceStream});
    const std::size_t pick = std::uniform_int_distribution<std::size_t>(0, m - 1)(rng);
    draw_head(pick);
    trace.random_choice = true;
    trace.selected = CandidateDigest::of(*state.head[pick]);
    trace.generations = state.generations;
    return {std::move(*state.head[pick]), std::move(trace)};
  }

  Rng tie_rng = make_rng({cfg.seed, fnv1a(prompt.id), kTieBreakStream});
  CandidateSet set;
  std::vector<double> deltas(m);
  std::vector<std::size_t> tied;
  const std::size_t rounds = cfg.n - m + 1;

  for (std::size_t t = 1; t <= rounds; ++t) {
    for (std::size_t i = 0; i < m; ++i) {
      if (!state.head[i]) draw_head(i);
      deltas[i] = cfg.rule == ScoreRule::kMarginalSet
                      ? marginal_score(set, *state.head[i], cfg.params)
                      : per_candidate_score(set, *state.head[i], cfg.params);
    }

    std::size_t chosen = 0;
    for (std::size_t i = 1; i < m; ++i) {
      if (deltas[i] > deltas[chosen]) chosen = i;
    }
    if (cfg.tie_break == TieBreak::kSeededRandom) {
      tied.clear();
      for (std::size_t i = 0; i < m; ++i) {
        if (deltas[i] == deltas[chosen]) tied.push_back(i);
      }
      if (tied.size() > 1) {
        chosen = tied[std::uniform_int_distribution<std::size_t>(0, tied.size() - 1)(tie_rng)];
      }
    }

    RoundRecord rec;
    rec.round = t;
    rec.deltas = deltas;
    rec.chosen_model = chosen;
    rec.chosen = CandidateDigest::of(*state.head[chosen]);
    trace.rounds.push_back(std::move(rec));

    set.push_back(std::move(*state.head[chosen]));
    state.head[chosen].reset();
    ++state.pointer[chosen];
  }

  const std::size_t best = final_bon(set);
  for (const auto& c : set.items()) trace.final_set.push_back(CandidateDigest::of(c));
  trace.selected = trace.final_set[best];
  trace.generations = state.generations;
  return {set[best], std::move(trace)};
}

std::string trace_to_jsonl(const RouteTrace& trace) {
  std::ostringstream out;
  for (const auto& r : trace.rounds) {
    nlohmann::ordered_json j;
    j["prompt_id"] = trace.prompt_id;
    j["round"] = r.round;
    j["deltas"] = r.deltas;
    j["chosen_model"] = r.chosen_model;
    j["chosen"] = digest_json(r.chosen);
    j["set_size"] = r.round;
    out << j.dump() << '\n';
  }
  nlohmann::ordered_json summary;
  summary["prompt_id"] = trace.prompt_id;
  summary["summary"] = true;
  summary["n"] = trace.n;
  summary["num_models"] = trace.num_models;
  summary["random_choice"] = trace.random_choice;
  summary["rounds"] = trace.rounds.size();
  auto& set = summary["final_set"] = nlohmann::ordered_json::array();
  for (const auto& d : trace.final_set) set.push_back({d.model_index, d.draw_index});
  summary["selected"] = digest_json(trace.selected);
  summary["generations"] = trace.generations;
  out << summary.dump() << '\n';
  return out.str();
}

}  // namespace robon
