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
#include <utility>
#include <vector>

#include "robon/rewards.hpp"
#include "robon/router.hpp"
#include "robon/sources.hpp"

namespace robon {

enum class Method {
  kRobon,
  kBonSingle,  // best-of-n on one model of the portfolio
  kEqual,      // equal-share portfolio best-of-n
  kMajority,   // majority vote over the equal-share pool (or one model)
  kSoftBon,    // soft best-of-n over the equal-share pool (or one model)
};

std::string_view to_string(Method m);
// Accepts robon, bon, equal, majority, soft_bon. Throws kConfigError.
Method parse_method(std::string_view name);

struct EvalConfig {
  Method method = Method::kRobon;
  // Portfolio index. Required for kBonSingle; restricts kMajority and
  // kSoftBon to one model when set.
  std::optional<std::size_t> model;
  std::vector<std::size_t> n_values{16};
  double alpha = ScoringParams::kDefaultAlpha;
  double beta = ScoringParams::kDefaultBeta;
  std::size_t trials = 5;
  std::uint64_t base_seed = 0;
  std::vector<std::string> datasets;  // empty: every prompt
  bool recycle = false;               // honored by replay sources built from this config
  TieBreak tie_break = TieBreak::kLowestModelIndex;
  ScoreRule rule = ScoreRule::kMarginalSet;
  std::size_t jobs = 1;  // worker threads per trial; 0 means hardware concurrency

  // Throws kConfigError (or kBudgetTooSmall for routed budgets below M).
  void validate(std::size_t num_models) const;
};

struct ReportRow {
  std::string method;   // e.g. "robon", "equal", "bon:<model_id>"
  std::string dataset;  // dataset name, or "average" for the macro average
  std::size_t n = 0;
  double alpha = 0.0;
  double beta = 0.0;
  std::size_t trials = 0;
  double accuracy_mean = 0.0;
  double accuracy_sigma = 0.0;
  std::vector<double> shares;  // per portfolio model
  std::uint64_t total_generations = 0;  // summed over prompts and trials
  std::uint64_t recycled_draws = 0;
  std::vector<double> per_trial;

  friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

struct EvalReport {
  std::vector<std::string> model_ids;
  std::vector<ReportRow> rows;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

// Mean and sample standard deviation (ddof = 1; 0 for a single trial).
// Throws kEmptySet.
std::pair<double, double> accuracy_ci(std::span<const double> per_trial_accuracies);

// Share of committed selections per model, pooled over the traces. Throws
// kEmptySet when the traces commit nothing.
std::vector<double> model_shares(std::span<const RouteTrace> traces, std::size_t num_models);

// Runs cfg.method for every n and trial over the prompts. Trial k reseeds
// every source and the router with base_seed + k. A response counts as
// correct when its normalized answer equals the normalized gold answer.
//
// Emits one row per (dataset, n) in dataset-name order, and an "average" row
// (per-trial mean over datasets) when more than one dataset is present.
// Throws kMissingCdf, kDataError (prompt without gold), kConfigError, and
// whatever the sources raise.
EvalReport run_eval(const EvalConfig& cfg, const Portfolio& sources,
                    const RewardNormalizer& normalizer, std::span<const Prompt> prompts);

// One run_eval per alpha value, rows concatenated in grid order.
EvalReport alpha_ablation(const EvalConfig& cfg, std::span<const double> alpha_grid,
                          const Portfolio& sources, const RewardNormalizer& normalizer,
                          std::span<const Prompt> prompts);

// Appends the rows of `more`; model lists must match (kConfigError).
void append_report(EvalReport& into, const EvalReport& more);

// Adds "average" rows aggregating the per-model bon rows of `report` per
// (dataset, n) with average_metric over each trial.
void add_model_average_rows(EvalReport& report);

// CSV columns: method, dataset, n, alpha, beta, trials, accuracy_mean,
// accuracy_sigma, share_model_1..M, total_generations, recycled_draws.
std::string report_to_csv(const EvalReport& report);
std::string report_to_json(const EvalReport& report);

// Concatenates CSV reports with identical headers. Throws kDataError.
std::string merge_report_csv(std::span<const std::string> csv_documents);

}  // namespace robon
