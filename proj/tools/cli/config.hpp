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
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "robon/corpus.hpp"
#include "robon/eval.hpp"
#include "robon/rewards.hpp"
#include "robon/sources.hpp"

namespace robon::cli {

// Command-line values that replace config-file keys. Precedence is flag,
// then the ROBON_SEED environment variable (seed only), then the file.
struct Overrides {
  std::optional<std::string> method;
  std::optional<std::string> model;
  std::optional<std::vector<std::size_t>> n;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<bool> recycle;
  std::optional<std::size_t> jobs;
  std::optional<std::string> tie_break;
  std::optional<std::vector<std::string>> datasets;
  std::optional<std::filesystem::path> out_dir;
};

// A fully resolved experiment definition.
struct Experiment {
  std::string method;  // an eval method name, or "all"
  std::optional<std::string> model_id;
  EvalConfig eval;
  std::vector<double> alpha_grid;
  std::filesystem::path out_dir;
  std::string out_name;

  std::shared_ptr<const Corpus> corpus;  // null without a corpus section
  Portfolio sources;
  std::vector<Prompt> prompts;
  RewardNormalizer normalizer;

  std::size_t model_index(const std::string& id) const;
};

// Reads a JSON experiment file. Relative paths inside it resolve against the
// file's directory. Throws kConfigError naming the offending key.
Experiment load_experiment(const std::filesystem::path& path, const Overrides& overrides);

// Same, from an already parsed document.
Experiment build_experiment(nlohmann::json doc, const std::filesystem::path& base_dir,
                            const Overrides& overrides);

std::vector<double> parse_number_list(const std::string& text, const std::string& what);

}  // namespace robon::cli
