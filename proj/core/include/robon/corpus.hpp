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

#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace robon {

struct Prompt {
  std::string id;
  std::string text;
  std::optional<std::string> gold;  // raw gold answer, normalized at scoring time
  std::string dataset;
};

// One stored model response with its raw reward-model score.
struct CorpusRecord {
  std::string prompt_id;
  std::string model_id;
  std::size_t sample_index = 1;
  std::string text;
  double reward_raw = 0.0;
};

// Maps canonical field names (prompt_id, model_id, sample_index, text,
// reward_raw, prompt_text, answer_gold, dataset) onto the names used by an
// external JSON-lines schema. Unmapped fields keep their canonical name.
class FieldMapping {
 public:
  FieldMapping() = default;
  explicit FieldMapping(std::map<std::string, std::string> renames);

  const std::string& operator()(const std::string& canonical) const;

 private:
  std::map<std::string, std::string> renames_;
};

// Prompts plus every model response for them. A line is a response record
// when it carries a model_id field, a prompt record otherwise.
class Corpus {
 public:
  // Throws kIoError naming the offending line for unreadable or malformed
  // input, kDataError for duplicate (prompt, model, sample_index) keys.
  static Corpus load_jsonl(const std::filesystem::path& path, const FieldMapping& fields = {});
  static Corpus parse_jsonl(std::istream& in, const FieldMapping& fields = {},
                            const std::string& source_name = "<stream>");

  void add_prompt(Prompt prompt);
  void add_response(CorpusRecord record);

  // Prompts in first-seen order.
  const std::vector<Prompt>& prompts() const noexcept { return prompts_; }
  const Prompt* find_prompt(const std::string& prompt_id) const;

  // Responses of one model to one prompt, ordered by sample_index.
  std::span<const CorpusRecord> samples(const std::string& prompt_id,
                                        const std::string& model_id) const;

  std::vector<std::string> model_ids() const;
  bool has_model(const std::string& model_id) const;
  std::size_t response_count() const noexcept { return response_count_; }

  // Raw rewards of one model, restricted to prompts of the listed datasets
  // (all prompts when `datasets` is empty). Responses to prompts without a
  // prompt record count as dataset "".
  std::vector<double> rewards_for(const std::string& model_id,
                                  std::span<const std::string> datasets = {}) const;

 private:
  using Key = std::pair<std::string, std::string>;  // (prompt_id, model_id)

  std::vector<Prompt> prompts_;
  std::map<std::string, std::size_t> prompt_index_;
  std::map<Key, std::vector<CorpusRecord>> responses_;
  std::size_t response_count_ = 0;
};

}  // namespace robon
