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

#include "robon/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "robon/errors.hpp"

namespace robon {

FieldMapping::FieldMapping(std::map<std::string, std::string> renames)
    : renames_(std::move(renames)) {}

const std::string& FieldMapping::operator()(const std::string& canonical) const {
  auto it = renames_.find(canonical);
  return it == renames_.end() ? canonical : it->second;
}

Corpus Corpus::load_jsonl(const std::filesystem::path& path, const FieldMapping& fields) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open corpus " + path.string());
  return parse_jsonl(in, fields, path.string());
}

Corpus Corpus::parse_jsonl(std::istream& in, const FieldMapping& fields,
                           const std::string& source_name) {
  Corpus corpus;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = source_name + ":" + std::to_string(line_no);
    try {
      const auto j = nlohmann::json::parse(line);
      if (!j.is_object()) throw Error(ErrorCode::kIoError, where + ": expected a JSON object");
      if (j.contains(fields("model_id"))) {
        CorpusRecord r;
        r.prompt_id = j.at(fields("prompt_id")).get<std::string>();
        r.model_id = j.at(fields("model_id")).get<std::string>();
        r.sample_index = j.at(fields("sample_index")).get<std::size_t>();
        r.text = j.at(fields("text")).get<std::string>();
        r.reward_raw = j.at(fields("reward_raw")).get<double>();
        if (r.sample_index < 1) {
          throw Error(ErrorCode::kDataError, "sample_index must be >= 1");
        }
        corpus.add_response(std::move(r));
      } else {
        Prompt p;
        p.id = j.at(fields("prompt_id")).get<std::string>();
        p.text = j.value(fields("prompt_text"), std::string());
        if (auto it = j.find(fields("answer_gold")); it != j.end() && !it->is_null()) {
          p.gold = it->is_string() ? it->get<std::string>() : it->dump();
        }
        p.dataset = j.value(fields("dataset"), std::string());
        corpus.add_prompt(std::move(p));
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kIoError, where + ": " + e.what());
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kIoError) throw;
      throw Error(e.code(), where + ": " + e.what());
    }
  }
  if (in.bad()) throw Error(ErrorCode::kIoError, "read failed for " + source_name);
  return corpus;
}

void Corpus::add_prompt(Prompt prompt) {
  if (prompt_index_.contains(prompt.id)) {
    throw Error(ErrorCode::kDataError, "duplicate prompt record '" + prompt.id + "'");
  }
  prompt_index_.emplace(prompt.id, prompts_.size());
  prompts_.push_back(std::move(prompt));
}

void Corpus::add_response(CorpusRecord record) {
  auto& bucket = responses_[{record.prompt_id, record.model_id}];
  auto pos = std::lower_bound(bucket.begin(), bucket.end(), record.sample_index,
                              [](const CorpusRecord& r, std::size_t k) { return r.sample_index < k; });
  if (pos != bucket.end() && pos->sample_index == record.sample_index) {
    throw Error(ErrorCode::kDataError, "duplicate response (" + record.prompt_id + ", " +
                                           record.model_id + ", " +
                                           std::to_string(record.sample_index) + ")");
  }
  bucket.insert(pos, std::move(record));
  ++response_count_;
}

const Prompt* Corpus::find_prompt(const std::string& prompt_id) const {
  auto it = prompt_index_.find(prompt_id);
  return it == prompt_index_.end() ? nullptr : &prompts_[it->second];
}

std::span<const CorpusRecord> Corpus::samples(const std::string& prompt_id,
                                              const std::string& model_id) const {
  auto it = responses_.find({prompt_id, model_id});
  if (it == responses_.end()) return {};
  return it->second;
}

std::vector<std::string> Corpus::model_ids() const {
  std::set<std::string> ids;
  for (const auto& [key, _] : responses_) ids.insert(key.second);
  return {ids.begin(), ids.end()};
}

bool Corpus::has_model(const std::string& model_id) const {
  return std::any_of(responses_.begin(), responses_.end(),
                     [&](const auto& kv) { return kv.first.second == model_id; });
}

std::vector<double> Corpus::rewards_for(const std::string& model_id,
                                        std::span<const std::string> datasets) const {
  std::vector<double> out;
  for (const auto& [key, records] : responses_) {
    if (key.second != model_id) continue;
    if (!datasets.empty()) {
      const Prompt* p = find_prompt(key.first);
      const std::string ds = p ? p->dataset : std::string();
      if (std::find(datasets.begin(), datasets.end(), ds) == datasets.end()) continue;
    }
    for (const auto& r : records) out.push_back(r.reward_raw);
  }
  return out;
}

}  // namespace robon
