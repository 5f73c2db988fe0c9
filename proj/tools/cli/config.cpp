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

#include "cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "robon/errors.hpp"
#include "robon/http_source.hpp"

namespace robon::cli {
namespace {

using nlohmann::json;

Error config_error(const std::string& key, const std::string& why) {
  return Error(ErrorCode::kConfigError, "key '" + key + "': " + why);
}

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw config_error(where, "expected an object");
  for (const auto& [k, _] : obj.items()) {
    if (!allowed.contains(k)) {
      throw config_error(where.empty() ? k : where + "." + k, "unknown key");
    }
  }
}

template <typename T>
T get(const json& obj, const std::string& key, const std::string& where, T fallback) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception& e) {
    throw config_error(where.empty() ? key : where + "." + key, e.what());
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

TieBreak parse_tie_break(const std::string& s) {
  if (s == "lowest_model_index") return TieBreak::kLowestModelIndex;
  if (s == "seeded_random") return TieBreak::kSeededRandom;
  throw config_error("tie_break", "expected lowest_model_index or seeded_random, got '" + s + "'");
}

ScoreRule parse_score_rule(const std::string& s) {
  if (s == "marginal_set") return ScoreRule::kMarginalSet;
  if (s == "per_candidate") return ScoreRule::kPerCandidate;
  throw config_error("score_rule", "expected marginal_set or per_candidate, got '" + s + "'");
}

BetaParams parse_beta(const json& m, const std::string& key, const std::string& where,
                      BetaParams fallback) {
  auto it = m.find(key);
  if (it == m.end()) return fallback;
  if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number() || !(*it)[1].is_number()) {
    throw config_error(where + "." + key, "expected [a, b]");
  }
  return {(*it)[0].get<double>(), (*it)[1].get<double>()};
}

SyntheticModelSpec parse_synthetic(const json& m, const std::string& where) {
  check_keys(m, where, {"id", "type", "p_correct", "p_by_dataset", "p_by_prompt", "gold",
                        "wrong_answers", "correct_reward", "incorrect_reward"});
  SyntheticModelSpec spec;
  spec.model_id = get<std::string>(m, "id", where, "");
  spec.p_correct = get<double>(m, "p_correct", where, spec.p_correct);
  spec.p_by_dataset = get<std::map<std::string, double>>(m, "p_by_dataset", where, {});
  spec.p_by_prompt = get<std::map<std::string, double>>(m, "p_by_prompt", where, {});
  spec.gold = get<std::string>(m, "gold", where, spec.gold);
  if (auto it = m.find("wrong_answers"); it != m.end()) {
    spec.wrong_answers.clear();
    if (it->is_object()) {
      for (const auto& [ans, w] : it->items()) spec.wrong_answers.push_back({ans, w.get<double>()});
    } else if (it->is_array()) {
      // Plain list: equal weights.
      for (const auto& ans : *it) {
        spec.wrong_answers.push_back({ans.get<std::string>(), 1.0 / static_cast<double>(it->size())});
      }
    } else {
      throw config_error(where + ".wrong_answers", "expected an object or a list");
    }
  }
  spec.correct_reward = parse_beta(m, "correct_reward", where, spec.correct_reward);
  spec.incorrect_reward = parse_beta(m, "incorrect_reward", where, spec.incorrect_reward);
  try {
    spec.validate();
  } catch (const Error& e) {
    throw config_error(where, e.what());
  }
  return spec;
}

HttpSourceConfig parse_http(const json& m, const std::string& where) {
  check_keys(m, where, {"id", "type", "endpoint", "reward_endpoint", "completion_path",
                        "reward_path", "temperature", "top_p", "max_tokens", "connect_timeout_ms",
                        "timeout_ms", "retries", "retry_backoff_ms", "max_in_flight"});
  HttpSourceConfig c;
  c.model_id = get<std::string>(m, "id", where, "");
  c.endpoint = get<std::string>(m, "endpoint", where, "");
  c.reward_endpoint = get<std::string>(m, "reward_endpoint", where, "");
  c.completion_path = get<std::string>(m, "completion_path", where, c.completion_path);
  c.reward_path = get<std::string>(m, "reward_path", where, c.reward_path);
  c.temperature = get<double>(m, "temperature", where, c.temperature);
  c.top_p = get<double>(m, "top_p", where, c.top_p);
  c.max_tokens = get<int>(m, "max_tokens", where, c.max_tokens);
  c.connect_timeout = std::chrono::milliseconds(
      get<std::int64_t>(m, "connect_timeout_ms", where, c.connect_timeout.count()));
  c.read_timeout =
      std::chrono::milliseconds(get<std::int64_t>(m, "timeout_ms", where, c.read_timeout.count()));
  c.max_retries = get<int>(m, "retries", where, c.max_retries);
  c.retry_backoff = std::chrono::milliseconds(
      get<std::int64_t>(m, "retry_backoff_ms", where, c.retry_backoff.count()));
  c.max_in_flight = get<std::size_t>(m, "max_in_flight", where, c.max_in_flight);
  return c;
}

std::vector<Prompt> parse_prompts(const json& doc, const std::filesystem::path& base,
                                  const std::shared_ptr<const Corpus>& corpus) {
  auto it = doc.find("prompts");
  if (it == doc.end()) {
    if (!corpus) throw config_error("prompts", "required when no corpus is configured");
    return corpus->prompts();
  }
  check_keys(*it, "prompts", {"path", "generate"});
  if (it->contains("path")) {
    const auto p = resolve(base, (*it)["path"].get<std::string>());
    return Corpus::load_jsonl(p).prompts();
  }
  std::vector<Prompt> out;
  for (const auto& g : it->value("generate", json::array())) {
    check_keys(g, "prompts.generate", {"dataset", "count", "gold"});
    const auto ds = get<std::string>(g, "dataset", "prompts.generate", "synthetic");
    const auto count = get<std::size_t>(g, "count", "prompts.generate", 0);
    const auto gold = get<std::string>(g, "gold", "prompts.generate", "gold");
    for (std::size_t i = 0; i < count; ++i) {
      Prompt p;
      std::ostringstream id;
      id << ds << '-' << i;
      p.id = id.str();
      p.text = "synthetic prompt " + p.id;
      p.gold = gold;
      p.dataset = ds;
      out.push_back(std::move(p));
    }
  }
  if (out.empty()) throw config_error("prompts", "no prompts defined");
  return out;
}

const std::set<std::string> kTopLevelKeys = {
    "seed", "trials", "jobs", "method", "model", "n", "alpha", "beta", "recycle",
    "tie_break", "score_rule", "datasets", "alpha_grid", "output", "corpus", "prompts",
    "normalization", "models"};

void apply_overrides(json& doc, const Overrides& o) {
  if (o.method) doc["method"] = *o.method;
  if (o.model) doc["model"] = *o.model;
  if (o.n) doc["n"] = *o.n;
  if (o.alpha) doc["alpha"] = *o.alpha;
  if (o.beta) doc["beta"] = *o.beta;
  if (o.trials) doc["trials"] = *o.trials;
  if (o.recycle) doc["recycle"] = *o.recycle;
  if (o.jobs) doc["jobs"] = *o.jobs;
  if (o.tie_break) doc["tie_break"] = *o.tie_break;
  if (o.datasets) doc["datasets"] = *o.datasets;
  if (o.seed) {
    doc["seed"] = *o.seed;
  } else if (const char* env = std::getenv("ROBON_SEED"); env && *env) {
    std::uint64_t v = 0;
    const char* end = env + std::char_traits<char>::length(env);
    auto [ptr, ec] = std::from_chars(env, end, v);
    if (ec != std::errc() || ptr != end) {
      throw Error(ErrorCode::kConfigError, std::string("ROBON_SEED is not an integer: ") + env);
    }
    doc["seed"] = v;
  }
  if (o.out_dir) doc["output"]["dir"] = o.out_dir->string();
}

}  // namespace

std::size_t Experiment::model_index(const std::string& id) const {
  for (std::size_t i = 0; i < sources.size(); ++i) {
    if (sources[i]->model_id() == id) return i;
  }
  throw Error(ErrorCode::kUnknownModel, "no model '" + id + "' in the portfolio");
}

std::vector<double> parse_number_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    const auto last = item.find_last_not_of(" \t");
    if (first == std::string::npos) throw config_error(what, "empty entry in '" + text + "'");
    item = item.substr(first, last - first + 1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size()) {
      throw config_error(what, "'" + item + "' is not a number");
    }
    out.push_back(v);
  }
  if (out.empty()) throw config_error(what, "empty list");
  return out;
}

Experiment load_experiment(const std::filesystem::path& path, const Overrides& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfigError, path.string() + ": " + e.what());
  }
  return build_experiment(std::move(doc), path.parent_path(), overrides);
}

Experiment build_experiment(json doc, const std::filesystem::path& base_dir,
                            const Overrides& overrides) {
  check_keys(doc, "", kTopLevelKeys);
  apply_overrides(doc, overrides);

  Experiment ex;
  EvalConfig& ev = ex.eval;
  ex.method = get<std::string>(doc, "method", "", "robon");
  ev.base_seed = get<std::uint64_t>(doc, "seed", "", 0);
  ev.trials = get<std::size_t>(doc, "trials", "", 5);
  ev.jobs = get<std::size_t>(doc, "jobs", "", 1);
  ev.alpha = get<double>(doc, "alpha", "", ScoringParams::kDefaultAlpha);
  ev.beta = get<double>(doc, "beta", "", ScoringParams::kDefaultBeta);
  ev.recycle = get<bool>(doc, "recycle", "", false);
  ev.datasets = get<std::vector<std::string>>(doc, "datasets", "", {});
  ev.tie_break = parse_tie_break(get<std::string>(doc, "tie_break", "", "lowest_model_index"));
  ev.rule = parse_score_rule(get<std::string>(doc, "score_rule", "", "marginal_set"));
  if (auto it = doc.find("n"); it != doc.end()) {
    ev.n_values = it->is_array() ? get<std::vector<std::size_t>>(doc, "n", "", {})
                                 : std::vector<std::size_t>{get<std::size_t>(doc, "n", "", 16)};
  }
  ex.alpha_grid = get<std::vector<double>>(doc, "alpha_grid", "",
                                           {0.0, 0.2, 0.4, 0.6, 0.8, 1.0});
  if (auto m = get<std::string>(doc, "model", "", ""); !m.empty()) ex.model_id = m;
  try {
    ScoringParams(ev.alpha, ev.beta);
  } catch (const Error& e) {
    throw config_error("alpha/beta", e.what());
  }
  if (ex.method != "all") {
    try {
      ev.method = parse_method(ex.method);
    } catch (const Error& e) {
      throw config_error("method", e.what());
    }
  }

  const json output = doc.value("output", json::object());
  check_keys(output, "output", {"dir", "name"});
  ex.out_dir = resolve(base_dir, get<std::string>(output, "dir", "output", "reports"));
  ex.out_name = get<std::string>(output, "name", "output", "report");

  if (auto it = doc.find("corpus"); it != doc.end()) {
    check_keys(*it, "corpus", {"path", "field_map"});
    const auto p = get<std::string>(*it, "path", "corpus", "");
    if (p.empty()) throw config_error("corpus.path", "required");
    FieldMapping fields(get<std::map<std::string, std::string>>(*it, "field_map", "corpus", {}));
    ex.corpus = std::make_shared<const Corpus>(Corpus::load_jsonl(resolve(base_dir, p), fields));
  }

  auto models = doc.find("models");
  if (models == doc.end() || !models->is_array() || models->empty()) {
    throw config_error("models", "expected a non-empty list");
  }
  for (std::size_t i = 0; i < models->size(); ++i) {
    const json& m = (*models)[i];
    const std::string where = "models[" + std::to_string(i) + "]";
    if (!m.is_object()) throw config_error(where, "expected an object");
    const auto type = get<std::string>(m, "type", where, "");
    const auto id = get<std::string>(m, "id", where, "");
    if (id.empty()) throw config_error(where + ".id", "required");
    if (type == "synthetic") {
      ex.sources.push_back(std::make_shared<SyntheticSource>(parse_synthetic(m, where), ev.base_seed));
    } else if (type == "replay") {
      check_keys(m, where, {"id", "type"});
      if (!ex.corpus) throw config_error(where, "replay models need a corpus section");
      ex.sources.push_back(
          std::make_shared<ReplaySource>(ex.corpus, id, ev.base_seed, ev.recycle));
    } else if (type == "http") {
      ex.sources.push_back(std::make_shared<HttpSource>(parse_http(m, where)));
    } else {
      throw config_error(where + ".type", "expected synthetic, replay or http, got '" + type + "'");
    }
  }
  for (std::size_t i = 0; i < ex.sources.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (ex.sources[i]->model_id() == ex.sources[j]->model_id()) {
        throw config_error("models", "duplicate model id '" + ex.sources[i]->model_id() + "'");
      }
    }
  }
  if (ex.model_id) {
    try {
      ev.model = ex.model_index(*ex.model_id);
    } catch (const Error& e) {
      throw config_error("model", e.what());
    }
  }

  ex.prompts = parse_prompts(doc, base_dir, ex.corpus);

  const json norm = doc.value("normalization", json{{"mode", "identity"}});
  check_keys(norm, "normalization", {"mode", "cdf_dir", "calibration_datasets"});
  const auto mode = get<std::string>(norm, "mode", "normalization", "identity");
  if (mode == "identity") {
    ex.normalizer = RewardNormalizer::identity();
  } else if (mode == "cdf") {
    const auto dir = resolve(base_dir, get<std::string>(norm, "cdf_dir", "normalization", "cdfs"));
    for (const auto& s : ex.sources) {
      const auto file = dir / (s->model_id() + ".cdf.json");
      if (!std::filesystem::exists(file)) {
        throw Error(ErrorCode::kMissingCdf, "no CDF artifact " + file.string());
      }
      ex.normalizer.add(load_cdf(file));
    }
  } else if (mode == "fit") {
    if (!ex.corpus) throw config_error("normalization.mode", "'fit' needs a corpus section");
    const auto calib =
        get<std::vector<std::string>>(norm, "calibration_datasets", "normalization", {});
    for (const auto& s : ex.sources) {
      const auto rewards = ex.corpus->rewards_for(s->model_id(), calib);
      ex.normalizer.add(EmpiricalCdf::fit(s->model_id(), rewards));
    }
  } else {
    throw config_error("normalization.mode", "expected identity, cdf or fit, got '" + mode + "'");
  }
  return ex;
}

}  // namespace robon::cli
