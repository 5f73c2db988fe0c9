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

#include "robon/eval.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "robon/baselines.hpp"
#include "robon/errors.hpp"
#include "robon/rng.hpp"

namespace robon {
namespace {

constexpr std::uint64_t kSoftBonStream = 4;
constexpr std::string_view kAverageDataset = "average";

struct PromptOutcome {
  bool correct = false;
  std::vector<std::size_t> credited;  // models credited with a selection
  std::uint64_t generations = 0;
  std::uint64_t recycled = 0;
};

std::string method_label(const EvalConfig& cfg, const Portfolio& sources) {
  std::string label(to_string(cfg.method));
  if (cfg.model && cfg.method != Method::kRobon && cfg.method != Method::kEqual) {
    label += ":" + sources[*cfg.model]->model_id();
  }
  return label;
}

PromptOutcome evaluate_prompt(const EvalConfig& cfg, const Portfolio& sources,
                              const RewardNormalizer& normalizer, const Prompt& prompt,
                              std::size_t n, std::uint64_t seed) {
  PromptOutcome out;
  RewardFn reward_fn = [&](const Response& r) {
    ++out.generations;
    if (r.recycled) ++out.recycled;
    return normalizer.normalize(r.model_id, r.reward_raw);
  };

  std::vector<SourcePtr> single;
  std::span<const SourcePtr> pool_sources = sources;
  std::size_t index_offset = 0;
  if (cfg.model && cfg.method != Method::kRobon && cfg.method != Method::kEqual) {
    single.push_back(sources[*cfg.model]);
    pool_sources = single;
    index_offset = *cfg.model;
  }

  NormalizedAnswer picked;
  switch (cfg.method) {
    case Method::kRobon: {
      RouterConfig rc;
      rc.n = n;
      rc.params = ScoringParams(cfg.alpha, cfg.beta);
      rc.seed = seed;
      rc.tie_break = cfg.tie_break;
      rc.rule = cfg.rule;
      auto result = robon_select(sources, prompt, reward_fn, rc);
      picked = result.selected.answer;
      out.credited = result.trace.committed_models();
      break;
    }
    case Method::kBonSingle:
    case Method::kEqual:
    case Method::kMajority:
    case Method::kSoftBon: {
      PoolDraw draw = equal_split(pool_sources, prompt, n, reward_fn, seed);
      if (cfg.method == Method::kMajority) {
        draw.selected = majority_vote(draw.pool);
      } else if (cfg.method == Method::kSoftBon) {
        Rng rng = make_rng({seed, fnv1a(prompt.id), kSoftBonStream});
        draw.selected = soft_bon(draw.pool, cfg.beta, rng);
      }
      picked = draw.pool[draw.selected].answer;
      out.credited = {draw.pool[draw.selected].model_index + index_offset};
      break;
    }
  }
  out.correct = answers_equal(picked, normalize_answer(prompt.gold));
  return out;
}

// Evaluates every prompt, in parallel when jobs > 1. Results are stored by
// prompt position so the reduction does not depend on completion order.
std::vector<PromptOutcome> evaluate_all(const EvalConfig& cfg, const Portfolio& sources,
                                        const RewardNormalizer& normalizer,
                                        std::span<const Prompt> prompts, std::size_t n,
                                        std::uint64_t seed) {
  std::vector<PromptOutcome> outcomes(prompts.size());
  std::size_t jobs = cfg.jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : cfg.jobs;
  jobs = std::min(jobs, std::max<std::size_t>(prompts.size(), 1));

  if (jobs <= 1) {
    for (std::size_t i = 0; i < prompts.size(); ++i) {
      outcomes[i] = evaluate_prompt(cfg, sources, normalizer, prompts[i], n, seed);
    }
    return outcomes;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  {
    std::vector<std::jthread> workers;
    for (std::size_t w = 0; w < jobs; ++w) {
      workers.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < prompts.size();) {
          try {
            outcomes[i] = evaluate_prompt(cfg, sources, normalizer, prompts[i], n, seed);
          } catch (...) {
            std::lock_guard lock(failure_mu);
            if (!failure) failure = std::current_exception();
            next.store(prompts.size());
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
  return outcomes;
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<double> normalized_shares(const std::vector<std::uint64_t>& counts) {
  const double total =
      static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}));
  std::vector<double> out(counts.size(), 0.0);
  if (total == 0.0) return out;
  for (std::size_t i = 0; i < counts.size(); ++i) out[i] = static_cast<double>(counts[i]) / total;
  return out;
}

}  // namespace

std::string_view to_string(Method m) {
  switch (m) {
    case Method::kRobon: return "robon";
    case Method::kBonSingle: return "bon";
    case Method::kEqual: return "equal";
    case Method::kMajority: return "majority";
    case Method::kSoftBon: return "soft_bon";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::kRobon, Method::kBonSingle, Method::kEqual, Method::kMajority,
                   Method::kSoftBon}) {
    if (to_string(m) == name) return m;
  }
  throw Error(ErrorCode::kConfigError, "unknown method '" + std::string(name) + "'");
}

void EvalConfig::validate(std::size_t num_models) const {
  if (num_models == 0) throw Error(ErrorCode::kConfigError, "portfolio is empty");
  if (trials < 1) throw Error(ErrorCode::kConfigError, "trials must be >= 1");
  if (n_values.empty()) throw Error(ErrorCode::kConfigError, "n_values is empty");
  ScoringParams(alpha, beta);
  if (method == Method::kBonSingle && !model) {
    throw Error(ErrorCode::kConfigError, "method 'bon' needs a model");
  }
  if (model && *model >= num_models) {
    throw Error(ErrorCode::kConfigError, "model index " + std::to_string(*model) +
                                             " outside a portfolio of " +
                                             std::to_string(num_models));
  }
  for (std::size_t n : n_values) {
    if (n == 0) throw Error(ErrorCode::kConfigError, "n must be positive");
    if (method == Method::kRobon) {
      RouterConfig rc;
      rc.n = n;
      rc.validate(num_models);
    }
  }
}

std::pair<double, double> accuracy_ci(std::span<const double> acc) {
  if (acc.empty()) throw Error(ErrorCode::kEmptySet, "no trial accuracies");
  const double k = static_cast<double>(acc.size());
  const double mean = std::accumulate(acc.begin(), acc.end(), 0.0) / k;
  if (acc.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double a : acc) ss += (a - mean) * (a - mean);
  return {mean, std::sqrt(ss / (k - 1.0))};
}

std::vector<double> model_shares(std::span<const RouteTrace> traces, std::size_t num_models) {
  std::vector<std::uint64_t> counts(num_models, 0);
  for (const auto& t : traces) {
    for (std::size_t m : t.committed_models()) {
      if (m >= num_models) {
        throw Error(ErrorCode::kIndexOutOfRange, "trace credits model " + std::to_string(m));
      }
      ++counts[m];
    }
  }
  if (std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}) == 0) {
    throw Error(ErrorCode::kEmptySet, "traces commit no selections");
  }
  return normalized_shares(counts);
}

EvalReport run_eval(const EvalConfig& cfg, const Portfolio& sources,
                    const RewardNormalizer& normalizer, std::span<const Prompt> prompts) {
  cfg.validate(sources.size());
  for (const auto& s : sources) {
    if (!normalizer.has(s->model_id())) {
      throw Error(ErrorCode::kMissingCdf, "no reward CDF for model '" + s->model_id() + "'");
    }
  }

  std::vector<Prompt> selected;
  for (const auto& p : prompts) {
    if (!cfg.datasets.empty() &&
        std::find(cfg.datasets.begin(), cfg.datasets.end(), p.dataset) == cfg.datasets.end()) {
      continue;
    }
    if (!p.gold) throw Error(ErrorCode::kDataError, "prompt '" + p.id + "' has no gold answer");
    selected.push_back(p);
  }
  if (selected.empty()) throw Error(ErrorCode::kConfigError, "no prompts selected for evaluation");

  std::map<std::string, std::vector<std::size_t>> by_dataset;
  for (std::size_t i = 0; i < selected.size(); ++i) by_dataset[selected[i].dataset].push_back(i);

  const std::size_t m = sources.size();
  EvalReport report;
  for (const auto& s : sources) report.model_ids.push_back(s->model_id());
  const std::string label = method_label(cfg, sources);

  for (std::size_t n : cfg.n_values) {
    struct Acc {
      std::vector<double> per_trial;
      std::vector<std::uint64_t> credit;
      std::uint64_t generations = 0;
      std::uint64_t recycled = 0;
    };
    std::map<std::string, Acc> acc;
    for (const auto& [ds, _] : by_dataset) acc[ds].credit.assign(m, 0);
    Acc average;
    average.credit.assign(m, 0);

    for (std::size_t k = 0; k < cfg.trials; ++k) {
      const std::uint64_t seed = cfg.base_seed + k;
      Portfolio trial_sources;
      for (const auto& s : sources) trial_sources.push_back(s->reseeded(seed));
      const auto outcomes = evaluate_all(cfg, trial_sources, normalizer, selected, n, seed);

      double dataset_mean = 0.0;
      for (const auto& [ds, idx] : by_dataset) {
        Acc& a = acc[ds];
        std::size_t correct = 0;
        for (std::size_t i : idx) {
          const auto& o = outcomes[i];
          correct += o.correct ? 1 : 0;
          for (std::size_t c : o.credited) {
            ++a.credit[c];
            ++average.credit[c];
          }
          a.generations += o.generations;
          a.recycled += o.recycled;
        }
        const double trial_acc = static_cast<double>(correct) / static_cast<double>(idx.size());
        a.per_trial.push_back(trial_acc);
        dataset_mean += trial_acc;
      }
      average.per_trial.push_back(dataset_mean / static_cast<double>(by_dataset.size()));
    }

    auto emit = [&](const std::string& ds, const Acc& a) {
      ReportRow row;
      row.method = label;
      row.dataset = ds;
      row.n = n;
      row.alpha = cfg.alpha;
      row.beta = cfg.beta;
      row.trials = cfg.trials;
      std::tie(row.accuracy_mean, row.accuracy_sigma) = accuracy_ci(a.per_trial);
      row.shares = normalized_shares(a.credit);
      row.total_generations = a.generations;
      row.recycled_draws = a.recycled;
      row.per_trial = a.per_trial;
      report.rows.push_back(std::move(row));
    };
    for (const auto& [ds, a] : acc) {
      emit(ds, a);
      average.generations += a.generations;
      average.recycled += a.recycled;
    }
    if (by_dataset.size() > 1) emit(std::string(kAverageDataset), average);
  }
  return report;
}

EvalReport alpha_ablation(const EvalConfig& cfg, std::span<const double> alpha_grid,
                          const Portfolio& sources, const RewardNormalizer& normalizer,
                          std::span<const Prompt> prompts) {
  if (alpha_grid.empty()) throw Error(ErrorCode::kConfigError, "alpha grid is empty");
  EvalReport out;
  for (double alpha : alpha_grid) {
    EvalConfig c = cfg;
    c.alpha = alpha;
    EvalReport r = run_eval(c, sources, normalizer, prompts);
    if (out.model_ids.empty()) out.model_ids = r.model_ids;
    append_report(out, r);
  }
  return out;
}

void append_report(EvalReport& into, const EvalReport& more) {
  if (into.model_ids.empty() && into.rows.empty()) into.model_ids = more.model_ids;
  if (into.model_ids != more.model_ids) {
    throw Error(ErrorCode::kConfigError, "cannot combine reports over different portfolios");
  }
  into.rows.insert(into.rows.end(), more.rows.begin(), more.rows.end());
}

void add_model_average_rows(EvalReport& report) {
  struct Group {
    std::vector<const ReportRow*> rows;
  };
  std::map<std::tuple<std::string, std::size_t, double, double>, Group> groups;
  for (const auto& r : report.rows) {
    if (r.method.rfind("bon:", 0) == 0) groups[{r.dataset, r.n, r.alpha, r.beta}].rows.push_back(&r);
  }
  std::vector<ReportRow> added;
  for (const auto& [key, g] : groups) {
    const ReportRow& first = *g.rows.front();
    ReportRow row;
    row.method = "average";
    row.dataset = first.dataset;
    row.n = first.n;
    row.alpha = first.alpha;
    row.beta = first.beta;
    row.trials = first.trials;
    row.shares.assign(report.model_ids.size(), 0.0);
    for (std::size_t k = 0; k < first.per_trial.size(); ++k) {
      std::vector<double> per_model;
      for (const ReportRow* r : g.rows) per_model.push_back(r->per_trial.at(k));
      row.per_trial.push_back(average_metric(per_model));
    }
    for (const ReportRow* r : g.rows) {
      for (std::size_t i = 0; i < row.shares.size(); ++i) {
        row.shares[i] += r->shares[i] / static_cast<double>(g.rows.size());
      }
      row.total_generations += r->total_generations;
      row.recycled_draws += r->recycled_draws;
    }
    std::tie(row.accuracy_mean, row.accuracy_sigma) = accuracy_ci(row.per_trial);
    added.push_back(std::move(row));
  }
  report.rows.insert(report.rows.end(), added.begin(), added.end());
}

std::string report_to_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "method,dataset,n,alpha,beta,trials,accuracy_mean,accuracy_sigma";
  for (std::size_t i = 1; i <= report.model_ids.size(); ++i) out << ",share_model_" << i;
  out << ",total_generations,recycled_draws\n";
  for (const auto& r : report.rows) {
    out << csv_field(r.method) << ',' << csv_field(r.dataset) << ',' << r.n << ','
        << format_double(r.alpha) << ',' << format_double(r.beta) << ',' << r.trials << ','
        << format_double(r.accuracy_mean) << ',' << format_double(r.accuracy_sigma);
    for (double s : r.shares) out << ',' << format_double(s);
    out << ',' << r.total_generations << ',' << r.recycled_draws << '\n';
  }
  return out.str();
}

std::string report_to_json(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["model_ids"] = report.model_ids;
  auto& rows = j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"method", r.method},
                    {"dataset", r.dataset},
                    {"n", r.n},
                    {"alpha", r.alpha},
                    {"beta", r.beta},
                    {"trials", r.trials},
                    {"accuracy_mean", r.accuracy_mean},
                    {"accuracy_sigma", r.accuracy_sigma},
                    {"shares", r.shares},
                    {"total_generations", r.total_generations},
                    {"recycled_draws", r.recycled_draws},
                    {"per_trial", r.per_trial}});
  }
  return j.dump(2) + "\n";
}

std::string merge_report_csv(std::span<const std::string> docs) {
  if (docs.empty()) throw Error(ErrorCode::kDataError, "nothing to merge");
  std::string header;
  std::string body;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    std::istringstream in(docs[i]);
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::kDataError, "report " + std::to_string(i) + " is empty");
    if (i == 0) {
      header = line;
    } else if (line != header) {
      throw Error(ErrorCode::kDataError,
                  "report " + std::to_string(i) + " has a different header: " + line);
    }
    while (std::getline(in, line)) {
      if (!line.empty()) body += line + "\n";
    }
  }
  return header + "\n" + body;
}

}  // namespace robon
