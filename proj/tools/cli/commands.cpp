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

#include "cli/commands.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <CLI11.hpp>

#include "cli/config.hpp"
#include "robon/errors.hpp"
#include "robon/router.hpp"

namespace robon::cli {
namespace {

namespace fs = std::filesystem;

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Flags shared by run, ablate and trace.
void add_override_flags(CLI::App& cmd, Overrides& o, std::vector<std::size_t>& n_values) {
  cmd.add_option_function<std::string>("--method", [&o](const std::string& v) { o.method = v; },
                                       "robon, bon, equal, majority, soft_bon or all");
  cmd.add_option_function<std::string>("--model", [&o](const std::string& v) { o.model = v; },
                                       "model id for single-model methods");
  cmd.add_option("--n", n_values, "budget(s) per prompt")->delimiter(',');
  cmd.add_option_function<double>("--alpha", [&o](double v) { o.alpha = v; }, "reward weight");
  cmd.add_option_function<double>("--beta", [&o](double v) { o.beta = v; },
                                  "inverse softmax temperature");
  cmd.add_option_function<std::uint64_t>("--seed", [&o](std::uint64_t v) { o.seed = v; },
                                         "base seed (overrides ROBON_SEED)");
  cmd.add_option_function<std::size_t>("--trials", [&o](std::size_t v) { o.trials = v; },
                                       "number of trials");
  cmd.add_flag_function("--recycle", [&o](std::int64_t) { o.recycle = true; },
                        "resample replay responses past corpus capacity");
  cmd.add_option_function<std::size_t>("--jobs", [&o](std::size_t v) { o.jobs = v; },
                                       "worker threads (0 = all cores)");
  cmd.add_option_function<std::string>("--tie-break",
                                       [&o](const std::string& v) { o.tie_break = v; },
                                       "lowest_model_index or seeded_random");
  cmd.add_option_function<std::vector<std::string>>(
         "--datasets", [&o](const std::vector<std::string>& v) { o.datasets = v; },
         "restrict evaluation to these datasets")
      ->delimiter(',');
  cmd.add_option_function<std::string>("--out-dir", [&o](const std::string& v) { o.out_dir = v; },
                                       "report directory");
}

EvalReport evaluate(const Experiment& ex) {
  if (ex.method != "all") return run_eval(ex.eval, ex.sources, ex.normalizer, ex.prompts);

  EvalReport report;
  EvalConfig cfg = ex.eval;
  cfg.model.reset();
  cfg.method = Method::kRobon;
  append_report(report, run_eval(cfg, ex.sources, ex.normalizer, ex.prompts));
  cfg.method = Method::kEqual;
  append_report(report, run_eval(cfg, ex.sources, ex.normalizer, ex.prompts));
  cfg.method = Method::kBonSingle;
  for (std::size_t i = 0; i < ex.sources.size(); ++i) {
    cfg.model = i;
    append_report(report, run_eval(cfg, ex.sources, ex.normalizer, ex.prompts));
  }
  add_model_average_rows(report);
  return report;
}

void write_report(const EvalReport& report, const fs::path& dir, const std::string& name,
                  std::ostream& out) {
  const fs::path csv = dir / (name + ".csv");
  const fs::path json = dir / (name + ".json");
  write_file(csv, report_to_csv(report));
  write_file(json, report_to_json(report));
  out << "wrote " << csv.string() << "\n" << "wrote " << json.string() << "\n";
}

void print_summary(const EvalReport& report, std::ostream& out) {
  for (const auto& r : report.rows) {
    out << std::left << std::setw(16) << r.method << ' ' << std::setw(12) << r.dataset
        << " n=" << std::setw(5) << r.n << " alpha=" << std::setw(4) << r.alpha
        << " acc=" << std::fixed << std::setprecision(4) << r.accuracy_mean << " +- "
        << r.accuracy_sigma << std::defaultfloat << "\n";
  }
}

int cmd_fit_cdf(const std::string& corpus_path, const std::vector<std::string>& models,
                const std::vector<std::string>& datasets, const std::vector<std::string>& fields,
                const std::string& out_dir, std::ostream& out, std::ostream& err) {
  std::map<std::string, std::string> renames;
  for (const auto& f : fields) {
    const auto eq = f.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == f.size()) {
      throw Error(ErrorCode::kConfigError, "--field expects canonical=external, got '" + f + "'");
    }
    renames[f.substr(0, eq)] = f.substr(eq + 1);
  }
  const Corpus corpus = Corpus::load_jsonl(corpus_path, FieldMapping(renames));

  std::vector<std::string> selected;
  for (const auto& id : corpus.model_ids()) {
    if (models.empty() || std::find(models.begin(), models.end(), id) != models.end()) {
      selected.push_back(id);
    }
  }
  if (selected.empty()) {
    err << "warning: no corpus model matches the model filter; nothing written\n";
    return kExitData;
  }
  for (const auto& id : selected) {
    const auto cdf = EmpiricalCdf::fit(id, corpus.rewards_for(id, datasets));
    const fs::path path = fs::path(out_dir) / (id + ".cdf.json");
    fs::create_directories(out_dir);
    save_cdf(cdf, path);
    out << id << " n_fit=" << cdf.n_fit() << " -> " << path.string() << "\n";
  }
  return kExitOk;
}

void print_trace(const RouteTrace& trace, const Experiment& ex, std::ostream& out) {
  auto id = [&](std::size_t i) { return ex.sources[i]->model_id(); };
  auto describe = [&](const CandidateDigest& d) {
    std::ostringstream s;
    s << id(d.model_index) << " draw " << d.draw_index << " reward " << d.reward << " answer "
      << (d.answer.present ? d.answer.value : "<none>");
    return s.str();
  };
  out << "prompt " << trace.prompt_id << " n=" << trace.n << " models=" << trace.num_models
      << "\n";
  if (trace.random_choice) {
    out << "random-choice branch: " << describe(trace.selected) << "\n";
  }
  for (const auto& r : trace.rounds) {
    out << "round " << r.round << ":";
    for (std::size_t i = 0; i < r.deltas.size(); ++i) {
      out << " delta[" << id(i) << "]=" << std::setprecision(10) << r.deltas[i];
    }
    out << " -> " << describe(r.chosen) << " |S|=" << r.round << "\n";
  }
  out << "rounds: " << trace.rounds.size() << "\n";
  out << "selected: " << describe(trace.selected) << "\n";
  out << "generations:";
  for (std::size_t i = 0; i < trace.generations.size(); ++i) {
    out << ' ' << id(i) << '=' << trace.generations[i];
  }
  out << "\n";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"robon: routed best-of-n across a model portfolio"};
  app.require_subcommand(1);

  // fit-cdf
  std::string corpus_path;
  std::vector<std::string> fit_models;
  std::vector<std::string> fit_datasets;
  std::vector<std::string> fit_fields;
  std::string fit_out = "cdfs";
  auto* fit = app.add_subcommand("fit-cdf", "fit per-model empirical reward CDFs from a corpus");
  fit->add_option("--corpus", corpus_path, "corpus JSON-lines file")->required();
  fit->add_option("--model", fit_models, "only fit these models")->delimiter(',');
  fit->add_option("--datasets", fit_datasets, "calibration datasets (default: all)")
      ->delimiter(',');
  fit->add_option("--field", fit_fields, "schema mapping canonical=external");
  fit->add_option("--out", fit_out, "output directory");

  // run
  std::string config_path;
  Overrides overrides;
  std::vector<std::size_t> n_values;
  auto* run = app.add_subcommand("run", "evaluate a method over an experiment config");
  run->add_option("config", config_path, "experiment config (JSON)")->required();
  add_override_flags(*run, overrides, n_values);

  // ablate
  std::string alpha_grid;
  auto* ablate = app.add_subcommand("ablate", "sweep alpha for routed best-of-n");
  ablate->add_option("config", config_path, "experiment config (JSON)")->required();
  ablate->add_option("--alpha-grid", alpha_grid, "comma-separated alpha values");
  add_override_flags(*ablate, overrides, n_values);

  // trace
  std::string prompt_id;
  bool trace_json = false;
  auto* trace = app.add_subcommand("trace", "print the per-round routing trace for one prompt");
  trace->add_option("config", config_path, "experiment config (JSON)")->required();
  trace->add_option("--prompt-id", prompt_id, "prompt to route")->required();
  trace->add_flag("--json", trace_json, "emit JSON lines instead of text");
  add_override_flags(*trace, overrides, n_values);

  // report-merge
  std::vector<std::string> merge_inputs;
  std::string merge_out;
  auto* merge = app.add_subcommand("report-merge", "concatenate CSV reports");
  merge->add_option("inputs", merge_inputs, "CSV reports")->required();
  merge->add_option("--out", merge_out, "merged CSV (default: stdout)");

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  if (!n_values.empty()) overrides.n = n_values;

  try {
    if (fit->parsed()) {
      return cmd_fit_cdf(corpus_path, fit_models, fit_datasets, fit_fields, fit_out, out, err);
    }
    if (run->parsed()) {
      const Experiment ex = load_experiment(config_path, overrides);
      const EvalReport report = evaluate(ex);
      print_summary(report, out);
      write_report(report, ex.out_dir, ex.out_name, out);
      return kExitOk;
    }
    if (ablate->parsed()) {
      if (!overrides.method) overrides.method = "robon";
      Experiment ex = load_experiment(config_path, overrides);
      if (ex.method != "robon") {
        throw Error(ErrorCode::kConfigError, "ablate sweeps alpha of method robon only");
      }
      const auto grid = alpha_grid.empty() ? ex.alpha_grid
                                           : parse_number_list(alpha_grid, "alpha_grid");
      const EvalReport report =
          alpha_ablation(ex.eval, grid, ex.sources, ex.normalizer, ex.prompts);
      print_summary(report, out);
      write_report(report, ex.out_dir, ex.out_name + "_ablation", out);
      return kExitOk;
    }
    if (trace->parsed()) {
      const Experiment ex = load_experiment(config_path, overrides);
      const Prompt* prompt = nullptr;
      for (const auto& p : ex.prompts) {
        if (p.id == prompt_id) prompt = &p;
      }
      if (!prompt) throw Error(ErrorCode::kUnknownPrompt, "no prompt '" + prompt_id + "'");
      if (ex.eval.n_values.size() != 1) {
        throw Error(ErrorCode::kConfigError, "trace needs a single --n");
      }
      RouterConfig rc;
      rc.n = ex.eval.n_values.front();
      rc.params = ScoringParams(ex.eval.alpha, ex.eval.beta);
      rc.seed = ex.eval.base_seed;
      rc.tie_break = ex.eval.tie_break;
      rc.rule = ex.eval.rule;
      Portfolio sources;
      for (const auto& s : ex.sources) sources.push_back(s->reseeded(ex.eval.base_seed));
      const RewardFn reward_fn = [&](const Response& r) {
        return ex.normalizer.normalize(r.model_id, r.reward_raw);
      };
      const auto result = robon_select(sources, *prompt, reward_fn, rc);
      if (trace_json) {
        out << trace_to_jsonl(result.trace);
      } else {
        print_trace(result.trace, ex, out);
      }
      return kExitOk;
    }
    if (merge->parsed()) {
      std::vector<std::string> docs;
      for (const auto& p : merge_inputs) docs.push_back(read_file(p));
      const std::string merged = merge_report_csv(docs);
      if (merge_out.empty()) {
        out << merged;
      } else {
        write_file(merge_out, merged);
        out << "wrote " << merge_out << "\n";
      }
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitRuntime;
}

}  // namespace robon::cli
