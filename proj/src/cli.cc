// Copyright 2026 The actsel Authors.
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

#include "actsel/cli.h"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "actsel/calibration.h"
#include "actsel/core.h"
#include "actsel/dataset_io.h"
#include "actsel/error.h"
#include "actsel/http_service.h"
#include "actsel/ngram.h"
#include "actsel/session.h"
#include "actsel/simulator.h"
#include "actsel/strategies.h"
#include "json.hpp"

namespace actsel {
namespace {

using nlohmann::json;

struct Common {
  std::string dataset;
  std::string baseline;
  int judges = kDefaultJudgeCount;
  std::string panel_cache;
  unsigned threads = 0;
};

struct Loaded {
  Dataset dataset;
  WeakJudgePanel panel;
};

void AddCommon(CLI::App* sub, Common& c, bool with_panel = true) {
  sub->add_option("dataset", c.dataset, "Dataset file (JSONL)")->required();
  sub->add_option("--baseline", c.baseline,
                  "Baseline model id, or 'auto' for weak-judge selection");
  if (!with_panel) return;
  sub->add_option("--z", c.judges, "Number of weak judges")
      ->check(CLI::Range(1, 64));
  sub->add_option("--panel-cache", c.panel_cache,
                  "Weak-judge cache file; built and written when missing");
  sub->add_option("--threads", c.threads, "Worker threads (0 = all cores)");
}

// Resolves the baseline (explicit, declared, else auto) and the panel.
Loaded LoadWithPanel(const Common& c, std::ostream& err) {
  const bool declared = DeclaresBaseline(c.dataset);
  const bool automatic = c.baseline == "auto" || (c.baseline.empty() && !declared);
  Dataset dataset = LoadDataset(c.dataset, automatic ? "" : c.baseline);

  if (!c.panel_cache.empty() && std::filesystem::exists(c.panel_cache) &&
      !automatic) {
    return {dataset, LoadPanelCache(c.panel_cache, dataset)};
  }
  LikelihoodTable table = LikelihoodTable::Build(dataset, c.judges, c.threads);
  if (automatic) {
    const ModelIndex b = AutoSelectBaseline(table, c.judges);
    dataset = dataset.WithBaseline(dataset.model_id(b));
    err << "baseline: " << dataset.baseline_id() << " (auto-selected)\n";
    if (!c.panel_cache.empty() && std::filesystem::exists(c.panel_cache)) {
      return {dataset, LoadPanelCache(c.panel_cache, dataset)};
    }
  }
  WeakJudgePanel panel =
      WeakJudgePanel::Build(table, dataset.baseline(), c.judges);
  if (!c.panel_cache.empty()) SavePanelCache(c.panel_cache, dataset, panel);
  return {std::move(dataset), std::move(panel)};
}

std::optional<double> ParseDouble(std::string_view s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

// "L,D" or the path of a calibration report.
std::optional<NoiseParams> ParseParams(const std::string& spec) {
  const auto comma = spec.find(',');
  if (comma != std::string::npos) {
    auto loss = ParseDouble(std::string_view(spec).substr(0, comma));
    auto draw = ParseDouble(std::string_view(spec).substr(comma + 1));
    if (!loss || !draw) {
      throw Error(ErrorKind::kInvalidArgument,
                  "--params expects 'eps_loss,eps_draw': " + spec);
    }
    return NoiseParams(*loss, *draw);
  }
  if (spec == "calibrate") return std::nullopt;
  if (!std::filesystem::exists(spec)) {
    throw Error(ErrorKind::kInvalidArgument,
                "--params is neither 'L,D', 'calibrate' nor a file: " + spec);
  }
  return ReadCalibrationParams(spec);
}

std::vector<StrategyKind> ParseStrategies(const std::vector<std::string>& names) {
  std::vector<StrategyKind> out;
  for (const std::string& name : names) {
    if (name == "all") {
      for (StrategyKind k : kAllStrategyKinds) out.push_back(k);
      continue;
    }
    auto kind = ParseStrategyKind(name);
    if (!kind) {
      throw Error(ErrorKind::kInvalidArgument, "unknown strategy: " + name);
    }
    out.push_back(*kind);
  }
  if (out.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "no strategies given");
  }
  return out;
}

void CheckSizes(std::size_t budget, std::size_t pool, std::size_t n) {
  if (budget == 0) throw Error(ErrorKind::kInvalidArgument, "--budget must be positive");
  if (pool > n) {
    throw Error(ErrorKind::kInvalidArgument,
                "--pool exceeds the dataset size " + std::to_string(n));
  }
  if (budget > pool) {
    throw Error(ErrorKind::kInvalidArgument, "--budget exceeds the pool size");
  }
}

int ExitFor(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument:
      return kExitUsage;
    case ErrorKind::kValidation:
    case ErrorKind::kParse:
      return kExitValidation;
    default:
      return kExitRuntime;
  }
}

// Reads judgments for live `select` runs.
class StreamOracle : public JudgmentSource {
 public:
  StreamOracle(const Dataset& dataset, const SelectionState& state,
               std::istream& in, std::ostream& out)
      : dataset_(&dataset), state_(&state), in_(&in), out_(&out) {}

  JudgmentVector Judge(QueryIndex q) override {
    const Dataset& d = *dataset_;
    json responses = json::object();
    for (ModelIndex j = 0; j < d.num_models(); ++j) {
      responses[d.model_id(j)] = d.response(q, j);
    }
    *out_ << json{{"query_id", d.query(q).id},
                  {"query_text", d.query(q).text},
                  {"baseline_id", d.baseline_id()},
                  {"responses", responses},
                  {"budget_remaining", state_->budget() - state_->t()}}
                 .dump()
          << std::endl;
    std::string line;
    while (line.empty()) {
      if (!std::getline(*in_, line)) {
        throw Error(ErrorKind::kFailedPrecondition,
                    "judgment input ended before the budget was spent");
      }
    }
    json body;
    try {
      body = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(ErrorKind::kParse, std::string("bad judgment line: ") + e.what());
    }
    if (body.is_object() && body.contains("outcomes")) body = body["outcomes"];
    if (!body.is_object()) {
      throw Error(ErrorKind::kParse, "judgments must be a JSON object");
    }
    JudgmentVector v{d.query(q).id,
                     std::vector<Outcome>(d.num_models(), Outcome::kDraw)};
    std::vector<bool> seen(d.num_models(), false);
    for (auto it = body.begin(); it != body.end(); ++it) {
      auto j = d.FindModel(it.key());
      if (!j) throw Error(ErrorKind::kValidation, "unknown model: " + it.key());
      std::optional<Outcome> o;
      if (it.value().is_string()) o = ParseOutcomeSymbol(it.value().get<std::string>());
      if (!o) {
        throw Error(ErrorKind::kValidation, "unknown outcome symbol for " + it.key());
      }
      if (*j == d.baseline() && *o != Outcome::kDraw) {
        throw Error(ErrorKind::kValidation, "the baseline must draw with itself");
      }
      v.outcomes[*j] = *o;
      seen[*j] = true;
    }
    for (ModelIndex j = 0; j < d.num_models(); ++j) {
      if (!seen[j] && j != d.baseline()) {
        throw Error(ErrorKind::kValidation, "missing outcome for " + d.model_id(j));
      }
    }
    return v;
  }

 private:
  const Dataset* dataset_;
  const SelectionState* state_;
  std::istream* in_;
  std::ostream* out_;
};

}  // namespace

int RunCli(const std::vector<std::string>& args, std::istream& in,
           std::ostream& out, std::ostream& err) {
  CLI::App app{"Active selection of the best model under a small label budget"};
  app.name("actsel");
  app.require_subcommand(1);

  // validate
  Common validate_opts;
  auto* validate = app.add_subcommand("validate", "Check a dataset file");
  AddCommon(validate, validate_opts, false);

  // panel
  Common panel_opts;
  std::string panel_out;
  auto* panel = app.add_subcommand("panel", "Precompute the weak-judge cache");
  AddCommon(panel, panel_opts);
  panel->add_option("--out", panel_out, "Cache file to write")->required();

  // calibrate
  Common cal_opts;
  std::size_t cal_budget = 0, cal_pool = 0, cal_realizations = 1000;
  double cal_step = 0.05;
  std::uint64_t cal_seed = 0;
  std::string cal_out;
  auto* calibrate = app.add_subcommand("calibrate", "Grid-search noise parameters without oracle labels");
  AddCommon(calibrate, cal_opts);
  calibrate->add_option("--budget", cal_budget, "Label budget")->required();
  calibrate->add_option("--pool", cal_pool, "Pool size (default: whole dataset)");
  calibrate->add_option("--grid-step", cal_step, "Grid spacing")->check(CLI::Range(0.001, 0.5));
  calibrate->add_option("--realizations", cal_realizations, "Realizations per grid point");
  calibrate->add_option("--seed", cal_seed, "Master seed")->required();
  calibrate->add_option("--out", cal_out, "Calibration report (JSON)");

  // simulate
  Common sim_opts;
  std::vector<std::string> sim_strategies{"all"};
  std::size_t sim_budget = 0, sim_pool = 0, sim_realizations = 100;
  std::size_t sim_cal_realizations = 1000;
  double sim_step = 0.05;
  std::uint64_t sim_seed = 0;
  std::string sim_params = "0.2,0.4", sim_out;
  double sim_lambda = kDefaultBtRegularization;
  auto* simulate = app.add_subcommand("simulate", "Run a replay campaign and write reports");
  AddCommon(simulate, sim_opts);
  simulate->add_option("--strategies", sim_strategies, "Strategies; the first is compared against the rest")
      ->delimiter(',');
  simulate->add_option("--budget", sim_budget, "Maximum label budget")->required();
  simulate->add_option("--pool", sim_pool, "Pool size (default: whole dataset)");
  simulate->add_option("--realizations", sim_realizations, "Realizations per strategy");
  simulate->add_option("--seed", sim_seed, "Master seed")->required();
  simulate->add_option("--params", sim_params, "'eps_loss,eps_draw', a calibration report, or 'calibrate'");
  simulate->add_option("--grid-step", sim_step, "Grid spacing for --params calibrate");
  simulate->add_option("--calibration-realizations", sim_cal_realizations,
                       "Realizations per grid point for --params calibrate");
  simulate->add_option("--bt-lambda", sim_lambda, "Bradley-Terry regularization");
  simulate->add_option("--out", sim_out, "Output directory")->required();

  // select
  Common sel_opts;
  std::size_t sel_budget = 0;
  std::uint64_t sel_seed = 0;
  std::string sel_params = "0.2,0.4", sel_strategy = "llm-selector";
  bool sel_live = false;
  auto* select = app.add_subcommand("select", "One selection run (replay, or live over stdin/stdout)");
  AddCommon(select, sel_opts);
  select->add_option("--budget", sel_budget, "Label budget")->required();
  select->add_option("--params", sel_params, "'eps_loss,eps_draw' or a calibration report");
  select->add_option("--seed", sel_seed, "Seed");
  select->add_option("--strategy", sel_strategy, "Acquisition strategy");
  select->add_flag("--live", sel_live, "Read judgments from stdin instead of the oracle");

  // serve
  std::vector<std::string> serve_datasets;
  std::string serve_host = "127.0.0.1", serve_storage;
  int serve_port = 8080;
  auto* serve = app.add_subcommand("serve", "Start the session service");
  serve->add_option("--dataset", serve_datasets, "Dataset file(s); the id is the file stem")->required();
  serve->add_option("--host", serve_host, "Listen address");
  serve->add_option("--port", serve_port, "Listen port (0 = any)");
  serve->add_option("--storage", serve_storage, "Transcript directory for durable sessions");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  try {
    if (validate->parsed()) {
      Dataset d = LoadDataset(validate_opts.dataset,
                              validate_opts.baseline == "auto" ? "" : validate_opts.baseline);
      ValidationReport report = ValidateDataset(d);
      out << FormatReport(report);
      out << d.num_queries() << " queries, " << d.num_models()
          << " models, baseline " << d.baseline_id()
          << (d.has_oracle() ? ", oracle present" : ", no oracle") << "\n";
      return report.ok() ? kExitOk : kExitValidation;
    }

    if (panel->parsed()) {
      panel_opts.panel_cache.clear();
      Loaded l = LoadWithPanel(panel_opts, err);
      SavePanelCache(panel_out, l.dataset, l.panel);
      out << "wrote " << panel_out << " (" << l.panel.num_queries() << " queries, z="
          << l.panel.judges() << ")\n";
      return kExitOk;
    }

    if (calibrate->parsed()) {
      Loaded l = LoadWithPanel(cal_opts, err);
      const std::size_t pool = cal_pool == 0 ? l.dataset.num_queries() : cal_pool;
      CheckSizes(cal_budget, pool, l.dataset.num_queries());
      CalibrationOptions options{cal_budget, pool, cal_realizations, cal_seed, cal_opts.threads};
      CalibrationResult r = Calibrate(l.dataset, l.panel, GridSpec::WithStep(cal_step), options);
      if (!cal_out.empty()) WriteCalibration(r, cal_out);
      out << "eps_loss=" << r.eps_loss << " eps_draw=" << r.eps_draw << "\n";
      return kExitOk;
    }

    if (simulate->parsed()) {
      Loaded l = LoadWithPanel(sim_opts, err);
      const std::size_t pool = sim_pool == 0 ? l.dataset.num_queries() : sim_pool;
      CheckSizes(sim_budget, pool, l.dataset.num_queries());
      if (sim_realizations == 0) {
        throw Error(ErrorKind::kInvalidArgument, "--realizations must be positive");
      }
      CampaignConfig config;
      config.strategies = ParseStrategies(sim_strategies);
      config.pool_size = pool;
      config.budget = sim_budget;
      config.realizations = sim_realizations;
      config.master_seed = sim_seed;
      config.strategy_options.bt_regularization = sim_lambda;
      config.threads = sim_opts.threads;
      std::optional<NoiseParams> params = ParseParams(sim_params);
      if (!params) {
        CalibrationOptions options{sim_budget, pool, sim_cal_realizations, sim_seed,
                                   sim_opts.threads};
        CalibrationResult r =
            Calibrate(l.dataset, l.panel, GridSpec::WithStep(sim_step), options);
        std::filesystem::create_directories(sim_out);
        WriteCalibration(r, std::filesystem::path(sim_out) / "calibration.json");
        params = r.params();
      }
      config.params = *params;
      MetricsReport report = RunCampaign(l.dataset, l.panel, config);
      WriteReport(report, l.dataset, sim_out);
      for (const EfficiencyResult& e : report.efficiency) {
        if (!e.reduction) continue;
        out << "delta=" << e.delta << " level=" << e.level << ": "
            << StrategyName(config.strategies.front()) << " " << *e.ours
            << " labels vs " << StrategyName(*e.best_other) << " "
            << *e.best_other_labels << " (" << 100.0 * *e.reduction << "% reduction)\n";
      }
      out << "wrote " << sim_out << "\n";
      return kExitOk;
    }

    if (select->parsed()) {
      Loaded l = LoadWithPanel(sel_opts, err);
      CheckSizes(sel_budget, l.dataset.num_queries(), l.dataset.num_queries());
      auto kind = ParseStrategyKind(sel_strategy);
      if (!kind) throw Error(ErrorKind::kInvalidArgument, "unknown strategy: " + sel_strategy);
      std::optional<NoiseParams> params = ParseParams(sel_params);
      if (!params) {
        throw Error(ErrorKind::kInvalidArgument,
                    "select takes explicit parameters or a calibration report");
      }
      if (!sel_live && !l.dataset.has_oracle()) {
        throw Error(ErrorKind::kInvalidArgument,
                    "dataset has no oracle judgments; use --live");
      }
      std::vector<QueryIndex> pool(l.dataset.num_queries());
      for (QueryIndex q = 0; q < pool.size(); ++q) pool[q] = q;
      SelectionState state(l.dataset, l.panel, pool, *params, sel_budget, sel_seed);
      auto strategy = MakeStrategy(*kind);
      ReplayOracle replay(l.dataset);
      StreamOracle live(l.dataset, state, in, out);
      JudgmentSource& source = sel_live ? static_cast<JudgmentSource&>(live) : replay;
      while (!state.exhausted()) Step(state, *strategy, source);

      const Dataset& d = l.dataset;
      const auto rates = AnnotatedWinRates(state.annotations(), d.num_models(), d.baseline());
      const auto probs = state.posterior().Probabilities();
      json result{{"selected_model", d.model_id(state.FinalModel())},
                  {"budget", sel_budget},
                  {"entropy", state.posterior().Entropy()}};
      json wr = json::object(), post = json::object(), order = json::array();
      for (ModelIndex j = 0; j < d.num_models(); ++j) {
        wr[d.model_id(j)] = rates[j];
        post[d.model_id(j)] = probs[j];
      }
      for (QueryIndex q : state.annotation_order()) order.push_back(d.query(q).id);
      result["win_rates"] = wr;
      result["posterior"] = post;
      result["annotated_queries"] = order;
      out << result.dump(2) << "\n";
      return kExitOk;
    }

    if (serve->parsed()) {
      std::optional<std::filesystem::path> storage;
      if (!serve_storage.empty()) storage = serve_storage;
      SessionManager manager(storage);
      for (const std::string& path : serve_datasets) {
        manager.AddDataset(std::filesystem::path(path).stem().string(), LoadDataset(path));
      }
      const std::size_t restored = manager.Recover();
      HttpService service(manager);
      const int port = service.Start(serve_host, serve_port);
      out << "listening on " << serve_host << ":" << port;
      if (restored) out << " (" << restored << " sessions restored)";
      out << std::endl;
      service.Wait();
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return ExitFor(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace actsel
