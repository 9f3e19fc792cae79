//
// Copyright 2026 The dfpricing Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Command-line driver: simulate, fit, price, sweep and report.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dfpricing/error.h"
#include "dfpricing/experiment.h"

namespace {

using dfpricing::ErrorCode;

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfig:
      return 2;
    case ErrorCode::kData:
    case ErrorCode::kIo:
    case ErrorCode::kInvalidInput:
      return 3;
    case ErrorCode::kTraining:
    case ErrorCode::kNumeric:
    case ErrorCode::kDomain:
      return 4;
  }
  return 4;
}

// One JSON object per failure on stderr.
void ReportError(std::string_view code, int exit_code,
                 const std::string& context, const std::string& config,
                 const std::string& message) {
  nlohmann::json line = {{"error", code},      {"exit_code", exit_code},
                         {"context", context}, {"config", config},
                         {"message", message}};
  std::cerr << line.dump() << "\n";
}

struct GlobalFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
  std::optional<std::string> out;
};

dfpricing::ExperimentConfig LoadConfig(const GlobalFlags& flags) {
  dfpricing::ExperimentConfig config =
      flags.config_path.empty()
          ? dfpricing::ParseExperimentConfig("", "<defaults>")
          : dfpricing::LoadExperimentConfig(flags.config_path);
  if (flags.seed) config.seed = *flags.seed;
  if (flags.jobs) config.jobs = *flags.jobs;
  if (flags.out) config.output_dir = *flags.out;
  config.Validate();
  return config;
}

std::vector<dfpricing::ModelKind> ParseKinds(const std::string& name) {
  using dfpricing::ModelKind;
  if (name == "all") {
    return {ModelKind::kPlainVanilla, ModelKind::kMultiOutput,
            ModelKind::kMultiTaskY, ModelKind::kMultiTaskMuhat};
  }
  return {dfpricing::ParseModelKind(name)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrimination-free insurance pricing with multi-task networks"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags flags;
  app.add_option("--config", flags.config_path, "Experiment config (YAML)");
  app.add_option("--seed", flags.seed, "Base seed, overrides the config");
  app.add_option("--jobs", flags.jobs, "Parallel training jobs")
      ->check(CLI::PositiveNumber);
  app.add_option("--out", flags.out, "Output directory, overrides the config");

  auto* simulate = app.add_subcommand("simulate", "Sample the portfolio");

  std::string fit_model = "all";
  std::string fit_scenario;
  auto* fit = app.add_subcommand("fit", "Fit models on a masked scenario");
  fit->add_option("--model", fit_model,
                  "plain_vanilla, multi_output, multi_task_y, "
                  "multi_task_muhat, unawareness_aux or all")
      ->capture_default_str();
  fit->add_option("--scenario", fit_scenario,
                  "Scenario label (default: the first)");

  std::string price_model = "multi_task_y";
  std::string price_scenario;
  auto* price = app.add_subcommand("price", "Tabulate prices of a fitted model");
  price->add_option("--model", price_model, "Model kind")->capture_default_str();
  price->add_option("--scenario", price_scenario, "Scenario label");

  std::string sweep_mode;
  auto* sweep = app.add_subcommand("sweep", "Drop-out sweep");
  sweep->add_option("--mode", sweep_mode, "mcar or mnar")
      ->required()
      ->check(CLI::IsMember({"mcar", "mnar"}));

  auto* report = app.add_subcommand("report", "Consolidate tables and figures");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    ReportError("config", 2, "command line", flags.config_path, e.what());
    return 2;
  }

  try {
    const dfpricing::ExperimentConfig config = LoadConfig(flags);
    auto scenario_or_first = [&](const std::string& label) {
      return label.empty() ? config.scenarios.front().label : label;
    };
    if (simulate->parsed()) {
      const auto r = dfpricing::RunSimulate(config);
      std::cout << "wrote " << r.portfolio_csv.string() << " and "
                << r.oracle_csv.string() << " (" << r.records << " records)\n";
    } else if (fit->parsed()) {
      const auto kinds = ParseKinds(fit_model);
      for (const auto& a :
           dfpricing::RunFit(config, kinds, scenario_or_first(fit_scenario))) {
        std::cout << "wrote " << a.model_path.string() << " and "
                  << a.log_path.string() << "\n";
      }
    } else if (price->parsed()) {
      const auto path =
          dfpricing::RunPrice(config, dfpricing::ParseModelKind(price_model),
                              scenario_or_first(price_scenario));
      std::cout << "wrote " << path.string() << "\n";
    } else if (sweep->parsed()) {
      const auto mode = sweep_mode == "mcar" ? dfpricing::MaskMode::kMcar
                                             : dfpricing::MaskMode::kMnar;
      const auto points = dfpricing::RunSweep(config, mode);
      int failed = 0;
      for (const auto& p : points) {
        if (p.status != "ok") {
          ++failed;
          std::cerr << "point " << p.label << " seed " << p.seed << ": "
                    << p.status << "\n";
        }
      }
      std::cout << "swept " << points.size() << " points, " << failed
                << " failed\n";
      if (failed > 0) {
        ReportError("training", 4, "sweep", config.source,
                    std::to_string(failed) + " grid points failed");
        return 4;
      }
    } else if (report->parsed()) {
      const auto r = dfpricing::RunReport(config);
      std::cout << "wrote " << r.written.size() << " report files\n";
    }
  } catch (const dfpricing::Error& e) {
    const int code = ExitCodeFor(e.code());
    ReportError(dfpricing::ErrorCodeName(e.code()), code, e.context(),
                flags.config_path.empty() ? "<defaults>" : flags.config_path,
                e.message());
    return code;
  } catch (const std::exception& e) {
    ReportError("internal", 4, "", flags.config_path, e.what());
    return 4;
  }
  return 0;
}
