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

#include "dfpricing/experiment.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include <fmt/format.h>

#include "dfpricing/error.h"
#include "dfpricing/evaluation.h"
#include "dfpricing/model_io.h"
#include "dfpricing/parallel.h"
#include "dfpricing/rng.h"

namespace dfpricing {
namespace {

namespace fs = std::filesystem;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string Num(double v) {
  return std::isnan(v) ? "NA" : fmt::format("{:.17g}", v);
}

std::string Milli(double v) {
  return std::isnan(v) ? "NA" : fmt::format("{:.6f}", 1e3 * v);
}

std::string Percent(double v) {
  return std::isnan(v) ? "NA" : fmt::format("{:.2f}", 100.0 * v);
}

double ParseNum(const std::string& text, const std::string& where) {
  if (text == "NA") return kNaN;
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  Fail(ErrorCode::kData, "malformed number '" + text + "'", where);
}

void WriteText(const fs::path& path, const std::string& text) {
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  if (ec) Fail(ErrorCode::kIo, "cannot create directory", path.parent_path().string());
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kIo, "cannot open for writing", path.string());
  out << text;
  out.flush();
  if (!out) Fail(ErrorCode::kIo, "write failed", path.string());
}

std::vector<std::vector<std::string>> ReadCsv(const fs::path& path,
                                              std::string_view header) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kData, "missing artifact", path.string());
  std::string line;
  if (!std::getline(in, line) || line != header) {
    Fail(ErrorCode::kData, "unexpected header", path.string());
  }
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    rows.push_back(std::move(fields));
  }
  return rows;
}

std::string ModeName(MaskMode mode) {
  return mode == MaskMode::kMcar ? "mcar" : "mnar";
}

double Median(std::vector<double> v) {
  std::erase_if(v, [](double x) { return std::isnan(x); });
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

std::vector<PortfolioRecord> MaskedFor(const ExperimentConfig& config,
                                       std::span<const PortfolioRecord> records,
                                       const Scenario& scenario) {
  return ApplyMask(records, ScenarioMask(scenario, config.seed));
}

// lambda*(x) per (age, smoker) cell under the reference measure.
std::vector<double> TrueDiscriminationFree(const PricingMeasure& reference,
                                           const ProtectedLevels& levels) {
  std::vector<double> out;
  out.reserve(kAgeCount * 2);
  for (int age = kMinAge; age <= kMaxAge; ++age) {
    for (bool smoker : {false, true}) {
      double price = 0.0;
      for (Gender g : {Gender::kFemale, Gender::kMale}) {
        price += TrueFrequency(age, smoker, g) *
                 reference.probabilities[levels.IndexOf(g)];
      }
      out.push_back(price);
    }
  }
  return out;
}

std::size_t CellOf(int age, bool smoker) {
  return static_cast<std::size_t>(age - kMinAge) * 2 + (smoker ? 1 : 0);
}

std::string TrainingLog(const FittedModel& model) {
  std::string out =
      "member,epoch,train_loss,validation_loss,best_validation_loss,"
      "is_best_epoch\n";
  const auto& members = model.ensemble().members();
  for (std::size_t m = 0; m < members.size(); ++m) {
    const TrainHistory& h = members[m].history;
    for (const EpochRecord& e : h.epochs) {
      out += fmt::format("{},{},{},{},{},{}\n", m, e.epoch, Num(e.train_loss),
                         Num(e.validation_loss), Num(e.best_validation_loss),
                         e.epoch == h.best_epoch ? 1 : 0);
    }
  }
  return out;
}

std::string PriceCsv(const FittedModel& model, const PricingMeasure* measure) {
  const PriceTable table(model);
  std::string out =
      "age,smoker,best_estimate_female,best_estimate_male,p_female,p_male,"
      "unawareness,discrimination_free\n";
  const bool heads = model.kind() != ModelKind::kUnawarenessAux;
  const bool unaware = model.multi_task() ||
                       model.kind() == ModelKind::kUnawarenessAux;
  const ProtectedLevels& levels = model.levels();
  for (int age = kMinAge; age <= kMaxAge; ++age) {
    for (bool smoker : {false, true}) {
      const PricePoint& p = table.at(age, smoker);
      const std::size_t f = levels.IndexOf(Gender::kFemale);
      const std::size_t m = levels.IndexOf(Gender::kMale);
      const double df = heads && measure
                            ? DiscriminationFreeFromHeads(p.best_estimates,
                                                          *measure)
                            : kNaN;
      out += fmt::format(
          "{},{},{},{},{},{},{},{}\n", age, smoker ? 1 : 0,
          Num(heads ? p.best_estimates[f] : kNaN),
          Num(heads ? p.best_estimates[m] : kNaN),
          Num(p.probabilities.empty() ? kNaN : p.probabilities[f]),
          Num(p.probabilities.empty() ? kNaN : p.probabilities[m]),
          Num(unaware ? p.unawareness : kNaN), Num(df));
    }
  }
  return out;
}

fs::path OraclePath(const ExperimentConfig& config) {
  return config.output_dir / "portfolio_oracle.csv";
}

}  // namespace

std::string MaskLabel(MaskMode mode, double base_rate, double m_rate) {
  const double m = mode == MaskMode::kMcar ? base_rate : m_rate;
  return fmt::format("dropout-b{:.2f}-m{:.2f}", base_rate, m);
}

MaskSpec ScenarioMask(const Scenario& scenario, std::uint64_t base_seed) {
  MaskSpec spec;
  spec.mode = scenario.mode;
  spec.base_rate = scenario.base_rate;
  spec.m_rate =
      scenario.mode == MaskMode::kMcar ? scenario.base_rate : scenario.m_rate;
  spec.seed = SeedForLabel(
      base_seed, MaskLabel(scenario.mode, scenario.base_rate, scenario.m_rate));
  return spec;
}

PopulationConfig PopulationFor(const ExperimentConfig& config,
                               std::uint64_t base_seed) {
  PopulationConfig population = config.population;
  population.seed = SeedForLabel(base_seed, "population");
  return population;
}

FitOptions FitOptionsFor(const ExperimentConfig& config, ModelKind kind,
                         std::string_view point_label, std::uint64_t base_seed,
                         std::size_t ensemble_size) {
  FitOptions options;
  options.hidden_dims = config.hidden_dims;
  options.train = config.training;
  options.train.seed = SeedForLabel(
      base_seed,
      std::string(point_label) + "/" + std::string(ModelKindName(kind)));
  if (ensemble_size > 0) options.train.ensemble_size = ensemble_size;
  options.aux_direction = config.aux_direction;
  options.jobs = config.jobs;
  return options;
}

FittedModel FitModel(ModelKind kind, std::span<const PortfolioRecord> records,
                     const FitOptions& options, const FitOptions& aux_options) {
  switch (kind) {
    case ModelKind::kPlainVanilla:
      return FitPlainVanilla(records, options);
    case ModelKind::kMultiOutput:
      return FitMultiOutput(records, options);
    case ModelKind::kMultiTaskY:
      return FitMultiTaskY(records, options);
    case ModelKind::kUnawarenessAux:
      return FitUnawarenessAux(records, options);
    case ModelKind::kMultiTaskMuhat: {
      const FittedModel aux = FitUnawarenessAux(records, aux_options);
      return FitMultiTaskMuhat(records, options, aux);
    }
  }
  Fail(ErrorCode::kInvalidInput, "unknown model kind");
}

ModelScores ScoreModel(const FittedModel& model,
                       std::span<const PortfolioRecord> portfolio,
                       const PricingMeasure& measure,
                       const PricingMeasure& reference) {
  if (portfolio.empty()) Fail(ErrorCode::kData, "evaluation portfolio is empty");
  const PriceTable table(model);
  const ProtectedLevels& levels = model.levels();
  const bool heads = model.kind() != ModelKind::kUnawarenessAux;
  const bool unaware =
      model.multi_task() || model.kind() == ModelKind::kUnawarenessAux;
  const std::vector<double> true_df = TrueDiscriminationFree(reference, levels);

  std::vector<double> model_df(kAgeCount * 2, kNaN);
  if (heads) {
    for (int age = kMinAge; age <= kMaxAge; ++age) {
      for (bool smoker : {false, true}) {
        model_df[CellOf(age, smoker)] = DiscriminationFreeFromHeads(
            table.at(age, smoker).best_estimates, measure);
      }
    }
  }

  double be = 0.0, un = 0.0, df = 0.0, dft = 0.0;
  for (std::size_t i = 0; i < portfolio.size(); ++i) {
    const PortfolioRecord& r = portfolio[i];
    if (r.gender == Gender::kMissing || !(r.true_lambda > 0.0)) {
      Fail(ErrorCode::kData, "evaluation needs unmasked oracle records",
           "record " + std::to_string(i));
    }
    const PricePoint& p = table.at(r.age, r.smoker);
    const std::size_t cell = CellOf(r.age, r.smoker);
    if (heads) {
      be += KlPointwise(r.true_lambda, p.best_estimates[levels.IndexOf(r.gender)]);
      df += KlPointwise(r.true_lambda, model_df[cell]);
      dft += KlPointwise(true_df[cell], model_df[cell]);
    }
    if (unaware) un += KlPointwise(r.true_lambda, p.unawareness);
  }
  const double n = static_cast<double>(portfolio.size());
  ModelScores s;
  s.kl_best_estimate = heads ? be / n : kNaN;
  s.kl_unawareness = unaware ? un / n : kNaN;
  s.kl_discrimination_free = heads ? df / n : kNaN;
  s.kl_to_true_discrimination_free = heads ? dft / n : kNaN;
  s.measure = measure.probabilities;
  return s;
}

PricingMeasure ResolveMeasure(const MeasureSelection& selection,
                              const FittedModel& model,
                              std::span<const PortfolioRecord> fitted_on,
                              std::string_view config_path) {
  switch (selection.choice) {
    case MeasureChoice::kEmpirical:
      return EstimateMeasureEmpirical(fitted_on, model.levels());
    case MeasureChoice::kMultiTask:
      if (!model.multi_task()) {
        Fail(ErrorCode::kConfig,
             "multitask measure needs a multi-task model, got " +
                 std::string(ModelKindName(model.kind())),
             std::string(config_path));
      }
      return EstimateMeasureMultiTask(model, fitted_on);
    case MeasureChoice::kExplicit:
      return UserMeasure(selection.probabilities);
  }
  Fail(ErrorCode::kConfig, "unknown measure", std::string(config_path));
}

SimulateResult RunSimulate(const ExperimentConfig& config) {
  config.Validate();
  const PopulationConfig population = PopulationFor(config, config.seed);
  const auto records = SamplePortfolio(population);
  SimulateResult result;
  result.portfolio_csv = config.output_dir / "portfolio.csv";
  result.oracle_csv = OraclePath(config);
  result.records = records.size();
  std::error_code ec;
  fs::create_directories(config.output_dir, ec);
  if (ec) Fail(ErrorCode::kIo, "cannot create directory", config.output_dir.string());
  WritePortfolioCsv(result.portfolio_csv, records, false);
  WritePortfolioCsv(result.oracle_csv, records, true);
  double female = 0.0;
  for (const auto& r : records) female += r.gender == Gender::kFemale;
  WriteText(config.output_dir / "simulate_manifest.csv",
            fmt::format("key,value\nseed,{}\npopulation_seed,{}\nn,{}\n"
                        "female_share,{}\n",
                        config.seed, population.seed, records.size(),
                        Num(female / static_cast<double>(records.size()))));
  return result;
}

std::vector<PortfolioRecord> LoadSimulatedPortfolio(
    const ExperimentConfig& config) {
  const fs::path path = OraclePath(config);
  if (!fs::exists(path)) {
    Fail(ErrorCode::kData, "portfolio not found; run simulate first",
         path.string());
  }
  auto records = ReadPortfolioCsv(path);
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].gender == Gender::kMissing) {
      Fail(ErrorCode::kData, "simulated portfolio must be unmasked",
           path.string() + ": record " + std::to_string(i));
    }
  }
  return records;
}

fs::path ModelPath(const ExperimentConfig& config, std::string_view scenario,
                   ModelKind kind) {
  return config.output_dir / "models" / std::string(scenario) /
         (std::string(ModelKindName(kind)) + ".json");
}

std::vector<FitArtifact> RunFit(const ExperimentConfig& config,
                                std::span<const ModelKind> kinds,
                                std::string_view scenario_label) {
  config.Validate();
  const Scenario& scenario = config.FindScenario(scenario_label);
  const auto portfolio = LoadSimulatedPortfolio(config);
  const auto masked = MaskedFor(config, portfolio, scenario);
  const std::string point =
      MaskLabel(scenario.mode, scenario.base_rate, scenario.m_rate);

  std::vector<FitArtifact> artifacts;
  auto save = [&](ModelKind kind, const FittedModel& model,
                  const FitOptions& options) {
    FitArtifact a{kind, ModelPath(config, scenario.label, kind), {}};
    a.log_path = a.model_path.parent_path() /
                 (std::string(ModelKindName(kind)) + "_training_log.csv");
    std::error_code ec;
    fs::create_directories(a.model_path.parent_path(), ec);
    if (ec) {
      Fail(ErrorCode::kIo, "cannot create directory",
           a.model_path.parent_path().string());
    }
    SaveModel(a.model_path, model, options.train);
    WriteText(a.log_path, TrainingLog(model));
    artifacts.push_back(std::move(a));
  };

  for (ModelKind kind : kinds) {
    const FitOptions options =
        FitOptionsFor(config, kind, point, config.seed, 0);
    if (kind == ModelKind::kMultiTaskMuhat) {
      const FitOptions aux_options = FitOptionsFor(
          config, ModelKind::kUnawarenessAux, point, config.seed, 0);
      const FittedModel aux = FitUnawarenessAux(masked, aux_options);
      save(ModelKind::kUnawarenessAux, aux, aux_options);
      save(kind, FitMultiTaskMuhat(masked, options, aux), options);
    } else {
      save(kind, FitModel(kind, masked, options, options), options);
    }
  }
  return artifacts;
}

fs::path RunPrice(const ExperimentConfig& config, ModelKind kind,
                  std::string_view scenario_label) {
  config.Validate();
  const Scenario& scenario = config.FindScenario(scenario_label);
  const fs::path model_path = ModelPath(config, scenario.label, kind);
  if (!fs::exists(model_path)) {
    Fail(ErrorCode::kData, "model not found; run fit first",
         model_path.string());
  }
  const FittedModel model = LoadModel(model_path);
  std::optional<PricingMeasure> measure;
  if (model.kind() != ModelKind::kUnawarenessAux) {
    const auto masked =
        MaskedFor(config, LoadSimulatedPortfolio(config), scenario);
    measure = ResolveMeasure(config.pricing_measure, model, masked,
                             "pricing_measure");
  }
  const fs::path out = config.output_dir / "prices" / scenario.label /
                       (std::string(ModelKindName(kind)) + ".csv");
  WriteText(out, PriceCsv(model, measure ? &*measure : nullptr));
  return out;
}

namespace {

constexpr std::string_view kPointsHeader =
    "mode,seed,label,base_rate,m_rate,actual_dropout,subportfolio_dropout,"
    "empirical_female,multitask_female,naive_kl_best_estimate,"
    "multitask_kl_best_estimate,naive_kl_discrimination_free,"
    "multitask_kl_discrimination_free,naive_kl_to_true_discrimination_free,"
    "multitask_kl_to_true_discrimination_free,multitask_kl_unawareness,status";

std::string PointRow(const SweepPoint& p) {
  return fmt::format(
      "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", ModeName(p.mode),
      p.seed, p.label, Num(p.base_rate), Num(p.m_rate), Num(p.actual_dropout),
      Num(p.subportfolio_dropout), Num(p.empirical_female),
      Num(p.multitask_female), Num(p.naive.kl_best_estimate),
      Num(p.multitask.kl_best_estimate), Num(p.naive.kl_discrimination_free),
      Num(p.multitask.kl_discrimination_free),
      Num(p.naive.kl_to_true_discrimination_free),
      Num(p.multitask.kl_to_true_discrimination_free),
      Num(p.multitask.kl_unawareness), p.status);
}

SweepPoint ParsePoint(const std::vector<std::string>& f,
                      const std::string& where) {
  if (f.size() != 17) Fail(ErrorCode::kData, "wrong number of fields", where);
  SweepPoint p;
  p.mode = f[0] == "mnar" ? MaskMode::kMnar : MaskMode::kMcar;
  p.seed = static_cast<std::uint64_t>(ParseNum(f[1], where));
  p.label = f[2];
  p.base_rate = ParseNum(f[3], where);
  p.m_rate = ParseNum(f[4], where);
  p.actual_dropout = ParseNum(f[5], where);
  p.subportfolio_dropout = ParseNum(f[6], where);
  p.empirical_female = ParseNum(f[7], where);
  p.multitask_female = ParseNum(f[8], where);
  p.naive.kl_best_estimate = ParseNum(f[9], where);
  p.multitask.kl_best_estimate = ParseNum(f[10], where);
  p.naive.kl_discrimination_free = ParseNum(f[11], where);
  p.multitask.kl_discrimination_free = ParseNum(f[12], where);
  p.naive.kl_to_true_discrimination_free = ParseNum(f[13], where);
  p.multitask.kl_to_true_discrimination_free = ParseNum(f[14], where);
  p.multitask.kl_unawareness = ParseNum(f[15], where);
  p.status = f[16];
  return p;
}

double SubportfolioMissing(std::span<const PortfolioRecord> masked) {
  double in = 0.0, missing = 0.0;
  for (const auto& r : masked) {
    if (!InElevatedSubportfolio(r.age, r.smoker)) continue;
    in += 1.0;
    missing += r.gender == Gender::kMissing;
  }
  return in > 0.0 ? missing / in : kNaN;
}

// Sweep x-axis: the drop-out rate for MCAR, the rate on the sub-portfolio
// for MNAR.
double AxisRate(const SweepPoint& p) {
  return p.mode == MaskMode::kMcar ? p.base_rate : p.m_rate;
}

struct Curve {
  const char* model_label;
  const char* quantity;
  double ModelScores::*field;
  bool multitask;
};

constexpr std::array<Curve, 4> kCurves{{
    {"plain_vanilla", "kl_best_estimate", &ModelScores::kl_best_estimate, false},
    {"multi_task_y", "kl_best_estimate", &ModelScores::kl_best_estimate, true},
    {"plain_vanilla", "kl_to_true_discrimination_free",
     &ModelScores::kl_to_true_discrimination_free, false},
    {"multi_task_y", "kl_to_true_discrimination_free",
     &ModelScores::kl_to_true_discrimination_free, true},
}};

// Points grouped by label in first-seen order.
std::vector<std::vector<SweepPoint>> GroupByLabel(
    const std::vector<SweepPoint>& points) {
  std::vector<std::vector<SweepPoint>> groups;
  std::map<std::string, std::size_t> index;
  for (const SweepPoint& p : points) {
    auto [it, fresh] = index.emplace(p.label, groups.size());
    if (fresh) groups.emplace_back();
    groups[it->second].push_back(p);
  }
  return groups;
}

double MedianOf(const std::vector<SweepPoint>& group, auto get) {
  std::vector<double> v;
  for (const SweepPoint& p : group) {
    if (p.status == "ok") v.push_back(get(p));
  }
  return Median(std::move(v));
}

std::string CurvesCsv(const std::vector<SweepPoint>& points) {
  std::string out = "dropout_rate,model_label,quantity,value_1e-3\n";
  for (const auto& group : GroupByLabel(points)) {
    for (const Curve& c : kCurves) {
      const double v = MedianOf(group, [&](const SweepPoint& p) {
        return (c.multitask ? p.multitask : p.naive).*(c.field);
      });
      out += fmt::format("{:.2f},{},{},{}\n", AxisRate(group.front()),
                         c.model_label, c.quantity, Milli(v));
    }
  }
  return out;
}

}  // namespace

std::vector<SweepPoint> RunSweep(const ExperimentConfig& config, MaskMode mode) {
  config.Validate();
  std::vector<std::uint64_t> seeds = config.sweep.seeds;
  if (seeds.empty()) seeds.push_back(config.seed);

  std::vector<Scenario> grid;
  if (mode == MaskMode::kMcar) {
    for (double r : config.sweep.mcar_rates) {
      grid.push_back({MaskLabel(mode, r, r), MaskMode::kMcar, r, r});
    }
  } else {
    const double b = config.sweep.mnar_base_rate;
    for (double m : config.sweep.mnar_m_rates) {
      grid.push_back({MaskLabel(mode, b, m), MaskMode::kMnar, b, m});
    }
  }
  if (grid.empty()) {
    Fail(ErrorCode::kConfig, "empty sweep grid",
         mode == MaskMode::kMcar ? "sweep.mcar_rates" : "sweep.mnar_m_rates");
  }

  std::vector<std::vector<PortfolioRecord>> portfolios;
  std::vector<PricingMeasure> references;
  for (std::uint64_t s : seeds) {
    portfolios.push_back(SamplePortfolio(PopulationFor(config, s)));
    references.push_back(EstimateMeasureEmpirical(portfolios.back()));
  }

  const fs::path root = config.output_dir / "sweep" / ModeName(mode);
  ExperimentConfig point_config = config;
  point_config.jobs = 1;  // parallelism is across grid points
  std::vector<SweepPoint> points(seeds.size() * grid.size());
  ParallelFor(points.size(), config.jobs, [&](std::size_t task) {
    const std::size_t si = task / grid.size();
    const Scenario& scenario = grid[task % grid.size()];
    SweepPoint& p = points[task];
    p.mode = mode;
    p.seed = seeds[si];
    p.label = scenario.label;
    p.base_rate = scenario.base_rate;
    p.m_rate = scenario.m_rate;
    p.naive = p.multitask = ModelScores{kNaN, kNaN, kNaN, kNaN, {}};
    p.empirical_female = p.multitask_female = kNaN;
    const fs::path dir =
        root / fmt::format("seed-{}", p.seed) / scenario.label;
    try {
      const auto& portfolio = portfolios[si];
      const auto masked =
          ApplyMask(portfolio, ScenarioMask(scenario, p.seed));
      p.actual_dropout = MissingShare(masked);
      p.subportfolio_dropout = SubportfolioMissing(masked);

      const std::size_t ensemble = config.sweep.ensemble_size;
      const FitOptions naive_options = FitOptionsFor(
          point_config, ModelKind::kPlainVanilla, p.label, p.seed, ensemble);
      const FitOptions mt_options = FitOptionsFor(
          point_config, ModelKind::kMultiTaskY, p.label, p.seed, ensemble);
      const FittedModel naive = FitPlainVanilla(masked, naive_options);
      const FittedModel mt = FitMultiTaskY(masked, mt_options);

      p.empirical_female =
          EstimateMeasureEmpirical(masked).probabilities[0];
      p.multitask_female =
          EstimateMeasureMultiTask(mt, masked).probabilities[0];
      const PricingMeasure naive_measure = ResolveMeasure(
          config.sweep.naive_measure, naive, masked, "sweep.naive_measure");
      const PricingMeasure mt_measure =
          ResolveMeasure(config.sweep.multitask_measure, mt, masked,
                         "sweep.multitask_measure");
      p.naive = ScoreModel(naive, portfolio, naive_measure, references[si]);
      p.multitask = ScoreModel(mt, portfolio, mt_measure, references[si]);

      std::error_code ec;
      fs::create_directories(dir, ec);
      if (ec) Fail(ErrorCode::kIo, "cannot create directory", dir.string());
      SaveModel(dir / "plain_vanilla.json", naive, naive_options.train);
      SaveModel(dir / "multi_task_y.json", mt, mt_options.train);
    } catch (const Error& e) {
      p.status = "failed:" + std::string(ErrorCodeName(e.code()));
    }
    WriteText(dir / "point.csv",
              std::string(kPointsHeader) + "\n" + PointRow(p));
  });

  std::string table = std::string(kPointsHeader) + "\n";
  for (const SweepPoint& p : points) table += PointRow(p);
  WriteText(root / "points.csv", table);
  WriteText(root / "curves.csv", CurvesCsv(points));
  return points;
}

namespace {

constexpr std::string_view kKlHeader = "model_label,quantity,value_1e-3\n";
constexpr std::string_view kValueHeader = "model_label,quantity,value\n";

std::vector<SweepPoint> LoadPoints(const fs::path& path) {
  std::vector<SweepPoint> points;
  const auto rows = ReadCsv(path, kPointsHeader);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    points.push_back(
        ParsePoint(rows[i], path.string() + ": row " + std::to_string(i + 1)));
  }
  return points;
}

std::string FigurePrices(const FittedModel& model,
                         const PricingMeasure& measure) {
  const PriceTable table(model);
  const ProtectedLevels& levels = model.levels();
  std::string out = "age,smoker,notion,value\n";
  for (int age = kMinAge; age <= kMaxAge; ++age) {
    for (bool smoker : {false, true}) {
      const PricePoint& p = table.at(age, smoker);
      const int s = smoker ? 1 : 0;
      out += fmt::format("{},{},best_estimate_female,{}\n", age, s,
                         Num(p.best_estimates[levels.IndexOf(Gender::kFemale)]));
      out += fmt::format("{},{},best_estimate_male,{}\n", age, s,
                         Num(p.best_estimates[levels.IndexOf(Gender::kMale)]));
      if (model.multi_task()) {
        out += fmt::format("{},{},p_female,{}\n", age, s,
                           Num(p.probabilities[levels.IndexOf(Gender::kFemale)]));
        out += fmt::format("{},{},unawareness,{}\n", age, s, Num(p.unawareness));
      }
      out += fmt::format(
          "{},{},discrimination_free,{}\n", age, s,
          Num(DiscriminationFreeFromHeads(p.best_estimates, measure)));
    }
  }
  return out;
}

std::string FigureTruePrices(const std::vector<ReferenceCell>& cells) {
  std::string out = "age,smoker,notion,value\n";
  for (int age = kMinAge; age <= kMaxAge; ++age) {
    for (bool smoker : {false, true}) {
      const ReferenceCell& f =
          cells[ReferenceCellIndex(age, smoker, Gender::kFemale)];
      const ReferenceCell& m =
          cells[ReferenceCellIndex(age, smoker, Gender::kMale)];
      const int s = smoker ? 1 : 0;
      out += fmt::format("{},{},best_estimate_female,{}\n", age, s,
                         Num(f.best_estimate));
      out += fmt::format("{},{},best_estimate_male,{}\n", age, s,
                         Num(m.best_estimate));
      out += fmt::format("{},{},unawareness,{}\n", age, s, Num(f.unawareness));
      out += fmt::format("{},{},discrimination_free,{}\n", age, s,
                         Num(f.discrimination_free));
    }
  }
  return out;
}

}  // namespace

ReportResult RunReport(const ExperimentConfig& config) {
  config.Validate();
  ReportResult result;
  const fs::path dir = config.output_dir / "report";
  auto emit = [&](const std::string& name, const std::string& text) {
    WriteText(dir / name, text);
    result.written.push_back(dir / name);
  };
  auto need = [&](const fs::path& path) {
    if (fs::exists(path)) return true;
    result.missing.push_back(fs::relative(path, config.output_dir).string());
    return false;
  };

  // Full-information tables and price figures.
  const Scenario& scenario = config.scenarios.front();
  const std::array<ModelKind, 4> kinds{
      ModelKind::kPlainVanilla, ModelKind::kMultiOutput,
      ModelKind::kMultiTaskY, ModelKind::kMultiTaskMuhat};
  if (need(OraclePath(config))) {
    const auto portfolio = LoadSimulatedPortfolio(config);
    const auto masked = MaskedFor(config, portfolio, scenario);
    const PricingMeasure reference = EstimateMeasureEmpirical(portfolio);
    PopulationConfig population = PopulationFor(config, config.seed);
    const auto cells = TrueReferencePrices(population, reference);
    const auto weights = EmpiricalCellWeights(portfolio);
    const double true_un = KlPortfolio(portfolio, [&](const PortfolioRecord& r) {
      return cells[ReferenceCellIndex(r.age, r.smoker, r.gender)].unawareness;
    });
    const double true_df = KlPortfolio(portfolio, [&](const PortfolioRecord& r) {
      return cells[ReferenceCellIndex(r.age, r.smoker, r.gender)]
          .discrimination_free;
    });

    std::string t_be(kKlHeader), t_un(kKlHeader), t_true_df(kKlHeader);
    std::string t_dec(kValueHeader), t_measure(kValueHeader);
    t_un += fmt::format("true_model,unawareness_price,{}\n", Milli(true_un));
    t_un += fmt::format("true_model,discrimination_free_price,{}\n",
                        Milli(true_df));
    t_un += fmt::format(
        "true_model,unawareness_price_cell_enumeration,{}\n",
        Milli(CellKl(cells, weights, PriceNotion::kUnawareness)));
    t_un += fmt::format(
        "true_model,discrimination_free_price_cell_enumeration,{}\n",
        Milli(CellKl(cells, weights, PriceNotion::kDiscriminationFree)));
    auto decomposition = [&](const std::string& label, double un, double df) {
      const Decomposition d = DiscriminationDecomposition(un, df);
      t_dec += fmt::format("{},kl_unawareness_1e-3,{}\n", label, Milli(un));
      t_dec += fmt::format("{},kl_discrimination_free_1e-3,{}\n", label,
                           Milli(df));
      t_dec += fmt::format("{},unawareness_percent,{:.2f}\n", label,
                           d.unawareness_percent);
      t_dec += fmt::format("{},discrimination_free_percent,{:.2f}\n", label,
                           d.discrimination_free_percent);
    };
    decomposition("true_model", true_un, true_df);
    t_measure += fmt::format("true_model,female_probability,{}\n",
                             Num(reference.probabilities[0]));
    emit("figure_true_prices.csv", FigureTruePrices(cells));

    for (ModelKind kind : kinds) {
      const fs::path path = ModelPath(config, scenario.label, kind);
      if (!need(path)) continue;
      const FittedModel model = LoadModel(path);
      const std::string label(ModelKindName(kind));
      const PricingMeasure measure = ResolveMeasure(
          config.pricing_measure, model, masked, "pricing_measure");
      const ModelScores s = ScoreModel(model, portfolio, measure, reference);
      t_be += fmt::format("{},kl_best_estimate,{}\n", label,
                          Milli(s.kl_best_estimate));
      if (model.multi_task()) {
        t_un += fmt::format("{},unawareness_price,{}\n", label,
                            Milli(s.kl_unawareness));
      }
      t_un += fmt::format("{},discrimination_free_price,{}\n", label,
                          Milli(s.kl_discrimination_free));
      t_true_df += fmt::format("{},kl_to_true_discrimination_free,{}\n", label,
                               Milli(s.kl_to_true_discrimination_free));
      if (kind == ModelKind::kMultiTaskY) {
        decomposition(label, s.kl_unawareness, s.kl_discrimination_free);
      }
      t_measure += fmt::format("{},female_probability,{}\n", label,
                               Num(measure.probabilities[0]));
      emit("figure_" + label + "_prices.csv", FigurePrices(model, measure));
    }
    emit("kl_best_estimate.csv", t_be);
    emit("kl_unawareness_discrimination_free.csv", t_un);
    emit("kl_to_true_discrimination_free.csv", t_true_df);
    emit("decomposition.csv", t_dec);
    emit("pricing_measure.csv", t_measure);
  }

  // Drop-out tables.
  std::string dropout(kValueHeader);
  for (MaskMode mode : {MaskMode::kMcar, MaskMode::kMnar}) {
    const fs::path path =
        config.output_dir / "sweep" / ModeName(mode) / "points.csv";
    if (!need(path)) continue;
    const auto groups = GroupByLabel(LoadPoints(path));
    std::string ratios(kValueHeader), kl(kKlHeader);
    for (const auto& g : groups) {
      const std::string& label = g.front().label;
      const double overall =
          MedianOf(g, [](const SweepPoint& p) { return p.actual_dropout; });
      const double sub = MedianOf(
          g, [](const SweepPoint& p) { return p.subportfolio_dropout; });
      const std::string key = ModeName(mode) + ":" + label;
      dropout += fmt::format("portfolio,overall_dropout_percent@{},{}\n", key,
                             Percent(overall));
      dropout += fmt::format("portfolio,subportfolio_dropout_percent@{},{}\n",
                             key, Percent(sub));
      ratios += fmt::format(
          "empirical,female_percent@{},{}\n", label,
          Percent(MedianOf(
              g, [](const SweepPoint& p) { return p.empirical_female; })));
      ratios += fmt::format(
          "multi_task_y,female_percent@{},{}\n", label,
          Percent(MedianOf(
              g, [](const SweepPoint& p) { return p.multitask_female; })));
      if (mode == MaskMode::kMnar) {
        ratios += fmt::format("portfolio,overall_dropout_percent@{},{}\n",
                              label, Percent(overall));
      }
      for (const Curve& c : kCurves) {
        const double v = MedianOf(g, [&](const SweepPoint& p) {
          return (c.multitask ? p.multitask : p.naive).*(c.field);
        });
        kl += fmt::format("{},{}@{},{}\n", c.model_label, c.quantity, label,
                          Milli(v));
      }
      for (const SweepPoint& p : g) {
        if (p.status != "ok") {
          kl += fmt::format("{},status@{}/seed-{},{}\n", "sweep", label, p.seed,
                            p.status);
        }
      }
    }
    const std::string name = ModeName(mode);
    emit("female_ratio_" + name + ".csv", ratios);
    emit("kl_sweep_" + name + ".csv", kl);
    emit("figure_sweep_" + name + ".csv", CurvesCsv(LoadPoints(path)));
  }
  emit("dropout_rates.csv", dropout);

  std::string missing = "artifact\n";
  for (const auto& m : result.missing) missing += m + "\n";
  const fs::path missing_path = dir / "missing_artifacts.csv";
  if (result.missing.empty()) {
    std::error_code ec;
    fs::remove(missing_path, ec);
  } else {
    emit("missing_artifacts.csv", missing);
    std::string names;
    for (const auto& m : result.missing) {
      names += (names.empty() ? "" : ", ") + m;
    }
    Fail(ErrorCode::kData, "missing artifacts: " + names,
         config.output_dir.string());
  }
  return result;
}

}  // namespace dfpricing
