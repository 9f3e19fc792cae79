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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <string>

#include <yaml-cpp/yaml.h>

#include "dfpricing/error.h"
#include "dfpricing/experiment.h"

namespace dfpricing {
namespace {

std::string Join(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

std::string Index(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

void CheckKeys(const YAML::Node& node, const std::string& path,
               std::initializer_list<std::string_view> allowed) {
  if (!node.IsMap()) {
    Fail(ErrorCode::kConfig, "expected a mapping",
         path.empty() ? "<root>" : path);
  }
  for (const auto& entry : node) {
    const auto key = entry.first.as<std::string>();
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      Fail(ErrorCode::kConfig, "unknown key", Join(path, key));
    }
  }
}

template <typename T>
T As(const YAML::Node& node, const std::string& path) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    Fail(ErrorCode::kConfig, "malformed value", path);
  }
}

template <typename T>
void Read(const YAML::Node& parent, std::string_view key,
          const std::string& path, T& out) {
  const YAML::Node node = parent[std::string(key)];
  if (node) out = As<T>(node, Join(path, key));
}

std::uint64_t AsUnsigned(const YAML::Node& node, const std::string& path) {
  const auto text = As<std::string>(node, path);
  std::uint64_t value = 0;
  std::size_t used = 0;
  try {
    if (!text.empty() && text[0] == '-') throw std::invalid_argument("sign");
    value = std::stoull(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) {
    Fail(ErrorCode::kConfig, "expected a non-negative integer", path);
  }
  return value;
}

void ReadCount(const YAML::Node& parent, std::string_view key,
               const std::string& path, std::size_t& out) {
  const YAML::Node node = parent[std::string(key)];
  if (node) out = static_cast<std::size_t>(AsUnsigned(node, Join(path, key)));
}

std::vector<double> ReadDoubles(const YAML::Node& node,
                                const std::string& path) {
  if (!node.IsSequence()) Fail(ErrorCode::kConfig, "expected a list", path);
  std::vector<double> values;
  for (std::size_t i = 0; i < node.size(); ++i) {
    values.push_back(As<double>(node[i], Index(path, i)));
  }
  return values;
}

MeasureSelection ReadMeasure(const YAML::Node& node, const std::string& path) {
  MeasureSelection selection;
  if (node.IsSequence()) {
    selection.choice = MeasureChoice::kExplicit;
    selection.probabilities = ReadDoubles(node, path);
    return selection;
  }
  const auto name = As<std::string>(node, path);
  if (name == "empirical") {
    selection.choice = MeasureChoice::kEmpirical;
  } else if (name == "multitask") {
    selection.choice = MeasureChoice::kMultiTask;
  } else {
    Fail(ErrorCode::kConfig,
         "expected empirical, multitask or a probability list", path);
  }
  return selection;
}

MaskMode ReadMode(const YAML::Node& node, const std::string& path) {
  const auto name = As<std::string>(node, path);
  if (name == "mcar") return MaskMode::kMcar;
  if (name == "mnar") return MaskMode::kMnar;
  Fail(ErrorCode::kConfig, "expected mcar or mnar", path);
}

void ReadPopulation(const YAML::Node& node, PopulationConfig& population) {
  const std::string path = "population";
  CheckKeys(node, path,
            {"n", "p_female", "p_smoker", "p_female_given_smoker",
             "age_distribution"});
  ReadCount(node, "n", path, population.n);
  Read(node, "p_female", path, population.p_female);
  Read(node, "p_smoker", path, population.p_smoker);
  Read(node, "p_female_given_smoker", path, population.p_female_given_smoker);
  if (const YAML::Node ages = node["age_distribution"]) {
    const std::string where = Join(path, "age_distribution");
    if (ages.IsScalar()) {
      if (As<std::string>(ages, where) != "triangular") {
        Fail(ErrorCode::kConfig, "expected triangular or a probability list",
             where);
      }
      population.age_distribution = TriangularAgeDistribution();
    } else {
      population.age_distribution = ReadDoubles(ages, where);
    }
  }
}

void ReadTraining(const YAML::Node& node, ExperimentConfig& config) {
  const std::string path = "training";
  CheckKeys(node, path,
            {"batch_size", "max_epochs", "patience", "validation_fraction",
             "ensemble_size", "aux_direction", "nadam"});
  TrainConfig& t = config.training;
  ReadCount(node, "batch_size", path, t.batch_size);
  ReadCount(node, "max_epochs", path, t.max_epochs);
  ReadCount(node, "patience", path, t.patience);
  Read(node, "validation_fraction", path, t.validation_fraction);
  ReadCount(node, "ensemble_size", path, t.ensemble_size);
  if (const YAML::Node dir = node["aux_direction"]) {
    const std::string where = Join(path, "aux_direction");
    const auto name = As<std::string>(dir, where);
    if (name == "aux_as_truth") {
      config.aux_direction = AuxDirection::kAuxAsTruth;
    } else if (name == "model_as_truth") {
      config.aux_direction = AuxDirection::kModelAsTruth;
    } else {
      Fail(ErrorCode::kConfig, "expected aux_as_truth or model_as_truth",
           where);
    }
  }
  if (const YAML::Node nadam = node["nadam"]) {
    const std::string where = Join(path, "nadam");
    CheckKeys(nadam, where,
              {"step", "beta1", "beta2", "epsilon", "schedule_decay"});
    Read(nadam, "step", where, t.nadam.step);
    Read(nadam, "beta1", where, t.nadam.beta1);
    Read(nadam, "beta2", where, t.nadam.beta2);
    Read(nadam, "epsilon", where, t.nadam.epsilon);
    Read(nadam, "schedule_decay", where, t.nadam.schedule_decay);
  }
}

void ReadScenarios(const YAML::Node& node, ExperimentConfig& config) {
  const std::string path = "scenarios";
  if (!node.IsSequence() || node.size() == 0) {
    Fail(ErrorCode::kConfig, "expected a non-empty list", path);
  }
  config.scenarios.clear();
  for (std::size_t i = 0; i < node.size(); ++i) {
    const std::string where = Index(path, i);
    CheckKeys(node[i], where, {"label", "mode", "base_rate", "m_rate"});
    Scenario s;
    Read(node[i], "label", where, s.label);
    if (const YAML::Node mode = node[i]["mode"]) {
      s.mode = ReadMode(mode, Join(where, "mode"));
    }
    Read(node[i], "base_rate", where, s.base_rate);
    Read(node[i], "m_rate", where, s.m_rate);
    if (s.mode == MaskMode::kMcar) s.m_rate = s.base_rate;
    config.scenarios.push_back(std::move(s));
  }
}

void ReadSweep(const YAML::Node& node, SweepConfig& sweep) {
  const std::string path = "sweep";
  CheckKeys(node, path,
            {"mcar_rates", "mnar_base_rate", "mnar_m_rates", "seeds",
             "ensemble_size", "naive_measure", "multitask_measure"});
  if (const YAML::Node n = node["mcar_rates"]) {
    sweep.mcar_rates = ReadDoubles(n, Join(path, "mcar_rates"));
  }
  Read(node, "mnar_base_rate", path, sweep.mnar_base_rate);
  if (const YAML::Node n = node["mnar_m_rates"]) {
    sweep.mnar_m_rates = ReadDoubles(n, Join(path, "mnar_m_rates"));
  }
  if (const YAML::Node n = node["seeds"]) {
    const std::string where = Join(path, "seeds");
    if (!n.IsSequence()) Fail(ErrorCode::kConfig, "expected a list", where);
    sweep.seeds.clear();
    for (std::size_t i = 0; i < n.size(); ++i) {
      sweep.seeds.push_back(AsUnsigned(n[i], Index(where, i)));
    }
  }
  ReadCount(node, "ensemble_size", path, sweep.ensemble_size);
  if (const YAML::Node n = node["naive_measure"]) {
    sweep.naive_measure = ReadMeasure(n, Join(path, "naive_measure"));
  }
  if (const YAML::Node n = node["multitask_measure"]) {
    sweep.multitask_measure = ReadMeasure(n, Join(path, "multitask_measure"));
  }
}

void ValidateRate(double rate, const std::string& path) {
  if (!(rate >= 0.0 && rate <= 1.0)) {
    Fail(ErrorCode::kConfig, "rate must lie in [0, 1]", path);
  }
}

void ValidateMeasure(const MeasureSelection& selection,
                     const std::string& path) {
  if (selection.choice != MeasureChoice::kExplicit) return;
  if (selection.probabilities.size() != 2) {
    Fail(ErrorCode::kConfig, "expected one probability per protected level",
         path);
  }
  try {
    UserMeasure(selection.probabilities).Validate();
  } catch (const Error& e) {
    Fail(ErrorCode::kConfig, e.what(), path);
  }
}

}  // namespace

void ExperimentConfig::Validate() const {
  population.Validate();
  training.Validate();
  if (hidden_dims.empty() ||
      std::find(hidden_dims.begin(), hidden_dims.end(), 0) !=
          hidden_dims.end()) {
    Fail(ErrorCode::kConfig, "expected a non-empty list of widths >= 1",
         "network.hidden");
  }
  if (jobs < 1) Fail(ErrorCode::kConfig, "must be >= 1", "jobs");
  std::set<std::string> labels;
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const Scenario& s = scenarios[i];
    const std::string where = Index("scenarios", i);
    if (s.label.empty() ||
        s.label.find_first_of("/\\ ,") != std::string::npos) {
      Fail(ErrorCode::kConfig, "label must be non-empty without / \\ , or space",
           Join(where, "label"));
    }
    if (!labels.insert(s.label).second) {
      Fail(ErrorCode::kConfig, "duplicate label '" + s.label + "'",
           Join(where, "label"));
    }
    ValidateRate(s.base_rate, Join(where, "base_rate"));
    ValidateRate(s.m_rate, Join(where, "m_rate"));
  }
  if (scenarios.empty()) {
    Fail(ErrorCode::kConfig, "expected a non-empty list", "scenarios");
  }
  for (std::size_t i = 0; i < sweep.mcar_rates.size(); ++i) {
    ValidateRate(sweep.mcar_rates[i], Index("sweep.mcar_rates", i));
  }
  ValidateRate(sweep.mnar_base_rate, "sweep.mnar_base_rate");
  for (std::size_t i = 0; i < sweep.mnar_m_rates.size(); ++i) {
    ValidateRate(sweep.mnar_m_rates[i], Index("sweep.mnar_m_rates", i));
  }
  if (sweep.naive_measure.choice == MeasureChoice::kMultiTask) {
    Fail(ErrorCode::kConfig, "the naive model has no classifier",
         "sweep.naive_measure");
  }
  ValidateMeasure(sweep.naive_measure, "sweep.naive_measure");
  ValidateMeasure(sweep.multitask_measure, "sweep.multitask_measure");
  ValidateMeasure(pricing_measure, "pricing_measure");
}

const Scenario& ExperimentConfig::FindScenario(std::string_view label) const {
  for (const Scenario& s : scenarios) {
    if (s.label == label) return s;
  }
  Fail(ErrorCode::kConfig, "unknown scenario '" + std::string(label) + "'",
       "scenarios");
}

ExperimentConfig ParseExperimentConfig(std::string_view text,
                                       std::string source) {
  ExperimentConfig config;
  config.source = std::move(source);
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    Fail(ErrorCode::kConfig, std::string("cannot parse: ") + e.what(),
         "<root>");
  }
  if (root.IsNull()) {
    config.Validate();
    return config;
  }
  CheckKeys(root, "",
            {"seed", "output", "jobs", "population", "network", "training",
             "scenarios", "sweep", "pricing_measure"});
  if (const YAML::Node n = root["seed"]) config.seed = AsUnsigned(n, "seed");
  if (const YAML::Node n = root["output"]) {
    config.output_dir = As<std::string>(n, "output");
  }
  ReadCount(root, "jobs", "", config.jobs);
  if (const YAML::Node n = root["population"]) {
    ReadPopulation(n, config.population);
  }
  if (const YAML::Node n = root["network"]) {
    CheckKeys(n, "network", {"hidden"});
    if (const YAML::Node h = n["hidden"]) {
      if (!h.IsSequence()) {
        Fail(ErrorCode::kConfig, "expected a list", "network.hidden");
      }
      config.hidden_dims.clear();
      for (std::size_t i = 0; i < h.size(); ++i) {
        config.hidden_dims.push_back(static_cast<std::size_t>(
            AsUnsigned(h[i], Index("network.hidden", i))));
      }
    }
  }
  if (const YAML::Node n = root["training"]) ReadTraining(n, config);
  if (const YAML::Node n = root["scenarios"]) ReadScenarios(n, config);
  if (const YAML::Node n = root["sweep"]) ReadSweep(n, config.sweep);
  if (const YAML::Node n = root["pricing_measure"]) {
    config.pricing_measure = ReadMeasure(n, "pricing_measure");
  }
  config.Validate();
  return config;
}

ExperimentConfig LoadExperimentConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kConfig, "cannot read config file", path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return ParseExperimentConfig(text.str(), path.string());
}

}  // namespace dfpricing
