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

#include "dfpricing/model_io.h"

#include <fstream>
#include <string>

#include "dfpricing/error.h"

namespace dfpricing {

using nlohmann::json;

namespace {

json SpecToJson(const NetworkSpec& spec) {
  return {{"input_dim", spec.input_dim},
          {"hidden_dims", spec.hidden_dims},
          {"activation", "relu"},
          {"num_price_heads", spec.num_price_heads},
          {"num_class_heads", spec.num_class_heads},
          {"link", "log"}};
}

NetworkSpec SpecFromJson(const json& j) {
  if (j.at("activation") != "relu" || j.at("link") != "log") {
    Fail(ErrorCode::kData, "unsupported activation or link");
  }
  NetworkSpec spec;
  spec.input_dim = j.at("input_dim").get<std::size_t>();
  spec.hidden_dims = j.at("hidden_dims").get<std::vector<std::size_t>>();
  spec.num_price_heads = j.at("num_price_heads").get<std::size_t>();
  spec.num_class_heads = j.at("num_class_heads").get<std::size_t>();
  return spec;
}

template <typename Block>
std::vector<double> Flatten(const Block& block) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(block.size()));
  for (Eigen::Index r = 0; r < block.rows(); ++r) {
    for (Eigen::Index c = 0; c < block.cols(); ++c) out.push_back(block(r, c));
  }
  return out;
}

template <typename Block>
void Fill(Block&& block, const json& values, const char* what) {
  const auto v = values.get<std::vector<double>>();
  if (v.size() != static_cast<std::size_t>(block.size())) {
    Fail(ErrorCode::kData, "array has the wrong length", what);
  }
  std::size_t i = 0;
  for (Eigen::Index r = 0; r < block.rows(); ++r) {
    for (Eigen::Index c = 0; c < block.cols(); ++c) block(r, c) = v[i++];
  }
}

std::string_view ObjectiveName(ObjectiveKind kind) {
  switch (kind) {
    case ObjectiveKind::kPoisson:
      return "poisson";
    case ObjectiveKind::kMultiOutput:
      return "multi_output";
    case ObjectiveKind::kMultiTaskY:
      return "multi_task_y";
    case ObjectiveKind::kMultiTaskAux:
      return "multi_task_aux";
  }
  return "unknown";
}

ObjectiveKind ParseObjective(const std::string& name) {
  for (ObjectiveKind k :
       {ObjectiveKind::kPoisson, ObjectiveKind::kMultiOutput,
        ObjectiveKind::kMultiTaskY, ObjectiveKind::kMultiTaskAux}) {
    if (ObjectiveName(k) == name) return k;
  }
  Fail(ErrorCode::kData, "unknown objective '" + name + "'");
}

}  // namespace

json NetworkToJson(const NetworkParams& params) {
  const NetworkSpec& spec = params.spec();
  json layers = json::array();
  for (std::size_t l = 0; l < spec.depth(); ++l) {
    layers.push_back({{"weights", Flatten(params.weights(l))},
                      {"bias", Flatten(params.bias(l))}});
  }
  json price = json::array();
  for (std::size_t k = 0; k < spec.num_price_heads; ++k) {
    price.push_back(Flatten(params.price_readout(k)));
  }
  json classes = json::array();
  for (std::size_t k = 0; k < spec.num_class_heads; ++k) {
    classes.push_back(Flatten(params.class_readout(k)));
  }
  return {{"spec", SpecToJson(spec)},
          {"hidden_layers", layers},
          {"price_readouts", price},
          {"class_readouts", classes}};
}

NetworkParams NetworkFromJson(const json& j) {
  NetworkParams params(SpecFromJson(j.at("spec")));
  const NetworkSpec& spec = params.spec();
  const json& layers = j.at("hidden_layers");
  const json& price = j.at("price_readouts");
  const json& classes = j.at("class_readouts");
  if (layers.size() != spec.depth() || price.size() != spec.num_price_heads ||
      classes.size() != spec.num_class_heads) {
    Fail(ErrorCode::kData, "network blocks do not match the declared layout");
  }
  for (std::size_t l = 0; l < spec.depth(); ++l) {
    Fill(params.weights(l), layers[l].at("weights"), "weights");
    Fill(params.bias(l), layers[l].at("bias"), "bias");
  }
  for (std::size_t k = 0; k < spec.num_price_heads; ++k) {
    Fill(params.price_readout(k), price[k], "price_readouts");
  }
  for (std::size_t k = 0; k < spec.num_class_heads; ++k) {
    Fill(params.class_readout(k), classes[k], "class_readouts");
  }
  if (!params.AllFinite()) Fail(ErrorCode::kData, "non-finite parameter");
  return params;
}

json ModelToJson(const FittedModel& model, const TrainConfig& config) {
  json members = json::array();
  for (const FittedNetwork& m : model.ensemble().members()) {
    json nets = json::array();
    for (const NetworkParams& n : m.networks) nets.push_back(NetworkToJson(n));
    members.push_back(
        {{"objective",
          {{"kind", ObjectiveName(m.objective.kind)},
           {"num_levels", m.objective.num_levels},
           {"aux_direction", m.objective.aux_direction ==
                                     AuxDirection::kAuxAsTruth
                                 ? "aux_as_truth"
                                 : "model_as_truth"}}},
         {"init_seed", m.init_seed},
         {"epochs_run", m.history.epochs_run()},
         {"best_epoch", m.history.best_epoch},
         {"stopped_early", m.history.stopped_early},
         {"best_validation_loss", m.best_validation_loss},
         {"networks", nets}});
  }
  return {{"format", "dfpricing-model"},
          {"version", kModelFormatVersion},
          {"kind", ModelKindName(model.kind())},
          {"protected_levels", model.levels().names},
          {"training",
           {{"seed", config.seed},
            {"batch_size", config.batch_size},
            {"max_epochs", config.max_epochs},
            {"patience", config.patience},
            {"validation_fraction", config.validation_fraction},
            {"ensemble_size", config.ensemble_size},
            {"nadam",
             {{"step", config.nadam.step},
              {"beta1", config.nadam.beta1},
              {"beta2", config.nadam.beta2},
              {"epsilon", config.nadam.epsilon},
              {"schedule_decay", config.nadam.schedule_decay}}}}},
          {"members", members}};
}

FittedModel ModelFromJson(const json& j) {
  try {
    if (j.at("format") != "dfpricing-model") {
      Fail(ErrorCode::kData, "not a model document");
    }
    if (j.at("version").get<int>() != kModelFormatVersion) {
      Fail(ErrorCode::kData, "unsupported model format version");
    }
    const ModelKind kind = ParseModelKind(j.at("kind").get<std::string>());
    ProtectedLevels levels{
        j.at("protected_levels").get<std::vector<std::string>>()};
    std::vector<FittedNetwork> members;
    for (const json& m : j.at("members")) {
      FittedNetwork f;
      const json& o = m.at("objective");
      f.objective.kind = ParseObjective(o.at("kind").get<std::string>());
      f.objective.num_levels = o.at("num_levels").get<std::size_t>();
      f.objective.aux_direction = o.at("aux_direction") == "model_as_truth"
                                      ? AuxDirection::kModelAsTruth
                                      : AuxDirection::kAuxAsTruth;
      f.init_seed = m.at("init_seed").get<std::uint64_t>();
      f.history.best_epoch = m.at("best_epoch").get<std::size_t>();
      f.history.stopped_early = m.at("stopped_early").get<bool>();
      f.history.epochs.resize(m.at("epochs_run").get<std::size_t>());
      f.best_validation_loss = m.at("best_validation_loss").get<double>();
      for (const json& n : m.at("networks")) {
        f.networks.push_back(NetworkFromJson(n));
      }
      members.push_back(std::move(f));
    }
    return FittedModel(kind, std::move(levels),
                       NaggingEnsemble(std::move(members)));
  } catch (const json::exception& e) {
    Fail(ErrorCode::kData, std::string("malformed model document: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kData) throw;
    Fail(ErrorCode::kData, e.what());
  }
}

void SaveModel(const std::filesystem::path& path, const FittedModel& model,
               const TrainConfig& config) {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kIo, "cannot open for writing", path.string());
  out << ModelToJson(model, config).dump(1) << '\n';
  if (!out) Fail(ErrorCode::kIo, "write failed", path.string());
}

FittedModel LoadModel(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open for reading", path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    Fail(ErrorCode::kData, std::string("invalid JSON: ") + e.what(),
         path.string());
  }
  try {
    return ModelFromJson(j);
  } catch (const Error& e) {
    Fail(e.code(), e.what(), path.string());
  }
}

}  // namespace dfpricing
