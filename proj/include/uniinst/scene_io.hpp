// Copyright 2026 The UniInst Engine Authors.
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

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "uniinst/eval.hpp"
#include "uniinst/simgen.hpp"

namespace uniinst {

/// A scene as stored on disk: annotations plus raw predictions. Categories
/// and ranking scores are derived at evaluation time.
struct LoadedScene {
  int image_height = 0;
  int image_width = 0;
  std::vector<GroundTruth> gts;
  std::vector<Prediction> preds;
};

enum class Ranking { kClsOnly, kRerank };

/// Everything cmd_simulate needs, parsed from one JSON config file.
struct SimulationConfig {
  SceneConfig scene;
  PredictorModel predictor;
  std::vector<LevelSpec> levels = {LevelSpec{3}, LevelSpec{4}, LevelSpec{5}};
};

nlohmann::json rle_to_json(const RleMask& r);
RleMask rle_from_json(const nlohmann::json& j, const std::string& context);

nlohmann::json scene_to_json(const LoadedScene& scene);
/// Throws SceneFormatError naming `label` and the offending field.
LoadedScene scene_from_json(const nlohmann::json& j, const std::string& label);

SimulationConfig sim_config_from_json(const nlohmann::json& j);
nlohmann::json sim_config_to_json(const SimulationConfig& cfg);

nlohmann::json report_to_json(const EvalReport& report);

/// Scores raw predictions for ranking: the category is the argmax class
/// score (smallest index on ties) and the score is that class score,
/// multiplied by the predicted mask IoU under rerank.
std::vector<ScoredPrediction> rank_predictions(
    std::span<const Prediction> preds, Ranking ranking);

/// FNV-1a 64-bit hash, hex-encoded; used to fingerprint configs in
/// manifests.
std::string fnv1a_hex(const std::string& data);

}  // namespace uniinst
