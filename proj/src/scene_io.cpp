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

#include "uniinst/scene_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "uniinst/errors.hpp"
#include "uniinst/losses.hpp"

namespace uniinst {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& label, const std::string& field,
                       const std::string& what) {
  throw SceneFormatError(label + ": field '" + field + "' " + what);
}

const json& require(const json& j, const char* field,
                    const std::string& label) {
  auto it = j.find(field);
  if (it == j.end()) fail(label, field, "is missing");
  return *it;
}

double require_number(const json& j, const char* field,
                      const std::string& label) {
  const json& v = require(j, field, label);
  if (!v.is_number()) fail(label, field, "must be a number");
  return v.get<double>();
}

int require_int(const json& j, const char* field, const std::string& label) {
  const json& v = require(j, field, label);
  if (!v.is_number_integer()) fail(label, field, "must be an integer");
  return v.get<int>();
}

std::string threshold_key(double t) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "%.2f", t);
  return buf;
}

}  // namespace

json rle_to_json(const RleMask& r) {
  return json{{"size", {r.height, r.width}}, {"counts", r.counts}};
}

RleMask rle_from_json(const json& j, const std::string& context) {
  RleMask r;
  const json& size = require(j, "size", context);
  if (!size.is_array() || size.size() != 2) {
    fail(context, "size", "must be [height, width]");
  }
  r.height = size[0].get<int>();
  r.width = size[1].get<int>();
  const json& counts = require(j, "counts", context);
  if (!counts.is_array()) fail(context, "counts", "must be an array");
  for (const auto& c : counts) {
    if (!c.is_number_integer()) {
      fail(context, "counts", "must contain integers only");
    }
    r.counts.push_back(c.get<std::int64_t>());
  }
  try {
    validate_rle(r);
  } catch (const MalformedRleError& e) {
    fail(context, "counts", std::string("is malformed: ") + e.what());
  }
  return r;
}

json scene_to_json(const LoadedScene& scene) {
  json gts = json::array();
  for (const auto& gt : scene.gts) {
    gts.push_back({{"category", gt.category},
                   {"mask", rle_to_json(encode_rle(gt.mask))}});
  }
  json preds = json::array();
  for (const auto& p : scene.preds) {
    preds.push_back({{"location", {{"row", p.location.row},
                                   {"col", p.location.col}}},
                     {"level", p.level.level_id},
                     {"class_scores", p.class_scores},
                     {"mask", rle_to_json(encode_rle(p.mask))},
                     {"pred_iou", p.pred_iou}});
  }
  return json{{"image", {{"h", scene.image_height}, {"w", scene.image_width}}},
              {"ground_truths", gts},
              {"predictions", preds}};
}

LoadedScene scene_from_json(const json& j, const std::string& label) {
  LoadedScene scene;
  const json& image = require(j, "image", label);
  scene.image_height = require_int(image, "h", label);
  scene.image_width = require_int(image, "w", label);
  if (scene.image_height < 1 || scene.image_width < 1) {
    fail(label, "image", "must have positive dimensions");
  }

  auto check_shape = [&](const RleMask& r, const std::string& ctx) {
    if (r.height != scene.image_height || r.width != scene.image_width) {
      fail(label, ctx, "mask shape does not match the image shape");
    }
  };

  const json& gts = require(j, "ground_truths", label);
  if (!gts.is_array()) fail(label, "ground_truths", "must be an array");
  for (std::size_t i = 0; i < gts.size(); ++i) {
    const std::string ctx = "ground_truths[" + std::to_string(i) + "]";
    const int category = require_int(gts[i], "category", label);
    if (category < 0) fail(label, ctx + ".category", "must be non-negative");
    const RleMask rle =
        rle_from_json(require(gts[i], "mask", label), label + ": " + ctx);
    check_shape(rle, ctx + ".mask");
    SoftMask mask = decode_rle(rle);
    if (foreground_count(mask, 0.5) == 0) {
      fail(label, ctx + ".mask", "must have at least one foreground pixel");
    }
    scene.gts.push_back({category, std::move(mask)});
  }

  const json& preds = require(j, "predictions", label);
  if (!preds.is_array()) fail(label, "predictions", "must be an array");
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const std::string ctx = "predictions[" + std::to_string(i) + "]";
    const json& loc = require(preds[i], "location", label);
    Prediction p;
    p.location.row = require_number(loc, "row", label);
    p.location.col = require_number(loc, "col", label);
    const int level = require_int(preds[i], "level", label);
    if (level < 3 || level > 7) {
      fail(label, ctx + ".level", "must lie in [3, 7]");
    }
    p.level = LevelSpec{level};
    const json& scores = require(preds[i], "class_scores", label);
    if (!scores.is_array() || scores.empty()) {
      fail(label, ctx + ".class_scores", "must be a non-empty array");
    }
    for (const auto& s : scores) {
      if (!s.is_number()) {
        fail(label, ctx + ".class_scores", "must contain numbers");
      }
      const double v = s.get<double>();
      if (!(v >= 0.0 && v <= 1.0)) {
        fail(label, ctx + ".class_scores", "entries must lie in [0, 1]");
      }
      p.class_scores.push_back(v);
    }
    const RleMask rle =
        rle_from_json(require(preds[i], "mask", label), label + ": " + ctx);
    check_shape(rle, ctx + ".mask");
    p.mask = decode_rle(rle);
    p.pred_iou = require_number(preds[i], "pred_iou", label);
    if (!(p.pred_iou >= 0.0 && p.pred_iou <= 1.0)) {
      fail(label, ctx + ".pred_iou", "must lie in [0, 1]");
    }
    scene.preds.push_back(std::move(p));
  }
  return scene;
}

SimulationConfig sim_config_from_json(const json& j) {
  const std::string label = "config";
  SimulationConfig cfg;
  const json& size = require(j, "image_size", label);
  if (!size.is_array() || size.size() != 2) {
    fail(label, "image_size", "must be [height, width]");
  }
  cfg.scene.image_height = size[0].get<int>();
  cfg.scene.image_width = size[1].get<int>();
  const json& inst = require(j, "num_instances", label);
  if (!inst.is_array() || inst.size() != 2) {
    fail(label, "num_instances", "must be [min, max]");
  }
  cfg.scene.min_instances = inst[0].get<int>();
  cfg.scene.max_instances = inst[1].get<int>();
  const std::string family =
      require(j, "shape_family", label).get<std::string>();
  if (family == "ellipse") {
    cfg.scene.shape_family = ShapeFamily::kEllipse;
  } else if (family == "rectangle") {
    cfg.scene.shape_family = ShapeFamily::kRectangle;
  } else if (family == "blob") {
    cfg.scene.shape_family = ShapeFamily::kBlob;
  } else {
    fail(label, "shape_family", "must be ellipse, rectangle or blob");
  }
  cfg.scene.occlusion_level = require_number(j, "occlusion_level", label);
  if (cfg.scene.occlusion_level < 0.0 || cfg.scene.occlusion_level > 1.0) {
    fail(label, "occlusion_level", "must lie in [0, 1]");
  }
  cfg.scene.categories = require_int(j, "categories", label);
  if (j.contains("seed")) {
    cfg.scene.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("levels")) {
    cfg.levels.clear();
    for (const auto& l : j["levels"]) {
      const int id = l.get<int>();
      if (id < 3 || id > 7) fail(label, "levels", "entries must lie in [3,7]");
      cfg.levels.push_back(LevelSpec{id});
    }
    if (cfg.levels.empty()) fail(label, "levels", "must not be empty");
  }

  const json& pred = require(j, "predictor", label);
  const std::string kind = require(pred, "kind", label).get<std::string>();
  if (kind == "redundant") {
    cfg.predictor.kind = PredictorKind::kRedundant;
  } else if (kind == "unique") {
    cfg.predictor.kind = PredictorKind::kUnique;
  } else if (kind == "misaligned") {
    cfg.predictor.kind = PredictorKind::kMisaligned;
  } else {
    fail(label, "predictor.kind", "must be redundant, unique or misaligned");
  }
  if (pred.contains("duplicates_per_instance")) {
    cfg.predictor.duplicates_per_instance =
        pred["duplicates_per_instance"].get<int>();
  }
  if (cfg.predictor.kind == PredictorKind::kUnique ||
      cfg.predictor.kind == PredictorKind::kMisaligned) {
    cfg.predictor.duplicates_per_instance = 1;
  }
  if (pred.contains("mask_noise")) {
    cfg.predictor.mask_noise = pred["mask_noise"].get<double>();
  }
  if (pred.contains("score_noise")) {
    cfg.predictor.score_noise = pred["score_noise"].get<double>();
  }
  if (pred.contains("cls_quality_correlation")) {
    cfg.predictor.cls_quality_correlation =
        pred["cls_quality_correlation"].get<double>();
    if (std::abs(cfg.predictor.cls_quality_correlation) > 1.0) {
      fail(label, "predictor.cls_quality_correlation", "must lie in [-1, 1]");
    }
  }
  return cfg;
}

json sim_config_to_json(const SimulationConfig& cfg) {
  const char* family = cfg.scene.shape_family == ShapeFamily::kEllipse
                           ? "ellipse"
                           : cfg.scene.shape_family == ShapeFamily::kRectangle
                                 ? "rectangle"
                                 : "blob";
  const char* kind = cfg.predictor.kind == PredictorKind::kRedundant
                         ? "redundant"
                         : cfg.predictor.kind == PredictorKind::kUnique
                               ? "unique"
                               : "misaligned";
  std::vector<int> levels;
  for (const auto& l : cfg.levels) levels.push_back(l.level_id);
  return json{
      {"image_size", {cfg.scene.image_height, cfg.scene.image_width}},
      {"num_instances", {cfg.scene.min_instances, cfg.scene.max_instances}},
      {"shape_family", family},
      {"occlusion_level", cfg.scene.occlusion_level},
      {"categories", cfg.scene.categories},
      {"seed", cfg.scene.seed},
      {"levels", levels},
      {"predictor",
       {{"kind", kind},
        {"duplicates_per_instance", cfg.predictor.duplicates_per_instance},
        {"mask_noise", cfg.predictor.mask_noise},
        {"score_noise", cfg.predictor.score_noise},
        {"cls_quality_correlation", cfg.predictor.cls_quality_correlation}}}};
}

json report_to_json(const EvalReport& report) {
  json per_threshold = json::object();
  for (const auto& [t, metrics] : report.per_threshold) {
    per_threshold[threshold_key(t)] = {{"ap", metrics.ap},
                                       {"recall", metrics.recall}};
  }
  return json{{"ap", report.ap},
              {"ap50", report.ap50},
              {"ap75", report.ap75},
              {"ar", report.ar},
              {"per_threshold", per_threshold}};
}

std::vector<ScoredPrediction> rank_predictions(
    std::span<const Prediction> preds, Ranking ranking) {
  std::vector<ScoredPrediction> out;
  out.reserve(preds.size());
  for (const auto& p : preds) {
    int category = 0;
    for (std::size_t c = 1; c < p.class_scores.size(); ++c) {
      if (p.class_scores[c] > p.class_scores[category]) {
        category = static_cast<int>(c);
      }
    }
    double score = p.class_scores.empty() ? 0.0 : p.class_scores[category];
    if (ranking == Ranking::kRerank) {
      score = rerank_score(p, category);
    }
    out.push_back({p, category, score});
  }
  return out;
}

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t hash = 0xCBF29CE484222325ull;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 0x100000001B3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace uniinst
