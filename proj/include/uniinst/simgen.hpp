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
#include <span>
#include <vector>

#include "uniinst/nms.hpp"
#include "uniinst/oyor.hpp"

namespace uniinst {

enum class ShapeFamily { kEllipse, kRectangle, kBlob };

/// Scene recipe. Generation is a pure function of (config, scene index):
/// the same pair always produces bit-identical masks, categories and
/// derived predictions, regardless of thread count or platform.
struct SceneConfig {
  int image_height = 64;
  int image_width = 64;
  int min_instances = 2;
  int max_instances = 5;
  ShapeFamily shape_family = ShapeFamily::kEllipse;
  /// Target mean fraction of each new instance's area already covered by
  /// previously placed instances (before occlusion clipping). 0 demands
  /// fully disjoint, non-adjacent instances.
  double occlusion_level = 0.0;
  int categories = 3;
  std::uint64_t seed = 0;
};

enum class PredictorKind { kRedundant, kUnique, kMisaligned };

/// Controllable stand-in for a trained network head.
///  - redundant: duplicates_per_instance near-copies per instance, spread
///    over the instance's center region and the pyramid levels;
///  - unique: exactly one prediction per instance at its mask centroid;
///  - misaligned: one prediction per instance whose classification score
///    correlates with true mask IoU only as dictated by
///    cls_quality_correlation (0 = pure noise, -1 = exactly reversed).
/// All predicted masks are degraded by flipping roughly mask_noise of the
/// pixels in a 2-pixel band around the mask boundary, with the flip rate
/// jittered per instance; pred_iou always carries the measured IoU of the
/// degraded mask against its instance.
struct PredictorModel {
  PredictorKind kind = PredictorKind::kUnique;
  int duplicates_per_instance = 1;
  double mask_noise = 0.0;
  double score_noise = 0.05;
  double cls_quality_correlation = 0.0;
};

/// Per-scene generation diagnostics.
struct SceneStats {
  double mean_overlap = 0.0;  // realized covered fraction, pre-occlusion
  int overlap_samples = 0;    // instances with at least one predecessor
  int attempts = 1;           // retries consumed before the scene settled
};

/// Draws instance masks for one scene. Later instances occlude earlier
/// ones: overlapping pixels are removed from the earlier masks, so the
/// returned ground truths are pairwise disjoint and non-empty. Throws
/// GenerationError when the config cannot be realized after bounded
/// retries.
std::vector<GroundTruth> generate_scene(const SceneConfig& cfg, int index,
                                        SceneStats* stats = nullptr);

/// Emits scored predictions for the given ground truths under the model.
std::vector<ScoredPrediction> synthesize_predictions(
    std::span<const GroundTruth> gts, const PredictorModel& model,
    std::span<const LevelSpec> levels, std::uint64_t seed);

}  // namespace uniinst
