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

#include <span>
#include <vector>

#include "uniinst/assignment.hpp"
#include "uniinst/mask.hpp"

namespace uniinst {

/// Feature pyramid level; the stride is locked to 2^level_id.
struct LevelSpec {
  int level_id = 3;

  int stride() const { return 1 << level_id; }
};

/// A candidate instance: a location on some pyramid level carrying
/// per-category sigmoid scores, a soft mask over the full image, and a
/// regressed estimate of that mask's IoU against whatever it matches.
struct Prediction {
  ImagePoint location;
  LevelSpec level;
  std::vector<double> class_scores;
  SoftMask mask;
  double pred_iou = 0.0;
};

/// Annotated instance: category id plus a non-empty binary mask.
struct GroundTruth {
  int category = 0;
  SoftMask mask;
};

/// alpha balances classification score against mask accuracy inside the
/// matching quality; the center radius is measured in multiples of the
/// prediction's stride.
struct OyorConfig {
  double alpha = 0.9;
  double center_radius_multiplier = 1.5;
};

/// Matching quality of one (prediction, ground truth) pair: the spatial
/// prior indicator times a weighted geometric mean of the class score at
/// the ground truth's category and the soft Dice of the two masks.
/// 0^0 evaluates to 1 so the alpha extremes collapse cleanly.
double match_quality(const Prediction& pred, const GroundTruth& gt,
                     const OyorConfig& cfg, const MaskOpsConfig& mcfg);

/// G x N matrix of match_quality values, rows in ground-truth input
/// order, columns in prediction input order.
QualityMatrix build_quality_matrix(std::span<const Prediction> preds,
                                   std::span<const GroundTruth> gts,
                                   const OyorConfig& cfg,
                                   const MaskOpsConfig& mcfg);

/// One-to-one assignment maximizing total matching quality. Pairs whose
/// quality is exactly zero are demoted to unmatched: a zero means no
/// candidate hit the ground truth's center region, and such a ground
/// truth must not produce a positive sample.
Assignment assign(std::span<const Prediction> preds,
                  std::span<const GroundTruth> gts, const OyorConfig& cfg,
                  const MaskOpsConfig& mcfg);

}  // namespace uniinst
