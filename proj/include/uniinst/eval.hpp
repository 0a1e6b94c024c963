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

#include <map>
#include <span>
#include <vector>

#include "uniinst/mask.hpp"
#include "uniinst/nms.hpp"
#include "uniinst/oyor.hpp"

namespace uniinst {

/// One evaluated image: annotated instances plus the scored predictions
/// reported for it.
struct EvalScene {
  std::vector<GroundTruth> gts;
  std::vector<ScoredPrediction> preds;
};

struct ThresholdMetrics {
  double ap = 0.0;
  double recall = 0.0;
};

/// Mask AP/AR over the 10 IoU thresholds 0.50:0.05:0.95 with 101-point
/// precision interpolation, averaged over every category that has at
/// least one ground truth. ap is always the arithmetic mean of the
/// per-threshold values.
struct EvalReport {
  double ap = 0.0;
  double ap50 = 0.0;
  double ap75 = 0.0;
  double ar = 0.0;
  std::map<double, ThresholdMetrics> per_threshold;
};

/// Matching protocol: per threshold, predictions greedily claim the
/// highest-IoU unused same-category ground truth in descending score
/// order; scenes are capped to their 100 best-scored predictions first.
EvalReport evaluate(std::span<const EvalScene> scenes,
                    const MaskOpsConfig& mcfg = {});

/// Mean over ground truths of the number of redundant same-category
/// predictions: max(0, hits - 1) where a hit has IoU >= threshold.
double duplicate_rate(std::span<const EvalScene> scenes, double threshold,
                      const MaskOpsConfig& mcfg = {});

}  // namespace uniinst
