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

#include "uniinst/mask.hpp"
#include "uniinst/oyor.hpp"

namespace uniinst {

/// A prediction submitted for ranking/suppression: the candidate plus the
/// single category and score it is reported under.
struct ScoredPrediction {
  Prediction pred;
  int category = 0;
  double score = 0.0;
};

struct NmsConfig {
  double iou_threshold = 0.5;
  double score_floor = 0.05;
  int max_keep = 100;
};

/// Greedy mask-IoU suppression per category: predictions are visited in
/// descending score order (stable by input index) and kept iff their
/// binarized-mask IoU with every kept same-category prediction stays below
/// the threshold. Scores under score_floor are dropped, and the survivors
/// are truncated to the max_keep best scores overall. Returns kept input
/// indices in ascending order.
std::vector<int> greedy_mask_nms(std::span<const ScoredPrediction> preds,
                                 const NmsConfig& cfg,
                                 const MaskOpsConfig& mcfg = {});

}  // namespace uniinst
