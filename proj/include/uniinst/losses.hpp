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
#include "uniinst/oyor.hpp"

namespace uniinst {

struct LossWeights {
  double lambda_cls = 1.0;
  double lambda_mask = 1.0;
  double lambda_rank = 1.0;
  double lambda_aux = 1.0;
};

struct FocalConfig {
  double gamma = 2.0;
  double alpha_f = 0.25;
};

/// Many-to-one auxiliary assignment: per ground truth and pyramid level the
/// up-to-9 best candidates are pooled, and pooled candidates strictly above
/// the pool's mean quality become positives. per_level_candidates keeps the
/// pooled (prediction index, quality) entries grouped by level for
/// inspection; an index can appear once per ground truth it is pooled for.
struct AuxAssignment {
  std::vector<int> positives;  // sorted, unique prediction indices
  std::map<int, std::vector<std::pair<int, double>>> per_level_candidates;
};

struct LossTerms {
  double cls = 0.0;
  double mask = 0.0;
  double rank = 0.0;
  double aux = 0.0;
};

/// Inference ranking score: classification score at `category` times the
/// predicted mask IoU.
double rerank_score(const Prediction& pred, int category);

/// L1 gap between the predicted mask IoU and the measured IoU against the
/// ground-truth mask; zero for predictions outside the spatial prior.
double rank_loss(const Prediction& pred, const GroundTruth& gt, bool in_prior,
                 const MaskOpsConfig& mcfg);

/// Binary focal loss on one sigmoid score. Scores are clamped to
/// [1e-6, 1 - 1e-6] so the log terms stay finite.
double focal_loss(double score, bool is_positive, const FocalConfig& cfg);

/// Dice loss: 1 - dice(pred, gt).
double mask_loss(const SoftMask& pred_mask, const SoftMask& gt_mask,
                 const MaskOpsConfig& mcfg);

/// Builds the auxiliary many-to-one assignment described on AuxAssignment.
AuxAssignment aux_assign(std::span<const Prediction> preds,
                         std::span<const GroundTruth> gts,
                         const OyorConfig& cfg, const MaskOpsConfig& mcfg);

/// Weighted sum of the four per-scene loss terms. Terms must be finite and
/// non-negative or InvalidLossError is raised.
double total_loss(const LossTerms& terms, const LossWeights& w);

}  // namespace uniinst
