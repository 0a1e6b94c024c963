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

#include "uniinst/oyor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "uniinst/errors.hpp"

namespace uniinst {

namespace {

// pow with the 0^0 = 1 convention made explicit; exponents live in [0,1].
double weighted_factor(double base, double exponent) {
  if (exponent == 0.0) return 1.0;
  return std::pow(base, exponent);
}

void check_category(const Prediction& pred, const GroundTruth& gt) {
  if (gt.category < 0 ||
      static_cast<std::size_t>(gt.category) >= pred.class_scores.size()) {
    throw InvalidCategoryError("ground-truth category " +
                               std::to_string(gt.category) +
                               " outside the prediction's score vector");
  }
}

}  // namespace

double match_quality(const Prediction& pred, const GroundTruth& gt,
                     const OyorConfig& cfg, const MaskOpsConfig& mcfg) {
  check_category(pred, gt);
  const double radius = cfg.center_radius_multiplier * pred.level.stride();
  if (!in_center_region(pred.location, gt.mask, radius, mcfg)) {
    return 0.0;
  }
  const double cls = pred.class_scores[gt.category];
  const double mask_acc = dice(pred.mask, gt.mask, mcfg);
  return weighted_factor(cls, 1.0 - cfg.alpha) *
         weighted_factor(mask_acc, cfg.alpha);
}

QualityMatrix build_quality_matrix(std::span<const Prediction> preds,
                                   std::span<const GroundTruth> gts,
                                   const OyorConfig& cfg,
                                   const MaskOpsConfig& mcfg) {
  QualityMatrix m;
  m.num_gts = static_cast<int>(gts.size());
  m.num_preds = static_cast<int>(preds.size());
  m.q.assign(static_cast<std::size_t>(m.num_gts) * m.num_preds, 0.0);
  for (int g = 0; g < m.num_gts; ++g) {
    for (int p = 0; p < m.num_preds; ++p) {
      m.at(g, p) = match_quality(preds[p], gts[g], cfg, mcfg);
    }
  }
  return m;
}

Assignment assign(std::span<const Prediction> preds,
                  std::span<const GroundTruth> gts, const OyorConfig& cfg,
                  const MaskOpsConfig& mcfg) {
  const QualityMatrix m = build_quality_matrix(preds, gts, cfg, mcfg);
  Assignment raw = solve(m);
  Assignment out;
  for (const auto& pair : raw.pairs) {
    if (pair.quality == 0.0) {
      out.unmatched_gts.push_back(pair.gt_index);
    } else {
      out.pairs.push_back(pair);
    }
  }
  for (int g : raw.unmatched_gts) out.unmatched_gts.push_back(g);
  std::sort(out.unmatched_gts.begin(), out.unmatched_gts.end());
  return out;
}

}  // namespace uniinst
