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

#include "uniinst/losses.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "uniinst/errors.hpp"

namespace uniinst {

namespace {

constexpr double kScoreClamp = 1e-6;
constexpr int kAuxTopK = 9;

void check_finite_nonnegative(double x, const char* name) {
  if (!std::isfinite(x) || x < 0.0) {
    throw InvalidLossError(std::string(name) +
                           " loss term must be finite and non-negative");
  }
}

}  // namespace

double rerank_score(const Prediction& pred, int category) {
  if (category < 0 ||
      static_cast<std::size_t>(category) >= pred.class_scores.size()) {
    throw InvalidCategoryError("rerank category " + std::to_string(category) +
                               " outside the prediction's score vector");
  }
  return pred.class_scores[category] * pred.pred_iou;
}

double rank_loss(const Prediction& pred, const GroundTruth& gt, bool in_prior,
                 const MaskOpsConfig& mcfg) {
  if (!in_prior) return 0.0;
  return std::abs(pred.pred_iou - iou(pred.mask, gt.mask, mcfg));
}

double focal_loss(double score, bool is_positive, const FocalConfig& cfg) {
  const double s = std::clamp(score, kScoreClamp, 1.0 - kScoreClamp);
  if (is_positive) {
    return -cfg.alpha_f * std::pow(1.0 - s, cfg.gamma) * std::log(s);
  }
  return -(1.0 - cfg.alpha_f) * std::pow(s, cfg.gamma) * std::log(1.0 - s);
}

double mask_loss(const SoftMask& pred_mask, const SoftMask& gt_mask,
                 const MaskOpsConfig& mcfg) {
  return 1.0 - dice(pred_mask, gt_mask, mcfg);
}

AuxAssignment aux_assign(std::span<const Prediction> preds,
                         std::span<const GroundTruth> gts,
                         const OyorConfig& cfg, const MaskOpsConfig& mcfg) {
  AuxAssignment out;
  std::set<int> positives;

  // Prediction indices grouped by pyramid level, preserving input order.
  std::map<int, std::vector<int>> by_level;
  for (std::size_t p = 0; p < preds.size(); ++p) {
    by_level[preds[p].level.level_id].push_back(static_cast<int>(p));
  }

  for (const auto& gt : gts) {
    std::vector<std::pair<int, double>> pooled;  // (pred index, quality)
    for (const auto& [level_id, members] : by_level) {
      std::vector<std::pair<int, double>> ranked;
      ranked.reserve(members.size());
      for (int p : members) {
        ranked.emplace_back(p, match_quality(preds[p], gt, cfg, mcfg));
      }
      std::stable_sort(ranked.begin(), ranked.end(),
                       [](const auto& a, const auto& b) {
                         return a.second > b.second;
                       });
      if (ranked.size() > static_cast<std::size_t>(kAuxTopK)) {
        ranked.resize(kAuxTopK);
      }
      auto& bucket = out.per_level_candidates[level_id];
      bucket.insert(bucket.end(), ranked.begin(), ranked.end());
      pooled.insert(pooled.end(), ranked.begin(), ranked.end());
    }
    if (pooled.empty()) continue;
    double mean = 0.0;
    for (const auto& [p, quality] : pooled) mean += quality;
    mean /= static_cast<double>(pooled.size());
    for (const auto& [p, quality] : pooled) {
      if (quality > mean) positives.insert(p);
    }
  }
  out.positives.assign(positives.begin(), positives.end());
  return out;
}

double total_loss(const LossTerms& terms, const LossWeights& w) {
  check_finite_nonnegative(terms.cls, "classification");
  check_finite_nonnegative(terms.mask, "mask");
  check_finite_nonnegative(terms.rank, "rank");
  check_finite_nonnegative(terms.aux, "auxiliary");
  return w.lambda_cls * terms.cls + w.lambda_mask * terms.mask +
         w.lambda_rank * terms.rank + w.lambda_aux * terms.aux;
}

}  // namespace uniinst
