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

#include "uniinst/eval.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <set>
#include <string>

#include "uniinst/errors.hpp"
#include "uniinst/parallel.hpp"

namespace uniinst {

namespace {

constexpr int kNumThresholds = 10;
constexpr int kMaxDetections = 100;
constexpr int kRecallPoints = 101;

double threshold_at(int k) { return 0.50 + 0.05 * k; }

// One reported detection with its per-threshold true-positive flags.
struct DetRecord {
  double score = 0.0;
  int scene = 0;
  int index = 0;  // input index within the scene, fixes tie order
  int category = 0;
  std::uint16_t tp_bits = 0;
};

struct SceneMatches {
  std::vector<DetRecord> dets;
  std::map<int, int> gts_per_category;
};

void validate_scene(const EvalScene& scene, int scene_index) {
  const SoftMask* reference = nullptr;
  for (const auto& gt : scene.gts) {
    if (gt.category < 0) {
      throw InvalidCategoryError("scene " + std::to_string(scene_index) +
                                 ": negative ground-truth category");
    }
    if (reference && !gt.mask.same_shape(*reference)) {
      throw ShapeMismatchError("scene " + std::to_string(scene_index) +
                               ": ground-truth masks disagree on image shape");
    }
    if (!reference) reference = &gt.mask;
  }
  for (const auto& sp : scene.preds) {
    if (sp.category < 0) {
      throw InvalidCategoryError("scene " + std::to_string(scene_index) +
                                 ": negative prediction category");
    }
    if (reference && !sp.pred.mask.same_shape(*reference)) {
      throw ShapeMismatchError("scene " + std::to_string(scene_index) +
                               ": prediction mask disagrees on image shape");
    }
  }
}

// Indices of the scene's detections after the per-scene cap, best scores
// first, ties by input order.
std::vector<int> capped_detections(const EvalScene& scene) {
  std::vector<int> order(scene.preds.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return scene.preds[a].score > scene.preds[b].score;
  });
  if (static_cast<int>(order.size()) > kMaxDetections) {
    order.resize(kMaxDetections);
  }
  return order;
}

SceneMatches match_scene(const EvalScene& scene, int scene_index,
                         const MaskOpsConfig& mcfg) {
  validate_scene(scene, scene_index);
  SceneMatches out;
  for (const auto& gt : scene.gts) ++out.gts_per_category[gt.category];

  const std::vector<int> det_order = capped_detections(scene);

  // Group by category, keeping the score-descending order within each.
  std::map<int, std::vector<int>> dets_by_cat;
  for (int i : det_order) dets_by_cat[scene.preds[i].category].push_back(i);
  std::map<int, std::vector<int>> gts_by_cat;
  for (std::size_t g = 0; g < scene.gts.size(); ++g) {
    gts_by_cat[scene.gts[g].category].push_back(static_cast<int>(g));
  }

  for (const auto& [category, det_idx] : dets_by_cat) {
    auto git = gts_by_cat.find(category);
    const std::vector<int> empty;
    const std::vector<int>& gt_idx = git == gts_by_cat.end() ? empty
                                                             : git->second;
    // IoU matrix is threshold independent; compute it once.
    std::vector<double> ious(det_idx.size() * gt_idx.size(), 0.0);
    for (std::size_t d = 0; d < det_idx.size(); ++d) {
      for (std::size_t g = 0; g < gt_idx.size(); ++g) {
        ious[d * gt_idx.size() + g] = iou(scene.preds[det_idx[d]].pred.mask,
                                          scene.gts[gt_idx[g]].mask, mcfg);
      }
    }

    std::vector<DetRecord> records(det_idx.size());
    for (std::size_t d = 0; d < det_idx.size(); ++d) {
      records[d] = {scene.preds[det_idx[d]].score, scene_index, det_idx[d],
                    category, 0};
    }
    std::vector<char> gt_used(gt_idx.size());
    for (int k = 0; k < kNumThresholds; ++k) {
      const double t = threshold_at(k);
      std::fill(gt_used.begin(), gt_used.end(), 0);
      for (std::size_t d = 0; d < det_idx.size(); ++d) {
        int best_gt = -1;
        double best_iou = t;  // a match requires IoU >= t
        for (std::size_t g = 0; g < gt_idx.size(); ++g) {
          if (gt_used[g]) continue;
          const double x = ious[d * gt_idx.size() + g];
          if (x > best_iou || (best_gt < 0 && x >= best_iou)) {
            best_iou = x;
            best_gt = static_cast<int>(g);
          }
        }
        if (best_gt >= 0) {
          gt_used[best_gt] = 1;
          records[d].tp_bits |= static_cast<std::uint16_t>(1u << k);
        }
      }
    }
    out.dets.insert(out.dets.end(), records.begin(), records.end());
  }
  return out;
}

// 101-point interpolated average precision for one category/threshold.
double interpolated_ap(const std::vector<char>& tp_flags, int num_gts) {
  if (num_gts == 0) return 0.0;
  const int n = static_cast<int>(tp_flags.size());
  std::vector<double> precision(n), recall(n);
  int tp = 0;
  for (int i = 0; i < n; ++i) {
    tp += tp_flags[i];
    precision[i] = static_cast<double>(tp) / (i + 1);
    recall[i] = static_cast<double>(tp) / num_gts;
  }
  // Ceiling pass: precision envelope from the right.
  for (int i = n - 2; i >= 0; --i) {
    precision[i] = std::max(precision[i], precision[i + 1]);
  }
  double total = 0.0;
  int i = 0;
  for (int j = 0; j < kRecallPoints; ++j) {
    const double r = j / 100.0;
    while (i < n && recall[i] < r) ++i;
    if (i < n) total += precision[i];
  }
  return total / kRecallPoints;
}

}  // namespace

EvalReport evaluate(std::span<const EvalScene> scenes,
                    const MaskOpsConfig& mcfg) {
  const int n = static_cast<int>(scenes.size());
  std::vector<SceneMatches> per_scene(n);
  parallel_for(n, [&](int i) { per_scene[i] = match_scene(scenes[i], i, mcfg); });

  // Merge in scene order so the result is independent of worker count.
  std::map<int, int> gts_per_category;
  std::map<int, std::vector<DetRecord>> dets_per_category;
  for (const auto& sm : per_scene) {
    for (const auto& [category, count] : sm.gts_per_category) {
      gts_per_category[category] += count;
    }
    for (const auto& det : sm.dets) dets_per_category[det.category].push_back(det);
  }

  EvalReport report;
  std::vector<double> ap_by_threshold(kNumThresholds, 0.0);
  std::vector<double> recall_by_threshold(kNumThresholds, 0.0);
  int evaluated_categories = 0;
  for (const auto& [category, num_gts] : gts_per_category) {
    if (num_gts == 0) continue;
    ++evaluated_categories;
    auto dit = dets_per_category.find(category);
    std::vector<DetRecord> dets =
        dit == dets_per_category.end() ? std::vector<DetRecord>{} : dit->second;
    std::stable_sort(dets.begin(), dets.end(),
                     [](const DetRecord& a, const DetRecord& b) {
                       if (a.score != b.score) return a.score > b.score;
                       if (a.scene != b.scene) return a.scene < b.scene;
                       return a.index < b.index;
                     });
    for (int k = 0; k < kNumThresholds; ++k) {
      std::vector<char> tp_flags(dets.size());
      int tp_total = 0;
      for (std::size_t i = 0; i < dets.size(); ++i) {
        tp_flags[i] = (dets[i].tp_bits >> k) & 1;
        tp_total += tp_flags[i];
      }
      ap_by_threshold[k] += interpolated_ap(tp_flags, num_gts);
      recall_by_threshold[k] += static_cast<double>(tp_total) / num_gts;
    }
  }

  double ap_sum = 0.0, ar_sum = 0.0;
  for (int k = 0; k < kNumThresholds; ++k) {
    ThresholdMetrics tm;
    if (evaluated_categories > 0) {
      tm.ap = ap_by_threshold[k] / evaluated_categories;
      tm.recall = recall_by_threshold[k] / evaluated_categories;
    }
    report.per_threshold[threshold_at(k)] = tm;
    ap_sum += tm.ap;
    ar_sum += tm.recall;
  }
  report.ap = ap_sum / kNumThresholds;
  report.ar = ar_sum / kNumThresholds;
  report.ap50 = report.per_threshold[threshold_at(0)].ap;
  report.ap75 = report.per_threshold[threshold_at(5)].ap;
  return report;
}

double duplicate_rate(std::span<const EvalScene> scenes, double threshold,
                      const MaskOpsConfig& mcfg) {
  std::int64_t num_gts = 0;
  std::int64_t redundant = 0;
  const int n = static_cast<int>(scenes.size());
  std::vector<std::pair<std::int64_t, std::int64_t>> partial(n);
  parallel_for(n, [&](int i) {
    const auto& scene = scenes[i];
    std::int64_t local_gts = 0, local_redundant = 0;
    for (const auto& gt : scene.gts) {
      ++local_gts;
      std::int64_t hits = 0;
      for (const auto& sp : scene.preds) {
        if (sp.category != gt.category) continue;
        if (iou(sp.pred.mask, gt.mask, mcfg) >= threshold) ++hits;
      }
      local_redundant += std::max<std::int64_t>(0, hits - 1);
    }
    partial[i] = {local_gts, local_redundant};
  });
  for (const auto& [g, r] : partial) {
    num_gts += g;
    redundant += r;
  }
  if (num_gts == 0) return 0.0;
  return static_cast<double>(redundant) / static_cast<double>(num_gts);
}

}  // namespace uniinst
