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

#include "uniinst/nms.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace uniinst {

std::vector<int> greedy_mask_nms(std::span<const ScoredPrediction> preds,
                                 const NmsConfig& cfg,
                                 const MaskOpsConfig& mcfg) {
  std::map<int, std::vector<int>> by_category;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i].score < cfg.score_floor) continue;
    by_category[preds[i].category].push_back(static_cast<int>(i));
  }

  std::vector<int> survivors;
  for (auto& [category, indices] : by_category) {
    std::stable_sort(indices.begin(), indices.end(), [&](int a, int b) {
      return preds[a].score > preds[b].score;
    });
    std::vector<int> kept;
    for (int i : indices) {
      bool keep = true;
      for (int k : kept) {
        if (iou(preds[i].pred.mask, preds[k].pred.mask, mcfg) >=
            cfg.iou_threshold) {
          keep = false;
          break;
        }
      }
      if (keep) kept.push_back(i);
    }
    survivors.insert(survivors.end(), kept.begin(), kept.end());
  }

  if (static_cast<int>(survivors.size()) > cfg.max_keep) {
    std::stable_sort(survivors.begin(), survivors.end(), [&](int a, int b) {
      if (preds[a].score != preds[b].score) {
        return preds[a].score > preds[b].score;
      }
      return a < b;
    });
    survivors.resize(cfg.max_keep);
  }
  std::sort(survivors.begin(), survivors.end());
  return survivors;
}

}  // namespace uniinst
