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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "test_util.hpp"
#include "uniinst/nms.hpp"

using namespace uniinst;
using testutil::mask_from_rows;
using testutil::random_binary_mask;

namespace {

ScoredPrediction scored(const SoftMask& mask, int category, double score) {
  Prediction p{{0.0, 0.0}, LevelSpec{3}, {score}, mask, 0.5};
  return {std::move(p), category, score};
}

std::vector<ScoredPrediction> gather(const std::vector<ScoredPrediction>& in,
                                     const std::vector<int>& kept) {
  std::vector<ScoredPrediction> out;
  for (int i : kept) out.push_back(in[i]);
  return out;
}

}  // namespace

TEST_CASE("exact duplicates collapse to the top score") {
  const SoftMask m = mask_from_rows({"##..", "##..", "....", "...."});
  const std::vector<ScoredPrediction> preds = {scored(m, 0, 0.9),
                                               scored(m, 0, 0.8)};
  CHECK(greedy_mask_nms(preds, NmsConfig{}) == std::vector<int>{0});
}

TEST_CASE("disjoint masks both survive") {
  const SoftMask a = mask_from_rows({"##..", "##..", "....", "...."});
  const SoftMask b = mask_from_rows({"....", "....", "..##", "..##"});
  const std::vector<ScoredPrediction> preds = {scored(a, 0, 0.9),
                                               scored(b, 0, 0.8)};
  CHECK(greedy_mask_nms(preds, NmsConfig{}) == std::vector<int>{0, 1});
}

TEST_CASE("overlap below the threshold survives") {
  // 3x5 blocks shifted by one column: intersection 12, union 18, IoU 2/3;
  // it survives a 0.7 threshold and dies at 0.5.
  const SoftMask a = mask_from_rows({"#####...", "#####...", "#####..."});
  const SoftMask b = mask_from_rows({".#####..", ".#####..", ".#####.."});
  const std::vector<ScoredPrediction> preds = {scored(a, 0, 0.9),
                                               scored(b, 0, 0.8)};
  CHECK(iou(a, b, MaskOpsConfig{}) == doctest::Approx(12.0 / 18.0));
  NmsConfig loose;
  loose.iou_threshold = 0.7;
  CHECK(greedy_mask_nms(preds, loose) == std::vector<int>{0, 1});
  NmsConfig tight;
  tight.iou_threshold = 0.5;
  CHECK(greedy_mask_nms(preds, tight) == std::vector<int>{0});
}

TEST_CASE("scores below the floor are dropped") {
  const SoftMask m = mask_from_rows({"##", "##"});
  const std::vector<ScoredPrediction> preds = {scored(m, 0, 0.9),
                                               scored(m, 1, 0.01)};
  CHECK(greedy_mask_nms(preds, NmsConfig{}) == std::vector<int>{0});
}

TEST_CASE("max_keep truncates by score") {
  const SoftMask a = mask_from_rows({"#...", "....", "....", "...."});
  const SoftMask b = mask_from_rows({"..#.", "....", "....", "...."});
  const SoftMask c = mask_from_rows({"....", "....", ".#..", "...."});
  std::vector<ScoredPrediction> preds = {scored(a, 0, 0.5), scored(b, 1, 0.9),
                                         scored(c, 2, 0.7)};
  NmsConfig cfg;
  cfg.max_keep = 2;
  CHECK(greedy_mask_nms(preds, cfg) == std::vector<int>{1, 2});
}

TEST_CASE("different categories never suppress each other") {
  const SoftMask m = mask_from_rows({"###.", "###.", "###.", "...."});
  const std::vector<ScoredPrediction> preds = {scored(m, 0, 0.9),
                                               scored(m, 1, 0.8),
                                               scored(m, 2, 0.7)};
  CHECK(greedy_mask_nms(preds, NmsConfig{}) == std::vector<int>{0, 1, 2});
}

TEST_CASE("property: idempotent, monotone in threshold, category isolated") {
  StreamRng rng(53, {11});
  for (int trial = 0; trial < 150; ++trial) {
    std::vector<ScoredPrediction> preds;
    const int n = rng.next_int(0, 14);
    for (int i = 0; i < n; ++i) {
      preds.push_back(scored(random_binary_mask(rng, 8, 8, 0.45),
                             rng.next_int(0, 2), rng.next_unit()));
    }
    NmsConfig cfg;
    cfg.iou_threshold = 0.3 + 0.4 * rng.next_unit();
    cfg.score_floor = 0.0;

    const std::vector<int> kept = greedy_mask_nms(preds, cfg);

    // Idempotence: suppressing the survivors changes nothing.
    const auto survivors = gather(preds, kept);
    const std::vector<int> again = greedy_mask_nms(survivors, cfg);
    std::vector<int> identity(survivors.size());
    for (std::size_t i = 0; i < survivors.size(); ++i) {
      identity[i] = static_cast<int>(i);
    }
    CHECK(again == identity);

    // Raising the threshold never reduces the kept count.
    NmsConfig looser = cfg;
    looser.iou_threshold = std::min(0.999, cfg.iou_threshold + 0.2);
    CHECK(greedy_mask_nms(preds, looser).size() >= kept.size());

    // Per-category runs agree with the joint run.
    std::vector<int> merged;
    for (int cat = 0; cat <= 2; ++cat) {
      std::vector<ScoredPrediction> only;
      std::vector<int> back;
      for (std::size_t i = 0; i < preds.size(); ++i) {
        if (preds[i].category == cat) {
          only.push_back(preds[i]);
          back.push_back(static_cast<int>(i));
        }
      }
      for (int k : greedy_mask_nms(only, cfg)) merged.push_back(back[k]);
    }
    std::sort(merged.begin(), merged.end());
    CHECK(merged == kept);
  }
}
