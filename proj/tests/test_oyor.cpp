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

#include <cmath>
#include <set>
#include <vector>

#include "test_util.hpp"
#include "uniinst/errors.hpp"
#include "uniinst/oyor.hpp"

using namespace uniinst;
using testutil::mask_from_rows;

namespace {

const MaskOpsConfig kMaskCfg;

SoftMask filled_disc(int h, int w, int cr, int cc, int radius) {
  SoftMask m(h, w);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if ((r - cr) * (r - cr) + (c - cc) * (c - cc) <= radius * radius) {
        m.set(r, c, 1.0);
      }
    }
  }
  return m;
}

Prediction make_pred(ImagePoint loc, const SoftMask& mask,
                     std::vector<double> scores, double pred_iou = 0.5,
                     int level = 3) {
  return Prediction{loc, LevelSpec{level}, std::move(scores), mask, pred_iou};
}

// Removes `count` foreground pixels (row-major order) to lower the Dice.
SoftMask erode_pixels(const SoftMask& m, int count) {
  SoftMask out = m;
  for (int r = 0; r < out.height() && count > 0; ++r) {
    for (int c = 0; c < out.width() && count > 0; ++c) {
      if (out.at(r, c) >= 0.5) {
        out.set(r, c, 0.0);
        --count;
      }
    }
  }
  return out;
}

}  // namespace

TEST_CASE("match_quality is zero outside the center region") {
  const SoftMask gt_mask = filled_disc(32, 32, 6, 6, 4);
  const GroundTruth gt{0, gt_mask};
  const Prediction far = make_pred({30.0, 30.0}, gt_mask, {0.9});
  CHECK(match_quality(far, gt, OyorConfig{}, kMaskCfg) == 0.0);
}

TEST_CASE("match_quality reproduces the weighted geometric mean") {
  // A prediction holding soft value v on the single ground-truth pixel has
  // Dice 2v / (v^2 + 1 + eps); v solving v^2 - 4v + (1 + eps) = 0 makes
  // that exactly one half.
  const double v = 2.0 - std::sqrt(3.0 - 1e-5);
  SoftMask gt_mask(16, 16);
  gt_mask.set(8, 8, 1.0);
  SoftMask pred_mask(16, 16);
  pred_mask.set(8, 8, v);
  const GroundTruth gt{0, gt_mask};
  const Prediction pred = make_pred({8.0, 8.0}, pred_mask, {0.8});

  CHECK(std::abs(dice(pred_mask, gt_mask, kMaskCfg) - 0.5) < 1e-9);
  const double quality = match_quality(pred, gt, OyorConfig{}, kMaskCfg);
  // 0.8^0.1 * 0.5^0.9, evaluated independently.
  CHECK(std::abs(quality - 0.5240611947344789) < 1e-9);
}

TEST_CASE("match_quality collapses at the alpha extremes") {
  const SoftMask gt_mask = filled_disc(32, 32, 10, 10, 4);
  const GroundTruth gt{0, gt_mask};
  const Prediction pred =
      make_pred({10.0, 10.0}, erode_pixels(gt_mask, 5), {0.8});

  OyorConfig cls_only;
  cls_only.alpha = 0.0;
  CHECK(match_quality(pred, gt, cls_only, kMaskCfg) == 0.8);

  OyorConfig mask_only;
  mask_only.alpha = 1.0;
  CHECK(match_quality(pred, gt, mask_only, kMaskCfg) ==
        dice(pred.mask, gt.mask, kMaskCfg));
}

TEST_CASE("match_quality validates the category") {
  const SoftMask m = filled_disc(16, 16, 8, 8, 3);
  const GroundTruth gt{2, m};
  const Prediction pred = make_pred({8.0, 8.0}, m, {0.9, 0.8});
  CHECK_THROWS_AS(match_quality(pred, gt, OyorConfig{}, kMaskCfg),
                  InvalidCategoryError);
}

TEST_CASE("build_quality_matrix lays out gts by row") {
  const SoftMask gt_mask = filled_disc(32, 32, 8, 8, 4);
  const std::vector<GroundTruth> gts = {{0, gt_mask}};
  const std::vector<Prediction> preds = {
      make_pred({8.0, 8.0}, gt_mask, {0.7}),
      make_pred({28.0, 28.0}, gt_mask, {0.7}),
  };
  const QualityMatrix m =
      build_quality_matrix(preds, gts, OyorConfig{}, kMaskCfg);
  CHECK(m.num_gts == 1);
  CHECK(m.num_preds == 2);
  CHECK(m.at(0, 0) > 0.0);
  CHECK(m.at(0, 1) == 0.0);

  const QualityMatrix empty =
      build_quality_matrix(std::vector<Prediction>{}, gts, OyorConfig{},
                           kMaskCfg);
  CHECK(empty.num_gts == 1);
  CHECK(empty.num_preds == 0);
}

TEST_CASE("assign matches the in-region candidate and demotes zeros") {
  const SoftMask gt0 = filled_disc(64, 64, 12, 12, 5);
  const SoftMask gt1 = filled_disc(64, 64, 48, 48, 5);
  const std::vector<GroundTruth> gts = {{0, gt0}, {0, gt1}};
  // gt1 has no candidate anywhere near its center region.
  const std::vector<Prediction> preds = {
      make_pred({12.0, 12.0}, gt0, {0.9}),
      make_pred({14.0, 12.0}, erode_pixels(gt0, 10), {0.6}),
  };
  const Assignment a = assign(preds, gts, OyorConfig{}, kMaskCfg);
  REQUIRE(a.pairs.size() == 1);
  CHECK(a.pairs[0].gt_index == 0);
  CHECK(a.pairs[0].pred_index == 0);
  CHECK(a.unmatched_gts == std::vector<int>{1});
}

TEST_CASE("alpha extremes steer the assigned candidate") {
  const SoftMask gt_mask = filled_disc(64, 64, 16, 16, 6);
  const std::vector<GroundTruth> gts = {{0, gt_mask}};
  // Candidate 0: strong classifier, weaker mask. Candidate 1: the reverse.
  const std::vector<Prediction> preds = {
      make_pred({16.0, 16.0}, erode_pixels(gt_mask, 30), {0.95}),
      make_pred({17.0, 16.0}, gt_mask, {0.40}),
  };

  OyorConfig cls_only;
  cls_only.alpha = 0.0;
  const Assignment by_cls = assign(preds, gts, cls_only, kMaskCfg);
  REQUIRE(by_cls.pairs.size() == 1);
  CHECK(by_cls.pairs[0].pred_index == 0);

  OyorConfig mask_only;
  mask_only.alpha = 1.0;
  const Assignment by_mask = assign(preds, gts, mask_only, kMaskCfg);
  REQUIRE(by_mask.pairs.size() == 1);
  CHECK(by_mask.pairs[0].pred_index == 1);
}

TEST_CASE("scaling every class score preserves the assignment") {
  StreamRng rng(31, {7});
  const SoftMask gt0 = filled_disc(64, 64, 14, 14, 6);
  const SoftMask gt1 = filled_disc(64, 64, 40, 40, 7);
  const std::vector<GroundTruth> gts = {{0, gt0}, {1, gt1}};
  std::vector<Prediction> preds;
  for (int i = 0; i < 3; ++i) {
    preds.push_back(make_pred({14.0 + i, 14.0}, erode_pixels(gt0, i * 8),
                              {0.3 + 0.2 * rng.next_unit(), 0.1}));
    preds.push_back(make_pred({40.0, 40.0 + i}, erode_pixels(gt1, i * 8),
                              {0.1, 0.4 + 0.3 * rng.next_unit()}));
  }
  const Assignment base = assign(preds, gts, OyorConfig{}, kMaskCfg);

  for (double k : {0.9, 0.5, 0.2}) {
    std::vector<Prediction> scaled = preds;
    for (auto& p : scaled) {
      for (auto& s : p.class_scores) s *= k;
    }
    const Assignment shrunk = assign(scaled, gts, OyorConfig{}, kMaskCfg);
    REQUIRE(shrunk.pairs.size() == base.pairs.size());
    for (std::size_t i = 0; i < base.pairs.size(); ++i) {
      CHECK(shrunk.pairs[i].gt_index == base.pairs[i].gt_index);
      CHECK(shrunk.pairs[i].pred_index == base.pairs[i].pred_index);
    }
  }
}

TEST_CASE("assign total quality matches the exhaustive oracle") {
  StreamRng rng(37, {8});
  for (int trial = 0; trial < 40; ++trial) {
    const int num_gts = rng.next_int(1, 3);
    std::vector<GroundTruth> gts;
    for (int g = 0; g < num_gts; ++g) {
      gts.push_back({rng.next_int(0, 1),
                     filled_disc(64, 64, 12 + 20 * g, 12 + rng.next_int(0, 20),
                                 4 + rng.next_int(0, 3))});
    }
    std::vector<Prediction> preds;
    const int num_preds = rng.next_int(0, 6);
    for (int p = 0; p < num_preds; ++p) {
      const auto& target = gts[rng.next_int(0, num_gts - 1)];
      const Centroid c = centroid(target.mask);
      preds.push_back(make_pred(
          {c.row + rng.next_int(-3, 3), c.col + rng.next_int(-3, 3)},
          erode_pixels(target.mask, rng.next_int(0, 20)),
          {rng.next_unit(), rng.next_unit()}));
    }

    const Assignment fast = assign(preds, gts, OyorConfig{}, kMaskCfg);
    const QualityMatrix m =
        build_quality_matrix(preds, gts, OyorConfig{}, kMaskCfg);
    const Assignment slow = solve_bruteforce(m);
    CHECK(std::abs(fast.total_quality() - slow.total_quality()) < 1e-9);

    std::set<int> used;
    for (const auto& pair : fast.pairs) {
      CHECK(pair.quality > 0.0);
      CHECK(used.insert(pair.pred_index).second);
    }
  }
}
