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

#include <algorithm>
#include <vector>

#include "test_util.hpp"
#include "uniinst/errors.hpp"
#include "uniinst/mask.hpp"
#include "uniinst/rng.hpp"

using namespace uniinst;
using testutil::mask_from_rows;
using testutil::random_binary_mask;
using testutil::random_soft_mask;

namespace {
const MaskOpsConfig kCfg;
}

TEST_CASE("dice on identical binary masks stays just below one") {
  const SoftMask m = mask_from_rows({"##.", "#.."});
  CHECK(dice(m, m, kCfg) == doctest::Approx(6.0 / (6.0 + 1e-5)).epsilon(1e-12));
}

TEST_CASE("dice of disjoint masks is zero") {
  const SoftMask a = mask_from_rows({"##..", "##.."});
  const SoftMask b = mask_from_rows({"..##", "..##"});
  CHECK(dice(a, b, kCfg) == 0.0);
}

TEST_CASE("dice handles soft activations") {
  // Constant 0.5 over 2x2 against all ones: 2*2.0 / (1.0 + 4.0 + eps).
  const SoftMask a = mask_from_rows({"55", "55"});
  const SoftMask b = mask_from_rows({"##", "##"});
  CHECK(dice(a, b, kCfg) ==
        doctest::Approx(4.0 / (5.0 + 1e-5)).epsilon(1e-12));
}

TEST_CASE("dice rejects mismatched shapes") {
  const SoftMask a(2, 2);
  const SoftMask b(2, 3);
  CHECK_THROWS_AS(dice(a, b, kCfg), ShapeMismatchError);
}

TEST_CASE("iou of identical masks is one") {
  const SoftMask m = mask_from_rows({"###", "#.#"});
  CHECK(iou(m, m, kCfg) == 1.0);
}

TEST_CASE("iou of a half-shifted block is one third") {
  const SoftMask a = mask_from_rows({"##..", "##.."});
  const SoftMask b = mask_from_rows({".##.", ".##."});
  CHECK(iou(a, b, kCfg) == doctest::Approx(2.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("iou of two empty masks is zero by convention") {
  const SoftMask a(3, 3);
  const SoftMask b(3, 3);
  CHECK(iou(a, b, kCfg) == 0.0);
}

TEST_CASE("centroid of symmetric and point masses") {
  const SoftMask square = mask_from_rows({"##", "##"});
  const Centroid c1 = centroid(square);
  CHECK(c1.row == doctest::Approx(0.5));
  CHECK(c1.col == doctest::Approx(0.5));

  SoftMask point(8, 8);
  point.set(3, 7, 1.0);
  const Centroid c2 = centroid(point);
  CHECK(c2.row == doctest::Approx(3.0));
  CHECK(c2.col == doctest::Approx(7.0));

  const SoftMask ell = mask_from_rows({"#.", "##"});
  const Centroid c3 = centroid(ell);
  CHECK(c3.row == doctest::Approx(2.0 / 3.0));
  CHECK(c3.col == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("centroid of an all-zero mask is an error") {
  CHECK_THROWS_AS(centroid(SoftMask(4, 4)), EmptyMaskError);
}

TEST_CASE("rle encodes column-major with a leading background run") {
  CHECK(encode_rle(SoftMask(2, 2)).counts == std::vector<std::int64_t>{4});

  const SoftMask ones = mask_from_rows({"##", "##"});
  CHECK(encode_rle(ones).counts == std::vector<std::int64_t>{0, 4});

  SoftMask corner(2, 2);
  corner.set(0, 0, 1.0);
  CHECK(encode_rle(corner).counts == std::vector<std::int64_t>{0, 1, 3});
}

TEST_CASE("rle decode rejects malformed counts") {
  CHECK_THROWS_AS(decode_rle(RleMask{2, 2, {3}}), MalformedRleError);
  CHECK_THROWS_AS(decode_rle(RleMask{2, 2, {0, 1, 0, 3}}), MalformedRleError);
  CHECK_THROWS_AS(decode_rle(RleMask{2, 2, {-1, 5}}), MalformedRleError);
  CHECK_NOTHROW(decode_rle(RleMask{2, 2, {0, 4}}));
}

TEST_CASE("in_center_region accepts the centroid of a filled square") {
  const SoftMask square = mask_from_rows({"#####", "#####", "#####",
                                          "#####", "#####"});
  CHECK(in_center_region({2.0, 2.0}, square, 1.5));
  CHECK_FALSE(in_center_region({2.0, 4.0}, square, 1.5));
  CHECK_FALSE(in_center_region({5.0, 2.0}, square, 1.5));
}

TEST_CASE("in_center_region rejects the hole of a ring mask") {
  const SoftMask ring = mask_from_rows({"#####", "#...#", "#...#", "#...#",
                                        "#####"});
  // The centroid sits on a background pixel.
  CHECK_FALSE(in_center_region({2.0, 2.0}, ring, 3.0));
  CHECK(in_center_region({0.0, 2.0}, ring, 3.0));
}

TEST_CASE("in_center_region throws on an empty mask") {
  CHECK_THROWS_AS(in_center_region({0.0, 0.0}, SoftMask(3, 3), 1.0),
                  EmptyMaskError);
}

TEST_CASE("mask values outside [0,1] are rejected") {
  CHECK_THROWS(SoftMask(1, 2, {0.5, 1.5}));
  CHECK_THROWS(SoftMask(0, 2));
}

TEST_CASE("property: dice symmetry and self-similarity") {
  StreamRng rng(7, {1});
  for (int trial = 0; trial < 1000; ++trial) {
    const int h = rng.next_int(1, 12);
    const int w = rng.next_int(1, 12);
    const SoftMask a = random_soft_mask(rng, h, w);
    const SoftMask b = random_soft_mask(rng, h, w);
    CHECK(dice(a, b, kCfg) == dice(b, a, kCfg));
  }
  for (int trial = 0; trial < 200; ++trial) {
    SoftMask m = random_binary_mask(rng, rng.next_int(2, 12),
                                    rng.next_int(2, 12));
    if (foreground_count(m, 0.5) == 0) m.set(0, 0, 1.0);
    CHECK(dice(m, m, kCfg) >= 1.0 - kCfg.dice_epsilon);
  }
}

TEST_CASE("property: removing a shared foreground pixel never raises dice") {
  StreamRng rng(11, {2});
  int checked = 0;
  while (checked < 1000) {
    const int h = rng.next_int(2, 10);
    const int w = rng.next_int(2, 10);
    SoftMask a = random_binary_mask(rng, h, w);
    const SoftMask b = random_binary_mask(rng, h, w);
    std::vector<std::pair<int, int>> shared;
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        if (a.at(r, c) >= 0.5 && b.at(r, c) >= 0.5) shared.emplace_back(r, c);
      }
    }
    if (shared.empty()) continue;
    const double before = dice(a, b, kCfg);
    const auto [r, c] =
        shared[rng.next_int(0, static_cast<int>(shared.size()) - 1)];
    a.set(r, c, 0.0);
    CHECK(dice(a, b, kCfg) <= before + 1e-15);
    ++checked;
  }
}

TEST_CASE("property: iou bounded by one, equality only for equal masks") {
  StreamRng rng(13, {3});
  for (int trial = 0; trial < 1000; ++trial) {
    const int h = rng.next_int(1, 10);
    const int w = rng.next_int(1, 10);
    const SoftMask a = random_binary_mask(rng, h, w);
    const SoftMask b = random_binary_mask(rng, h, w);
    const double x = iou(a, b, kCfg);
    CHECK(x >= 0.0);
    CHECK(x <= 1.0);
    const bool equal_nonempty =
        binarize(a, 0.5) == binarize(b, 0.5) && foreground_count(a, 0.5) > 0;
    CHECK((x == 1.0) == equal_nonempty);
  }
}

TEST_CASE("property: rle roundtrip reproduces the binarized mask") {
  StreamRng rng(17, {4});
  for (int trial = 0; trial < 1000; ++trial) {
    const int h = rng.next_int(1, 16);
    const int w = rng.next_int(1, 16);
    const SoftMask m = trial % 2 == 0 ? random_binary_mask(rng, h, w)
                                      : random_soft_mask(rng, h, w);
    const RleMask r = encode_rle(m, kCfg);
    const SoftMask back = decode_rle(r);
    CHECK(binarize(back, 0.5) == binarize(m, kCfg.binarize_threshold));
    // Re-encoding is exact: the canonical form is unique.
    CHECK(encode_rle(back, kCfg).counts == r.counts);
  }
}

TEST_CASE("property: centroid stays inside the bounding box") {
  StreamRng rng(19, {5});
  for (int trial = 0; trial < 1000; ++trial) {
    const int h = rng.next_int(1, 12);
    const int w = rng.next_int(1, 12);
    SoftMask m = random_binary_mask(rng, h, w, 0.25);
    if (foreground_count(m, 0.5) == 0) {
      m.set(rng.next_int(0, h - 1), rng.next_int(0, w - 1), 1.0);
    }
    int rmin = h, rmax = -1, cmin = w, cmax = -1;
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        if (m.at(r, c) < 0.5) continue;
        rmin = std::min(rmin, r);
        rmax = std::max(rmax, r);
        cmin = std::min(cmin, c);
        cmax = std::max(cmax, c);
      }
    }
    const Centroid ctr = centroid(m);
    CHECK(ctr.row >= rmin);
    CHECK(ctr.row <= rmax);
    CHECK(ctr.col >= cmin);
    CHECK(ctr.col <= cmax);
  }
}
