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

#include <cstdint>
#include <span>
#include <vector>

namespace uniinst {

/// Knobs shared by all mask arithmetic. Dice uses the epsilon in its
/// denominator; IoU and RLE binarize soft activations at the threshold
/// (a pixel is foreground iff value >= binarize_threshold).
struct MaskOpsConfig {
  double dice_epsilon = 1e-5;
  double binarize_threshold = 0.5;
};

/// Dense h x w grid of activations in [0, 1], stored row-major.
/// Binary masks are the special case with values in {0, 1}.
class SoftMask {
 public:
  SoftMask() : SoftMask(1, 1) {}    // smallest legal mask, all zero
  SoftMask(int height, int width);  // all zeros
  SoftMask(int height, int width, std::vector<double> values);

  int height() const { return height_; }
  int width() const { return width_; }
  std::int64_t size() const {
    return static_cast<std::int64_t>(height_) * width_;
  }

  double at(int row, int col) const {
    return values_[static_cast<std::size_t>(row) * width_ + col];
  }
  /// New value must stay within [0, 1].
  void set(int row, int col, double value);

  std::span<const double> values() const { return values_; }

  bool same_shape(const SoftMask& other) const {
    return height_ == other.height_ && width_ == other.width_;
  }

 private:
  int height_;
  int width_;
  std::vector<double> values_;
};

/// Column-major run-length coding of a binary mask. Counts alternate runs
/// of background then foreground, starting with a possibly empty background
/// run; all later runs are non-empty and the counts sum to height * width.
struct RleMask {
  int height = 0;
  int width = 0;
  std::vector<std::int64_t> counts;
};

struct ImagePoint {
  double row = 0.0;
  double col = 0.0;
};

struct Centroid {
  double row = 0.0;
  double col = 0.0;
};

/// Soft Dice similarity: 2 * sum(a*b) / (sum(a^2) + sum(b^2) + eps).
/// Symmetric, and strictly below 1 because of the epsilon.
double dice(const SoftMask& a, const SoftMask& b, const MaskOpsConfig& cfg);

/// Set IoU of the two masks binarized at cfg.binarize_threshold.
/// Two empty masks give 0, not 1.
double iou(const SoftMask& a, const SoftMask& b, const MaskOpsConfig& cfg);

/// Activation-weighted mean pixel coordinate; pixel centers sit at integer
/// coordinates. Throws EmptyMaskError when the mask sums to zero.
Centroid centroid(const SoftMask& m);

/// True iff loc lies within `radius` of the mask centroid along both axes
/// and the integer pixel nearest to loc is foreground (so locations over
/// holes of a ring-shaped mask do not qualify).
bool in_center_region(const ImagePoint& loc, const SoftMask& m, double radius,
                      const MaskOpsConfig& cfg = {});

RleMask encode_rle(const SoftMask& m, const MaskOpsConfig& cfg = {});
SoftMask decode_rle(const RleMask& r);

/// Throws MalformedRleError unless counts are canonical: non-negative,
/// summing to height * width, with only the leading run allowed to be empty.
void validate_rle(const RleMask& r);

/// Flat row-major 0/1 view of a mask binarized at the threshold.
std::vector<std::uint8_t> binarize(const SoftMask& m, double threshold);

/// Number of foreground pixels after binarization.
std::int64_t foreground_count(const SoftMask& m, double threshold);

}  // namespace uniinst
