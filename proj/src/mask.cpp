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

#include "uniinst/mask.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "uniinst/errors.hpp"

namespace uniinst {

namespace {

void check_shape(int height, int width) {
  if (height < 1 || width < 1) {
    throw ShapeMismatchError("mask dimensions must be at least 1x1, got " +
                             std::to_string(height) + "x" +
                             std::to_string(width));
  }
}

void check_same_shape(const SoftMask& a, const SoftMask& b) {
  if (!a.same_shape(b)) {
    throw ShapeMismatchError(
        "mask shapes differ: " + std::to_string(a.height()) + "x" +
        std::to_string(a.width()) + " vs " + std::to_string(b.height()) + "x" +
        std::to_string(b.width()));
  }
}

void check_value(double v) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw ShapeMismatchError("mask value outside [0,1]: " + std::to_string(v));
  }
}

}  // namespace

SoftMask::SoftMask(int height, int width)
    : height_(height),
      width_(width),
      values_(static_cast<std::size_t>(height) * width, 0.0) {
  check_shape(height, width);
}

SoftMask::SoftMask(int height, int width, std::vector<double> values)
    : height_(height), width_(width), values_(std::move(values)) {
  check_shape(height, width);
  if (values_.size() != static_cast<std::size_t>(height) * width) {
    throw ShapeMismatchError("value grid does not match " +
                             std::to_string(height) + "x" +
                             std::to_string(width));
  }
  for (double v : values_) check_value(v);
}

void SoftMask::set(int row, int col, double value) {
  check_value(value);
  values_[static_cast<std::size_t>(row) * width_ + col] = value;
}

double dice(const SoftMask& a, const SoftMask& b, const MaskOpsConfig& cfg) {
  check_same_shape(a, b);
  double inter = 0.0, mag_a = 0.0, mag_b = 0.0;
  const auto va = a.values();
  const auto vb = b.values();
  for (std::size_t i = 0; i < va.size(); ++i) {
    const double x = va[i];
    const double y = vb[i];
    inter += x * y;
    mag_a += x * x;
    mag_b += y * y;
  }
  return 2.0 * inter / (mag_a + mag_b + cfg.dice_epsilon);
}

double iou(const SoftMask& a, const SoftMask& b, const MaskOpsConfig& cfg) {
  check_same_shape(a, b);
  const double thr = cfg.binarize_threshold;
  std::int64_t inter = 0, uni = 0;
  const auto va = a.values();
  const auto vb = b.values();
  for (std::size_t i = 0; i < va.size(); ++i) {
    const bool x = va[i] >= thr;
    const bool y = vb[i] >= thr;
    inter += (x && y);
    uni += (x || y);
  }
  if (uni == 0) return 0.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

Centroid centroid(const SoftMask& m) {
  double total = 0.0, row_acc = 0.0, col_acc = 0.0;
  for (int r = 0; r < m.height(); ++r) {
    for (int c = 0; c < m.width(); ++c) {
      const double v = m.at(r, c);
      total += v;
      row_acc += v * r;
      col_acc += v * c;
    }
  }
  if (total <= 0.0) {
    throw EmptyMaskError("centroid of an all-zero mask is undefined");
  }
  return Centroid{row_acc / total, col_acc / total};
}

bool in_center_region(const ImagePoint& loc, const SoftMask& m, double radius,
                      const MaskOpsConfig& cfg) {
  const Centroid c = centroid(m);  // throws on empty mask
  if (std::abs(loc.row - c.row) > radius) return false;
  if (std::abs(loc.col - c.col) > radius) return false;
  const auto r_px = static_cast<std::int64_t>(std::llround(loc.row));
  const auto c_px = static_cast<std::int64_t>(std::llround(loc.col));
  if (r_px < 0 || r_px >= m.height() || c_px < 0 || c_px >= m.width()) {
    return false;
  }
  return m.at(static_cast<int>(r_px), static_cast<int>(c_px)) >=
         cfg.binarize_threshold;
}

RleMask encode_rle(const SoftMask& m, const MaskOpsConfig& cfg) {
  RleMask out;
  out.height = m.height();
  out.width = m.width();
  const double thr = cfg.binarize_threshold;
  bool expecting = false;  // runs start with background
  std::int64_t run = 0;
  for (int c = 0; c < m.width(); ++c) {
    for (int r = 0; r < m.height(); ++r) {
      const bool fg = m.at(r, c) >= thr;
      if (fg == expecting) {
        ++run;
      } else {
        out.counts.push_back(run);
        expecting = fg;
        run = 1;
      }
    }
  }
  out.counts.push_back(run);
  return out;
}

void validate_rle(const RleMask& r) {
  if (r.height < 1 || r.width < 1) {
    throw MalformedRleError("RLE dimensions must be at least 1x1");
  }
  std::int64_t total = 0;
  for (std::size_t i = 0; i < r.counts.size(); ++i) {
    const std::int64_t count = r.counts[i];
    if (count < 0) {
      throw MalformedRleError("negative run length");
    }
    if (count == 0 && i != 0) {
      throw MalformedRleError("zero-length run at position " +
                              std::to_string(i));
    }
    total += count;
  }
  const std::int64_t expected =
      static_cast<std::int64_t>(r.height) * r.width;
  if (total != expected) {
    throw MalformedRleError("run lengths sum to " + std::to_string(total) +
                            ", expected " + std::to_string(expected));
  }
}

SoftMask decode_rle(const RleMask& r) {
  validate_rle(r);
  SoftMask out(r.height, r.width);
  std::int64_t flat = 0;  // column-major position
  bool fg = false;
  for (const std::int64_t count : r.counts) {
    if (fg) {
      for (std::int64_t k = 0; k < count; ++k) {
        const std::int64_t pos = flat + k;
        out.set(static_cast<int>(pos % r.height),
                static_cast<int>(pos / r.height), 1.0);
      }
    }
    flat += count;
    fg = !fg;
  }
  return out;
}

std::vector<std::uint8_t> binarize(const SoftMask& m, double threshold) {
  std::vector<std::uint8_t> out(m.values().size());
  const double thr = threshold;
  const auto vals = m.values();
  for (std::size_t i = 0; i < vals.size(); ++i) {
    out[i] = vals[i] >= thr ? 1 : 0;
  }
  return out;
}

std::int64_t foreground_count(const SoftMask& m, double threshold) {
  const double thr = threshold;
  std::int64_t n = 0;
  for (double v : m.values()) n += (v >= thr);
  return n;
}

}  // namespace uniinst
