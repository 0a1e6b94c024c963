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

#include "uniinst/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "uniinst/errors.hpp"
#include "uniinst/rng.hpp"

namespace uniinst {

namespace {

// Stream purpose tags; part of the fixed generator definition.
enum StreamTag : std::uint64_t {
  kTagCount = 1,
  kTagShape = 2,
  kTagCategory = 3,
  kTagMaskNoise = 4,
  kTagScore = 5,
  kTagLocation = 6,
  kTagOffScores = 7,
};

constexpr int kSceneAttempts = 30;
constexpr int kPlacementTries = 40;
constexpr int kMinShapeArea = 12;
constexpr int kMinSurvivingArea = 8;
constexpr int kBlobVertices = 10;
constexpr int kBoundaryBand = 3;

struct Grid {
  int h = 0;
  int w = 0;
  std::vector<std::uint8_t> cells;

  Grid(int height, int width) : h(height), w(width), cells(height * width, 0) {}
  std::uint8_t at(int r, int c) const { return cells[r * w + c]; }
  void set(int r, int c, std::uint8_t v) { cells[r * w + c] = v; }
  std::int64_t area() const {
    std::int64_t n = 0;
    for (auto v : cells) n += v;
    return n;
  }
};

Grid rasterize_shape(const SceneConfig& cfg, double cr, double cc, double ra,
                     double rb, ShapeFamily family, StreamRng& rng) {
  Grid g(cfg.image_height, cfg.image_width);
  std::vector<double> blob_radii;
  if (family == ShapeFamily::kBlob) {
    blob_radii.resize(kBlobVertices);
    for (auto& r : blob_radii) r = 0.55 + 0.45 * rng.next_unit();
  }
  const int r_lo = std::max(0, static_cast<int>(std::floor(cr - ra - 1)));
  const int r_hi =
      std::min(cfg.image_height - 1, static_cast<int>(std::ceil(cr + ra + 1)));
  const int c_lo = std::max(0, static_cast<int>(std::floor(cc - rb - 1)));
  const int c_hi =
      std::min(cfg.image_width - 1, static_cast<int>(std::ceil(cc + rb + 1)));
  for (int r = r_lo; r <= r_hi; ++r) {
    for (int c = c_lo; c <= c_hi; ++c) {
      const double dr = r - cr;
      const double dc = c - cc;
      bool inside = false;
      switch (family) {
        case ShapeFamily::kEllipse:
          inside = (dr * dr) / (ra * ra) + (dc * dc) / (rb * rb) <= 1.0;
          break;
        case ShapeFamily::kRectangle:
          inside = std::abs(dr) <= ra && std::abs(dc) <= rb;
          break;
        case ShapeFamily::kBlob: {
          const double dist = std::hypot(dr, dc);
          if (dist <= 1e-9) {
            inside = true;
            break;
          }
          double theta = std::atan2(dr, dc);
          if (theta < 0) theta += 2.0 * std::numbers::pi;
          const double sector =
              theta / (2.0 * std::numbers::pi) * kBlobVertices;
          const int k0 = static_cast<int>(sector) % kBlobVertices;
          const int k1 = (k0 + 1) % kBlobVertices;
          const double frac = sector - std::floor(sector);
          const double radial =
              blob_radii[k0] + (blob_radii[k1] - blob_radii[k0]) * frac;
          inside = dist <= radial * ra;
          break;
        }
      }
      if (inside) g.set(r, c, 1);
    }
  }
  return g;
}

// Fraction of `shape` already covered by `occupied`. With strict set, the
// 8-neighborhood of occupied pixels counts as covered too, which forces a
// one-pixel gap for fully disjoint scenes.
double covered_fraction(const Grid& shape, const Grid& occupied, bool strict) {
  std::int64_t area = 0, covered = 0;
  for (int r = 0; r < shape.h; ++r) {
    for (int c = 0; c < shape.w; ++c) {
      if (!shape.at(r, c)) continue;
      ++area;
      bool hit = occupied.at(r, c) != 0;
      if (!hit && strict) {
        for (int dr = -1; dr <= 1 && !hit; ++dr) {
          for (int dc = -1; dc <= 1 && !hit; ++dc) {
            const int rr = r + dr, cc = c + dc;
            if (rr < 0 || rr >= shape.h || cc < 0 || cc >= shape.w) continue;
            hit = occupied.at(rr, cc) != 0;
          }
        }
      }
      covered += hit;
    }
  }
  if (area == 0) return 1.0;
  return static_cast<double>(covered) / static_cast<double>(area);
}

struct Placement {
  Grid shape{1, 1};
  double cover = 0.0;
  bool valid = false;
};

// Picks the candidate whose covered fraction best matches the occlusion
// target. Odd-numbered tries anchor near an existing instance so overlapping
// candidates exist even in sparse scenes.
Placement place_instance(const SceneConfig& cfg, const Grid& occupied,
                         const std::vector<std::pair<double, double>>& centers,
                         std::uint64_t scene_key, int attempt, int instance) {
  const double r_max = std::max(4.0, std::min(cfg.image_height,
                                              cfg.image_width) / 6.0);
  const double r_min = std::max(3.0, r_max / 2.0);
  const bool disjoint = cfg.occlusion_level <= 0.0;

  Placement best;
  double best_gap = 2.0;
  for (int t = 0; t < kPlacementTries; ++t) {
    StreamRng rng(cfg.seed,
                  {scene_key, static_cast<std::uint64_t>(attempt),
                   static_cast<std::uint64_t>(instance),
                   static_cast<std::uint64_t>(t), kTagShape});
    const double ra = r_min + (r_max - r_min) * rng.next_unit();
    const double rb = r_min + (r_max - r_min) * rng.next_unit();
    double cr, cc;
    const bool anchored = !disjoint && (t % 2 == 1) && !centers.empty();
    if (anchored) {
      const auto& anchor = centers[rng.next_int(
          0, static_cast<int>(centers.size()) - 1)];
      cr = anchor.first + (2.0 * rng.next_unit() - 1.0) * 2.0 * ra;
      cc = anchor.second + (2.0 * rng.next_unit() - 1.0) * 2.0 * rb;
    } else {
      cr = rng.next_unit() * (cfg.image_height - 1);
      cc = rng.next_unit() * (cfg.image_width - 1);
    }
    Grid shape =
        rasterize_shape(cfg, cr, cc, ra, rb, cfg.shape_family, rng);
    if (shape.area() < kMinShapeArea) continue;
    const double cover = covered_fraction(shape, occupied, disjoint);
    if (disjoint && cover > 0.0) continue;
    const double gap = std::abs(cover - cfg.occlusion_level);
    if (gap < best_gap) {
      best_gap = gap;
      best.shape = std::move(shape);
      best.cover = cover;
      best.valid = true;
      if (gap <= 0.05) break;
    }
  }
  return best;
}

SoftMask to_mask(const Grid& g) {
  std::vector<double> values(g.cells.begin(), g.cells.end());
  return SoftMask(g.h, g.w, std::move(values));
}

std::vector<std::uint8_t> boundary_band(const SoftMask& m) {
  const int h = m.height(), w = m.width();
  std::vector<std::uint8_t> band(static_cast<std::size_t>(h) * w, 0);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const bool fg = m.at(r, c) >= 0.5;
      bool mixed = false;
      for (int dr = -kBoundaryBand; dr <= kBoundaryBand && !mixed; ++dr) {
        for (int dc = -kBoundaryBand; dc <= kBoundaryBand && !mixed; ++dc) {
          const int rr = r + dr, cc = c + dc;
          if (rr < 0 || rr >= h || cc < 0 || cc >= w) continue;
          mixed = (m.at(rr, cc) >= 0.5) != fg;
        }
      }
      band[static_cast<std::size_t>(r) * w + c] = mixed ? 1 : 0;
    }
  }
  return band;
}

// Flips boundary-band pixels with a per-instance jittered probability whose
// expectation equals `noise`. Returns the original mask if the perturbed
// one would be empty.
SoftMask perturb_mask(const SoftMask& gt_mask, double noise, StreamRng rng) {
  if (noise <= 0.0) return gt_mask;
  const auto band = boundary_band(gt_mask);
  const double flip_p = std::clamp(noise * 2.0 * rng.next_unit(), 0.0, 1.0);
  SoftMask out = gt_mask;
  for (int r = 0; r < out.height(); ++r) {
    for (int c = 0; c < out.width(); ++c) {
      if (!band[static_cast<std::size_t>(r) * out.width() + c]) continue;
      if (rng.next_unit() < flip_p) {
        out.set(r, c, out.at(r, c) >= 0.5 ? 0.0 : 1.0);
      }
    }
  }
  if (foreground_count(out, 0.5) == 0) return gt_mask;
  return out;
}

struct FgPixel {
  int row = -1;
  int col = -1;
  bool found = false;
};

FgPixel nearest_foreground(const SoftMask& m, double row, double col) {
  FgPixel best;
  double best_d2 = 0.0;
  for (int r = 0; r < m.height(); ++r) {
    for (int c = 0; c < m.width(); ++c) {
      if (m.at(r, c) < 0.5) continue;
      const double d2 = (r - row) * (r - row) + (c - col) * (c - col);
      if (!best.found || d2 < best_d2) {
        best = {r, c, true};
        best_d2 = d2;
      }
    }
  }
  return best;
}

// Index into `levels` (sorted by id) of the stride best suiting an
// instance of the given area; closest id wins, smaller on ties.
std::size_t preferred_level_index(const std::vector<LevelSpec>& levels,
                                  double area, int rotation) {
  const double extent = std::sqrt(std::max(area, 1.0));
  const int ideal =
      std::clamp(static_cast<int>(std::lround(std::log2(extent))), 3, 7);
  std::size_t best_index = 0;
  int best_gap = 1 << 20;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const int gap = std::abs(levels[i].level_id - ideal);
    if (gap < best_gap) {
      best_gap = gap;
      best_index = i;
    }
  }
  return (best_index + static_cast<std::size_t>(rotation)) % levels.size();
}

}  // namespace

std::vector<GroundTruth> generate_scene(const SceneConfig& cfg, int index,
                                        SceneStats* stats) {
  if (cfg.image_height < 8 || cfg.image_width < 8 || cfg.min_instances < 1 ||
      cfg.max_instances < cfg.min_instances || cfg.categories < 1 ||
      cfg.occlusion_level < 0.0 || cfg.occlusion_level > 1.0) {
    throw GenerationError("invalid scene config");
  }
  const auto scene_key = static_cast<std::uint64_t>(index);

  for (int attempt = 0; attempt < kSceneAttempts; ++attempt) {
    StreamRng count_rng(cfg.seed, {scene_key,
                                   static_cast<std::uint64_t>(attempt),
                                   kTagCount});
    const int n = count_rng.next_int(cfg.min_instances, cfg.max_instances);

    Grid occupied(cfg.image_height, cfg.image_width);
    std::vector<Grid> shapes;
    std::vector<std::pair<double, double>> centers;
    double overlap_sum = 0.0;
    int overlap_samples = 0;
    bool ok = true;
    for (int i = 0; i < n && ok; ++i) {
      Placement placed =
          place_instance(cfg, occupied, centers, scene_key, attempt, i);
      if (!placed.valid) {
        ok = false;
        break;
      }
      if (i > 0) {
        overlap_sum += placed.cover;
        ++overlap_samples;
      }
      double cr = 0.0, cc = 0.0;
      std::int64_t area = 0;
      for (int r = 0; r < placed.shape.h; ++r) {
        for (int c = 0; c < placed.shape.w; ++c) {
          if (!placed.shape.at(r, c)) continue;
          occupied.set(r, c, 1);
          cr += r;
          cc += c;
          ++area;
        }
      }
      centers.emplace_back(cr / area, cc / area);
      shapes.push_back(std::move(placed.shape));
    }
    if (!ok) continue;

    // Later instances occlude earlier ones.
    for (int i = 0; i < n && ok; ++i) {
      for (int j = i + 1; j < n; ++j) {
        for (int r = 0; r < shapes[i].h; ++r) {
          for (int c = 0; c < shapes[i].w; ++c) {
            if (shapes[j].at(r, c)) shapes[i].set(r, c, 0);
          }
        }
      }
      if (shapes[i].area() < kMinSurvivingArea) ok = false;
    }
    if (!ok) continue;

    std::vector<GroundTruth> gts;
    gts.reserve(n);
    for (int i = 0; i < n; ++i) {
      StreamRng cat_rng(cfg.seed, {scene_key,
                                   static_cast<std::uint64_t>(attempt),
                                   static_cast<std::uint64_t>(i),
                                   kTagCategory});
      gts.push_back(
          {cat_rng.next_int(0, cfg.categories - 1), to_mask(shapes[i])});
    }
    if (stats) {
      stats->mean_overlap =
          overlap_samples > 0 ? overlap_sum / overlap_samples : 0.0;
      stats->overlap_samples = overlap_samples;
      stats->attempts = attempt + 1;
    }
    return gts;
  }
  throw GenerationError("could not place " +
                        std::to_string(cfg.max_instances) +
                        " instances at occlusion level " +
                        std::to_string(cfg.occlusion_level));
}

std::vector<ScoredPrediction> synthesize_predictions(
    std::span<const GroundTruth> gts, const PredictorModel& model,
    std::span<const LevelSpec> levels, std::uint64_t seed) {
  if (levels.empty()) {
    throw GenerationError("at least one pyramid level is required");
  }
  if (model.kind == PredictorKind::kRedundant &&
      model.duplicates_per_instance < 2) {
    throw GenerationError(
        "redundant predictor needs duplicates_per_instance >= 2");
  }
  std::vector<LevelSpec> level_list(levels.begin(), levels.end());
  std::sort(level_list.begin(), level_list.end(),
            [](const LevelSpec& a, const LevelSpec& b) {
              return a.level_id < b.level_id;
            });
  const int copies = model.kind == PredictorKind::kRedundant
                         ? model.duplicates_per_instance
                         : 1;
  const double radius_multiplier = OyorConfig{}.center_radius_multiplier;
  const double rho =
      std::clamp(model.cls_quality_correlation, -1.0, 1.0);
  int num_categories = 1;
  for (const auto& gt : gts) {
    num_categories = std::max(num_categories, gt.category + 1);
  }
  MaskOpsConfig mcfg;

  std::vector<ScoredPrediction> out;
  for (std::size_t gi = 0; gi < gts.size(); ++gi) {
    const GroundTruth& gt = gts[gi];
    const Centroid center = centroid(gt.mask);
    const double area = static_cast<double>(foreground_count(gt.mask, 0.5));
    const FgPixel anchor = nearest_foreground(gt.mask, center.row, center.col);

    for (int d = 0; d < copies; ++d) {
      const std::uint64_t gkey = static_cast<std::uint64_t>(gi);
      const std::uint64_t dkey = static_cast<std::uint64_t>(d);
      SoftMask pmask =
          perturb_mask(gt.mask, model.mask_noise,
                       StreamRng(seed, {gkey, dkey, kTagMaskNoise}));
      const double true_iou = iou(pmask, gt.mask, mcfg);

      std::size_t li = preferred_level_index(level_list, area, d);
      // Location: the centroid-adjacent foreground pixel, or for redundant
      // copies a random foreground pixel inside the center region.
      int loc_r = anchor.row, loc_c = anchor.col;
      if (model.kind == PredictorKind::kRedundant && d > 0) {
        StreamRng loc_rng(seed, {gkey, dkey, kTagLocation});
        const double radius = radius_multiplier * level_list[li].stride();
        const int reach = static_cast<int>(std::floor(radius));
        for (int t = 0; t < 60; ++t) {
          const int r = static_cast<int>(std::lround(center.row)) +
                        loc_rng.next_int(-reach, reach);
          const int c = static_cast<int>(std::lround(center.col)) +
                        loc_rng.next_int(-reach, reach);
          if (r < 0 || r >= gt.mask.height() || c < 0 ||
              c >= gt.mask.width()) {
            continue;
          }
          if (gt.mask.at(r, c) < 0.5) continue;
          if (std::abs(r - center.row) > radius ||
              std::abs(c - center.col) > radius) {
            continue;
          }
          loc_r = r;
          loc_c = c;
          break;
        }
      }
      // Escalate to a wider stride if the pixel sits outside this level's
      // center region (possible for strongly occluded, off-center masks).
      const double offset = std::max(std::abs(loc_r - center.row),
                                     std::abs(loc_c - center.col));
      while (li + 1 < level_list.size() &&
             offset > radius_multiplier * level_list[li].stride()) {
        ++li;
      }
      const LevelSpec level = level_list[li];

      StreamRng score_rng(seed, {gkey, dkey, kTagScore});
      double score;
      if (model.kind == PredictorKind::kMisaligned) {
        const double noise_span = std::clamp(model.score_noise, 0.0, 1.0);
        const double noise = noise_span * (2.0 * score_rng.next_unit() - 1.0);
        score = 0.5 + rho * (true_iou - 0.5) +
                std::sqrt(std::max(0.0, 1.0 - rho * rho)) * noise;
      } else {
        // Duplicates share their instance's base evidence; only the jitter
        // is per copy.
        StreamRng base_rng(seed, {gkey, kTagScore});
        const double base = 0.55 + 0.4 * base_rng.next_unit();
        score = base + model.score_noise * (score_rng.next_unit() - 0.5);
      }
      score = std::clamp(score, 1e-3, 1.0 - 1e-3);

      std::vector<double> class_scores(num_categories, 0.0);
      StreamRng off_rng(seed, {gkey, dkey, kTagOffScores});
      for (int c = 0; c < num_categories; ++c) {
        class_scores[c] = 0.02 * off_rng.next_unit();
      }
      class_scores[gt.category] = score;

      Prediction pred{ImagePoint{static_cast<double>(loc_r),
                                 static_cast<double>(loc_c)},
                      level, std::move(class_scores), std::move(pmask),
                      true_iou};
      out.push_back({std::move(pred), gt.category, score});
    }
  }
  return out;
}

}  // namespace uniinst
