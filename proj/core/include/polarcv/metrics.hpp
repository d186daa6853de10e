/**********
 *   Copyright 2026 The polarcv authors
 *
 *   Licensed under the Apache License, Version 2.0 (the "License");
 *   you may not use this file except in compliance with the License.
 *   You may obtain a copy of the License at
 *
 *       http://www.apache.org/licenses/LICENSE-2.0
 *
 *   Unless required by applicable law or agreed to in writing, software
 *   distributed under the License is distributed on an "AS IS" BASIS,
 *   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 *   See the License for the specific language governing permissions and
 *   limitations under the License.
\**********/
#ifndef POLARCV_METRICS_HPP
#define POLARCV_METRICS_HPP

#include <array>
#include <cstdint>
#include <string>

#include "polarcv/image.hpp"

namespace polarcv {

struct DepthMetrics {
  double abs_rel = 0.0;   // mean |p - g| / g
  double sq_rel = 0.0;    // mean (p - g)^2 / g
  double rmse = 0.0;      // sqrt(mean (p - g)^2)
  double rmse_log = 0.0;  // sqrt(mean (ln p - ln g)^2)
  double delta1 = 0.0, delta2 = 0.0, delta3 = 0.0;  // ratio < 1.25^k, strict
  std::int64_t count = 0;
};

// Standard monocular-depth error metrics over the masked pixels. The delta
// thresholds use strict inequality: a uniform 1.25x scaling scores
// delta1 = 0 by convention.
DepthMetrics depth_metrics(const ScalarField& pred, const ScalarField& gt,
                           const MaskImage& mask);

enum class RegionKind { kRaw, kCropped, kSpecular };
RegionKind region_kind_from_string(const std::string& name);
std::string region_kind_name(RegionKind kind);

// raw: every valid pixel. cropped: raw minus a border band of
// floor(crop_fraction * dimension) pixels per side. specular: rho > rho_min.
// `validity` (optional) restricts all kinds; `rho` is required for the
// specular kind.
MaskImage region_mask(RegionKind kind, int width, int height,
                      const ScalarField* rho = nullptr, double rho_min = 0.4,
                      double crop_fraction = 0.15, const MaskImage* validity = nullptr);

// Segmentation label set; labels on disk are these indices in an 8-bit map.
enum class SegClass : std::uint8_t {
  kSky = 0,
  kWater,
  kWindows,
  kRoad,
  kCars,
  kBuilding,
  kNone
};
inline constexpr int kNumSegClasses = 7;
const char* seg_class_name(SegClass c);

struct SegClassMetrics {
  bool present = false;  // class appears in pred or gt
  double accuracy = 0.0;  // correct pixels of the class / gt pixels of the class
  double iou = 0.0;       // TP / (TP + FP + FN)
  double recall = 0.0;    // TP / (TP + FN)
};

struct SegMetrics {
  std::array<SegClassMetrics, kNumSegClasses> per_class{};
  double mean_accuracy = 0.0, mean_iou = 0.0, mean_recall = 0.0;
  // Means excluding the building class.
  double mean_accuracy_excl_building = 0.0;
  double mean_iou_excl_building = 0.0;
  double mean_recall_excl_building = 0.0;
};

// Per-class accuracy here is the recall-style "correct pixels of the class
// over ground-truth pixels of the class"; classes absent from both maps are
// excluded from the means.
SegMetrics seg_metrics(const Image<std::uint8_t>& pred, const Image<std::uint8_t>& gt);

}  // namespace polarcv

#endif  // POLARCV_METRICS_HPP
