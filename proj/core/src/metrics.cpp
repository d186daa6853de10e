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
#include "polarcv/metrics.hpp"

#include <cmath>

namespace polarcv {

DepthMetrics depth_metrics(const ScalarField& pred, const ScalarField& gt,
                           const MaskImage& mask) {
  if (!pred.same_size(gt) || !pred.same_size(mask))
    throw InvalidInputError("depth_metrics: size mismatch");
  DepthMetrics m;
  double abs_rel = 0.0, sq_rel = 0.0, sq = 0.0, sq_log = 0.0;
  std::int64_t d1 = 0, d2 = 0, d3 = 0;
  const double t1 = 1.25, t2 = 1.25 * 1.25, t3 = 1.25 * 1.25 * 1.25;
  for (int y = 0; y < pred.height(); ++y) {
    for (int x = 0; x < pred.width(); ++x) {
      if (!mask(x, y)) continue;
      const double p = pred(x, y), g = gt(x, y);
      if (!(g > 0.0)) throw InvalidInputError("depth_metrics: non-positive ground truth");
      if (!(p > 0.0)) throw InvalidInputError("depth_metrics: non-positive prediction");
      const double e = p - g;
      abs_rel += std::abs(e) / g;
      sq_rel += e * e / g;
      sq += e * e;
      const double le = std::log(p) - std::log(g);
      sq_log += le * le;
      const double ratio = std::max(p / g, g / p);
      d1 += ratio < t1;
      d2 += ratio < t2;
      d3 += ratio < t3;
      ++m.count;
    }
  }
  if (m.count == 0) throw InvalidInputError("depth_metrics: empty mask");
  const double n = static_cast<double>(m.count);
  m.abs_rel = abs_rel / n;
  m.sq_rel = sq_rel / n;
  m.rmse = std::sqrt(sq / n);
  m.rmse_log = std::sqrt(sq_log / n);
  m.delta1 = d1 / n;
  m.delta2 = d2 / n;
  m.delta3 = d3 / n;
  return m;
}

RegionKind region_kind_from_string(const std::string& name) {
  if (name == "raw") return RegionKind::kRaw;
  if (name == "cropped") return RegionKind::kCropped;
  if (name == "specular") return RegionKind::kSpecular;
  throw InvalidInputError("unknown region kind: " + name);
}

std::string region_kind_name(RegionKind kind) {
  switch (kind) {
    case RegionKind::kRaw: return "raw";
    case RegionKind::kCropped: return "cropped";
    case RegionKind::kSpecular: return "specular";
  }
  throw InvalidInputError("bad region kind");
}

MaskImage region_mask(RegionKind kind, int width, int height, const ScalarField* rho,
                      double rho_min, double crop_fraction, const MaskImage* validity) {
  if (width <= 0 || height <= 0) throw InvalidInputError("region_mask: empty dims");
  if (validity && (validity->width() != width || validity->height() != height))
    throw InvalidInputError("region_mask: validity size mismatch");
  MaskImage mask(width, height);
  auto valid_at = [&](int x, int y) {
    return validity ? (*validity)(x, y) != 0 : true;
  };
  switch (kind) {
    case RegionKind::kRaw: {
      for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) mask(x, y) = valid_at(x, y) ? 1 : 0;
      break;
    }
    case RegionKind::kCropped: {
      if (!(crop_fraction >= 0.0 && crop_fraction < 0.5))
        throw InvalidInputError("crop fraction outside [0, 0.5)");
      const int bx = static_cast<int>(std::floor(crop_fraction * width));
      const int by = static_cast<int>(std::floor(crop_fraction * height));
      for (int y = by; y < height - by; ++y)
        for (int x = bx; x < width - bx; ++x) mask(x, y) = valid_at(x, y) ? 1 : 0;
      break;
    }
    case RegionKind::kSpecular: {
      if (!rho) throw InvalidInputError("specular region needs a rho field");
      if (rho->width() != width || rho->height() != height)
        throw InvalidInputError("region_mask: rho size mismatch");
      for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
          mask(x, y) = (valid_at(x, y) && (*rho)(x, y) > rho_min) ? 1 : 0;
      break;
    }
  }
  return mask;
}

const char* seg_class_name(SegClass c) {
  switch (c) {
    case SegClass::kSky: return "sky";
    case SegClass::kWater: return "water";
    case SegClass::kWindows: return "windows";
    case SegClass::kRoad: return "road";
    case SegClass::kCars: return "cars";
    case SegClass::kBuilding: return "building";
    case SegClass::kNone: return "none";
  }
  throw InvalidInputError("bad segmentation class");
}

SegMetrics seg_metrics(const Image<std::uint8_t>& pred, const Image<std::uint8_t>& gt) {
  if (!pred.same_size(gt)) throw InvalidInputError("seg_metrics: size mismatch");
  if (pred.empty()) throw InvalidInputError("seg_metrics: empty maps");

  std::array<std::int64_t, kNumSegClasses> tp{}, fp{}, fn{};
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const int p = pred.pixels()[i], g = gt.pixels()[i];
    if (p >= kNumSegClasses || g >= kNumSegClasses)
      throw InvalidInputError("segmentation label out of range");
    if (p == g) {
      ++tp[p];
    } else {
      ++fp[p];
      ++fn[g];
    }
  }

  SegMetrics m;
  double sum_acc = 0.0, sum_iou = 0.0, sum_rec = 0.0;
  double sum_acc_xb = 0.0, sum_iou_xb = 0.0, sum_rec_xb = 0.0;
  int present = 0, present_xb = 0;
  for (int c = 0; c < kNumSegClasses; ++c) {
    SegClassMetrics& cm = m.per_class[c];
    const std::int64_t gt_pixels = tp[c] + fn[c];
    const std::int64_t union_pixels = tp[c] + fp[c] + fn[c];
    cm.present = union_pixels > 0;
    if (!cm.present) continue;
    cm.accuracy = gt_pixels > 0 ? static_cast<double>(tp[c]) / gt_pixels : 0.0;
    cm.recall = cm.accuracy;
    cm.iou = static_cast<double>(tp[c]) / union_pixels;
    sum_acc += cm.accuracy;
    sum_iou += cm.iou;
    sum_rec += cm.recall;
    ++present;
    if (c != static_cast<int>(SegClass::kBuilding)) {
      sum_acc_xb += cm.accuracy;
      sum_iou_xb += cm.iou;
      sum_rec_xb += cm.recall;
      ++present_xb;
    }
  }
  if (present > 0) {
    m.mean_accuracy = sum_acc / present;
    m.mean_iou = sum_iou / present;
    m.mean_recall = sum_rec / present;
  }
  if (present_xb > 0) {
    m.mean_accuracy_excl_building = sum_acc_xb / present_xb;
    m.mean_iou_excl_building = sum_iou_xb / present_xb;
    m.mean_recall_excl_building = sum_rec_xb / present_xb;
  }
  return m;
}

}  // namespace polarcv
