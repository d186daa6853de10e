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
#ifndef POLARCV_IMAGE_HPP
#define POLARCV_IMAGE_HPP

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <vector>

#include "polarcv/errors.hpp"

namespace polarcv {

// Row-major single-channel raster. Pixel (x, y) with x along the row,
// y down the image.
template <typename T>
class Image {
 public:
  Image() = default;
  Image(int width, int height, T fill = T{})
      : width_(width), height_(height),
        data_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill) {
    if (width < 0 || height < 0) throw InvalidInputError("negative image dimensions");
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& operator()(int x, int y) {
    assert(in_bounds(x, y));
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }
  const T& operator()(int x, int y) const {
    assert(in_bounds(x, y));
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }

  T& at(int x, int y) {
    if (!in_bounds(x, y)) throw InvalidInputError("pixel access out of bounds");
    return (*this)(x, y);
  }
  const T& at(int x, int y) const {
    if (!in_bounds(x, y)) throw InvalidInputError("pixel access out of bounds");
    return (*this)(x, y);
  }

  bool in_bounds(int x, int y) const {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }
  template <typename U>
  bool same_size(const Image<U>& other) const {
    return width_ == other.width() && height_ == other.height();
  }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  std::vector<T>& pixels() { return data_; }
  const std::vector<T>& pixels() const { return data_; }

  auto begin() { return data_.begin(); }
  auto end() { return data_.end(); }
  auto begin() const { return data_.begin(); }
  auto end() const { return data_.end(); }

  void fill(T value) { std::fill(data_.begin(), data_.end(), value); }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

using ScalarField = Image<double>;
using MaskImage = Image<std::uint8_t>;

// Serial reduction; summation order is fixed (row-major) so results do not
// depend on thread count.
inline double field_sum(const ScalarField& f) {
  double s = 0.0;
  for (double v : f) s += v;
  return s;
}

inline double field_mean(const ScalarField& f) {
  if (f.empty()) throw InvalidInputError("mean of empty field");
  return field_sum(f) / static_cast<double>(f.size());
}

inline double field_min(const ScalarField& f) {
  if (f.empty()) throw InvalidInputError("min of empty field");
  return *std::min_element(f.begin(), f.end());
}

inline double field_max(const ScalarField& f) {
  if (f.empty()) throw InvalidInputError("max of empty field");
  return *std::max_element(f.begin(), f.end());
}

inline std::int64_t mask_count(const MaskImage& m) {
  std::int64_t n = 0;
  for (auto v : m) n += (v != 0);
  return n;
}

// Mean of `f` over the nonzero pixels of `mask`; 0 when the mask is empty.
inline double masked_mean(const ScalarField& f, const MaskImage& mask) {
  if (!f.same_size(mask)) throw InvalidInputError("masked_mean: size mismatch");
  double s = 0.0;
  std::int64_t n = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (mask.pixels()[i]) {
      s += f.pixels()[i];
      ++n;
    }
  }
  return n > 0 ? s / static_cast<double>(n) : 0.0;
}

// Bilinear sample with taps clamped to the frame. Returns false when (x, y)
// lies outside [0, w-1] x [0, h-1]. Coordinates within 1e-9 of an integer
// grid point are snapped so that an identity warp resamples bit-exactly.
inline bool bilinear_sample(const ScalarField& img, double x, double y, double* out) {
  const int w = img.width(), h = img.height();
  if (!(x >= 0.0 && y >= 0.0 && x <= w - 1.0 && y <= h - 1.0)) return false;
  const double rx = std::round(x), ry = std::round(y);
  if (std::abs(x - rx) < 1e-9) x = rx;
  if (std::abs(y - ry) < 1e-9) y = ry;
  int x0 = static_cast<int>(std::floor(x));
  int y0 = static_cast<int>(std::floor(y));
  const double fx = x - x0, fy = y - y0;
  x0 = std::clamp(x0, 0, w - 1);
  y0 = std::clamp(y0, 0, h - 1);
  const int x1 = std::min(x0 + 1, w - 1);
  const int y1 = std::min(y0 + 1, h - 1);
  const double v00 = img(x0, y0), v10 = img(x1, y0);
  const double v01 = img(x0, y1), v11 = img(x1, y1);
  *out = (1.0 - fy) * ((1.0 - fx) * v00 + fx * v10) + fy * ((1.0 - fx) * v01 + fx * v11);
  return true;
}

// Angular distance between two orientations, both pi-periodic.
inline double angle_distance_mod_pi(double a, double b) {
  constexpr double kPi = 3.14159265358979323846;
  double d = std::fmod(std::abs(a - b), kPi);
  return std::min(d, kPi - d);
}

// Fold an arbitrary angle into [0, pi).
inline double fold_angle_to_pi(double a) {
  constexpr double kPi = 3.14159265358979323846;
  double r = std::fmod(a, kPi);
  if (r < 0.0) r += kPi;
  if (r >= kPi) r = 0.0;
  return r;
}

}  // namespace polarcv

#endif  // POLARCV_IMAGE_HPP
