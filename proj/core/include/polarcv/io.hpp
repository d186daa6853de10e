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
#ifndef POLARCV_IO_HPP
#define POLARCV_IO_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "polarcv/hslmap.hpp"
#include "polarcv/image.hpp"
#include "polarcv/polarimage.hpp"

namespace polarcv {

// Grayscale raster as stored on disk: native integer samples plus the
// container bit depth (8 or 16).
struct GrayImageFile {
  Image<std::uint16_t> pixels;
  int bit_depth = 16;

  double full_scale() const { return bit_depth == 8 ? 255.0 : 65535.0; }
};

// Reads PGM (P2/P5) or PNG by sniffing the magic bytes. Only single-channel
// 8/16-bit contents are accepted.
GrayImageFile read_gray(const std::filesystem::path& path);

void write_png_gray16(const std::filesystem::path& path, const Image<std::uint16_t>& img);
void write_png_gray8(const std::filesystem::path& path, const Image<std::uint8_t>& img);
void write_png_rgb8(const std::filesystem::path& path, const RgbImage& img);

// Portable float map, single channel ("Pf"), little-endian, rows bottom-up.
// Lossless for float32; used wherever quantization would spoil a round trip.
ScalarField read_pfm(const std::filesystem::path& path);
void write_pfm(const std::filesystem::path& path, const ScalarField& field);

// Intensities are normalized to [0,1] at ingestion by dividing by the
// container's full scale, so downstream code never sees bit depths.
ScalarField to_unit_field(const GrayImageFile& file);

// Fixed 16-bit encodings used by every exported channel. All scalings are
// round-to-nearest:
//   P channels        v in [0,1]   -> v * 65535
//   S0, iota          v in [0,2]   -> v / 2 * 65535
//   S1, S2            v in [-2,2]  -> (v + 2) / 4 * 65535  (offset encoding)
//   alpha             v in [0,pi)  -> v * 65535 / pi
//   rho               v in [0,1]   -> v * 65535
//   depth             v in [0,fs]  -> v / fs * 65535, full scale fs recorded
//                                     by the caller (CLI default 20)
namespace enc {
std::uint16_t unit_to_u16(double v);
double u16_to_unit(std::uint16_t v);
std::uint16_t iota_to_u16(double v);
double u16_to_iota(std::uint16_t v);
std::uint16_t stokes_to_u16(double v);
double u16_to_stokes(std::uint16_t v);
std::uint16_t alpha_to_u16(double v);
double u16_to_alpha(std::uint16_t v);
std::uint16_t rho_to_u16(double v);
double u16_to_rho(std::uint16_t v);
std::uint16_t depth_to_u16(double v, double full_scale);
double u16_to_depth(std::uint16_t v, double full_scale);

Image<std::uint16_t> encode(const ScalarField& f, std::uint16_t (*fn)(double));
ScalarField decode(const Image<std::uint16_t>& img, double (*fn)(std::uint16_t));
}  // namespace enc

// Sidecar layout metadata: a JSON document {"layout": "90,45,135,0"} (or the
// same four entries as an array) next to the raw frame.
MosaicLayout read_layout_sidecar(const std::filesystem::path& path);

// Minimal CSV writer; fields are written verbatim, so callers quote
// themselves if they ever need commas.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}
  void add_row(std::vector<std::string> row);
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

std::string format_double(double v);

}  // namespace polarcv

#endif  // POLARCV_IO_HPP
