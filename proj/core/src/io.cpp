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
#include "polarcv/io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace polarcv {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.string().c_str(), mode));
  if (!f) throw InvalidInputError("cannot open file: " + path.string());
  return f;
}

// ---- PGM ----

int pgm_next_value(std::istream& is) {
  // Skips whitespace and # comments.
  while (is) {
    int c = is.peek();
    if (c == '#') {
      std::string line;
      std::getline(is, line);
    } else if (std::isspace(c)) {
      is.get();
    } else {
      break;
    }
  }
  int v = -1;
  is >> v;
  if (!is) throw InvalidInputError("truncated PGM header");
  return v;
}

GrayImageFile read_pgm(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InvalidInputError("cannot open file: " + path.string());
  char m0 = 0, m1 = 0;
  is.get(m0).get(m1);
  const bool binary = (m1 == '5');
  if (m0 != 'P' || (m1 != '2' && m1 != '5'))
    throw InvalidInputError("not a PGM file: " + path.string());
  const int w = pgm_next_value(is);
  const int h = pgm_next_value(is);
  const int maxval = pgm_next_value(is);
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535)
    throw InvalidInputError("bad PGM header in " + path.string());
  GrayImageFile out;
  out.bit_depth = maxval > 255 ? 16 : 8;
  out.pixels = Image<std::uint16_t>(w, h);
  if (binary) {
    is.get();  // single whitespace after maxval
    const int bytes = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> row(static_cast<std::size_t>(w) * bytes);
    for (int y = 0; y < h; ++y) {
      is.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size()));
      if (!is) throw InvalidInputError("truncated PGM data in " + path.string());
      for (int x = 0; x < w; ++x) {
        // Binary PGM samples are big-endian.
        out.pixels(x, y) = bytes == 2
                               ? static_cast<std::uint16_t>((row[2 * x] << 8) | row[2 * x + 1])
                               : row[x];
      }
    }
  } else {
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const int v = pgm_next_value(is);
        if (v < 0 || v > maxval) throw InvalidInputError("PGM sample out of range");
        out.pixels(x, y) = static_cast<std::uint16_t>(v);
      }
  }
  return out;
}

// ---- PNG ----

[[noreturn]] void png_error_fn(png_structp png, png_const_charp msg) {
  (void)png;
  throw InvalidInputError(std::string("libpng: ") + msg);
}

void png_warn_fn(png_structp, png_const_charp) {}

GrayImageFile read_png_gray(const std::filesystem::path& path) {
  FilePtr fp = open_file(path, "rb");
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_fn, png_warn_fn);
  if (!png) throw InvalidInputError("png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw InvalidInputError("png_create_info_struct failed");
  }
  try {
    png_init_io(png, fp.get());
    png_read_info(png, info);
    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);
    const int color = png_get_color_type(png, info);
    int depth = png_get_bit_depth(png, info);
    if (color != PNG_COLOR_TYPE_GRAY)
      throw InvalidInputError("expected single-channel grayscale PNG: " + path.string());
    if (depth < 8) {
      png_set_expand_gray_1_2_4_to_8(png);
      depth = 8;
    }
    if (depth == 16 && std::endian::native == std::endian::little) png_set_swap(png);
    png_read_update_info(png, info);

    GrayImageFile out;
    out.bit_depth = depth;
    out.pixels = Image<std::uint16_t>(static_cast<int>(w), static_cast<int>(h));
    std::vector<unsigned char> row(png_get_rowbytes(png, info));
    for (png_uint_32 y = 0; y < h; ++y) {
      png_read_row(png, row.data(), nullptr);
      for (png_uint_32 x = 0; x < w; ++x) {
        std::uint16_t v;
        if (depth == 16) {
          std::memcpy(&v, row.data() + 2 * x, 2);
        } else {
          v = row[x];
        }
        out.pixels(static_cast<int>(x), static_cast<int>(y)) = v;
      }
    }
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return out;
  } catch (...) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw;
  }
}

class PngWriter {
 public:
  PngWriter(const std::filesystem::path& path, int width, int height, int bit_depth,
            int color_type)
      : fp_(open_file(path, "wb")) {
    png_ = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_fn,
                                   png_warn_fn);
    if (!png_) throw InvalidInputError("png_create_write_struct failed");
    info_ = png_create_info_struct(png_);
    if (!info_) {
      png_destroy_write_struct(&png_, nullptr);
      throw InvalidInputError("png_create_info_struct failed");
    }
    png_init_io(png_, fp_.get());
    png_set_IHDR(png_, info_, width, height, bit_depth, color_type,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png_, info_);
    if (bit_depth == 16 && std::endian::native == std::endian::little)
      png_set_swap(png_);
  }
  ~PngWriter() {
    if (png_) png_destroy_write_struct(&png_, &info_);
  }
  void write_row(png_bytep row) { png_write_row(png_, row); }
  void finish() { png_write_end(png_, nullptr); }

 private:
  FilePtr fp_;
  png_structp png_ = nullptr;
  png_infop info_ = nullptr;
};

}  // namespace

GrayImageFile read_gray(const std::filesystem::path& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw InvalidInputError("cannot open file: " + path.string());
  unsigned char magic[2] = {0, 0};
  probe.read(reinterpret_cast<char*>(magic), 2);
  probe.close();
  if (magic[0] == 'P' && (magic[1] == '2' || magic[1] == '5')) return read_pgm(path);
  if (magic[0] == 0x89 && magic[1] == 'P') return read_png_gray(path);
  throw InvalidInputError("unrecognized grayscale container (expected PGM or PNG): " +
                          path.string());
}

void write_png_gray16(const std::filesystem::path& path, const Image<std::uint16_t>& img) {
  PngWriter w(path, img.width(), img.height(), 16, PNG_COLOR_TYPE_GRAY);
  std::vector<std::uint16_t> row(img.width());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) row[x] = img(x, y);
    w.write_row(reinterpret_cast<png_bytep>(row.data()));
  }
  w.finish();
}

void write_png_gray8(const std::filesystem::path& path, const Image<std::uint8_t>& img) {
  PngWriter w(path, img.width(), img.height(), 8, PNG_COLOR_TYPE_GRAY);
  std::vector<std::uint8_t> row(img.width());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) row[x] = img(x, y);
    w.write_row(row.data());
  }
  w.finish();
}

void write_png_rgb8(const std::filesystem::path& path, const RgbImage& img) {
  if (!img.r.same_size(img.g) || !img.r.same_size(img.b))
    throw InvalidInputError("RGB planes differ in size");
  PngWriter w(path, img.width(), img.height(), 8, PNG_COLOR_TYPE_RGB);
  std::vector<std::uint8_t> row(static_cast<std::size_t>(img.width()) * 3);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      row[3 * x + 0] = img.r(x, y);
      row[3 * x + 1] = img.g(x, y);
      row[3 * x + 2] = img.b(x, y);
    }
    w.write_row(row.data());
  }
  w.finish();
}

// ---- PFM ----

ScalarField read_pfm(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InvalidInputError("cannot open file: " + path.string());
  std::string magic;
  is >> magic;
  if (magic != "Pf") throw InvalidInputError("not a single-channel PFM: " + path.string());
  int w = 0, h = 0;
  double scale = 0.0;
  is >> w >> h >> scale;
  is.get();  // newline before data
  if (w <= 0 || h <= 0 || scale == 0.0)
    throw InvalidInputError("bad PFM header in " + path.string());
  const bool little_endian = scale < 0.0;
  ScalarField out(w, h);
  std::vector<float> row(w);
  // PFM stores rows bottom-up.
  for (int y = h - 1; y >= 0; --y) {
    is.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(sizeof(float) * row.size()));
    if (!is) throw InvalidInputError("truncated PFM data in " + path.string());
    for (int x = 0; x < w; ++x) {
      float v = row[x];
      if (little_endian != (std::endian::native == std::endian::little)) {
        auto* b = reinterpret_cast<unsigned char*>(&v);
        std::swap(b[0], b[3]);
        std::swap(b[1], b[2]);
      }
      out(x, y) = v;
    }
  }
  return out;
}

void write_pfm(const std::filesystem::path& path, const ScalarField& field) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InvalidInputError("cannot open file for writing: " + path.string());
  os << "Pf\n" << field.width() << " " << field.height() << "\n-1.0\n";
  std::vector<float> row(field.width());
  for (int y = field.height() - 1; y >= 0; --y) {
    for (int x = 0; x < field.width(); ++x) row[x] = static_cast<float>(field(x, y));
    os.write(reinterpret_cast<const char*>(row.data()),
             static_cast<std::streamsize>(sizeof(float) * row.size()));
  }
  if (!os) throw InvalidInputError("failed writing PFM: " + path.string());
}

ScalarField to_unit_field(const GrayImageFile& file) {
  ScalarField out(file.pixels.width(), file.pixels.height());
  const double fs = file.full_scale();
  for (int y = 0; y < out.height(); ++y)
    for (int x = 0; x < out.width(); ++x) out(x, y) = file.pixels(x, y) / fs;
  return out;
}

namespace enc {

namespace {
std::uint16_t quantize01(double v) {
  v = std::clamp(v, 0.0, 1.0);
  return static_cast<std::uint16_t>(std::lround(v * 65535.0));
}
}  // namespace

std::uint16_t unit_to_u16(double v) { return quantize01(v); }
double u16_to_unit(std::uint16_t v) { return v / 65535.0; }

std::uint16_t iota_to_u16(double v) { return quantize01(v / 2.0); }
double u16_to_iota(std::uint16_t v) { return 2.0 * v / 65535.0; }

std::uint16_t stokes_to_u16(double v) { return quantize01((v + 2.0) / 4.0); }
double u16_to_stokes(std::uint16_t v) { return 4.0 * v / 65535.0 - 2.0; }

std::uint16_t alpha_to_u16(double v) { return quantize01(fold_angle_to_pi(v) / kPi); }
double u16_to_alpha(std::uint16_t v) {
  const double a = v * kPi / 65535.0;
  return a >= kPi ? 0.0 : a;
}

std::uint16_t rho_to_u16(double v) { return quantize01(v); }
double u16_to_rho(std::uint16_t v) { return v / 65535.0; }

std::uint16_t depth_to_u16(double v, double full_scale) {
  if (!(full_scale > 0.0)) throw InvalidInputError("depth full scale must be positive");
  return quantize01(v / full_scale);
}
double u16_to_depth(std::uint16_t v, double full_scale) {
  return full_scale * v / 65535.0;
}

Image<std::uint16_t> encode(const ScalarField& f, std::uint16_t (*fn)(double)) {
  Image<std::uint16_t> out(f.width(), f.height());
  for (int y = 0; y < f.height(); ++y)
    for (int x = 0; x < f.width(); ++x) out(x, y) = fn(f(x, y));
  return out;
}

ScalarField decode(const Image<std::uint16_t>& img, double (*fn)(std::uint16_t)) {
  ScalarField out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) out(x, y) = fn(img(x, y));
  return out;
}

}  // namespace enc

MosaicLayout read_layout_sidecar(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw InvalidInputError("cannot open layout sidecar: " + path.string());
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInputError("unparsable layout sidecar " + path.string() + ": " + e.what());
  }
  if (!j.contains("layout"))
    throw InvalidLayoutError("layout sidecar missing 'layout' key: " + path.string());
  const auto& l = j["layout"];
  if (l.is_string()) return MosaicLayout::parse(l.get<std::string>());
  if (l.is_array()) {
    std::ostringstream os;
    bool first = true;
    // Accepts [90,45,135,0] or [[90,45],[135,0]].
    for (const auto& e : l) {
      if (e.is_array()) {
        for (const auto& f : e) {
          if (!first) os << ',';
          os << f.get<int>();
          first = false;
        }
      } else {
        if (!first) os << ',';
        os << e.get<int>();
        first = false;
      }
    }
    return MosaicLayout::parse(os.str());
  }
  throw InvalidLayoutError("layout sidecar 'layout' must be a string or array");
}

void CsvWriter::add_row(std::vector<std::string> row) {
  if (row.size() != header_.size())
    throw InvalidInputError("CSV row width does not match header");
  rows_.push_back(std::move(row));
}

void CsvWriter::write(const std::filesystem::path& path) const {
  std::ofstream os(path);
  if (!os) throw InvalidInputError("cannot open file for writing: " + path.string());
  for (std::size_t i = 0; i < header_.size(); ++i)
    os << (i ? "," : "") << header_[i];
  os << "\n";
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << "\n";
  }
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace polarcv
