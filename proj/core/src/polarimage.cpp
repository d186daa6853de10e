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
#include "polarcv/polarimage.hpp"

#include <cmath>
#include <sstream>

namespace polarcv {

double orientation_radians(Orientation o) {
  switch (o) {
    case Orientation::kDeg0: return 0.0;
    case Orientation::kDeg45: return kPi / 4.0;
    case Orientation::kDeg90: return kPi / 2.0;
    case Orientation::kDeg135: return 3.0 * kPi / 4.0;
  }
  throw InvalidInputError("bad orientation enum");
}

Orientation orientation_from_degrees(int degrees) {
  switch (degrees) {
    case 0: return Orientation::kDeg0;
    case 45: return Orientation::kDeg45;
    case 90: return Orientation::kDeg90;
    case 135: return Orientation::kDeg135;
    default: {
      std::ostringstream os;
      os << "invalid polarizer orientation " << degrees
         << " (expected one of 0, 45, 90, 135)";
      throw InvalidLayoutError(os.str());
    }
  }
}

int orientation_degrees(Orientation o) {
  switch (o) {
    case Orientation::kDeg0: return 0;
    case Orientation::kDeg45: return 45;
    case Orientation::kDeg90: return 90;
    case Orientation::kDeg135: return 135;
  }
  throw InvalidInputError("bad orientation enum");
}

MosaicLayout MosaicLayout::default_layout() {
  MosaicLayout l;
  l.cells = {Orientation::kDeg90, Orientation::kDeg45,
             Orientation::kDeg135, Orientation::kDeg0};
  return l;
}

MosaicLayout MosaicLayout::parse(const std::string& text) {
  std::array<int, 4> deg{};
  std::string token;
  std::istringstream is(text);
  int i = 0;
  while (std::getline(is, token, ',')) {
    if (i >= 4) throw InvalidLayoutError("mosaic layout has more than 4 entries: " + text);
    try {
      deg[i] = std::stoi(token);
    } catch (const std::exception&) {
      throw InvalidLayoutError("unparsable mosaic layout entry '" + token + "'");
    }
    ++i;
  }
  if (i != 4) throw InvalidLayoutError("mosaic layout needs 4 entries: " + text);
  MosaicLayout l;
  for (int k = 0; k < 4; ++k) l.cells[k] = orientation_from_degrees(deg[k]);
  if (!l.is_permutation())
    throw InvalidLayoutError("mosaic layout is not a permutation of the four orientations: " + text);
  return l;
}

bool MosaicLayout::is_permutation() const {
  std::array<int, 4> seen{};
  for (Orientation o : cells) seen[static_cast<int>(o)]++;
  for (int c : seen)
    if (c != 1) return false;
  return true;
}

void MosaicLayout::offset_of(Orientation o, int* ox, int* oy) const {
  for (int k = 0; k < 4; ++k) {
    if (cells[k] == o) {
      *ox = k % 2;
      *oy = k / 2;
      return;
    }
  }
  throw InvalidLayoutError("orientation missing from mosaic layout");
}

std::string MosaicLayout::str() const {
  std::ostringstream os;
  for (int k = 0; k < 4; ++k) {
    if (k) os << ',';
    os << orientation_degrees(cells[k]);
  }
  return os.str();
}

void DofpRaw::validate() const {
  if (values.width() <= 0 || values.height() <= 0)
    throw InvalidInputError("empty DoFP frame");
  if (values.width() % 2 != 0 || values.height() % 2 != 0)
    throw InvalidInputError("DoFP frame dimensions must be even");
  if (!layout.is_permutation())
    throw InvalidLayoutError("mosaic layout is not a permutation of the four orientations");
  for (double v : values) {
    if (!(v >= 0.0 && v <= 1.0))
      throw InvalidInputError("DoFP sample outside [0,1]");
  }
}

const ScalarField& OrientationStack::channel(Orientation o) const {
  switch (o) {
    case Orientation::kDeg0: return p0;
    case Orientation::kDeg45: return p45;
    case Orientation::kDeg90: return p90;
    case Orientation::kDeg135: return p135;
  }
  throw InvalidInputError("bad orientation enum");
}

ScalarField& OrientationStack::channel(Orientation o) {
  return const_cast<ScalarField&>(static_cast<const OrientationStack*>(this)->channel(o));
}

void OrientationStack::validate() const {
  if (!p0.same_size(p45) || !p0.same_size(p90) || !p0.same_size(p135))
    throw InvalidInputError("orientation channels differ in size");
  if (p0.empty()) throw InvalidInputError("empty orientation stack");
  for (const ScalarField* f : {&p0, &p45, &p90, &p135})
    for (double v : *f)
      if (!(v >= 0.0)) throw InvalidInputError("negative orientation intensity");
}

void StokesImage::validate() const {
  if (!s0.same_size(s1) || !s0.same_size(s2))
    throw InvalidInputError("Stokes channels differ in size");
  for (double v : s0)
    if (!(v >= 0.0)) throw InvalidInputError("negative S0");
}

void PolarParams::validate() const {
  if (!iota.same_size(alpha) || !iota.same_size(rho))
    throw InvalidInputError("polar parameter channels differ in size");
  for (double v : iota)
    if (!(v >= 0.0)) throw InvalidInputError("negative iota");
  for (double v : alpha)
    if (!(v >= 0.0 && v < kPi)) throw InvalidInputError("alpha outside [0, pi)");
  for (double v : rho)
    if (!(v >= 0.0 && v <= 1.0)) throw InvalidInputError("rho outside [0, 1]");
}

namespace {

// Interpolate one orientation channel from its quarter-resolution sample
// grid. Sample (i, j) of orientation with tile offset (ox, oy) sits at raw
// pixel (ox + 2i, oy + 2j).
void densify_channel(const ScalarField& raw, int ox, int oy, ScalarField* out) {
  const int w = raw.width(), h = raw.height();
  const int sw = w / 2, sh = h / 2;
  for (int y = 0; y < h; ++y) {
    const double v = (y - oy) * 0.5;
    int j0 = static_cast<int>(std::floor(v));
    const double fv = v - j0;
    int j1 = j0 + 1;
    j0 = std::clamp(j0, 0, sh - 1);
    j1 = std::clamp(j1, 0, sh - 1);
    const int ry0 = oy + 2 * j0, ry1 = oy + 2 * j1;
    for (int x = 0; x < w; ++x) {
      const double u = (x - ox) * 0.5;
      int i0 = static_cast<int>(std::floor(u));
      const double fu = u - i0;
      int i1 = i0 + 1;
      i0 = std::clamp(i0, 0, sw - 1);
      i1 = std::clamp(i1, 0, sw - 1);
      const int rx0 = ox + 2 * i0, rx1 = ox + 2 * i1;
      const double top = (1.0 - fu) * raw(rx0, ry0) + fu * raw(rx1, ry0);
      const double bot = (1.0 - fu) * raw(rx0, ry1) + fu * raw(rx1, ry1);
      (*out)(x, y) = (1.0 - fv) * top + fv * bot;
    }
  }
}

}  // namespace

OrientationStack demosaick(const DofpRaw& raw) {
  raw.validate();
  const int w = raw.values.width(), h = raw.values.height();
  OrientationStack stack{ScalarField(w, h), ScalarField(w, h), ScalarField(w, h),
                         ScalarField(w, h)};
  for (Orientation o : {Orientation::kDeg0, Orientation::kDeg45, Orientation::kDeg90,
                        Orientation::kDeg135}) {
    int ox = 0, oy = 0;
    raw.layout.offset_of(o, &ox, &oy);
    densify_channel(raw.values, ox, oy, &stack.channel(o));
  }
  return stack;
}

StokesImage stokes(const OrientationStack& stack) {
  stack.validate();
  const int w = stack.width(), h = stack.height();
  StokesImage s{ScalarField(w, h), ScalarField(w, h), ScalarField(w, h)};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      s.s0(x, y) = stack.p0(x, y) + stack.p90(x, y);
      s.s1(x, y) = stack.p0(x, y) - stack.p90(x, y);
      s.s2(x, y) = stack.p45(x, y) - stack.p135(x, y);
    }
  }
  return s;
}

PolarParams polar_params(const StokesImage& s, PolarParamsStats* stats) {
  s.validate();
  const int w = s.width(), h = s.height();
  PolarParams p{ScalarField(w, h), ScalarField(w, h), ScalarField(w, h)};
  PolarParamsStats local;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double s0 = s.s0(x, y), s1 = s.s1(x, y), s2 = s.s2(x, y);
      p.iota(x, y) = s0;

      const double lin2 = s1 * s1 + s2 * s2;
      double alpha = 0.0;
      if (lin2 >= kPolAngleEps * kPolAngleEps) {
        alpha = 0.5 * std::atan2(s2, s1);
        if (alpha < 0.0) alpha += kPi;
        if (alpha >= kPi) alpha = 0.0;
      } else {
        ++local.degenerate_alpha;
      }
      p.alpha(x, y) = alpha;

      double rho = 0.0;
      if (s0 >= kIntensityEps) {
        rho = std::sqrt(lin2) / s0;
        if (rho > 1.0) {
          rho = 1.0;
          ++local.rho_clamped;
        }
      }
      p.rho(x, y) = rho;
    }
  }
  if (stats) *stats = local;
  return p;
}

OrientationStack synthesize(const PolarParams& params) {
  params.validate();
  const int w = params.width(), h = params.height();
  OrientationStack stack{ScalarField(w, h), ScalarField(w, h), ScalarField(w, h),
                         ScalarField(w, h)};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double iota = params.iota(x, y);
      const double a2 = 2.0 * params.alpha(x, y);
      const double rho = params.rho(x, y);
      const double c = rho * std::cos(a2);
      const double sn = rho * std::sin(a2);
      // Within each opposed pair the channel in [iota/2, iota] is evaluated
      // by the Malus form and its partner as iota minus it; the Sterbenz
      // condition makes that subtraction exact, so P0 + P90 == iota in
      // floating point, not just in algebra.
      double v0, v90, v45, v135;
      if (c >= 0.0) {
        v0 = 0.5 * iota * (1.0 + c);
        v90 = iota - v0;
      } else {
        v90 = 0.5 * iota * (1.0 - c);
        v0 = iota - v90;
      }
      if (sn >= 0.0) {
        v45 = 0.5 * iota * (1.0 + sn);
        v135 = iota - v45;
      } else {
        v135 = 0.5 * iota * (1.0 - sn);
        v45 = iota - v135;
      }
      stack.p0(x, y) = v0;
      stack.p90(x, y) = v90;
      stack.p45(x, y) = v45;
      stack.p135(x, y) = v135;
    }
  }
  return stack;
}

DofpRaw mosaic_from_stack(const OrientationStack& stack, const MosaicLayout& layout) {
  stack.validate();
  if (!layout.is_permutation())
    throw InvalidLayoutError("mosaic layout is not a permutation of the four orientations");
  const int w = stack.width(), h = stack.height();
  if (w % 2 != 0 || h % 2 != 0)
    throw InvalidInputError("stack dimensions must be even to form a mosaic");
  DofpRaw raw{ScalarField(w, h), layout};
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      raw.values(x, y) = stack.channel(layout.cell(x, y))(x, y);
  return raw;
}

}  // namespace polarcv
