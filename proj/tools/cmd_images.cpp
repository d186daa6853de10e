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
#include <fstream>
#include <memory>

#include "common.hpp"
#include "polarcv/hslmap.hpp"
#include "polarcv/io.hpp"
#include "polarcv/polaraug.hpp"

namespace polarcv::cli {

// ---- decode ----

namespace {

struct DecodeOpts {
  CommonOpts common;
  std::string raw_path;
  std::string layout;   // overrides the sidecar
  std::string sidecar;  // defaults to <raw>.json when present
};

void run_decode(const DecodeOpts& o) {
  const auto out = o.common.out_dir();
  ManifestWriter manifest("decode", o.common);
  manifest.add_input("raw", o.raw_path);

  MosaicLayout layout = MosaicLayout::default_layout();
  if (!o.layout.empty()) {
    layout = MosaicLayout::parse(o.layout);
  } else {
    std::filesystem::path sidecar =
        o.sidecar.empty() ? std::filesystem::path(o.raw_path).replace_extension(".json")
                          : std::filesystem::path(o.sidecar);
    if (std::filesystem::exists(sidecar)) {
      layout = read_layout_sidecar(sidecar);
      manifest.add_input("sidecar", sidecar.string());
    }
  }
  manifest.config()["layout"] = layout.str();

  DofpRaw raw{to_unit_field(read_gray(o.raw_path)), layout};
  const OrientationStack stack = demosaick(raw);
  const StokesImage s = stokes(stack);
  PolarParamsStats stats;
  const PolarParams params = polar_params(s, &stats);
  manifest.config()["rho_clamped_pixels"] = stats.rho_clamped;

  const auto put = [&](const char* name, const Image<std::uint16_t>& img) {
    const auto path = out / name;
    write_png_gray16(path, img);
    manifest.add_output(path);
  };
  put("p0.png", enc::encode(stack.p0, enc::unit_to_u16));
  put("p45.png", enc::encode(stack.p45, enc::unit_to_u16));
  put("p90.png", enc::encode(stack.p90, enc::unit_to_u16));
  put("p135.png", enc::encode(stack.p135, enc::unit_to_u16));
  put("s0.png", enc::encode(s.s0, enc::iota_to_u16));
  put("s1.png", enc::encode(s.s1, enc::stokes_to_u16));
  put("s2.png", enc::encode(s.s2, enc::stokes_to_u16));
  write_params_dir(out, params, &manifest);
  manifest.write(out);
}

}  // namespace

void register_decode(CLI::App& app) {
  auto o = std::make_shared<DecodeOpts>();
  CLI::App* cmd = app.add_subcommand(
      "decode", "decode a DoFP mosaic into P-channels, Stokes and iota/alpha/rho");
  cmd->add_option("--raw", o->raw_path, "raw mosaic (PGM or PNG, 8/16-bit gray)")
      ->required();
  cmd->add_option("--layout", o->layout, "mosaic layout, e.g. 90,45,135,0 (row-major)");
  cmd->add_option("--sidecar", o->sidecar, "layout sidecar JSON (default <raw>.json)");
  o->common.attach(cmd);
  cmd->callback([o] { run_decode(*o); });
}

// ---- hsl ----

namespace {

struct HslOpts {
  CommonOpts common;
  std::string params_dir;
  bool raw_channels = false;
  double iota_full_scale = 2.0;
};

void run_hsl(const HslOpts& o) {
  const auto out = o.common.out_dir();
  ManifestWriter manifest("hsl", o.common);
  manifest.add_input("params", o.params_dir);
  manifest.config()["raw_channels"] = o.raw_channels;
  manifest.config()["iota_full_scale"] = o.iota_full_scale;

  const PolarParams params = read_params_dir(o.params_dir);
  const HslImage hsl = to_hsl(params, HslMapOptions{o.iota_full_scale});
  if (o.raw_channels) {
    // 16-bit channel export: H/360, S/100, L/100.
    const auto put = [&](const char* name, const ScalarField& f, double full) {
      Image<std::uint16_t> img(f.width(), f.height());
      for (int y = 0; y < f.height(); ++y)
        for (int x = 0; x < f.width(); ++x)
          img(x, y) = enc::unit_to_u16(f(x, y) / full);
      const auto path = out / name;
      write_png_gray16(path, img);
      manifest.add_output(path);
    };
    put("h.png", hsl.h, 360.0);
    put("s.png", hsl.s, 100.0);
    put("l.png", hsl.l, 100.0);
  } else {
    const auto path = out / "hsl.png";
    write_png_rgb8(path, hsl_to_rgb(hsl));
    manifest.add_output(path);
  }
  manifest.write(out);
}

}  // namespace

void register_hsl(CLI::App& app) {
  auto o = std::make_shared<HslOpts>();
  CLI::App* cmd = app.add_subcommand("hsl", "encode iota/alpha/rho as an HSL-mapped image");
  cmd->add_option("--params", o->params_dir, "directory with iota/alpha/rho.png")
      ->required();
  cmd->add_flag("--raw-channels", o->raw_channels,
                "write H/S/L as 16-bit channels instead of the RGB rendering");
  cmd->add_option("--iota-full-scale", o->iota_full_scale,
                  "luminance full scale (default 2.0)");
  o->common.attach(cmd);
  cmd->callback([o] { run_hsl(*o); });
}

// ---- augment ----

namespace {

struct AugmentOpts {
  CommonOpts common;
  std::string params_dir;
  std::string specs_path;
  bool regularized = false;
  bool naive = false;
};

AugmentSpec parse_augment_spec(const nlohmann::json& j) {
  AugmentSpec spec;
  const std::string kind = j.value("kind", "rotation");
  if (kind == "rotation") {
    spec.kind = AugmentKind::kRotation;
  } else if (kind == "horizontal-flip") {
    spec.kind = AugmentKind::kHorizontalFlip;
  } else {
    throw InvalidInputError("unknown augmentation kind: " + kind);
  }
  if (j.contains("theta_deg")) {
    spec.theta = j["theta_deg"].get<double>() * kPi / 180.0;
  } else {
    spec.theta = j.value("theta", 0.0);
  }
  const std::string interp = j.value("interpolation", "bilinear");
  if (interp == "bilinear") {
    spec.interpolation = Interpolation::kBilinear;
  } else if (interp == "nearest") {
    spec.interpolation = Interpolation::kNearest;
  } else {
    throw InvalidInputError("unknown interpolation: " + interp);
  }
  spec.validate();
  return spec;
}

void run_augment(const AugmentOpts& o) {
  if (o.regularized == o.naive)
    throw InvalidInputError("choose exactly one of --regularized / --naive");
  const auto out = o.common.out_dir();
  ManifestWriter manifest("augment", o.common);
  manifest.add_input("params", o.params_dir);
  manifest.add_input("specs", o.specs_path);
  manifest.config()["regularized"] = o.regularized;

  std::ifstream is(o.specs_path);
  if (!is) throw InvalidInputError("cannot open augment specs: " + o.specs_path);
  nlohmann::json specs_json;
  try {
    is >> specs_json;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInputError(std::string("unparsable augment specs: ") + e.what());
  }
  if (!specs_json.is_array()) throw InvalidInputError("augment specs must be a JSON array");

  const PolarParams params = read_params_dir(o.params_dir);
  int index = 0;
  for (const auto& j : specs_json) {
    const AugmentSpec spec = parse_augment_spec(j);
    const AugmentedParams aug = o.regularized ? augment_regularized(params, spec)
                                              : augment_naive(params, spec);
    const std::string prefix = "aug" + std::to_string(index);
    const auto put16 = [&](const std::string& name, const Image<std::uint16_t>& img) {
      const auto path = out / name;
      write_png_gray16(path, img);
      manifest.add_output(path);
    };
    put16(prefix + "_iota.png", enc::encode(aug.params.iota, enc::iota_to_u16));
    put16(prefix + "_alpha.png", enc::encode(aug.params.alpha, enc::alpha_to_u16));
    put16(prefix + "_rho.png", enc::encode(aug.params.rho, enc::rho_to_u16));
    Image<std::uint8_t> valid(aug.valid.width(), aug.valid.height());
    for (int y = 0; y < valid.height(); ++y)
      for (int x = 0; x < valid.width(); ++x) valid(x, y) = aug.valid(x, y) ? 255 : 0;
    const auto vpath = out / (prefix + "_valid.png");
    write_png_gray8(vpath, valid);
    manifest.add_output(vpath);
    ++index;
  }
  manifest.config()["specs_applied"] = index;
  manifest.write(out);
}

}  // namespace

void register_augment(CLI::App& app) {
  auto o = std::make_shared<AugmentOpts>();
  CLI::App* cmd = app.add_subcommand(
      "augment", "apply augmentation specs to an iota/alpha/rho directory");
  cmd->add_option("--params", o->params_dir, "directory with iota/alpha/rho.png")
      ->required();
  cmd->add_option("--specs", o->specs_path, "JSON array of augmentation specs")
      ->required();
  cmd->add_flag("--regularized", o->regularized, "physics-preserving alpha handling");
  cmd->add_flag("--naive", o->naive, "plain resampling, alpha left uncorrected");
  o->common.attach(cmd);
  cmd->callback([o] { run_augment(*o); });
}

}  // namespace polarcv::cli
