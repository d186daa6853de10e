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
#include "common.hpp"

#include <fstream>

#include "polarcv/io.hpp"
#include "polarcv/version.hpp"

namespace polarcv::cli {

std::filesystem::path CommonOpts::out_dir() const {
  if (out.empty()) throw InvalidInputError("--out is required");
  std::filesystem::path p(out);
  std::filesystem::create_directories(p);
  return p;
}

void CommonOpts::attach(CLI::App* cmd) {
  cmd->add_option("--out", out, "output directory")->required();
  cmd->add_option("--threads", threads, "worker threads (default 1)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", seed, "seed for any randomized step (default 0)");
}

ManifestWriter::ManifestWriter(const std::string& subcommand, const CommonOpts& common)
    : start_(std::chrono::steady_clock::now()) {
  j_["subcommand"] = subcommand;
  j_["version"] = kVersion;
  j_["config"] = nlohmann::json::object();
  j_["config"]["threads"] = common.threads;
  j_["config"]["seed"] = common.seed;
  j_["inputs"] = nlohmann::json::object();
  j_["outputs"] = nlohmann::json::array();
}

void ManifestWriter::add_input(const std::string& key, const std::string& value) {
  j_["inputs"][key] = value;
}

void ManifestWriter::add_output(const std::filesystem::path& path) {
  j_["outputs"].push_back(path.filename().string());
}

void ManifestWriter::write(const std::filesystem::path& out_dir) {
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  j_["duration_seconds"] = secs;
  std::ofstream os(out_dir / "manifest.json");
  if (!os) throw InvalidInputError("cannot write manifest in " + out_dir.string());
  os << j_.dump(2) << "\n";
}

SceneSpec load_scene_arg(const std::string& arg) {
  if (std::filesystem::exists(arg)) return SceneSpec::load_json(arg);
  return benchmark_scene(arg);
}

ScalarField read_depth_file(const std::filesystem::path& path, double depth_scale) {
  if (path.extension() == ".pfm") {
    ScalarField d = read_pfm(path);
    for (double v : d)
      if (!(v > 0.0)) throw InvalidInputError("depth file has non-positive entries: " +
                                              path.string());
    return d;
  }
  const GrayImageFile file = read_gray(path);
  if (file.bit_depth != 16)
    throw InvalidInputError("quantized depth must be 16-bit: " + path.string());
  ScalarField d(file.pixels.width(), file.pixels.height());
  for (int y = 0; y < d.height(); ++y)
    for (int x = 0; x < d.width(); ++x)
      d(x, y) = enc::u16_to_depth(file.pixels(x, y), depth_scale);
  return d;
}

ScalarField make_init_depth(const std::string& spec, const ScalarField& gt,
                            unsigned int seed) {
  if (spec == "gt") return gt;
  const auto colon = spec.find(':');
  if (colon == std::string::npos)
    throw InvalidInputError("bad --init (expected gt|tilt:<deg>|noise:<frac>|scale:<c>): " +
                            spec);
  const std::string kind = spec.substr(0, colon);
  double value = 0.0;
  try {
    value = std::stod(spec.substr(colon + 1));
  } catch (const std::exception&) {
    throw InvalidInputError("unparsable --init value: " + spec);
  }
  if (kind == "tilt") return perturb_depth(gt, PerturbMode::kTilt, value * kPi / 180.0, seed);
  if (kind == "noise")
    return perturb_depth(gt, PerturbMode::kNoise, value * field_mean(gt), seed);
  if (kind == "scale") return perturb_depth(gt, PerturbMode::kUniformScale, value, seed);
  throw InvalidInputError("unknown --init kind: " + kind);
}

LossProblem build_loss_problem(const SceneSpec& scene, int target_frame, int threads) {
  if (target_frame < 0 || target_frame >= static_cast<int>(scene.frames.size()))
    throw InvalidInputError("target frame out of range");
  LossProblem p;
  const RenderResult target = render(scene, target_frame, threads);
  p.target = target.intensity;
  p.params = target.params;
  p.gt_depth = target.depth;
  p.specular = target.specular_mask;
  p.rho = target.params.rho;
  for (int f = 0; f < static_cast<int>(scene.frames.size()); ++f) {
    if (f == target_frame) continue;
    const RenderResult src = render(scene, f, threads);
    p.sources.push_back(SourceFrame{
        src.intensity, relative_pose(scene.frames[target_frame], scene.frames[f])});
  }
  return p;
}

void write_params_dir(const std::filesystem::path& dir, const PolarParams& params,
                      ManifestWriter* manifest) {
  std::filesystem::create_directories(dir);
  const auto put = [&](const char* name, const Image<std::uint16_t>& img) {
    const auto path = dir / name;
    write_png_gray16(path, img);
    if (manifest) manifest->add_output(path);
  };
  put("iota.png", enc::encode(params.iota, enc::iota_to_u16));
  put("alpha.png", enc::encode(params.alpha, enc::alpha_to_u16));
  put("rho.png", enc::encode(params.rho, enc::rho_to_u16));
}

PolarParams read_params_dir(const std::filesystem::path& dir) {
  const auto load = [&](const char* name, double (*fn)(std::uint16_t)) {
    const GrayImageFile f = read_gray(dir / name);
    if (f.bit_depth != 16)
      throw InvalidInputError(std::string("expected 16-bit channel: ") + name);
    return enc::decode(f.pixels, fn);
  };
  PolarParams p{load("iota.png", enc::u16_to_iota), load("alpha.png", enc::u16_to_alpha),
                load("rho.png", enc::u16_to_rho)};
  p.validate();
  return p;
}

}  // namespace polarcv::cli
