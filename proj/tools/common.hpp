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
#ifndef POLARCV_TOOLS_COMMON_HPP
#define POLARCV_TOOLS_COMMON_HPP

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include "polarcv/depthloss.hpp"
#include "polarcv/image.hpp"
#include "polarcv/synthscene.hpp"

namespace polarcv::cli {

// Flags shared by every subcommand.
struct CommonOpts {
  std::string out;
  int threads = 1;
  unsigned int seed = 0;

  std::filesystem::path out_dir() const;  // creates the directory
  void attach(CLI::App* cmd);
};

// One manifest per run: resolved configuration, inputs/outputs, version,
// wall clock. Re-running a subcommand with the manifest's config reproduces
// the outputs bit-exactly (the duration aside).
class ManifestWriter {
 public:
  ManifestWriter(const std::string& subcommand, const CommonOpts& common);
  nlohmann::json& config() { return j_["config"]; }
  void add_input(const std::string& key, const std::string& value);
  void add_output(const std::filesystem::path& path);
  void write(const std::filesystem::path& out_dir);

 private:
  nlohmann::json j_;
  std::chrono::steady_clock::time_point start_;
};

// Scene argument: a JSON file path, or the name of a built-in benchmark
// scene.
SceneSpec load_scene_arg(const std::string& arg);

// Depth files: .pfm (lossless) or 16-bit gray containers decoded with the
// fixed depth scaling.
ScalarField read_depth_file(const std::filesystem::path& path, double depth_scale);

// "gt" | "tilt:<deg>" | "noise:<sigma-frac-of-mean>" | "scale:<factor>".
ScalarField make_init_depth(const std::string& spec, const ScalarField& gt,
                            unsigned int seed);

// Target frame + relative-posed sources for the loss, from a rendered scene.
struct LossProblem {
  ScalarField target;
  std::vector<SourceFrame> sources;
  PolarParams params;
  ScalarField gt_depth;
  MaskImage specular;
  ScalarField rho;
};
LossProblem build_loss_problem(const SceneSpec& scene, int target_frame, int threads);

void write_params_dir(const std::filesystem::path& dir, const PolarParams& params,
                      ManifestWriter* manifest);
PolarParams read_params_dir(const std::filesystem::path& dir);

// Subcommand registration; CLI11 runs the callbacks during parse.
void register_decode(CLI::App& app);
void register_hsl(CLI::App& app);
void register_augment(CLI::App& app);
void register_render(CLI::App& app);
void register_optimize(CLI::App& app);
void register_eval(CLI::App& app);

}  // namespace polarcv::cli

#endif  // POLARCV_TOOLS_COMMON_HPP
