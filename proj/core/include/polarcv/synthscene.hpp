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
#ifndef POLARCV_SYNTHSCENE_HPP
#define POLARCV_SYNTHSCENE_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "polarcv/camera.hpp"
#include "polarcv/image.hpp"
#include "polarcv/polarimage.hpp"

namespace polarcv {

enum class PlaneTexture { kCheckerboard, kNoise };

// One bounded plane: {X : normal . X = distance} clipped to an axis-aligned
// box, with a procedural albedo attached to world coordinates so that the
// surface looks the same from every frame.
struct PlaneSpec {
  Eigen::Vector3d normal = Eigen::Vector3d(0, 0, -1);  // unit, world frame
  double distance = -5.0;                              // normal . X = distance
  Eigen::Vector3d extent_min = Eigen::Vector3d(-100, -100, -100);
  Eigen::Vector3d extent_max = Eigen::Vector3d(100, 100, 100);
  PlaneTexture texture = PlaneTexture::kCheckerboard;
  double texture_period = 1.0;
  double albedo_a = 0.6;     // checker: first color; noise: base level
  double albedo_b = 0.6;     // checker: second color; noise: amplitude
  std::uint32_t seed = 0;
  bool specular = false;
  double rho_value = 0.1;    // > 0.4 iff specular

  void validate() const;
};

struct BackgroundSpec {
  double depth = 40.0;  // fronto-parallel far plane
  double albedo = 0.5;
  double rho_value = 0.0;
};

// Parametric piecewise-planar scene with analytic polarization ground truth.
struct SceneSpec {
  std::string name;
  int width = 64, height = 64;
  CameraIntrinsics camera;
  std::vector<PlaneSpec> planes;
  std::vector<Pose> frames;  // world-to-camera, one per frame
  Eigen::Vector3d light_dir = Eigen::Vector3d(0.3, -0.8, 0.5).normalized();
  double ambient = 0.35;
  double diffuse = 0.55;
  BackgroundSpec background;

  void validate() const;
  // Same scene at another resolution; intrinsics scale with the frame so the
  // field of view is preserved.
  SceneSpec with_resolution(int w, int h) const;

  std::string to_json_string() const;
  static SceneSpec from_json_string(const std::string& text);
  void save_json(const std::filesystem::path& path) const;
  static SceneSpec load_json(const std::filesystem::path& path);
};

struct RenderResult {
  ScalarField depth;          // z-depth per pixel, always positive
  PolarParams params;         // ground-truth iota / alpha / rho
  OrientationStack stack;     // Malus-form channels, from synthesize()
  DofpRaw mosaic;             // stack subsampled onto the default layout
  ScalarField intensity;      // == iota; the photometric image
  MaskImage specular_mask;    // pixels on planes flagged specular
  ScalarField normal_x, normal_y, normal_z;  // camera-frame, facing the camera
};

// Deterministic analytic render of one frame. alpha on polarized pixels is
// the image-plane direction of n x r, projected with the closed-form pinhole
// Jacobian; this path shares no code with the depthloss module so the two
// can check each other.
RenderResult render(const SceneSpec& spec, int frame_index, int threads = 1);

enum class PerturbMode { kUniformScale, kTilt, kNoise };

// Deterministic depth perturbations for optimizer initialization.
//   uniform-scale: d * magnitude
//   tilt:          d / (1 - tan(magnitude) * x_n), x_n in [-1, 1] across
//                  columns (a lateral depth gradient; magnitude in radians)
//   noise:         d + magnitude * N(0,1) drawn from `seed`, clamped positive
ScalarField perturb_depth(const ScalarField& d, PerturbMode mode, double magnitude,
                          std::uint32_t seed);

// Fixed fixture scenes: "flat-lambertian", "specular-window", "two-plane-roll".
std::vector<SceneSpec> benchmark_suite();
SceneSpec benchmark_scene(const std::string& name);

// World-to-camera pose of a camera physically rolled by `roll` about its
// optical axis (zero translation). Rolling by -theta shows the same content
// as rotating the frame-0 image by +theta.
Pose camera_roll_pose(double roll);

}  // namespace polarcv

#endif  // POLARCV_SYNTHSCENE_HPP
