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
#ifndef POLARCV_DEPTHLOSS_HPP
#define POLARCV_DEPTHLOSS_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <vector>

#include "polarcv/camera.hpp"
#include "polarcv/image.hpp"
#include "polarcv/polarimage.hpp"

namespace polarcv {

// All scalar knobs of the composite loss.
//   beta_pe      SSIM/L1 mix inside the photometric error
//   beta_reproj  weight of the masked reprojection term in the total
//   lambda_smooth, gamma_polar  weights of the other two terms
//   rho_min      degree-of-polarization threshold gating the polar term
//   a_max        clamp for the tangent angular error (finite at delta=pi/2)
//   ssim_c1/c2   SSIM stabilizers for [0,1]-scaled images
struct LossWeights {
  double beta_pe = 0.85;
  double beta_reproj = 1.0;
  double lambda_smooth = 1e-3;
  double gamma_polar = 0.1;
  double rho_min = 0.4;
  double a_max = 1e3;
  double ssim_c1 = 0.01 * 0.01;
  double ssim_c2 = 0.03 * 0.03;

  void validate() const;
  static LossWeights load_json(const std::filesystem::path& path);
  std::string to_json_string() const;
};

// Which electric-field estimate feeds the polarimetric term: the full
// n x r construction, or the normal-projection shortcut shifted by +-pi/2.
enum class EfieldVariant { kReal, kApprox };

// Source frame together with the transform from target-camera coordinates
// into its own camera coordinates.
struct SourceFrame {
  ScalarField image;
  Pose target_to_source;
};

// ---- geometry primitives ----

struct SurfaceNormalResult {
  bool valid = false;
  Eigen::Vector3d n = Eigen::Vector3d::Zero();  // unit, facing the camera
};

// Normal from the backprojections of (x, y), (x+1, y), (x, y+1). Border
// pixels (no right/down neighbor) report invalid and stay out of the losses.
SurfaceNormalResult surface_normal(const ScalarField& depth, const CameraIntrinsics& k,
                                   int x, int y);

struct EfieldResult {
  bool valid = false;
  Eigen::Vector3d e = Eigen::Vector3d::Zero();
};

// E_r = n x R_w with R_w the unit viewing ray through the pixel. Degenerate
// (normal parallel to the ray) reports invalid. R_w points camera -> scene;
// the opposite orientation gives the same line and the angular error is
// pi-periodic, so the choice is immaterial.
EfieldResult efield_real(const Eigen::Vector3d& n, int x, int y, const CameraIntrinsics& k);

struct ProjectedAngle {
  bool valid = false;
  double angle = 0.0;  // [0, pi)
};

// Image-plane direction of vector v attached at the backprojection of
// (u, v) at the given depth: the pinhole image of X and X + eps*v with
// eps = 1e-4 * depth. Perspective images of lines are lines, so the finite
// displacement reproduces the Jacobian direction exactly.
ProjectedAngle project_angle(const Eigen::Vector3d& v, double u, double v_px, double depth,
                             const CameraIntrinsics& k);

// A = min(|tan(delta)|, a_max) with delta the wrapped difference in
// (-pi/2, pi/2].
double angular_error(double e_angle, double alpha, double a_max);

// ---- per-term results ----

// scalar = mean of map over the nonzero pixels of mask (0 when none).
struct TermResult {
  double scalar = 0.0;
  ScalarField map;
  MaskImage mask;
  std::int64_t count = 0;
};

TermResult polar_loss(const ScalarField& depth, const PolarParams& params,
                      const CameraIntrinsics& k, const LossWeights& weights,
                      EfieldVariant variant, int threads = 1);

// Per-pixel SSIM with 3x3 uniform local statistics; borders replicate.
ScalarField ssim_map(const ScalarField& a, const ScalarField& b, const LossWeights& weights,
                     int threads = 1);

// pe = (beta_pe/2)(1 - SSIM) + (1 - beta_pe) |a - b|.
ScalarField photometric_error(const ScalarField& a, const ScalarField& b,
                              const LossWeights& weights, int threads = 1);

struct ReprojectionResult {
  double masked_mean = 0.0;  // mean of mu * map over valid pixels; feeds the total
  double mean = 0.0;         // unmasked mean over valid pixels
  ScalarField map;           // min over sources of pe(target, warped source)
  MaskImage valid;           // pixels with at least one in-frame source sample
  MaskImage mu;              // auto-mask: warped beats unwarped
  std::int64_t count = 0;
};

ReprojectionResult reprojection_loss(const ScalarField& target,
                                     const std::vector<SourceFrame>& sources,
                                     const ScalarField& depth, const CameraIntrinsics& k,
                                     const LossWeights& weights, int threads = 1);

// Second-order edge-aware smoothness on mean-normalized disparity; the
// one-pixel border is excluded.
TermResult smoothness_loss(const ScalarField& depth, const ScalarField& guide,
                           int threads = 1);

// ---- total loss ----

struct LossBreakdown {
  double total = 0.0;        // beta_reproj * l_r + lambda_smooth * l_s + gamma_polar * l_p
  double l_r = 0.0;          // mu-masked reprojection mean
  double l_r_unmasked = 0.0;
  double l_s = 0.0;
  double l_p = 0.0;
  ScalarField reproj_map, smooth_map, polar_map;
  MaskImage reproj_valid, mu, smooth_mask, polar_mask, specular_mask;
  std::int64_t reproj_count = 0, smooth_count = 0, polar_count = 0;

  std::string to_json_string() const;  // term scalars + counts
};

LossBreakdown total_loss(const ScalarField& depth, const PolarParams& params,
                         const ScalarField& target, const std::vector<SourceFrame>& sources,
                         const CameraIntrinsics& k, const LossWeights& weights,
                         EfieldVariant variant, int threads = 1);

// d(total)/d(depth) by per-pixel central differences with step 1e-4 * d.
// Each probe reuses cached global sums and re-evaluates only the stencils
// that touch the perturbed pixel, so a full gradient costs O(pixels).
ScalarField loss_gradient(const ScalarField& depth, const PolarParams& params,
                          const ScalarField& target, const std::vector<SourceFrame>& sources,
                          const CameraIntrinsics& k, const LossWeights& weights,
                          EfieldVariant variant, int threads = 1);

// Incremental evaluator behind total_loss / loss_gradient; the optimizer
// keeps one alive across iterations.
class TotalLossEvaluator {
 public:
  TotalLossEvaluator(const ScalarField& target, std::vector<SourceFrame> sources,
                     const PolarParams& params, const CameraIntrinsics& k,
                     const LossWeights& weights, EfieldVariant variant, int threads = 1);
  ~TotalLossEvaluator();
  TotalLossEvaluator(const TotalLossEvaluator&) = delete;
  TotalLossEvaluator& operator=(const TotalLossEvaluator&) = delete;

  // Full re-evaluation; throws NumericalError (naming the term) on
  // non-finite results.
  void set_depth(const ScalarField& depth);

  double total() const;
  const LossBreakdown& breakdown() const;

  // Total loss with depth(x, y) replaced by new_depth; O(1), does not
  // mutate the cached state.
  double perturbed_total(int x, int y, double new_depth) const;

  // Central-difference gradient at the current depth.
  ScalarField gradient() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace polarcv

#endif  // POLARCV_DEPTHLOSS_HPP
