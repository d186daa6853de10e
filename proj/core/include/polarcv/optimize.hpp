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
#ifndef POLARCV_OPTIMIZE_HPP
#define POLARCV_OPTIMIZE_HPP

#include <filesystem>
#include <optional>
#include <vector>

#include "polarcv/depthloss.hpp"
#include "polarcv/image.hpp"

namespace polarcv {

struct OptimizeConfig {
  int max_iters = 500;
  double initial_step = 0.2;     // on log-depth
  double momentum = 0.9;         // in [0, 1)
  double backtrack = 0.5;        // step multiplier when a step raises the loss
  double tolerance = 1e-6;       // relative loss decrease over 10 logged rows
  int log_cadence = 10;          // iterations between trace rows
  // Per-pixel trust region on the log-depth update. The clamped tangent in
  // the polarimetric term has sec^2-scale gradients near its pole; without
  // a bound, one such pixel can be thrown arbitrarily far in a single
  // accepted step while the rest of the step pays for it.
  double max_update = 0.1;
  // Passes of a [1 2 1]x[1 2 1]/16 smoothing applied to the gradient before
  // the momentum update. The kernel is positive semidefinite, so smoothed
  // steps are still descent directions; it suppresses the pixel-scale
  // sawtooth modes the stencil-coupled polarimetric term would otherwise
  // descend into (normals right per stencil, surface wrong everywhere).
  int grad_smooth_passes = 2;

  void validate() const;
  static OptimizeConfig load_json(const std::filesystem::path& path);
};

struct TraceRow {
  int iteration = 0;
  double total = 0.0;
  double l_r = 0.0, l_s = 0.0, l_p = 0.0;
  double step = 0.0;
  std::optional<double> rmse_gt;  // filled when ground truth is supplied
};

struct OptimizeTrace {
  std::vector<TraceRow> rows;
  std::string stop_reason;

  void write_csv(const std::filesystem::path& path) const;
};

struct OptimizeResult {
  ScalarField depth;
  OptimizeTrace trace;
  LossBreakdown final_breakdown;
};

// Gradient descent with momentum on log-depth (positivity by construction).
// A step that raises the total is rejected, the step size halves and the
// momentum resets; accepted steps keep the trace monotone non-increasing.
// Deterministic for fixed inputs and any thread count.
OptimizeResult optimize_depth(const ScalarField& init, const ScalarField& target,
                              const std::vector<SourceFrame>& sources,
                              const PolarParams& params, const CameraIntrinsics& k,
                              const LossWeights& weights, EfieldVariant variant,
                              const OptimizeConfig& cfg,
                              const ScalarField* ground_truth = nullptr, int threads = 1);

}  // namespace polarcv

#endif  // POLARCV_OPTIMIZE_HPP
