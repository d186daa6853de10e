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
#include "polarcv/optimize.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "polarcv/io.hpp"

namespace polarcv {

void OptimizeConfig::validate() const {
  if (max_iters < 0) throw InvalidInputError("max_iters must be >= 0");
  if (!(initial_step > 0.0)) throw InvalidInputError("initial step must be positive");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw InvalidInputError("momentum outside [0, 1)");
  if (!(backtrack > 0.0 && backtrack < 1.0))
    throw InvalidInputError("backtracking factor outside (0, 1)");
  if (!(tolerance > 0.0)) throw InvalidInputError("tolerance must be positive");
  if (log_cadence <= 0) throw InvalidInputError("log cadence must be positive");
  if (!(max_update > 0.0)) throw InvalidInputError("max_update must be positive");
  if (grad_smooth_passes < 0)
    throw InvalidInputError("grad_smooth_passes must be >= 0");
}

OptimizeConfig OptimizeConfig::load_json(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw InvalidInputError("cannot open optimizer config: " + path.string());
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInputError("unparsable optimizer config " + path.string() + ": " +
                            e.what());
  }
  OptimizeConfig c;
  c.max_iters = j.value("max_iters", c.max_iters);
  c.initial_step = j.value("initial_step", c.initial_step);
  c.momentum = j.value("momentum", c.momentum);
  c.backtrack = j.value("backtrack", c.backtrack);
  c.tolerance = j.value("tolerance", c.tolerance);
  c.log_cadence = j.value("log_cadence", c.log_cadence);
  c.max_update = j.value("max_update", c.max_update);
  c.grad_smooth_passes = j.value("grad_smooth_passes", c.grad_smooth_passes);
  c.validate();
  return c;
}

void OptimizeTrace::write_csv(const std::filesystem::path& path) const {
  CsvWriter csv({"iteration", "total", "l_r", "l_s", "l_p", "step", "rmse_gt"});
  for (const TraceRow& r : rows) {
    csv.add_row({std::to_string(r.iteration), format_double(r.total), format_double(r.l_r),
                 format_double(r.l_s), format_double(r.l_p), format_double(r.step),
                 r.rmse_gt ? format_double(*r.rmse_gt) : std::string()});
  }
  csv.write(path);
}

namespace {

// One [1 2 1] x [1 2 1] / 16 pass with replicated borders.
ScalarField smooth_field(const ScalarField& f) {
  const int w = f.width(), h = f.height();
  ScalarField out(w, h);
  auto at = [&](int x, int y) {
    return f(std::clamp(x, 0, w - 1), std::clamp(y, 0, h - 1));
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      static const double kW[3] = {1.0, 2.0, 1.0};
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx)
          acc += kW[dx + 1] * kW[dy + 1] * at(x + dx, y + dy);
      out(x, y) = acc / 16.0;
    }
  }
  return out;
}

double depth_rmse(const ScalarField& a, const ScalarField& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.pixels()[i] - b.pixels()[i];
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(a.size()));
}

bool positive_finite(const ScalarField& f) {
  for (double v : f)
    if (!(v > 0.0) || !std::isfinite(v)) return false;
  return true;
}

}  // namespace

OptimizeResult optimize_depth(const ScalarField& init, const ScalarField& target,
                              const std::vector<SourceFrame>& sources,
                              const PolarParams& params, const CameraIntrinsics& k,
                              const LossWeights& weights, EfieldVariant variant,
                              const OptimizeConfig& cfg, const ScalarField* ground_truth,
                              int threads) {
  cfg.validate();
  if (ground_truth && !ground_truth->same_size(init))
    throw InvalidInputError("ground truth size mismatch");

  TotalLossEvaluator ev(target, sources, params, k, weights, variant, threads);
  ev.set_depth(init);  // throws NumericalError naming the term when non-finite

  const int w = init.width(), h = init.height();
  ScalarField depth = init;
  ScalarField logd(w, h), velocity(w, h, 0.0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) logd(x, y) = std::log(depth(x, y));

  OptimizeResult result;
  double step = cfg.initial_step;
  double current = ev.total();

  auto log_row = [&](int iter) {
    const LossBreakdown& bd = ev.breakdown();
    TraceRow row;
    row.iteration = iter;
    row.total = bd.total;
    row.l_r = bd.l_r;
    row.l_s = bd.l_s;
    row.l_p = bd.l_p;
    row.step = step;
    if (ground_truth) row.rmse_gt = depth_rmse(depth, *ground_truth);
    result.trace.rows.push_back(row);
  };

  log_row(0);
  result.trace.stop_reason = "max-iters";
  if (cfg.max_iters == 0) {
    result.trace.stop_reason = "max-iters";
    result.depth = depth;
    result.final_breakdown = ev.breakdown();
    return result;
  }

  constexpr double kMinStep = 1e-14;
  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    const ScalarField grad_d = ev.gradient();
    // Chain rule onto log-depth.
    ScalarField grad_z(w, h);
    double gmax = 0.0;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        grad_z(x, y) = grad_d(x, y) * depth(x, y);
        gmax = std::max(gmax, std::abs(grad_z(x, y)));
      }
    }
    if (gmax == 0.0) {
      result.trace.stop_reason = "stationary";
      log_row(iter);
      break;
    }
    for (int pass = 0; pass < cfg.grad_smooth_passes; ++pass)
      grad_z = smooth_field(grad_z);

    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        velocity(x, y) = cfg.momentum * velocity(x, y) + grad_z(x, y);

    bool accepted = false;
    while (step >= kMinStep) {
      ScalarField logd_try(w, h), depth_try(w, h);
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          const double update =
              std::clamp(step * velocity(x, y), -cfg.max_update, cfg.max_update);
          logd_try(x, y) = logd(x, y) - update;
          depth_try(x, y) = std::exp(logd_try(x, y));
        }
      }
      if (positive_finite(depth_try)) {
        ev.set_depth(depth_try);
        if (ev.total() <= current) {
          logd = std::move(logd_try);
          depth = std::move(depth_try);
          current = ev.total();
          accepted = true;
          break;
        }
      }
      step *= cfg.backtrack;
      velocity = grad_z;  // stale momentum caused the overshoot; drop it
    }
    if (!accepted) {
      ev.set_depth(depth);  // restore the cache at the accepted iterate
      result.trace.stop_reason = "step-underflow";
      log_row(iter);
      break;
    }
    // Gentle regrowth so one bad region does not freeze the run.
    step = std::min(step * 1.2, cfg.initial_step);

    if (iter % cfg.log_cadence == 0 || iter == cfg.max_iters) {
      log_row(iter);
      const auto& rows = result.trace.rows;
      if (rows.size() >= 11) {
        const double before = rows[rows.size() - 11].total;
        const double now = rows.back().total;
        const double rel = (before - now) / std::max(std::abs(before), 1e-300);
        if (rel < cfg.tolerance) {
          result.trace.stop_reason = "converged";
          break;
        }
      }
    }
  }

  result.depth = depth;
  result.final_breakdown = ev.breakdown();
  return result;
}

}  // namespace polarcv
