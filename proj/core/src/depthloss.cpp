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
#include "polarcv/depthloss.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "polarcv/parallel.hpp"

namespace polarcv {

void LossWeights::validate() const {
  if (!(beta_pe >= 0.0 && beta_pe <= 1.0))
    throw InvalidInputError("beta_pe outside [0, 1]");
  if (!(beta_reproj >= 0.0 && lambda_smooth >= 0.0 && gamma_polar >= 0.0))
    throw InvalidInputError("loss weights must be non-negative");
  if (!(rho_min >= 0.0 && rho_min <= 1.0))
    throw InvalidInputError("rho_min outside [0, 1]");
  if (!(a_max > 0.0)) throw InvalidInputError("a_max must be positive");
  if (!(ssim_c1 > 0.0 && ssim_c2 > 0.0))
    throw InvalidInputError("SSIM stabilizers must be positive");
}

LossWeights LossWeights::load_json(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw InvalidInputError("cannot open weights file: " + path.string());
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInputError("unparsable weights file " + path.string() + ": " + e.what());
  }
  LossWeights w;
  w.beta_pe = j.value("beta_pe", w.beta_pe);
  w.beta_reproj = j.value("beta_reproj", w.beta_reproj);
  w.lambda_smooth = j.value("lambda_smooth", w.lambda_smooth);
  w.gamma_polar = j.value("gamma_polar", w.gamma_polar);
  w.rho_min = j.value("rho_min", w.rho_min);
  w.a_max = j.value("a_max", w.a_max);
  w.ssim_c1 = j.value("ssim_c1", w.ssim_c1);
  w.ssim_c2 = j.value("ssim_c2", w.ssim_c2);
  w.validate();
  return w;
}

std::string LossWeights::to_json_string() const {
  nlohmann::json j{{"beta_pe", beta_pe},         {"beta_reproj", beta_reproj},
                   {"lambda_smooth", lambda_smooth}, {"gamma_polar", gamma_polar},
                   {"rho_min", rho_min},         {"a_max", a_max},
                   {"ssim_c1", ssim_c1},         {"ssim_c2", ssim_c2}};
  return j.dump(2);
}

// ---- geometry primitives ----

SurfaceNormalResult surface_normal(const ScalarField& depth, const CameraIntrinsics& k,
                                   int x, int y) {
  SurfaceNormalResult res;
  if (x < 0 || y < 0 || x + 1 >= depth.width() || y + 1 >= depth.height()) return res;
  const Eigen::Vector3d p = backproject(x, y, depth(x, y), k);
  const Eigen::Vector3d q = backproject(x + 1, y, depth(x + 1, y), k);
  const Eigen::Vector3d r = backproject(x, y + 1, depth(x, y + 1), k);
  Eigen::Vector3d n = (q - p).cross(q - r);
  const double norm2 = n.squaredNorm();
  if (!(norm2 > 1e-30) || !std::isfinite(norm2)) return res;
  n /= std::sqrt(norm2);
  const Eigen::Vector3d view((x - k.cx) / k.fx, (y - k.cy) / k.fy, 1.0);
  if (n.dot(view) > 0.0) n = -n;
  res.valid = true;
  res.n = n;
  return res;
}

EfieldResult efield_real(const Eigen::Vector3d& n, int x, int y, const CameraIntrinsics& k) {
  EfieldResult res;
  const Eigen::Vector3d e = n.cross(pixel_ray(x, y, k));
  if (e.squaredNorm() < 1e-24) return res;  // normal parallel to the ray
  res.valid = true;
  res.e = e;
  return res;
}

ProjectedAngle project_angle(const Eigen::Vector3d& v, double u, double v_px, double depth,
                             const CameraIntrinsics& k) {
  ProjectedAngle res;
  if (!(depth > 0.0)) return res;
  const Eigen::Vector3d x0 = backproject(u, v_px, depth, k);
  const Eigen::Vector3d x1 = x0 + (1e-4 * depth) * v;
  double u0, v0, u1, v1;
  if (!project(x0, k, &u0, &v0) || !project(x1, k, &u1, &v1)) return res;
  const double du = u1 - u0, dv = v1 - v0;
  if (du * du + dv * dv < 1e-24) return res;
  res.valid = true;
  res.angle = fold_angle_to_pi(std::atan2(dv, du));
  return res;
}

double angular_error(double e_angle, double alpha, double a_max) {
  double d = std::fmod(e_angle - alpha, kPi);
  if (d > 0.5 * kPi) {
    d -= kPi;
  } else if (d <= -0.5 * kPi) {
    d += kPi;
  }
  return std::min(std::abs(std::tan(d)), a_max);
}

namespace {

constexpr double kDepthStepScale = 1e-4;  // finite-difference step, h = 1e-4 * d

// 3x3 uniform-window SSIM at one pixel; taps clamp at the frame. The second
// image is read through a getter so a probe can override one pixel without
// touching the cached buffers.
template <typename GetB>
double ssim_pixel(const ScalarField& a, GetB&& getb, int x, int y, double c1, double c2) {
  const int w = a.width(), h = a.height();
  double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
  for (int dy = -1; dy <= 1; ++dy) {
    const int yy = std::clamp(y + dy, 0, h - 1);
    for (int dx = -1; dx <= 1; ++dx) {
      const int xx = std::clamp(x + dx, 0, w - 1);
      const double va = a(xx, yy);
      const double vb = getb(xx, yy);
      sa += va;
      sb += vb;
      saa += va * va;
      sbb += vb * vb;
      sab += va * vb;
    }
  }
  constexpr double kInvN = 1.0 / 9.0;
  const double mua = sa * kInvN, mub = sb * kInvN;
  const double vara = saa * kInvN - mua * mua;
  const double varb = sbb * kInvN - mub * mub;
  const double covab = sab * kInvN - mua * mub;
  const double ssim = ((2.0 * mua * mub + c1) * (2.0 * covab + c2)) /
                      ((mua * mua + mub * mub + c1) * (vara + varb + c2));
  return std::clamp(ssim, -1.0, 1.0);
}

template <typename GetB>
double pe_pixel(const ScalarField& a, GetB&& getb, int x, int y, const LossWeights& w) {
  const double ssim = ssim_pixel(a, getb, x, y, w.ssim_c1, w.ssim_c2);
  const double l1 = std::abs(a(x, y) - getb(x, y));
  return 0.5 * w.beta_pe * (1.0 - ssim) + (1.0 - w.beta_pe) * l1;
}

// Polarimetric contribution rho * A at one pixel, reading depth through a
// getter. Returns false when the pixel does not contribute (below the rho
// threshold, border stencil, or degenerate geometry).
template <typename DepthAt>
bool polar_pixel(DepthAt&& dat, int w, int h, const PolarParams& params,
                 const CameraIntrinsics& k, const LossWeights& weights,
                 EfieldVariant variant, int x, int y, double* contrib) {
  const double rho = params.rho(x, y);
  if (!(rho > weights.rho_min)) return false;
  if (x + 1 >= w || y + 1 >= h) return false;
  // The stencil must stay inside the measured specular region: stencils
  // spanning a region boundary usually span an occlusion edge, and their
  // normals say nothing about the surface. Gating on the measured rho map
  // (not on the optimized depth) keeps the contributing set fixed during
  // optimization, so invalidating pixels can never lower the loss.
  if (!(params.rho(x + 1, y) > weights.rho_min) ||
      !(params.rho(x, y + 1) > weights.rho_min))
    return false;

  const Eigen::Vector3d p = backproject(x, y, dat(x, y), k);
  const Eigen::Vector3d q = backproject(x + 1, y, dat(x + 1, y), k);
  const Eigen::Vector3d r = backproject(x, y + 1, dat(x, y + 1), k);
  Eigen::Vector3d n = (q - p).cross(q - r);
  const double norm2 = n.squaredNorm();
  if (!(norm2 > 1e-30) || !std::isfinite(norm2)) return false;
  n /= std::sqrt(norm2);
  const Eigen::Vector3d view((x - k.cx) / k.fx, (y - k.cy) / k.fy, 1.0);
  if (n.dot(view) > 0.0) n = -n;

  const double alpha = params.alpha(x, y);
  double a_err;
  if (variant == EfieldVariant::kReal) {
    const Eigen::Vector3d e = n.cross(view.normalized());
    if (e.squaredNorm() < 1e-24) return false;
    const ProjectedAngle pa = project_angle(e, x, y, dat(x, y), k);
    if (!pa.valid) return false;
    a_err = angular_error(pa.angle, alpha, weights.a_max);
  } else {
    // Normal-projection shortcut: both +-pi/2 shifts are evaluated and the
    // smaller error kept.
    const ProjectedAngle pa = project_angle(n, x, y, dat(x, y), k);
    if (!pa.valid) return false;
    const double plus = angular_error(fold_angle_to_pi(pa.angle + 0.5 * kPi), alpha,
                                      weights.a_max);
    const double minus = angular_error(fold_angle_to_pi(pa.angle - 0.5 * kPi), alpha,
                                       weights.a_max);
    a_err = std::min(plus, minus);
  }
  *contrib = rho * a_err;
  return true;
}

}  // namespace

// ---- standalone per-term entry points ----

ScalarField ssim_map(const ScalarField& a, const ScalarField& b, const LossWeights& weights,
                     int threads) {
  if (!a.same_size(b)) throw InvalidInputError("ssim: image sizes differ");
  weights.validate();
  ScalarField out(a.width(), a.height());
  parallel_for_rows(a.height(), threads, [&](int y0, int y1) {
    for (int y = y0; y < y1; ++y)
      for (int x = 0; x < a.width(); ++x)
        out(x, y) = ssim_pixel(a, [&](int xx, int yy) { return b(xx, yy); }, x, y,
                               weights.ssim_c1, weights.ssim_c2);
  });
  return out;
}

ScalarField photometric_error(const ScalarField& a, const ScalarField& b,
                              const LossWeights& weights, int threads) {
  if (!a.same_size(b)) throw InvalidInputError("photometric_error: image sizes differ");
  weights.validate();
  ScalarField out(a.width(), a.height());
  parallel_for_rows(a.height(), threads, [&](int y0, int y1) {
    for (int y = y0; y < y1; ++y)
      for (int x = 0; x < a.width(); ++x)
        out(x, y) = pe_pixel(a, [&](int xx, int yy) { return b(xx, yy); }, x, y, weights);
  });
  return out;
}

TermResult smoothness_loss(const ScalarField& depth, const ScalarField& guide, int threads) {
  if (!depth.same_size(guide)) throw InvalidInputError("smoothness: size mismatch");
  const int w = depth.width(), h = depth.height();
  if (w < 3 || h < 3) throw InvalidInputError("smoothness needs at least 3x3 maps");
  for (double v : depth)
    if (!(v > 0.0) || !std::isfinite(v))
      throw InvalidInputError("smoothness: depth must be positive and finite");

  ScalarField disp(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) disp(x, y) = 1.0 / depth(x, y);
  const double m = field_mean(disp);

  TermResult res;
  res.map = ScalarField(w, h);
  res.mask = MaskImage(w, h);
  ScalarField tmp(w, h);
  parallel_for_rows(h, threads, [&](int y0, int y1) {
    for (int y = std::max(1, y0); y < std::min(h - 1, y1); ++y) {
      for (int x = 1; x < w - 1; ++x) {
        const double ax = std::abs(disp(x - 1, y) + disp(x + 1, y) - 2.0 * disp(x, y));
        const double ay = std::abs(disp(x, y - 1) + disp(x, y + 1) - 2.0 * disp(x, y));
        const double wx = std::exp(-std::abs(guide(x - 1, y) + guide(x + 1, y) -
                                             2.0 * guide(x, y)));
        const double wy = std::exp(-std::abs(guide(x, y - 1) + guide(x, y + 1) -
                                             2.0 * guide(x, y)));
        tmp(x, y) = ax * wx + ay * wy;
      }
    }
  });
  double sum = 0.0;
  for (int y = 1; y < h - 1; ++y) {
    for (int x = 1; x < w - 1; ++x) {
      res.map(x, y) = tmp(x, y) / m;
      res.mask(x, y) = 1;
      sum += res.map(x, y);
      ++res.count;
    }
  }
  res.scalar = res.count > 0 ? sum / static_cast<double>(res.count) : 0.0;
  return res;
}

TermResult polar_loss(const ScalarField& depth, const PolarParams& params,
                      const CameraIntrinsics& k, const LossWeights& weights,
                      EfieldVariant variant, int threads) {
  params.validate();
  weights.validate();
  k.validate();
  if (!depth.same_size(params.rho)) throw InvalidInputError("polar_loss: size mismatch");
  const int w = depth.width(), h = depth.height();

  TermResult res;
  res.map = ScalarField(w, h);
  res.mask = MaskImage(w, h);
  parallel_for_rows(h, threads, [&](int y0, int y1) {
    for (int y = y0; y < y1; ++y) {
      for (int x = 0; x < w; ++x) {
        double c = 0.0;
        if (polar_pixel([&](int xx, int yy) { return depth(xx, yy); }, w, h, params, k,
                        weights, variant, x, y, &c)) {
          res.map(x, y) = c;
          res.mask(x, y) = 1;
        }
      }
    }
  });
  double sum = 0.0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (res.mask(x, y)) {
        sum += res.map(x, y);
        ++res.count;
      }
  res.scalar = res.count > 0 ? sum / static_cast<double>(res.count) : 0.0;
  return res;
}

// ---- evaluator ----

struct TotalLossEvaluator::Impl {
  // immutable problem data
  ScalarField target;
  std::vector<SourceFrame> sources;
  PolarParams params;
  CameraIntrinsics k;
  LossWeights weights;
  EfieldVariant variant;
  int threads;
  int w = 0, h = 0;
  std::int64_t n_total = 0;
  std::int64_t n_interior = 0;
  ScalarField guide_wx, guide_wy;      // edge weights, interior strip
  ScalarField ray_x, ray_y;            // (u - cx)/fx, (v - cy)/fy per pixel
  std::vector<ScalarField> pe_id;      // pe(target, source_k), static
  ScalarField idmin;                   // min_k pe_id
  MaskImage specular;                  // rho > rho_min

  // depth-dependent caches
  ScalarField depth;
  ScalarField disp;
  double disp_sum = 0.0;
  ScalarField ax, ay;                  // |d2 disp| along x / y
  double smooth_sum = 0.0;             // sum over interior of ax*wx + ay*wy
  ScalarField polar_contrib;
  MaskImage polar_mask;
  double polar_sum = 0.0;
  std::int64_t polar_count = 0;
  std::vector<ScalarField> warped;
  std::vector<MaskImage> warp_valid;
  std::vector<ScalarField> pe_warp;
  ScalarField lr_map;
  MaskImage lr_valid;
  MaskImage mu;
  double reproj_masked_sum = 0.0;
  double reproj_unmasked_sum = 0.0;
  std::int64_t reproj_count = 0;

  LossBreakdown bd;

  double lambda_from(double r_masked_sum, std::int64_t r_count, double s_sum,
                     double s_mean_disp, double p_sum, std::int64_t p_count) const {
    const double lr = r_count > 0 ? r_masked_sum / static_cast<double>(r_count) : 0.0;
    const double ls = n_interior > 0
                          ? s_sum / (s_mean_disp * static_cast<double>(n_interior))
                          : 0.0;
    const double lp = p_count > 0 ? p_sum / static_cast<double>(p_count) : 0.0;
    return weights.beta_reproj * lr + weights.lambda_smooth * ls +
           weights.gamma_polar * lp;
  }

  // Warp the source pixel of target pixel (x, y) for source s and depth d.
  // Out-of-frame samples are border-clamped so SSIM windows of neighboring
  // valid pixels stay well defined; `valid` reports the true in-frame test.
  void warp_sample(std::size_t s, int x, int y, double d, double* value,
                   bool* valid) const {
    const Eigen::Vector3d xt(d * ray_x(x, y), d * ray_y(x, y), d);
    const Eigen::Vector3d xs = sources[s].target_to_source.apply(xt);
    double u = 0.0, v = 0.0;
    if (!project(xs, k, &u, &v)) {
      *value = target(x, y);  // neutral fill behind the camera
      *valid = false;
      return;
    }
    double sampled = 0.0;
    const bool inside = bilinear_sample(sources[s].image, u, v, &sampled);
    if (!inside) {
      const double cu = std::clamp(u, 0.0, static_cast<double>(w - 1));
      const double cv = std::clamp(v, 0.0, static_cast<double>(h - 1));
      bilinear_sample(sources[s].image, cu, cv, &sampled);
    }
    *value = sampled;
    *valid = inside;
  }

  void full_eval(const ScalarField& new_depth);
  double perturbed(int x, int y, double new_depth) const;
};

namespace {

void check_finite_term(double v, const char* term) {
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os << term << " term is non-finite";
    throw NumericalError(os.str());
  }
}

}  // namespace

void TotalLossEvaluator::Impl::full_eval(const ScalarField& new_depth) {
  if (!new_depth.same_size(target)) throw InvalidInputError("depth size mismatch");
  for (double v : new_depth)
    if (!(v > 0.0) || !std::isfinite(v))
      throw InvalidInputError("depth map must be positive and finite");
  depth = new_depth;

  // Disparity and second differences.
  disp = ScalarField(w, h);
  parallel_for_rows(h, threads, [&](int y0, int y1) {
    for (int y = y0; y < y1; ++y)
      for (int x = 0; x < w; ++x) disp(x, y) = 1.0 / depth(x, y);
  });
  disp_sum = field_sum(disp);

  ax = ScalarField(w, h);
  ay = ScalarField(w, h);
  parallel_for_rows(h, threads, [&](int y0, int y1) {
    for (int y = y0; y < y1; ++y) {
      for (int x = 0; x < w; ++x) {
        if (x >= 1 && x + 1 < w)
          ax(x, y) = std::abs(disp(x - 1, y) + disp(x + 1, y) - 2.0 * disp(x, y));
        if (y >= 1 && y + 1 < h)
          ay(x, y) = std::abs(disp(x, y - 1) + disp(x, y + 1) - 2.0 * disp(x, y));
      }
    }
  });
  smooth_sum = 0.0;
  for (int y = 1; y < h - 1; ++y)
    for (int x = 1; x < w - 1; ++x)
      smooth_sum += ax(x, y) * guide_wx(x, y) + ay(x, y) * guide_wy(x, y);

  // Polarimetric term.
  polar_contrib = ScalarField(w, h);
  polar_mask = MaskImage(w, h);
  parallel_for_rows(h, threads, [&](int y0, int y1) {
    for (int y = y0; y < y1; ++y) {
      for (int x = 0; x < w; ++x) {
        double c = 0.0;
        if (polar_pixel([&](int xx, int yy) { return depth(xx, yy); }, w, h, params, k,
                        weights, variant, x, y, &c)) {
          polar_contrib(x, y) = c;
          polar_mask(x, y) = 1;
        } else {
          polar_contrib(x, y) = 0.0;
          polar_mask(x, y) = 0;
        }
      }
    }
  });
  polar_sum = 0.0;
  polar_count = 0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (polar_mask(x, y)) {
        polar_sum += polar_contrib(x, y);
        ++polar_count;
      }

  // Reprojection term.
  const std::size_t ns = sources.size();
  warped.assign(ns, ScalarField(w, h));
  warp_valid.assign(ns, MaskImage(w, h));
  pe_warp.assign(ns, ScalarField(w, h));
  for (std::size_t s = 0; s < ns; ++s) {
    parallel_for_rows(h, threads, [&](int y0, int y1) {
      for (int y = y0; y < y1; ++y) {
        for (int x = 0; x < w; ++x) {
          double value = 0.0;
          bool ok = false;
          warp_sample(s, x, y, depth(x, y), &value, &ok);
          warped[s](x, y) = value;
          warp_valid[s](x, y) = ok ? 1 : 0;
        }
      }
    });
  }
  for (std::size_t s = 0; s < ns; ++s) {
    parallel_for_rows(h, threads, [&](int y0, int y1) {
      for (int y = y0; y < y1; ++y)
        for (int x = 0; x < w; ++x)
          pe_warp[s](x, y) =
              pe_pixel(target, [&](int xx, int yy) { return warped[s](xx, yy); }, x, y,
                       weights);
    });
  }
  lr_map = ScalarField(w, h);
  lr_valid = MaskImage(w, h);
  mu = MaskImage(w, h);
  reproj_masked_sum = 0.0;
  reproj_unmasked_sum = 0.0;
  reproj_count = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double best = 0.0;
      bool any = false;
      for (std::size_t s = 0; s < ns; ++s) {
        if (!warp_valid[s](x, y)) continue;
        const double pe = pe_warp[s](x, y);
        if (!any || pe < best) best = pe;
        any = true;
      }
      if (!any) continue;
      lr_map(x, y) = best;
      lr_valid(x, y) = 1;
      const std::uint8_t m = best < idmin(x, y) ? 1 : 0;
      mu(x, y) = m;
      reproj_unmasked_sum += best;
      if (m) reproj_masked_sum += best;
      ++reproj_count;
    }
  }

  // Assemble the breakdown.
  const double m_disp = disp_sum / static_cast<double>(n_total);
  bd = LossBreakdown{};
  bd.l_r = reproj_count > 0 ? reproj_masked_sum / static_cast<double>(reproj_count) : 0.0;
  bd.l_r_unmasked =
      reproj_count > 0 ? reproj_unmasked_sum / static_cast<double>(reproj_count) : 0.0;
  bd.l_s = n_interior > 0
               ? smooth_sum / (m_disp * static_cast<double>(n_interior))
               : 0.0;
  bd.l_p = polar_count > 0 ? polar_sum / static_cast<double>(polar_count) : 0.0;
  check_finite_term(bd.l_r, "reprojection");
  check_finite_term(bd.l_s, "smoothness");
  check_finite_term(bd.l_p, "polarimetric");
  bd.total = weights.beta_reproj * bd.l_r + weights.lambda_smooth * bd.l_s +
             weights.gamma_polar * bd.l_p;
  check_finite_term(bd.total, "total");

  bd.reproj_map = lr_map;
  bd.smooth_map = ScalarField(w, h);
  bd.smooth_mask = MaskImage(w, h);
  for (int y = 1; y < h - 1; ++y) {
    for (int x = 1; x < w - 1; ++x) {
      bd.smooth_map(x, y) =
          (ax(x, y) * guide_wx(x, y) + ay(x, y) * guide_wy(x, y)) / m_disp;
      bd.smooth_mask(x, y) = 1;
    }
  }
  bd.polar_map = polar_contrib;
  bd.polar_mask = polar_mask;
  bd.reproj_valid = lr_valid;
  bd.mu = mu;
  bd.specular_mask = specular;
  bd.reproj_count = reproj_count;
  bd.smooth_count = n_interior;
  bd.polar_count = polar_count;
}

double TotalLossEvaluator::Impl::perturbed(int x, int y, double new_depth) const {
  const double new_disp = 1.0 / new_depth;
  const double old_disp = disp(x, y);

  auto disp_at = [&](int xx, int yy) {
    return (xx == x && yy == y) ? new_disp : disp(xx, yy);
  };
  auto depth_at = [&](int xx, int yy) {
    return (xx == x && yy == y) ? new_depth : depth(xx, yy);
  };

  // Smoothness: second differences within reach of (x, y), plus the global
  // disparity mean.
  double s_sum = smooth_sum;
  if (y >= 1 && y + 1 < h) {
    for (int xx = std::max(1, x - 1); xx <= std::min(w - 2, x + 1); ++xx) {
      const double a_new =
          std::abs(disp_at(xx - 1, y) + disp_at(xx + 1, y) - 2.0 * disp_at(xx, y));
      s_sum += (a_new - ax(xx, y)) * guide_wx(xx, y);
    }
  }
  if (x >= 1 && x + 1 < w) {
    for (int yy = std::max(1, y - 1); yy <= std::min(h - 2, y + 1); ++yy) {
      const double a_new =
          std::abs(disp_at(x, yy - 1) + disp_at(x, yy + 1) - 2.0 * disp_at(x, yy));
      s_sum += (a_new - ay(x, yy)) * guide_wy(x, yy);
    }
  }
  const double m_disp = (disp_sum + (new_disp - old_disp)) / static_cast<double>(n_total);

  // Polarimetric term: stencils anchored at (x,y), (x-1,y), (x,y-1).
  double p_sum = polar_sum;
  std::int64_t p_count = polar_count;
  const int qx[3] = {x, x - 1, x};
  const int qy[3] = {y, y, y - 1};
  for (int i = 0; i < 3; ++i) {
    const int cx_ = qx[i], cy_ = qy[i];
    if (cx_ < 0 || cy_ < 0 || cx_ >= w || cy_ >= h) continue;
    double c_new = 0.0;
    const bool in_new = polar_pixel(depth_at, w, h, params, k, weights, variant, cx_, cy_,
                                    &c_new);
    const bool in_old = polar_mask(cx_, cy_) != 0;
    if (in_old) {
      p_sum -= polar_contrib(cx_, cy_);
      --p_count;
    }
    if (in_new) {
      p_sum += c_new;
      ++p_count;
    }
  }

  // Reprojection: the warp of (x, y) moves, which perturbs SSIM windows in
  // the 3x3 patch around it.
  double r_masked = reproj_masked_sum;
  std::int64_t r_count = reproj_count;
  const std::size_t ns = sources.size();
  if (ns > 0) {
    double wv[8];
    bool wvalid[8];
    for (std::size_t s = 0; s < ns && s < 8; ++s)
      warp_sample(s, x, y, new_depth, &wv[s], &wvalid[s]);

    for (int dy = -1; dy <= 1; ++dy) {
      const int yy = y + dy;
      if (yy < 0 || yy >= h) continue;
      for (int dx = -1; dx <= 1; ++dx) {
        const int xx = x + dx;
        if (xx < 0 || xx >= w) continue;
        double best = 0.0;
        bool any = false;
        for (std::size_t s = 0; s < ns; ++s) {
          const bool valid_s =
              (xx == x && yy == y) ? wvalid[s] : (warp_valid[s](xx, yy) != 0);
          if (!valid_s) continue;
          const double pe = pe_pixel(
              target,
              [&](int px, int py) {
                return (px == x && py == y) ? wv[s] : warped[s](px, py);
              },
              xx, yy, weights);
          if (!any || pe < best) best = pe;
          any = true;
        }
        const bool was_valid = lr_valid(xx, yy) != 0;
        if (was_valid) {
          if (mu(xx, yy)) r_masked -= lr_map(xx, yy);
          --r_count;
        }
        if (any) {
          if (best < idmin(xx, yy)) r_masked += best;
          ++r_count;
        }
      }
    }
  }

  return lambda_from(r_masked, r_count, s_sum, m_disp, p_sum, p_count);
}

TotalLossEvaluator::TotalLossEvaluator(const ScalarField& target,
                                       std::vector<SourceFrame> sources,
                                       const PolarParams& params, const CameraIntrinsics& k,
                                       const LossWeights& weights, EfieldVariant variant,
                                       int threads)
    : impl_(std::make_unique<Impl>()) {
  params.validate();
  weights.validate();
  k.validate();
  if (!target.same_size(params.rho))
    throw InvalidInputError("target image and polar parameters differ in size");
  if (target.width() < 3 || target.height() < 3)
    throw InvalidInputError("loss needs at least 3x3 frames");
  for (const SourceFrame& s : sources) {
    if (!s.image.same_size(target)) throw InvalidInputError("source size mismatch");
    s.target_to_source.validate(1e-9);
  }
  if (sources.size() > 8) throw InvalidInputError("at most 8 source frames supported");

  Impl& im = *impl_;
  im.target = target;
  im.sources = std::move(sources);
  im.params = params;
  im.k = k;
  im.weights = weights;
  im.variant = variant;
  im.threads = std::max(1, threads);
  im.w = target.width();
  im.h = target.height();
  im.n_total = static_cast<std::int64_t>(im.w) * im.h;
  im.n_interior = static_cast<std::int64_t>(im.w - 2) * (im.h - 2);

  im.guide_wx = ScalarField(im.w, im.h);
  im.guide_wy = ScalarField(im.w, im.h);
  im.ray_x = ScalarField(im.w, im.h);
  im.ray_y = ScalarField(im.w, im.h);
  for (int y = 0; y < im.h; ++y) {
    for (int x = 0; x < im.w; ++x) {
      im.ray_x(x, y) = (x - k.cx) / k.fx;
      im.ray_y(x, y) = (y - k.cy) / k.fy;
      if (x >= 1 && x + 1 < im.w)
        im.guide_wx(x, y) = std::exp(
            -std::abs(target(x - 1, y) + target(x + 1, y) - 2.0 * target(x, y)));
      if (y >= 1 && y + 1 < im.h)
        im.guide_wy(x, y) = std::exp(
            -std::abs(target(x, y - 1) + target(x, y + 1) - 2.0 * target(x, y)));
    }
  }

  im.pe_id.reserve(im.sources.size());
  im.idmin = ScalarField(im.w, im.h, std::numeric_limits<double>::infinity());
  for (const SourceFrame& s : im.sources) {
    im.pe_id.push_back(photometric_error(target, s.image, weights, im.threads));
    const ScalarField& pe = im.pe_id.back();
    for (int y = 0; y < im.h; ++y)
      for (int x = 0; x < im.w; ++x)
        im.idmin(x, y) = std::min(im.idmin(x, y), pe(x, y));
  }

  im.specular = MaskImage(im.w, im.h);
  for (int y = 0; y < im.h; ++y)
    for (int x = 0; x < im.w; ++x)
      im.specular(x, y) = params.rho(x, y) > weights.rho_min ? 1 : 0;
}

TotalLossEvaluator::~TotalLossEvaluator() = default;

void TotalLossEvaluator::set_depth(const ScalarField& depth) { impl_->full_eval(depth); }

double TotalLossEvaluator::total() const { return impl_->bd.total; }

const LossBreakdown& TotalLossEvaluator::breakdown() const { return impl_->bd; }

double TotalLossEvaluator::perturbed_total(int x, int y, double new_depth) const {
  if (x < 0 || y < 0 || x >= impl_->w || y >= impl_->h)
    throw InvalidInputError("perturbed pixel out of bounds");
  return impl_->perturbed(x, y, new_depth);
}

ScalarField TotalLossEvaluator::gradient() const {
  const Impl& im = *impl_;
  ScalarField g(im.w, im.h);
  parallel_for_rows(im.h, im.threads, [&](int y0, int y1) {
    for (int y = y0; y < y1; ++y) {
      for (int x = 0; x < im.w; ++x) {
        const double d = im.depth(x, y);
        const double step = kDepthStepScale * d;
        const double up = im.perturbed(x, y, d + step);
        const double dn = im.perturbed(x, y, d - step);
        g(x, y) = (up - dn) / (2.0 * step);
      }
    }
  });
  return g;
}

// ---- free-function wrappers ----

ReprojectionResult reprojection_loss(const ScalarField& target,
                                     const std::vector<SourceFrame>& sources,
                                     const ScalarField& depth, const CameraIntrinsics& k,
                                     const LossWeights& weights, int threads) {
  if (sources.empty()) throw InvalidInputError("reprojection needs at least one source");
  PolarParams dummy{ScalarField(target.width(), target.height()),
                    ScalarField(target.width(), target.height()),
                    ScalarField(target.width(), target.height())};
  TotalLossEvaluator ev(target, sources, dummy, k, weights, EfieldVariant::kReal, threads);
  ev.set_depth(depth);
  const LossBreakdown& bd = ev.breakdown();
  ReprojectionResult r;
  r.masked_mean = bd.l_r;
  r.mean = bd.l_r_unmasked;
  r.map = bd.reproj_map;
  r.valid = bd.reproj_valid;
  r.mu = bd.mu;
  r.count = bd.reproj_count;
  return r;
}

LossBreakdown total_loss(const ScalarField& depth, const PolarParams& params,
                         const ScalarField& target, const std::vector<SourceFrame>& sources,
                         const CameraIntrinsics& k, const LossWeights& weights,
                         EfieldVariant variant, int threads) {
  TotalLossEvaluator ev(target, sources, params, k, weights, variant, threads);
  ev.set_depth(depth);
  return ev.breakdown();
}

ScalarField loss_gradient(const ScalarField& depth, const PolarParams& params,
                          const ScalarField& target, const std::vector<SourceFrame>& sources,
                          const CameraIntrinsics& k, const LossWeights& weights,
                          EfieldVariant variant, int threads) {
  TotalLossEvaluator ev(target, sources, params, k, weights, variant, threads);
  ev.set_depth(depth);
  return ev.gradient();
}

std::string LossBreakdown::to_json_string() const {
  nlohmann::json j;
  j["total"] = total;
  j["reprojection"] = {{"masked_mean", l_r},
                       {"unmasked_mean", l_r_unmasked},
                       {"count", reproj_count}};
  j["smoothness"] = {{"mean", l_s}, {"count", smooth_count}};
  j["polarimetric"] = {{"mean", l_p}, {"count", polar_count}};
  return j.dump(2);
}

}  // namespace polarcv
