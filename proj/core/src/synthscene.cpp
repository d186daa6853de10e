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
#include "polarcv/synthscene.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include <json.hpp>

#include "polarcv/parallel.hpp"

namespace polarcv {

void PlaneSpec::validate() const {
  if (std::abs(normal.norm() - 1.0) > 1e-6)
    throw InvalidInputError("plane normal must be unit length");
  if (!(rho_value >= 0.0 && rho_value <= 1.0))
    throw InvalidInputError("plane rho outside [0, 1]");
  if ((rho_value > 0.4) != specular)
    throw InvalidInputError("rho_value > 0.4 must coincide with the specular flag");
  for (int i = 0; i < 3; ++i)
    if (!(extent_min[i] <= extent_max[i]))
      throw InvalidInputError("plane extent box is inverted");
  if (!(texture_period > 0.0)) throw InvalidInputError("texture period must be positive");
}

void SceneSpec::validate() const {
  if (width <= 0 || height <= 0) throw InvalidInputError("scene dimensions must be positive");
  if (width % 2 != 0 || height % 2 != 0)
    throw InvalidInputError("scene dimensions must be even (mosaic output)");
  camera.validate();
  if (frames.empty()) throw InvalidInputError("scene needs at least one frame pose");
  for (const Pose& p : frames) p.validate(1e-9);
  for (const PlaneSpec& p : planes) p.validate();
  if (!(background.depth > 0.0)) throw InvalidInputError("background depth must be positive");
  if (std::abs(light_dir.norm() - 1.0) > 1e-6)
    throw InvalidInputError("light direction must be unit length");
  if (!(ambient >= 0.0 && diffuse >= 0.0 && ambient + diffuse <= 1.0 + 1e-12))
    throw InvalidInputError("ambient + diffuse must stay within [0, 1]");
}

SceneSpec SceneSpec::with_resolution(int w, int h) const {
  SceneSpec s = *this;
  const double sx = static_cast<double>(w) / width;
  const double sy = static_cast<double>(h) / height;
  s.width = w;
  s.height = h;
  s.camera.fx = camera.fx * sx;
  s.camera.fy = camera.fy * sy;
  // Pixel-center preserving rescale of the principal point.
  s.camera.cx = (camera.cx + 0.5) * sx - 0.5;
  s.camera.cy = (camera.cy + 0.5) * sy - 0.5;
  return s;
}

namespace {

// splitmix64; the per-pixel texture hash must not carry sequential state so
// that rendering stays deterministic under row-parallel execution.
std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

double lattice_value(std::int64_t i, std::int64_t j, std::uint32_t seed) {
  std::uint64_t h = mix64(static_cast<std::uint64_t>(seed) + 0x51ab3f);
  h = mix64(h ^ static_cast<std::uint64_t>(i));
  h = mix64(h ^ static_cast<std::uint64_t>(j));
  return static_cast<double>(h >> 11) * (1.0 / 9007199254740992.0);  // [0, 1)
}

double value_noise(double u, double v, std::uint32_t seed) {
  const double fu = std::floor(u), fv = std::floor(v);
  const auto i = static_cast<std::int64_t>(fu), j = static_cast<std::int64_t>(fv);
  const double du = u - fu, dv = v - fv;
  const double a = lattice_value(i, j, seed), b = lattice_value(i + 1, j, seed);
  const double c = lattice_value(i, j + 1, seed), d = lattice_value(i + 1, j + 1, seed);
  return (1.0 - dv) * ((1.0 - du) * a + du * b) + dv * ((1.0 - du) * c + du * d);
}

struct PlaneFrame {
  Eigen::Vector3d u_axis, v_axis;  // world tangents for texture coordinates
};

PlaneFrame plane_frame(const Eigen::Vector3d& n) {
  const Eigen::Vector3d helper =
      std::abs(n.z()) < 0.9 ? Eigen::Vector3d(0, 0, 1) : Eigen::Vector3d(1, 0, 0);
  PlaneFrame f;
  f.u_axis = n.cross(helper).normalized();
  f.v_axis = n.cross(f.u_axis);
  return f;
}

double plane_albedo(const PlaneSpec& plane, const PlaneFrame& frame,
                    const Eigen::Vector3d& world_point) {
  const double tu = world_point.dot(frame.u_axis) / plane.texture_period;
  const double tv = world_point.dot(frame.v_axis) / plane.texture_period;
  if (plane.texture == PlaneTexture::kCheckerboard) {
    const auto parity = static_cast<std::int64_t>(std::floor(tu)) +
                        static_cast<std::int64_t>(std::floor(tv));
    return (parity & 1) ? plane.albedo_b : plane.albedo_a;
  }
  const double n = value_noise(tu, tv, plane.seed);
  return std::clamp(plane.albedo_a + plane.albedo_b * (2.0 * n - 1.0), 0.01, 1.0);
}

bool inside_extent(const PlaneSpec& plane, const Eigen::Vector3d& p) {
  constexpr double kEps = 1e-9;
  for (int i = 0; i < 3; ++i)
    if (p[i] < plane.extent_min[i] - kEps || p[i] > plane.extent_max[i] + kEps)
      return false;
  return true;
}

// Image-plane direction of a 3D vector attached at camera point X, via the
// closed-form pinhole Jacobian, folded to [0, pi). Written here without any
// depthloss code so the renderer stays an independent oracle.
double analytic_projected_angle(const Eigen::Vector3d& v, const Eigen::Vector3d& x,
                                const CameraIntrinsics& k) {
  const double du = k.fx * (v.x() * x.z() - x.x() * v.z());
  const double dv = k.fy * (v.y() * x.z() - x.y() * v.z());
  if (du * du + dv * dv < 1e-24) return 0.0;
  return fold_angle_to_pi(std::atan2(dv, du));
}

}  // namespace

RenderResult render(const SceneSpec& spec, int frame_index, int threads) {
  spec.validate();
  if (frame_index < 0 || frame_index >= static_cast<int>(spec.frames.size()))
    throw InvalidInputError("frame index out of range");
  const Pose& pose = spec.frames[frame_index];  // world -> camera
  const Pose cam_to_world = pose.inverse();
  const CameraIntrinsics& k = spec.camera;
  const int w = spec.width, h = spec.height;

  // Planes in the camera frame: n_c . X_c = dist_c.
  struct CamPlane {
    Eigen::Vector3d n_cam;
    double dist_cam;
    PlaneFrame frame;
  };
  std::vector<CamPlane> cam_planes;
  cam_planes.reserve(spec.planes.size());
  for (const PlaneSpec& p : spec.planes) {
    CamPlane cp;
    cp.n_cam = pose.rotation * p.normal;
    cp.dist_cam = p.distance + cp.n_cam.dot(pose.translation);
    cp.frame = plane_frame(p.normal);
    cam_planes.push_back(cp);
  }

  RenderResult out{ScalarField(w, h),
                   {ScalarField(w, h), ScalarField(w, h), ScalarField(w, h)},
                   {},
                   {},
                   ScalarField(w, h),
                   MaskImage(w, h),
                   ScalarField(w, h),
                   ScalarField(w, h),
                   ScalarField(w, h)};

  parallel_for_rows(h, threads, [&](int y0, int y1) {
    for (int y = y0; y < y1; ++y) {
      for (int x = 0; x < w; ++x) {
        const Eigen::Vector3d dir((x - k.cx) / k.fx, (y - k.cy) / k.fy, 1.0);

        int hit = -1;
        double t_hit = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < cam_planes.size(); ++i) {
          const double denom = cam_planes[i].n_cam.dot(dir);
          if (std::abs(denom) < 1e-12) continue;
          const double t = cam_planes[i].dist_cam / denom;
          if (t <= 1e-9 || t >= t_hit) continue;
          const Eigen::Vector3d xw = cam_to_world.apply(t * dir);
          if (!inside_extent(spec.planes[i], xw)) continue;
          t_hit = t;
          hit = static_cast<int>(i);
        }

        Eigen::Vector3d n_world, x_cam;
        double albedo = 0.0, rho = 0.0;
        bool specular = false;
        if (hit >= 0) {
          const PlaneSpec& plane = spec.planes[hit];
          x_cam = t_hit * dir;
          const Eigen::Vector3d xw = cam_to_world.apply(x_cam);
          n_world = plane.normal;
          albedo = plane_albedo(plane, cam_planes[hit].frame, xw);
          rho = plane.rho_value;
          specular = plane.specular;
        } else {
          t_hit = spec.background.depth;
          x_cam = t_hit * dir;
          n_world = cam_to_world.rotation * Eigen::Vector3d(0, 0, -1);
          albedo = spec.background.albedo;
          rho = spec.background.rho_value;
        }

        // Normal oriented toward the camera.
        Eigen::Vector3d n_cam = pose.rotation * n_world;
        if (n_cam.dot(dir) > 0.0) n_cam = -n_cam;
        const Eigen::Vector3d n_world_facing = cam_to_world.rotation * n_cam;

        const double lambert = std::max(0.0, n_world_facing.dot(-spec.light_dir));
        const double iota =
            std::min(1.0, albedo * (spec.ambient + spec.diffuse * lambert));

        double alpha = 0.0;
        if (rho > 0.0) {
          const Eigen::Vector3d efield = n_cam.cross(dir.normalized());
          if (efield.squaredNorm() >= 1e-18)
            alpha = analytic_projected_angle(efield, x_cam, k);
        }

        out.depth(x, y) = t_hit;  // dir.z == 1, so t is the z-depth
        out.params.iota(x, y) = iota;
        out.params.alpha(x, y) = alpha;
        out.params.rho(x, y) = rho;
        out.intensity(x, y) = iota;
        out.specular_mask(x, y) = specular ? 1 : 0;
        out.normal_x(x, y) = n_cam.x();
        out.normal_y(x, y) = n_cam.y();
        out.normal_z(x, y) = n_cam.z();
      }
    }
  });

  out.stack = synthesize(out.params);
  out.mosaic = mosaic_from_stack(out.stack, MosaicLayout::default_layout());
  return out;
}

ScalarField perturb_depth(const ScalarField& d, PerturbMode mode, double magnitude,
                          std::uint32_t seed) {
  for (double v : d)
    if (!(v > 0.0 && std::isfinite(v)))
      throw InvalidInputError("perturb_depth needs a positive finite depth map");
  const int w = d.width(), h = d.height();
  ScalarField out(w, h);
  switch (mode) {
    case PerturbMode::kUniformScale: {
      if (!(magnitude > 0.0)) throw InvalidInputError("scale magnitude must be positive");
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) out(x, y) = d(x, y) * magnitude;
      break;
    }
    case PerturbMode::kTilt: {
      // Lateral gradient: d / (1 - tan(mag) * x_n) with x_n in [-1, 1]
      // across columns. The denominator is clamped to keep depth positive.
      const double slope = std::tan(magnitude);
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          const double xn = w > 1 ? 2.0 * x / (w - 1.0) - 1.0 : 0.0;
          const double denom = std::max(0.2, 1.0 - slope * xn);
          out(x, y) = d(x, y) / denom;
        }
      }
      break;
    }
    case PerturbMode::kNoise: {
      std::mt19937 rng(seed);
      std::normal_distribution<double> gauss(0.0, 1.0);
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          const double v = d(x, y) + magnitude * gauss(rng);
          out(x, y) = std::max(v, 0.05 * d(x, y));
        }
      }
      break;
    }
  }
  return out;
}

Pose camera_roll_pose(double roll) {
  // Camera-to-world roll R_z(roll); stored world-to-camera, hence transposed.
  const double c = std::cos(roll), s = std::sin(roll);
  Pose p;
  p.rotation << c, s, 0, -s, c, 0, 0, 0, 1;
  return p;
}

namespace {

Pose camera_at(const Eigen::Vector3d& position) {
  Pose p;  // world -> camera with identity orientation
  p.translation = -position;
  return p;
}

SceneSpec base_scene(const std::string& name, int size = 64) {
  SceneSpec s;
  s.name = name;
  s.width = size;
  s.height = size;
  s.camera.fx = 0.75 * size;
  s.camera.fy = 0.75 * size;
  s.camera.cx = 0.5 * (size - 1);
  s.camera.cy = 0.5 * (size - 1);
  s.light_dir = Eigen::Vector3d(0.3, 0.7, 0.6).normalized();
  s.ambient = 0.35;
  s.diffuse = 0.55;
  s.background.depth = 40.0;
  s.background.albedo = 0.5;
  s.background.rho_value = 0.0;
  return s;
}

SceneSpec make_flat_lambertian() {
  SceneSpec s = base_scene("flat-lambertian");
  PlaneSpec ground;
  ground.normal = Eigen::Vector3d(0, 0, -1);
  ground.distance = -5.0;  // fronto-parallel plane at depth 5
  ground.extent_min = Eigen::Vector3d(-100, -100, 4.9);
  ground.extent_max = Eigen::Vector3d(100, 100, 5.1);
  ground.texture = PlaneTexture::kCheckerboard;
  ground.texture_period = 0.9;
  ground.albedo_a = 0.35;
  ground.albedo_b = 0.75;
  ground.specular = false;
  ground.rho_value = 0.05;
  s.planes.push_back(ground);
  s.frames = {Pose{}, camera_at({0.15, 0, 0}), camera_at({-0.15, 0, 0})};
  return s;
}

SceneSpec make_specular_window() {
  SceneSpec s = base_scene("specular-window");

  // Facade plane, slightly off vertical. Split into a near-textureless
  // specular pane and a coplanar diffuse textured sill strip that runs down
  // to the ground contact line. The sill gives the photometric terms an
  // anchor for the facade's absolute depth; the pane itself carries almost
  // no texture, so its orientation is the polarimetric term's job.
  const Eigen::Vector3d facade_n = Eigen::Vector3d(0.28, -0.10, -1.0).normalized();
  const double facade_d = facade_n.dot(Eigen::Vector3d(0.3, -0.4, 6.0));

  PlaneSpec ground;
  ground.normal = Eigen::Vector3d(0, -1, 0);
  ground.distance = -1.3;  // y = +1.3, below the camera
  ground.extent_min = Eigen::Vector3d(-60, 1.25, 0.5);
  ground.extent_max = Eigen::Vector3d(60, 1.35, 60);
  ground.texture = PlaneTexture::kCheckerboard;
  ground.texture_period = 0.8;
  ground.albedo_a = 0.3;
  ground.albedo_b = 0.8;
  ground.specular = false;
  ground.rho_value = 0.07;
  s.planes.push_back(ground);

  PlaneSpec pane;
  pane.normal = facade_n;
  pane.distance = facade_d;
  pane.extent_min = Eigen::Vector3d(-60, -3.5, 3.0);
  pane.extent_max = Eigen::Vector3d(60, 0.75, 12.0);
  pane.texture = PlaneTexture::kNoise;
  pane.texture_period = 1.0;
  pane.albedo_a = 0.55;
  pane.albedo_b = 0.05;
  pane.seed = 7;
  pane.specular = true;
  pane.rho_value = 0.85;
  s.planes.push_back(pane);

  PlaneSpec sill;
  sill.normal = facade_n;
  sill.distance = facade_d;
  sill.extent_min = Eigen::Vector3d(-60, 0.75, 3.0);
  sill.extent_max = Eigen::Vector3d(60, 1.35, 12.0);
  sill.texture = PlaneTexture::kCheckerboard;
  sill.texture_period = 0.5;
  sill.albedo_a = 0.25;
  sill.albedo_b = 0.85;
  sill.specular = false;
  sill.rho_value = 0.07;
  s.planes.push_back(sill);

  s.frames = {Pose{}, camera_at({0.18, 0, 0}), camera_at({-0.18, 0, 0})};
  return s;
}

SceneSpec make_two_plane_roll() {
  SceneSpec s = base_scene("two-plane-roll", 96);

  PlaneSpec left;
  left.normal = Eigen::Vector3d(0.35, -0.25, -1.0).normalized();
  left.distance = left.normal.dot(Eigen::Vector3d(-1.2, 0, 5.0));
  left.extent_min = Eigen::Vector3d(-80, -80, 1.0);
  left.extent_max = Eigen::Vector3d(0.0, 80, 80);
  left.texture = PlaneTexture::kCheckerboard;
  left.texture_period = 1.1;
  left.albedo_a = 0.4;
  left.albedo_b = 0.7;
  left.specular = true;
  left.rho_value = 0.75;
  s.planes.push_back(left);

  PlaneSpec right;
  right.normal = Eigen::Vector3d(-0.30, 0.20, -1.0).normalized();
  right.distance = right.normal.dot(Eigen::Vector3d(1.2, 0, 5.5));
  right.extent_min = Eigen::Vector3d(0.0, -80, 1.0);
  right.extent_max = Eigen::Vector3d(80, 80, 80);
  right.texture = PlaneTexture::kCheckerboard;
  right.texture_period = 0.9;
  right.albedo_a = 0.45;
  right.albedo_b = 0.75;
  right.specular = true;
  right.rho_value = 0.65;
  s.planes.push_back(right);

  s.frames = {Pose{}};
  return s;
}

}  // namespace

std::vector<SceneSpec> benchmark_suite() {
  return {make_flat_lambertian(), make_specular_window(), make_two_plane_roll()};
}

SceneSpec benchmark_scene(const std::string& name) {
  for (SceneSpec& s : benchmark_suite())
    if (s.name == name) return s;
  throw InvalidInputError("unknown benchmark scene: " + name);
}

// ---- JSON ----

namespace {

nlohmann::json vec3_to_json(const Eigen::Vector3d& v) {
  return nlohmann::json::array({v.x(), v.y(), v.z()});
}

Eigen::Vector3d vec3_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 3) throw InvalidInputError("expected a 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

nlohmann::json pose_to_json(const Pose& p) {
  nlohmann::json j;
  auto& r = j["rotation"] = nlohmann::json::array();
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) r.push_back(p.rotation(i, k));
  j["translation"] = vec3_to_json(p.translation);
  return j;
}

Pose pose_from_json(const nlohmann::json& j) {
  Pose p;
  const auto& r = j.at("rotation");
  if (!r.is_array() || r.size() != 9) throw InvalidInputError("pose rotation needs 9 entries");
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) p.rotation(i, k) = r[3 * i + k].get<double>();
  p.translation = vec3_from_json(j.at("translation"));
  return p;
}

}  // namespace

std::string SceneSpec::to_json_string() const {
  nlohmann::json j;
  j["name"] = name;
  j["width"] = width;
  j["height"] = height;
  j["camera"] = {{"fx", camera.fx}, {"fy", camera.fy}, {"cx", camera.cx}, {"cy", camera.cy}};
  j["light_dir"] = vec3_to_json(light_dir);
  j["ambient"] = ambient;
  j["diffuse"] = diffuse;
  j["background"] = {{"depth", background.depth},
                     {"albedo", background.albedo},
                     {"rho", background.rho_value}};
  j["planes"] = nlohmann::json::array();
  for (const PlaneSpec& p : planes) {
    nlohmann::json pj;
    pj["normal"] = vec3_to_json(p.normal);
    pj["distance"] = p.distance;
    pj["extent_min"] = vec3_to_json(p.extent_min);
    pj["extent_max"] = vec3_to_json(p.extent_max);
    pj["texture"] = p.texture == PlaneTexture::kCheckerboard ? "checkerboard" : "noise";
    pj["texture_period"] = p.texture_period;
    pj["albedo_a"] = p.albedo_a;
    pj["albedo_b"] = p.albedo_b;
    pj["seed"] = p.seed;
    pj["specular"] = p.specular;
    pj["rho"] = p.rho_value;
    j["planes"].push_back(pj);
  }
  j["frames"] = nlohmann::json::array();
  for (const Pose& f : frames) j["frames"].push_back(pose_to_json(f));
  return j.dump(2);
}

SceneSpec SceneSpec::from_json_string(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInputError(std::string("unparsable scene JSON: ") + e.what());
  }
  try {
    SceneSpec s;
    s.name = j.value("name", "scene");
    s.width = j.at("width").get<int>();
    s.height = j.at("height").get<int>();
    const auto& c = j.at("camera");
    s.camera.fx = c.at("fx").get<double>();
    s.camera.fy = c.at("fy").get<double>();
    s.camera.cx = c.at("cx").get<double>();
    s.camera.cy = c.at("cy").get<double>();
    if (j.contains("light_dir")) s.light_dir = vec3_from_json(j["light_dir"]).normalized();
    s.ambient = j.value("ambient", s.ambient);
    s.diffuse = j.value("diffuse", s.diffuse);
    if (j.contains("background")) {
      const auto& b = j["background"];
      s.background.depth = b.value("depth", s.background.depth);
      s.background.albedo = b.value("albedo", s.background.albedo);
      s.background.rho_value = b.value("rho", s.background.rho_value);
    }
    for (const auto& pj : j.value("planes", nlohmann::json::array())) {
      PlaneSpec p;
      p.normal = vec3_from_json(pj.at("normal")).normalized();
      p.distance = pj.at("distance").get<double>();
      p.extent_min = vec3_from_json(pj.at("extent_min"));
      p.extent_max = vec3_from_json(pj.at("extent_max"));
      const std::string tex = pj.value("texture", "checkerboard");
      if (tex == "checkerboard") {
        p.texture = PlaneTexture::kCheckerboard;
      } else if (tex == "noise") {
        p.texture = PlaneTexture::kNoise;
      } else {
        throw InvalidInputError("unknown texture kind: " + tex);
      }
      p.texture_period = pj.value("texture_period", 1.0);
      p.albedo_a = pj.value("albedo_a", 0.6);
      p.albedo_b = pj.value("albedo_b", 0.6);
      p.seed = pj.value("seed", 0u);
      p.specular = pj.value("specular", false);
      p.rho_value = pj.value("rho", 0.1);
      s.planes.push_back(p);
    }
    for (const auto& fj : j.value("frames", nlohmann::json::array()))
      s.frames.push_back(pose_from_json(fj));
    if (s.frames.empty()) s.frames.push_back(Pose{});
    s.validate();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInputError(std::string("bad scene JSON: ") + e.what());
  }
}

void SceneSpec::save_json(const std::filesystem::path& path) const {
  std::ofstream os(path);
  if (!os) throw InvalidInputError("cannot open file for writing: " + path.string());
  os << to_json_string() << "\n";
}

SceneSpec SceneSpec::load_json(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw InvalidInputError("cannot open scene file: " + path.string());
  std::ostringstream buf;
  buf << is.rdbuf();
  return from_json_string(buf.str());
}

}  // namespace polarcv
