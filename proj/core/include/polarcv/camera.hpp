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
#ifndef POLARCV_CAMERA_HPP
#define POLARCV_CAMERA_HPP

#include <Eigen/Dense>

#include "polarcv/errors.hpp"

namespace polarcv {

// Pinhole camera. Camera frame: x right, y down, z forward. Pixel (u, v)
// lies on the integer grid; the principal point is given in the same
// coordinates.
struct CameraIntrinsics {
  double fx = 1.0, fy = 1.0;
  double cx = 0.0, cy = 0.0;

  void validate() const {
    if (!(fx > 0.0) || !(fy > 0.0))
      throw InvalidInputError("focal lengths must be positive");
  }
};

// Rigid transform X_out = R * X_in + t.
struct Pose {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  void validate(double tol = 1e-9) const {
    const Eigen::Matrix3d err =
        rotation * rotation.transpose() - Eigen::Matrix3d::Identity();
    if (err.cwiseAbs().maxCoeff() > tol)
      throw InvalidInputError("pose rotation is not orthonormal");
    if (std::abs(rotation.determinant() - 1.0) > tol)
      throw InvalidInputError("pose rotation determinant is not +1");
  }

  Eigen::Vector3d apply(const Eigen::Vector3d& x) const { return rotation * x + translation; }

  Pose inverse() const {
    Pose p;
    p.rotation = rotation.transpose();
    p.translation = -(rotation.transpose() * translation);
    return p;
  }

  // this after inner: X -> R_this (R_inner X + t_inner) + t_this.
  Pose compose(const Pose& inner) const {
    Pose p;
    p.rotation = rotation * inner.rotation;
    p.translation = rotation * inner.translation + translation;
    return p;
  }
};

// Relative transform a -> b given world-to-camera poses of both frames.
inline Pose relative_pose(const Pose& world_to_a, const Pose& world_to_b) {
  return world_to_b.compose(world_to_a.inverse());
}

inline Eigen::Vector3d backproject(double u, double v, double depth,
                                   const CameraIntrinsics& k) {
  return {depth * (u - k.cx) / k.fx, depth * (v - k.cy) / k.fy, depth};
}

// Returns false for points at or behind the camera plane.
inline bool project(const Eigen::Vector3d& x, const CameraIntrinsics& k, double* u,
                    double* v) {
  if (!(x.z() > 0.0)) return false;
  *u = k.fx * x.x() / x.z() + k.cx;
  *v = k.fy * x.y() / x.z() + k.cy;
  return true;
}

// Unit viewing ray from the optical center through the pixel (camera to
// scene; positive z).
inline Eigen::Vector3d pixel_ray(double u, double v, const CameraIntrinsics& k) {
  Eigen::Vector3d d((u - k.cx) / k.fx, (v - k.cy) / k.fy, 1.0);
  return d.normalized();
}

}  // namespace polarcv

#endif  // POLARCV_CAMERA_HPP
