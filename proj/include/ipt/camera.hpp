#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "ipt/error.hpp"

namespace ipt {

// Pinhole intrinsics (no distortion; calibrated-image assumption).
struct CameraIntrinsics {
  double fx = 0, fy = 0;  // scaled focal lengths, pixels
  double u0 = 0, v0 = 0;  // principal point, pixels
  int width = 0, height = 0;

  void validate() const;
  Eigen::Matrix3d matrix() const;  // M1
};

enum class FrameConvention { WORLD_TO_CAMERA, CAMERA_TO_WORLD };

// Rigid transform [R|T] with an explicit frame convention.
struct Pose {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
  FrameConvention convention = FrameConvention::WORLD_TO_CAMERA;

  // Throws ParamError unless R^T R = I and det R = +1 within 1e-9.
  void validate() const;
  Pose inverted() const;  // same transform, opposite convention

  // Camera center expressed in the world frame.
  Eigen::Vector3d camera_center_world() const;
};

// Canonical unit quaternion (w >= 0) for a rotation matrix, and back.
Eigen::Vector4d quaternion_wxyz(const Eigen::Matrix3d& r);
Eigen::Matrix3d rotation_from_wxyz(const Eigen::Vector4d& q);

// Perspective projection z_c * [u v 1]^T = M1 [R|T] p_w. Throws
// PipelineError when the point is not in front of the camera.
Eigen::Vector2d project_point(const CameraIntrinsics& intr, const Pose& world_to_camera,
                              const Eigen::Vector3d& pw);

}  // namespace ipt
