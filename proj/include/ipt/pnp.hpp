#pragma once

#include <array>
#include <optional>
#include <vector>

#include "ipt/camera.hpp"

namespace ipt {

// 2D-3D correspondences on the z = 0 plane, at least four of them.
struct PnpInput {
  std::vector<Eigen::Vector2d> points_2d;  // pixels
  std::vector<Eigen::Vector3d> points_3d;  // meters, z = 0
  CameraIntrinsics intrinsics;

  void validate() const;
};

// Camera pose in the world frame. Euler angles are Z-Y-X yaw/pitch/roll in
// degrees, extracted from the level-flight body frame (the camera frame
// rolled by 180 deg about x so a nadir view reads as yaw=pitch=roll=0).
struct WorldPose {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();  // camera -> world
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();   // meters
  double yaw_deg = 0, pitch_deg = 0, roll_deg = 0;
};

struct PlanarPnpResult {
  Pose pose;     // WORLD_TO_CAMERA
  double rmse;   // pixels
  // The rejected homography-ambiguity candidate, when it was geometrically
  // admissible (above the plane).
  std::optional<Pose> alternate;
  double alternate_rmse = 0;
};

// Planar pose from a normalized-DLT homography: decompose H = lambda [r1 r2 t],
// project onto SO(3), build the tilt-mirrored second candidate, keep
// above-plane solutions, and pick the lower reprojection RMSE. Throws
// ParamError on degenerate input and PipelineError when no candidate puts
// the camera above the plane.
PlanarPnpResult solve_planar_pnp(const PnpInput& input);

// Eq.-4 inversion of a WORLD_TO_CAMERA pose, with derived Euler angles.
WorldPose invert_pose(const Pose& world_to_camera);

// {yaw, pitch, roll} in degrees from a camera-to-world rotation, using the
// same level-flight body convention as WorldPose.
std::array<double, 3> body_euler_zyx_deg(const Eigen::Matrix3d& camera_to_world);

// RMSE in pixels of projecting the 3D points with `pose` vs the observations.
double reprojection_error(const Pose& world_to_camera, const PnpInput& input);

}  // namespace ipt
