#include "ipt/camera.hpp"

namespace ipt {

void CameraIntrinsics::validate() const {
  if (fx <= 0 || fy <= 0) throw ParamError("intrinsics: focal lengths must be positive");
  if (width <= 0 || height <= 0) throw ParamError("intrinsics: sensor size must be positive");
  if (u0 < 0 || u0 >= width || v0 < 0 || v0 >= height) {
    throw ParamError("intrinsics: principal point outside the image");
  }
}

Eigen::Matrix3d CameraIntrinsics::matrix() const {
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
  m(0, 0) = fx;
  m(1, 1) = fy;
  m(0, 2) = u0;
  m(1, 2) = v0;
  return m;
}

void Pose::validate() const {
  const Eigen::Matrix3d err = rotation.transpose() * rotation - Eigen::Matrix3d::Identity();
  if (err.cwiseAbs().maxCoeff() > 1e-9) {
    throw ParamError("pose: rotation is not orthonormal");
  }
  if (std::abs(rotation.determinant() - 1.0) > 1e-9) {
    throw ParamError("pose: rotation determinant is not +1");
  }
}

Pose Pose::inverted() const {
  Pose out;
  out.rotation = rotation.transpose();
  out.translation = -(rotation.transpose() * translation);
  out.convention = convention == FrameConvention::WORLD_TO_CAMERA
                       ? FrameConvention::CAMERA_TO_WORLD
                       : FrameConvention::WORLD_TO_CAMERA;
  return out;
}

Eigen::Vector3d Pose::camera_center_world() const {
  if (convention == FrameConvention::CAMERA_TO_WORLD) return translation;
  return -(rotation.transpose() * translation);
}

Eigen::Vector4d quaternion_wxyz(const Eigen::Matrix3d& r) {
  Eigen::Quaterniond q(r);
  q.normalize();
  if (q.w() < 0) q.coeffs() = -q.coeffs();
  return {q.w(), q.x(), q.y(), q.z()};
}

Eigen::Matrix3d rotation_from_wxyz(const Eigen::Vector4d& q) {
  Eigen::Quaterniond quat(q[0], q[1], q[2], q[3]);
  const double n = quat.norm();
  if (n < 1e-12) throw ParamError("quaternion: zero norm");
  quat.coeffs() /= n;
  return quat.toRotationMatrix();
}

Eigen::Vector2d project_point(const CameraIntrinsics& intr, const Pose& world_to_camera,
                              const Eigen::Vector3d& pw) {
  if (world_to_camera.convention != FrameConvention::WORLD_TO_CAMERA) {
    throw ParamError("project_point: WORLD_TO_CAMERA pose required");
  }
  const Eigen::Vector3d pc =
      world_to_camera.rotation * pw + world_to_camera.translation;
  if (pc.z() <= 0) {
    throw PipelineError("project_point: point behind the camera");
  }
  return {intr.fx * pc.x() / pc.z() + intr.u0, intr.fy * pc.y() / pc.z() + intr.v0};
}

}  // namespace ipt
