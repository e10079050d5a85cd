#include "ipt/pnp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

namespace ipt {

void PnpInput::validate() const {
  if (points_2d.size() != points_3d.size()) {
    throw ParamError("pnp: 2D/3D correspondence counts differ");
  }
  if (points_2d.size() < 4) throw ParamError("pnp: at least 4 correspondences required");
  intrinsics.validate();
  for (const auto& p : points_3d) {
    if (std::abs(p.z()) > 1e-9) throw ParamError("pnp: 3D points must lie on z = 0");
  }
}

namespace {

// Similarity that centers points and scales their mean radius to sqrt(2).
Eigen::Matrix3d hartley_normalization(const std::vector<Eigen::Vector2d>& pts) {
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (const auto& p : pts) mean += p;
  mean /= static_cast<double>(pts.size());
  double dist = 0;
  for (const auto& p : pts) dist += (p - mean).norm();
  dist /= static_cast<double>(pts.size());
  const double s = dist > 1e-15 ? std::sqrt(2.0) / dist : 1.0;
  Eigen::Matrix3d t = Eigen::Matrix3d::Identity();
  t(0, 0) = s;
  t(1, 1) = s;
  t(0, 2) = -s * mean.x();
  t(1, 2) = -s * mean.y();
  return t;
}

void require_noncollinear(const std::vector<Eigen::Vector3d>& pts) {
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (const auto& p : pts) mean += p.head<2>();
  mean /= static_cast<double>(pts.size());
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  for (const auto& p : pts) {
    const Eigen::Vector2d d = p.head<2>() - mean;
    cov += d * d.transpose();
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(cov);
  if (eig.eigenvalues()(0) <= 1e-12 * std::max(1.0, eig.eigenvalues()(1))) {
    throw ParamError("pnp: world points are collinear or degenerate");
  }
}

// DLT homography from world (x, y) to normalized image coordinates.
Eigen::Matrix3d fit_homography(const std::vector<Eigen::Vector2d>& world,
                               const std::vector<Eigen::Vector2d>& norm_img) {
  const Eigen::Matrix3d tw = hartley_normalization(world);
  const Eigen::Matrix3d ti = hartley_normalization(norm_img);

  const size_t n = world.size();
  Eigen::MatrixXd a(2 * n, 9);
  for (size_t i = 0; i < n; ++i) {
    const Eigen::Vector3d w = tw * Eigen::Vector3d(world[i].x(), world[i].y(), 1.0);
    const Eigen::Vector3d m = ti * Eigen::Vector3d(norm_img[i].x(), norm_img[i].y(), 1.0);
    const double x = w.x(), y = w.y(), u = m.x(), v = m.y();
    a.row(2 * i) << -x, -y, -1, 0, 0, 0, u * x, u * y, u;
    a.row(2 * i + 1) << 0, 0, 0, -x, -y, -1, v * x, v * y, v;
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const Eigen::VectorXd h = svd.matrixV().col(8);
  Eigen::Matrix3d hn;
  hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
  return ti.inverse() * hn * tw;
}

Eigen::Matrix3d nearest_rotation(const Eigen::Matrix3d& m) {
  const Eigen::JacobiSVD<Eigen::Matrix3d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
  d(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant();
  return svd.matrixU() * d * svd.matrixV().transpose();
}

bool camera_above_plane(const Pose& pose) {
  return pose.camera_center_world().z() > 0;
}

}  // namespace

double reprojection_error(const Pose& world_to_camera, const PnpInput& input) {
  double sq = 0;
  for (size_t i = 0; i < input.points_2d.size(); ++i) {
    const Eigen::Vector2d proj =
        project_point(input.intrinsics, world_to_camera, input.points_3d[i]);
    sq += (proj - input.points_2d[i]).squaredNorm();
  }
  return std::sqrt(sq / static_cast<double>(input.points_2d.size()));
}

PlanarPnpResult solve_planar_pnp(const PnpInput& input) {
  input.validate();
  require_noncollinear(input.points_3d);

  std::vector<Eigen::Vector2d> world(input.points_3d.size());
  std::vector<Eigen::Vector2d> norm_img(input.points_2d.size());
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (size_t i = 0; i < world.size(); ++i) {
    world[i] = input.points_3d[i].head<2>();
    norm_img[i] = {(input.points_2d[i].x() - input.intrinsics.u0) / input.intrinsics.fx,
                   (input.points_2d[i].y() - input.intrinsics.v0) / input.intrinsics.fy};
    centroid += input.points_3d[i];
  }
  centroid /= static_cast<double>(world.size());

  Eigen::Matrix3d h = fit_homography(world, norm_img);

  // H = lambda [r1 r2 t]; fix the sign so the point centroid sits in front.
  const double lambda = 2.0 / (h.col(0).norm() + h.col(1).norm());
  h *= lambda;
  const Eigen::Vector3d pc_h = h * Eigen::Vector3d(centroid.x(), centroid.y(), 1.0);
  if (pc_h.z() < 0) h = -h;

  Eigen::Matrix3d m;
  m.col(0) = h.col(0);
  m.col(1) = h.col(1);
  m.col(2) = h.col(0).cross(h.col(1));

  Pose primary;
  primary.rotation = nearest_rotation(m);
  primary.translation = h.col(2);
  primary.convention = FrameConvention::WORLD_TO_CAMERA;

  // Second interpretation of a near-affine homography: reflect the plane
  // normal about the viewing ray through the centroid, keeping the centroid's
  // camera-frame position fixed.
  const Eigen::Vector3d pc = primary.rotation * centroid + primary.translation;
  Pose mirrored;
  mirrored.convention = FrameConvention::WORLD_TO_CAMERA;
  {
    const Eigen::Vector3d w = pc.normalized();
    const Eigen::Vector3d n = primary.rotation.col(2);
    const Eigen::Vector3d n2 = 2.0 * w.dot(n) * w - n;
    const Eigen::Vector3d axis_raw = n.cross(n2);
    if (axis_raw.norm() < 1e-14) {
      mirrored.rotation = primary.rotation;  // frontoparallel: candidates coincide
    } else {
      const double angle = std::acos(std::clamp(n.dot(n2), -1.0, 1.0));
      mirrored.rotation =
          Eigen::AngleAxisd(angle, axis_raw.normalized()).toRotationMatrix() *
          primary.rotation;
    }
    mirrored.translation = pc - mirrored.rotation * centroid;
  }

  const bool primary_ok = camera_above_plane(primary);
  const bool mirrored_ok = camera_above_plane(mirrored);
  if (!primary_ok && !mirrored_ok) {
    throw PipelineError("pnp: no candidate places the camera above the plane");
  }

  // A candidate with points behind it is simply out of the running.
  auto safe_rmse = [&](const Pose& pose, bool ok) {
    if (!ok) return std::numeric_limits<double>::infinity();
    try {
      return reprojection_error(pose, input);
    } catch (const PipelineError&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  PlanarPnpResult result;
  const double rmse_p = safe_rmse(primary, primary_ok);
  const double rmse_m = safe_rmse(mirrored, mirrored_ok);
  if (std::isinf(rmse_p) && std::isinf(rmse_m)) {
    throw PipelineError("pnp: no candidate projects the points in front of the camera");
  }
  if (rmse_p <= rmse_m) {
    result.pose = primary;
    result.rmse = rmse_p;
    if (std::isfinite(rmse_m)) {
      result.alternate = mirrored;
      result.alternate_rmse = rmse_m;
    }
  } else {
    result.pose = mirrored;
    result.rmse = rmse_m;
    if (std::isfinite(rmse_p)) {
      result.alternate = primary;
      result.alternate_rmse = rmse_p;
    }
  }
  return result;
}

std::array<double, 3> body_euler_zyx_deg(const Eigen::Matrix3d& camera_to_world) {
  // Body frame: camera rolled 180 deg about x, so nadir reads as level.
  Eigen::Matrix3d flip = Eigen::Matrix3d::Identity();
  flip(1, 1) = -1;
  flip(2, 2) = -1;
  const Eigen::Matrix3d rb = camera_to_world * flip;
  constexpr double kPi = 3.14159265358979323846;
  constexpr double kRad2Deg = 180.0 / kPi;
  return {std::atan2(rb(1, 0), rb(0, 0)) * kRad2Deg,
          std::asin(std::clamp(-rb(2, 0), -1.0, 1.0)) * kRad2Deg,
          std::atan2(rb(2, 1), rb(2, 2)) * kRad2Deg};
}

WorldPose invert_pose(const Pose& world_to_camera) {
  if (world_to_camera.convention != FrameConvention::WORLD_TO_CAMERA) {
    throw ParamError("invert_pose: WORLD_TO_CAMERA pose required");
  }
  world_to_camera.validate();
  WorldPose out;
  out.rotation = world_to_camera.rotation.transpose();
  out.translation = -(world_to_camera.rotation.transpose() * world_to_camera.translation);
  const auto euler = body_euler_zyx_deg(out.rotation);
  out.yaw_deg = euler[0];
  out.pitch_deg = euler[1];
  out.roll_deg = euler[2];
  return out;
}

}  // namespace ipt
