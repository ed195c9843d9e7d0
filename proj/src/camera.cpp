#include "groupsim/camera.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "groupsim/geometry.hpp"

namespace groupsim {

CameraModel::CameraModel(const Eigen::Vector3d& position, const Eigen::Vector3d& look_at, double vertical_fov_deg,
                         int image_width, int image_height)
    : position_(position),
      look_at_(look_at),
      vertical_fov_(vertical_fov_deg),
      width_(image_width),
      height_(image_height) {
  if ((look_at - position).norm() == 0.0) {
    throw Error(ErrorCode::kInvalidConfig, "camera position coincides with look-at point");
  }
  if (!(vertical_fov_deg > 0.0 && vertical_fov_deg < 180.0)) {
    throw Error(ErrorCode::kInvalidRange, "vertical fov must lie in (0, 180)");
  }
  if (image_width <= 0 || image_height <= 0) throw Error(ErrorCode::kInvalidCount, "image size must be positive");

  focal_ = 0.5 * image_height / std::tan(0.5 * deg_to_rad(vertical_fov_deg));

  const Eigen::Vector3d z = (look_at - position).normalized();
  Eigen::Vector3d up = Eigen::Vector3d::UnitY();
  if (std::abs(z.dot(up)) > 1.0 - 1e-9) up = Eigen::Vector3d::UnitZ();
  const Eigen::Vector3d x = z.cross(up).normalized();
  const Eigen::Vector3d y = z.cross(x);
  rotation_.row(0) = x.transpose();
  rotation_.row(1) = y.transpose();
  rotation_.row(2) = z.transpose();
}

Eigen::Matrix3d CameraModel::intrinsics() const {
  Eigen::Matrix3d k = Eigen::Matrix3d::Identity();
  k(0, 0) = focal_;
  k(1, 1) = focal_;
  k(0, 2) = 0.5 * width_;
  k(1, 2) = 0.5 * height_;
  return k;
}

std::vector<CameraModel> place_cameras(const Eigen::Vector3d& groups_center, int n_views, RngStream& rng,
                                       int image_width, int image_height) {
  if (n_views < 1) throw Error(ErrorCode::kInvalidCount, "n_views must be >= 1");
  std::vector<CameraModel> cams;
  cams.reserve(static_cast<std::size_t>(n_views));
  for (int v = 0; v < n_views; ++v) {
    RngStream view_rng = rng.derive("view_" + std::to_string(v));
    const double radius = sample(view_rng, randomizers::kCameraRadius);
    const double azimuth = sample(view_rng, randomizers::kCameraRotation);
    const double height = sample(view_rng, randomizers::kCameraHeight);
    const Eigen::Vector3d offset = sample(view_rng, randomizers::kCameraPerturbation);
    const double fov = sample(view_rng, randomizers::kCameraFov);

    Eigen::Vector3d pos = groups_center + radius * heading_to_forward(azimuth) + offset;
    pos.y() = height;
    cams.emplace_back(pos, groups_center, fov, image_width, image_height);
  }
  return cams;
}

std::optional<Eigen::Vector2d> project_point(const CameraModel& cam, const Eigen::Vector3d& p) {
  const Eigen::Vector3d c = cam.to_camera(p);
  if (c.z() <= kNearPlane) return std::nullopt;
  return Eigen::Vector2d(cam.focal() * c.x() / c.z() + 0.5 * cam.width(),
                         cam.focal() * c.y() / c.z() + 0.5 * cam.height());
}

std::optional<BBox2D> bbox_for_character(const CameraModel& cam, const CharacterBox& character) {
  const double r = character.body_radius;
  std::array<Eigen::Vector3d, 8> corners;
  for (int i = 0; i < 8; ++i) {
    const Eigen::Vector3d local((i & 1) ? r : -r, (i & 2) ? character.height : 0.0, (i & 4) ? r : -r);
    corners[static_cast<std::size_t>(i)] = cam.to_camera(character.ground_position + local);
  }

  // Corner indices differ in exactly one bit along each cuboid edge.
  std::vector<Eigen::Vector3d> visible;
  visible.reserve(20);
  for (const auto& c : corners) {
    if (c.z() > kNearPlane) visible.push_back(c);
  }
  if (visible.empty()) return std::nullopt;
  if (visible.size() < corners.size()) {
    const double near = 2.0 * kNearPlane;
    for (int a = 0; a < 8; ++a) {
      for (int bit : {1, 2, 4}) {
        const int b = a | bit;
        if (b == a) continue;
        const auto& pa = corners[static_cast<std::size_t>(a)];
        const auto& pb = corners[static_cast<std::size_t>(b)];
        if ((pa.z() > kNearPlane) == (pb.z() > kNearPlane)) continue;
        const double t = (near - pa.z()) / (pb.z() - pa.z());
        visible.push_back(pa + t * (pb - pa));
      }
    }
  }

  double u0 = INFINITY, v0 = INFINITY, u1 = -INFINITY, v1 = -INFINITY;
  for (const auto& c : visible) {
    const double u = cam.focal() * c.x() / c.z() + 0.5 * cam.width();
    const double v = cam.focal() * c.y() / c.z() + 0.5 * cam.height();
    u0 = std::min(u0, u);
    u1 = std::max(u1, u);
    v0 = std::min(v0, v);
    v1 = std::max(v1, v);
  }
  u0 = std::clamp(u0, 0.0, static_cast<double>(cam.width()));
  u1 = std::clamp(u1, 0.0, static_cast<double>(cam.width()));
  v0 = std::clamp(v0, 0.0, static_cast<double>(cam.height()));
  v1 = std::clamp(v1, 0.0, static_cast<double>(cam.height()));
  if (!(u1 > u0) || !(v1 > v0)) return std::nullopt;

  BBox2D box;
  box.left = u0;
  box.top = v0;
  box.width = u1 - u0;
  box.height = v1 - v0;
  box.person_id = character.person_id;
  box.group_id = character.group_id;
  box.frame = character.frame;
  return box;
}

}  // namespace groupsim
