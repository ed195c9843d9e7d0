#pragma once

#include <Eigen/Core>

#include <optional>
#include <vector>

#include "groupsim/random.hpp"

namespace groupsim {

/// Pinhole camera looking from `position` toward `look_at`.
///
/// Camera axes follow the image convention: +x right, +y down, +z into the
/// scene. The world up direction is +y.
class CameraModel {
 public:
  CameraModel(const Eigen::Vector3d& position, const Eigen::Vector3d& look_at, double vertical_fov_deg,
              int image_width = 1920, int image_height = 1080);

  const Eigen::Vector3d& position() const { return position_; }
  const Eigen::Vector3d& look_at() const { return look_at_; }
  double vertical_fov() const { return vertical_fov_; }
  int width() const { return width_; }
  int height() const { return height_; }

  /// Focal length in pixels: (height / 2) / tan(fov / 2).
  double focal() const { return focal_; }
  Eigen::Vector2d principal_point() const { return {0.5 * width_, 0.5 * height_}; }
  Eigen::Matrix3d intrinsics() const;
  /// Rows are the camera axes expressed in world coordinates.
  const Eigen::Matrix3d& world_to_camera() const { return rotation_; }

  Eigen::Vector3d to_camera(const Eigen::Vector3d& world) const { return rotation_ * (world - position_); }

 private:
  Eigen::Vector3d position_;
  Eigen::Vector3d look_at_;
  double vertical_fov_;
  int width_;
  int height_;
  double focal_;
  Eigen::Matrix3d rotation_;
};

/// Points with camera depth at or below this are treated as behind the camera.
inline constexpr double kNearPlane = 1e-6;

struct BBox2D {
  double left = 0.0;
  double top = 0.0;
  double width = 0.0;
  double height = 0.0;
  int person_id = 0;
  int group_id = 0;
  int frame = 0;

  double right() const { return left + width; }
  double bottom() const { return top + height; }
};

/// Minimal character description needed to build a box.
struct CharacterBox {
  Eigen::Vector3d ground_position;  // base of the character, y = 0
  double body_radius = 0.225;
  double height = 1.7;
  int person_id = 0;
  int group_id = 0;
  int frame = 0;
};

std::vector<CameraModel> place_cameras(const Eigen::Vector3d& groups_center, int n_views, RngStream& rng,
                                       int image_width = 1920, int image_height = 1080);

std::optional<Eigen::Vector2d> project_point(const CameraModel& cam, const Eigen::Vector3d& p);

/// Box of the projected upright cuboid (2r x height x 2r) around the
/// character, clipped to the image. Edges that cross the camera plane are
/// clipped at the near plane before projection.
std::optional<BBox2D> bbox_for_character(const CameraModel& cam, const CharacterBox& character);

}  // namespace groupsim
