#pragma once

#include <Eigen/Core>

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "groupsim/camera.hpp"
#include "groupsim/catalog.hpp"
#include "groupsim/random.hpp"

namespace groupsim {

enum class GroupActivity : std::uint8_t { kWalking = 0, kWaiting, kQueueing, kTalking, kDancing, kJogging };
inline constexpr std::size_t kNumGroupActivities = 6;

enum class AlignmentShape : std::uint8_t {
  kStraightLine = 0,
  kMultiRowLines,
  kCircle,
  kRectangle,
  kOneCornerLine,
  kTwoCornerLine,
  kParabola,
  kCurve,
};

enum class FaceRule : std::uint8_t { kSameDirection = 0, kFrontOfQueue, kGroupCenter };

std::string_view to_string(GroupActivity activity);
std::string_view to_string(AlignmentShape shape);
std::string_view to_string(FaceRule rule);
std::optional<GroupActivity> parse_group_activity(std::string_view name);
std::optional<AlignmentShape> parse_alignment_shape(std::string_view name);
const std::array<GroupActivity, kNumGroupActivities>& all_group_activities();

/// Authoring rules for one modular group activity.
struct GroupActivitySpec {
  GroupActivity activity;
  std::vector<AlignmentShape> allowed_alignments;
  FaceRule face_rule;
  std::vector<AtomicAction> allowed_actions;
  bool dynamic_speed_adjust = false;
  bool synchronous = false;
  bool talk_subgroups = false;  // adjacent pairs may turn to talk to each other
};

const GroupActivitySpec& activity_spec(GroupActivity activity);

struct Placement {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  double heading = 0.0;  // degrees in [0, 360)
};

struct GroupMember {
  int person_id = 0;
  std::string character_id;
  Placement placement;
  AtomicAction action = AtomicAction::kIdle;
  std::string clip_id;
  double animation_speed_factor = 1.0;
  double phase_offset = 0.0;  // fraction of the clip cycle
  Eigen::Vector4d body_color = Eigen::Vector4d::Ones();
  Eigen::Vector3d clothes_color = Eigen::Vector3d::Ones();
};

struct GroupInstance {
  int group_id = 0;
  GroupActivity activity = GroupActivity::kTalking;
  AlignmentShape alignment = AlignmentShape::kCircle;
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  double group_heading = 0.0;
  double interval = 1.0;
  std::vector<GroupMember> members;
  std::vector<std::pair<int, int>> subgroups;  // member index pairs

  /// Largest member distance from the group center.
  double formation_radius() const;
};

struct LightRecord {
  std::string type;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  double intensity = 1.0;
  Eigen::Vector3d target = Eigen::Vector3d::Zero();  // the light faces this point
};

struct SceneInstance {
  std::string scene_asset;
  std::string hdri;
  std::string lighting_volume;
  std::vector<LightRecord> lights;
  std::vector<GroupInstance> groups;
  std::vector<CameraModel> cameras;

  /// Mean of the group centers.
  Eigen::Vector3d groups_centroid() const;
  int person_count() const;
};

/// Knobs consumed by instantiate_scene.
struct AuthoringParams {
  int max_num_groups = 1;
  int max_num_characters = 13;
  double min_interval = 0.6;
  double max_interval = 1.5;
  /// Fraction of the interval used for the per-axis position perturbation.
  double position_perturbation = randomizers::kPositionPerturbationFraction;
  double rotation_perturbation_deg = randomizers::kRotationPerturbationDeg;
  std::vector<GroupActivity> activities = {GroupActivity::kWalking, GroupActivity::kWaiting,
                                           GroupActivity::kQueueing, GroupActivity::kTalking,
                                           GroupActivity::kDancing, GroupActivity::kJogging};
  std::vector<double> activity_weights;  // empty means uniform
  int n_views = 1;
  int image_width = 1920;
  int image_height = 1080;
  double group_margin = 1.0;  // meters added to each group's bounding disc
  int max_placement_tries = 100;
};

/// Group-local formation with the centroid at the origin, before perturbation.
std::vector<Placement> align(AlignmentShape shape, int n, double interval, RngStream& rng);

/// Sets headings according to the rule. `group_heading` is used by
/// SameDirection and by the front member of a queue when its direction is
/// undefined.
void apply_face_rule(std::vector<Placement>& placements, FaceRule rule, double group_heading = 0.0);

/// Independent per-axis ground-plane offsets in [-f*interval, f*interval] and
/// heading offsets in [-max_rotation, max_rotation].
void perturb(std::vector<Placement>& placements, double interval, RngStream& rng,
             double position_fraction = randomizers::kPositionPerturbationFraction,
             double max_rotation_deg = randomizers::kRotationPerturbationDeg);

struct AssignedMembers {
  std::vector<GroupMember> members;
  std::vector<std::pair<int, int>> subgroups;
};

AssignedMembers assign_actions(const GroupActivitySpec& spec, const std::vector<Placement>& placements,
                               RngStream& rng, const AssetCatalog& catalog);

/// Builds one group with a given activity, size, center, heading, and
/// interval. Shape is sampled from the activity's allowed alignments unless
/// given. Member positions and headings are returned in world coordinates.
GroupInstance author_group(GroupActivity activity, int n, const Eigen::Vector3d& center, double group_heading,
                           double interval, RngStream& rng, const AssetCatalog& catalog,
                           std::optional<AlignmentShape> shape = std::nullopt,
                           double position_fraction = randomizers::kPositionPerturbationFraction,
                           double max_rotation_deg = randomizers::kRotationPerturbationDeg);

/// Full scene: assets, lights, groups placed without overlapping bounding
/// discs, and cameras pointed at the group centroid. Throws
/// Error(kPlacementFailure) when a group cannot be placed.
SceneInstance instantiate_scene(const AuthoringParams& params, const AssetCatalog& catalog, RngStream rng);

}  // namespace groupsim
