#pragma once

#include <Eigen/Core>

#include <span>
#include <string>
#include <vector>

#include "groupsim/authoring.hpp"
#include "groupsim/catalog.hpp"

namespace groupsim {

inline constexpr int kNumJoints = 26;
inline constexpr int kJointFeatures = 6;

struct CharacterState {
  int person_id = 0;
  int group_id = 0;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  double heading = 0.0;     // degrees
  double init_speed = 1.0;  // animation speed factor at spawn
  double speed = 1.0;       // current animation speed factor
  AtomicAction action = AtomicAction::kIdle;
  std::string clip_id;
  double phase = 0.0;  // [0, 1)
  double body_radius = 0.225;
  double height = 1.7;

  // Locomotion parameters copied from the clip.
  double nominal_speed = 0.0;  // m/s
  double stride_factor = 1.0;
  double cycle_length = 1.0;  // seconds

  Eigen::Vector3d forward() const;
};

/// Collision-avoidance speed controller constants.
struct SpeedAdjustParams {
  double trigger_distance = 0.8;  // meters
  double trigger_angle = 60.0;    // degrees
  double decay = 0.96;
  double floor = 0.1;
  double growth = 1.03;
  bool enabled = true;
};

/// New speed factor for every character. A character slows down when any
/// other character is within trigger_distance and within trigger_angle of its
/// forward direction, and recovers toward its initial speed otherwise. All
/// decisions use the input states, so the result does not depend on order.
std::vector<double> adjust_speeds(std::span<const CharacterState> states, const SpeedAdjustParams& params = {});

struct GroupState {
  int group_id = 0;
  GroupActivity activity = GroupActivity::kTalking;
  bool speed_adjusted = false;
  std::vector<CharacterState> characters;
};

struct SceneState {
  std::vector<GroupState> groups;
};

/// Initial runtime state for an authored scene.
SceneState make_scene_state(const SceneInstance& scene, const AssetCatalog& catalog);

/// Advances every character by dt seconds. Speed-adjusted groups update their
/// speeds first; walk/run characters then translate along their forward
/// direction at nominal_speed * stride_factor * speed.
void step(SceneState& state, double dt, const SpeedAdjustParams& params = {});

/// Per-person, per-frame sample.
struct MotionSample {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  double heading = 0.0;
  AtomicAction action = AtomicAction::kIdle;
  double speed = 1.0;
};

/// Trajectories and labels of one group: P persons x T frames.
struct GroupMotion {
  int group_id = 0;
  std::string activity;
  double fps = 30.0;
  int frames = 0;
  std::vector<int> person_ids;
  std::vector<double> body_radii;
  std::vector<double> heights;
  std::vector<MotionSample> samples;  // person-major: samples[p * frames + t]
  /// Optional P x T x 26 x 6 block, person-major then frame, joint, feature.
  std::vector<double> joints;

  int persons() const { return static_cast<int>(person_ids.size()); }
  bool has_joints() const { return !joints.empty(); }

  const MotionSample& at(int person, int frame) const {
    return samples[static_cast<std::size_t>(person) * static_cast<std::size_t>(frames) +
                   static_cast<std::size_t>(frame)];
  }
  MotionSample& at(int person, int frame) {
    return samples[static_cast<std::size_t>(person) * static_cast<std::size_t>(frames) +
                   static_cast<std::size_t>(frame)];
  }

  /// P x 3 matrix of positions at a frame.
  Eigen::MatrixX3d positions_at(int frame) const;

  /// Throws Error(kInvalidCount) when the shape invariants fail.
  void validate() const;
};

/// Everything visible at one frame, across groups.
struct FrameSnapshot {
  std::vector<CharacterState> characters;
};

struct SimulationResult {
  std::vector<GroupMotion> motions;  // one per group
  std::vector<FrameSnapshot> trace;  // one per frame
};

struct SimulateOptions {
  SpeedAdjustParams speed;
  bool joints = false;
  bool keep_trace = true;
};

/// Fixed-step loop with dt = 1 / fps. Frame 0 is the authored state.
SimulationResult simulate(const SceneInstance& scene, const AssetCatalog& catalog, int frames, double fps,
                          const SimulateOptions& options = {});

/// Same loop starting from an explicit state.
SimulationResult simulate(SceneState state, int frames, double fps, const SimulateOptions& options = {});

/// 26 joints x 6 features (world position, velocity) for a character pose.
/// The pose is a deterministic function of action, phase, heading, position
/// and height.
Eigen::Matrix<double, kNumJoints, 3> skeleton_pose(const CharacterState& c);

}  // namespace groupsim
