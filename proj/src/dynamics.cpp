#include "groupsim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "groupsim/geometry.hpp"

namespace groupsim {
namespace {

using JointMatrix = Eigen::Matrix<double, kNumJoints, 3>;

enum Joint : int {
  kPelvis, kSpine1, kSpine2, kSpine3, kNeck, kHead,
  kLClavicle, kLShoulder, kLElbow, kLWrist, kLHand,
  kRClavicle, kRShoulder, kRElbow, kRWrist, kRHand,
  kLHip, kLKnee, kLAnkle, kLFoot, kLToe,
  kRHip, kRKnee, kRAnkle, kRFoot, kRToe,
};

// Body frame for a 1.7 m character: x forward, y up, z to the character's left.
const JointMatrix& rest_pose() {
  static const JointMatrix pose = [] {
    JointMatrix p;
    p.row(kPelvis) << 0.0, 0.95, 0.0;
    p.row(kSpine1) << 0.0, 1.05, 0.0;
    p.row(kSpine2) << 0.0, 1.18, 0.0;
    p.row(kSpine3) << 0.0, 1.32, 0.0;
    p.row(kNeck) << 0.0, 1.48, 0.0;
    p.row(kHead) << 0.02, 1.60, 0.0;
    p.row(kLClavicle) << 0.0, 1.42, 0.06;
    p.row(kLShoulder) << 0.0, 1.42, 0.19;
    p.row(kLElbow) << 0.0, 1.14, 0.21;
    p.row(kLWrist) << 0.0, 0.88, 0.22;
    p.row(kLHand) << 0.0, 0.80, 0.22;
    p.row(kRClavicle) << 0.0, 1.42, -0.06;
    p.row(kRShoulder) << 0.0, 1.42, -0.19;
    p.row(kRElbow) << 0.0, 1.14, -0.21;
    p.row(kRWrist) << 0.0, 0.88, -0.22;
    p.row(kRHand) << 0.0, 0.80, -0.22;
    p.row(kLHip) << 0.0, 0.92, 0.09;
    p.row(kLKnee) << 0.0, 0.50, 0.09;
    p.row(kLAnkle) << 0.0, 0.08, 0.09;
    p.row(kLFoot) << 0.06, 0.03, 0.09;
    p.row(kLToe) << 0.15, 0.01, 0.09;
    p.row(kRHip) << 0.0, 0.92, -0.09;
    p.row(kRKnee) << 0.0, 0.50, -0.09;
    p.row(kRAnkle) << 0.0, 0.08, -0.09;
    p.row(kRFoot) << 0.06, 0.03, -0.09;
    p.row(kRToe) << 0.15, 0.01, -0.09;
    return p;
  }();
  return pose;
}

// Rotates joints [first, last] about the pivot in the sagittal (x-y) plane.
void swing(JointMatrix& p, int pivot, int first, int last, double angle_rad) {
  const double c = std::cos(angle_rad), s = std::sin(angle_rad);
  const Eigen::Vector3d o = p.row(pivot).transpose();
  for (int j = first; j <= last; ++j) {
    const Eigen::Vector3d d = p.row(j).transpose() - o;
    p.row(j) << o.x() + c * d.x() - s * d.y(), o.y() + s * d.x() + c * d.y(), o.z() + d.z();
  }
}

// Points an arm chain from the shoulder along a body-frame direction.
void aim_arm(JointMatrix& p, int shoulder, const Eigen::Vector3d& dir, double bend) {
  const Eigen::Vector3d s = p.row(shoulder).transpose();
  const Eigen::Vector3d d = dir.normalized();
  const Eigen::Vector3d upper = 0.28 * d;
  const Eigen::Vector3d lower = 0.26 * (d + Eigen::Vector3d(0.0, bend, 0.0)).normalized();
  p.row(shoulder + 1) = (s + upper).transpose();
  p.row(shoulder + 2) = (s + upper + lower).transpose();
  p.row(shoulder + 3) = (s + upper + lower + 0.08 * lower.normalized()).transpose();
}

JointMatrix local_pose(AtomicAction action, double phase) {
  JointMatrix p = rest_pose();
  const double w = 2.0 * std::numbers::pi * phase;
  switch (action) {
    case AtomicAction::kWalk:
    case AtomicAction::kRun: {
      const double amp = action == AtomicAction::kRun ? 0.7 : 0.45;
      swing(p, kLHip, kLKnee, kLToe, amp * std::sin(w));
      swing(p, kRHip, kRKnee, kRToe, -amp * std::sin(w));
      swing(p, kLShoulder, kLElbow, kLHand, -0.8 * amp * std::sin(w));
      swing(p, kRShoulder, kRElbow, kRHand, 0.8 * amp * std::sin(w));
      const double bob = (action == AtomicAction::kRun ? 0.05 : 0.02) * std::cos(2.0 * w);
      p.col(1).array() += bob;
      break;
    }
    case AtomicAction::kDance: {
      const double bob = 0.06 * std::sin(2.0 * w);
      aim_arm(p, kLShoulder, Eigen::Vector3d(0.2, 1.0, 0.6 + 0.4 * std::sin(w)), 0.3);
      aim_arm(p, kRShoulder, Eigen::Vector3d(0.2, 1.0, -0.6 - 0.4 * std::sin(w)), 0.3);
      swing(p, kLHip, kLKnee, kLToe, 0.25 * std::sin(w));
      swing(p, kRHip, kRKnee, kRToe, -0.25 * std::sin(w));
      p.col(1).array() += bob;
      break;
    }
    case AtomicAction::kWave:
      aim_arm(p, kRShoulder, Eigen::Vector3d(0.1, 1.0, -0.5 - 0.3 * std::sin(2.0 * w)), 0.2);
      break;
    case AtomicAction::kPoint:
      aim_arm(p, kRShoulder, Eigen::Vector3d(1.0, 0.1 * std::sin(w), -0.2), 0.0);
      break;
    case AtomicAction::kText:
      aim_arm(p, kLShoulder, Eigen::Vector3d(0.3, -1.0, 0.1), 1.2);
      aim_arm(p, kRShoulder, Eigen::Vector3d(0.3, -1.0, -0.1), 1.2);
      p.row(kHead).x() += 0.04;
      break;
    case AtomicAction::kTalk:
      aim_arm(p, kRShoulder, Eigen::Vector3d(0.5, -1.0 + 0.3 * std::sin(w), -0.2), 0.9);
      aim_arm(p, kLShoulder, Eigen::Vector3d(0.3, -1.0 + 0.2 * std::sin(w + 1.0), 0.2), 0.6);
      break;
    default: {
      const double sway = 0.01 * std::sin(w);
      p.col(2).array() += sway;
      break;
    }
  }
  return p;
}

}  // namespace

Eigen::Vector3d CharacterState::forward() const { return heading_to_forward(heading); }

std::vector<double> adjust_speeds(std::span<const CharacterState> states, const SpeedAdjustParams& params) {
  std::vector<double> out(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    const CharacterState& me = states[i];
    const Eigen::Vector3d fwd = me.forward();
    bool blocked = false;
    for (std::size_t j = 0; j < states.size() && !blocked; ++j) {
      if (j == i) continue;
      const Eigen::Vector3d offset = states[j].position - me.position;
      const double dist = offset.norm();
      const double angle = angle_between_deg(fwd, offset);
      blocked = dist <= params.trigger_distance && angle <= params.trigger_angle;
    }
    out[i] = blocked ? std::max(me.speed * params.decay, params.floor)
                     : std::min(me.speed * params.growth, me.init_speed);
  }
  return out;
}

SceneState make_scene_state(const SceneInstance& scene, const AssetCatalog& catalog) {
  SceneState state;
  for (const auto& g : scene.groups) {
    GroupState gs;
    gs.group_id = g.group_id;
    gs.activity = g.activity;
    gs.speed_adjusted = activity_spec(g.activity).dynamic_speed_adjust;
    for (const auto& m : g.members) {
      const ClipAsset& clip = catalog.clip(m.clip_id);
      const CharacterAsset& body = catalog.character(m.character_id);
      CharacterState c;
      c.person_id = m.person_id;
      c.group_id = g.group_id;
      c.position = m.placement.position;
      c.heading = m.placement.heading;
      c.init_speed = m.animation_speed_factor;
      c.speed = m.animation_speed_factor;
      c.action = m.action;
      c.clip_id = m.clip_id;
      c.phase = m.phase_offset;
      c.body_radius = 0.5 * body.shoulder_width;
      c.height = body.height;
      c.nominal_speed = clip.nominal_speed;
      c.stride_factor = clip.stride_factor();
      c.cycle_length = clip.cycle_length;
      gs.characters.push_back(std::move(c));
    }
    state.groups.push_back(std::move(gs));
  }
  return state;
}

void step(SceneState& state, double dt, const SpeedAdjustParams& params) {
  if (!(dt > 0.0)) throw Error(ErrorCode::kInvalidRange, "time step must be positive");
  for (auto& g : state.groups) {
    if (g.speed_adjusted && params.enabled) {
      const auto speeds = adjust_speeds(g.characters, params);
      for (std::size_t i = 0; i < speeds.size(); ++i) g.characters[i].speed = speeds[i];
    }
    for (auto& c : g.characters) {
      c.phase = std::fmod(c.phase + dt * c.speed / c.cycle_length, 1.0);
      if (is_locomotion(c.action)) {
        c.position += c.forward() * (c.nominal_speed * c.stride_factor * c.speed * dt);
      }
    }
  }
}

Eigen::MatrixX3d GroupMotion::positions_at(int frame) const {
  Eigen::MatrixX3d m(persons(), 3);
  for (int p = 0; p < persons(); ++p) m.row(p) = at(p, frame).position.transpose();
  return m;
}

void GroupMotion::validate() const {
  if (frames < 1) throw Error(ErrorCode::kInvalidCount, "motion needs at least one frame");
  if (person_ids.empty()) throw Error(ErrorCode::kInvalidCount, "motion needs at least one person");
  const std::size_t cells = person_ids.size() * static_cast<std::size_t>(frames);
  if (samples.size() != cells) throw Error(ErrorCode::kInvalidCount, "sample count differs from P*T");
  if (body_radii.size() != person_ids.size() || heights.size() != person_ids.size()) {
    throw Error(ErrorCode::kInvalidCount, "per-person attribute count differs from P");
  }
  if (!joints.empty() && joints.size() != cells * kNumJoints * kJointFeatures) {
    throw Error(ErrorCode::kInvalidCount, "joint block must hold P*T*26*6 values");
  }
}

Eigen::Matrix<double, kNumJoints, 3> skeleton_pose(const CharacterState& c) {
  JointMatrix local = local_pose(c.action, c.phase) * (c.height / 1.7);
  // Body frame (forward, up, left) to world.
  const Eigen::Vector3d fwd = c.forward();
  const Eigen::Vector3d up = Eigen::Vector3d::UnitY();
  const Eigen::Vector3d left = up.cross(fwd);
  Eigen::Matrix3d basis;
  basis.col(0) = fwd;
  basis.col(1) = up;
  basis.col(2) = left;
  JointMatrix world = local * basis.transpose();
  world.rowwise() += c.position.transpose();
  return world;
}

SimulationResult simulate(const SceneInstance& scene, const AssetCatalog& catalog, int frames, double fps,
                          const SimulateOptions& options) {
  SimulationResult result = simulate(make_scene_state(scene, catalog), frames, fps, options);
  for (std::size_t g = 0; g < result.motions.size(); ++g) {
    result.motions[g].activity = std::string(to_string(scene.groups[g].activity));
  }
  return result;
}

SimulationResult simulate(SceneState state, int frames, double fps, const SimulateOptions& options) {
  if (frames < 1) throw Error(ErrorCode::kInvalidCount, "frames must be >= 1");
  if (!(fps > 0.0)) throw Error(ErrorCode::kInvalidRange, "fps must be positive");
  const double dt = 1.0 / fps;

  SimulationResult result;
  result.motions.resize(state.groups.size());
  for (std::size_t g = 0; g < state.groups.size(); ++g) {
    auto& m = result.motions[g];
    const auto& gs = state.groups[g];
    m.group_id = gs.group_id;
    m.activity = std::string(to_string(gs.activity));
    m.fps = fps;
    m.frames = frames;
    for (const auto& c : gs.characters) {
      m.person_ids.push_back(c.person_id);
      m.body_radii.push_back(c.body_radius);
      m.heights.push_back(c.height);
    }
    m.samples.resize(gs.characters.size() * static_cast<std::size_t>(frames));
    if (options.joints) {
      m.joints.assign(gs.characters.size() * static_cast<std::size_t>(frames) * kNumJoints * kJointFeatures, 0.0);
    }
  }
  if (options.keep_trace) result.trace.reserve(static_cast<std::size_t>(frames));

  for (int t = 0; t < frames; ++t) {
    if (t > 0) step(state, dt, options.speed);
    FrameSnapshot snap;
    for (std::size_t g = 0; g < state.groups.size(); ++g) {
      auto& m = result.motions[g];
      const auto& chars = state.groups[g].characters;
      for (std::size_t p = 0; p < chars.size(); ++p) {
        const auto& c = chars[p];
        m.at(static_cast<int>(p), t) = MotionSample{c.position, c.heading, c.action, c.speed};
        if (options.joints) {
          const auto pose = skeleton_pose(c);
          const std::size_t base = ((p * static_cast<std::size_t>(frames)) + static_cast<std::size_t>(t)) *
                                   kNumJoints * kJointFeatures;
          for (int j = 0; j < kNumJoints; ++j) {
            double* cell = &m.joints[base + static_cast<std::size_t>(j) * kJointFeatures];
            for (int k = 0; k < 3; ++k) {
              // Velocity by backward difference; frame 0 is patched below.
              const double prev = t > 0 ? cell[k - static_cast<std::ptrdiff_t>(kNumJoints * kJointFeatures)] : 0.0;
              cell[k] = pose(j, k);
              cell[3 + k] = t > 0 ? (pose(j, k) - prev) * fps : 0.0;
            }
          }
        }
      }
      if (options.keep_trace) snap.characters.insert(snap.characters.end(), chars.begin(), chars.end());
    }
    if (options.keep_trace) result.trace.push_back(std::move(snap));
  }

  if (options.joints && frames > 1) {
    for (auto& m : result.motions) {
      for (int p = 0; p < m.persons(); ++p) {
        const std::size_t f0 = static_cast<std::size_t>(p) * static_cast<std::size_t>(frames) * kNumJoints *
                               kJointFeatures;
        const std::size_t f1 = f0 + kNumJoints * kJointFeatures;
        for (int j = 0; j < kNumJoints; ++j) {
          for (int k = 3; k < 6; ++k) {
            m.joints[f0 + static_cast<std::size_t>(j * kJointFeatures + k)] =
                m.joints[f1 + static_cast<std::size_t>(j * kJointFeatures + k)];
          }
        }
      }
    }
  }
  return result;
}

}  // namespace groupsim
