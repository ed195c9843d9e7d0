#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <gtest/gtest.h>

#include "groupsim/dynamics.hpp"
#include "groupsim/geometry.hpp"
#include "groupsim/metrics.hpp"

using namespace groupsim;

namespace {

CharacterState walker(int id, Eigen::Vector3d pos, double heading, double speed = 1.0, double init = 1.0) {
  CharacterState c;
  c.person_id = id;
  c.group_id = 1;
  c.position = pos;
  c.heading = heading;
  c.speed = speed;
  c.init_speed = init;
  c.action = AtomicAction::kWalk;
  c.nominal_speed = 1.4;
  c.stride_factor = 1.0;
  c.cycle_length = 1.1;
  return c;
}

SceneState one_group(std::vector<CharacterState> chars, bool adjusted = true) {
  SceneState s;
  GroupState g;
  g.group_id = 1;
  g.activity = GroupActivity::kWalking;
  g.speed_adjusted = adjusted;
  g.characters = std::move(chars);
  s.groups.push_back(std::move(g));
  return s;
}

double min_pair_distance(const GroupMotion& m) {
  double best = 1e300;
  for (int t = 0; t < m.frames; ++t)
    for (int i = 0; i < m.persons(); ++i)
      for (int j = i + 1; j < m.persons(); ++j)
        best = std::min(best, (m.at(i, t).position - m.at(j, t).position).norm());
  return best;
}

}  // namespace

TEST(SpeedAdjustParams, Defaults) {
  const SpeedAdjustParams p;
  EXPECT_EQ(p.trigger_distance, 0.8);
  EXPECT_EQ(p.trigger_angle, 60.0);
  EXPECT_EQ(p.decay, 0.96);
  EXPECT_EQ(p.floor, 0.1);
  EXPECT_EQ(p.growth, 1.03);
}

TEST(AdjustSpeeds, BlockerAheadSlowsDown) {
  std::vector<CharacterState> s{walker(1, {0, 0, 0}, 0.0, 1.0), walker(2, {0.5, 0, 0}, 0.0, 1.0)};
  EXPECT_NEAR(adjust_speeds(s)[0], 0.96, 1e-12);
}

TEST(AdjustSpeeds, FloorSaturates) {
  std::vector<CharacterState> s{walker(1, {0, 0, 0}, 0.0, 0.1), walker(2, {0.5, 0, 0}, 0.0)};
  EXPECT_NEAR(adjust_speeds(s)[0], 0.1, 1e-12);
}

TEST(AdjustSpeeds, NeighbourBehindRecovers) {
  std::vector<CharacterState> s{walker(1, {0, 0, 0}, 0.0, 0.96, 1.0), walker(2, {-0.5, 0, 0}, 0.0)};
  EXPECT_NEAR(adjust_speeds(s)[0], 0.9888, 1e-12);
}

TEST(AdjustSpeeds, RecoveryCapsAtInitSpeed) {
  std::vector<CharacterState> s{walker(1, {0, 0, 0}, 0.0, 0.995, 1.0), walker(2, {3.0, 0, 0}, 0.0)};
  EXPECT_NEAR(adjust_speeds(s)[0], 1.0, 1e-12);
}

TEST(AdjustSpeeds, TriggerBoundariesInclusive) {
  const double r = deg_to_rad(59.9);
  std::vector<CharacterState> s{walker(1, {0, 0, 0}, 0.0), walker(2, {0.8, 0, 0}, 0.0)};
  EXPECT_NEAR(adjust_speeds(s)[0], 0.96, 1e-12);
  s[1].position = {0.79 * std::cos(r), 0, 0.79 * std::sin(r)};
  EXPECT_NEAR(adjust_speeds(s)[0], 0.96, 1e-12);
  s[1].position = {0.81, 0, 0};
  EXPECT_NEAR(adjust_speeds(s)[0], 1.0, 1e-12);
  s[1].position = {0.2, 0, 0.5};  // ~68 degrees off
  EXPECT_NEAR(adjust_speeds(s)[0], 1.0, 1e-12);
}

TEST(AdjustSpeeds, LoneCharacterRecovers) {
  std::vector<CharacterState> s{walker(1, {0, 0, 0}, 0.0, 0.5, 1.1)};
  EXPECT_NEAR(adjust_speeds(s)[0], 0.515, 1e-12);
}

TEST(AdjustSpeeds, PermutationInvariant) {
  RngStream rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<CharacterState> s;
    for (int i = 0; i < 8; ++i) {
      s.push_back(walker(i + 1, {sample_real(rng, -1.5, 1.5), 0, sample_real(rng, -1.5, 1.5)},
                         sample_real(rng, 0, 360), sample_real(rng, 0.1, 1.2), 1.2));
    }
    const auto base = adjust_speeds(s);
    std::map<int, double> by_id;
    for (std::size_t i = 0; i < s.size(); ++i) by_id[s[i].person_id] = base[i];
    std::vector<std::size_t> order(s.size());
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = order.size() - 1; i > 0; --i)
      std::swap(order[i], order[static_cast<std::size_t>(sample_int(rng, 0, static_cast<std::int64_t>(i)))]);
    std::vector<CharacterState> shuffled;
    for (auto k : order) shuffled.push_back(s[k]);
    const auto again = adjust_speeds(shuffled);
    for (std::size_t i = 0; i < shuffled.size(); ++i) EXPECT_EQ(again[i], by_id[shuffled[i].person_id]);
  }
}

TEST(Step, WalkerDisplacement) {
  auto s = one_group({walker(1, {0, 0, 0}, 90.0)});
  step(s, 0.05);
  const Eigen::Vector3d p = s.groups[0].characters[0].position;
  EXPECT_NEAR(p.x(), 0.0, 1e-15);
  EXPECT_NEAR(p.z(), 0.07, 1e-15);
}

TEST(Step, InPlaceActionDoesNotMove) {
  auto c = walker(1, {1, 0, 2}, 45.0);
  c.action = AtomicAction::kIdle;
  c.nominal_speed = 0.0;
  auto s = one_group({c}, false);
  for (int i = 0; i < 10; ++i) step(s, 0.37);
  EXPECT_EQ(s.groups[0].characters[0].position, c.position);
  EXPECT_EQ(s.groups[0].characters[0].heading, 45.0);
}

TEST(Step, PhaseAdvancesAndWraps) {
  auto c = walker(1, {0, 0, 0}, 0.0);
  c.cycle_length = 2.0;
  c.phase = 0.9;
  auto s = one_group({c}, false);
  step(s, 0.5);
  EXPECT_NEAR(s.groups[0].characters[0].phase, 0.15, 1e-12);
}

TEST(Step, RejectsNonPositiveDt) {
  auto s = one_group({walker(1, {0, 0, 0}, 0.0)});
  EXPECT_THROW(step(s, 0.0), Error);
}

TEST(Step, ConstantSpeedNoDrift) {
  auto c = walker(1, {0.3, 0, -0.2}, 33.0);
  c.stride_factor = 1.07;
  auto s = one_group({c}, false);
  const int n = 1000;
  const double dt = 1.0 / 30.0;
  for (int i = 0; i < n; ++i) step(s, dt);
  const Eigen::Vector3d expected = c.position + n * 1.4 * 1.07 * dt * heading_to_forward(33.0);
  EXPECT_LT((s.groups[0].characters[0].position - expected).norm(), 1e-9 * n);
}

TEST(Simulate, FollowerBacksOffInsteadOfCollidingFromBehind) {
  auto make = [] {
    return one_group({walker(1, {-1.5, 0, 0}, 0.0, 1.2, 1.2), walker(2, {0, 0, 0}, 0.0, 0.6, 0.6)});
  };
  SimulateOptions on, off;
  off.speed.enabled = false;
  const auto with = simulate(make(), 150, 30.0, on);
  const auto without = simulate(make(), 150, 30.0, off);
  EXPECT_GT(min_pair_distance(with.motions[0]), 0.45);
  EXPECT_LT(min_pair_distance(without.motions[0]), 0.45);
  EXPECT_EQ(collision_frequency(with.motions[0]), 0.0);
  EXPECT_GT(collision_frequency(without.motions[0]), 0.0);
}

TEST(Simulate, SingleFileSameSpeedNeverCollides) {
  for (double interval : {0.9, 1.0, 1.2, 1.5}) {
    std::vector<CharacterState> chars;
    for (int i = 0; i < 10; ++i) chars.push_back(walker(i + 1, {-i * interval, 0, 0}, 0.0, 1.05, 1.05));
    const auto r = simulate(one_group(chars), 150, 30.0);
    EXPECT_EQ(collision_frequency(r.motions[0]), 0.0) << interval;
  }
}

TEST(Simulate, SpeedBoundsHold) {
  RngStream rng(3);
  std::vector<CharacterState> chars;
  for (int i = 0; i < 9; ++i) {
    const double init = sample_real(rng, 0.8, 1.2);
    chars.push_back(walker(i + 1, {sample_real(rng, -2, 2), 0, sample_real(rng, -2, 2)}, sample_real(rng, 0, 360),
                           init, init));
  }
  const auto r = simulate(one_group(chars), 300, 30.0);
  const auto& m = r.motions[0];
  for (int p = 0; p < m.persons(); ++p)
    for (int t = 0; t < m.frames; ++t) {
      EXPECT_GE(m.at(p, t).speed, 0.1 - 1e-15);
      EXPECT_LE(m.at(p, t).speed, chars[static_cast<std::size_t>(p)].init_speed + 1e-15);
    }
}

TEST(Simulate, FrameCountsAndClipDuration) {
  const AssetCatalog cat = build_default_catalog({}, RngStream(1));
  AuthoringParams p;
  p.max_num_groups = 3;
  const auto scene = instantiate_scene(p, cat, RngStream(4));
  for (auto [frames, fps] : {std::pair{100, 20.0}, std::pair{150, 30.0}}) {
    const auto r = simulate(scene, cat, frames, fps);
    ASSERT_EQ(r.motions.size(), scene.groups.size());
    EXPECT_EQ(r.trace.size(), static_cast<std::size_t>(frames));
    for (const auto& m : r.motions) {
      EXPECT_EQ(m.frames, frames);
      EXPECT_EQ(m.fps, fps);
      EXPECT_NO_THROW(m.validate());
    }
    EXPECT_DOUBLE_EQ(frames / fps, frames == 100 ? 5.0 : 5.0);
  }
}

TEST(Simulate, StaticTalkingGroup) {
  const AssetCatalog cat = build_default_catalog({}, RngStream(1));
  RngStream rng(8);
  SceneInstance scene;
  scene.groups.push_back(author_group(GroupActivity::kTalking, 5, {1, 0, 1}, 0.0, 1.0, rng, cat));
  scene.groups[0].group_id = 1;
  const auto r = simulate(scene, cat, 150, 30.0);
  const auto& m = r.motions[0];
  for (int p = 0; p < m.persons(); ++p)
    for (int t = 1; t < m.frames; ++t) EXPECT_EQ(m.at(p, t).position, m.at(p, 0).position);
}

TEST(Simulate, Deterministic) {
  const AssetCatalog cat = build_default_catalog({}, RngStream(1));
  AuthoringParams p;
  p.max_num_groups = 3;
  const auto scene = instantiate_scene(p, cat, RngStream(12));
  SimulateOptions o;
  o.joints = true;
  const auto a = simulate(scene, cat, 40, 30.0, o);
  const auto b = simulate(scene, cat, 40, 30.0, o);
  for (std::size_t g = 0; g < a.motions.size(); ++g) {
    EXPECT_EQ(a.motions[g].joints, b.motions[g].joints);
    for (std::size_t k = 0; k < a.motions[g].samples.size(); ++k)
      EXPECT_EQ(a.motions[g].samples[k].position, b.motions[g].samples[k].position);
  }
}

TEST(Simulate, JointBlockShape) {
  auto s = one_group({walker(1, {0, 0, 0}, 0.0), walker(2, {0, 0, 2}, 0.0)});
  SimulateOptions o;
  o.joints = true;
  const auto r = simulate(s, 150, 30.0, o);
  EXPECT_EQ(r.motions[0].joints.size(), 46800u);
  for (double v : r.motions[0].joints) ASSERT_TRUE(std::isfinite(v));
}

TEST(Simulate, InvalidArguments) {
  auto s = one_group({walker(1, {0, 0, 0}, 0.0)});
  EXPECT_THROW(simulate(s, 0, 30.0), Error);
  EXPECT_THROW(simulate(s, 10, 0.0), Error);
}

TEST(GroupMotion, ValidateCatchesShapeErrors) {
  GroupMotion m;
  m.frames = 2;
  m.person_ids = {1};
  m.body_radii = {0.225};
  m.heights = {1.7};
  m.samples.resize(2);
  EXPECT_NO_THROW(m.validate());
  m.joints.resize(10);
  EXPECT_THROW(m.validate(), Error);
  m.joints.clear();
  m.samples.resize(3);
  EXPECT_THROW(m.validate(), Error);
}

TEST(SkeletonPose, GroundedAndHeightScaled) {
  auto c = walker(1, {2, 0, 3}, 120.0);
  c.height = 1.7;
  const auto pose = skeleton_pose(c);
  EXPECT_GT(pose.col(1).maxCoeff(), 1.5);
  EXPECT_GT(pose.col(1).minCoeff(), -0.1);
  c.height = 1.9;
  EXPECT_GT(skeleton_pose(c).col(1).maxCoeff(), pose.col(1).maxCoeff());
  // Pelvis sits above the ground position.
  EXPECT_NEAR(pose(0, 0), 2.0, 1e-9);
  EXPECT_NEAR(pose(0, 2), 3.0, 1e-9);
}
