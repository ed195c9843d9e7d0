#include "groupsim/authoring.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "groupsim/geometry.hpp"

namespace groupsim {
namespace {

constexpr std::array<std::string_view, kNumGroupActivities> kActivityNames = {
    "Walking", "Waiting", "Queueing", "Talking", "Dancing", "Jogging"};
constexpr std::array<std::string_view, 8> kShapeNames = {
    "StraightLine", "MultiRowLines", "Circle", "Rectangle", "OneCornerLine", "TwoCornerLine", "Parabola", "Curve"};
constexpr std::array<std::string_view, 3> kFaceRuleNames = {"SameDirection", "FrontOfQueue", "GroupCenter"};

using A = AtomicAction;
using S = AlignmentShape;

const std::array<GroupActivitySpec, kNumGroupActivities> kSpecs = {{
    {GroupActivity::kWalking, {S::kStraightLine, S::kCircle, S::kRectangle}, FaceRule::kSameDirection,
     {A::kWalk}, true, false, false},
    {GroupActivity::kWaiting, {S::kMultiRowLines}, FaceRule::kSameDirection,
     {A::kIdle, A::kText, A::kTalk, A::kPoint, A::kWave}, false, false, true},
    {GroupActivity::kQueueing,
     {S::kStraightLine, S::kOneCornerLine, S::kTwoCornerLine, S::kParabola, S::kCurve}, FaceRule::kFrontOfQueue,
     {A::kIdle, A::kText, A::kTalk, A::kPoint}, false, false, true},
    {GroupActivity::kTalking, {S::kCircle}, FaceRule::kGroupCenter, {A::kTalk}, false, false, false},
    {GroupActivity::kDancing, {S::kMultiRowLines}, FaceRule::kSameDirection, {A::kDance}, false, true, false},
    {GroupActivity::kJogging, {S::kStraightLine, S::kCircle, S::kRectangle}, FaceRule::kSameDirection,
     {A::kRun}, true, false, false},
}};

void check_alignment_args(int n, double interval) {
  if (n < 1) throw Error(ErrorCode::kInvalidCount, "formation needs at least one member");
  if (!(interval > 0.0) || !std::isfinite(interval)) {
    throw Error(ErrorCode::kInvalidInterval, "interval must be positive");
  }
}

void center_on_centroid(std::vector<Placement>& ps) {
  Eigen::Vector3d c = Eigen::Vector3d::Zero();
  for (const auto& p : ps) c += p.position;
  c /= static_cast<double>(ps.size());
  for (auto& p : ps) p.position -= c;
}

std::vector<Placement> from_points(const std::vector<Eigen::Vector3d>& pts) {
  std::vector<Placement> ps(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) ps[i].position = pts[i];
  center_on_centroid(ps);
  return ps;
}

// Members walk along a polyline; turn_after lists member indices at which the
// line turns by the matching signed angle.
std::vector<Eigen::Vector3d> bent_line(int n, double interval, const std::vector<std::pair<int, double>>& turns) {
  std::vector<Eigen::Vector3d> pts;
  pts.reserve(static_cast<std::size_t>(n));
  Eigen::Vector3d p = Eigen::Vector3d::Zero();
  double heading = 0.0;
  std::size_t next_turn = 0;
  for (int k = 0; k < n; ++k) {
    if (k > 0) p += interval * heading_to_forward(heading);
    pts.push_back(p);
    if (next_turn < turns.size() && turns[next_turn].first == k) {
      heading += turns[next_turn].second;
      ++next_turn;
    }
  }
  return pts;
}

double parabola_arc(double a, double x) {
  const double t = 2.0 * a * x;
  return 0.5 * x * std::sqrt(1.0 + t * t) + std::asinh(t) / (4.0 * a);
}

// Inverse of the arc length measured from the vertex.
double parabola_x_at_arc(double a, double s) {
  double x = s;
  for (int it = 0; it < 60; ++it) {
    const double f = parabola_arc(a, x) - s;
    const double df = std::sqrt(1.0 + 4.0 * a * a * x * x);
    const double step = f / df;
    x -= step;
    if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(x))) break;
  }
  return x;
}

std::vector<Eigen::Vector3d> parabola_points(int n, double interval, RngStream& rng) {
  const double a = sample_real(rng, 0.05, 0.3);
  std::vector<Eigen::Vector3d> pts;
  for (int k = 0; k < n; ++k) {
    const double s = (k - 0.5 * (n - 1)) * interval;
    const double x = parabola_x_at_arc(a, s);
    pts.emplace_back(x, 0.0, a * x * x);
  }
  return pts;
}

std::vector<Eigen::Vector3d> curve_points(int n, double interval, RngStream& rng) {
  const double length = (n - 1) * interval;
  const Eigen::Vector2d p0(0.0, 0.0);
  const Eigen::Vector2d p1(length / 3.0, sample_real(rng, -0.5 * length, 0.5 * length));
  const Eigen::Vector2d p2(2.0 * length / 3.0, sample_real(rng, -0.5 * length, 0.5 * length));
  const Eigen::Vector2d p3(length, 0.0);
  auto bezier = [&](double t) {
    const double u = 1.0 - t;
    return Eigen::Vector2d(u * u * u * p0 + 3 * u * u * t * p1 + 3 * u * t * t * p2 + t * t * t * p3);
  };

  constexpr int kSegments = 8192;
  std::vector<Eigen::Vector2d> samples(kSegments + 1);
  std::vector<double> arc(kSegments + 1, 0.0);
  for (int i = 0; i <= kSegments; ++i) {
    samples[static_cast<std::size_t>(i)] = bezier(static_cast<double>(i) / kSegments);
    if (i > 0) {
      arc[static_cast<std::size_t>(i)] =
          arc[static_cast<std::size_t>(i - 1)] +
          (samples[static_cast<std::size_t>(i)] - samples[static_cast<std::size_t>(i - 1)]).norm();
    }
  }
  // Scale so the arc length equals the formation length.
  const double scale = length / arc.back();

  std::vector<Eigen::Vector3d> pts;
  for (int k = 0; k < n; ++k) {
    const double target = k * interval / scale;
    auto it = std::lower_bound(arc.begin(), arc.end(), target);
    std::size_t hi = static_cast<std::size_t>(std::distance(arc.begin(), it));
    hi = std::clamp<std::size_t>(hi, 1, arc.size() - 1);
    const std::size_t lo = hi - 1;
    const double w = arc[hi] > arc[lo] ? (target - arc[lo]) / (arc[hi] - arc[lo]) : 0.0;
    const Eigen::Vector2d q = scale * (samples[lo] + std::clamp(w, 0.0, 1.0) * (samples[hi] - samples[lo]));
    pts.emplace_back(q.x(), 0.0, q.y());
  }
  return pts;
}

std::vector<Eigen::Vector3d> rectangle_points(int n, double interval, RngStream& rng) {
  const double half_perimeter = 0.5 * n * interval;
  const double a = half_perimeter * sample_real(rng, 0.5, 0.75);
  const double b = half_perimeter - a;
  std::vector<Eigen::Vector3d> pts;
  for (int k = 0; k < n; ++k) {
    double s = k * interval;
    if (s < a) {
      pts.emplace_back(s, 0.0, 0.0);
    } else if ((s -= a) < b) {
      pts.emplace_back(a, 0.0, s);
    } else if ((s -= b) < a) {
      pts.emplace_back(a - s, 0.0, b);
    } else {
      s -= a;
      pts.emplace_back(0.0, 0.0, b - s);
    }
  }
  return pts;
}

double random_turn(RngStream& rng) { return rng.next_unit() < 0.5 ? 90.0 : -90.0; }

}  // namespace

std::string_view to_string(GroupActivity activity) { return kActivityNames[static_cast<std::size_t>(activity)]; }
std::string_view to_string(AlignmentShape shape) { return kShapeNames[static_cast<std::size_t>(shape)]; }
std::string_view to_string(FaceRule rule) { return kFaceRuleNames[static_cast<std::size_t>(rule)]; }

std::optional<GroupActivity> parse_group_activity(std::string_view name) {
  for (std::size_t i = 0; i < kActivityNames.size(); ++i) {
    if (kActivityNames[i] == name) return static_cast<GroupActivity>(i);
  }
  return std::nullopt;
}

std::optional<AlignmentShape> parse_alignment_shape(std::string_view name) {
  for (std::size_t i = 0; i < kShapeNames.size(); ++i) {
    if (kShapeNames[i] == name) return static_cast<AlignmentShape>(i);
  }
  return std::nullopt;
}

const std::array<GroupActivity, kNumGroupActivities>& all_group_activities() {
  static const std::array<GroupActivity, kNumGroupActivities> all = {
      GroupActivity::kWalking, GroupActivity::kWaiting, GroupActivity::kQueueing,
      GroupActivity::kTalking, GroupActivity::kDancing, GroupActivity::kJogging};
  return all;
}

const GroupActivitySpec& activity_spec(GroupActivity activity) { return kSpecs[static_cast<std::size_t>(activity)]; }

double GroupInstance::formation_radius() const {
  double r = 0.0;
  for (const auto& m : members) r = std::max(r, (m.placement.position - center).norm());
  return r;
}

Eigen::Vector3d SceneInstance::groups_centroid() const {
  Eigen::Vector3d c = Eigen::Vector3d::Zero();
  if (groups.empty()) return c;
  for (const auto& g : groups) c += g.center;
  return c / static_cast<double>(groups.size());
}

int SceneInstance::person_count() const {
  int n = 0;
  for (const auto& g : groups) n += static_cast<int>(g.members.size());
  return n;
}

std::vector<Placement> align(AlignmentShape shape, int n, double interval, RngStream& rng) {
  check_alignment_args(n, interval);
  if (n == 1) return std::vector<Placement>(1);

  switch (shape) {
    case S::kStraightLine:
      return from_points(bent_line(n, interval, {}));

    case S::kCircle: {
      const double radius = n * interval / (2.0 * std::numbers::pi);
      std::vector<Eigen::Vector3d> pts;
      for (int k = 0; k < n; ++k) {
        const double t = 2.0 * std::numbers::pi * k / n;
        pts.emplace_back(radius * std::cos(t), 0.0, radius * std::sin(t));
      }
      // Evenly spaced points are already centered; skip the centroid shift so
      // radii stay exact.
      std::vector<Placement> ps(pts.size());
      for (std::size_t i = 0; i < pts.size(); ++i) ps[i].position = pts[i];
      return ps;
    }

    case S::kRectangle:
      return from_points(rectangle_points(n, interval, rng));

    case S::kMultiRowLines: {
      const int per_row = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
      std::vector<Eigen::Vector3d> pts;
      for (int k = 0; k < n; ++k) {
        const int row = k / per_row;
        const int col = k % per_row;
        // Rows are side-by-side lines across the facing direction (+x).
        pts.emplace_back(-row * interval, 0.0, col * interval);
      }
      return from_points(pts);
    }

    case S::kOneCornerLine: {
      if (n < 3) return from_points(bent_line(n, interval, {}));
      const int corner = static_cast<int>(sample_int(rng, 1, n - 2));
      return from_points(bent_line(n, interval, {{corner, random_turn(rng)}}));
    }

    case S::kTwoCornerLine: {
      if (n < 3) return from_points(bent_line(n, interval, {}));
      if (n == 3) return from_points(bent_line(n, interval, {{1, random_turn(rng)}}));
      const int first = static_cast<int>(sample_int(rng, 1, n - 3));
      const int second = static_cast<int>(sample_int(rng, first + 1, n - 2));
      const double t1 = random_turn(rng);
      const double t2 = random_turn(rng);
      return from_points(bent_line(n, interval, {{first, t1}, {second, t2}}));
    }

    case S::kParabola:
      return from_points(parabola_points(n, interval, rng));

    case S::kCurve:
      return from_points(curve_points(n, interval, rng));
  }
  throw Error(ErrorCode::kInvalidConfig, "unknown alignment shape");
}

void apply_face_rule(std::vector<Placement>& placements, FaceRule rule, double group_heading) {
  if (placements.empty()) return;
  const double base = wrap_degrees(group_heading);
  switch (rule) {
    case FaceRule::kSameDirection:
      for (auto& p : placements) p.heading = base;
      break;

    case FaceRule::kGroupCenter: {
      Eigen::Vector3d c = Eigen::Vector3d::Zero();
      for (const auto& p : placements) c += p.position;
      c /= static_cast<double>(placements.size());
      for (auto& p : placements) {
        const Eigen::Vector3d to_center = c - p.position;
        p.heading = to_center.norm() > 1e-12 ? heading_of(to_center) : base;
      }
      break;
    }

    case FaceRule::kFrontOfQueue: {
      for (std::size_t i = 1; i < placements.size(); ++i) {
        const Eigen::Vector3d ahead = placements[i - 1].position - placements[i].position;
        placements[i].heading = ahead.norm() > 1e-12 ? heading_of(ahead) : base;
      }
      // The front member keeps the direction the queue is facing.
      placements[0].heading = placements.size() > 1 ? placements[1].heading : base;
      break;
    }
  }
}

void perturb(std::vector<Placement>& placements, double interval, RngStream& rng, double position_fraction,
             double max_rotation_deg) {
  if (!(interval > 0.0)) throw Error(ErrorCode::kInvalidInterval, "interval must be positive");
  const double d = position_fraction * interval;
  for (auto& p : placements) {
    p.position.x() += sample_real(rng, -d, d);
    p.position.z() += sample_real(rng, -d, d);
    p.heading = wrap_degrees(p.heading + sample_real(rng, -max_rotation_deg, max_rotation_deg));
  }
}

AssignedMembers assign_actions(const GroupActivitySpec& spec, const std::vector<Placement>& placements,
                               RngStream& rng, const AssetCatalog& catalog) {
  if (spec.allowed_actions.empty()) {
    throw Error(ErrorCode::kEmptyAllowedActions, std::string(to_string(spec.activity)) + " allows no actions");
  }
  const int n = static_cast<int>(placements.size());
  AssignedMembers out;
  out.members.resize(placements.size());

  auto pick_clip = [&](AtomicAction action, RngStream& r) -> const ClipAsset& {
    const auto& candidates = catalog.clips_for(action);
    if (candidates.empty()) {
      throw Error(ErrorCode::kZeroCount, "catalog has no clip for action " + std::string(to_string(action)));
    }
    return catalog.clips[sample_choice(r, candidates)];
  };

  RngStream look_rng = rng.derive("look");
  RngStream action_rng = rng.derive("actions");
  RngStream anim_rng = rng.derive("animation");
  RngStream sub_rng = rng.derive("subgroups");

  for (int i = 0; i < n; ++i) {
    auto& m = out.members[static_cast<std::size_t>(i)];
    m.person_id = i + 1;
    m.placement = placements[static_cast<std::size_t>(i)];
    m.character_id = sample_choice(look_rng, catalog.characters).id;
    m.body_color = sample(look_rng, randomizers::kBodyColor);
    m.clothes_color = sample(look_rng, randomizers::kClothesColor);
  }

  if (spec.synchronous) {
    // One clip, one playback speed, and near-identical start times.
    const AtomicAction action = sample_choice(action_rng, spec.allowed_actions);
    const ClipAsset& clip = pick_clip(action, action_rng);
    const double speed = sample(anim_rng, randomizers::kAnimationSpeed);
    for (auto& m : out.members) {
      m.action = action;
      m.clip_id = clip.id;
      m.animation_speed_factor = speed;
      m.phase_offset = sample_real(anim_rng, 0.0, 0.1);
    }
    return out;
  }

  for (auto& m : out.members) {
    m.action = sample_choice(action_rng, spec.allowed_actions);
    m.clip_id = pick_clip(m.action, action_rng).id;
    m.animation_speed_factor = sample(anim_rng, randomizers::kAnimationSpeed);
    m.phase_offset = sample(anim_rng, randomizers::kNormalizedStartTime);
  }

  const bool can_talk = std::find(spec.allowed_actions.begin(), spec.allowed_actions.end(), A::kTalk) !=
                        spec.allowed_actions.end();
  if (spec.talk_subgroups && can_talk && n >= 2) {
    const int pairs = static_cast<int>(sample_int(sub_rng, 0, n / 2));
    // Lay out `pairs` dominoes and n - 2*pairs singles as n - pairs tokens,
    // choosing which tokens are dominoes uniformly.
    const int tokens = n - pairs;
    std::vector<int> order(static_cast<std::size_t>(tokens));
    std::iota(order.begin(), order.end(), 0);
    for (int i = tokens - 1; i > 0; --i) {
      std::swap(order[static_cast<std::size_t>(i)],
                order[static_cast<std::size_t>(sample_int(sub_rng, 0, i))]);
    }
    std::vector<bool> is_pair(static_cast<std::size_t>(tokens), false);
    for (int i = 0; i < pairs; ++i) is_pair[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = true;

    int member = 0;
    for (int t = 0; t < tokens; ++t) {
      if (!is_pair[static_cast<std::size_t>(t)]) {
        ++member;
        continue;
      }
      auto& a = out.members[static_cast<std::size_t>(member)];
      auto& b = out.members[static_cast<std::size_t>(member + 1)];
      for (auto* m : {&a, &b}) {
        if (m->action != A::kTalk) {
          m->action = A::kTalk;
          m->clip_id = pick_clip(A::kTalk, sub_rng).id;
        }
      }
      const Eigen::Vector3d ab = b.placement.position - a.placement.position;
      if (ab.norm() > 1e-12) {
        a.placement.heading = heading_of(ab);
        b.placement.heading = heading_of(Eigen::Vector3d(-ab));
      }
      out.subgroups.emplace_back(member, member + 1);
      member += 2;
    }
  }
  return out;
}

GroupInstance author_group(GroupActivity activity, int n, const Eigen::Vector3d& center, double group_heading,
                           double interval, RngStream& rng, const AssetCatalog& catalog,
                           std::optional<AlignmentShape> shape, double position_fraction,
                           double max_rotation_deg) {
  const GroupActivitySpec& spec = activity_spec(activity);
  RngStream shape_rng = rng.derive("shape");
  RngStream align_rng = rng.derive("align");
  RngStream perturb_rng = rng.derive("perturb");
  RngStream assign_rng = rng.derive("assign");

  GroupInstance g;
  g.activity = activity;
  g.alignment = shape ? *shape : sample_choice(shape_rng, spec.allowed_alignments);
  g.center = center;
  g.group_heading = wrap_degrees(group_heading);
  g.interval = interval;

  auto local = align(g.alignment, n, interval, align_rng);
  apply_face_rule(local, spec.face_rule, 0.0);
  perturb(local, interval, perturb_rng, position_fraction, max_rotation_deg);
  auto assigned = assign_actions(spec, local, assign_rng, catalog);

  const Eigen::Matrix3d rot = yaw_rotation(g.group_heading);
  for (auto& m : assigned.members) {
    m.placement.position = center + rot * m.placement.position;
    m.placement.position.y() = 0.0;
    m.placement.heading = wrap_degrees(m.placement.heading + g.group_heading);
  }
  g.members = std::move(assigned.members);
  g.subgroups = std::move(assigned.subgroups);
  return g;
}

SceneInstance instantiate_scene(const AuthoringParams& params, const AssetCatalog& catalog, RngStream rng) {
  if (params.max_num_groups < 1) throw Error(ErrorCode::kInvalidCount, "MaxNumGroups must be >= 1");
  if (params.max_num_characters < 1) throw Error(ErrorCode::kInvalidCount, "MaxNumCharacters must be >= 1");
  if (!(params.min_interval > 0.0) || !(params.min_interval <= params.max_interval)) {
    throw Error(ErrorCode::kInvalidInterval, "interval bounds must satisfy 0 < min <= max");
  }
  if (params.activities.empty()) throw Error(ErrorCode::kEmptyItems, "activity roster is empty");
  catalog.validate();

  SceneInstance scene;
  {
    RngStream r = rng.derive("scene");
    scene.scene_asset = sample_choice(r, catalog.scenes);
  }
  {
    RngStream r = rng.derive("hdri");
    scene.hdri = sample_choice(r, catalog.hdris);
  }
  {
    RngStream r = rng.derive("lighting_volume");
    scene.lighting_volume = sample_choice(r, catalog.lighting_volumes);
  }
  {
    static const std::vector<std::string> kLightTypes = {"directional", "point", "spot"};
    RngStream r = rng.derive("lights");
    const auto count = sample_int(r, 1, 3);
    for (std::int64_t i = 0; i < count; ++i) {
      LightRecord light;
      light.type = sample_choice(r, kLightTypes);
      light.position = sample(r, randomizers::kLightPosition);
      light.position.y() = sample(r, randomizers::kLightHeight);
      light.intensity = sample(r, randomizers::kLightIntensity);
      light.target = sample(r, randomizers::kLightTarget);
      scene.lights.push_back(light);
    }
  }

  RngStream groups_rng = rng.derive("groups");
  const int n_groups = static_cast<int>(sample_int(groups_rng, 1, params.max_num_groups));
  std::vector<double> radii;
  int next_person = 1;
  for (int gi = 0; gi < n_groups; ++gi) {
    RngStream gr = groups_rng.derive("group_" + std::to_string(gi));
    RngStream pick = gr.derive("pick");
    const GroupActivity activity = sample_choice(pick, params.activities, params.activity_weights);
    const int n = static_cast<int>(sample_int(pick, 1, params.max_num_characters));
    const double interval = sample_real(pick, params.min_interval, params.max_interval);
    const double heading = sample(pick, randomizers::kGroupRotation);

    GroupInstance g = author_group(activity, n, Eigen::Vector3d::Zero(), heading, interval, gr, catalog,
                                   std::nullopt, params.position_perturbation, params.rotation_perturbation_deg);
    const double radius = g.formation_radius() + params.group_margin;

    RngStream place_rng = gr.derive("placement");
    bool placed = false;
    Eigen::Vector3d center;
    for (int attempt = 0; attempt < params.max_placement_tries && !placed; ++attempt) {
      center = sample(place_rng, randomizers::kGroupPosition);
      placed = true;
      for (std::size_t j = 0; j < scene.groups.size(); ++j) {
        if ((scene.groups[j].center - center).norm() < radius + radii[j]) {
          placed = false;
          break;
        }
      }
    }
    if (!placed) {
      throw Error(ErrorCode::kPlacementFailure, "group " + std::to_string(gi) + " overlaps after " +
                                                    std::to_string(params.max_placement_tries) + " tries");
    }

    g.group_id = gi + 1;
    g.center = center;
    for (auto& m : g.members) {
      m.placement.position += center;
      m.person_id = next_person++;
    }
    scene.groups.push_back(std::move(g));
    radii.push_back(radius);
  }

  RngStream cam_rng = rng.derive("cameras");
  scene.cameras = place_cameras(scene.groups_centroid(), params.n_views, cam_rng, params.image_width,
                                params.image_height);
  return scene;
}

}  // namespace groupsim
