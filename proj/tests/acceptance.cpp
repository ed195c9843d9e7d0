// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "groupsim/pipeline.hpp"

using namespace groupsim;
namespace fs = std::filesystem;
using V3 = Eigen::Vector3d;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(10);
  s << v;
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("groupsim_acceptance_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CharacterState walker(int id, V3 pos, double heading, double speed) {
  CharacterState c;
  c.person_id = id;
  c.group_id = 1;
  c.position = pos;
  c.heading = heading;
  c.speed = speed;
  c.init_speed = speed;
  c.action = AtomicAction::kWalk;
  c.nominal_speed = 1.4;
  c.stride_factor = 1.0;
  c.cycle_length = 1.1;
  return c;
}

Outcome speed_rule() {
  Outcome o;
  auto pair = [](V3 other, double speed, double init) {
    std::vector<CharacterState> s{walker(1, V3::Zero(), 0.0, speed), walker(2, other, 0.0, 1.0)};
    s[0].init_speed = init;
    return adjust_speeds(s)[0];
  };
  const double a = pair({0.5, 0, 0}, 1.0, 1.0);
  const double b = pair({0.5, 0, 0}, 0.1, 1.0);
  const double c = pair({-0.5, 0, 0}, 0.96, 1.0);
  const double d = pair({3.0, 0, 0}, 0.995, 1.0);
  o.require(std::abs(a - 0.96) <= 1e-12, "blocked: " + fmt(a));
  o.require(std::abs(b - 0.1) <= 1e-12, "floor: " + fmt(b));
  o.require(std::abs(c - 0.9888) <= 1e-12, "recover: " + fmt(c));
  o.require(std::abs(d - 1.0) <= 1e-12, "cap: " + fmt(d));
  if (o.ok) o.detail = "0.96 / 0.1 / 0.9888 / 1.0";
  return o;
}

Outcome force_kernels() {
  Outcome o;
  const double boundary = interaction_force<double>(V3(0.45, 0, 0), V3::Zero(), 0.225, 0.225).norm();
  const double hand = interaction_force<double>(V3(0.53, 0, 0), V3::Zero(), 0.225, 0.225).norm();
  const double outside = contact_force<double>(V3(0.46, 0, 0), V3::Zero(), 0.225, 0.225).norm();
  const double at_edge = contact_force<double>(V3(0.45, 0, 0), V3::Zero(), 0.225, 0.225).norm();
  const double overlap = contact_force<double>(V3(0.44, 0, 0), V3::Zero(), 0.225, 0.225).norm();
  o.require(std::abs(boundary - 2000.0) <= 1e-6, "boundary " + fmt(boundary));
  o.require(std::abs(hand - 735.758882) <= 1e-6, "hand " + fmt(hand));
  o.require(outside == 0.0 && at_edge == 0.0, "contact outside overlap");
  o.require(std::abs(overlap - 1200.0) <= 1e-9, "overlap " + fmt(overlap));
  RngStream rng(1);
  for (int k = 0; k < 10000 && o.ok; ++k) {
    const V3 a(sample_real(rng, -2, 2), 0, sample_real(rng, -2, 2));
    const V3 b(sample_real(rng, -2, 2), 0, sample_real(rng, -2, 2));
    const double ri = sample_real(rng, 0.1, 0.3), rj = sample_real(rng, 0.1, 0.3);
    o.require(total_force<double>(a, b, ri, rj) == -total_force<double>(b, a, rj, ri), "antisymmetry at " +
                                                                                           std::to_string(k));
  }
  if (o.ok) o.detail = "A=" + fmt(boundary) + " f(0.53)=" + fmt(hand) + " contact=" + fmt(overlap);
  return o;
}

// Walkers in a staggered file heading the same way; members further back start
// faster, so gaps close unless the speed rule intervenes.
SceneState converging_group(std::uint64_t seed) {
  RngStream rng(seed);
  const int n = static_cast<int>(sample_int(rng, 4, 10));
  GroupState g;
  g.group_id = 1;
  g.activity = GroupActivity::kWalking;
  g.speed_adjusted = true;
  double x = 0.0;
  for (int i = 0; i < n; ++i) {
    const double speed = 0.6 + 0.6 * static_cast<double>(i) / (n - 1) + sample_real(rng, -0.05, 0.05);
    g.characters.push_back(
        walker(i + 1, V3(x, 0, sample_real(rng, -0.15, 0.15)), sample_real(rng, -3.0, 3.0), speed));
    x -= sample_real(rng, 0.9, 1.5);
  }
  SceneState s;
  s.groups.push_back(std::move(g));
  return s;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

Outcome collision_avoidance() {
  Outcome o;
  std::vector<double> on, off;
  SimulateOptions with, without;
  without.speed.enabled = false;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    on.push_back(collision_frequency(simulate(converging_group(seed), 150, 30.0, with).motions[0]));
    off.push_back(collision_frequency(simulate(converging_group(seed), 150, 30.0, without).motions[0]));
  }
  const double m_on = median(on), m_off = median(off);
  o.require(m_on < m_off, "enabled median not below disabled");
  o.require(m_on < 0.2, "enabled median >= 0.2");
  o.detail = "median enabled=" + fmt(m_on) + " disabled=" + fmt(m_off);
  return o;
}

Outcome dataset_statistics() {
  Outcome o;
  const fs::path root = scratch("stats");
  SimulationConfig c = preset("3d");
  c.master_seed = 7;
  c.n_simulations = 2000;
  c.joints = false;
  c.output_root = root;
  const auto summary = generate_dataset(c, 4);
  o.require(summary.succeeded == 2000, "failed simulations: " + std::to_string(summary.failed));
  const auto stats = dataset_stats_from_disk(root);
  const double mean = stats.mean_persons_per_group;
  o.require(std::abs(mean - 7.0) <= 0.2, "mean persons/group " + fmt(mean));
  for (std::uint64_t i = 0; i < 2000 && o.ok; ++i) {
    const auto m = read_motion3d(root / simulation_dir_name(i) / "motion3d.bin");
    for (const auto& g : m.groups) {
      o.require(g.frames == 150 && g.fps == 30.0, "timing of sim " + std::to_string(i));
    }
  }
  fs::remove_all(root);
  if (o.ok) o.detail = "mean persons/group=" + fmt(mean) + " over " + std::to_string(stats.groups) + " groups";
  return o;
}

Outcome determinism() {
  Outcome o;
  SimulationConfig c = preset("3d");
  c.master_seed = 99;
  c.n_simulations = 50;
  std::vector<std::string> manifests;
  for (int jobs : {1, 1, 4}) {
    const fs::path root = scratch("det_" + std::to_string(manifests.size()));
    c.output_root = root;
    generate_dataset(c, jobs);
    manifests.push_back(slurp(root / "manifest.json"));
    fs::remove_all(root);
  }
  o.require(!manifests[0].empty(), "empty manifest");
  o.require(manifests[0] == manifests[1], "repeat run differs");
  o.require(manifests[0] == manifests[2], "jobs=4 differs from jobs=1");
  if (o.ok) o.detail = "3 runs, " + std::to_string(manifests[0].size()) + " manifest bytes identical";
  return o;
}

Outcome projection() {
  Outcome o;
  const CameraModel cam({0, 1, 0}, {10, 1, 0}, 60);
  const auto pp = project_point(cam, {7, 1, 0});
  o.require(pp && std::abs(pp->x() - 960.0) <= 0.01 && std::abs(pp->y() - 540.0) <= 0.01, "principal point");
  o.require(!project_point(cam, {-3, 1, 0}), "behind camera projected");
  const auto c0 = project_point(cam, {10, 1, 0});
  const auto c1 = project_point(cam, {10, 1, 1});
  o.require(c0 && c1 && std::abs(std::abs(c1->x() - c0->x()) - 93.53) <= 0.01, "lateral offset");

  RngStream rng(21);
  int contained = 0;
  for (int i = 0; i < 1000 && o.ok; ++i) {
    const auto cams = place_cameras(V3::Zero(), 1, rng);
    const V3 ground(sample_real(rng, -4, 4), 0, sample_real(rng, -4, 4));
    const CharacterBox ch{ground, sample_real(rng, 0.15, 0.3), sample_real(rng, 1.5, 1.9)};
    const auto gp = project_point(cams[0], ground);
    if (!gp || gp->x() < 0 || gp->x() > 1920 || gp->y() < 0 || gp->y() > 1080) continue;
    const auto box = bbox_for_character(cams[0], ch);
    o.require(box && gp->x() >= box->left - 1e-9 && gp->x() <= box->right() + 1e-9 &&
                  gp->y() >= box->top - 1e-9 && gp->y() <= box->bottom() + 1e-9,
              "containment at draw " + std::to_string(i));
    ++contained;
  }
  for (int i = 0; i < 1000 && o.ok; ++i) {
    const double az = sample_real(rng, 0, 360), h = sample_real(rng, 1, 5), fov = sample_real(rng, 40, 70);
    const double r1 = sample_real(rng, 6, 10), r2 = r1 + sample_real(rng, 0.05, 4);
    auto cam_at = [&](double radius) {
      V3 pos = radius * heading_to_forward(az);
      pos.y() = h;
      return CameraModel(pos, V3::Zero(), fov);
    };
    const CharacterBox ch{V3::Zero(), 0.225, sample_real(rng, 1.5, 1.9)};
    const auto near_box = bbox_for_character(cam_at(r1), ch);
    const auto far_box = bbox_for_character(cam_at(r2), ch);
    o.require(near_box && far_box && near_box->height > far_box->height, "monotonicity at draw " + std::to_string(i));
  }
  if (o.ok) o.detail = "offset=" + fmt(std::abs(c1->x() - c0->x())) + " px, " + std::to_string(contained) +
                       " containment draws";
  return o;
}

FeatureSet gaussian_set(RngStream& rng, int n, int dim, double shift, double scale) {
  std::vector<Eigen::VectorXd> v;
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd x(dim);
    for (int d = 0; d < dim; ++d) {
      const double u1 = 1.0 - rng.next_unit(), u2 = rng.next_unit();
      x[d] = shift + scale * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
    v.push_back(x);
  }
  return make_feature_set(v);
}

std::pair<double, double> pair_moments(const FeatureSet& s) {
  double sum = 0.0, sq = 0.0;
  long long n = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    for (Eigen::Index j = 0; j < s.size(); ++j) {
      if (i == j) continue;
      const double d = (s.vectors.row(i) - s.vectors.row(j)).norm();
      sum += d;
      sq += d * d;
      ++n;
    }
  const double mean = sum / n;
  return {mean, std::sqrt(std::max(0.0, sq / n - mean * mean))};
}

Outcome learning_kernels() {
  Outcome o;
  RngStream data(3);
  const auto a = gaussian_set(data, 200, 4, 0.0, 1.0);
  const double self = fid(a, a);
  o.require(std::abs(self) <= 1e-8, "fid(A,A)=" + fmt(self));
  const auto x = make_feature_set({Eigen::VectorXd::Constant(1, -1.0), Eigen::VectorXd::Constant(1, 1.0)});
  const auto y = make_feature_set({Eigen::VectorXd::Constant(1, 0.0), Eigen::VectorXd::Constant(1, 2.0)});
  const double one = fid(x, y);
  o.require(std::abs(one - 1.0) <= 1e-6, "1-D fid=" + fmt(one));

  const int pairs = 400;
  RngStream rng(11);
  const auto [mean, sd] = pair_moments(a);
  const double div = diversity(a, pairs, rng);
  o.require(std::abs(div - mean) <= 3.0 * sd / std::sqrt(pairs), "diversity " + fmt(div) + " vs " + fmt(mean));

  std::map<std::string, FeatureSet> classes{{"near", gaussian_set(data, 200, 3, 0.0, 0.3)},
                                            {"far", gaussian_set(data, 200, 3, 5.0, 2.0)}};
  double mm_mean = 0.0, mm_var = 0.0;
  for (const auto& [label, set] : classes) {
    const auto [m, s] = pair_moments(set);
    mm_mean += m / 2.0;
    mm_var += s * s / pairs / 4.0;
  }
  const double mm = multimodality(classes, pairs, rng);
  o.require(std::abs(mm - mm_mean) <= 3.0 * std::sqrt(mm_var), "multimodality " + fmt(mm) + " vs " + fmt(mm_mean));
  if (o.ok) o.detail = "fid(A,A)=" + fmt(self) + " fid1d=" + fmt(one) + " div=" + fmt(div) + "~" + fmt(mean);
  return o;
}

double simpson_arc(const V3& coef, double x0, double x1, int intervals = 2000) {
  auto f = [&](double x) {
    const double d = coef[1] + 2.0 * coef[2] * x;
    return std::sqrt(1.0 + d * d);
  };
  const double h = (x1 - x0) / intervals;
  double s = f(x0) + f(x1);
  for (int i = 1; i < intervals; ++i) s += (i % 2 ? 4.0 : 2.0) * f(x0 + i * h);
  return std::abs(s * h / 3.0);
}

Outcome formation_geometry() {
  Outcome o;
  RngStream rng(2);
  for (int n = 2; n <= 40 && o.ok; ++n) {
    const auto ps = align(AlignmentShape::kCircle, n, 0.6 + 0.02 * n, rng);
    V3 c = V3::Zero();
    for (const auto& p : ps) c += p.position;
    c /= n;
    const double r0 = (ps[0].position - c).norm();
    for (const auto& p : ps) o.require(std::abs((p.position - c).norm() - r0) <= 1e-9, "circle n=" + std::to_string(n));
  }
  for (int n = 2; n <= 27 && o.ok; ++n) {
    const auto ps = align(AlignmentShape::kStraightLine, n, 0.85, rng);
    for (std::size_t i = 1; i < ps.size(); ++i)
      o.require(std::abs((ps[i].position - ps[i - 1].position).norm() - 0.85) <= 1e-12,
                "line n=" + std::to_string(n));
  }
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 50 && o.ok; ++seed) {
    RngStream r(seed);
    const auto ps = align(AlignmentShape::kParabola, 7, 0.8, r);
    Eigen::Matrix3d V;
    V3 z;
    for (int k = 0; k < 3; ++k) {
      const auto& p = ps[static_cast<std::size_t>(k * 3)].position;
      V.row(k) << 1.0, p.x(), p.x() * p.x();
      z[k] = p.z();
    }
    const V3 coef = V.fullPivLu().solve(z);
    for (std::size_t i = 1; i < ps.size(); ++i) {
      const double err = std::abs(simpson_arc(coef, ps[i - 1].position.x(), ps[i].position.x()) - 0.8);
      worst = std::max(worst, err);
      o.require(err <= 1e-3, "parabola seed " + std::to_string(seed));
    }
  }
  const AssetCatalog cat = build_default_catalog({}, RngStream(1234));
  AuthoringParams p;
  p.max_num_groups = 3;
  int groups = 0;
  for (std::uint64_t seed = 0; groups < 10000 && o.ok; ++seed) {
    const auto scene = instantiate_scene(p, cat, RngStream(seed));
    for (const auto& g : scene.groups) {
      ++groups;
      const auto& allowed = activity_spec(g.activity).allowed_actions;
      for (const auto& m : g.members)
        o.require(std::find(allowed.begin(), allowed.end(), m.action) != allowed.end(),
                  "action outside activity set in seed " + std::to_string(seed));
    }
  }
  if (o.ok) o.detail = "parabola worst arc error=" + fmt(worst) + ", " + std::to_string(groups) + " groups checked";
  return o;
}

Outcome export_round_trips() {
  Outcome o;
  const fs::path root = scratch("export");
  RngStream rng(4);

  std::vector<AnnotationRecord> recs;
  for (int f = 1; f <= 20; ++f)
    for (int id = 1; id <= 5; ++id) {
      AnnotationRecord r;
      r.frame = f;
      r.person_id = id;
      r.group_id = id % 2 + 1;
      r.left = sample_real(rng, 0, 1800);
      r.top = sample_real(rng, 0, 900);
      r.width = sample_real(rng, 1, 100);
      r.height = sample_real(rng, 1, 300);
      r.action = static_cast<AtomicAction>(sample_int(rng, 0, 13));
      r.activity = static_cast<GroupActivity>(sample_int(rng, 0, 5));
      recs.push_back(r);
    }
  write_mot(recs, root / "gt.txt");
  const auto mot = read_mot(root / "gt.txt");
  o.require(mot.size() == recs.size(), "MOT record count");
  for (std::size_t i = 0; i < mot.size() && o.ok; ++i)
    o.require(mot[i].frame == recs[i].frame && mot[i].person_id == recs[i].person_id &&
                  std::abs(mot[i].left - recs[i].left) <= 1e-3 && std::abs(mot[i].top - recs[i].top) <= 1e-3 &&
                  std::abs(mot[i].width - recs[i].width) <= 1e-3 &&
                  std::abs(mot[i].height - recs[i].height) <= 1e-3,
              "MOT record " + std::to_string(i));

  std::vector<FrameMeta> frames;
  for (int f = 1; f <= 20; ++f) frames.push_back({f, "frame_" + std::to_string(f) + ".png"});
  CocoIdAllocator ids(0, 0, 1);
  write_coco(recs, frames, root / "annotations.json", ids);
  const auto coco = read_coco(root / "annotations.json");
  o.require(coco.size() == recs.size(), "COCO record count");
  for (std::size_t i = 0; i < coco.size() && o.ok; ++i)
    o.require(coco[i].frame == recs[i].frame && coco[i].person_id == recs[i].person_id &&
                  coco[i].group_id == recs[i].group_id && coco[i].left == recs[i].left &&
                  coco[i].width == recs[i].width && coco[i].action == recs[i].action &&
                  coco[i].activity == recs[i].activity,
              "COCO record " + std::to_string(i));

  GroupMotion m;
  m.group_id = 2;
  m.activity = "Walking";
  m.frames = 150;
  for (int p = 0; p < 2; ++p) {
    m.person_ids.push_back(p + 1);
    m.body_radii.push_back(0.225);
    m.heights.push_back(1.7);
  }
  m.samples.resize(300);
  for (auto& s : m.samples) {
    s.position = V3(sample_real(rng, -9, 9), 0, sample_real(rng, -9, 9));
    s.heading = sample_real(rng, 0, 360);
    s.action = AtomicAction::kWalk;
    s.speed = sample_real(rng, 0.1, 1.2);
  }
  m.joints.resize(2 * 150 * kNumJoints * kJointFeatures);
  for (auto& v : m.joints) v = sample_real(rng, -2, 2);
  o.require(m.joints.size() == 46800, "joint block " + std::to_string(m.joints.size()));
  write_motion3d(m, 3, root / "motion3d.bin");
  const auto back = read_motion3d(root / "motion3d.bin");
  o.require(back.seed == 3 && back.groups.size() == 1, "motion3d header");
  if (o.ok) {
    const auto& g = back.groups[0];
    bool same = g.group_id == m.group_id && g.activity == m.activity && g.frames == m.frames &&
                g.person_ids == m.person_ids && g.body_radii == m.body_radii && g.heights == m.heights &&
                g.joints == m.joints;
    for (std::size_t i = 0; i < m.samples.size() && same; ++i)
      same = g.samples[i].position == m.samples[i].position && g.samples[i].heading == m.samples[i].heading &&
             g.samples[i].action == m.samples[i].action && g.samples[i].speed == m.samples[i].speed;
    o.require(same, "motion3d contents");
  }
  fs::remove_all(root);
  if (o.ok) o.detail = "MOT/COCO " + std::to_string(recs.size()) + " records, motion3d 46800 joint reals";
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;  // 0 = no runtime bound
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "speed-adjust rule examples", 1.0, speed_rule},
      {2, "force kernels", 5.0, force_kernels},
      {3, "collision avoidance efficacy", 120.0, collision_avoidance},
      {4, "dataset statistics", 180.0, dataset_statistics},
      {5, "determinism across runs and jobs", 120.0, determinism},
      {6, "projection", 0.0, projection},
      {7, "learning-based kernels", 0.0, learning_kernels},
      {8, "formation geometry", 0.0, formation_geometry},
      {9, "export round-trips", 0.0, export_round_trips},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_s > 0 && secs > c.budget_s) {
      o.ok = false;
      o.detail += " (over " + fmt(c.budget_s) + " s budget)";
    }
    if (!o.ok) ++failed;
    std::printf("%s %d %s [%.2fs] %s\n", o.ok ? "PASS" : "FAIL", c.id, c.name, secs, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
