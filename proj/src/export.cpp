#include "groupsim/export.hpp"

#include <algorithm>
#include <bit>
#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace groupsim {
namespace {

constexpr char kMotionMagic[8] = {'G', 'S', 'M', 'O', 'T', '3', 'D', '\0'};
constexpr std::uint32_t kMotionVersion = 1;
constexpr std::uint32_t kFlagJoints = 1u;

class ByteWriter {
 public:
  void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void bytes(const char* p, std::size_t n) { buf_.append(p, n); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }
  const std::string& data() const { return buf_; }

 private:
  std::string buf_;
};

class ByteReader {
 public:
  ByteReader(std::string data, std::string name) : data_(std::move(data)), name_(std::move(name)) {}

  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(data_[pos_++]);
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(data_[pos_++])) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(data_[pos_++])) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const std::uint32_t n = u32();
    need(n);
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  void expect(const char* p, std::size_t n) {
    need(n);
    if (std::memcmp(data_.data() + pos_, p, n) != 0) throw Error(ErrorCode::kParseError, name_ + ": bad magic");
    pos_ += n;
  }
  bool done() const { return pos_ == data_.size(); }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) throw Error(ErrorCode::kParseError, name_ + ": truncated file");
  }
  std::string data_;
  std::string name_;
  std::size_t pos_ = 0;
};

void write_bytes(const std::string& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open " + path.string() + " for writing");
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
}

std::string read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json vec3(const Eigen::Vector3d& v) { return nlohmann::json::array({v.x(), v.y(), v.z()}); }

}  // namespace

std::vector<AnnotationRecord> annotate_view(const SimulationResult& sim, const SceneInstance& scene,
                                            const CameraModel& camera) {
  std::map<int, GroupActivity> activity_of;
  for (const auto& g : scene.groups) activity_of[g.group_id] = g.activity;

  std::vector<AnnotationRecord> records;
  for (std::size_t t = 0; t < sim.trace.size(); ++t) {
    const int frame = static_cast<int>(t) + 1;
    for (const auto& c : sim.trace[t].characters) {
      CharacterBox body{c.position, c.body_radius, c.height, c.person_id, c.group_id, frame};
      auto box = bbox_for_character(camera, body);
      if (!box) continue;
      AnnotationRecord r;
      r.frame = frame;
      r.person_id = c.person_id;
      r.group_id = c.group_id;
      r.left = box->left;
      r.top = box->top;
      r.width = box->width;
      r.height = box->height;
      r.action = c.action;
      r.activity = activity_of.at(c.group_id);
      records.push_back(r);
    }
  }
  std::sort(records.begin(), records.end(), [](const AnnotationRecord& a, const AnnotationRecord& b) {
    return a.frame != b.frame ? a.frame < b.frame : a.person_id < b.person_id;
  });
  return records;
}

void write_mot(std::span<const AnnotationRecord> records, const std::filesystem::path& path) {
  std::string out;
  char line[160];
  for (const auto& r : records) {
    const int n = std::snprintf(line, sizeof(line), "%d,%d,%.4f,%.4f,%.4f,%.4f,1,1,1.0\n", r.frame, r.person_id,
                                r.left, r.top, r.width, r.height);
    out.append(line, static_cast<std::size_t>(n));
  }
  write_bytes(out, path);
}

std::vector<AnnotationRecord> read_mot(const std::filesystem::path& path) {
  std::istringstream in(read_bytes(path));
  std::vector<AnnotationRecord> records;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    AnnotationRecord r;
    double conf = 0.0, visibility = 0.0;
    int cls = 0;
    if (std::sscanf(line.c_str(), "%d,%d,%lf,%lf,%lf,%lf,%lf,%d,%lf", &r.frame, &r.person_id, &r.left, &r.top,
                    &r.width, &r.height, &conf, &cls, &visibility) != 9) {
      throw Error(ErrorCode::kParseError, path.string() + ":" + std::to_string(lineno) + ": malformed MOT line");
    }
    r.visibility = visibility;
    records.push_back(r);
  }
  return records;
}

CocoIdAllocator::CocoIdAllocator(std::uint64_t sim_index, int view, int views_per_sim)
    : base_((sim_index * static_cast<std::uint64_t>(views_per_sim) + static_cast<std::uint64_t>(view)) << 32) {}

int action_category_id(AtomicAction action) { return static_cast<int>(action) + 1; }
int activity_category_id(GroupActivity activity) { return static_cast<int>(activity) + 101; }

nlohmann::json coco_document(std::span<const AnnotationRecord> records, std::span<const FrameMeta> frames,
                             CocoIdAllocator& ids, std::uint64_t master_seed) {
  nlohmann::json doc;
  doc["info"] = {{"description", "synthetic group activity annotations"},
                 {"master_seed", master_seed},
                 {"bbox_format", "xywh"},
                 {"visibility", "geometric proxy, no occlusion reasoning"}};

  std::map<int, std::uint64_t> image_of_frame;
  auto images = nlohmann::json::array();
  for (const auto& f : frames) {
    const auto id = ids.next_image_id();
    image_of_frame[f.frame] = id;
    images.push_back({{"id", id}, {"file_name", f.file_name}, {"width", f.width}, {"height", f.height},
                      {"frame_index", f.frame}});
  }
  doc["images"] = std::move(images);

  auto annotations = nlohmann::json::array();
  for (const auto& r : records) {
    auto it = image_of_frame.find(r.frame);
    if (it == image_of_frame.end()) {
      throw Error(ErrorCode::kInvalidCount, "annotation references frame " + std::to_string(r.frame) +
                                                " without an image entry");
    }
    annotations.push_back({{"id", ids.next_annotation_id()},
                           {"image_id", it->second},
                           {"category_id", action_category_id(r.action)},
                           {"activity_category_id", activity_category_id(r.activity)},
                           {"bbox", {r.left, r.top, r.width, r.height}},
                           {"area", r.width * r.height},
                           {"iscrowd", 0},
                           {"track_id", r.person_id},
                           {"group_id", r.group_id},
                           {"visibility", r.visibility}});
  }
  doc["annotations"] = std::move(annotations);

  auto categories = nlohmann::json::array();
  for (AtomicAction a : all_atomic_actions()) {
    categories.push_back({{"id", action_category_id(a)}, {"name", std::string(to_string(a))},
                          {"supercategory", "atomic_action"}});
  }
  for (GroupActivity g : all_group_activities()) {
    categories.push_back({{"id", activity_category_id(g)}, {"name", std::string(to_string(g))},
                          {"supercategory", "group_activity"}});
  }
  doc["categories"] = std::move(categories);
  return doc;
}

void write_coco(std::span<const AnnotationRecord> records, std::span<const FrameMeta> frames,
                const std::filesystem::path& path, CocoIdAllocator& ids, std::uint64_t master_seed) {
  write_json(coco_document(records, frames, ids, master_seed), path);
}

std::vector<AnnotationRecord> read_coco(const std::filesystem::path& path) {
  const auto doc = read_json(path);
  try {
    std::map<std::uint64_t, int> frame_of_image;
    for (const auto& img : doc.at("images")) {
      frame_of_image[img.at("id").get<std::uint64_t>()] = img.at("frame_index").get<int>();
    }
    std::vector<AnnotationRecord> records;
    for (const auto& a : doc.at("annotations")) {
      AnnotationRecord r;
      r.frame = frame_of_image.at(a.at("image_id").get<std::uint64_t>());
      r.person_id = a.at("track_id").get<int>();
      r.group_id = a.at("group_id").get<int>();
      const auto& bbox = a.at("bbox");
      r.left = bbox.at(0).get<double>();
      r.top = bbox.at(1).get<double>();
      r.width = bbox.at(2).get<double>();
      r.height = bbox.at(3).get<double>();
      const int action = a.at("category_id").get<int>() - 1;
      const int activity = a.at("activity_category_id").get<int>() - 101;
      if (action < 0 || action >= static_cast<int>(kNumAtomicActions) || activity < 0 ||
          activity >= static_cast<int>(kNumGroupActivities)) {
        throw Error(ErrorCode::kParseError, path.string() + ": unknown category id");
      }
      r.action = static_cast<AtomicAction>(action);
      r.activity = static_cast<GroupActivity>(activity);
      r.visibility = a.at("visibility").get<double>();
      records.push_back(r);
    }
    return records;
  } catch (const std::out_of_range& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
}

void write_motion3d(const Motion3dFile& file, const std::filesystem::path& path) {
  ByteWriter w;
  w.bytes(kMotionMagic, sizeof(kMotionMagic));
  w.u32(kMotionVersion);
  w.u64(file.seed);
  w.u32(static_cast<std::uint32_t>(file.groups.size()));
  for (const auto& m : file.groups) {
    m.validate();
    w.u32(static_cast<std::uint32_t>(m.group_id));
    w.str(m.activity);
    w.f64(m.fps);
    w.u32(static_cast<std::uint32_t>(m.persons()));
    w.u32(static_cast<std::uint32_t>(m.frames));
    w.u32(m.has_joints() ? kFlagJoints : 0u);
    for (int p = 0; p < m.persons(); ++p) {
      w.u32(static_cast<std::uint32_t>(m.person_ids[static_cast<std::size_t>(p)]));
      w.f64(m.body_radii[static_cast<std::size_t>(p)]);
      w.f64(m.heights[static_cast<std::size_t>(p)]);
    }
    for (int t = 0; t < m.frames; ++t) {
      for (int p = 0; p < m.persons(); ++p) {
        const auto& s = m.at(p, t);
        w.f64(s.position.x());
        w.f64(s.position.y());
        w.f64(s.position.z());
        w.f64(s.heading);
        w.u8(static_cast<std::uint8_t>(s.action));
        w.f64(s.speed);
      }
    }
    for (double v : m.joints) w.f64(v);
  }
  write_bytes(w.data(), path);
}

void write_motion3d(const GroupMotion& motion, std::uint64_t seed, const std::filesystem::path& path) {
  write_motion3d(Motion3dFile{seed, {motion}}, path);
}

Motion3dFile read_motion3d(const std::filesystem::path& path) {
  ByteReader r(read_bytes(path), path.string());
  r.expect(kMotionMagic, sizeof(kMotionMagic));
  const auto version = r.u32();
  if (version != kMotionVersion) {
    throw Error(ErrorCode::kParseError, path.string() + ": unsupported version " + std::to_string(version));
  }
  Motion3dFile file;
  file.seed = r.u64();
  const auto n_groups = r.u32();
  for (std::uint32_t g = 0; g < n_groups; ++g) {
    GroupMotion m;
    m.group_id = static_cast<int>(r.u32());
    m.activity = r.str();
    m.fps = r.f64();
    const auto P = r.u32();
    const auto T = r.u32();
    const auto flags = r.u32();
    m.frames = static_cast<int>(T);
    for (std::uint32_t p = 0; p < P; ++p) {
      m.person_ids.push_back(static_cast<int>(r.u32()));
      m.body_radii.push_back(r.f64());
      m.heights.push_back(r.f64());
    }
    m.samples.resize(static_cast<std::size_t>(P) * T);
    for (std::uint32_t t = 0; t < T; ++t) {
      for (std::uint32_t p = 0; p < P; ++p) {
        auto& s = m.at(static_cast<int>(p), static_cast<int>(t));
        s.position.x() = r.f64();
        s.position.y() = r.f64();
        s.position.z() = r.f64();
        s.heading = r.f64();
        const auto action = r.u8();
        if (action >= kNumAtomicActions) throw Error(ErrorCode::kParseError, path.string() + ": bad action code");
        s.action = static_cast<AtomicAction>(action);
        s.speed = r.f64();
      }
    }
    if (flags & kFlagJoints) {
      m.joints.resize(static_cast<std::size_t>(P) * T * kNumJoints * kJointFeatures);
      for (double& v : m.joints) v = r.f64();
    }
    m.validate();
    file.groups.push_back(std::move(m));
  }
  if (!r.done()) throw Error(ErrorCode::kParseError, path.string() + ": trailing bytes");
  return file;
}

nlohmann::json scene_document(const SceneInstance& scene, std::uint64_t master_seed, std::uint64_t sim_index,
                              std::uint64_t sim_seed, int frames, double fps) {
  nlohmann::json doc;
  doc["master_seed"] = master_seed;
  doc["sim_index"] = sim_index;
  doc["sim_seed"] = sim_seed;
  doc["frames"] = frames;
  doc["fps"] = fps;
  doc["scene_asset"] = scene.scene_asset;
  doc["hdri"] = scene.hdri;
  doc["lighting_volume"] = scene.lighting_volume;

  auto lights = nlohmann::json::array();
  for (const auto& l : scene.lights) {
    lights.push_back({{"type", l.type}, {"position", vec3(l.position)}, {"intensity", l.intensity},
                      {"target", vec3(l.target)}});
  }
  doc["lights"] = std::move(lights);

  auto groups = nlohmann::json::array();
  for (const auto& g : scene.groups) {
    nlohmann::json jg;
    jg["group_id"] = g.group_id;
    jg["activity"] = std::string(to_string(g.activity));
    jg["alignment"] = std::string(to_string(g.alignment));
    jg["center"] = vec3(g.center);
    jg["heading"] = g.group_heading;
    jg["interval"] = g.interval;
    auto members = nlohmann::json::array();
    for (const auto& m : g.members) {
      members.push_back({{"person_id", m.person_id},
                         {"character", m.character_id},
                         {"position", vec3(m.placement.position)},
                         {"heading", m.placement.heading},
                         {"action", std::string(to_string(m.action))},
                         {"clip", m.clip_id},
                         {"animation_speed", m.animation_speed_factor},
                         {"phase_offset", m.phase_offset},
                         {"body_color", {m.body_color[0], m.body_color[1], m.body_color[2], m.body_color[3]}},
                         {"clothes_color_hsv", vec3(m.clothes_color)}});
    }
    jg["members"] = std::move(members);
    auto subgroups = nlohmann::json::array();
    for (const auto& [a, b] : g.subgroups) subgroups.push_back({a, b});
    jg["subgroups"] = std::move(subgroups);
    groups.push_back(std::move(jg));
  }
  doc["groups"] = std::move(groups);

  auto cameras = nlohmann::json::array();
  for (std::size_t v = 0; v < scene.cameras.size(); ++v) {
    const auto& c = scene.cameras[v];
    nlohmann::json rot = nlohmann::json::array();
    for (int i = 0; i < 3; ++i) {
      rot.push_back({c.world_to_camera()(i, 0), c.world_to_camera()(i, 1), c.world_to_camera()(i, 2)});
    }
    cameras.push_back({{"view", v},
                       {"position", vec3(c.position())},
                       {"look_at", vec3(c.look_at())},
                       {"vertical_fov", c.vertical_fov()},
                       {"width", c.width()},
                       {"height", c.height()},
                       {"focal_px", c.focal()},
                       {"world_to_camera", std::move(rot)}});
  }
  doc["cameras"] = std::move(cameras);
  return doc;
}

void write_json(const nlohmann::json& doc, const std::filesystem::path& path) {
  write_bytes(doc.dump(1) + "\n", path);
}

nlohmann::json read_json(const std::filesystem::path& path) {
  const std::string text = read_bytes(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
}

SimulationSummary summarize(const SceneInstance& scene, int frames, double fps) {
  SimulationSummary s;
  s.frames = frames;
  s.fps = fps;
  for (const auto& g : scene.groups) {
    s.group_sizes.push_back(static_cast<int>(g.members.size()));
    s.activities.emplace_back(to_string(g.activity));
  }
  return s;
}

SimulationSummary summarize(const nlohmann::json& doc) {
  try {
    SimulationSummary s;
    s.frames = doc.at("frames").get<int>();
    s.fps = doc.at("fps").get<double>();
    for (const auto& g : doc.at("groups")) {
      s.group_sizes.push_back(static_cast<int>(g.at("members").size()));
      s.activities.push_back(g.at("activity").get<std::string>());
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("scene description: ") + e.what());
  }
}

nlohmann::json StatsReport::to_json() const {
  auto hist = [](const std::map<int, long long>& h) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : h) j[std::to_string(k)] = v;
    return j;
  };
  nlohmann::json act = nlohmann::json::object();
  for (const auto& [k, v] : activity_groups) act[k] = v;
  return {{"simulations", simulations},
          {"groups", groups},
          {"persons", persons},
          {"frames", frames},
          {"persons_per_frame", hist(persons_per_frame)},
          {"group_sizes", hist(group_sizes)},
          {"activity_groups", act},
          {"mean_persons_per_group", mean_persons_per_group},
          {"mean_persons_per_frame", mean_persons_per_frame},
          {"mean_track_length_seconds", mean_track_length_seconds}};
}

StatsReport dataset_stats(std::span<const SimulationSummary> sims) {
  if (sims.empty()) throw Error(ErrorCode::kEmptyDataset, "no simulations to summarize");
  StatsReport r;
  double track_seconds = 0.0;
  long long person_frames = 0;
  for (const auto& s : sims) {
    ++r.simulations;
    int sim_persons = 0;
    for (std::size_t g = 0; g < s.group_sizes.size(); ++g) {
      const int n = s.group_sizes[g];
      ++r.group_sizes[n];
      ++r.activity_groups[s.activities[g]];
      ++r.groups;
      sim_persons += n;
    }
    r.persons += sim_persons;
    r.frames += s.frames;
    r.persons_per_frame[sim_persons] += s.frames;
    person_frames += static_cast<long long>(sim_persons) * s.frames;
    // Nobody enters or leaves, so every track spans the whole clip.
    track_seconds += sim_persons * (s.frames / s.fps);
  }
  r.mean_persons_per_group = r.groups > 0 ? static_cast<double>(r.persons) / static_cast<double>(r.groups) : 0.0;
  r.mean_persons_per_frame = r.frames > 0 ? static_cast<double>(person_frames) / static_cast<double>(r.frames) : 0.0;
  r.mean_track_length_seconds = r.persons > 0 ? track_seconds / static_cast<double>(r.persons) : 0.0;
  return r;
}

}  // namespace groupsim
