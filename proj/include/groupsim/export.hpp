#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "groupsim/authoring.hpp"
#include "groupsim/camera.hpp"
#include "groupsim/dynamics.hpp"

namespace groupsim {

/// One ground-truth box. Frames are 1-based.
struct AnnotationRecord {
  int frame = 1;
  int person_id = 0;
  int group_id = 0;
  double left = 0.0;
  double top = 0.0;
  double width = 0.0;
  double height = 0.0;
  AtomicAction action = AtomicAction::kIdle;
  GroupActivity activity = GroupActivity::kTalking;
  double visibility = 1.0;
};

/// Boxes for every character in every frame of a simulation, seen from one
/// camera, sorted by (frame, person_id).
std::vector<AnnotationRecord> annotate_view(const SimulationResult& sim, const SceneInstance& scene,
                                            const CameraModel& camera);

// MOTChallenge ground truth: "frame,id,bb_left,bb_top,bb_width,bb_height,1,1,1.0".
void write_mot(std::span<const AnnotationRecord> records, const std::filesystem::path& path);
/// Parses frame, id and box; action/activity/group fields are left default.
std::vector<AnnotationRecord> read_mot(const std::filesystem::path& path);

struct FrameMeta {
  int frame = 1;
  std::string file_name;
  int width = 1920;
  int height = 1080;
};

/// Hands out annotation and image ids. Distinct (sim, view) slots never collide.
class CocoIdAllocator {
 public:
  CocoIdAllocator(std::uint64_t sim_index, int view, int views_per_sim);
  std::uint64_t next_image_id() { return base_ + ++image_; }
  std::uint64_t next_annotation_id() { return base_ + ++annotation_; }

 private:
  std::uint64_t base_;
  std::uint64_t image_ = 0;
  std::uint64_t annotation_ = 0;
};

/// Category ids: 1..14 atomic actions, 101..106 group activities.
int action_category_id(AtomicAction action);
int activity_category_id(GroupActivity activity);

nlohmann::json coco_document(std::span<const AnnotationRecord> records, std::span<const FrameMeta> frames,
                             CocoIdAllocator& ids, std::uint64_t master_seed = 0);
void write_coco(std::span<const AnnotationRecord> records, std::span<const FrameMeta> frames,
                const std::filesystem::path& path, CocoIdAllocator& ids, std::uint64_t master_seed = 0);
std::vector<AnnotationRecord> read_coco(const std::filesystem::path& path);

/// Binary container of group motions for one simulation.
struct Motion3dFile {
  std::uint64_t seed = 0;
  std::vector<GroupMotion> groups;
};

void write_motion3d(const Motion3dFile& file, const std::filesystem::path& path);
void write_motion3d(const GroupMotion& motion, std::uint64_t seed, const std::filesystem::path& path);
Motion3dFile read_motion3d(const std::filesystem::path& path);

/// Scene description: assets, lights, groups with members, cameras, timing.
nlohmann::json scene_document(const SceneInstance& scene, std::uint64_t master_seed, std::uint64_t sim_index,
                              std::uint64_t sim_seed, int frames, double fps);
void write_json(const nlohmann::json& doc, const std::filesystem::path& path);
nlohmann::json read_json(const std::filesystem::path& path);

/// What dataset_stats needs from one simulation.
struct SimulationSummary {
  int frames = 0;
  double fps = 0.0;
  std::vector<int> group_sizes;
  std::vector<std::string> activities;  // parallel to group_sizes
};

SimulationSummary summarize(const SceneInstance& scene, int frames, double fps);
SimulationSummary summarize(const nlohmann::json& scene_doc);

struct StatsReport {
  std::map<int, long long> persons_per_frame;  // persons -> frame count
  std::map<int, long long> group_sizes;        // size -> group count
  std::map<std::string, long long> activity_groups;
  long long simulations = 0;
  long long groups = 0;
  long long persons = 0;
  long long frames = 0;
  double mean_persons_per_group = 0.0;
  double mean_persons_per_frame = 0.0;
  double mean_track_length_seconds = 0.0;

  nlohmann::json to_json() const;
};

StatsReport dataset_stats(std::span<const SimulationSummary> sims);

}  // namespace groupsim
