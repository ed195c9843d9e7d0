#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "groupsim/authoring.hpp"
#include "groupsim/catalog.hpp"
#include "groupsim/dynamics.hpp"

namespace groupsim {

enum class DatasetMode { kRgb, k3d };

struct ActivityEntry {
  GroupActivity activity;
  double weight = 1.0;
  bool enabled = true;
};

struct SimulationConfig {
  std::uint64_t master_seed = 0;
  int n_simulations = 1;
  int frames = 150;
  double fps = 30.0;
  int n_views = 1;
  DatasetMode mode = DatasetMode::k3d;
  std::vector<ActivityEntry> activities;
  int max_num_groups = 1;
  int max_num_characters = 13;
  double min_interval = 0.6;
  double max_interval = 1.5;
  int image_width = 1920;
  int image_height = 1080;
  CatalogCounts catalog;
  std::optional<std::filesystem::path> catalog_overrides;
  bool joints = true;
  bool speed_adjust = true;
  std::filesystem::path output_root = "out";

  /// Throws Error(kInvalidConfig) on any violated invariant.
  void validate() const;

  AuthoringParams authoring_params() const;
};

/// Presets: "3d" is one group per clip, 150 frames at 30 FPS; "rgb" is up to
/// three groups, 100 frames at 20 FPS, four views.
SimulationConfig preset(std::string_view name);

std::string to_string(DatasetMode mode);

/// Keys absent from the document keep the values already in `base`.
SimulationConfig config_from_json(const nlohmann::json& doc, SimulationConfig base = preset("3d"));
SimulationConfig load_config(const std::filesystem::path& path, SimulationConfig base = preset("3d"));

/// Every key that affects generated bytes. The output root is excluded.
nlohmann::json config_to_json(const SimulationConfig& config);

/// JSON Schema for the config file.
const nlohmann::json& config_schema();

}  // namespace groupsim
