#include "groupsim/config.hpp"

#include <cmath>
#include <fstream>

#include "groupsim/export.hpp"

namespace groupsim {
namespace {

std::vector<ActivityEntry> all_activities() {
  std::vector<ActivityEntry> v;
  for (GroupActivity a : all_group_activities()) v.push_back({a, 1.0, true});
  return v;
}

void invalid(const std::string& what) { throw Error(ErrorCode::kInvalidConfig, what); }

}  // namespace

std::string to_string(DatasetMode mode) { return mode == DatasetMode::kRgb ? "rgb" : "3d"; }

void SimulationConfig::validate() const {
  if (n_simulations < 1) invalid("n_simulations must be >= 1");
  if (frames < 1) invalid("frames must be >= 1");
  if (!(fps > 0.0) || !std::isfinite(fps)) invalid("fps must be positive");
  if (n_views < 1) invalid("n_views must be >= 1");
  if (max_num_groups < 1) invalid("max_num_groups must be >= 1");
  if (max_num_characters < 1) invalid("max_num_characters must be >= 1");
  if (!(min_interval > 0.0) || !(min_interval <= max_interval)) invalid("interval bounds need 0 < min <= max");
  if (image_width < 1 || image_height < 1) invalid("image size must be positive");
  if (catalog.scenes < 1 || catalog.hdris < 1 || catalog.lighting_volumes < 1 || catalog.characters < 1 ||
      catalog.clips < 1) {
    invalid("catalog counts must be >= 1");
  }
  double total = 0.0;
  for (const auto& a : activities) {
    if (a.weight < 0.0 || !std::isfinite(a.weight)) invalid("activity weights must be nonnegative");
    if (a.enabled) total += a.weight;
  }
  if (!(total > 0.0)) invalid("at least one enabled activity needs a positive weight");
}

AuthoringParams SimulationConfig::authoring_params() const {
  AuthoringParams p;
  p.max_num_groups = max_num_groups;
  p.max_num_characters = max_num_characters;
  p.min_interval = min_interval;
  p.max_interval = max_interval;
  p.activities.clear();
  for (const auto& a : activities) {
    if (!a.enabled) continue;
    p.activities.push_back(a.activity);
    p.activity_weights.push_back(a.weight);
  }
  p.n_views = n_views;
  p.image_width = image_width;
  p.image_height = image_height;
  return p;
}

SimulationConfig preset(std::string_view name) {
  SimulationConfig c;
  c.activities = all_activities();
  if (name == "3d") {
    c.mode = DatasetMode::k3d;
    c.frames = 150;
    c.fps = 30.0;
    c.n_views = 1;
    c.max_num_groups = 1;
    c.max_num_characters = 13;
    c.joints = true;
  } else if (name == "rgb") {
    c.mode = DatasetMode::kRgb;
    c.frames = 100;
    c.fps = 20.0;
    c.n_views = 4;
    c.max_num_groups = 3;
    c.max_num_characters = 7;
    c.joints = false;
  } else {
    invalid("unknown preset '" + std::string(name) + "' (expected rgb or 3d)");
  }
  return c;
}

SimulationConfig config_from_json(const nlohmann::json& doc, SimulationConfig c) {
  try {
    if (doc.contains("preset")) c = preset(doc.at("preset").get<std::string>());
    c.master_seed = doc.value("seed", c.master_seed);
    c.n_simulations = doc.value("n_simulations", c.n_simulations);
    c.frames = doc.value("frames", c.frames);
    c.fps = doc.value("fps", c.fps);
    c.n_views = doc.value("n_views", c.n_views);
    if (doc.contains("dataset_mode")) {
      const auto m = doc.at("dataset_mode").get<std::string>();
      if (m == "rgb") {
        c.mode = DatasetMode::kRgb;
      } else if (m == "3d") {
        c.mode = DatasetMode::k3d;
      } else {
        invalid("dataset_mode must be rgb or 3d");
      }
    }
    c.max_num_groups = doc.value("max_num_groups", c.max_num_groups);
    c.max_num_characters = doc.value("max_num_characters", c.max_num_characters);
    c.min_interval = doc.value("min_interval", c.min_interval);
    c.max_interval = doc.value("max_interval", c.max_interval);
    c.image_width = doc.value("image_width", c.image_width);
    c.image_height = doc.value("image_height", c.image_height);
    c.joints = doc.value("joints", c.joints);
    c.speed_adjust = doc.value("speed_adjust", c.speed_adjust);
    if (doc.contains("output_root")) c.output_root = doc.at("output_root").get<std::string>();
    if (doc.contains("catalog_overrides")) c.catalog_overrides = doc.at("catalog_overrides").get<std::string>();
    if (doc.contains("catalog")) {
      const auto& cat = doc.at("catalog");
      c.catalog.scenes = cat.value("scenes", c.catalog.scenes);
      c.catalog.hdris = cat.value("hdris", c.catalog.hdris);
      c.catalog.lighting_volumes = cat.value("lighting_volumes", c.catalog.lighting_volumes);
      c.catalog.characters = cat.value("characters", c.catalog.characters);
      c.catalog.clips = cat.value("clips", c.catalog.clips);
    }
    if (doc.contains("activities")) {
      for (auto& entry : c.activities) entry.enabled = false;
      for (const auto& [name, spec] : doc.at("activities").items()) {
        const auto activity = parse_group_activity(name);
        if (!activity) invalid("unknown activity '" + name + "'");
        auto& entry = c.activities[static_cast<std::size_t>(*activity)];
        if (spec.is_boolean()) {
          entry.enabled = spec.get<bool>();
        } else if (spec.is_number()) {
          entry.enabled = true;
          entry.weight = spec.get<double>();
        } else {
          entry.enabled = spec.value("enabled", true);
          entry.weight = spec.value("weight", 1.0);
        }
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

SimulationConfig load_config(const std::filesystem::path& path, SimulationConfig base) {
  return config_from_json(read_json(path), std::move(base));
}

nlohmann::json config_to_json(const SimulationConfig& c) {
  nlohmann::json acts = nlohmann::json::object();
  for (const auto& a : c.activities) {
    acts[std::string(to_string(a.activity))] = {{"enabled", a.enabled}, {"weight", a.weight}};
  }
  nlohmann::json doc = {
      {"seed", c.master_seed},
      {"n_simulations", c.n_simulations},
      {"frames", c.frames},
      {"fps", c.fps},
      {"n_views", c.n_views},
      {"dataset_mode", to_string(c.mode)},
      {"max_num_groups", c.max_num_groups},
      {"max_num_characters", c.max_num_characters},
      {"min_interval", c.min_interval},
      {"max_interval", c.max_interval},
      {"image_width", c.image_width},
      {"image_height", c.image_height},
      {"joints", c.joints},
      {"speed_adjust", c.speed_adjust},
      {"catalog",
       {{"scenes", c.catalog.scenes},
        {"hdris", c.catalog.hdris},
        {"lighting_volumes", c.catalog.lighting_volumes},
        {"characters", c.catalog.characters},
        {"clips", c.catalog.clips}}},
      {"activities", acts},
  };
  if (c.catalog_overrides) doc["catalog_overrides"] = c.catalog_overrides->string();
  return doc;
}

const nlohmann::json& config_schema() {
  static const nlohmann::json schema = nlohmann::json::parse(R"({
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "title": "groupsim configuration",
  "type": "object",
  "additionalProperties": false,
  "properties": {
    "preset": {"enum": ["rgb", "3d"], "description": "applied first; other keys override it"},
    "seed": {"type": "integer", "minimum": 0},
    "n_simulations": {"type": "integer", "minimum": 1},
    "frames": {"type": "integer", "minimum": 1},
    "fps": {"type": "number", "exclusiveMinimum": 0},
    "n_views": {"type": "integer", "minimum": 1},
    "dataset_mode": {"enum": ["rgb", "3d"]},
    "max_num_groups": {"type": "integer", "minimum": 1},
    "max_num_characters": {"type": "integer", "minimum": 1},
    "min_interval": {"type": "number", "exclusiveMinimum": 0},
    "max_interval": {"type": "number", "exclusiveMinimum": 0},
    "image_width": {"type": "integer", "minimum": 1},
    "image_height": {"type": "integer", "minimum": 1},
    "joints": {"type": "boolean"},
    "speed_adjust": {"type": "boolean"},
    "output_root": {"type": "string"},
    "catalog_overrides": {"type": "string"},
    "catalog": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "scenes": {"type": "integer", "minimum": 1},
        "hdris": {"type": "integer", "minimum": 1},
        "lighting_volumes": {"type": "integer", "minimum": 1},
        "characters": {"type": "integer", "minimum": 1},
        "clips": {"type": "integer", "minimum": 1}
      }
    },
    "activities": {
      "type": "object",
      "description": "listed activities are enabled, others disabled",
      "propertyNames": {"enum": ["Walking", "Waiting", "Queueing", "Talking", "Dancing", "Jogging"]},
      "additionalProperties": {
        "oneOf": [
          {"type": "boolean"},
          {"type": "number", "minimum": 0},
          {"type": "object",
           "properties": {"enabled": {"type": "boolean"}, "weight": {"type": "number", "minimum": 0}},
           "additionalProperties": false}
        ]
      }
    }
  }
})");
  return schema;
}

}  // namespace groupsim
