#include "groupsim/catalog.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace groupsim {
namespace {

constexpr std::array<std::string_view, kNumAtomicActions> kActionNames = {
    "walk", "run", "dance", "idle", "text", "talk", "point", "wave",
    "reserved_1", "reserved_2", "reserved_3", "reserved_4", "reserved_5", "reserved_6"};

std::string numbered(std::string_view prefix, int i, int width) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%0*d", width, i);
  return std::string(prefix) + buf;
}

void check_character(const CharacterAsset& c) {
  if (!(c.height > 0.0) || !(c.shoulder_width > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "character " + c.id + " needs positive height and shoulder width");
  }
}

void check_clip(const ClipAsset& c) {
  if (!(c.cycle_length > 0.0)) throw Error(ErrorCode::kInvalidConfig, "clip " + c.id + " needs cycle_length > 0");
  if (!(c.nominal_speed >= 0.0)) throw Error(ErrorCode::kInvalidConfig, "clip " + c.id + " has negative speed");
  if (is_locomotion(c.action_class) && !(c.nominal_speed > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "locomotion clip " + c.id + " needs nominal_speed > 0");
  }
  if (!is_locomotion(c.action_class) && c.nominal_speed != 0.0) {
    throw Error(ErrorCode::kInvalidConfig, "in-place clip " + c.id + " must have nominal_speed 0");
  }
}

}  // namespace

std::string_view to_string(AtomicAction action) { return kActionNames[static_cast<std::size_t>(action)]; }

std::optional<AtomicAction> parse_atomic_action(std::string_view name) {
  for (std::size_t i = 0; i < kActionNames.size(); ++i) {
    if (kActionNames[i] == name) return static_cast<AtomicAction>(i);
  }
  return std::nullopt;
}

const std::array<AtomicAction, kNumAtomicActions>& all_atomic_actions() {
  static const auto actions = [] {
    std::array<AtomicAction, kNumAtomicActions> a{};
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = static_cast<AtomicAction>(i);
    return a;
  }();
  return actions;
}

void AssetCatalog::validate() const {
  if (scenes.empty()) throw Error(ErrorCode::kZeroCount, "catalog has no scenes");
  if (hdris.empty()) throw Error(ErrorCode::kZeroCount, "catalog has no HDRIs");
  if (lighting_volumes.empty()) throw Error(ErrorCode::kZeroCount, "catalog has no lighting volumes");
  if (characters.empty()) throw Error(ErrorCode::kZeroCount, "catalog has no characters");
  if (clips.empty()) throw Error(ErrorCode::kZeroCount, "catalog has no clips");
  for (const auto& c : characters) check_character(c);
  for (const auto& c : clips) check_clip(c);
}

const ClipAsset& AssetCatalog::clip(std::string_view id) const {
  auto it = clip_index_.find(id);
  if (it == clip_index_.end()) throw Error(ErrorCode::kEmptyItems, "unknown clip " + std::string(id));
  return clips[it->second];
}

const CharacterAsset& AssetCatalog::character(std::string_view id) const {
  auto it = character_index_.find(id);
  if (it == character_index_.end()) throw Error(ErrorCode::kEmptyItems, "unknown character " + std::string(id));
  return characters[it->second];
}

const std::vector<std::size_t>& AssetCatalog::clips_for(AtomicAction action) const {
  return clips_by_action_[static_cast<std::size_t>(action)];
}

void AssetCatalog::reindex() {
  clip_index_.clear();
  character_index_.clear();
  for (auto& v : clips_by_action_) v.clear();
  for (std::size_t i = 0; i < clips.size(); ++i) {
    clip_index_[clips[i].id] = i;
    clips_by_action_[static_cast<std::size_t>(clips[i].action_class)].push_back(i);
  }
  for (std::size_t i = 0; i < characters.size(); ++i) character_index_[characters[i].id] = i;
}

AssetCatalog build_default_catalog(const CatalogCounts& counts, RngStream rng) {
  const std::pair<const char*, int> checks[] = {{"scenes", counts.scenes},
                                                {"hdris", counts.hdris},
                                                {"lighting_volumes", counts.lighting_volumes},
                                                {"characters", counts.characters},
                                                {"clips", counts.clips}};
  for (const auto& [name, n] : checks) {
    if (n < 1) throw Error(ErrorCode::kZeroCount, std::string("catalog count '") + name + "' must be >= 1");
  }

  AssetCatalog cat;
  for (int i = 0; i < counts.scenes; ++i) cat.scenes.push_back(numbered("scene_", i, 3));
  for (int i = 0; i < counts.hdris; ++i) cat.hdris.push_back(numbered("hdri_", i, 3));
  for (int i = 0; i < counts.lighting_volumes; ++i) cat.lighting_volumes.push_back(numbered("volume_", i, 2));

  static const std::vector<std::string> kAges = {"child", "teen", "adult", "senior"};
  static const std::vector<std::string> kGenders = {"female", "male", "unspecified"};
  static const std::vector<std::string> kEthnicity = {"group_a", "group_b", "group_c", "group_d", "group_e"};

  RngStream char_rng = rng.derive("characters");
  cat.characters.reserve(static_cast<std::size_t>(counts.characters));
  for (int i = 0; i < counts.characters; ++i) {
    CharacterAsset c;
    c.id = numbered("char_", i, 4);
    c.height = sample_real(char_rng, 1.5, 1.9);
    c.shoulder_width = kDefaultShoulderWidth;
    c.metadata["age"] = sample_choice(char_rng, kAges);
    c.metadata["gender"] = sample_choice(char_rng, kGenders);
    c.metadata["ethnicity"] = sample_choice(char_rng, kEthnicity);
    cat.characters.push_back(std::move(c));
  }

  RngStream clip_rng = rng.derive("clips");
  cat.clips.reserve(static_cast<std::size_t>(counts.clips));
  for (int i = 0; i < counts.clips; ++i) {
    ClipAsset c;
    c.action_class = static_cast<AtomicAction>(i % static_cast<int>(kNumAtomicActions));
    const int variant = i / static_cast<int>(kNumAtomicActions);
    c.id = std::string(to_string(c.action_class)) + numbered("_", variant, 2);
    switch (c.action_class) {
      case AtomicAction::kWalk:
        c.nominal_speed = kWalkSpeed;
        c.cycle_length = sample_real(clip_rng, 0.9, 1.3);
        break;
      case AtomicAction::kRun:
        c.nominal_speed = kRunSpeed;
        c.cycle_length = sample_real(clip_rng, 0.6, 0.8);
        break;
      default:
        c.nominal_speed = 0.0;
        c.cycle_length = sample_real(clip_rng, 2.0, 5.0);
        break;
    }
    c.arm_space = sample(clip_rng, randomizers::kBlendParameter);
    c.stride = sample(clip_rng, randomizers::kBlendParameter);
    cat.clips.push_back(std::move(c));
  }

  cat.reindex();
  cat.validate();
  return cat;
}

void apply_catalog_overrides(AssetCatalog& catalog, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open catalog override " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }

  try {
    for (const auto& entry : doc.value("characters", nlohmann::json::array())) {
      const auto id = entry.at("id").get<std::string>();
      auto it = std::find_if(catalog.characters.begin(), catalog.characters.end(),
                             [&](const CharacterAsset& c) { return c.id == id; });
      if (it == catalog.characters.end()) {
        catalog.characters.push_back(CharacterAsset{id});
        it = std::prev(catalog.characters.end());
      }
      it->height = entry.value("height", it->height);
      it->shoulder_width = entry.value("shoulder_width", it->shoulder_width);
    }
    for (const auto& entry : doc.value("clips", nlohmann::json::array())) {
      const auto id = entry.at("id").get<std::string>();
      auto it = std::find_if(catalog.clips.begin(), catalog.clips.end(),
                             [&](const ClipAsset& c) { return c.id == id; });
      if (it == catalog.clips.end()) {
        catalog.clips.push_back(ClipAsset{id});
        it = std::prev(catalog.clips.end());
      }
      if (entry.contains("action")) {
        const auto name = entry.at("action").get<std::string>();
        auto action = parse_atomic_action(name);
        if (!action) throw Error(ErrorCode::kParseError, "unknown action '" + name + "' for clip " + id);
        it->action_class = *action;
      }
      it->nominal_speed = entry.value("nominal_speed", it->nominal_speed);
      it->cycle_length = entry.value("cycle_length", it->cycle_length);
      it->arm_space = entry.value("arm_space", it->arm_space);
      it->stride = entry.value("stride", it->stride);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }

  catalog.reindex();
  catalog.validate();
}

}  // namespace groupsim
