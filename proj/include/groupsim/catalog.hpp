#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "groupsim/random.hpp"

namespace groupsim {

/// Per-person action classes. The last six slots are reserved for clips that
/// have no dedicated authoring rule; they are in-place actions.
enum class AtomicAction : std::uint8_t {
  kWalk = 0,
  kRun,
  kDance,
  kIdle,
  kText,
  kTalk,
  kPoint,
  kWave,
  kReserved1,
  kReserved2,
  kReserved3,
  kReserved4,
  kReserved5,
  kReserved6,
};

inline constexpr std::size_t kNumAtomicActions = 14;

std::string_view to_string(AtomicAction action);
std::optional<AtomicAction> parse_atomic_action(std::string_view name);
const std::array<AtomicAction, kNumAtomicActions>& all_atomic_actions();

/// True for actions that translate the character (walk, run).
constexpr bool is_locomotion(AtomicAction a) { return a == AtomicAction::kWalk || a == AtomicAction::kRun; }

struct CharacterAsset {
  std::string id;
  double height = 1.7;           // meters
  double shoulder_width = 0.45;  // meters
  std::map<std::string, std::string> metadata;
};

struct ClipAsset {
  std::string id;
  AtomicAction action_class = AtomicAction::kIdle;
  double nominal_speed = 0.0;  // m/s, zero for in-place actions
  double cycle_length = 1.0;   // seconds
  double arm_space = 0.5;      // [0,1], metadata only
  double stride = 0.5;         // [0,1]

  /// Translation multiplier in [0.9, 1.1] derived from the stride style.
  double stride_factor() const { return 0.9 + 0.2 * stride; }
};

struct CatalogCounts {
  int scenes = 25;
  int hdris = 104;
  int lighting_volumes = 5;
  int characters = 2200;
  int clips = 384;
};

inline constexpr double kDefaultShoulderWidth = 0.45;
inline constexpr double kWalkSpeed = 1.4;
inline constexpr double kRunSpeed = 3.0;

class AssetCatalog {
 public:
  std::vector<std::string> scenes;
  std::vector<std::string> hdris;
  std::vector<std::string> lighting_volumes;
  std::vector<CharacterAsset> characters;
  std::vector<ClipAsset> clips;

  /// Throws Error(kZeroCount) for an empty category or kInvalidConfig for a
  /// character/clip that violates its invariants.
  void validate() const;

  const ClipAsset& clip(std::string_view id) const;
  const CharacterAsset& character(std::string_view id) const;

  /// Indices of clips with the given action, in catalog order.
  const std::vector<std::size_t>& clips_for(AtomicAction action) const;

  /// Rebuilds lookup tables. Call after mutating the public lists.
  void reindex();

 private:
  std::map<std::string, std::size_t, std::less<>> clip_index_;
  std::map<std::string, std::size_t, std::less<>> character_index_;
  std::array<std::vector<std::size_t>, kNumAtomicActions> clips_by_action_;
};

/// Clip i gets action i mod 14, so every action has a clip once counts.clips >= 14.
AssetCatalog build_default_catalog(const CatalogCounts& counts, RngStream rng);

/// Applies a JSON override document:
///   {"characters": [{"id", "height", "shoulder_width"}],
///    "clips": [{"id", "action", "nominal_speed", "cycle_length", "arm_space", "stride"}]}
/// Entries with an existing id replace matching fields; new ids are appended.
void apply_catalog_overrides(AssetCatalog& catalog, const std::filesystem::path& path);

}  // namespace groupsim
