#include <fstream>
#include <set>

#include <gtest/gtest.h>

#include "groupsim/catalog.hpp"
#include "test_util.hpp"

using namespace groupsim;

TEST(AtomicAction, FourteenClassesRoundTripNames) {
  const auto& all = all_atomic_actions();
  ASSERT_EQ(all.size(), 14u);
  std::set<std::string> names;
  for (auto a : all) {
    names.insert(std::string(to_string(a)));
    EXPECT_EQ(parse_atomic_action(to_string(a)), a);
  }
  EXPECT_EQ(names.size(), 14u);
  for (const char* n : {"walk", "run", "dance", "idle", "text", "talk", "point", "wave"})
    EXPECT_TRUE(parse_atomic_action(n).has_value()) << n;
  EXPECT_FALSE(parse_atomic_action("swim").has_value());
}

TEST(Catalog, PaperScaleCounts) {
  const auto cat = build_default_catalog(CatalogCounts{25, 104, 5, 2200, 384}, RngStream(1));
  EXPECT_EQ(cat.scenes.size(), 25u);
  EXPECT_EQ(cat.hdris.size(), 104u);
  EXPECT_EQ(cat.lighting_volumes.size(), 5u);
  EXPECT_EQ(cat.characters.size(), 2200u);
  EXPECT_EQ(cat.clips.size(), 384u);
  EXPECT_NO_THROW(cat.validate());
}

TEST(Catalog, SingleCharacter) {
  CatalogCounts c;
  c.characters = 1;
  const auto cat = build_default_catalog(c, RngStream(1));
  ASSERT_EQ(cat.characters.size(), 1u);
  EXPECT_NO_THROW(cat.validate());
}

TEST(Catalog, ZeroCountRejected) {
  CatalogCounts c;
  c.scenes = 0;
  try {
    build_default_catalog(c, RngStream(1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kZeroCount);
  }
}

TEST(Catalog, Deterministic) {
  const auto a = build_default_catalog({}, RngStream(9));
  const auto b = build_default_catalog({}, RngStream(9));
  ASSERT_EQ(a.characters.size(), b.characters.size());
  for (std::size_t i = 0; i < a.characters.size(); ++i) EXPECT_EQ(a.characters[i].height, b.characters[i].height);
  for (std::size_t i = 0; i < a.clips.size(); ++i) {
    EXPECT_EQ(a.clips[i].id, b.clips[i].id);
    EXPECT_EQ(a.clips[i].cycle_length, b.clips[i].cycle_length);
    EXPECT_EQ(a.clips[i].stride, b.clips[i].stride);
  }
}

TEST(Catalog, AssetInvariants) {
  const auto cat = build_default_catalog({}, RngStream(3));
  for (const auto& ch : cat.characters) {
    EXPECT_GE(ch.height, 1.5);
    EXPECT_LT(ch.height, 1.9);
    EXPECT_EQ(ch.shoulder_width, 0.45);
  }
  for (const auto& clip : cat.clips) {
    EXPECT_GT(clip.cycle_length, 0.0);
    EXPECT_GE(clip.stride_factor(), 0.9);
    EXPECT_LE(clip.stride_factor(), 1.1);
    if (clip.action_class == AtomicAction::kWalk) EXPECT_EQ(clip.nominal_speed, 1.4);
    else if (clip.action_class == AtomicAction::kRun) EXPECT_EQ(clip.nominal_speed, 3.0);
    else EXPECT_EQ(clip.nominal_speed, 0.0);
  }
  for (auto a : all_atomic_actions()) EXPECT_FALSE(cat.clips_for(a).empty()) << to_string(a);
}

TEST(Catalog, LookupByIdAndMissing) {
  const auto cat = build_default_catalog({}, RngStream(3));
  EXPECT_EQ(cat.clip(cat.clips[5].id).id, cat.clips[5].id);
  EXPECT_EQ(cat.character(cat.characters[7].id).id, cat.characters[7].id);
  EXPECT_THROW(cat.clip("nope"), Error);
  EXPECT_THROW(cat.character("nope"), Error);
}

TEST(Catalog, ValidateCatchesBadAssets) {
  auto cat = build_default_catalog({}, RngStream(3));
  cat.clips[0].cycle_length = 0.0;
  EXPECT_THROW(cat.validate(), Error);
  cat = build_default_catalog({}, RngStream(3));
  for (auto& clip : cat.clips)
    if (clip.action_class == AtomicAction::kWalk) clip.nominal_speed = 0.0;
  EXPECT_THROW(cat.validate(), Error);
  cat = build_default_catalog({}, RngStream(3));
  cat.characters[0].height = -1.0;
  EXPECT_THROW(cat.validate(), Error);
}

TEST(Catalog, OverridesReplaceAndAppend) {
  groupsim::testing::TempDir dir;
  auto cat = build_default_catalog({}, RngStream(3));
  const std::string first_char = cat.characters[0].id;
  const std::string first_clip = cat.clips[0].id;
  {
    std::ofstream out(dir / "over.json");
    out << R"({"characters": [{"id": ")" << first_char << R"(", "height": 2.0, "shoulder_width": 0.5},
                               {"id": "extra", "height": 1.6}],
               "clips": [{"id": ")" << first_clip << R"(", "nominal_speed": 1.2, "cycle_length": 1.1},
                          {"id": "newclip", "action": "wave", "cycle_length": 3.0}]})";
  }
  const auto n_chars = cat.characters.size();
  apply_catalog_overrides(cat, dir / "over.json");
  EXPECT_EQ(cat.character(first_char).height, 2.0);
  EXPECT_EQ(cat.character(first_char).shoulder_width, 0.5);
  EXPECT_EQ(cat.characters.size(), n_chars + 1);
  EXPECT_EQ(cat.clip(first_clip).nominal_speed, 1.2);
  EXPECT_EQ(cat.clip("newclip").action_class, AtomicAction::kWave);
  EXPECT_NO_THROW(cat.validate());
}

TEST(Catalog, OverrideErrors) {
  groupsim::testing::TempDir dir;
  auto cat = build_default_catalog({}, RngStream(3));
  EXPECT_THROW(apply_catalog_overrides(cat, dir / "missing.json"), Error);
  {
    std::ofstream out(dir / "bad.json");
    out << "{not json";
  }
  EXPECT_THROW(apply_catalog_overrides(cat, dir / "bad.json"), Error);
  {
    std::ofstream out(dir / "badaction.json");
    out << R"({"clips": [{"id": "x", "action": "swim"}]})";
  }
  EXPECT_THROW(apply_catalog_overrides(cat, dir / "badaction.json"), Error);
}
