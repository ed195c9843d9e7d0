#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "groupsim/authoring.hpp"
#include "groupsim/catalog.hpp"
#include "groupsim/config.hpp"
#include "groupsim/dynamics.hpp"
#include "groupsim/export.hpp"
#include "groupsim/metrics.hpp"

namespace groupsim {

/// Lower-case hex SHA-256.
std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Catalog for a campaign, drawn from the master seed and then patched with
/// the override file if one is configured.
AssetCatalog catalog_for(const SimulationConfig& config);

/// Random stream for simulation `index`; independent of every other index.
RngStream simulation_stream(const SimulationConfig& config, std::uint64_t index);

struct SimulationArtifacts {
  SceneInstance scene;
  SimulationResult result;
};

/// Authors and simulates one scene in memory. Throws Error(kPlacementFailure)
/// when the groups cannot be laid out.
SimulationArtifacts run_simulation(const SimulationConfig& config, const AssetCatalog& catalog,
                                   std::uint64_t index);

std::string simulation_dir_name(std::uint64_t index);
std::string view_dir_name(int view);

struct GenerateSummary {
  int succeeded = 0;
  int failed = 0;
  std::filesystem::path manifest_path;
  nlohmann::json manifest;
};

/// Writes every simulation under config.output_root plus manifest.json.
/// Output bytes do not depend on `jobs`.
GenerateSummary generate_dataset(const SimulationConfig& config, int jobs = 1);

/// Checks every manifest entry against its digest, then aggregates the scene
/// descriptions. Throws Error(kParseError) naming the first corrupted file and
/// Error(kEmptyDataset) when nothing was generated.
StatsReport dataset_stats_from_disk(const std::filesystem::path& root);

struct MetricsOptions {
  ForceParams<double> forces;
  double collision_threshold = 0.45;
  int diversity_pairs = 200;
  int multimodality_pairs = 20;
  std::uint64_t seed = 0;
  std::optional<std::filesystem::path> reference;  // dataset scored against with FID
  std::optional<std::filesystem::path> features;   // external feature dump
};

/// Motion files under a directory (recursive, sorted) or the file itself.
std::vector<std::filesystem::path> find_motion_files(const std::filesystem::path& path);

nlohmann::json metrics_report(const std::filesystem::path& path, const MetricsOptions& options = {});

/// Scores an external feature dump:
///   {"reference": [{"label": str, "vector": [num...]}...], "generated": [...]}
/// FID needs both lists; diversity and multimodality use "generated".
nlohmann::json feature_file_report(const std::filesystem::path& path, const MetricsOptions& options = {});

}  // namespace groupsim
