#include "groupsim/pipeline.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace groupsim {
namespace fs = std::filesystem;
namespace {

std::string to_hex(const unsigned char* p, unsigned int n) {
  static const char* kDigits = "0123456789abcdef";
  std::string s;
  s.reserve(2 * n);
  for (unsigned int i = 0; i < n; ++i) {
    s.push_back(kDigits[p[i] >> 4]);
    s.push_back(kDigits[p[i] & 0xf]);
  }
  return s;
}

struct FileEntry {
  std::string path;  // relative to the output root, '/' separated
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct Outcome {
  bool ok = false;
  std::string error;
  std::vector<FileEntry> files;
};

FileEntry record(const fs::path& root, const fs::path& file) {
  return {fs::relative(file, root).generic_string(), sha256_file(file), fs::file_size(file)};
}

Outcome write_simulation(const SimulationConfig& config, const AssetCatalog& catalog, std::uint64_t index) {
  Outcome out;
  SimulationArtifacts art;
  try {
    art = run_simulation(config, catalog, index);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kPlacementFailure) throw;
    out.error = e.what();
    return out;
  }

  const fs::path root = config.output_root;
  const fs::path sim_dir = root / simulation_dir_name(index);
  fs::create_directories(sim_dir);

  const std::uint64_t sim_seed = simulation_stream(config, index).seed();
  write_json(scene_document(art.scene, config.master_seed, index, sim_seed, config.frames, config.fps),
             sim_dir / "scene.json");
  out.files.push_back(record(root, sim_dir / "scene.json"));

  if (config.mode == DatasetMode::k3d) {
    write_motion3d(Motion3dFile{config.master_seed, art.result.motions}, sim_dir / "motion3d.bin");
    out.files.push_back(record(root, sim_dir / "motion3d.bin"));
  } else {
    const int views = static_cast<int>(art.scene.cameras.size());
    for (int v = 0; v < views; ++v) {
      const fs::path view_dir = sim_dir / view_dir_name(v);
      fs::create_directories(view_dir);
      const auto records = annotate_view(art.result, art.scene, art.scene.cameras[static_cast<std::size_t>(v)]);
      write_mot(records, view_dir / "gt.txt");

      std::vector<FrameMeta> frames;
      frames.reserve(static_cast<std::size_t>(config.frames));
      for (int t = 1; t <= config.frames; ++t) {
        char name[32];
        std::snprintf(name, sizeof(name), "frame_%06d.png", t);
        frames.push_back({t, simulation_dir_name(index) + "/" + view_dir_name(v) + "/" + name,
                          config.image_width, config.image_height});
      }
      CocoIdAllocator ids(index, v, views);
      write_coco(records, frames, view_dir / "annotations.json", ids, config.master_seed);
      out.files.push_back(record(root, view_dir / "gt.txt"));
      out.files.push_back(record(root, view_dir / "annotations.json"));
    }
  }
  out.ok = true;
  return out;
}

void add_group_metrics(nlohmann::json& bucket, const ForceReport& r) {
  if (bucket.is_null()) bucket = nlohmann::json::object();
  bucket["groups"] = bucket.value("groups", 0) + 1;
  bucket["sum_interaction"] = bucket.value("sum_interaction", 0.0) + r.interaction_force;
  bucket["sum_contact"] = bucket.value("sum_contact", 0.0) + r.contact_force;
  bucket["sum_total"] = bucket.value("sum_total", 0.0) + r.total_force;
  bucket["sum_collision"] = bucket.value("sum_collision", 0.0) + r.collision_frequency;
}

nlohmann::json finish_bucket(const nlohmann::json& bucket, int single_person_groups) {
  const int n = bucket.value("groups", 0);
  auto mean = [&](const char* key) { return n > 0 ? bucket.value(key, 0.0) / n : 0.0; };
  return {{"groups_scored", n},
          {"groups_skipped_single_person", single_person_groups},
          {"collision_frequency", mean("sum_collision")},
          {"interaction_force", mean("sum_interaction")},
          {"contact_force", mean("sum_contact")},
          {"total_force", mean("sum_total")}};
}

struct FeatureRow {
  std::string label;
  Eigen::VectorXd vector;
};

std::map<std::string, FeatureSet> by_label(const std::vector<FeatureRow>& rows, std::vector<std::string>& skipped) {
  std::map<std::string, std::vector<Eigen::VectorXd>> grouped;
  for (const auto& r : rows) grouped[r.label].push_back(r.vector);
  std::map<std::string, FeatureSet> out;
  for (auto& [label, vecs] : grouped) {
    if (vecs.size() < 2) {
      skipped.push_back(label);
      continue;
    }
    out.emplace(label, make_feature_set(vecs, label));
  }
  return out;
}

nlohmann::json learning_scores(const std::vector<FeatureRow>& generated, const std::vector<FeatureRow>* reference,
                               const MetricsOptions& options) {
  nlohmann::json out = nlohmann::json::object();
  if (generated.empty()) return out;
  std::vector<Eigen::VectorXd> vecs;
  for (const auto& r : generated) vecs.push_back(r.vector);
  const FeatureSet all = make_feature_set(vecs);

  RngStream rng = RngStream(options.seed).derive("learning_metrics");
  if (all.size() >= 2) {
    RngStream div_rng = rng.derive("diversity");
    out["diversity"] = diversity(all, options.diversity_pairs, div_rng);
  }
  std::vector<std::string> skipped;
  const auto classes = by_label(generated, skipped);
  if (!classes.empty()) {
    RngStream mm_rng = rng.derive("multimodality");
    out["multimodality"] = multimodality(classes, options.multimodality_pairs, mm_rng);
  }
  out["multimodality_skipped_classes"] = skipped;
  if (reference && !reference->empty()) {
    std::vector<Eigen::VectorXd> ref;
    for (const auto& r : *reference) ref.push_back(r.vector);
    const auto res = fid_detailed(make_feature_set(ref), all);
    out["fid"] = res.value;
    out["fid_regularized"] = res.regularized;
  }
  return out;
}

std::vector<FeatureRow> motion_feature_rows(const std::vector<fs::path>& files) {
  std::vector<FeatureRow> rows;
  for (const auto& f : files) {
    for (const auto& g : read_motion3d(f).groups) rows.push_back({g.activity, group_features(g)});
  }
  return rows;
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::kIoError, "sha256 failed");
  }
  return to_hex(digest, len);
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return sha256_hex(ss.str());
}

AssetCatalog catalog_for(const SimulationConfig& config) {
  AssetCatalog catalog = build_default_catalog(config.catalog, RngStream(config.master_seed).derive("catalog"));
  if (config.catalog_overrides) apply_catalog_overrides(catalog, *config.catalog_overrides);
  return catalog;
}

RngStream simulation_stream(const SimulationConfig& config, std::uint64_t index) {
  return RngStream(config.master_seed).derive("sim/" + std::to_string(index));
}

SimulationArtifacts run_simulation(const SimulationConfig& config, const AssetCatalog& catalog,
                                   std::uint64_t index) {
  SimulationArtifacts art;
  art.scene = instantiate_scene(config.authoring_params(), catalog, simulation_stream(config, index));
  SimulateOptions opts;
  opts.speed.enabled = config.speed_adjust;
  opts.joints = config.joints && config.mode == DatasetMode::k3d;
  opts.keep_trace = config.mode == DatasetMode::kRgb;
  art.result = simulate(art.scene, catalog, config.frames, config.fps, opts);
  return art;
}

std::string simulation_dir_name(std::uint64_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "sim_%06llu", static_cast<unsigned long long>(index));
  return buf;
}

std::string view_dir_name(int view) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "view_%02d", view);
  return buf;
}

GenerateSummary generate_dataset(const SimulationConfig& config, int jobs) {
  config.validate();
  const AssetCatalog catalog = catalog_for(config);
  fs::create_directories(config.output_root);

  const auto n = static_cast<std::size_t>(config.n_simulations);
  std::vector<Outcome> outcomes(n);
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        outcomes[i] = write_simulation(config, catalog, i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        next = n;
      }
    }
  };
  const int workers = std::clamp(jobs, 1, static_cast<int>(std::min<std::size_t>(n, 256)));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);

  GenerateSummary summary;
  nlohmann::json sims = nlohmann::json::array();
  std::vector<FileEntry> files;
  for (std::size_t i = 0; i < n; ++i) {
    nlohmann::json s = {{"index", i}, {"dir", simulation_dir_name(i)},
                        {"seed", simulation_stream(config, i).seed()}};
    if (outcomes[i].ok) {
      s["status"] = "ok";
      ++summary.succeeded;
    } else {
      s["status"] = "placement-failure";
      s["error"] = outcomes[i].error;
      ++summary.failed;
    }
    sims.push_back(std::move(s));
    files.insert(files.end(), outcomes[i].files.begin(), outcomes[i].files.end());
  }
  std::sort(files.begin(), files.end(), [](const FileEntry& a, const FileEntry& b) { return a.path < b.path; });
  nlohmann::json jfiles = nlohmann::json::array();
  for (const auto& f : files) jfiles.push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});

  summary.manifest = {{"format", "groupsim-manifest/1"},
                      {"master_seed", config.master_seed},
                      {"config", config_to_json(config)},
                      {"simulations", std::move(sims)},
                      {"files", std::move(jfiles)}};
  summary.manifest_path = fs::path(config.output_root) / "manifest.json";
  write_json(summary.manifest, summary.manifest_path);
  return summary;
}

StatsReport dataset_stats_from_disk(const fs::path& root) {
  const fs::path manifest_path = root / "manifest.json";
  std::vector<SimulationSummary> sims;
  if (fs::exists(manifest_path)) {
    const auto manifest = read_json(manifest_path);
    try {
      for (const auto& f : manifest.at("files")) {
        const auto rel = f.at("path").get<std::string>();
        const fs::path file = root / rel;
        if (!fs::exists(file)) throw Error(ErrorCode::kParseError, "manifest entry missing on disk: " + rel);
        if (sha256_file(file) != f.at("sha256").get<std::string>()) {
          throw Error(ErrorCode::kParseError, "digest mismatch for " + rel);
        }
      }
      for (const auto& s : manifest.at("simulations")) {
        if (s.at("status").get<std::string>() != "ok") continue;
        const auto rel = s.at("dir").get<std::string>() + "/scene.json";
        try {
          sims.push_back(summarize(read_json(root / rel)));
        } catch (const Error& e) {
          throw Error(ErrorCode::kParseError, rel + ": " + e.what());
        }
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParseError, manifest_path.string() + ": " + e.what());
    }
  } else if (fs::is_directory(root)) {
    std::vector<fs::path> scenes;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
      if (e.is_regular_file() && e.path().filename() == "scene.json") scenes.push_back(e.path());
    }
    std::sort(scenes.begin(), scenes.end());
    for (const auto& p : scenes) sims.push_back(summarize(read_json(p)));
  }
  if (sims.empty()) throw Error(ErrorCode::kEmptyDataset, "no simulations found under " + root.string());
  return dataset_stats(sims);
}

std::vector<fs::path> find_motion_files(const fs::path& path) {
  std::vector<fs::path> files;
  if (fs::is_regular_file(path)) {
    files.push_back(path);
  } else if (fs::is_directory(path)) {
    for (const auto& e : fs::recursive_directory_iterator(path)) {
      if (e.is_regular_file() && e.path().extension() == ".bin") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
  }
  return files;
}

nlohmann::json metrics_report(const fs::path& path, const MetricsOptions& options) {
  const auto files = find_motion_files(path);
  if (files.empty()) throw Error(ErrorCode::kEmptyDataset, "no motion files under " + path.string());

  nlohmann::json overall = nlohmann::json::object();
  std::map<std::string, nlohmann::json> per_activity;
  std::map<std::string, int> single_by_activity;
  int single_total = 0;
  int groups = 0;
  std::vector<FeatureRow> rows;
  for (const auto& f : files) {
    for (const auto& g : read_motion3d(f).groups) {
      ++groups;
      rows.push_back({g.activity, group_features(g)});
      const auto report = social_force_report(g, options.forces, options.collision_threshold);
      if (report.single_person) {
        ++single_total;
        ++single_by_activity[g.activity];
        per_activity.try_emplace(g.activity, nlohmann::json::object());
        continue;
      }
      add_group_metrics(overall, report);
      add_group_metrics(per_activity[g.activity], report);
    }
  }

  nlohmann::json activities = nlohmann::json::object();
  for (const auto& [name, bucket] : per_activity) {
    activities[name] = finish_bucket(bucket, single_by_activity[name]);
  }

  std::vector<FeatureRow> reference_rows;
  if (options.reference) reference_rows = motion_feature_rows(find_motion_files(*options.reference));

  nlohmann::json report = {
      {"metadata",
       {{"force_aggregation", "norm of the vector sum of pairwise forces per person and frame, "
                              "averaged over persons and frames, then over groups"},
        {"collision_counting", "(frame, pair) events below threshold divided by P(P-1)/2"},
        {"collision_threshold_m", options.collision_threshold},
        {"A", options.forces.A},
        {"B", options.forces.B},
        {"k", options.forces.k},
        {"fid_covariance", "maximum-likelihood; 1e-6*I added when rank-deficient"},
        {"features", "handcrafted group descriptor"}}},
      {"motion_files", files.size()},
      {"groups", groups},
      {"overall", finish_bucket(overall, single_total)},
      {"per_activity", activities},
      {"learning", learning_scores(rows, options.reference ? &reference_rows : nullptr, options)},
  };
  return report;
}

nlohmann::json feature_file_report(const fs::path& path, const MetricsOptions& options) {
  const auto doc = read_json(path);
  auto parse_rows = [&](const char* key) {
    std::vector<FeatureRow> rows;
    if (!doc.contains(key)) return rows;
    try {
      for (const auto& entry : doc.at(key)) {
        const auto values = entry.at("vector").get<std::vector<double>>();
        rows.push_back({entry.value("label", std::string("unlabeled")),
                        Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()))});
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
    }
    return rows;
  };
  const auto generated = parse_rows("generated");
  const auto reference = parse_rows("reference");
  if (generated.empty()) throw Error(ErrorCode::kEmptySet, path.string() + ": no generated feature vectors");
  return {{"features_file", path.generic_string()},
          {"generated", generated.size()},
          {"reference", reference.size()},
          {"learning", learning_scores(generated, &reference, options)}};
}

}  // namespace groupsim
