// Command-line front end: generate datasets, summarize them, and score motions.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "groupsim/config.hpp"
#include "groupsim/pipeline.hpp"

namespace {

constexpr const char* kJobsEnv = "GROUPSIM_JOBS";

void write_text(const std::string& text, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw groupsim::Error(groupsim::ErrorCode::kIoError, "cannot write " + path);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"groupsim: procedural multi-group human activity generator and group-motion metrics"};
  app.require_subcommand(0, 1);

  bool print_schema = false;
  app.add_flag("--print-schema", print_schema, "Print the config file JSON schema and exit");

  // generate
  auto* gen = app.add_subcommand("generate", "Generate a dataset campaign");
  std::string config_path, out_dir, preset_name;
  std::optional<std::uint64_t> seed;
  std::optional<int> n_sims;
  int jobs = 1;
  gen->add_option("--config", config_path, "Config file (JSON)")->check(CLI::ExistingFile);
  gen->add_option("--preset", preset_name, "Base preset")->check(CLI::IsMember({"rgb", "3d"}));
  gen->add_option("--seed", seed, "Master seed (overrides config)");
  gen->add_option("--out", out_dir, "Output root (overrides config)");
  gen->add_option("-n,--simulations", n_sims, "Number of simulations (overrides config)");
  gen->add_option("--jobs", jobs, "Worker threads; " + std::string(kJobsEnv) + " overrides")->check(CLI::PositiveNumber);

  // stats
  auto* stats = app.add_subcommand("stats", "Verify a dataset manifest and print distribution statistics");
  std::string stats_path, stats_out;
  stats->add_option("path", stats_path, "Dataset root")->required();
  stats->add_option("--report", stats_out, "Also write the report to this file");

  // metrics
  auto* metrics = app.add_subcommand("metrics", "Position-based and learning-based metrics for motion files");
  std::string metrics_path, metrics_out, features_path, reference_path;
  groupsim::MetricsOptions mopts;
  metrics->add_option("path", metrics_path, "motion3d file or directory");
  metrics->add_option("--features", features_path, "Score an external feature dump instead")
      ->check(CLI::ExistingFile);
  metrics->add_option("--reference", reference_path, "Reference dataset for FID")->check(CLI::ExistingPath);
  metrics->add_option("--threshold", mopts.collision_threshold, "Collision distance threshold (m)");
  metrics->add_option("--pairs", mopts.diversity_pairs, "Random pairs for diversity");
  metrics->add_option("--mm-pairs", mopts.multimodality_pairs, "Random pairs per class for multimodality");
  metrics->add_option("--seed", mopts.seed, "Seed for the Monte-Carlo metrics");
  metrics->add_option("--report", metrics_out, "Also write the report to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (print_schema) {
      std::cout << groupsim::config_schema().dump(2) << "\n";
      return 0;
    }

    if (*gen) {
      groupsim::SimulationConfig base = groupsim::preset(preset_name.empty() ? "3d" : preset_name);
      groupsim::SimulationConfig cfg = config_path.empty() ? base : groupsim::load_config(config_path, base);
      if (seed) cfg.master_seed = *seed;
      if (n_sims) cfg.n_simulations = *n_sims;
      if (!out_dir.empty()) cfg.output_root = out_dir;
      if (const char* env = std::getenv(kJobsEnv); env && *env) jobs = std::max(1, std::atoi(env));
      cfg.validate();
      const auto summary = groupsim::generate_dataset(cfg, jobs);
      std::cout << "generated " << summary.succeeded << " simulations (" << summary.failed
                << " placement failures) -> " << summary.manifest_path.string() << "\n";
      return 0;
    }

    if (*stats) {
      const auto report = groupsim::dataset_stats_from_disk(stats_path).to_json().dump(2);
      std::cout << report << "\n";
      if (!stats_out.empty()) write_text(report + "\n", stats_out);
      return 0;
    }

    if (*metrics) {
      if (!reference_path.empty()) mopts.reference = reference_path;
      nlohmann::json report;
      if (!features_path.empty()) {
        report = groupsim::feature_file_report(features_path, mopts);
      } else if (!metrics_path.empty()) {
        report = groupsim::metrics_report(metrics_path, mopts);
      } else {
        std::cerr << "metrics: give a motion path or --features\n";
        return 2;
      }
      const auto text = report.dump(2);
      std::cout << text << "\n";
      if (!metrics_out.empty()) write_text(text + "\n", metrics_out);
      return 0;
    }

    std::cout << app.help();
    return 0;
  } catch (const groupsim::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
