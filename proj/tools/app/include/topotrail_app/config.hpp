#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "topotrail/trajectory.hpp"

namespace topotrail::app {

// Flat `key = value` experiment description. Blank lines and lines starting
// with '#' are ignored; unknown keys are rejected.
struct ExperimentConfig {
  std::optional<std::filesystem::path> input;        // trajectory CSV
  std::optional<std::filesystem::path> maintenance;  // sidecar of dates
  std::filesystem::path output_dir = "topotrail-out";

  std::size_t subsample_target = 400;
  SubsampleStrategy subsample_strategy = SubsampleStrategy::kMaxMin;

  int image_m = 20;
  double delta = 1e-3;

  double C = 1.0;
  double tol = 1e-6;
  int max_iter = 5000;
  double train_fraction = 0.65;

  double barycenter_tol = 1e-8;
  int barycenter_max_iter = 100;

  std::uint64_t seed = 20240101;  // split, shuffle, and synthesis unless synth.seed is set
  std::optional<int> target_patch;
  std::optional<int> day;
  std::optional<int> patch;
  std::optional<int> maintenance_date;
  bool shuffle_labels = false;

  // Synthetic data, used when `input` is absent.
  SynthConfig synth = default_synth_config();
  bool synth_seed_set = false;
};

ExperimentConfig parse_config(std::istream& in,
                              const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

// Synthetic configuration with the experiment seed applied.
SynthConfig effective_synth(const ExperimentConfig& config);

nlohmann::json config_to_json(const ExperimentConfig& config);

}  // namespace topotrail::app
