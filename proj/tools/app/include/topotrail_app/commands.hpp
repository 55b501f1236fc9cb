#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "topotrail_app/config.hpp"

namespace topotrail::app {

// What a command produced. `files` lists every file it wrote, relative to
// the output directory; `report` is also what the command prints.
struct CommandResult {
  nlohmann::json report;
  std::vector<std::string> files;
};

CommandResult cmd_analyze(const ExperimentConfig& config);
CommandResult cmd_distance_series(const ExperimentConfig& config);
CommandResult cmd_barycenters(const ExperimentConfig& config);
CommandResult cmd_classify_patch(const ExperimentConfig& config);
CommandResult cmd_classify_maintenance(const ExperimentConfig& config);
CommandResult cmd_synth(const ExperimentConfig& config);

// Dispatches on the subcommand name; throws ValidationError for unknown names.
CommandResult run_command(const std::string& name, const ExperimentConfig& config);

}  // namespace topotrail::app
