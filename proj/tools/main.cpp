#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "topotrail/error.hpp"
#include "topotrail_app/commands.hpp"
#include "topotrail_app/config.hpp"

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kValidation = 2, kIo = 3, kNumeric = 4 };

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Topological signatures of 2-D trajectories"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> target_patch;
  bool shuffle = false;

  for (const char* name : {"analyze", "distance-series", "barycenters", "classify-patch",
                           "classify-maintenance", "synth"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "experiment config (key = value)")->required();
    sub->add_option("--out", out_dir, "output directory (overrides output_dir)");
    sub->add_option("--seed", seed, "experiment seed (overrides seed)");
    sub->add_option("--target-patch", target_patch, "target patch for classify-patch");
    sub->add_flag("--shuffle-labels", shuffle, "permute labels before training");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kValidation;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    auto config = topotrail::app::load_config(config_path);
    if (!out_dir.empty()) config.output_dir = out_dir;
    if (seed) config.seed = *seed;
    if (target_patch) config.target_patch = *target_patch;
    if (shuffle) config.shuffle_labels = true;

    const auto result = topotrail::app::run_command(command, config);
    std::cout << result.report.dump(2) << '\n';
    return kOk;
  } catch (const topotrail::ValidationError& e) {
    std::cerr << "topotrail " << command << ": " << e.what() << '\n';
    return kValidation;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "topotrail " << command << ": " << e.what() << '\n';
    return kValidation;
  } catch (const topotrail::IoError& e) {
    std::cerr << "topotrail " << command << ": " << e.what() << '\n';
    return kIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "topotrail " << command << ": " << e.what() << '\n';
    return kIo;
  } catch (const topotrail::NumericError& e) {
    std::cerr << "topotrail " << command << ": " << e.what() << '\n';
    return kNumeric;
  } catch (const std::exception& e) {
    std::cerr << "topotrail " << command << ": " << e.what() << '\n';
    return kFailure;
  }
}
