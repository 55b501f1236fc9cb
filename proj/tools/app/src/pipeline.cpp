#include "topotrail_app/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <string>

#include "topotrail/error.hpp"
#include "topotrail/rips.hpp"

namespace topotrail::app {

Dataset load_dataset(const ExperimentConfig& config) {
  Dataset ds;
  if (config.input) {
    std::ifstream in(*config.input);
    if (!in) throw IoError("cannot open input '" + config.input->string() + "'");
    if (config.maintenance) {
      std::ifstream side(*config.maintenance);
      if (!side) {
        throw IoError("cannot open maintenance file '" + config.maintenance->string() + "'");
      }
      ds = parse_trajectory_csv(in, &side);
    } else {
      ds = parse_trajectory_csv(in);
    }
  } else {
    ds = generate_synthetic(effective_synth(config));
  }
  if (!ds.maintenance_dates.empty()) ds = segment_periods(std::move(ds));
  return ds;
}

DaySignature compute_signature(const Trajectory& trajectory, const ExperimentConfig& config) {
  const Trajectory sub =
      subsample(trajectory, config.subsample_strategy, config.subsample_target);
  const RipsDiagrams d = rips_persistence(distance_matrix(sub));
  DaySignature s{trajectory.day, trajectory.patch_id, trajectory.period_id, d.h0, d.h1, {}};
  s.lifetimes = lifetime_diagram(s.h1);
  return s;
}

std::vector<DaySignature> compute_signatures(const Dataset& dataset,
                                             const ExperimentConfig& config,
                                             std::optional<int> patch) {
  std::vector<DaySignature> out;
  for (const auto& tr : dataset.trajectories) {
    if (patch && tr.patch_id != *patch) continue;
    out.push_back(compute_signature(tr, config));
  }
  return out;
}

std::vector<PersistenceImage> shared_images(std::span<const LifetimeDiagram> diagrams,
                                            int m, double delta) {
  std::vector<ImageWindow> windows;
  for (const auto& d : diagrams) {
    if (auto w = image_window(d, m, delta)) windows.push_back(*w);
  }
  const ImageWindow window = union_window(windows).value_or(ImageWindow{});
  std::vector<PersistenceImage> out;
  out.reserve(diagrams.size());
  for (const auto& d : diagrams) out.push_back(persistence_image(d, m, delta, window));
  return out;
}

ClassificationRun run_classification(const ExperimentConfig& config,
                                     std::span<const DaySignature> signatures,
                                     std::vector<int> labels) {
  if (labels.size() != signatures.size()) {
    throw ValidationError("one label per signature is required");
  }
  if (signatures.empty()) throw ValidationError("no samples to classify");
  std::vector<LifetimeDiagram> lts;
  for (const auto& s : signatures) lts.push_back(s.lifetimes);

  ClassificationRun run;
  run.images = shared_images(lts, config.image_m, config.delta);
  if (config.shuffle_labels) {
    std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
    std::shuffle(labels.begin(), labels.end(), rng);
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    run.samples.push_back({flatten(run.images[i]), labels[i]});
  }
  run.split = train_test_split(run.samples, config.train_fraction, config.seed);
  const auto train = select(run.samples, run.split.train);
  const auto test = select(run.samples, run.split.test);
  FitOptions opts;
  opts.C = config.C;
  opts.tol = config.tol;
  opts.max_iter = config.max_iter;
  run.model = fit(train, opts);
  run.accuracy = accuracy(run.model, test);
  run.train_accuracy = accuracy(run.model, train);
  return run;
}

int select_patch(const Dataset& dataset, const ExperimentConfig& config) {
  std::set<int> ids;
  for (const auto& tr : dataset.trajectories) ids.insert(tr.patch_id);
  if (ids.empty()) throw ValidationError("dataset has no trajectories");
  if (config.patch) {
    if (!ids.contains(*config.patch)) {
      std::string avail;
      for (int id : ids) avail += (avail.empty() ? "" : ", ") + std::to_string(id);
      throw ValidationError("patch " + std::to_string(*config.patch) +
                            " not in dataset (available: " + avail + ")");
    }
    return *config.patch;
  }
  return *ids.begin();
}

}  // namespace topotrail::app
