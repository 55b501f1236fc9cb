#pragma once

#include <optional>
#include <span>
#include <vector>

#include "topotrail/learn.hpp"
#include "topotrail/persistence.hpp"
#include "topotrail/trajectory.hpp"
#include "topotrail/vectorize.hpp"
#include "topotrail_app/config.hpp"

namespace topotrail::app {

// Topological summary of one (day, patch) trajectory.
struct DaySignature {
  int day = 0;
  int patch = 0;
  std::optional<int> period;
  PersistenceDiagram h0;
  PersistenceDiagram h1;
  LifetimeDiagram lifetimes;  // of h1
};

// Reads `input` (and the maintenance sidecar) or synthesizes a dataset.
// Periods are assigned whenever maintenance dates are known.
Dataset load_dataset(const ExperimentConfig& config);

DaySignature compute_signature(const Trajectory& trajectory, const ExperimentConfig& config);

// Signatures for every trajectory, optionally restricted to one patch,
// in (day, patch) order.
std::vector<DaySignature> compute_signatures(const Dataset& dataset,
                                             const ExperimentConfig& config,
                                             std::optional<int> patch = std::nullopt);

// Images of all diagrams on one window (the union of their own windows),
// so cells are comparable across samples. Empty diagrams give zeros.
std::vector<PersistenceImage> shared_images(std::span<const LifetimeDiagram> diagrams,
                                            int m, double delta);

struct ClassificationRun {
  std::vector<PersistenceImage> images;
  std::vector<LabeledSample> samples;  // labels after the optional shuffle
  SplitIndices split;
  LogisticModel model;
  double accuracy = 0.0;
  double train_accuracy = 0.0;
};

// Images on a shared window, optional seeded label shuffle, stratified split
// and training, all driven by `config` (seed, fraction, C, tol, max_iter).
ClassificationRun run_classification(const ExperimentConfig& config,
                                     std::span<const DaySignature> signatures,
                                     std::vector<int> labels);

// Patch used by single-patch commands: the configured one, or the lowest id.
int select_patch(const Dataset& dataset, const ExperimentConfig& config);

}  // namespace topotrail::app
