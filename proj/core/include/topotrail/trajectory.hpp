#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

namespace topotrail {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

// One GPS fix projected to a local metric frame.
struct TrajectoryPoint {
  double t = 0.0;  // seconds
  double x = 0.0;  // meters
  double y = 0.0;  // meters

  friend bool operator==(const TrajectoryPoint&, const TrajectoryPoint&) = default;
};

// The samples recorded by one robot in one patch on one day.
struct Trajectory {
  std::vector<TrajectoryPoint> points;
  int day = 0;
  int patch_id = 0;
  std::optional<int> period_id;

  std::size_t size() const noexcept { return points.size(); }

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

struct Dataset {
  std::vector<Trajectory> trajectories;  // ordered by (day, patch_id)
  std::vector<int> maintenance_dates;    // strictly increasing

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

// Reads the `day,patch,t,x,y` CSV dialect. Records are grouped into one
// trajectory per (day, patch); timestamps must be non-decreasing within a
// group in file order. When `maintenance` is given, its dates are read
// (one per line) and periods are assigned.
//
// Throws ParseError for malformed lines (including non-finite numbers) and
// ValidationError for empty input or out-of-order timestamps.
Dataset parse_trajectory_csv(std::istream& in,
                             std::istream* maintenance = nullptr);

std::vector<int> parse_maintenance_dates(std::istream& in);

void write_trajectory_csv(std::ostream& out, const Dataset& dataset);
void write_maintenance_dates(std::ostream& out, const std::vector<int>& dates);

// Sets period_id of every trajectory to the number of maintenance dates on
// or before its day. Days before the first maintenance are period 0.
Dataset segment_periods(Dataset dataset);

enum class SubsampleStrategy { kStride, kMaxMin };

// Indices (ascending) of the points kept by `subsample`.
std::vector<std::size_t> subsample_indices(const Trajectory& trajectory,
                                           SubsampleStrategy strategy,
                                           std::size_t target_size);

// Keeps at most `target_size` points of `trajectory`, in original order.
// kStride keeps every ceil(n/target)-th point and always the last one;
// kMaxMin picks greedy farthest-point landmarks seeded at the first point.
Trajectory subsample(const Trajectory& trajectory, SubsampleStrategy strategy,
                     std::size_t target_size);

// Synthetic stand-in for field recordings: every day is a reflected random
// walk inside the day's patch polygon. Regimes are consecutive blocks of
// `days_per_regime` days separated by maintenance events.
struct SynthPatch {
  int id = 1;
  std::vector<Point2> polygon;  // convex, either orientation
  double step_scale = 1.0;      // multiplies the regime step length
};

struct SynthConfig {
  std::vector<SynthPatch> patches;
  int days_per_regime = 25;
  int steps_per_day = 1000;
  std::vector<double> step_length_mean;             // per regime, meters
  std::vector<double> turning_angle_concentration;  // per regime, von Mises kappa
  double sample_interval = 1.0;                     // seconds between fixes
  std::uint64_t seed = 1;
};

// Two regimes over one 60 m square patch, step lengths 1.5 m and 4 m.
SynthConfig default_synth_config();

// Deterministic in `config.seed`. Day d (1-based) uses patch
// (d - 1) mod |patches|; the first day of every regime after the first is a
// maintenance date. Throws ValidationError on invalid configuration.
Dataset generate_synthetic(const SynthConfig& config);

bool polygon_contains(const std::vector<Point2>& polygon, Point2 p,
                      double tolerance = 1e-9);

}  // namespace topotrail
