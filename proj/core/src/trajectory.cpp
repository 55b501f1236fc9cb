#include "topotrail/trajectory.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>

#include "topotrail/error.hpp"

namespace topotrail {
namespace {

constexpr std::string_view kHeader = "day,patch,t,x,y";

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r";
  const auto begin = s.find_first_not_of(ws);
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(ws);
  return s.substr(begin, end - begin + 1);
}

template <typename T>
T parse_number(std::string_view field, std::size_t line, const char* name) {
  field = trim(field);
  T value{};
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (field.empty() || ec != std::errc{} || ptr != last) {
    throw ParseError(line, std::string("invalid ") + name + " field '" +
                               std::string(field) + "'");
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) {
      throw ParseError(line, std::string("non-finite ") + name + " value");
    }
  }
  return value;
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

Dataset parse_trajectory_csv(std::istream& in, std::istream* maintenance) {
  std::string raw;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, raw)) {
    ++line_no;
    if (trim(raw).empty()) continue;
    if (trim(raw) != kHeader) {
      throw ParseError(line_no, "expected header '" + std::string(kHeader) + "'");
    }
    have_header = true;
    break;
  }
  if (!have_header) throw ValidationError("empty trajectory input");

  std::map<std::pair<int, int>, Trajectory> groups;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty()) continue;

    std::string_view fields[5];
    std::size_t count = 0;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      if (count == 5) {
        throw ParseError(line_no, "expected 5 fields");
      }
      fields[count++] = line.substr(start, comma == std::string_view::npos
                                               ? std::string_view::npos
                                               : comma - start);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (count != 5) throw ParseError(line_no, "expected 5 fields");

    const int day = parse_number<int>(fields[0], line_no, "day");
    const int patch = parse_number<int>(fields[1], line_no, "patch");
    TrajectoryPoint p;
    p.t = parse_number<double>(fields[2], line_no, "t");
    p.x = parse_number<double>(fields[3], line_no, "x");
    p.y = parse_number<double>(fields[4], line_no, "y");

    auto& traj = groups[{day, patch}];
    if (traj.points.empty()) {
      traj.day = day;
      traj.patch_id = patch;
    } else if (p.t < traj.points.back().t) {
      throw ValidationError("line " + std::to_string(line_no) +
                            ": timestamp decreases within day " +
                            std::to_string(day) + ", patch " +
                            std::to_string(patch));
    }
    traj.points.push_back(p);
  }
  if (groups.empty()) throw ValidationError("trajectory input has no records");

  Dataset dataset;
  dataset.trajectories.reserve(groups.size());
  for (auto& [key, traj] : groups) dataset.trajectories.push_back(std::move(traj));

  if (maintenance != nullptr) {
    dataset.maintenance_dates = parse_maintenance_dates(*maintenance);
    dataset = segment_periods(std::move(dataset));
  }
  return dataset;
}

std::vector<int> parse_maintenance_dates(std::istream& in) {
  std::vector<int> dates;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (trim(raw).empty()) continue;
    dates.push_back(parse_number<int>(raw, line_no, "maintenance day"));
  }
  return dates;
}

void write_trajectory_csv(std::ostream& out, const Dataset& dataset) {
  out << kHeader << '\n';
  for (const auto& traj : dataset.trajectories) {
    for (const auto& p : traj.points) {
      out << traj.day << ',' << traj.patch_id << ',' << format_double(p.t)
          << ',' << format_double(p.x) << ',' << format_double(p.y) << '\n';
    }
  }
}

void write_maintenance_dates(std::ostream& out, const std::vector<int>& dates) {
  for (int d : dates) out << d << '\n';
}

Dataset segment_periods(Dataset dataset) {
  const auto& dates = dataset.maintenance_dates;
  if (std::adjacent_find(dates.begin(), dates.end(), std::greater_equal<>()) !=
      dates.end()) {
    throw ValidationError("maintenance dates must be strictly increasing");
  }
  for (auto& traj : dataset.trajectories) {
    const auto it = std::upper_bound(dates.begin(), dates.end(), traj.day);
    traj.period_id = static_cast<int>(it - dates.begin());
  }
  return dataset;
}

std::vector<std::size_t> subsample_indices(const Trajectory& trajectory,
                                           SubsampleStrategy strategy,
                                           std::size_t target_size) {
  if (target_size < 2) throw ValidationError("subsample target must be >= 2");
  const std::size_t n = trajectory.points.size();
  std::vector<std::size_t> keep;
  if (n <= target_size) {
    keep.resize(n);
    for (std::size_t i = 0; i < n; ++i) keep[i] = i;
    return keep;
  }

  if (strategy == SubsampleStrategy::kStride) {
    const std::size_t stride = (n + target_size - 1) / target_size;
    for (std::size_t i = 0; i < n; i += stride) keep.push_back(i);
    if (keep.back() != n - 1) {
      if (keep.size() < target_size) {
        keep.push_back(n - 1);
      } else {
        keep.back() = n - 1;
      }
    }
    return keep;
  }

  // Greedy farthest-point sampling; ties go to the lowest index.
  const auto& pts = trajectory.points;
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  std::vector<bool> chosen(n, false);
  std::size_t current = 0;
  for (std::size_t round = 0; round < target_size; ++round) {
    chosen[current] = true;
    keep.push_back(current);
    std::size_t best = n;
    double best_dist = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (chosen[i]) continue;
      const double d = std::hypot(pts[i].x - pts[current].x,
                                  pts[i].y - pts[current].y);
      nearest[i] = std::min(nearest[i], d);
      if (nearest[i] > best_dist) {
        best_dist = nearest[i];
        best = i;
      }
    }
    // Only duplicates of chosen points remain.
    if (best == n) break;
    current = best;
  }
  std::sort(keep.begin(), keep.end());
  return keep;
}

Trajectory subsample(const Trajectory& trajectory, SubsampleStrategy strategy,
                     std::size_t target_size) {
  const auto keep = subsample_indices(trajectory, strategy, target_size);
  Trajectory out;
  out.day = trajectory.day;
  out.patch_id = trajectory.patch_id;
  out.period_id = trajectory.period_id;
  out.points.reserve(keep.size());
  for (std::size_t i : keep) out.points.push_back(trajectory.points[i]);
  return out;
}

}  // namespace topotrail
