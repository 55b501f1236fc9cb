#include "topotrail_app/commands.hpp"

#include <algorithm>
#include <charconv>
#include <climits>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "topotrail/error.hpp"
#include "topotrail/learn.hpp"
#include "topotrail/metric.hpp"
#include "topotrail/svg.hpp"
#include "topotrail_app/pipeline.hpp"

namespace topotrail::app {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class Output {
 public:
  explicit Output(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_)) {
      throw IoError("cannot create output directory '" + dir_.string() + "'");
    }
  }

  template <class F>
  void write(const std::string& name, F&& emit) {
    const fs::path path = dir_ / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    emit(out);
    out.flush();
    if (!out) throw IoError("write failed for '" + path.string() + "'");
    files_.push_back(name);
  }

  void write_text(const std::string& name, const std::string& text) {
    write(name, [&](std::ostream& o) { o << text; });
  }

  // Writes report.json; the manifest includes the report itself.
  CommandResult finish(json report) {
    files_.push_back("report.json");
    report["manifest"] = files_;
    files_.pop_back();
    write_text("report.json", report.dump(2) + "\n");
    return {std::move(report), files_};
  }

  const std::vector<std::string>& files() const { return files_; }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

json window_json(const ImageWindow& w) {
  return {{"birth_min", w.birth_min},
          {"birth_max", w.birth_max},
          {"lifetime_min", w.lifetime_min},
          {"lifetime_max", w.lifetime_max}};
}

const Trajectory& find_trajectory(const Dataset& ds, const ExperimentConfig& cfg) {
  if (ds.trajectories.empty()) throw ValidationError("dataset has no trajectories");
  const int day = cfg.day.value_or(ds.trajectories.front().day);
  for (const auto& tr : ds.trajectories) {
    if (tr.day == day && (!cfg.patch || tr.patch_id == *cfg.patch)) return tr;
  }
  std::string avail;
  for (const auto& tr : ds.trajectories) {
    if (!avail.empty()) avail += ", ";
    avail += std::to_string(tr.day) + "/" + std::to_string(tr.patch_id);
  }
  throw ValidationError("no trajectory for day " + std::to_string(day) +
                        (cfg.patch ? " patch " + std::to_string(*cfg.patch) : "") +
                        " (available day/patch: " + avail + ")");
}

void write_trajectory_svg(std::ostream& out, const Trajectory& tr) {
  std::vector<Point2> pts;
  PlotBounds b{INFINITY, -INFINITY, INFINITY, -INFINITY};
  for (const auto& p : tr.points) {
    pts.push_back({p.x, p.y});
    b.x_min = std::min(b.x_min, p.x);
    b.x_max = std::max(b.x_max, p.x);
    b.y_min = std::min(b.y_min, p.y);
    b.y_max = std::max(b.y_max, p.y);
  }
  SvgPlot plot(480, 480, b.padded(0.05),
               "day " + std::to_string(tr.day) + ", patch " + std::to_string(tr.patch_id));
  plot.axes("x (m)", "y (m)");
  plot.polyline(pts, "black", 0.8);
  plot.write(out);
}

std::vector<PersistenceDiagram> h1_of(const std::vector<DaySignature>& sigs) {
  std::vector<PersistenceDiagram> out;
  for (const auto& s : sigs) out.push_back(s.h1);
  return out;
}

json label_counts(const std::vector<LabeledSample>& samples,
                  const std::vector<std::size_t>& idx) {
  std::size_t c[2] = {0, 0};
  for (auto i : idx) ++c[samples[i].label];
  return {{"0", c[0]}, {"1", c[1]}};
}

// Shared classification tail: images on a common window, seeded split,
// training, scoring and the report.
CommandResult classify(const ExperimentConfig& cfg, const std::string& task,
                       const std::vector<DaySignature>& sigs, std::vector<int> labels,
                       json task_info) {
  const ClassificationRun run = run_classification(cfg, sigs, std::move(labels));
  const auto& samples = run.samples;
  const auto& split = run.split;
  const auto& model = run.model;
  const double acc = run.accuracy;
  const double train_acc = run.train_accuracy;

  Output out(cfg.output_dir);
  out.write("features.csv", [&](std::ostream& o) {
    o << "day,patch,label";
    for (int k = 0; k < cfg.image_m * cfg.image_m; ++k) o << ",f" << k;
    o << '\n';
    for (std::size_t i = 0; i < samples.size(); ++i) {
      o << sigs[i].day << ',' << sigs[i].patch << ',' << samples[i].label;
      for (double v : samples[i].features) {
        char buf[32];
        const auto r = std::to_chars(buf, buf + sizeof buf, v);
        o << ',' << std::string_view(buf, static_cast<std::size_t>(r.ptr - buf));
      }
      o << '\n';
    }
  });
  out.write_text("model.json", model_to_json(model) + "\n");

  std::ostringstream summary;
  summary << task << " classification\n"
          << "samples: " << samples.size() << " (train " << split.train.size() << ", test "
          << split.test.size() << ")\n"
          << "labels: " << (cfg.shuffle_labels ? "shuffled" : "as assigned") << "\n"
          << "test accuracy: " << acc << "\n"
          << "train accuracy: " << train_acc << "\n";
  out.write_text("summary.txt", summary.str());

  json report;
  report["command"] = "classify-" + task;
  report["task"] = task_info;
  report["accuracy"] = acc;
  report["train_accuracy"] = train_acc;
  report["train_size"] = split.train.size();
  report["test_size"] = split.test.size();
  std::vector<std::size_t> all(samples.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  report["counts"] = {{"all", label_counts(samples, all)},
                      {"train", label_counts(samples, split.train)},
                      {"test", label_counts(samples, split.test)}};
  report["split"] = {{"train", split.train}, {"test", split.test}};
  json sample_list = json::array();
  for (std::size_t i = 0; i < sigs.size(); ++i) {
    sample_list.push_back({{"day", sigs[i].day}, {"patch", sigs[i].patch}, {"label", samples[i].label}});
  }
  report["samples"] = sample_list;
  report["shuffled_labels"] = cfg.shuffle_labels;
  report["image_window"] = window_json(run.images.front().window);
  report["model"] = "model.json";
  report["features"] = "features.csv";
  report["config"] = config_to_json(cfg);
  return out.finish(std::move(report));
}

}  // namespace

CommandResult cmd_analyze(const ExperimentConfig& cfg) {
  const Dataset ds = load_dataset(cfg);
  const Trajectory& tr = find_trajectory(ds, cfg);
  const DaySignature sig = compute_signature(tr, cfg);
  const PersistenceImage img = persistence_image(sig.lifetimes, cfg.image_m, cfg.delta);

  Output out(cfg.output_dir);
  out.write("trajectory.svg", [&](std::ostream& o) { write_trajectory_svg(o, tr); });
  out.write("diagram.svg", [&](std::ostream& o) { write_diagram_svg(o, {sig.h0, sig.h1}); });
  out.write("lifetime.svg", [&](std::ostream& o) { write_lifetime_svg(o, sig.lifetimes); });
  out.write("image.pgm", [&](std::ostream& o) { write_image_pgm(o, img); });
  out.write("image.csv", [&](std::ostream& o) { write_image_csv(o, img); });
  out.write_text("diagram.json", diagrams_to_json({sig.h0, sig.h1}) + "\n");

  json report;
  report["command"] = "analyze";
  report["day"] = tr.day;
  report["patch"] = tr.patch_id;
  report["points"] = tr.size();
  report["h0_pairs"] = sig.h0.size();
  report["h1_pairs"] = sig.h1.size();
  report["image_sum"] = img.sum();
  report["image_window"] = window_json(img.window);
  report["manifest"] = out.files();
  return {report, out.files()};
}

CommandResult cmd_distance_series(const ExperimentConfig& cfg) {
  const Dataset ds = load_dataset(cfg);
  const int patch = select_patch(ds, cfg);
  const auto sigs = compute_signatures(ds, cfg, patch);
  if (sigs.size() < 2) {
    throw ValidationError("distance series needs at least 2 days in patch " +
                          std::to_string(patch));
  }
  const auto series = wasserstein_series(h1_of(sigs));
  const std::size_t peak =
      static_cast<std::size_t>(std::max_element(series.begin(), series.end()) - series.begin());

  Output out(cfg.output_dir);
  out.write("series.csv", [&](std::ostream& o) { write_series_csv(o, series); });
  out.write("series.svg", [&](std::ostream& o) {
    // Point i sits at the later day of its pair.
    std::vector<Point2> pts;
    double y_max = 0.0;
    for (std::size_t i = 0; i < series.size(); ++i) {
      pts.push_back({static_cast<double>(sigs[i + 1].day), series[i]});
      y_max = std::max(y_max, series[i]);
    }
    const PlotBounds b{pts.front().x, pts.back().x, 0.0, y_max};
    SvgPlot plot(640, 320, b.padded(0.05), "Wasserstein distance, consecutive days");
    plot.axes("day", "W");
    for (int d : ds.maintenance_dates) {
      if (d >= b.x_min && d <= b.x_max) plot.line(d, 0.0, d, y_max, "red", 1.5);
    }
    plot.polyline(pts, "black", 1.0);
    for (const auto& p : pts) plot.circle(p.x, p.y, 2.0, "black");
    plot.write(o);
  });

  json report;
  report["command"] = "distance-series";
  report["patch"] = patch;
  std::vector<int> days;
  for (const auto& s : sigs) days.push_back(s.day);
  report["days"] = days;
  report["series"] = series;
  report["peak_index"] = peak;
  report["peak_day"] = sigs[peak + 1].day;
  report["maintenance_dates"] = ds.maintenance_dates;
  report["manifest"] = out.files();
  return {report, out.files()};
}

CommandResult cmd_barycenters(const ExperimentConfig& cfg) {
  const Dataset ds = load_dataset(cfg);
  const int patch = select_patch(ds, cfg);
  const auto sigs = compute_signatures(ds, cfg, patch);
  const int periods = static_cast<int>(ds.maintenance_dates.size()) + 1;

  BarycenterOptions opts;
  opts.tol = cfg.barycenter_tol;
  opts.max_iter = cfg.barycenter_max_iter;

  struct Named {
    std::string name;
    BarycenterResult result;
    std::vector<int> days;
  };
  std::vector<Named> results;
  json skipped = json::array();
  std::optional<std::size_t> first;
  std::vector<DaySignature> first_members;
  for (int k = 0; k < periods; ++k) {
    std::vector<DaySignature> members;
    for (const auto& s : sigs) {
      if (s.period.value_or(0) == k) members.push_back(s);
    }
    if (members.empty()) {
      std::cerr << "warning: period " << k << " has no days in patch " << patch
                << "; skipped\n";
      skipped.push_back(k);
      continue;
    }
    std::vector<int> days;
    for (const auto& s : members) days.push_back(s.day);
    if (!first) {
      first = results.size();
      first_members = members;
    }
    results.push_back({"period_" + std::to_string(k), barycenter(h1_of(members), opts), days});
  }
  if (!first) throw ValidationError("no days in patch " + std::to_string(patch));

  // Two halves of equal length; the middle day is left out when the count is odd.
  const std::size_t half = first_members.size() / 2;
  const std::size_t n_periods = results.size();
  if (half >= 1) {
    const std::vector<DaySignature> a(first_members.begin(), first_members.begin() + half);
    const std::vector<DaySignature> b(first_members.end() - half, first_members.end());
    for (const auto* part : {&a, &b}) {
      std::vector<int> days;
      for (const auto& s : *part) days.push_back(s.day);
      results.push_back({part == &a ? "half_1" : "half_2", barycenter(h1_of(*part), opts), days});
    }
  }

  std::vector<LifetimeDiagram> lts;
  for (const auto& r : results) lts.push_back(lifetime_diagram(r.result.diagram));
  const auto images = shared_images(lts, cfg.image_m, cfg.delta);

  Output out(cfg.output_dir);
  json entries = json::array();
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    const std::string stem = "barycenter_" + r.name;
    out.write_text(stem + ".json", diagram_to_json(r.result.diagram) + "\n");
    out.write(stem + ".pgm", [&](std::ostream& o) { write_image_pgm(o, images[i]); });
    entries.push_back({{"name", r.name},
                       {"days", r.days},
                       {"points", r.result.diagram.size()},
                       {"energy", r.result.energy},
                       {"iterations", r.result.iterations},
                       {"energy_trace", r.result.energy_trace}});
  }

  json distances = json::array();
  std::ostringstream text;
  text << "Barycenters of H1 diagrams, patch " << patch << "\n";
  for (std::size_t i = 0; i < n_periods; ++i) {
    for (std::size_t j = i + 1; j < n_periods; ++j) {
      const double w = wasserstein(results[i].result.diagram, results[j].result.diagram);
      distances.push_back({{"a", results[i].name}, {"b", results[j].name}, {"distance", w}});
      text << "W(" << results[i].name << ", " << results[j].name << ") = " << w << "\n";
    }
  }
  json halves;
  if (half >= 1) {
    const auto& full = results[*first].result.diagram;
    const auto& h1 = results[n_periods].result.diagram;
    const auto& h2 = results[n_periods + 1].result.diagram;
    halves = {{"period", results[*first].name},
              {"half_1_to_full", wasserstein(h1, full)},
              {"half_2_to_full", wasserstein(h2, full)},
              {"half_1_to_half_2", wasserstein(h1, h2)}};
    text << "W(half_1, " << results[*first].name << ") = " << halves["half_1_to_full"] << "\n"
         << "W(half_2, " << results[*first].name << ") = " << halves["half_2_to_full"] << "\n"
         << "W(half_1, half_2) = " << halves["half_1_to_half_2"] << "\n";
  }
  out.write_text("summary.txt", text.str());

  json report;
  report["command"] = "barycenters";
  report["patch"] = patch;
  report["barycenters"] = entries;
  report["period_distances"] = distances;
  report["halves"] = halves;
  report["skipped_periods"] = skipped;
  report["image_window"] = window_json(images.front().window);
  report["config"] = config_to_json(cfg);
  return out.finish(std::move(report));
}

CommandResult cmd_classify_patch(const ExperimentConfig& cfg) {
  if (!cfg.target_patch) throw ValidationError("classify-patch needs a target patch");
  const Dataset ds = load_dataset(cfg);
  const int target = *cfg.target_patch;
  const bool present = std::any_of(ds.trajectories.begin(), ds.trajectories.end(),
                                   [&](const Trajectory& t) { return t.patch_id == target; });
  if (!present) throw ValidationError("target patch " + std::to_string(target) + " not in dataset");
  const auto sigs = compute_signatures(ds, cfg);
  std::vector<int> labels;
  for (const auto& s : sigs) labels.push_back(s.patch == target ? 1 : 0);
  return classify(cfg, "patch", sigs, std::move(labels), {{"target_patch", target}});
}

CommandResult cmd_classify_maintenance(const ExperimentConfig& cfg) {
  const Dataset ds = load_dataset(cfg);
  const auto& dates = ds.maintenance_dates;
  if (dates.empty()) throw ValidationError("dataset has no maintenance dates");
  int date = 0;
  if (cfg.maintenance_date) {
    if (!std::binary_search(dates.begin(), dates.end(), *cfg.maintenance_date)) {
      throw ValidationError("maintenance_date " + std::to_string(*cfg.maintenance_date) +
                            " is not a maintenance date of the dataset");
    }
    date = *cfg.maintenance_date;
  } else if (dates.size() == 1) {
    date = dates.front();
  } else {
    throw ValidationError("dataset has several maintenance dates; set maintenance_date");
  }
  const auto it = std::lower_bound(dates.begin(), dates.end(), date);
  const int lo = it == dates.begin() ? INT_MIN : *(it - 1);
  const int hi = it + 1 == dates.end() ? INT_MAX : *(it + 1);

  const int patch = select_patch(ds, cfg);
  Dataset window;
  for (const auto& tr : ds.trajectories) {
    if (tr.patch_id == patch && tr.day >= lo && tr.day < hi) window.trajectories.push_back(tr);
  }
  const auto sigs = compute_signatures(window, cfg);
  std::vector<int> labels;
  int after = 0;
  for (const auto& s : sigs) {
    labels.push_back(s.day >= date ? 1 : 0);
    after += labels.back();
  }
  const int before = static_cast<int>(labels.size()) - after;
  if (before < 2 || after < 2) {
    throw ValidationError("need at least 2 days on each side of maintenance date " +
                          std::to_string(date) + " (have " + std::to_string(before) + " and " +
                          std::to_string(after) + ")");
  }
  return classify(cfg, "maintenance", sigs, std::move(labels),
                  {{"maintenance_date", date}, {"patch", patch}});
}

CommandResult cmd_synth(const ExperimentConfig& cfg) {
  const Dataset ds = generate_synthetic(effective_synth(cfg));
  Output out(cfg.output_dir);
  out.write("dataset.csv", [&](std::ostream& o) { write_trajectory_csv(o, ds); });
  out.write("maintenance.txt",
            [&](std::ostream& o) { write_maintenance_dates(o, ds.maintenance_dates); });
  json report;
  report["command"] = "synth";
  report["trajectories"] = ds.trajectories.size();
  report["maintenance_dates"] = ds.maintenance_dates;
  report["manifest"] = out.files();
  return {report, out.files()};
}

CommandResult run_command(const std::string& name, const ExperimentConfig& config) {
  if (name == "analyze") return cmd_analyze(config);
  if (name == "distance-series") return cmd_distance_series(config);
  if (name == "barycenters") return cmd_barycenters(config);
  if (name == "classify-patch") return cmd_classify_patch(config);
  if (name == "classify-maintenance") return cmd_classify_maintenance(config);
  if (name == "synth") return cmd_synth(config);
  throw ValidationError("unknown command '" + name + "'");
}

}  // namespace topotrail::app
