#include "topotrail_app/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "topotrail/error.hpp"

namespace topotrail::app {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <class T>
T parse_number(const std::string& text, std::size_t line, const std::string& key) {
  T value{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ParseError(line, "bad value for '" + key + "': '" + text + "'");
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) throw ParseError(line, "'" + key + "' must be finite");
  }
  return value;
}

std::vector<double> parse_list(const std::string& text, std::size_t line,
                               const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number<double>(trim(item), line, key));
  if (out.empty()) throw ParseError(line, "'" + key + "' needs at least one value");
  return out;
}

std::vector<Point2> parse_polygon(const std::string& text, std::size_t line,
                                  const std::string& key) {
  std::vector<Point2> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::istringstream xy(item);
    std::string x, y, rest;
    if (!(xy >> x >> y) || (xy >> rest)) {
      throw ParseError(line, "'" + key + "' expects 'x y, x y, ...'");
    }
    out.push_back({parse_number<double>(x, line, key), parse_number<double>(y, line, key)});
  }
  return out;
}

bool parse_bool(const std::string& text, std::size_t line, const std::string& key) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ParseError(line, "bad boolean for '" + key + "': '" + text + "'");
}

void require(bool ok, std::size_t line, const std::string& msg) {
  if (!ok) throw ParseError(line, msg);
}

}  // namespace

ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
  ExperimentConfig cfg;
  std::optional<int> patch_count;
  std::optional<double> patch_size;
  std::optional<std::vector<double>> step_scales;
  std::map<int, std::vector<Point2>> polygons;
  std::size_t step_scale_line = 0;
  std::set<std::string> seen;

  auto path_value = [&](const std::string& v) {
    std::filesystem::path p(v);
    return p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  };

  using Setter = std::function<void(const std::string&, std::size_t, const std::string&)>;
  const std::map<std::string, Setter> setters{
      {"input", [&](auto& v, auto, auto&) { cfg.input = path_value(v); }},
      {"maintenance", [&](auto& v, auto, auto&) { cfg.maintenance = path_value(v); }},
      {"output_dir", [&](auto& v, auto, auto&) { cfg.output_dir = path_value(v); }},
      {"subsample_target",
       [&](auto& v, auto l, auto& k) {
         cfg.subsample_target = parse_number<std::size_t>(v, l, k);
         require(cfg.subsample_target >= 2, l, "subsample_target must be >= 2");
       }},
      {"subsample_strategy",
       [&](auto& v, auto l, auto&) {
         if (v == "maxmin") {
           cfg.subsample_strategy = SubsampleStrategy::kMaxMin;
         } else if (v == "stride") {
           cfg.subsample_strategy = SubsampleStrategy::kStride;
         } else {
           throw ParseError(l, "subsample_strategy must be 'maxmin' or 'stride'");
         }
       }},
      {"image_m",
       [&](auto& v, auto l, auto& k) {
         cfg.image_m = parse_number<int>(v, l, k);
         require(cfg.image_m >= 1, l, "image_m must be >= 1");
       }},
      {"delta",
       [&](auto& v, auto l, auto& k) {
         cfg.delta = parse_number<double>(v, l, k);
         require(cfg.delta > 0 && cfg.delta < 1, l, "delta must be in (0, 1)");
       }},
      {"C",
       [&](auto& v, auto l, auto& k) {
         cfg.C = parse_number<double>(v, l, k);
         require(cfg.C > 0, l, "C must be positive");
       }},
      {"tol",
       [&](auto& v, auto l, auto& k) {
         cfg.tol = parse_number<double>(v, l, k);
         require(cfg.tol > 0, l, "tol must be positive");
       }},
      {"max_iter",
       [&](auto& v, auto l, auto& k) {
         cfg.max_iter = parse_number<int>(v, l, k);
         require(cfg.max_iter >= 1, l, "max_iter must be >= 1");
       }},
      {"train_fraction",
       [&](auto& v, auto l, auto& k) {
         cfg.train_fraction = parse_number<double>(v, l, k);
         require(cfg.train_fraction > 0 && cfg.train_fraction < 1, l,
                 "train_fraction must be in (0, 1)");
       }},
      {"barycenter_tol",
       [&](auto& v, auto l, auto& k) {
         cfg.barycenter_tol = parse_number<double>(v, l, k);
         require(cfg.barycenter_tol > 0, l, "barycenter_tol must be positive");
       }},
      {"barycenter_max_iter",
       [&](auto& v, auto l, auto& k) {
         cfg.barycenter_max_iter = parse_number<int>(v, l, k);
         require(cfg.barycenter_max_iter >= 1, l, "barycenter_max_iter must be >= 1");
       }},
      {"seed", [&](auto& v, auto l, auto& k) { cfg.seed = parse_number<std::uint64_t>(v, l, k); }},
      {"target_patch", [&](auto& v, auto l, auto& k) { cfg.target_patch = parse_number<int>(v, l, k); }},
      {"day", [&](auto& v, auto l, auto& k) { cfg.day = parse_number<int>(v, l, k); }},
      {"patch", [&](auto& v, auto l, auto& k) { cfg.patch = parse_number<int>(v, l, k); }},
      {"maintenance_date",
       [&](auto& v, auto l, auto& k) { cfg.maintenance_date = parse_number<int>(v, l, k); }},
      {"shuffle_labels", [&](auto& v, auto l, auto& k) { cfg.shuffle_labels = parse_bool(v, l, k); }},
      {"synth.days_per_regime",
       [&](auto& v, auto l, auto& k) { cfg.synth.days_per_regime = parse_number<int>(v, l, k); }},
      {"synth.steps_per_day",
       [&](auto& v, auto l, auto& k) { cfg.synth.steps_per_day = parse_number<int>(v, l, k); }},
      {"synth.step_length_mean",
       [&](auto& v, auto l, auto& k) { cfg.synth.step_length_mean = parse_list(v, l, k); }},
      {"synth.turning_angle_concentration",
       [&](auto& v, auto l, auto& k) {
         cfg.synth.turning_angle_concentration = parse_list(v, l, k);
       }},
      {"synth.sample_interval",
       [&](auto& v, auto l, auto& k) { cfg.synth.sample_interval = parse_number<double>(v, l, k); }},
      {"synth.seed",
       [&](auto& v, auto l, auto& k) {
         cfg.synth.seed = parse_number<std::uint64_t>(v, l, k);
         cfg.synth_seed_set = true;
       }},
      {"synth.patch_count",
       [&](auto& v, auto l, auto& k) {
         patch_count = parse_number<int>(v, l, k);
         require(*patch_count >= 1, l, "synth.patch_count must be >= 1");
       }},
      {"synth.patch_size",
       [&](auto& v, auto l, auto& k) {
         patch_size = parse_number<double>(v, l, k);
         require(*patch_size > 0, l, "synth.patch_size must be positive");
       }},
      {"synth.patch_step_scale",
       [&](auto& v, auto l, auto& k) {
         step_scales = parse_list(v, l, k);
         step_scale_line = l;
       }},
  };

  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string text = trim(raw);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ParseError(line, "expected 'key = value'");
    const std::string key = trim(std::string_view(text).substr(0, eq));
    const std::string value = trim(std::string_view(text).substr(eq + 1));
    if (key.empty()) throw ParseError(line, "missing key");
    if (!seen.insert(key).second) throw ParseError(line, "duplicate key '" + key + "'");

    constexpr std::string_view poly_prefix = "synth.patch_polygon.";
    if (key.starts_with(poly_prefix)) {
      const int id = parse_number<int>(key.substr(poly_prefix.size()), line, key);
      polygons[id] = parse_polygon(value, line, key);
      continue;
    }
    const auto it = setters.find(key);
    if (it == setters.end()) throw ParseError(line, "unknown key '" + key + "'");
    it->second(value, line, key);
  }

  if (patch_count || patch_size || step_scales || !polygons.empty()) {
    const int count = patch_count.value_or(static_cast<int>(cfg.synth.patches.size()));
    const double size = patch_size.value_or(60.0);
    if (step_scales && step_scales->size() != 1 &&
        step_scales->size() != static_cast<std::size_t>(count)) {
      throw ParseError(step_scale_line,
                       "synth.patch_step_scale needs 1 or synth.patch_count values");
    }
    cfg.synth.patches.clear();
    for (int id = 1; id <= count; ++id) {
      SynthPatch p;
      p.id = id;
      const double x0 = (id - 1) * (size + 10.0);
      p.polygon = {{x0, 0}, {x0 + size, 0}, {x0 + size, size}, {x0, size}};
      if (step_scales) {
        p.step_scale = (*step_scales)[step_scales->size() == 1 ? 0 : id - 1];
      }
      if (auto it = polygons.find(id); it != polygons.end()) p.polygon = it->second;
      cfg.synth.patches.push_back(std::move(p));
    }
    for (const auto& [id, poly] : polygons) {
      if (id < 1 || id > count) {
        throw ValidationError("synth.patch_polygon." + std::to_string(id) +
                              " does not name a patch");
      }
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  return parse_config(in, path.parent_path());
}

SynthConfig effective_synth(const ExperimentConfig& config) {
  SynthConfig s = config.synth;
  if (!config.synth_seed_set) s.seed = config.seed;
  return s;
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  if (c.input) j["input"] = c.input->string();
  if (c.maintenance) j["maintenance"] = c.maintenance->string();
  j["output_dir"] = c.output_dir.string();
  j["subsample_target"] = c.subsample_target;
  j["subsample_strategy"] =
      c.subsample_strategy == SubsampleStrategy::kMaxMin ? "maxmin" : "stride";
  j["image_m"] = c.image_m;
  j["delta"] = c.delta;
  j["C"] = c.C;
  j["tol"] = c.tol;
  j["max_iter"] = c.max_iter;
  j["train_fraction"] = c.train_fraction;
  j["barycenter_tol"] = c.barycenter_tol;
  j["barycenter_max_iter"] = c.barycenter_max_iter;
  j["seed"] = c.seed;
  if (c.target_patch) j["target_patch"] = *c.target_patch;
  if (c.day) j["day"] = *c.day;
  if (c.patch) j["patch"] = *c.patch;
  if (c.maintenance_date) j["maintenance_date"] = *c.maintenance_date;
  j["shuffle_labels"] = c.shuffle_labels;
  if (!c.input) {
    const SynthConfig s = effective_synth(c);
    nlohmann::json sj;
    sj["days_per_regime"] = s.days_per_regime;
    sj["steps_per_day"] = s.steps_per_day;
    sj["step_length_mean"] = s.step_length_mean;
    sj["turning_angle_concentration"] = s.turning_angle_concentration;
    sj["sample_interval"] = s.sample_interval;
    sj["seed"] = s.seed;
    for (const auto& p : s.patches) {
      nlohmann::json pj;
      pj["id"] = p.id;
      pj["step_scale"] = p.step_scale;
      for (const auto& v : p.polygon) pj["polygon"].push_back({v.x, v.y});
      sj["patches"].push_back(pj);
    }
    j["synth"] = sj;
  }
  return j;
}

}  // namespace topotrail::app
