#include "helmscat/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "helmscat/io.hpp"

namespace helmscat {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(s);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError("empty item in list '" + s + "'");
    out.push_back(item);
  }
  return out;
}

}  // namespace

const std::vector<std::string>& RunConfig::known_keys() {
  static const std::vector<std::string> keys = {
      // grid and medium
      "grid_points", "domain_size", "mesh_size", "wavelength", "eta_b", "amplitude",
      "abl_points", "abl_beta",
      // multigrid and Krylov
      "mg_levels", "mg_pre_smooth", "mg_post_smooth", "mg_omega", "mg_cycle",
      "solver_tolerance", "solver_max_iterations",
      // acquisition
      "views", "view_angle", "sensors", "sensor_radius", "active_sensors",
      // object
      "object", "disk_radius", "disk_eta", "disk_center_x", "disk_center_y",
      "phantom_contrast", "object_file",
      // simulate
      "model",
      // reconstruct
      "measurements", "truth", "gamma", "tau", "iterations", "subset_size", "seed",
      "prox_iterations", "record_timing",
      // bench
      "bench_contrasts", "bench_radii", "bench_models"};
  return keys;
}

RunConfig RunConfig::parse(std::string_view text) {
  RunConfig cfg;
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  const auto& keys = known_keys();
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(number) + ": expected key = value");
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw ConfigError("line " + std::to_string(number) + ": unknown key '" + key + "'");
    }
    if (value.empty()) {
      throw ConfigError("line " + std::to_string(number) + ": empty value for '" + key + "'");
    }
    if (!cfg.values_.emplace(key, value).second) {
      throw ConfigError("line " + std::to_string(number) + ": repeated key '" + key + "'");
    }
  }
  return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  RunConfig cfg = parse(ss.str());
  cfg.base_dir_ = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  return cfg;
}

const std::string& RunConfig::text(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing required key '" + key + "'");
  return it->second;
}

std::string RunConfig::text_or(const std::string& key, const std::string& fallback) const {
  return has(key) ? text(key) : fallback;
}

double RunConfig::number(const std::string& key) const {
  try {
    return parse_double(text(key));
  } catch (const std::invalid_argument&) {
    throw ConfigError("'" + key + "' must be a number, got '" + text(key) + "'");
  }
}

double RunConfig::number_or(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

int RunConfig::integer(const std::string& key) const {
  const std::string& s = text(key);
  int v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ConfigError("'" + key + "' must be an integer, got '" + s + "'");
  }
  return v;
}

int RunConfig::integer_or(const std::string& key, int fallback) const {
  return has(key) ? integer(key) : fallback;
}

std::uint64_t RunConfig::unsigned_or(const std::string& key, std::uint64_t fallback) const {
  if (!has(key)) return fallback;
  const std::string& s = text(key);
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ConfigError("'" + key + "' must be a nonnegative integer, got '" + s + "'");
  }
  return v;
}

bool RunConfig::flag_or(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string& s = text(key);
  if (s == "true") return true;
  if (s == "false") return false;
  throw ConfigError("'" + key + "' must be true or false, got '" + s + "'");
}

std::vector<double> RunConfig::numbers_or(const std::string& key,
                                          std::vector<double> fallback) const {
  if (!has(key)) return fallback;
  std::vector<double> out;
  for (const auto& item : split_list(text(key))) {
    try {
      out.push_back(parse_double(item));
    } catch (const std::invalid_argument&) {
      throw ConfigError("'" + key + "' must be a list of numbers, got '" + item + "'");
    }
  }
  return out;
}

std::vector<std::string> RunConfig::words_or(const std::string& key,
                                             std::vector<std::string> fallback) const {
  return has(key) ? split_list(text(key)) : fallback;
}

std::filesystem::path RunConfig::path(const std::string& key) const {
  const std::filesystem::path p(text(key));
  return p.is_absolute() ? p : base_dir_ / p;
}

void RunConfig::set(const std::string& key, std::string value) {
  const auto& keys = known_keys();
  if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
    throw ConfigError("unknown key '" + key + "'");
  }
  values_[key] = std::move(value);
}

}  // namespace helmscat
