#include "hodm/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace hodm {

ConfigError::ConfigError(std::vector<std::string> errors)
    : ValidationError([&] {
        std::string msg = "invalid configuration:";
        for (const auto& e : errors) msg += "\n  " + e;
        return msg;
      }()),
      errors_(std::move(errors)) {}

std::vector<ReflectionPath> default_reflector_catalog() {
  // Reflector distances sit a fraction of a millimetre off round values so
  // that, at the first carrier and mode 0, even-bounce paths arrive in phase
  // with the LoS path and odd-bounce paths 45 degrees away from it.
  return {
      {{0.293376172}, {15.0}},
      {{0.394097822}, {15.0}},
      {{0.499209978}, {15.0}},
      {{0.594105499}, {15.0}},
      {{0.174303443, 0.174303443}, {15.0, 15.0}},
      {{0.223105211, 0.223105211}, {15.0, 15.0}},
      {{0.274690724, 0.274690724}, {15.0, 15.0}},
      {{0.322023560, 0.322023560}, {15.0, 15.0}},
      {{0.131365941, 0.131365941, 0.131365941}, {15.0, 15.0, 15.0}},
      {{0.166403326, 0.166403326, 0.166403326}, {15.0, 15.0, 15.0}},
      {{0.198035166, 0.198035166, 0.198035166}, {15.0, 15.0, 15.0}},
      {{0.231792664, 0.231792664, 0.231792664}, {15.0, 15.0, 15.0}},
  };
}

ExperimentConfig default_config() {
  ExperimentConfig c;
  c.paths.include_los = true;
  c.paths.reflections = default_reflector_catalog();
  c.distance_values = {1, 2, 5, 10, 20, 50, 100};
  c.mode_counts = {8, 16, 32};
  c.path_counts = {1, 4, 7, 10, 13};
  c.mode_orders = {0, 1, 2, 3, 4};
  c.snr_values = {0, 5, 10, 15, 20, 25, 30};
  c.rho_values = {0.01, 0.05, 0.1, 0.5};
  c.subcarrier_counts = {16, 32};
  return c;
}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

PathSet select_paths(const PathSet& catalog, int total_paths) {
  if (total_paths < 1 || (total_paths - 1) % 3 != 0) {
    throw ValidationError("path count " + std::to_string(total_paths) +
                          " is not of the form 1 + 3k");
  }
  const int per_category = (total_paths - 1) / 3;
  PathSet out;
  out.include_los = true;
  int taken[4] = {0, 0, 0, 0};
  for (const auto& p : catalog.reflections) {
    if (taken[p.order()] < per_category) {
      out.reflections.push_back(p);
      ++taken[p.order()];
    }
  }
  for (int order = 1; order <= 3; ++order) {
    if (taken[order] < per_category) {
      throw ValidationError("path count " + std::to_string(total_paths) + " needs " +
                            std::to_string(per_category) + " reflections of order " +
                            std::to_string(order) + " but the catalog has " +
                            std::to_string(taken[order]));
    }
  }
  return out;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

template <typename T>
T parse_number(const std::string& text) {
  T value{};
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, value);
  if (text.empty() || res.ec != std::errc() || res.ptr != end) {
    throw std::invalid_argument("'" + text + "' is not a valid number");
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) throw std::invalid_argument("'" + text + "' is not finite");
  }
  return value;
}

template <typename T>
std::vector<T> parse_list(const std::string& text) {
  std::vector<T> out;
  if (trim(text).empty()) return out;
  for (const auto& item : split(text, ',')) out.push_back(parse_number<T>(item));
  return out;
}

bool parse_bool(const std::string& text) {
  if (text == "true") return true;
  if (text == "false") return false;
  throw std::invalid_argument("'" + text + "' is not true or false");
}

ReflectionPath parse_path(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) {
    throw std::invalid_argument("expected 'order : distances : permittivities'");
  }
  const int order = parse_number<int>(parts[0]);
  ReflectionPath p{parse_list<double>(parts[1]), parse_list<double>(parts[2])};
  if (order != p.order()) {
    throw std::invalid_argument("order " + std::to_string(order) + " does not match " +
                                std::to_string(p.order()) + " bounce distances");
  }
  return p;
}

template <typename T>
std::string join(const std::vector<T>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    if constexpr (std::is_floating_point_v<T>) {
      out += format_double(values[i]);
    } else {
      out += std::to_string(values[i]);
    }
  }
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"num_elements", [](auto& c, const auto& v) { c.geometry.num_elements = parse_number<int>(v); }},
      {"radius_tx", [](auto& c, const auto& v) { c.geometry.radius_tx = parse_number<double>(v); }},
      {"radius_rx", [](auto& c, const auto& v) { c.geometry.radius_rx = parse_number<double>(v); }},
      {"axial_distance", [](auto& c, const auto& v) { c.geometry.axial_distance = parse_number<double>(v); }},
      {"attenuation", [](auto& c, const auto& v) { c.geometry.attenuation = parse_number<double>(v); }},
      {"num_subcarriers", [](auto& c, const auto& v) { c.num_subcarriers = parse_number<int>(v); }},
      {"first_carrier_hz", [](auto& c, const auto& v) { c.first_carrier_hz = parse_number<double>(v); }},
      {"subcarrier_spacing_hz", [](auto& c, const auto& v) { c.subcarrier_spacing_hz = parse_number<double>(v); }},
      {"cp_length", [](auto& c, const auto& v) { c.cp_length = parse_number<int>(v); }},
      {"delay_mapping",
       [](auto& c, const auto& v) {
         if (v == "category") c.delay_mapping = DelayMapping::kCategoryIndex;
         else if (v == "rounded") c.delay_mapping = DelayMapping::kRounded;
         else throw std::invalid_argument("expected 'category' or 'rounded'");
       }},
      {"include_4pi", [](auto& c, const auto& v) { c.gain_options.include_4pi = parse_bool(v); }},
      {"phase_convention",
       [](auto& c, const auto& v) {
         if (v == "derived") c.gain_options.convention = PhaseConvention::kDerived;
         else if (v == "published") c.gain_options.convention = PhaseConvention::kPublished;
         else throw std::invalid_argument("expected 'derived' or 'published'");
       }},
      {"include_los", [](auto& c, const auto& v) { c.paths.include_los = parse_bool(v); }},
      {"mode", [](auto& c, const auto& v) { c.mode = parse_number<int>(v); }},
      {"base_path_count", [](auto& c, const auto& v) { c.base_path_count = parse_number<int>(v); }},
      {"distance_values", [](auto& c, const auto& v) { c.distance_values = parse_list<double>(v); }},
      {"mode_counts", [](auto& c, const auto& v) { c.mode_counts = parse_list<int>(v); }},
      {"path_counts", [](auto& c, const auto& v) { c.path_counts = parse_list<int>(v); }},
      {"mode_orders", [](auto& c, const auto& v) { c.mode_orders = parse_list<int>(v); }},
      {"snr_values", [](auto& c, const auto& v) { c.snr_values = parse_list<double>(v); }},
      {"rho_values", [](auto& c, const auto& v) { c.rho_values = parse_list<double>(v); }},
      {"subcarrier_counts", [](auto& c, const auto& v) { c.subcarrier_counts = parse_list<int>(v); }},
      {"realizations", [](auto& c, const auto& v) { c.realizations = parse_number<std::size_t>(v); }},
      {"cee_draws", [](auto& c, const auto& v) { c.cee_draws = parse_number<std::size_t>(v); }},
      {"seed", [](auto& c, const auto& v) { c.seed = parse_number<std::uint64_t>(v); }},
      {"budget", [](auto& c, const auto& v) { c.budget = parse_number<double>(v); }},
      {"rician_k_db", [](auto& c, const auto& v) { c.rician_k_db = parse_number<double>(v); }},
      {"water_level",
       [](auto& c, const auto& v) {
         if (v == "ensemble") c.water_level = WaterLevelMode::kEnsemble;
         else if (v == "per-realization") c.water_level = WaterLevelMode::kPerRealization;
         else throw std::invalid_argument("expected 'ensemble' or 'per-realization'");
       }},
  };
  return table;
}

template <typename T>
void check_list(std::vector<std::string>& errors, const char* key, const std::vector<T>& values) {
  if (values.empty()) {
    errors.push_back(std::string(key) + ": list must not be empty");
    return;
  }
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (!(values[i - 1] < values[i])) {
      errors.push_back(std::string(key) + ": values must be strictly increasing");
      return;
    }
  }
}

}  // namespace

std::vector<std::string> validate_config(const ExperimentConfig& c) {
  std::vector<std::string> errors;
  auto err = [&](const std::string& key, const std::string& msg) { errors.push_back(key + ": " + msg); };
  const auto& g = c.geometry;
  const int kMaxElements = 2 * kBesselMaxOrder;

  if (g.num_elements < 1 || g.num_elements > kMaxElements) {
    err("num_elements", "must lie in [1, " + std::to_string(kMaxElements) + "]");
  }
  if (!(g.axial_distance > 0.0)) err("axial_distance", "must be positive");
  if (!(g.attenuation > 0.0)) err("attenuation", "must be positive");
  for (const auto& [key, r] : {std::pair{"radius_tx", g.radius_tx}, std::pair{"radius_rx", g.radius_rx}}) {
    if (!(r > 0.0)) {
      err(key, "must be positive");
    } else if (!(r < g.axial_distance / 10.0)) {
      err(key, "radius too large relative to axial distance (must be < D/10)");
    }
  }
  if (c.num_subcarriers < 1) err("num_subcarriers", "must be positive");
  if (!(c.first_carrier_hz > 0.0)) err("first_carrier_hz", "must be positive");
  if (!(c.subcarrier_spacing_hz > 0.0)) err("subcarrier_spacing_hz", "must be positive");

  check_list(errors, "distance_values", c.distance_values);
  check_list(errors, "mode_counts", c.mode_counts);
  check_list(errors, "path_counts", c.path_counts);
  check_list(errors, "mode_orders", c.mode_orders);
  check_list(errors, "snr_values", c.snr_values);
  check_list(errors, "rho_values", c.rho_values);
  check_list(errors, "subcarrier_counts", c.subcarrier_counts);

  // Every frame length the experiments use must exceed the CP.
  int shortest_frame = c.num_subcarriers;
  for (int n : c.mode_counts) shortest_frame = std::min(shortest_frame, n);
  for (int m : c.subcarrier_counts) shortest_frame = std::min(shortest_frame, m);
  if (c.cp_length < 0 || c.cp_length >= shortest_frame) {
    err("cp_length", "must lie in [0, shortest frame length " + std::to_string(shortest_frame) + ")");
  }

  for (int n : c.mode_counts) {
    if (n < 1 || n > kMaxElements) {
      err("mode_counts", "each count must lie in [1, " + std::to_string(kMaxElements) + "]");
      break;
    }
  }
  for (int m : c.subcarrier_counts) {
    if (m < 1) {
      err("subcarrier_counts", "each count must be positive");
      break;
    }
  }
  for (double d : c.distance_values) {
    if (!(d > 10.0 * std::max(g.radius_tx, g.radius_rx))) {
      err("distance_values", "every distance must exceed ten ring radii");
      break;
    }
  }
  for (double r : c.rho_values) {
    if (!(r >= 0.0 && r < 1.0)) {
      err("rho_values", "rho must lie in [0, 1)");
      break;
    }
  }

  for (std::size_t i = 0; i < c.paths.reflections.size(); ++i) {
    const auto& p = c.paths.reflections[i];
    const std::string key = "path[" + std::to_string(i) + "]";
    if (p.order() < 1 || p.order() > 3) {
      err(key, "reflection order must be 1, 2 or 3");
      continue;
    }
    if (p.permittivities.size() != p.bounce_distances.size()) {
      err(key, "one permittivity is required per bounce");
      continue;
    }
    for (double eps : p.permittivities) {
      if (!(eps > 1.0)) {
        err(key, "permittivity must exceed 1");
        break;
      }
    }
    const double rmax = std::max(g.radius_tx, g.radius_rx);
    double shortest_d = g.axial_distance;
    for (double d : c.distance_values) shortest_d = std::min(shortest_d, d);
    for (double d : p.bounce_distances) {
      if (!(d > rmax) || !(d < shortest_d)) {
        err(key, "bounce distance must lie between the ring radius and every axial distance used");
        break;
      }
    }
  }

  const auto valid_mode = [](int l, int n) { return l >= min_mode(n) && l <= max_mode(n); };
  if (g.num_elements >= 1 && !valid_mode(c.mode, g.num_elements)) {
    err("mode", "outside the mode set of num_elements");
  }
  for (int n : c.mode_counts) {
    if (n >= 1 && !valid_mode(c.mode, n)) {
      err("mode", "outside the mode set of mode count " + std::to_string(n));
      break;
    }
  }
  for (int l : c.mode_orders) {
    if (g.num_elements >= 1 && !valid_mode(l, g.num_elements)) {
      err("mode_orders", "mode " + std::to_string(l) + " outside the mode set of num_elements");
      break;
    }
  }
  for (int lp : c.path_counts) {
    try {
      select_paths(c.paths, lp);
    } catch (const ValidationError& e) {
      err("path_counts", e.what());
    }
  }
  try {
    select_paths(c.paths, c.base_path_count);
  } catch (const ValidationError& e) {
    err("base_path_count", e.what());
  }

  if (c.realizations < 1) err("realizations", "must be at least 1");
  if (c.cee_draws < 2) err("cee_draws", "must be at least 2");
  if (!(c.budget > 0.0)) err("budget", "must be positive");

  // Delays against the CP, for every frame length in use. Only meaningful
  // once the geometry itself is sound.
  if (errors.empty()) {
    std::set<int> frames{c.num_subcarriers};
    frames.insert(c.mode_counts.begin(), c.mode_counts.end());
    frames.insert(c.subcarrier_counts.begin(), c.subcarrier_counts.end());
    for (int M : frames) {
      try {
        delay_offsets(g, c.paths, M, 1.0 / c.subcarrier_spacing_hz, c.cp_length, c.delay_mapping);
      } catch (const std::exception& e) {
        err("cp_length", e.what());
        break;
      }
    }
  }
  return errors;
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c = default_config();
  std::vector<std::string> errors;
  std::set<std::string> seen;
  std::vector<ReflectionPath> paths;
  bool any_path = false;

  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back(where + ": expected 'key = value'");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "path") {
        any_path = true;
        paths.push_back(parse_path(value));
        continue;
      }
      const auto it = setters().find(key);
      if (it == setters().end()) {
        errors.push_back(where + ": unknown key '" + key + "'");
        continue;
      }
      if (!seen.insert(key).second) {
        errors.push_back(where + ": duplicate key '" + key + "'");
        continue;
      }
      it->second(c, value);
    } catch (const std::invalid_argument& e) {
      errors.push_back(where + ": " + key + ": " + e.what());
    }
  }
  if (any_path) c.paths.reflections = std::move(paths);
  if (errors.empty()) errors = validate_config(c);
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return c;
}

std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream out;
  const auto& g = c.geometry;
  out << "num_elements = " << g.num_elements << "\n";
  out << "radius_tx = " << format_double(g.radius_tx) << "\n";
  out << "radius_rx = " << format_double(g.radius_rx) << "\n";
  out << "axial_distance = " << format_double(g.axial_distance) << "\n";
  out << "attenuation = " << format_double(g.attenuation) << "\n";
  out << "num_subcarriers = " << c.num_subcarriers << "\n";
  out << "first_carrier_hz = " << format_double(c.first_carrier_hz) << "\n";
  out << "subcarrier_spacing_hz = " << format_double(c.subcarrier_spacing_hz) << "\n";
  out << "cp_length = " << c.cp_length << "\n";
  out << "delay_mapping = "
      << (c.delay_mapping == DelayMapping::kCategoryIndex ? "category" : "rounded") << "\n";
  out << "include_4pi = " << (c.gain_options.include_4pi ? "true" : "false") << "\n";
  out << "phase_convention = "
      << (c.gain_options.convention == PhaseConvention::kDerived ? "derived" : "published") << "\n";
  out << "include_los = " << (c.paths.include_los ? "true" : "false") << "\n";
  for (const auto& p : c.paths.reflections) {
    out << "path = " << p.order() << " : " << join(p.bounce_distances) << " : "
        << join(p.permittivities) << "\n";
  }
  out << "mode = " << c.mode << "\n";
  out << "base_path_count = " << c.base_path_count << "\n";
  out << "distance_values = " << join(c.distance_values) << "\n";
  out << "mode_counts = " << join(c.mode_counts) << "\n";
  out << "path_counts = " << join(c.path_counts) << "\n";
  out << "mode_orders = " << join(c.mode_orders) << "\n";
  out << "snr_values = " << join(c.snr_values) << "\n";
  out << "rho_values = " << join(c.rho_values) << "\n";
  out << "subcarrier_counts = " << join(c.subcarrier_counts) << "\n";
  out << "realizations = " << c.realizations << "\n";
  out << "cee_draws = " << c.cee_draws << "\n";
  out << "seed = " << c.seed << "\n";
  out << "budget = " << format_double(c.budget) << "\n";
  out << "rician_k_db = " << format_double(c.rician_k_db) << "\n";
  out << "water_level = "
      << (c.water_level == WaterLevelMode::kEnsemble ? "ensemble" : "per-realization") << "\n";
  return out.str();
}

}  // namespace hodm
