#pragma once

// Flat key = value experiment configuration.
//
//   # comment
//   num_elements = 16
//   snr_values = 0, 5, 10
//   path = 2 : 0.25, 0.25 : 15, 15     (order : bounce distances : permittivities)
//
// Every key may appear once except `path`, which may repeat; when any `path`
// line is present it replaces the default reflector catalog.

#include <cstdint>
#include <string>
#include <vector>

#include "hodm/blockchannel.hpp"
#include "hodm/capacity.hpp"
#include "hodm/geometry.hpp"
#include "hodm/types.hpp"

namespace hodm {

/// Validation failure carrying one human-readable message per problem.
class ConfigError : public ValidationError {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

struct ExperimentConfig {
  UcaGeometry geometry{16, 0.03, 0.03, 3.0, 1.0};
  int num_subcarriers = 16;
  double first_carrier_hz = 60e9;
  double subcarrier_spacing_hz = 5e6;
  int cp_length = 4;
  DelayMapping delay_mapping = DelayMapping::kCategoryIndex;
  BlockGainOptions gain_options;
  PathSet paths;

  int mode = 1;               // OAM mode plotted by the gain sweeps
  int base_path_count = 4;    // L_p used while sweeping N or M

  std::vector<double> distance_values;
  std::vector<int> mode_counts;
  std::vector<int> path_counts;
  std::vector<int> mode_orders;
  std::vector<double> snr_values;
  std::vector<double> rho_values;
  std::vector<int> subcarrier_counts;

  std::size_t realizations = 1000;
  std::size_t cee_draws = 10000;
  std::uint64_t seed = 1;
  double budget = 2.0;
  double rician_k_db = 10.0;
  WaterLevelMode water_level = WaterLevelMode::kEnsemble;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Four reflections per bounce category, ordered by reflector distance.
std::vector<ReflectionPath> default_reflector_catalog();

ExperimentConfig default_config();

/// All problems found, empty when the configuration is usable.
std::vector<std::string> validate_config(const ExperimentConfig& config);

/// Parses on top of the defaults and validates. Throws ConfigError listing
/// every unknown key, malformed value and invariant violation.
ExperimentConfig parse_config(const std::string& text);

/// Text that parse_config() maps back to an equal configuration.
std::string serialize_config(const ExperimentConfig& config);

/// The LoS path plus the first k reflections of every bounce category, with
/// L_p = 1 + 3k. Throws ValidationError if L_p - 1 is not a multiple of three
/// or the catalog is too short.
PathSet select_paths(const PathSet& catalog, int total_paths);

/// Shortest decimal form that parses back to the same double ("C" locale).
std::string format_double(double value);

}  // namespace hodm
