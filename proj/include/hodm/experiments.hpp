#pragma once

// Sweep drivers behind the hodm-sim subcommands. Each produces one curve
// table; rows are grouped by series and sorted by x inside a series.

#include <string>
#include <vector>

#include "hodm/blockchannel.hpp"
#include "hodm/config.hpp"

namespace hodm {

struct CurveRow {
  double x = 0.0;
  std::string series;
  double y = 0.0;
  double std_error = 0.0;
};

struct CurveArtifact {
  std::string name;
  std::vector<CurveRow> rows;

  /// Throws std::runtime_error unless x is strictly increasing within
  /// every series and all values are finite.
  void check() const;
};

/// Subcommand names accepted by run_experiment(), in documentation order.
const std::vector<std::string>& experiment_names();

/// Throws ValidationError for an unknown name.
CurveArtifact run_experiment(const std::string& name, const ExperimentConfig& config,
                             unsigned threads = 1);

/// Block channel of `num_elements` rings and `num_subcarriers` carriers using
/// the first L_p paths of the configured catalog.
BlockChannel experiment_channel(const ExperimentConfig& config, int num_elements,
                                int num_subcarriers, int path_count, unsigned threads = 1);

/// "x,series,y,stderr" header then one line per row, "C" locale.
std::string format_csv(const CurveArtifact& artifact);

/// Parses format_csv() output. Throws std::runtime_error on malformed input.
CurveArtifact parse_csv(const std::string& text);

/// Writes `<dir>/<file_name>` through a temporary file and rename, creating
/// `dir` if needed. Returns the final path.
std::string write_file_atomic(const std::string& dir, const std::string& file_name,
                              const std::string& contents);

}  // namespace hodm
