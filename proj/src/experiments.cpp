#include "hodm/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

#include "hodm/capacity.hpp"
#include "hodm/detection.hpp"
#include "hodm/parallel.hpp"

namespace hodm {

namespace {

std::string label(const std::string& prefix, int value) { return prefix + std::to_string(value); }

PathSet configured_paths(const ExperimentConfig& c, int path_count) {
  PathSet p = select_paths(c.paths, path_count);
  p.include_los = c.paths.include_los;
  return p;
}

double frame_duration(const ExperimentConfig& c) { return 1.0 / c.subcarrier_spacing_hz; }

double first_wavelength(const ExperimentConfig& c) { return kSpeedOfLight / c.first_carrier_hz; }

void sort_rows(CurveArtifact& a) {
  // series keep their first-appearance order, x ascending inside each
  std::map<std::string, std::size_t> rank;
  for (const auto& r : a.rows) rank.emplace(r.series, rank.size());
  std::stable_sort(a.rows.begin(), a.rows.end(), [&](const CurveRow& p, const CurveRow& q) {
    const auto rp = rank[p.series];
    const auto rq = rank[q.series];
    return rp != rq ? rp < rq : p.x < q.x;
  });
}

// |h_{mode,0}| of each path category against axial distance.
CurveArtifact gain_vs_distance(const ExperimentConfig& c, unsigned threads) {
  CurveArtifact a;
  const PathSet paths = configured_paths(c, c.base_path_count);
  const double wl = first_wavelength(c);
  const char* names[] = {"los", "primary", "secondary", "triple"};
  for (double D : c.distance_values) {
    UcaGeometry g = c.geometry;
    g.axial_distance = D;
    const auto offsets = delay_offsets(g, paths, c.num_subcarriers, frame_duration(c),
                                       c.cp_length, c.delay_mapping);
    if (paths.include_los) {
      a.rows.push_back({D, names[0], std::abs(los_block_gain(g, c.mode, wl, c.gain_options)), 0.0});
    }
    for (int order = 1; order <= 3; ++order) {
      PathSet subset;
      subset.include_los = false;
      std::vector<int> sub_offsets;
      for (std::size_t i = 0; i < paths.reflections.size(); ++i) {
        if (paths.reflections[i].order() != order) continue;
        subset.reflections.push_back(paths.reflections[i]);
        sub_offsets.push_back(offsets[i]);
      }
      if (subset.reflections.empty()) continue;
      const Complex h = reflection_block_gain(g, subset, sub_offsets, c.mode, 0,
                                              c.num_subcarriers, wl, c.gain_options);
      a.rows.push_back({D, names[order], std::abs(h), 0.0});
    }
  }
  (void)threads;
  sort_rows(a);
  return a;
}

CurveArtifact gain_vs_modes(const ExperimentConfig& c, unsigned threads) {
  CurveArtifact a;
  for (int lp : c.path_counts) {
    for (int n : c.mode_counts) {
      const auto ch = experiment_channel(c, n, c.num_subcarriers, lp, threads);
      a.rows.push_back({static_cast<double>(n), label("Lp=", lp), std::abs(ch.gain(c.mode, 0)), 0.0});
    }
  }
  return a;
}

CurveArtifact gain_vs_mode_order(const ExperimentConfig& c, unsigned threads) {
  CurveArtifact a;
  for (int lp : c.path_counts) {
    const auto ch =
        experiment_channel(c, c.geometry.num_elements, c.num_subcarriers, lp, threads);
    for (int l : c.mode_orders) {
      a.rows.push_back({static_cast<double>(l), label("Lp=", lp), std::abs(ch.gain(l, 0)), 0.0});
    }
  }
  return a;
}

// Loss of received SNR caused by estimation error rho, for the configured
// mode. The mode's subcarrier gains are scaled to unit mean power so the x
// value is the per-block channel SNR. Each SNR point shares one set of Omega
// draws across all rho values.
CurveArtifact snr_loss(const ExperimentConfig& c, unsigned threads) {
  CurveArtifact a;
  const auto ch = experiment_channel(c, c.geometry.num_elements, c.num_subcarriers,
                                     c.base_path_count, threads);
  Eigen::VectorXcd h(c.num_subcarriers);
  double power = 0.0;
  for (int m = 0; m < c.num_subcarriers; ++m) {
    h(m) = ch.gain(c.mode, m);
    power += std::norm(h(m));
  }
  h /= std::sqrt(power / c.num_subcarriers);
  for (std::size_t s = 0; s < c.snr_values.size(); ++s) {
    const double snr = c.snr_values[s];
    const auto mode = ModeDetection::uniform(h, 1.0, std::pow(10.0, -snr / 10.0));
    CeeModel cee;
    cee.draws = c.cee_draws;
    cee.seed = derive_seed(c.seed, s);
    cee.threads = threads;
    const auto moments = estimate_cee_moments(mode, cee);
    for (double rho : c.rho_values) {
      const auto loss = snr_loss_db(mode, rho, moments);
      a.rows.push_back({snr, "rho=" + format_double(rho), loss.value, loss.std_error});
    }
  }
  sort_rows(a);
  return a;
}

struct SeriesSpec {
  std::string name;
  int num_elements;
  int num_subcarriers;
  int path_count;
};

FadingEnsemble series_ensemble(const ExperimentConfig& c, const SeriesSpec& s,
                               std::uint64_t stream, unsigned threads) {
  const auto ch = experiment_channel(c, s.num_elements, s.num_subcarriers, s.path_count, threads);
  return draw_rician_ensemble(ch.total(), c.rician_k_db, c.realizations,
                              derive_seed(c.seed, stream), threads);
}

double series_noise(const ExperimentConfig& c, int num_elements, int blocks, double snr) {
  UcaGeometry g = c.geometry;
  g.num_elements = num_elements;
  return noise_variance_for_snr(snr, c.budget, blocks,
                                reference_power_gain(g, first_wavelength(c)));
}

std::vector<SeriesSpec> capacity_series(const ExperimentConfig& c, const char* fmt_modes) {
  std::vector<SeriesSpec> out;
  for (int n : c.mode_counts) {
    out.push_back({std::string(fmt_modes) + std::to_string(n), n, n, c.base_path_count});
  }
  for (int lp : c.path_counts) {
    out.push_back({label("Lp=", lp), c.geometry.num_elements, c.num_subcarriers, lp});
  }
  return out;
}

// Mean total power that the ensemble water level assigns to mode 0 and to the
// configured mode (summed over subcarriers).
CurveArtifact power_alloc(const ExperimentConfig& c, unsigned threads) {
  CurveArtifact a;
  const auto series = capacity_series(c, "N=M=");
  std::vector<int> modes{0};
  if (c.mode != 0) modes.push_back(c.mode);
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const auto ens = series_ensemble(c, s, k, threads);
    const int row0 = -min_mode(s.num_elements);
    for (double snr : c.snr_values) {
      const double noise = series_noise(c, s.num_elements, s.num_elements * s.num_subcarriers, snr);
      const auto alloc = allocate_power(gain_to_noise(ens, noise), c.budget, c.water_level, threads);
      for (int l : modes) {
        const double n = static_cast<double>(alloc.powers.size());
        double sum = 0.0, sq = 0.0;
        std::vector<double> totals;
        for (const auto& p : alloc.powers) {
          double t = 0.0;
          for (int m = 0; m < s.num_subcarriers; ++m) {
            t += p[static_cast<std::size_t>(row0 + l) * s.num_subcarriers + m];
          }
          totals.push_back(t);
          sum += t;
        }
        const double mean = sum / n;
        for (double t : totals) sq += (t - mean) * (t - mean);
        const double se = n > 1.0 ? std::sqrt(sq / (n - 1.0) / n) : 0.0;
        a.rows.push_back({snr, s.name + " l=" + std::to_string(l), mean, se});
      }
    }
  }
  sort_rows(a);
  return a;
}

CurveArtifact capacity(const ExperimentConfig& c, unsigned threads) {
  CurveArtifact a;
  const auto series = capacity_series(c, "N=M=");
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const auto ens = series_ensemble(c, s, k, threads);
    for (double snr : c.snr_values) {
      const double noise = series_noise(c, s.num_elements, s.num_elements * s.num_subcarriers, snr);
      const auto cap = ergodic_capacity_hodm(ens, noise, c.budget, c.water_level, threads);
      a.rows.push_back({snr, s.name, cap.mean, cap.std_error});
    }
  }
  return a;
}

// HODM over all N modes against single-mode OFDM on the mode-0 gains, for
// each configured subcarrier count. Both share the same fading draws.
CurveArtifact capacity_compare(const ExperimentConfig& c, unsigned threads) {
  CurveArtifact a;
  const int n = c.geometry.num_elements;
  std::vector<CurveRow> ofdm_rows;
  for (std::size_t k = 0; k < c.subcarrier_counts.size(); ++k) {
    const int M = c.subcarrier_counts[k];
    const SeriesSpec s{"", n, M, c.base_path_count};
    const auto ens = series_ensemble(c, s, k, threads);
    const auto row0 = ensemble_row(ens, static_cast<std::size_t>(-min_mode(n)));
    for (double snr : c.snr_values) {
      const auto hodm = ergodic_capacity_hodm(ens, series_noise(c, n, n * M, snr), c.budget,
                                              c.water_level, threads);
      a.rows.push_back({snr, label("HODM M=", M), hodm.mean, hodm.std_error});
      const auto ofdm = ergodic_capacity_ofdm(row0, series_noise(c, n, M, snr), c.budget,
                                              c.water_level, threads);
      ofdm_rows.push_back({snr, label("OFDM M=", M), ofdm.mean, ofdm.std_error});
    }
  }
  a.rows.insert(a.rows.end(), ofdm_rows.begin(), ofdm_rows.end());
  sort_rows(a);
  return a;
}

using Runner = std::function<CurveArtifact(const ExperimentConfig&, unsigned)>;

const std::vector<std::pair<std::string, Runner>>& runners() {
  static const std::vector<std::pair<std::string, Runner>> table = {
      {"gain-vs-distance", gain_vs_distance},
      {"gain-vs-modes", gain_vs_modes},
      {"gain-vs-mode-order", gain_vs_mode_order},
      {"snr-loss", snr_loss},
      {"power-alloc", power_alloc},
      {"capacity", capacity},
      {"capacity-compare", capacity_compare},
  };
  return table;
}

}  // namespace

void CurveArtifact::check() const {
  std::map<std::string, double> last;
  for (const auto& r : rows) {
    if (!std::isfinite(r.x) || !std::isfinite(r.y) || !std::isfinite(r.std_error)) {
      throw std::runtime_error(name + ": non-finite value in series " + r.series);
    }
    const auto it = last.find(r.series);
    if (it != last.end() && !(r.x > it->second)) {
      throw std::runtime_error(name + ": x not strictly increasing in series " + r.series);
    }
    last[r.series] = r.x;
  }
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [n, r] : runners()) out.push_back(n);
    return out;
  }();
  return names;
}

BlockChannel experiment_channel(const ExperimentConfig& c, int num_elements,
                                int num_subcarriers, int path_count, unsigned threads) {
  UcaGeometry g = c.geometry;
  g.num_elements = num_elements;
  const auto wl = subcarrier_wavelengths(c.first_carrier_hz, c.subcarrier_spacing_hz,
                                         num_subcarriers);
  return compute_block_channel(g, configured_paths(c, path_count), wl, frame_duration(c),
                               c.cp_length, c.delay_mapping, c.gain_options, threads);
}

CurveArtifact run_experiment(const std::string& name, const ExperimentConfig& config,
                             unsigned threads) {
  for (const auto& [n, run] : runners()) {
    if (n != name) continue;
    auto errors = validate_config(config);
    if (!errors.empty()) throw ConfigError(std::move(errors));
    CurveArtifact a = run(config, threads);
    a.name = name;
    a.check();
    return a;
  }
  throw ValidationError("unknown experiment '" + name + "'");
}

std::string format_csv(const CurveArtifact& a) {
  std::string out = "x,series,y,stderr\n";
  for (const auto& r : a.rows) {
    out += format_double(r.x) + "," + r.series + "," + format_double(r.y) + "," +
           format_double(r.std_error) + "\n";
  }
  return out;
}

CurveArtifact parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "x,series,y,stderr") {
    throw std::runtime_error("missing CSV header");
  }
  auto number = [](const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
      throw std::runtime_error("bad number '" + s + "' in CSV");
    }
    return v;
  };
  CurveArtifact a;
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::string item;
    std::istringstream ls(line);
    while (std::getline(ls, item, ',')) f.push_back(item);
    if (f.size() != 4) throw std::runtime_error("CSV row without four fields: " + line);
    a.rows.push_back({number(f[0]), f[1], number(f[2]), number(f[3])});
  }
  return a;
}

std::string write_file_atomic(const std::string& dir, const std::string& file_name,
                              const std::string& contents) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const fs::path target = fs::path(dir) / file_name;
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw std::runtime_error("failed writing " + tmp.string());
    }
  }
  fs::rename(tmp, target);
  return target.string();
}

}  // namespace hodm
