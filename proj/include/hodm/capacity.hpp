#pragma once

// Rician fading around deterministic block gains, water-filling power
// allocation with an average power budget, and ergodic capacity.

#include <cstdint>
#include <vector>

#include "hodm/geometry.hpp"
#include "hodm/types.hpp"

namespace hodm {

/// Fading realizations of a block-gain grid (rows: modes or any block
/// grouping, columns: subcarriers).
struct FadingEnsemble {
  std::vector<ComplexGrid> realizations;
  double rician_k = 0.0;  // linear K-factor
  std::uint64_t seed = 0;

  std::size_t size() const { return realizations.size(); }
};

/// h = sqrt(K/(K+1)) h_det + sqrt(1/(K+1)) |h_det| g with g ~ CN(0, 1) per
/// block, K = 10^(k_db/10); k_db = +inf yields the deterministic grid.
/// Realization r draws from derive_seed(seed, r).
FadingEnsemble draw_rician_ensemble(const ComplexGrid& deterministic, double k_db,
                                    std::size_t count, std::uint64_t seed, unsigned threads = 1);

struct WaterfillResult {
  std::vector<double> powers;
  double capacity = 0.0;  // bits
  double total_power = 0.0;
};

/// p_i = max(0, w - 1/g_i) with g_i = |h_i|^2 / sigma_i^2 (blocks with g_i = 0
/// receive nothing); capacity sum log2(1 + g_i p_i).
WaterfillResult waterfill(const std::vector<double>& gain_to_noise, double water_level);

/// Water level giving a total of `budget` over one set of blocks.
double find_water_level(const std::vector<double>& gain_to_noise, double budget);

/// Common water level for all realizations such that the ensemble-average
/// total power equals `budget`. Bisects over the sorted inverse gains (where
/// the total power changes slope) and solves the final linear segment
/// exactly. Throws std::runtime_error if every gain is zero.
double find_water_level(const std::vector<std::vector<double>>& gain_to_noise, double budget);

enum class WaterLevelMode {
  kEnsemble,        // one level shared by all realizations, average power pinned
  kPerRealization,  // each realization spends exactly the budget
};

struct PowerAllocation {
  std::vector<std::vector<double>> powers;  // [realization][block]
  std::vector<double> water_levels;         // one entry, or one per realization
  std::vector<double> capacities;           // per realization, bits
  double budget = 0.0;
  double mean_total_power = 0.0;
};

PowerAllocation allocate_power(const std::vector<std::vector<double>>& gain_to_noise,
                               double budget, WaterLevelMode mode = WaterLevelMode::kEnsemble,
                               unsigned threads = 1);

struct CapacityEstimate {
  double mean = 0.0;       // bits per frame
  double std_error = 0.0;  // Monte Carlo standard error of the mean
};

CapacityEstimate ergodic_capacity(const std::vector<std::vector<double>>& gain_to_noise,
                                  double budget, WaterLevelMode mode = WaterLevelMode::kEnsemble,
                                  unsigned threads = 1);

/// |h|^2 / noise_variance for every block of every realization, rows
/// flattened in order. `row_scale`, when non-empty, multiplies row r.
std::vector<std::vector<double>> gain_to_noise(const FadingEnsemble& ensemble,
                                               double noise_variance,
                                               const std::vector<double>& row_scale = {});

/// Water-filled capacity over all N x M blocks.
CapacityEstimate ergodic_capacity_hodm(const FadingEnsemble& ensemble, double noise_variance,
                                       double budget,
                                       WaterLevelMode mode = WaterLevelMode::kEnsemble,
                                       unsigned threads = 1);

/// Water-filled capacity over M subcarriers; `subcarrier_gains[r][m]`.
CapacityEstimate ergodic_capacity_ofdm(const std::vector<std::vector<Complex>>& subcarrier_gains,
                                       double noise_variance, double budget,
                                       WaterLevelMode mode = WaterLevelMode::kEnsemble,
                                       unsigned threads = 1);

/// One row of every realization (e.g. the mode-0 row as OFDM subcarrier
/// gains).
std::vector<std::vector<Complex>> ensemble_row(const FadingEnsemble& ensemble, std::size_t row);

/// HODM capacity with every block of row r scaled by row_scale[r], used to
/// apply per-mode SNR loss factors gamma(rho) / gamma(0).
CapacityEstimate ergodic_capacity_scaled(const FadingEnsemble& ensemble, double noise_variance,
                                         double budget, const std::vector<double>& row_scale,
                                         WaterLevelMode mode = WaterLevelMode::kEnsemble,
                                         unsigned threads = 1);

/// Per-element LoS power gain (beta lambda / (4 pi q0))^2 used as the
/// reference when mapping a channel SNR to a noise variance.
double reference_power_gain(const UcaGeometry& geom, double wavelength);

/// sigma^2 = budget * reference_gain / (blocks * 10^(snr_db/10)).
double noise_variance_for_snr(double snr_db, double budget, int blocks, double reference_gain);

}  // namespace hodm
