#include "hodm/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "hodm/parallel.hpp"

namespace hodm {

FadingEnsemble draw_rician_ensemble(const ComplexGrid& deterministic, double k_db,
                                    std::size_t count, std::uint64_t seed, unsigned threads) {
  if (count < 1) throw ValidationError("ensemble needs at least one realization");
  if (std::isnan(k_db)) throw ValidationError("Rician K-factor is NaN");
  FadingEnsemble e;
  e.seed = seed;
  e.rician_k = std::pow(10.0, k_db / 10.0);
  double los_weight = 1.0;
  double scatter_weight = 0.0;
  if (!std::isinf(e.rician_k)) {
    los_weight = std::sqrt(e.rician_k / (e.rician_k + 1.0));
    scatter_weight = std::sqrt(1.0 / (e.rician_k + 1.0));
  }
  e.realizations.resize(count);
  parallel_for(count, threads, [&](std::size_t r) {
    std::mt19937_64 rng(derive_seed(seed, r));
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
    ComplexGrid grid(deterministic.rows(), deterministic.cols());
    for (std::size_t i = 0; i < grid.data().size(); ++i) {
      const Complex h = deterministic.data()[i];
      const double re = gauss(rng);
      const double im = gauss(rng);
      grid.data()[i] = los_weight * h + scatter_weight * std::abs(h) * Complex(re, im);
    }
    e.realizations[r] = std::move(grid);
  });
  return e;
}

WaterfillResult waterfill(const std::vector<double>& g, double water_level) {
  if (!(water_level >= 0.0)) throw std::invalid_argument("water level must be non-negative");
  WaterfillResult out;
  out.powers.assign(g.size(), 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!(g[i] > 0.0)) continue;
    const double p = water_level - 1.0 / g[i];
    if (p <= 0.0) continue;
    out.powers[i] = p;
    out.total_power += p;
    out.capacity += std::log2(1.0 + g[i] * p);
  }
  return out;
}

double find_water_level(const std::vector<std::vector<double>>& g, double budget) {
  if (!(budget > 0.0)) throw std::invalid_argument("power budget must be positive");
  if (g.empty()) throw std::invalid_argument("no realizations");
  const double target = budget * static_cast<double>(g.size());

  // Total allocated power is piecewise linear in the water level w with
  // breakpoints at the inverse gains 1/g.
  std::vector<double> inverse;
  for (const auto& row : g) {
    for (double x : row) {
      if (x < 0.0 || std::isnan(x)) throw std::invalid_argument("negative gain-to-noise ratio");
      if (x > 0.0) inverse.push_back(1.0 / x);
    }
  }
  if (inverse.empty()) throw std::runtime_error("water level bracket: every block has zero gain");
  std::sort(inverse.begin(), inverse.end());
  std::vector<double> prefix(inverse.size() + 1, 0.0);
  for (std::size_t i = 0; i < inverse.size(); ++i) prefix[i + 1] = prefix[i] + inverse[i];
  // power at w = inverse[k]: sum_{i<k} (inverse[k] - inverse[i])
  auto power_at = [&](std::size_t k) {
    return static_cast<double>(k) * inverse[k] - prefix[k];
  };

  // Bisection over the breakpoints for the last one whose power stays below
  // the target; the level then follows from the linear segment after it.
  std::size_t lo = 0;
  std::size_t hi = inverse.size();
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    (power_at(mid) < target ? lo : hi) = mid;
  }
  const double active = static_cast<double>(lo + 1);
  return (target + prefix[lo + 1]) / active;
}

double find_water_level(const std::vector<double>& g, double budget) {
  return find_water_level(std::vector<std::vector<double>>{g}, budget);
}

PowerAllocation allocate_power(const std::vector<std::vector<double>>& g, double budget,
                               WaterLevelMode mode, unsigned threads) {
  PowerAllocation out;
  out.budget = budget;
  out.powers.resize(g.size());
  out.capacities.resize(g.size());
  if (mode == WaterLevelMode::kEnsemble) {
    out.water_levels.push_back(find_water_level(g, budget));
  } else {
    out.water_levels.resize(g.size());
    parallel_for(g.size(), threads,
                 [&](std::size_t r) { out.water_levels[r] = find_water_level(g[r], budget); });
  }
  std::vector<double> totals(g.size());
  parallel_for(g.size(), threads, [&](std::size_t r) {
    const double w = out.water_levels.size() == 1 ? out.water_levels[0] : out.water_levels[r];
    auto res = waterfill(g[r], w);
    out.powers[r] = std::move(res.powers);
    out.capacities[r] = res.capacity;
    totals[r] = res.total_power;
  });
  double sum = 0.0;
  for (double t : totals) sum += t;
  out.mean_total_power = sum / static_cast<double>(g.size());
  return out;
}

CapacityEstimate ergodic_capacity(const std::vector<std::vector<double>>& g, double budget,
                                  WaterLevelMode mode, unsigned threads) {
  const auto alloc = allocate_power(g, budget, mode, threads);
  const double n = static_cast<double>(alloc.capacities.size());
  double sum = 0.0;
  for (double c : alloc.capacities) sum += c;
  const double mean = sum / n;
  double sq = 0.0;
  for (double c : alloc.capacities) sq += (c - mean) * (c - mean);
  const double se = n > 1.0 ? std::sqrt(sq / (n - 1.0) / n) : 0.0;
  return {mean, se};
}

std::vector<std::vector<double>> gain_to_noise(const FadingEnsemble& e, double noise_variance,
                                               const std::vector<double>& row_scale) {
  if (!(noise_variance > 0.0)) throw std::invalid_argument("noise variance must be positive");
  std::vector<std::vector<double>> out(e.size());
  for (std::size_t r = 0; r < e.size(); ++r) {
    const auto& grid = e.realizations[r];
    if (!row_scale.empty() && row_scale.size() != grid.rows()) {
      throw std::invalid_argument("row scale size does not match the block grid");
    }
    out[r].resize(grid.data().size());
    for (std::size_t i = 0; i < grid.rows(); ++i) {
      const double s = row_scale.empty() ? 1.0 : row_scale[i];
      for (std::size_t m = 0; m < grid.cols(); ++m) {
        out[r][i * grid.cols() + m] = s * std::norm(grid(i, m)) / noise_variance;
      }
    }
  }
  return out;
}

CapacityEstimate ergodic_capacity_hodm(const FadingEnsemble& e, double noise_variance,
                                       double budget, WaterLevelMode mode, unsigned threads) {
  return ergodic_capacity(gain_to_noise(e, noise_variance), budget, mode, threads);
}

CapacityEstimate ergodic_capacity_scaled(const FadingEnsemble& e, double noise_variance,
                                         double budget, const std::vector<double>& row_scale,
                                         WaterLevelMode mode, unsigned threads) {
  return ergodic_capacity(gain_to_noise(e, noise_variance, row_scale), budget, mode, threads);
}

CapacityEstimate ergodic_capacity_ofdm(const std::vector<std::vector<Complex>>& gains,
                                       double noise_variance, double budget, WaterLevelMode mode,
                                       unsigned threads) {
  if (!(noise_variance > 0.0)) throw std::invalid_argument("noise variance must be positive");
  std::vector<std::vector<double>> g(gains.size());
  for (std::size_t r = 0; r < gains.size(); ++r) {
    for (const auto& h : gains[r]) g[r].push_back(std::norm(h) / noise_variance);
  }
  return ergodic_capacity(g, budget, mode, threads);
}

std::vector<std::vector<Complex>> ensemble_row(const FadingEnsemble& e, std::size_t row) {
  std::vector<std::vector<Complex>> out(e.size());
  for (std::size_t r = 0; r < e.size(); ++r) {
    const auto& grid = e.realizations[r];
    if (row >= grid.rows()) throw std::out_of_range("ensemble row out of range");
    out[r].assign(grid.row(row), grid.row(row) + grid.cols());
  }
  return out;
}

double reference_power_gain(const UcaGeometry& geom, double wavelength) {
  const double a = geom.attenuation * wavelength / (4.0 * kPi * geom.reference_distance());
  return a * a;
}

double noise_variance_for_snr(double snr_db, double budget, int blocks, double reference_gain) {
  if (blocks < 1) throw std::invalid_argument("block count must be positive");
  return budget * reference_gain / (blocks * std::pow(10.0, snr_db / 10.0));
}

}  // namespace hodm
