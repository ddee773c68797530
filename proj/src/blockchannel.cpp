#include "hodm/blockchannel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "hodm/parallel.hpp"

namespace hodm {

namespace {

double bessel_series(int l, double z) {
  const double half = 0.5 * z;
  double term = 1.0;
  for (int i = 1; i <= l; ++i) term *= half / i;
  if (term == 0.0) return 0.0;
  double sum = term;
  const double q = -half * half;
  for (int k = 1; k < 500; ++k) {
    term *= q / (static_cast<double>(k) * (k + l));
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum) && k > half) break;
  }
  return sum;
}

// Miller's downward recurrence, normalised with J0 + 2 sum J_2k = 1.
double bessel_miller(int l, double z) {
  const double top = std::max(static_cast<double>(l), z);
  int start = static_cast<int>(top + 30.0 + std::sqrt(160.0 * top));
  start += start % 2;
  double next = 0.0;  // J_{k+1}
  double cur = 1e-300;  // J_k
  double norm = 0.0;
  double result = 0.0;
  for (int k = start; k > 0; --k) {
    const double prev = 2.0 * k / z * cur - next;  // J_{k-1}
    next = cur;
    cur = prev;
    if (std::abs(cur) > 1e250) {
      cur *= 1e-250;
      next *= 1e-250;
      norm *= 1e-250;
      result *= 1e-250;
    }
    if (k - 1 == l) result = cur;
    if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2.0 * cur;
  }
  norm += cur;
  return result / norm;
}

}  // namespace

double bessel_j(int order, double z) {
  if (std::abs(order) > kBesselMaxOrder || !(z >= 0.0) || z > kBesselMaxArgument) {
    throw std::out_of_range("bessel_j: order " + std::to_string(order) + ", argument " +
                            std::to_string(z) + " outside the supported range");
  }
  const int l = std::abs(order);
  double value;
  if (z == 0.0) {
    value = l == 0 ? 1.0 : 0.0;
  } else if (z < 12.0) {
    value = bessel_series(l, z);
  } else {
    value = bessel_miller(l, z);
  }
  return (order < 0 && l % 2 == 1) ? -value : value;
}

namespace {

double amplitude_denominator(const BlockGainOptions& o, double distance) {
  return (o.include_4pi ? 4.0 * kPi : 1.0) * distance;
}

Complex mode_phase(const BlockGainOptions& o, int l, bool odd_bounce, bool los) {
  if (o.convention == PhaseConvention::kDerived) {
    return (odd_bounce && !los) ? jpow(-l) : jpow(l);
  }
  return (odd_bounce && !los) ? jpow(-3 * l) : jpow(-l);
}

}  // namespace

Complex los_block_gain(const UcaGeometry& g, int l, double wavelength,
                       const BlockGainOptions& options) {
  const double q = g.reference_distance();
  const double N = g.num_elements;
  const double amplitude = g.attenuation * wavelength * N / amplitude_denominator(options, q);
  const double z = 2.0 * kPi * g.radius_tx * g.radius_rx / (wavelength * q);
  return amplitude * mode_phase(options, l, false, true) * cis(-2.0 * kPi * q / wavelength) *
         bessel_j(l, z);
}

Complex reflection_path_block_gain(const UcaGeometry& g, const ReflectionPath& path,
                                   double coefficient, int l, int m, int M, double wavelength,
                                   int offset, const BlockGainOptions& options) {
  const double qd = g.image_distance(path.total_distance());
  const int N = g.num_elements;
  const double amplitude =
      coefficient * g.attenuation * wavelength * N / amplitude_denominator(options, qd);
  const double z = 2.0 * kPi * g.radius_tx * g.radius_rx / (wavelength * qd);
  const bool odd = path.reverses_mode();
  const double mode_shift = (odd ? 1.0 : -1.0) * 2.0 * kPi * l * offset / N;
  const double time_shift = -2.0 * kPi * m * offset / M;
  return amplitude * mode_phase(options, l, odd, false) * cis(-2.0 * kPi * qd / wavelength) *
         bessel_j(l, z) * cis(mode_shift + time_shift);
}

Complex reflection_block_gain(const UcaGeometry& g, const PathSet& paths,
                              const std::vector<int>& offsets, int l, int m, int M,
                              double wavelength, const BlockGainOptions& options) {
  if (offsets.size() != paths.reflections.size()) {
    throw std::invalid_argument("one tap offset is required per reflection");
  }
  Complex sum{};
  for (std::size_t i = 0; i < paths.reflections.size(); ++i) {
    const auto& p = paths.reflections[i];
    sum += reflection_path_block_gain(g, p, path_reflection_coefficient(g, p), l, m, M,
                                      wavelength, offsets[i], options);
  }
  return sum;
}

int BlockChannel::min_mode() const { return hodm::min_mode(num_modes); }

Complex BlockChannel::los_gain(int l, int m) const {
  return los(static_cast<std::size_t>(l - min_mode()), static_cast<std::size_t>(m));
}

Complex BlockChannel::reflection_gain(int l, int m) const {
  return reflection(static_cast<std::size_t>(l - min_mode()), static_cast<std::size_t>(m));
}

ComplexGrid BlockChannel::total() const {
  ComplexGrid out = los;
  for (std::size_t i = 0; i < out.data().size(); ++i) out.data()[i] += reflection.data()[i];
  return out;
}

BlockChannel compute_block_channel(const UcaGeometry& g, const PathSet& paths,
                                   const std::vector<double>& wavelengths,
                                   double frame_duration, int cp_length, DelayMapping mapping,
                                   const BlockGainOptions& options, unsigned threads) {
  const int N = g.num_elements;
  const int M = static_cast<int>(wavelengths.size());
  const auto offsets = delay_offsets(g, paths, M, frame_duration, cp_length, mapping);
  std::vector<double> coefficients;
  for (const auto& p : paths.reflections) coefficients.push_back(path_reflection_coefficient(g, p));

  BlockChannel bc;
  bc.num_modes = N;
  bc.num_subcarriers = M;
  bc.los = ComplexGrid(N, M);
  bc.reflection = ComplexGrid(N, M);
  const int lmin = bc.min_mode();
  parallel_for(static_cast<std::size_t>(N), threads, [&](std::size_t row) {
    const int l = lmin + static_cast<int>(row);
    for (int m = 0; m < M; ++m) {
      const double lambda = wavelengths[static_cast<std::size_t>(m)];
      if (paths.include_los) bc.los(row, m) = los_block_gain(g, l, lambda, options);
      Complex r{};
      for (std::size_t i = 0; i < paths.reflections.size(); ++i) {
        r += reflection_path_block_gain(g, paths.reflections[i], coefficients[i], l, m, M,
                                        lambda, offsets[i], options);
      }
      bc.reflection(row, m) = r;
    }
  });
  return bc;
}

}  // namespace hodm
