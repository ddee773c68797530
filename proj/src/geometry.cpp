#include "hodm/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "hodm/parallel.hpp"

namespace hodm {

void UcaGeometry::validate(bool allow_point_antenna) const {
  if (num_elements < 1) throw ValidationError("num_elements must be positive");
  if (!(axial_distance > 0.0)) throw ValidationError("axial distance must be positive");
  auto check_radius = [&](double r, const char* name) {
    if (allow_point_antenna ? !(r >= 0.0) : !(r > 0.0)) {
      throw ValidationError(std::string(name) + " must be positive");
    }
    if (!(r < axial_distance / 10.0)) {
      throw ValidationError(std::string(name) +
                            ": radius too large relative to axial distance (must be < D/10)");
    }
  };
  check_radius(radius_tx, "radius_tx");
  check_radius(radius_rx, "radius_rx");
  if (!(attenuation > 0.0)) throw ValidationError("attenuation must be positive");
}

double UcaGeometry::reference_distance() const {
  return std::sqrt(axial_distance * axial_distance + radius_tx * radius_tx +
                   radius_rx * radius_rx);
}

double UcaGeometry::image_distance(double reflector_distance) const {
  const double q = reference_distance();
  return std::sqrt(q * q + 4.0 * reflector_distance * reflector_distance);
}

double UcaGeometry::azimuth(int element) const {
  return 2.0 * kPi * static_cast<double>(element) / static_cast<double>(num_elements);
}

double ReflectionPath::total_distance() const {
  return std::accumulate(bounce_distances.begin(), bounce_distances.end(), 0.0);
}

void ReflectionPath::validate(const UcaGeometry& geom) const {
  if (order() < 1 || order() > 3) {
    throw ValidationError("reflection order must be 1, 2 or 3");
  }
  if (permittivities.size() != bounce_distances.size()) {
    throw ValidationError("one permittivity is required per bounce");
  }
  const double rmax = std::max(geom.radius_tx, geom.radius_rx);
  for (double d : bounce_distances) {
    if (!(d > rmax) || !(d < geom.axial_distance)) {
      throw ValidationError("bounce distance must lie between the ring radius and D");
    }
  }
  for (double eps : permittivities) {
    if (!(eps > 1.0)) throw ValidationError("permittivity must exceed 1");
  }
}

int PathSet::count(int order) const {
  return static_cast<int>(std::count_if(reflections.begin(), reflections.end(),
                                        [&](const auto& p) { return p.order() == order; }));
}

int PathSet::total_paths() const {
  return (include_los ? 1 : 0) + static_cast<int>(reflections.size());
}

double PathSet::max_reflector_distance() const {
  double d = 0.0;
  for (const auto& p : reflections) d = std::max(d, p.total_distance());
  return d;
}

void PathSet::validate(const UcaGeometry& geom) const {
  for (const auto& p : reflections) p.validate(geom);
}

std::vector<double> subcarrier_wavelengths(double first_carrier_hz, double spacing_hz,
                                           int num_subcarriers) {
  if (!(first_carrier_hz > 0.0) || spacing_hz < 0.0 || num_subcarriers < 1) {
    throw ValidationError("invalid carrier plan");
  }
  std::vector<double> out(static_cast<std::size_t>(num_subcarriers));
  for (int m = 0; m < num_subcarriers; ++m) {
    out[static_cast<std::size_t>(m)] = kSpeedOfLight / (first_carrier_hz + m * spacing_hz);
  }
  return out;
}

double los_distance_exact(const UcaGeometry& g, int v, int n) {
  const double q = g.reference_distance();
  const double cross = 2.0 * g.radius_tx * g.radius_rx * std::cos(g.azimuth(v) - g.azimuth(n));
  return std::sqrt(q * q - cross);
}

double los_distance_taylor(const UcaGeometry& g, int v, int n) {
  const double q = g.reference_distance();
  return q * (1.0 - g.radius_tx * g.radius_rx * std::cos(g.azimuth(v) - g.azimuth(n)) / (q * q));
}

Complex los_gain(const UcaGeometry& g, int v, int n, double wavelength) {
  const double q = g.reference_distance();
  const double amplitude = g.attenuation * wavelength / (4.0 * kPi * q);
  const double element_phase = 2.0 * kPi * g.radius_tx * g.radius_rx *
                               std::cos(g.azimuth(v) - g.azimuth(n)) / (wavelength * q);
  return amplitude * cis(-2.0 * kPi * q / wavelength + element_phase);
}

namespace {

// Bracketed term of the Taylor-expanded distance (and of the gain phase):
//   odd:  -r1 r2 cos(pv + pn) + 2 r1 d cos pn + 2 r2 d cos pv
//   even:  r1 r2 cos(pv - pn) - 2 r1 d cos pn + 2 r2 d cos pv
// `distance_form` selects the sign pattern the two-bounce distance uses, which
// differs from the two-bounce gain phase in the d cos terms.
double element_term(const UcaGeometry& g, int order, double d, int v, int n,
                    bool distance_form) {
  const double r1 = g.radius_tx;
  const double r2 = g.radius_rx;
  const double pv = g.azimuth(v);
  const double pn = g.azimuth(n);
  if (order % 2 == 1) {
    return -r1 * r2 * std::cos(pv + pn) + 2.0 * r1 * d * std::cos(pn) +
           2.0 * r2 * d * std::cos(pv);
  }
  if (distance_form) {
    return r1 * r2 * std::cos(pv - pn) - 2.0 * r2 * d * std::cos(pv) +
           2.0 * r1 * d * std::cos(pn);
  }
  return r1 * r2 * std::cos(pv - pn) - 2.0 * r1 * d * std::cos(pn) +
         2.0 * r2 * d * std::cos(pv);
}

}  // namespace

double reflection_distance(const UcaGeometry& g, const ReflectionPath& path, int v, int n) {
  const double d = path.total_distance();
  const double qd = g.image_distance(d);
  return qd * (1.0 - element_term(g, path.order(), d, v, n, true) / (qd * qd));
}

double reflection_distance_exact(const UcaGeometry& g, const ReflectionPath& path, int v,
                                 int n) {
  const double d = path.total_distance();
  const double r1 = g.radius_tx;
  const double r2 = g.radius_rx;
  const double pv = g.azimuth(v);
  const double pn = g.azimuth(n);
  const double rx_sign = path.order() % 2 == 1 ? -1.0 : 1.0;
  const double a = 2.0 * d - r1 * std::cos(pn) + rx_sign * r2 * std::cos(pv);
  const double b = r1 * std::sin(pn) - r2 * std::sin(pv);
  return std::sqrt(a * a + b * b + g.axial_distance * g.axial_distance);
}

double fresnel_coefficient(double alpha, double permittivity) {
  if (!(alpha > 0.0) || alpha > kPi / 2.0 + 1e-15) {
    throw DomainError("grazing angle must lie in (0, pi/2]");
  }
  if (!(permittivity > 1.0)) throw DomainError("permittivity must exceed 1");
  const double c = std::cos(alpha);
  const double radicand = permittivity - c * c / permittivity;
  if (radicand < 0.0) throw DomainError("negative Fresnel radicand");
  const double s = std::sin(alpha);
  const double root = std::sqrt(radicand);
  return (s - root) / (s + root);
}

double reflection_angle(const UcaGeometry& g, const ReflectionPath& path, int v, int n) {
  const double d = path.total_distance();
  const double numerator =
      2.0 * d - g.radius_tx * std::cos(g.azimuth(n)) - g.radius_rx * std::cos(g.azimuth(v));
  const double ratio = numerator / reflection_distance(g, path, v, n);
  if (!(std::abs(ratio) <= 1.0)) {
    std::ostringstream msg;
    msg << "reflection angle undefined: arcsin ratio " << ratio << " (inconsistent geometry)";
    throw DomainError(msg.str());
  }
  return std::asin(ratio);
}

double path_reflection_coefficient(const UcaGeometry& g, const ReflectionPath& path) {
  const int N = g.num_elements;
  double sum = 0.0;
  for (int n = 0; n < N; ++n) {
    for (int v = 0; v < N; ++v) {
      const double alpha = reflection_angle(g, path, v, n);
      double product = 1.0;
      for (double eps : path.permittivities) product *= fresnel_coefficient(alpha, eps);
      sum += product;
    }
  }
  return sum / (static_cast<double>(N) * N);
}

Complex reflection_gain(const UcaGeometry& g, const ReflectionPath& path, int v, int n,
                        double wavelength) {
  return reflection_gain(g, path, v, n, wavelength, path_reflection_coefficient(g, path));
}

Complex reflection_gain(const UcaGeometry& g, const ReflectionPath& path, int v, int n,
                        double wavelength, double coefficient) {
  const double d = path.total_distance();
  const double qd = g.image_distance(d);
  const double amplitude = coefficient * g.attenuation * wavelength / (4.0 * kPi * qd);
  const double element_phase =
      2.0 * kPi * element_term(g, path.order(), d, v, n, false) / (wavelength * qd);
  return amplitude * cis(-2.0 * kPi * qd / wavelength + element_phase);
}

double path_delay(const UcaGeometry& g, const ReflectionPath& path, int v, int n) {
  return (reflection_distance(g, path, v, n) - los_distance_exact(g, v, n)) / kSpeedOfLight;
}

double max_normalized_delay(const UcaGeometry& g, const ReflectionPath& path,
                            int samples_per_frame, double frame_duration) {
  const int N = g.num_elements;
  double tau = 0.0;
  for (int v = 0; v < N; ++v) {
    for (int n = 0; n < N; ++n) tau = std::max(tau, path_delay(g, path, v, n));
  }
  return tau * samples_per_frame / frame_duration;
}

std::vector<int> delay_offsets(const UcaGeometry& g, const PathSet& paths,
                               int samples_per_frame, double frame_duration, int cp_length,
                               DelayMapping mapping) {
  const std::size_t count = paths.reflections.size();
  std::vector<double> normalized(count);
  for (std::size_t i = 0; i < count; ++i) {
    normalized[i] =
        max_normalized_delay(g, paths.reflections[i], samples_per_frame, frame_duration);
    if (normalized[i] > cp_length) {
      std::ostringstream msg;
      msg << "normalized delay " << normalized[i] << " of reflection " << i
          << " exceeds the cyclic prefix length " << cp_length;
      throw std::runtime_error(msg.str());
    }
  }

  std::vector<int> offsets(count, 0);
  if (mapping == DelayMapping::kRounded) {
    for (std::size_t i = 0; i < count; ++i) {
      offsets[i] = static_cast<int>(std::lround(normalized[i]));
    }
  } else {
    for (int order = 1; order <= 3; ++order) {
      double max_delay = 0.0;
      int members = 0;
      for (std::size_t i = 0; i < count; ++i) {
        if (paths.reflections[i].order() != order) continue;
        max_delay = std::max(max_delay, normalized[i]);
        ++members;
      }
      // L_X never below the category size, so L_X - i stays non-negative.
      const int category_span = std::max(static_cast<int>(std::ceil(max_delay)), members);
      int index = 0;
      for (std::size_t i = 0; i < count; ++i) {
        if (paths.reflections[i].order() != order) continue;
        ++index;
        offsets[i] = category_span - index;
      }
    }
  }
  for (std::size_t i = 0; i < count; ++i) {
    if (offsets[i] > cp_length) {
      std::ostringstream msg;
      msg << "tap offset " << offsets[i] << " of reflection " << i
          << " exceeds the cyclic prefix length " << cp_length;
      throw std::runtime_error(msg.str());
    }
  }
  return offsets;
}

int ElementChannel::max_offset() const {
  int m = 0;
  for (const auto& p : paths) m = std::max(m, p.offset);
  return m;
}

ElementChannel build_element_channel(const UcaGeometry& g, const PathSet& paths,
                                     const std::vector<double>& wavelengths,
                                     int samples_per_frame, double frame_duration,
                                     int cp_length, DelayMapping mapping, unsigned threads) {
  const int N = g.num_elements;
  const int M = static_cast<int>(wavelengths.size());
  const auto offsets =
      delay_offsets(g, paths, samples_per_frame, frame_duration, cp_length, mapping);

  ElementChannel channel;
  channel.num_elements = N;
  channel.num_subcarriers = M;
  const std::size_t tap_count = static_cast<std::size_t>(N) * N * M;

  if (paths.include_los) {
    ChannelPath los;
    los.taps.resize(tap_count);
    parallel_for(static_cast<std::size_t>(N), threads, [&](std::size_t v) {
      for (int n = 0; n < N; ++n) {
        for (int m = 0; m < M; ++m) {
          los.taps[(v * N + n) * M + m] =
              los_gain(g, static_cast<int>(v), n, wavelengths[static_cast<std::size_t>(m)]);
        }
      }
    });
    channel.paths.push_back(std::move(los));
  }

  int per_order_index[4] = {0, 0, 0, 0};
  for (std::size_t i = 0; i < paths.reflections.size(); ++i) {
    const auto& rp = paths.reflections[i];
    ChannelPath cp;
    cp.order = rp.order();
    cp.index_in_category = ++per_order_index[rp.order()];
    cp.offset = offsets[i];
    cp.taps.resize(tap_count);
    const double coefficient = path_reflection_coefficient(g, rp);
    parallel_for(static_cast<std::size_t>(N), threads, [&](std::size_t v) {
      for (int n = 0; n < N; ++n) {
        for (int m = 0; m < M; ++m) {
          cp.taps[(v * N + n) * M + m] = reflection_gain(
              g, rp, static_cast<int>(v), n, wavelengths[static_cast<std::size_t>(m)],
              coefficient);
        }
      }
    });
    channel.paths.push_back(std::move(cp));
  }
  return channel;
}

}  // namespace hodm
