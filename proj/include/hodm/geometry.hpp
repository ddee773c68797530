#pragma once

// Distances, reflection coefficients, delays and per-element channel gains
// between two coaxial uniform circular arrays, for the line-of-sight path and
// one-, two- and three-bounce specular reflections off reflectors parallel
// to the array axis.

#include <vector>

#include "hodm/types.hpp"

namespace hodm {

/// Transmit/receive ring pair. Both rings carry `num_elements` antennas and
/// share the propagation axis.
struct UcaGeometry {
  int num_elements = 8;
  double radius_tx = 0.03;       // r1 [m]
  double radius_rx = 0.03;       // r2 [m]
  double axial_distance = 3.0;   // D [m]
  double attenuation = 1.0;      // beta

  /// Throws ValidationError unless radii are positive (zero allowed when
  /// `allow_point_antenna`), D > 0, and both radii are below D/10.
  void validate(bool allow_point_antenna = false) const;

  /// sqrt(D^2 + r1^2 + r2^2)
  double reference_distance() const;

  /// sqrt(D^2 + r1^2 + r2^2 + 4 d^2) for a reflection with total reflector
  /// distance d.
  double image_distance(double reflector_distance) const;

  /// Azimuth 2*pi*i/N of element i.
  double azimuth(int element) const;

  bool operator==(const UcaGeometry&) const = default;
};

/// A specular reflection path. `bounce_distances[i]` is the distance from the
/// transmit ring centre to the i-th reflector; the path's reflector distance
/// is their sum.
struct ReflectionPath {
  std::vector<double> bounce_distances;
  std::vector<double> permittivities;

  int order() const { return static_cast<int>(bounce_distances.size()); }
  double total_distance() const;
  /// Odd bounce counts reverse the sign of the carried OAM mode.
  bool reverses_mode() const { return order() % 2 == 1; }
  int mode_parity() const { return reverses_mode() ? -1 : 1; }

  void validate(const UcaGeometry& geom) const;

  bool operator==(const ReflectionPath&) const = default;
};

struct PathSet {
  bool include_los = true;
  std::vector<ReflectionPath> reflections;

  int count(int order) const;
  /// L_p = 1 + N_r + N_t + N_e (LoS counted when present).
  int total_paths() const;
  /// Largest reflector distance among all reflections (0 when there are none).
  double max_reflector_distance() const;
  void validate(const UcaGeometry& geom) const;

  bool operator==(const PathSet&) const = default;
};

/// lambda_m = c / (f0 + m * df), m = 0..M-1.
std::vector<double> subcarrier_wavelengths(double first_carrier_hz, double spacing_hz,
                                           int num_subcarriers);

double los_distance_exact(const UcaGeometry& geom, int v, int n);
double los_distance_taylor(const UcaGeometry& geom, int v, int n);
Complex los_gain(const UcaGeometry& geom, int v, int n, double wavelength);

/// Taylor-form element-to-element distance along a reflection path.
double reflection_distance(const UcaGeometry& geom, const ReflectionPath& path, int v, int n);
/// Same distance before the first-order expansion of the square root.
double reflection_distance_exact(const UcaGeometry& geom, const ReflectionPath& path, int v,
                                 int n);

/// Vertical-polarisation Fresnel reflection coefficient for grazing angle
/// `alpha` (complement of the angle of incidence) and relative permittivity.
double fresnel_coefficient(double alpha, double permittivity);

double reflection_angle(const UcaGeometry& geom, const ReflectionPath& path, int v, int n);

/// Per-pair product of per-bounce Fresnel coefficients, averaged over all
/// N^2 element pairs.
double path_reflection_coefficient(const UcaGeometry& geom, const ReflectionPath& path);

Complex reflection_gain(const UcaGeometry& geom, const ReflectionPath& path, int v, int n,
                        double wavelength);
/// Overload reusing a precomputed path_reflection_coefficient().
Complex reflection_gain(const UcaGeometry& geom, const ReflectionPath& path, int v, int n,
                        double wavelength, double coefficient);

/// Excess delay of the reflection over the LoS path between elements n and v [s].
double path_delay(const UcaGeometry& geom, const ReflectionPath& path, int v, int n);

/// Largest excess delay over all element pairs, in units of the sample
/// interval frame_duration / samples_per_frame.
double max_normalized_delay(const UcaGeometry& geom, const ReflectionPath& path,
                            int samples_per_frame, double frame_duration);

enum class DelayMapping {
  /// Path i (1-based) of a bounce category lands at offset L_X - i, with L_X the
  /// ceiling of the category's largest normalized delay.
  kCategoryIndex,
  /// Each path lands at the rounded value of its own largest normalized delay.
  kRounded,
};

/// Integer tap offset of every reflection in `paths.reflections` (same order).
/// Throws std::runtime_error when a delay or offset would exceed the cyclic
/// prefix.
std::vector<int> delay_offsets(const UcaGeometry& geom, const PathSet& paths,
                               int samples_per_frame, double frame_duration, int cp_length,
                               DelayMapping mapping = DelayMapping::kCategoryIndex);

/// Channel taps of one propagation path: gain per (rx v, tx n, subcarrier m)
/// applied at a fixed integer delay offset.
struct ChannelPath {
  int order = 0;              // 0 for LoS, else number of bounces
  int index_in_category = 0;  // 1-based position within the bounce category
  int offset = 0;
  std::vector<Complex> taps;  // [(v * N + n) * M + m]

  bool reverses_mode() const { return order % 2 == 1; }
};

struct ElementChannel {
  int num_elements = 0;
  int num_subcarriers = 0;
  std::vector<ChannelPath> paths;

  Complex tap(std::size_t path, int v, int n, int m) const {
    return paths[path].taps[(static_cast<std::size_t>(v) * num_elements + n) * num_subcarriers + m];
  }
  int max_offset() const;
};

ElementChannel build_element_channel(const UcaGeometry& geom, const PathSet& paths,
                                     const std::vector<double>& wavelengths,
                                     int samples_per_frame, double frame_duration,
                                     int cp_length,
                                     DelayMapping mapping = DelayMapping::kCategoryIndex,
                                     unsigned threads = 1);

}  // namespace hodm
