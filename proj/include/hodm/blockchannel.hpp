#pragma once

// Closed-form per-(OAM mode, subcarrier) channel gains seen after 2-D DFT
// demodulation, for the LoS path and compensated specular reflections.

#include <vector>

#include "hodm/geometry.hpp"
#include "hodm/types.hpp"

namespace hodm {

/// First-kind Bessel function J_l(z) for |l| <= 64 and 0 <= z <= 100.
/// Throws std::out_of_range outside that range.
double bessel_j(int order, double z);

inline constexpr int kBesselMaxOrder = 64;
inline constexpr double kBesselMaxArgument = 100.0;

enum class PhaseConvention {
  /// Mode phases that follow from modulating with e^{+j phi l} and
  /// demodulating with e^{-j phi l}: j^{l} for LoS and even bounces,
  /// j^{-l} for odd bounces.
  kDerived,
  /// The conjugate assignment: j^{-l} for LoS and even bounces, j^{-3l} for
  /// odd bounces.
  kPublished,
};

struct BlockGainOptions {
  bool include_4pi = true;
  PhaseConvention convention = PhaseConvention::kDerived;

  bool operator==(const BlockGainOptions&) const = default;
};

Complex los_block_gain(const UcaGeometry& geom, int mode, double wavelength,
                       const BlockGainOptions& options = {});

/// Gain contributed by one compensated reflection placed at tap `offset` of
/// an M-sample frame. `coefficient` is the path's average reflection
/// coefficient.
Complex reflection_path_block_gain(const UcaGeometry& geom, const ReflectionPath& path,
                                   double coefficient, int mode, int subcarrier,
                                   int num_subcarriers, double wavelength, int offset,
                                   const BlockGainOptions& options = {});

/// Sum over all reflections in `paths` with the tap offsets returned by
/// delay_offsets().
Complex reflection_block_gain(const UcaGeometry& geom, const PathSet& paths,
                              const std::vector<int>& offsets, int mode, int subcarrier,
                              int num_subcarriers, double wavelength,
                              const BlockGainOptions& options = {});

/// h_{l,m} over all N modes and M subcarriers, kept split into the LoS and
/// reflection parts. Rows are indexed by l - min_mode(N).
struct BlockChannel {
  int num_modes = 0;
  int num_subcarriers = 0;
  ComplexGrid los;
  ComplexGrid reflection;

  int min_mode() const;
  Complex los_gain(int l, int m) const;
  Complex reflection_gain(int l, int m) const;
  Complex gain(int l, int m) const { return los_gain(l, m) + reflection_gain(l, m); }
  ComplexGrid total() const;
};

BlockChannel compute_block_channel(const UcaGeometry& geom, const PathSet& paths,
                                   const std::vector<double>& wavelengths,
                                   double frame_duration, int cp_length,
                                   DelayMapping mapping = DelayMapping::kCategoryIndex,
                                   const BlockGainOptions& options = {}, unsigned threads = 1);

}  // namespace hodm
