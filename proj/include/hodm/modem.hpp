#pragma once

// HODM frame processing: 2-D IDFT modulation over (OAM mode, subcarrier),
// cyclic prefix handling, multipath channel application with mode reversal on
// odd-bounce paths, phase-difference compensation and 2-D DFT demodulation.

#include <cstdint>
#include <vector>

#include "hodm/geometry.hpp"
#include "hodm/types.hpp"

namespace hodm {

/// Modulated symbols s_{l,m}; row l - min_mode, column m.
class SymbolGrid {
 public:
  SymbolGrid() = default;
  SymbolGrid(int num_modes, int num_subcarriers);

  int num_modes() const { return num_modes_; }
  int num_subcarriers() const { return num_subcarriers_; }
  int min_mode() const { return hodm::min_mode(num_modes_); }
  int max_mode() const { return hodm::max_mode(num_modes_); }

  Complex& at(int l, int m) { return values_(row_of(l), static_cast<std::size_t>(m)); }
  const Complex& at(int l, int m) const {
    return values_(row_of(l), static_cast<std::size_t>(m));
  }

  ComplexGrid& values() { return values_; }
  const ComplexGrid& values() const { return values_; }

 private:
  std::size_t row_of(int l) const;

  int num_modes_ = 0;
  int num_subcarriers_ = 0;
  ComplexGrid values_;
};

/// Time/space samples X_{n,u}; row n, column u + cp_length for u in
/// [-cp_length, M).
struct SampleFrame {
  ComplexGrid samples;
  int cp_length = 0;

  int num_elements() const { return static_cast<int>(samples.rows()); }
  int body_length() const { return static_cast<int>(samples.cols()) - cp_length; }
  Complex& at(int n, int u) {
    return samples(static_cast<std::size_t>(n), static_cast<std::size_t>(u + cp_length));
  }
  const Complex& at(int n, int u) const {
    return samples(static_cast<std::size_t>(n), static_cast<std::size_t>(u + cp_length));
  }
};

/// Received samples Y_{v,k} after CP removal (N x M).
struct ReceivedFrame {
  ComplexGrid samples;
  double noise_variance = 0.0;
};

SampleFrame hodm_modulate(const SymbolGrid& symbols);
SymbolGrid hodm_demodulate(const ReceivedFrame& received);

SampleFrame add_cyclic_prefix(const SampleFrame& body, int cp_length);
SampleFrame remove_cyclic_prefix(const SampleFrame& frame);

/// Sample grid carrying every mode with its sign flipped: element n takes
/// the samples of element -n mod N. Works on CP-extended frames as well.
SampleFrame mode_reverse(const SampleFrame& frame);

/// Passes one CP-extended frame through the channel; the stream before it is
/// taken as silent. Noise is circular complex Gaussian with the given
/// per-sample variance.
ReceivedFrame apply_channel(const ElementChannel& channel, const SampleFrame& tx,
                            double noise_variance, std::uint64_t seed);

/// Passes consecutive CP-extended frames through the channel, so delayed taps
/// of frame t read the tail of frame t-1. Frame t draws its noise from
/// derive_seed(seed, t).
std::vector<ReceivedFrame> apply_channel(const ElementChannel& channel,
                                         const std::vector<SampleFrame>& stream,
                                         double noise_variance, std::uint64_t seed);

enum class Parity { kOdd, kEven };

Parity parity_of_order(int order);

/// Unit-magnitude factor h_{vn,e} that undoes the element-dependent phase of a
/// reflection with reflector distance d_max.
Complex compensation_factor(const UcaGeometry& geom, double d_max, Parity parity, int v, int n,
                            double wavelength);

/// h_{vn,e} factorises into a transmit-element part and a receive-element
/// part; both are tabulated per subcarrier.
struct CompensationFactors {
  int num_elements = 0;
  int num_subcarriers = 0;
  std::vector<Complex> tx;  // [n * M + m]
  std::vector<Complex> rx;  // [v * M + m]
};

CompensationFactors compensation_factors(const UcaGeometry& geom, double d_max, Parity parity,
                                         const std::vector<double>& wavelengths);

/// Applies the transmit-element part to a frame body, per subcarrier.
SampleFrame precompensate(const SampleFrame& body, const CompensationFactors& factors);

/// Applies the receive-element part to received samples, per subcarrier.
ReceivedFrame apply_compensation(const ReceivedFrame& received,
                                 const CompensationFactors& factors);

/// Multiplies every reflection tap by the full factor with that path's own
/// parity; the LoS path is left untouched.
ElementChannel compensate_paths(const ElementChannel& channel, const UcaGeometry& geom,
                                double d_max, const std::vector<double>& wavelengths);

enum class CompensationScheme {
  kNone,
  /// Transmit part as precompensation, receive part at the receiver, one
  /// parity for every path.
  kSplit,
  /// Full factor folded into each reflection's taps with its own parity.
  kPerPath,
};

struct LinkOptions {
  CompensationScheme compensation = CompensationScheme::kNone;
  Parity parity = Parity::kOdd;
  double d_max = 0.0;  // reflector distance the compensation is tuned to
  int cp_length = 4;
  double noise_variance = 0.0;
  std::uint64_t seed = 0;
};

/// Modulate, (pre)compensate, add CP, pass the channel, compensate and
/// demodulate one frame.
SymbolGrid run_link(const UcaGeometry& geom, const ElementChannel& channel,
                    const SymbolGrid& symbols, const std::vector<double>& wavelengths,
                    const LinkOptions& options);

}  // namespace hodm
