#include "hodm/modem.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "dft.hpp"
#include "hodm/parallel.hpp"

namespace hodm {

using detail::DftSign;

SymbolGrid::SymbolGrid(int num_modes, int num_subcarriers)
    : num_modes_(num_modes),
      num_subcarriers_(num_subcarriers),
      values_(static_cast<std::size_t>(num_modes), static_cast<std::size_t>(num_subcarriers)) {
  if (num_modes < 1 || num_subcarriers < 1) {
    throw ValidationError("symbol grid needs at least one mode and one subcarrier");
  }
}

std::size_t SymbolGrid::row_of(int l) const {
  if (l < min_mode() || l > max_mode()) {
    throw std::out_of_range("mode " + std::to_string(l) + " outside the mode set");
  }
  return static_cast<std::size_t>(l - min_mode());
}

SampleFrame hodm_modulate(const SymbolGrid& symbols) {
  const int N = symbols.num_modes();
  const int M = symbols.num_subcarriers();
  std::vector<Complex> grid(static_cast<std::size_t>(N) * M);
  for (int l = symbols.min_mode(); l <= symbols.max_mode(); ++l) {
    const std::size_t bin = static_cast<std::size_t>(wrap(l, N));
    for (int m = 0; m < M; ++m) grid[bin * M + m] = symbols.at(l, m);
  }
  detail::dft_2d(grid, N, M, DftSign::kBackward);
  SampleFrame frame;
  frame.samples = ComplexGrid(N, M);
  frame.samples.data() = std::move(grid);
  return frame;
}

SymbolGrid hodm_demodulate(const ReceivedFrame& received) {
  const int N = static_cast<int>(received.samples.rows());
  const int M = static_cast<int>(received.samples.cols());
  std::vector<Complex> grid = received.samples.data();
  detail::dft_2d(grid, N, M, DftSign::kForward);
  const double scale = 1.0 / (static_cast<double>(N) * M);
  SymbolGrid out(N, M);
  for (int l = out.min_mode(); l <= out.max_mode(); ++l) {
    const std::size_t bin = static_cast<std::size_t>(wrap(l, N));
    for (int m = 0; m < M; ++m) out.at(l, m) = grid[bin * M + m] * scale;
  }
  return out;
}

SampleFrame add_cyclic_prefix(const SampleFrame& body, int cp_length) {
  if (body.cp_length != 0) throw std::invalid_argument("frame already carries a cyclic prefix");
  const int M = body.body_length();
  if (cp_length < 0 || cp_length >= M) {
    throw std::invalid_argument("cyclic prefix length must lie in [0, M)");
  }
  const int N = body.num_elements();
  SampleFrame out;
  out.cp_length = cp_length;
  out.samples = ComplexGrid(N, static_cast<std::size_t>(M + cp_length));
  for (int n = 0; n < N; ++n) {
    for (int u = -cp_length; u < M; ++u) out.at(n, u) = body.at(n, wrap(u, M));
  }
  return out;
}

SampleFrame remove_cyclic_prefix(const SampleFrame& frame) {
  const int N = frame.num_elements();
  const int M = frame.body_length();
  SampleFrame out;
  out.samples = ComplexGrid(N, M);
  for (int n = 0; n < N; ++n) {
    for (int k = 0; k < M; ++k) out.at(n, k) = frame.at(n, k);
  }
  return out;
}

SampleFrame mode_reverse(const SampleFrame& frame) {
  const int N = frame.num_elements();
  SampleFrame out = frame;
  for (int n = 0; n < N; ++n) {
    const Complex* src = frame.samples.row(static_cast<std::size_t>(wrap(-n, N)));
    std::copy(src, src + frame.samples.cols(), out.samples.row(static_cast<std::size_t>(n)));
  }
  return out;
}

namespace {

void add_noise(ComplexGrid& samples, double noise_variance, std::uint64_t seed) {
  if (noise_variance < 0.0) throw std::invalid_argument("noise variance must be non-negative");
  if (noise_variance == 0.0) return;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, std::sqrt(noise_variance / 2.0));
  for (auto& x : samples.data()) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    x += Complex(re, im);
  }
}

void check_stream(const ElementChannel& channel, const std::vector<SampleFrame>& stream) {
  if (stream.empty()) throw std::invalid_argument("empty frame stream");
  const int N = channel.num_elements;
  const int M = channel.num_subcarriers;
  for (const auto& f : stream) {
    if (f.num_elements() != N || f.body_length() != M || f.cp_length != stream.front().cp_length) {
      throw std::invalid_argument("frame shape does not match the channel");
    }
  }
  if (channel.max_offset() > stream.front().cp_length) {
    throw std::runtime_error("channel tap offset " + std::to_string(channel.max_offset()) +
                             " exceeds the cyclic prefix length " +
                             std::to_string(stream.front().cp_length));
  }
}

}  // namespace

std::vector<ReceivedFrame> apply_channel(const ElementChannel& channel,
                                         const std::vector<SampleFrame>& stream,
                                         double noise_variance, std::uint64_t seed) {
  check_stream(channel, stream);
  const int N = channel.num_elements;
  const int M = channel.num_subcarriers;
  const int cp = stream.front().cp_length;
  const long frame_span = static_cast<long>(cp) + M;

  // Sample u of element e in frame t, reading back into earlier frames (or
  // silence before the first one) when u < -cp.
  auto source = [&](std::size_t t, int e, int u) -> Complex {
    const long pos = static_cast<long>(t) * frame_span + cp + u;
    if (pos < 0) return {};
    const auto& f = stream[static_cast<std::size_t>(pos / frame_span)];
    return f.samples(static_cast<std::size_t>(e), static_cast<std::size_t>(pos % frame_span));
  };

  std::vector<ReceivedFrame> out(stream.size());
  for (std::size_t t = 0; t < stream.size(); ++t) {
    std::vector<Complex> accum(static_cast<std::size_t>(N) * M);
    std::vector<Complex> window(static_cast<std::size_t>(N) * M);
    for (const auto& path : channel.paths) {
      const int delta = path.offset;
      for (int n = 0; n < N; ++n) {
        int e = wrap(n - delta, N);
        if (path.reverses_mode()) e = wrap(-e, N);
        for (int k = 0; k < M; ++k) {
          window[static_cast<std::size_t>(n) * M + k] = source(t, e, k - delta);
        }
      }
      detail::dft_rows(window, N, M, DftSign::kForward);
      for (int v = 0; v < N; ++v) {
        for (int n = 0; n < N; ++n) {
          const Complex* h = &path.taps[(static_cast<std::size_t>(v) * N + n) * M];
          const Complex* w = &window[static_cast<std::size_t>(n) * M];
          Complex* z = &accum[static_cast<std::size_t>(v) * M];
          for (int m = 0; m < M; ++m) z[m] += h[m] * w[m];
        }
      }
    }
    detail::dft_rows(accum, N, M, DftSign::kBackward);
    ReceivedFrame r;
    r.noise_variance = noise_variance;
    r.samples = ComplexGrid(N, M);
    const double scale = 1.0 / M;
    for (std::size_t i = 0; i < accum.size(); ++i) r.samples.data()[i] = accum[i] * scale;
    add_noise(r.samples, noise_variance, derive_seed(seed, t));
    out[t] = std::move(r);
  }
  return out;
}

ReceivedFrame apply_channel(const ElementChannel& channel, const SampleFrame& tx,
                            double noise_variance, std::uint64_t seed) {
  return std::move(apply_channel(channel, std::vector<SampleFrame>{tx}, noise_variance, seed)
                       .front());
}

Parity parity_of_order(int order) { return order % 2 == 1 ? Parity::kOdd : Parity::kEven; }

namespace {

// Exponent pieces of h_{vn,e}: 2 pi * (tx part(n) + rx part(v)).
double tx_phase(const UcaGeometry& g, double d_max, Parity parity, int n, double wavelength) {
  const double sign = parity == Parity::kOdd ? -1.0 : 1.0;
  return 2.0 * kPi * sign * 2.0 * g.radius_tx * d_max * std::cos(g.azimuth(n)) /
         (wavelength * g.image_distance(d_max));
}

double rx_phase(const UcaGeometry& g, double d_max, int v, double wavelength) {
  return -2.0 * kPi * 2.0 * g.radius_rx * d_max * std::cos(g.azimuth(v)) /
         (wavelength * g.image_distance(d_max));
}

// Multiplies each row of an N x M time-domain grid by a per-subcarrier factor.
void filter_rows(ComplexGrid& samples, const std::vector<Complex>& factors) {
  const std::size_t N = samples.rows();
  const std::size_t M = samples.cols();
  if (factors.size() != N * M) throw std::invalid_argument("compensation shape mismatch");
  auto& data = samples.data();
  detail::dft_rows(data, N, M, DftSign::kForward);
  const double scale = 1.0 / static_cast<double>(M);
  for (std::size_t i = 0; i < data.size(); ++i) data[i] *= factors[i] * scale;
  detail::dft_rows(data, N, M, DftSign::kBackward);
}

}  // namespace

Complex compensation_factor(const UcaGeometry& g, double d_max, Parity parity, int v, int n,
                            double wavelength) {
  return cis(tx_phase(g, d_max, parity, n, wavelength) + rx_phase(g, d_max, v, wavelength));
}

CompensationFactors compensation_factors(const UcaGeometry& g, double d_max, Parity parity,
                                         const std::vector<double>& wavelengths) {
  CompensationFactors f;
  f.num_elements = g.num_elements;
  f.num_subcarriers = static_cast<int>(wavelengths.size());
  const std::size_t M = wavelengths.size();
  f.tx.resize(static_cast<std::size_t>(g.num_elements) * M);
  f.rx.resize(f.tx.size());
  for (int i = 0; i < g.num_elements; ++i) {
    for (std::size_t m = 0; m < M; ++m) {
      f.tx[i * M + m] = cis(tx_phase(g, d_max, parity, i, wavelengths[m]));
      f.rx[i * M + m] = cis(rx_phase(g, d_max, i, wavelengths[m]));
    }
  }
  return f;
}

SampleFrame precompensate(const SampleFrame& body, const CompensationFactors& factors) {
  if (body.cp_length != 0) throw std::invalid_argument("precompensate expects a frame body");
  SampleFrame out = body;
  filter_rows(out.samples, factors.tx);
  return out;
}

ReceivedFrame apply_compensation(const ReceivedFrame& received,
                                 const CompensationFactors& factors) {
  ReceivedFrame out = received;
  filter_rows(out.samples, factors.rx);
  return out;
}

ElementChannel compensate_paths(const ElementChannel& channel, const UcaGeometry& g,
                                double d_max, const std::vector<double>& wavelengths) {
  ElementChannel out = channel;
  const int N = channel.num_elements;
  const int M = channel.num_subcarriers;
  for (auto& path : out.paths) {
    if (path.order == 0) continue;
    const Parity parity = parity_of_order(path.order);
    for (int v = 0; v < N; ++v) {
      for (int n = 0; n < N; ++n) {
        for (int m = 0; m < M; ++m) {
          path.taps[(static_cast<std::size_t>(v) * N + n) * M + m] *=
              compensation_factor(g, d_max, parity, v, n, wavelengths[static_cast<std::size_t>(m)]);
        }
      }
    }
  }
  return out;
}

SymbolGrid run_link(const UcaGeometry& geom, const ElementChannel& channel,
                    const SymbolGrid& symbols, const std::vector<double>& wavelengths,
                    const LinkOptions& options) {
  SampleFrame body = hodm_modulate(symbols);
  const bool compensating = options.compensation != CompensationScheme::kNone;
  if (compensating && !(options.d_max > 0.0)) {
    throw std::invalid_argument("compensation needs a positive reflector distance");
  }
  CompensationFactors factors;
  if (options.compensation == CompensationScheme::kSplit) {
    factors = compensation_factors(geom, options.d_max, options.parity, wavelengths);
    body = precompensate(body, factors);
  }
  const SampleFrame tx = add_cyclic_prefix(body, options.cp_length);
  ReceivedFrame rx =
      options.compensation == CompensationScheme::kPerPath
          ? apply_channel(compensate_paths(channel, geom, options.d_max, wavelengths), tx,
                          options.noise_variance, options.seed)
          : apply_channel(channel, tx, options.noise_variance, options.seed);
  if (options.compensation == CompensationScheme::kSplit) rx = apply_compensation(rx, factors);
  return hodm_demodulate(rx);
}

}  // namespace hodm
