#include "hodm/detection.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "hodm/parallel.hpp"
#include "hodm/types.hpp"

namespace hodm {

namespace {
constexpr std::size_t kDrawBlock = 256;
constexpr double kSingularTolerance = 1e-15;
}  // namespace

void CeeModel::validate() const {
  if (!(rho >= 0.0) || !(rho < 1.0)) throw ValidationError("rho must lie in [0, 1)");
  if (draws < 2) throw ValidationError("at least two Monte Carlo draws are required");
}

ModeDetection ModeDetection::uniform(const Eigen::VectorXcd& channel, double signal_power,
                                     double noise_power) {
  const auto M = channel.size();
  ModeDetection d;
  d.channel = channel;
  d.signal_covariance = Eigen::MatrixXcd::Identity(M, M) * signal_power;
  d.noise_covariance = Eigen::MatrixXcd::Identity(M, M) * noise_power;
  return d;
}

void ModeDetection::validate() const {
  const auto M = channel.size();
  if (M < 1) throw ValidationError("empty channel");
  if (signal_covariance.rows() != M || signal_covariance.cols() != M ||
      noise_covariance.rows() != M || noise_covariance.cols() != M) {
    throw ValidationError("covariance shape does not match the channel");
  }
  for (Eigen::Index i = 0; i < M; ++i) {
    if (!(std::abs(channel(i)) >= kSingularTolerance)) {
      throw DomainError("singular channel: |h| below 1e-15 at subcarrier " + std::to_string(i));
    }
  }
}

Eigen::VectorXcd draw_cee_realization(int size, std::uint64_t seed, std::uint64_t index) {
  std::mt19937_64 rng(derive_seed(seed, index));
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  Eigen::VectorXcd omega(size);
  for (int i = 0; i < size; ++i) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    omega(i) = Complex(re, im);
  }
  return omega;
}

Eigen::VectorXcd zf_estimate(const Eigen::VectorXcd& channel, double rho,
                             const Eigen::VectorXcd& omega, const Eigen::VectorXcd& received,
                             ZfForm form) {
  for (Eigen::Index i = 0; i < channel.size(); ++i) {
    if (!(std::abs(channel(i)) >= kSingularTolerance)) throw DomainError("singular channel");
  }
  const Eigen::VectorXcd inv_h = channel.cwiseInverse();
  if (form == ZfForm::kExact) {
    const Eigen::VectorXcd est = channel + rho * omega;
    return received.cwiseQuotient(est);
  }
  const Eigen::VectorXcd zf = inv_h.cwiseProduct(received);
  return inv_h.cwiseProduct(received - rho * omega.cwiseProduct(zf));
}

CeeMoments estimate_cee_moments(const ModeDetection& mode, const CeeModel& cee) {
  mode.validate();
  cee.validate();
  const int M = mode.size();
  const Eigen::VectorXcd inv_h = mode.channel.cwiseInverse();
  // H^-1 N H^-H for diagonal H
  const Eigen::MatrixXcd scaled_noise =
      inv_h.asDiagonal() * mode.noise_covariance * inv_h.conjugate().asDiagonal();

  struct Partial {
    Eigen::MatrixXcd signal;
    Eigen::MatrixXcd noise;
    double trace_sum = 0.0;
    double trace_sq = 0.0;
  };
  const std::size_t blocks = (cee.draws + kDrawBlock - 1) / kDrawBlock;
  std::vector<Partial> partial(blocks);
  parallel_for(blocks, cee.threads, [&](std::size_t b) {
    Partial p{Eigen::MatrixXcd::Zero(M, M), Eigen::MatrixXcd::Zero(M, M)};
    const std::size_t end = std::min(cee.draws, (b + 1) * kDrawBlock);
    for (std::size_t i = b * kDrawBlock; i < end; ++i) {
      const Eigen::VectorXcd w = draw_cee_realization(M, cee.seed, i);
      const Eigen::MatrixXcd outer = w * w.adjoint();  // (Omega X Omega^H)_ij = X_ij w_i w_j*
      const Eigen::MatrixXcd s = mode.signal_covariance.cwiseProduct(outer);
      const Eigen::MatrixXcd n = scaled_noise.cwiseProduct(outer);
      const double tr = (s.trace() + n.trace()).real();
      p.signal += s;
      p.noise += n;
      p.trace_sum += tr;
      p.trace_sq += tr * tr;
    }
    partial[b] = std::move(p);
  });

  CeeMoments out;
  out.signal_term = Eigen::MatrixXcd::Zero(M, M);
  out.noise_term = Eigen::MatrixXcd::Zero(M, M);
  double sum = 0.0;
  double sq = 0.0;
  for (const auto& p : partial) {
    out.signal_term += p.signal;
    out.noise_term += p.noise;
    sum += p.trace_sum;
    sq += p.trace_sq;
  }
  const double n = static_cast<double>(cee.draws);
  out.draws = cee.draws;
  out.signal_term /= n;
  out.noise_term /= n;
  out.trace_mean = sum / n;
  const double var = std::max(0.0, (sq - n * out.trace_mean * out.trace_mean) / (n - 1.0));
  out.trace_stderr = std::sqrt(var / n);
  return out;
}

Eigen::MatrixXcd effective_noise_covariance(const ModeDetection& mode, double rho,
                                            const CeeMoments& moments) {
  mode.validate();
  const Eigen::VectorXcd inv_h = mode.channel.cwiseInverse();
  const Eigen::MatrixXcd inner =
      mode.noise_covariance + rho * rho * (moments.signal_term + moments.noise_term);
  Eigen::MatrixXcd cov = inv_h.asDiagonal() * inner * inv_h.conjugate().asDiagonal();
  return 0.5 * (cov + cov.adjoint());
}

Eigen::MatrixXcd effective_noise_covariance(const ModeDetection& mode, const CeeModel& cee) {
  if (cee.rho == 0.0) {
    cee.validate();
    CeeMoments none;
    none.signal_term = Eigen::MatrixXcd::Zero(mode.size(), mode.size());
    none.noise_term = none.signal_term;
    return effective_noise_covariance(mode, 0.0, none);
  }
  return effective_noise_covariance(mode, cee.rho, estimate_cee_moments(mode, cee));
}

namespace {

double signal_trace(const ModeDetection& mode) {
  // tr(S H^H H) for diagonal H
  double t = 0.0;
  for (int i = 0; i < mode.size(); ++i) {
    t += mode.signal_covariance(i, i).real() * std::norm(mode.channel(i));
  }
  return t;
}

}  // namespace

Estimate received_snr(const ModeDetection& mode, double rho, const CeeMoments& moments) {
  mode.validate();
  const double noise = mode.noise_covariance.trace().real();
  const double denom = noise + rho * rho * moments.trace_mean;
  const double gamma = signal_trace(mode) / denom;
  // d gamma / d trace_mean = -gamma rho^2 / denom
  return {gamma, gamma * rho * rho / denom * moments.trace_stderr};
}

Estimate received_snr(const ModeDetection& mode, const CeeModel& cee) {
  if (cee.rho == 0.0) {
    cee.validate();
    mode.validate();
    return {signal_trace(mode) / mode.noise_covariance.trace().real(), 0.0};
  }
  return received_snr(mode, cee.rho, estimate_cee_moments(mode, cee));
}

Estimate snr_loss_linear(const ModeDetection& mode, double rho, const CeeMoments& moments) {
  const double gamma0 = signal_trace(mode) / mode.noise_covariance.trace().real();
  const Estimate g = received_snr(mode, rho, moments);
  return {gamma0 - g.value, g.std_error};
}

Estimate snr_loss_db(const ModeDetection& mode, double rho, const CeeMoments& moments) {
  mode.validate();
  const double noise = mode.noise_covariance.trace().real();
  const double denom = noise + rho * rho * moments.trace_mean;
  const double loss = 10.0 * std::log10(denom / noise);
  const double slope = 10.0 / std::log(10.0) * rho * rho / denom;
  return {loss, slope * moments.trace_stderr};
}

Estimate snr_loss_db(const ModeDetection& mode, const CeeModel& cee) {
  if (cee.rho == 0.0) {
    cee.validate();
    mode.validate();
    return {0.0, 0.0};
  }
  return snr_loss_db(mode, cee.rho, estimate_cee_moments(mode, cee));
}

}  // namespace hodm
