#pragma once

// Zero-forcing detection of one OAM mode (M subcarriers) when the receiver
// only knows the channel up to an additive Gaussian error rho * Omega.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace hodm {

/// Channel estimation error: H_est = H + rho * Omega, with Omega diagonal and
/// i.i.d. CN(0, 1) on the diagonal.
struct CeeModel {
  double rho = 0.0;
  std::size_t draws = 10000;  // Monte Carlo draws of Omega
  std::uint64_t seed = 0;
  unsigned threads = 1;

  void validate() const;
};

/// One OAM mode: diagonal channel and second-order statistics of the symbol
/// and noise vectors.
struct ModeDetection {
  Eigen::VectorXcd channel;            // diagonal of H_l
  Eigen::MatrixXcd signal_covariance;  // E[s s^H]
  Eigen::MatrixXcd noise_covariance;   // E[w w^H]

  /// Independent symbols of equal power and white noise.
  static ModeDetection uniform(const Eigen::VectorXcd& channel, double signal_power,
                               double noise_power);

  int size() const { return static_cast<int>(channel.size()); }
  /// Throws DomainError when a channel entry is below 1e-15 in magnitude,
  /// ValidationError on inconsistent shapes.
  void validate() const;
};

/// Diagonal of Omega for draw `index` of a CEE model seeded with `seed`.
Eigen::VectorXcd draw_cee_realization(int size, std::uint64_t seed, std::uint64_t index);

enum class ZfForm {
  /// s_hat = H^-1 (y - rho Omega H^-1 y), first order in rho.
  kLinearized,
  /// s_hat = (H + rho Omega)^-1 y.
  kExact,
};

Eigen::VectorXcd zf_estimate(const Eigen::VectorXcd& channel, double rho,
                             const Eigen::VectorXcd& omega, const Eigen::VectorXcd& received,
                             ZfForm form = ZfForm::kLinearized);

/// Monte Carlo averages over Omega that do not depend on rho:
///   signal_term = E[Omega S Omega^H],
///   noise_term  = E[Omega H^-1 N H^-H Omega^H].
/// `trace_mean` and `trace_stderr` summarise tr(signal_term + noise_term)
/// across draws. Draws are split into fixed blocks so the result does not
/// depend on the thread count.
struct CeeMoments {
  Eigen::MatrixXcd signal_term;
  Eigen::MatrixXcd noise_term;
  double trace_mean = 0.0;
  double trace_stderr = 0.0;
  std::size_t draws = 0;
};

CeeMoments estimate_cee_moments(const ModeDetection& mode, const CeeModel& cee);

/// Covariance of the post-detection noise s_hat - s:
///   H^-1 (N + rho^2 (signal_term + noise_term)) H^-H.
Eigen::MatrixXcd effective_noise_covariance(const ModeDetection& mode, const CeeModel& cee);
Eigen::MatrixXcd effective_noise_covariance(const ModeDetection& mode, double rho,
                                            const CeeMoments& moments);

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// gamma_l = tr(S H^H H) / tr(N + rho^2 (signal_term + noise_term)).
Estimate received_snr(const ModeDetection& mode, const CeeModel& cee);
Estimate received_snr(const ModeDetection& mode, double rho, const CeeMoments& moments);

/// Linear loss gamma_l(0) - gamma_l(rho).
Estimate snr_loss_linear(const ModeDetection& mode, double rho, const CeeMoments& moments);

/// 10 log10(gamma_l(0) / gamma_l(rho)); 0 dB at rho = 0.
Estimate snr_loss_db(const ModeDetection& mode, const CeeModel& cee);
Estimate snr_loss_db(const ModeDetection& mode, double rho, const CeeMoments& moments);

}  // namespace hodm
