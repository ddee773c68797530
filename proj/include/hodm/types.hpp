#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace hodm {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr Complex kJ{0.0, 1.0};

/// Thrown when a numeric argument falls outside the domain of a formula
/// (arcsin ratio above one, negative Fresnel radicand, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Thrown when an input object violates its invariants.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// j^k for integer k, exact (no trigonometric round-off).
inline Complex jpow(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

/// e^{j*phase}
inline Complex cis(double phase) { return {std::cos(phase), std::sin(phase)}; }

/// Positive modulo, for circular indexing.
inline int wrap(int i, int n) { return ((i % n) + n) % n; }

/// Lowest OAM mode carried by an N-element ring: floor((2 - N) / 2).
inline int min_mode(int num_modes) {
  const int numerator = 2 - num_modes;
  return numerator >= 0 ? numerator / 2 : -((-numerator + 1) / 2);
}

/// Highest OAM mode: floor(N / 2).
inline int max_mode(int num_modes) { return num_modes / 2; }

/// All N modes in increasing order.
inline std::vector<int> mode_indices(int num_modes) {
  std::vector<int> modes;
  for (int l = min_mode(num_modes); l <= max_mode(num_modes); ++l) modes.push_back(l);
  return modes;
}

/// Dense row-major 2-D complex array.
class ComplexGrid {
 public:
  ComplexGrid() = default;
  ComplexGrid(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Complex& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  Complex* row(std::size_t r) { return data_.data() + r * cols_; }
  const Complex* row(std::size_t r) const { return data_.data() + r * cols_; }

  std::vector<Complex>& data() { return data_; }
  const std::vector<Complex>& data() const { return data_; }

  double energy() const {
    double e = 0.0;
    for (const auto& x : data_) e += std::norm(x);
    return e;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

}  // namespace hodm
