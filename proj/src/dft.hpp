#pragma once

// Thin FFTW wrapper. Plans are created with FFTW_ESTIMATE under a global lock
// (the FFTW planner is not re-entrant); execution is thread-safe.

#include <complex>
#include <cstddef>
#include <vector>

#include "hodm/types.hpp"

namespace hodm::detail {

enum class DftSign { kForward = -1, kBackward = +1 };

/// Unnormalized in-place 2-D DFT of a rows x cols row-major array.
void dft_2d(std::vector<Complex>& data, std::size_t rows, std::size_t cols, DftSign sign);

/// Unnormalized in-place DFT along each row (length `cols`) of a rows x cols
/// row-major array.
void dft_rows(std::vector<Complex>& data, std::size_t rows, std::size_t cols, DftSign sign);

}  // namespace hodm::detail
