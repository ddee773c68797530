#include "dft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>

namespace hodm::detail {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(std::vector<Complex>& v) {
  return reinterpret_cast<fftw_complex*>(v.data());
}

class Plan {
 public:
  explicit Plan(fftw_plan p) : plan_(p) {
    if (!plan_) throw std::runtime_error("FFTW planning failed");
  }
  ~Plan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;

  void run() const { fftw_execute(plan_); }

 private:
  fftw_plan plan_;
};

}  // namespace

void dft_2d(std::vector<Complex>& data, std::size_t rows, std::size_t cols, DftSign sign) {
  if (data.size() != rows * cols) throw std::invalid_argument("dft_2d: size mismatch");
  if (data.empty()) return;
  fftw_plan raw;
  {
    std::lock_guard lock(planner_mutex());
    raw = fftw_plan_dft_2d(static_cast<int>(rows), static_cast<int>(cols), as_fftw(data),
                           as_fftw(data), static_cast<int>(sign), FFTW_ESTIMATE);
  }
  Plan(raw).run();
}

void dft_rows(std::vector<Complex>& data, std::size_t rows, std::size_t cols, DftSign sign) {
  if (data.size() != rows * cols) throw std::invalid_argument("dft_rows: size mismatch");
  if (data.empty()) return;
  int n[] = {static_cast<int>(cols)};
  fftw_plan raw;
  {
    std::lock_guard lock(planner_mutex());
    raw = fftw_plan_many_dft(1, n, static_cast<int>(rows), as_fftw(data), nullptr, 1,
                             static_cast<int>(cols), as_fftw(data), nullptr, 1,
                             static_cast<int>(cols), static_cast<int>(sign), FFTW_ESTIMATE);
  }
  Plan(raw).run();
}

}  // namespace hodm::detail
