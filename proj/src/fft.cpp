#include "fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>

namespace ev::detail {

namespace {

// The FFTW planner is not re-entrant; execution of distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

void run(std::vector<std::complex<double>>& data, int rank, const int* dims, int sign) {
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft(rank, dims, buf, buf, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                         FFTW_ESTIMATE);
  }
  if (!plan) throw std::runtime_error("fftw: plan creation failed");
  fftw_execute(plan);
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(plan);
}

}  // namespace

void fft_1d(std::vector<std::complex<double>>& data, int sign) {
  const int dims[1] = {static_cast<int>(data.size())};
  run(data, 1, dims, sign);
}

void fft_2d(std::vector<std::complex<double>>& data, std::int64_t n0, std::int64_t n1, int sign) {
  if (static_cast<std::int64_t>(data.size()) != n0 * n1) {
    throw std::invalid_argument("fft_2d: size mismatch");
  }
  const int dims[2] = {static_cast<int>(n0), static_cast<int>(n1)};
  run(data, 2, dims, sign);
}

std::int64_t next_power_of_two(std::int64_t n) {
  std::int64_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace ev::detail
