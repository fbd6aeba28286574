#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace ev::detail {

// In-place complex transforms. sign = -1 forward, +1 backward; no scaling.
void fft_1d(std::vector<std::complex<double>>& data, int sign);
void fft_2d(std::vector<std::complex<double>>& data, std::int64_t n0, std::int64_t n1, int sign);

std::int64_t next_power_of_two(std::int64_t n);

}  // namespace ev::detail
