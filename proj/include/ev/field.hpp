#pragma once

// Sampled real-valued fields on uniform grids over [-L, L)^dim.
//
// Node i sits at x_i = -L + i h with h = 2L / n and owns the cell
// [x_i, x_i + h). Two-dimensional fields store values[ix * n + iy].

#include <complex>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

namespace ev {

struct Grid {
  int dim = 1;
  double half_width = 1.0;  // L
  std::int64_t n = 2;

  double spacing() const { return 2.0 * half_width / static_cast<double>(n); }
  double coord(std::int64_t i) const { return -half_width + static_cast<double>(i) * spacing(); }
  double cell_center(std::int64_t i) const { return coord(i) + 0.5 * spacing(); }
  std::int64_t size() const { return dim == 1 ? n : n * n; }
  /// Quadrature weight h^dim.
  double weight() const;

  bool operator==(const Grid&) const = default;
};

/// Throws std::invalid_argument unless n is a power of two, dim is 1 or 2 and
/// L is positive.
void validate_grid(const Grid& g);
bool is_power_of_two(std::int64_t n);

class SampledField {
 public:
  SampledField() = default;
  explicit SampledField(Grid grid);
  SampledField(Grid grid, std::vector<double> values);

  /// Samples f at the grid nodes.
  static SampledField sample_1d(Grid grid, const std::function<double(double)>& f);
  static SampledField sample_2d(Grid grid, const std::function<double(double, double)>& f);

  const Grid& grid() const { return grid_; }
  int dim() const { return grid_.dim; }
  std::int64_t n() const { return grid_.n; }
  double spacing() const { return grid_.spacing(); }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  double operator[](std::int64_t i) const { return values_[static_cast<std::size_t>(i)]; }
  double& operator[](std::int64_t i) { return values_[static_cast<std::size_t>(i)]; }
  double at(std::int64_t ix, std::int64_t iy) const {
    return values_[static_cast<std::size_t>(ix * grid_.n + iy)];
  }
  double& at(std::int64_t ix, std::int64_t iy) {
    return values_[static_cast<std::size_t>(ix * grid_.n + iy)];
  }

  /// Riemann sum of the values with weight h^dim.
  double mass() const;
  double max_abs() const;
  bool is_zero() const;

  SampledField& operator*=(double c);
  SampledField& operator+=(const SampledField& other);
  friend SampledField operator*(double c, SampledField f) { return f *= c; }
  friend SampledField operator+(SampledField a, const SampledField& b) { return a += b; }
  /// Pointwise product.
  SampledField pointwise(const SampledField& other) const;
  SampledField squared() const { return pointwise(*this); }

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// Linear convolution realised with FFTs over a zero-padded buffer of at
/// least twice the extent, scaled by h^dim. K is read with its centre node
/// (index n/2) as the origin.
SampledField convolve(const SampledField& f, const SampledField& k);

/// Unnormalised forward DFT (FFTW sign convention e^{-2 pi i jk/n}).
std::vector<std::complex<double>> dft(const SampledField& f);
/// Inverse of dft, including the 1/n^dim normalisation.
SampledField idft(const Grid& grid, std::span<const std::complex<double>> coeffs);

/// [f]_t = t^{-dim} f(./t) resampled by band-limited (sinc) interpolation.
/// Throws std::domain_error when more than `alias_tolerance` of the spectral
/// energy of f would be pushed above the grid Nyquist frequency.
SampledField dilate(const SampledField& f, double t, double alias_tolerance = 1e-10);

/// Whittaker-Shannon interpolation of a 1D field at an arbitrary point.
double sinc_interpolate(const SampledField& f, double x);

/// Flat binary format: dim (int64), L (float64), n (int64), values (float64,
/// row-major), native byte order.
void write_field(const std::filesystem::path& path, const SampledField& f);
SampledField read_field(const std::filesystem::path& path);

/// Linear cross-correlation helper used by the FFT convolution: returns
/// c[m] = sum_j a[j] b[m - j] for m in [0, a.size() + b.size() - 1).
std::vector<double> linear_convolution(std::span<const double> a, std::span<const double> b);

/// Same as above in 2D for row-major arrays of shape (na0, na1) and (nb0, nb1).
std::vector<double> linear_convolution_2d(std::span<const double> a, std::int64_t na0,
                                          std::int64_t na1, std::span<const double> b,
                                          std::int64_t nb0, std::int64_t nb1);

}  // namespace ev
