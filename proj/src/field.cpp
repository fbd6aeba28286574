#include "ev/field.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "fft.hpp"

namespace ev {

double Grid::weight() const {
  const double h = spacing();
  return dim == 1 ? h : h * h;
}

bool is_power_of_two(std::int64_t n) { return n > 0 && (n & (n - 1)) == 0; }

void validate_grid(const Grid& g) {
  if (g.dim != 1 && g.dim != 2) throw std::invalid_argument("grid: dim must be 1 or 2");
  if (!is_power_of_two(g.n)) {
    throw std::invalid_argument("grid: n = " + std::to_string(g.n) + " is not a power of two");
  }
  if (!(g.half_width > 0.0)) throw std::invalid_argument("grid: L must be positive");
}

SampledField::SampledField(Grid grid) : grid_(grid) {
  validate_grid(grid_);
  values_.assign(static_cast<std::size_t>(grid_.size()), 0.0);
}

SampledField::SampledField(Grid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  validate_grid(grid_);
  if (static_cast<std::int64_t>(values_.size()) != grid_.size()) {
    throw std::invalid_argument("SampledField: value count does not match the grid");
  }
}

SampledField SampledField::sample_1d(Grid grid, const std::function<double(double)>& f) {
  grid.dim = 1;
  SampledField out(grid);
  for (std::int64_t i = 0; i < grid.n; ++i) out[i] = f(grid.coord(i));
  return out;
}

SampledField SampledField::sample_2d(Grid grid, const std::function<double(double, double)>& f) {
  grid.dim = 2;
  SampledField out(grid);
  for (std::int64_t i = 0; i < grid.n; ++i) {
    for (std::int64_t j = 0; j < grid.n; ++j) out.at(i, j) = f(grid.coord(i), grid.coord(j));
  }
  return out;
}

double SampledField::mass() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s * grid_.weight();
}

double SampledField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

bool SampledField::is_zero() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

SampledField& SampledField::operator*=(double c) {
  for (double& v : values_) v *= c;
  return *this;
}

SampledField& SampledField::operator+=(const SampledField& other) {
  if (!(grid_ == other.grid_)) throw std::invalid_argument("SampledField: grid mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

SampledField SampledField::pointwise(const SampledField& other) const {
  if (!(grid_ == other.grid_)) throw std::invalid_argument("SampledField: grid mismatch");
  SampledField out = *this;
  for (std::size_t i = 0; i < values_.size(); ++i) out.values_[i] *= other.values_[i];
  return out;
}

std::vector<double> linear_convolution(std::span<const double> a, std::span<const double> b) {
  const auto out_len = static_cast<std::int64_t>(a.size() + b.size()) - 1;
  const std::int64_t m = detail::next_power_of_two(out_len);
  std::vector<std::complex<double>> fa(static_cast<std::size_t>(m)), fb(fa.size());
  std::copy(a.begin(), a.end(), fa.begin());
  std::copy(b.begin(), b.end(), fb.begin());
  detail::fft_1d(fa, -1);
  detail::fft_1d(fb, -1);
  for (std::size_t i = 0; i < fa.size(); ++i) fa[i] *= fb[i];
  detail::fft_1d(fa, +1);
  std::vector<double> out(static_cast<std::size_t>(out_len));
  for (std::int64_t i = 0; i < out_len; ++i) out[i] = fa[i].real() / static_cast<double>(m);
  return out;
}

std::vector<double> linear_convolution_2d(std::span<const double> a, std::int64_t na0,
                                          std::int64_t na1, std::span<const double> b,
                                          std::int64_t nb0, std::int64_t nb1) {
  const std::int64_t o0 = na0 + nb0 - 1, o1 = na1 + nb1 - 1;
  const std::int64_t m0 = detail::next_power_of_two(o0), m1 = detail::next_power_of_two(o1);
  std::vector<std::complex<double>> fa(static_cast<std::size_t>(m0 * m1)), fb(fa.size());
  for (std::int64_t i = 0; i < na0; ++i)
    for (std::int64_t j = 0; j < na1; ++j) fa[i * m1 + j] = a[i * na1 + j];
  for (std::int64_t i = 0; i < nb0; ++i)
    for (std::int64_t j = 0; j < nb1; ++j) fb[i * m1 + j] = b[i * nb1 + j];
  detail::fft_2d(fa, m0, m1, -1);
  detail::fft_2d(fb, m0, m1, -1);
  for (std::size_t i = 0; i < fa.size(); ++i) fa[i] *= fb[i];
  detail::fft_2d(fa, m0, m1, +1);
  const double scale = 1.0 / static_cast<double>(m0 * m1);
  std::vector<double> out(static_cast<std::size_t>(o0 * o1));
  for (std::int64_t i = 0; i < o0; ++i)
    for (std::int64_t j = 0; j < o1; ++j) out[i * o1 + j] = fa[i * m1 + j].real() * scale;
  return out;
}

SampledField convolve(const SampledField& f, const SampledField& k) {
  if (!(f.grid() == k.grid())) throw std::invalid_argument("convolve: grid mismatch");
  const auto& g = f.grid();
  const std::int64_t n = g.n, c = n / 2;
  SampledField out(g);
  if (g.dim == 1) {
    const auto full = linear_convolution(f.values(), k.values());
    for (std::int64_t i = 0; i < n; ++i) out[i] = full[i + c] * g.weight();
  } else {
    const auto full = linear_convolution_2d(f.values(), n, n, k.values(), n, n);
    const std::int64_t w = 2 * n - 1;
    for (std::int64_t i = 0; i < n; ++i)
      for (std::int64_t j = 0; j < n; ++j) out.at(i, j) = full[(i + c) * w + (j + c)] * g.weight();
  }
  return out;
}

std::vector<std::complex<double>> dft(const SampledField& f) {
  std::vector<std::complex<double>> data(f.values().begin(), f.values().end());
  if (f.dim() == 1) {
    detail::fft_1d(data, -1);
  } else {
    detail::fft_2d(data, f.n(), f.n(), -1);
  }
  return data;
}

SampledField idft(const Grid& grid, std::span<const std::complex<double>> coeffs) {
  std::vector<std::complex<double>> data(coeffs.begin(), coeffs.end());
  if (static_cast<std::int64_t>(data.size()) != grid.size()) {
    throw std::invalid_argument("idft: coefficient count does not match the grid");
  }
  if (grid.dim == 1) {
    detail::fft_1d(data, +1);
  } else {
    detail::fft_2d(data, grid.n, grid.n, +1);
  }
  SampledField out(grid);
  const double scale = 1.0 / static_cast<double>(grid.size());
  for (std::size_t i = 0; i < data.size(); ++i) out.values()[i] = data[i].real() * scale;
  return out;
}

namespace {

double sinc(double z) {
  if (std::abs(z) < 1e-12) return 1.0;
  const double pz = std::numbers::pi * z;
  return std::sin(pz) / pz;
}

// Fraction of spectral energy at integer frequencies |m| > cutoff * n / 2.
double energy_above(const SampledField& f, double cutoff) {
  const auto coeffs = dft(f);
  const std::int64_t n = f.n();
  auto freq = [n](std::int64_t i) { return static_cast<double>(i <= n / 2 ? i : n - i); };
  const double limit = cutoff * static_cast<double>(n) / 2.0;
  double total = 0.0, above = 0.0;
  for (std::int64_t idx = 0; idx < static_cast<std::int64_t>(coeffs.size()); ++idx) {
    const double e = std::norm(coeffs[idx]);
    total += e;
    double r = 0.0;
    if (f.dim() == 1) {
      r = freq(idx);
    } else {
      r = std::max(freq(idx / n), freq(idx % n));
    }
    if (r > limit) above += e;
  }
  return total > 0.0 ? above / total : 0.0;
}

Eigen::MatrixXd sinc_matrix(const Grid& g, double t) {
  const std::int64_t n = g.n;
  const double h = g.spacing();
  Eigen::MatrixXd s(n, n);
  for (std::int64_t i = 0; i < n; ++i) {
    const double target = g.coord(i) / t;
    for (std::int64_t a = 0; a < n; ++a) s(i, a) = sinc((target - g.coord(a)) / h);
  }
  return s;
}

}  // namespace

double sinc_interpolate(const SampledField& f, double x) {
  if (f.dim() != 1) throw std::invalid_argument("sinc_interpolate: 1D fields only");
  const double h = f.spacing();
  double s = 0.0;
  for (std::int64_t a = 0; a < f.n(); ++a) s += f[a] * sinc((x - f.grid().coord(a)) / h);
  return s;
}

SampledField dilate(const SampledField& f, double t, double alias_tolerance) {
  if (!(t > 0.0)) throw std::invalid_argument("dilate: t must be positive");
  if (t == 1.0) return f;
  if (t < 1.0) {
    const double frac = energy_above(f, t);
    if (frac > alias_tolerance) {
      throw std::domain_error("dilate: t = " + std::to_string(t) +
                              " aliases below grid resolution (energy fraction " +
                              std::to_string(frac) + ")");
    }
  }
  const auto& g = f.grid();
  const std::int64_t n = g.n;
  const Eigen::MatrixXd s = sinc_matrix(g, t);
  SampledField out(g);
  if (g.dim == 1) {
    Eigen::Map<const Eigen::VectorXd> v(f.values().data(), n);
    Eigen::Map<Eigen::VectorXd> o(out.values().data(), n);
    o = (s * v) / t;
  } else {
    using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Eigen::Map<const RowMat> v(f.values().data(), n, n);
    Eigen::Map<RowMat> o(out.values().data(), n, n);
    o = (s * v * s.transpose()) / (t * t);
  }
  return out;
}

void write_field(const std::filesystem::path& path, const SampledField& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_field: cannot open " + path.string());
  const std::int64_t dim = f.dim(), n = f.n();
  const double L = f.grid().half_width;
  out.write(reinterpret_cast<const char*>(&dim), sizeof dim);
  out.write(reinterpret_cast<const char*>(&L), sizeof L);
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  out.write(reinterpret_cast<const char*>(f.values().data()),
            static_cast<std::streamsize>(f.values().size() * sizeof(double)));
  if (!out) throw std::runtime_error("write_field: write failed for " + path.string());
}

SampledField read_field(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_field: cannot open " + path.string());
  std::int64_t dim = 0, n = 0;
  double L = 0.0;
  in.read(reinterpret_cast<char*>(&dim), sizeof dim);
  in.read(reinterpret_cast<char*>(&L), sizeof L);
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  if (!in) throw std::runtime_error("read_field: truncated header in " + path.string());
  Grid g{static_cast<int>(dim), L, n};
  validate_grid(g);
  std::vector<double> values(static_cast<std::size_t>(g.size()));
  in.read(reinterpret_cast<char*>(values.data()),
          static_cast<std::streamsize>(values.size() * sizeof(double)));
  if (!in) throw std::runtime_error("read_field: truncated payload in " + path.string());
  return SampledField(g, std::move(values));
}

}  // namespace ev
