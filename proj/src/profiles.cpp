#include "ev/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "fft.hpp"
#include "hermite.hpp"

namespace ev {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSqrtPi = 1.7724538509055160273;

}  // namespace

Profile::Profile(std::string name, RealFn value, RealFn derivative, RealFn antiderivative,
                 FourierFn fourier, double space_radius, double freq_radius)
    : name_(std::move(name)),
      value_(std::move(value)),
      derivative_(std::move(derivative)),
      antiderivative_(std::move(antiderivative)),
      fourier_(std::move(fourier)),
      space_radius_(space_radius),
      freq_radius_(freq_radius) {}

std::complex<double> Profile::fourier(double xi) const {
  if (!fourier_) throw std::logic_error("profile " + name_ + " has no Fourier transform");
  return fourier_(xi);
}

double Profile::scale_derivative(double x, double t) const {
  const double s = x / t;
  return (value_(s) + s * derivative_(s)) / t;
}

Profile Profile::packet(double shift, double exponent) const {
  const double w = std::pow(1.0 + std::abs(shift), -exponent);
  auto v = value_;
  auto d = derivative_;
  auto a = antiderivative_;
  FourierFn fh;
  if (fourier_) {
    auto f = fourier_;
    fh = [f, w, shift](double xi) {
      return w * f(xi) * std::polar(1.0, -2.0 * kPi * shift * xi);
    };
  }
  return Profile(name_ + "@" + std::to_string(shift), [v, w, shift](double x) { return w * v(x - shift); },
                 [d, w, shift](double x) { return w * d(x - shift); },
                 [a, w, shift](double x) { return w * a(x - shift); }, fh,
                 space_radius_ + std::abs(shift), freq_radius_);
}

Profile Profile::scaled(double c) const {
  auto v = value_;
  auto d = derivative_;
  auto a = antiderivative_;
  FourierFn fh;
  if (fourier_) {
    auto f = fourier_;
    fh = [f, c](double xi) { return c * f(xi); };
  }
  return Profile(name_, [v, c](double x) { return c * v(x); }, [d, c](double x) { return c * d(x); },
                 [a, c](double x) { return c * a(x); }, fh, space_radius_, freq_radius_);
}

// --- Kernels --------------------------------------------------------------

double theta(double x, double y) {
  const double r2 = x * x + y * y;
  return 1.0 / (1.0 + r2 * r2);
}

double vartheta(double x) { return std::pow(1.0 + std::abs(x), -4.0); }

Profile vartheta_profile() {
  return Profile(
      "vartheta", [](double x) { return vartheta(x); },
      [](double x) {
        const double s = x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0);
        return -4.0 * s * std::pow(1.0 + std::abs(x), -5.0);
      },
      [](double x) {
        if (x <= 0) return std::pow(1.0 - x, -3.0) / 3.0;
        return 2.0 / 3.0 - std::pow(1.0 + x, -3.0) / 3.0;
      },
      nullptr, 1e4, std::numeric_limits<double>::infinity());
}

Profile vartheta_squared_profile() {
  return Profile(
      "vartheta^2", [](double x) { return std::pow(1.0 + std::abs(x), -8.0); },
      [](double x) {
        const double s = x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0);
        return -8.0 * s * std::pow(1.0 + std::abs(x), -9.0);
      },
      [](double x) {
        if (x <= 0) return std::pow(1.0 - x, -7.0) / 7.0;
        return 2.0 / 7.0 - std::pow(1.0 + x, -7.0) / 7.0;
      },
      nullptr, 100.0, std::numeric_limits<double>::infinity());
}

Kernels make_kernels(double half_width, std::int64_t n) {
  Grid g2{2, half_width, n};
  validate_grid(g2);
  Grid g1{1, half_width, n};
  return Kernels{SampledField::sample_2d(g2, [](double x, double y) { return theta(x, y); }),
                 SampledField::sample_1d(g1, [](double x) { return vartheta(x); })};
}

// --- Gaussians ------------------------------------------------------------

Profile gaussian(double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("gaussian: alpha must be positive");
  const double c = 1.0 / (kSqrtPi * alpha);
  return Profile(
      "g_" + std::to_string(alpha),
      [c, alpha](double x) { return c * std::exp(-(x / alpha) * (x / alpha)); },
      [c, alpha](double x) {
        return -2.0 * x / (alpha * alpha) * c * std::exp(-(x / alpha) * (x / alpha));
      },
      [alpha](double x) { return 0.5 * std::erfc(-x / alpha); },
      [alpha](double xi) {
        return std::complex<double>(std::exp(-kPi * kPi * alpha * alpha * xi * xi), 0.0);
      },
      10.0 * alpha, 2.2 / alpha);
}

Profile gaussian_derivative(double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("gaussian: alpha must be positive");
  const double c = 1.0 / (kSqrtPi * alpha);
  return Profile(
      "h_" + std::to_string(alpha),
      [c, alpha](double x) {
        const double s = x / alpha;
        return -2.0 * s * c * std::exp(-s * s);
      },
      [c, alpha](double x) {
        const double s = x / alpha;
        return (4.0 * s * s - 2.0) / alpha * c * std::exp(-s * s);
      },
      [c, alpha](double x) {
        const double s = x / alpha;
        return alpha * c * std::exp(-s * s);
      },
      [alpha](double xi) {
        const double g = std::exp(-kPi * kPi * alpha * alpha * xi * xi);
        return std::complex<double>(0.0, 2.0 * kPi * alpha * xi * g);
      },
      10.0 * alpha, 2.5 / alpha);
}

AdmissiblePair gaussian_pair(double alpha) {
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("gaussian_pair: alpha must be positive, got " + std::to_string(alpha));
  }
  return AdmissiblePair{gaussian(alpha), gaussian_derivative(alpha), PairKind::gaussian, alpha};
}

// --- Square-function pair -------------------------------------------------

double psi_hat(double tau) {
  const double a = std::abs(tau);
  if (a <= 1.0 || a >= 2.0) return 0.0;
  return std::exp(-1.0 / ((a - 1.0) * (2.0 - a)));
}

namespace {

double psi_hat_sq_over_tau(double tau) {
  const double p = psi_hat(tau);
  return p * p / tau;
}

// Composite 61-point Kronrod rule; the integrand is smooth and flat at the ends.
double integrate_psi_sq(double a, double b) {
  if (b <= a) return 0.0;
  const auto pieces = static_cast<int>(std::ceil(32.0 * (b - a)));
  const double w = (b - a) / pieces;
  double s = 0.0;
  for (int i = 0; i < pieces; ++i) {
    s += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        psi_hat_sq_over_tau, a + w * i, a + w * (i + 1), 0, 0.0);
  }
  return s;
}

}  // namespace

double tail_integral_direct(double xi) {
  double s = 0.0;
  if (xi < -1.0) s += integrate_psi_sq(std::max(xi, -2.0), -1.0);
  s += integrate_psi_sq(std::max(xi, 1.0), 2.0);
  return s;
}

double phi_hat_squared(double xi) {
  const double a = std::abs(xi);
  if (a >= 2.0) return 0.0;
  return integrate_psi_sq(std::max(a, 1.0), 2.0);
}

double phi_hat(double xi) { return std::sqrt(phi_hat_squared(xi)); }

namespace {

struct SquareTables {
  detail::HermiteTable phi_hat;  // on [0, 2]
  detail::HermiteTable phi, dphi, phi_anti;
  detail::HermiteTable psi, dpsi, psi_anti;
  double phi_total = 0.0;
  double psi_total = 0.0;
};

// Spatial tables from the Fourier side by FFT on M points at spacing delta.
void tabulate_spatial(const std::function<double(double)>& fhat, double delta, std::int64_t m,
                      detail::HermiteTable& val, detail::HermiteTable& der,
                      detail::HermiteTable& anti, double& total) {
  const double dxi = 1.0 / (delta * static_cast<double>(m));
  std::vector<std::complex<double>> b0(static_cast<std::size_t>(m)), b1(b0.size()), b2(b0.size());
  for (std::int64_t k = 0; k < m; ++k) {
    const double xi = static_cast<double>(k - m / 2) * dxi;
    const double sgn = (k % 2 == 0) ? 1.0 : -1.0;
    const double v = sgn * fhat(xi) * dxi;
    const std::complex<double> iw(0.0, 2.0 * kPi * xi);
    b0[k] = v;
    b1[k] = v * iw;
    b2[k] = v * iw * iw;
  }
  detail::fft_1d(b0, +1);
  detail::fft_1d(b1, +1);
  detail::fft_1d(b2, +1);
  std::vector<double> f(b0.size()), d(b0.size()), dd(b0.size());
  for (std::int64_t i = 0; i < m; ++i) {
    const double sgn = (i % 2 == 0) ? 1.0 : -1.0;
    f[i] = sgn * b0[i].real();
    d[i] = sgn * b1[i].real();
    dd[i] = sgn * b2[i].real();
  }
  const double x0 = -static_cast<double>(m / 2) * delta;
  std::vector<double> cum(f.size(), 0.0);
  for (std::size_t i = 1; i < f.size(); ++i) {
    cum[i] = cum[i - 1] + 0.5 * delta * (f[i - 1] + f[i]) + delta * delta / 12.0 * (d[i - 1] - d[i]);
  }
  total = cum.back();
  val = detail::HermiteTable{x0, delta, f, d};
  der = detail::HermiteTable{x0, delta, d, dd};
  anti = detail::HermiteTable{x0, delta, cum, f};
}

const SquareTables& square_tables() {
  static std::once_flag once;
  static std::unique_ptr<SquareTables> tables;
  std::call_once(once, [] {
    auto t = std::make_unique<SquareTables>();
    constexpr std::int64_t kHatIntervals = 8192;
    const double dh = 2.0 / kHatIntervals;
    std::vector<double> hv(kHatIntervals + 1), hd(kHatIntervals + 1);
    // Cumulative tail from xi = 2 downward, then square roots.
    std::vector<double> tail(kHatIntervals + 1, 0.0);
    for (std::int64_t i = kHatIntervals - 1; i >= 0; --i) {
      const double a = std::max(1.0, dh * static_cast<double>(i));
      const double b = std::max(1.0, dh * static_cast<double>(i + 1));
      tail[i] = tail[i + 1] + integrate_psi_sq(a, b);
    }
    for (std::int64_t i = 0; i <= kHatIntervals; ++i) {
      const double xi = dh * static_cast<double>(i);
      hv[i] = std::sqrt(tail[i]);
      const double tp = xi > 1.0 ? -psi_hat_sq_over_tau(xi) : 0.0;
      hd[i] = hv[i] > 1e-150 ? tp / (2.0 * hv[i]) : 0.0;
    }
    t->phi_hat = detail::HermiteTable{0.0, dh, hv, hd};
    const auto& table = t->phi_hat;
    auto phi_hat_fn = [&table](double xi) { return table.eval(std::abs(xi)); };
    constexpr std::int64_t kM = 1 << 17;
    constexpr double kDelta = 1.0 / 256.0;
    tabulate_spatial(phi_hat_fn, kDelta, kM, t->phi, t->dphi, t->phi_anti, t->phi_total);
    tabulate_spatial(psi_hat, kDelta, kM, t->psi, t->dpsi, t->psi_anti, t->psi_total);
    tables = std::move(t);
  });
  return *tables;
}

Profile from_tables(const std::string& name, const detail::HermiteTable& val,
                    const detail::HermiteTable& der, const detail::HermiteTable& anti, double total,
                    Profile::FourierFn fh) {
  constexpr double kRadius = 96.0;
  return Profile(
      name, [&val](double x) { return std::abs(x) > kRadius ? 0.0 : val.eval(x); },
      [&der](double x) { return std::abs(x) > kRadius ? 0.0 : der.eval(x); },
      [&anti, total](double x) {
        if (x < anti.x0) return 0.0;
        if (x > anti.x_max()) return total;
        return anti.eval(x);
      },
      std::move(fh), kRadius, 2.0);
}

}  // namespace

AdmissiblePair make_square_function_pair() {
  const auto& t = square_tables();
  const auto& hat = t.phi_hat;
  Profile phi = from_tables("phi", t.phi, t.dphi, t.phi_anti, t.phi_total, [&hat](double xi) {
    return std::complex<double>(hat.eval(std::abs(xi)), 0.0);
  });
  Profile psi = from_tables("psi", t.psi, t.dpsi, t.psi_anti, t.psi_total,
                            [](double xi) { return std::complex<double>(psi_hat(xi), 0.0); });
  return AdmissiblePair{std::move(phi), std::move(psi), PairKind::square_function, 0.0};
}

double phi_superposition(double x) {
  const double a = std::abs(x);
  double err = 0.0, l1 = 0.0, v = 0.0;
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  if (a <= 1.0) {
    auto f = [a](double alpha) { return std::pow(alpha, -21.0) * std::exp(-(a / alpha) * (a / alpha)); };
    v = GK::integrate(f, 1.0, std::numeric_limits<double>::infinity(), 20, 1e-12, &err, &l1);
  } else {
    auto f = [](double beta) { return std::pow(beta, 19.0) * std::exp(-beta * beta); };
    v = GK::integrate(f, 0.0, a, 20, 1e-12, &err, &l1);
    const double scale = std::pow(a, -20.0);
    v *= scale;
    err *= scale;
    l1 *= scale;
  }
  if (!std::isfinite(v) || err > 1e-9 * l1) {
    throw std::runtime_error("phi_superposition: quadrature did not converge at x = " +
                             std::to_string(x));
  }
  return v;
}

// --- Seminorms and residuals ----------------------------------------------

double schwartz_seminorm(const SampledField& f) {
  if (f.dim() != 1) throw std::invalid_argument("schwartz_seminorm: 1D fields only");
  const auto& g = f.grid();
  const double h = g.spacing();
  double best = 0.0;
  for (std::int64_t i = 0; i < g.n; ++i) {
    const double x = g.coord(i);
    const double fm = i > 0 ? f[i - 1] : 0.0;
    const double fp = i + 1 < g.n ? f[i + 1] : 0.0;
    const double d = (fp - fm) / (2.0 * h);
    const double w = 1.0 + std::abs(x);
    best = std::max(best, std::pow(w, 8) * std::abs(f[i]) + std::pow(w, 9) * std::abs(d));
  }
  return best;
}

double schwartz_seminorm(const Profile& f) {
  const double r = std::min(f.space_radius(), 128.0);
  constexpr std::int64_t kSamples = 1 << 16;
  double best = 0.0;
  for (std::int64_t i = 0; i <= kSamples; ++i) {
    const double x = -r + 2.0 * r * static_cast<double>(i) / kSamples;
    const double w = 1.0 + std::abs(x);
    best = std::max(best, std::pow(w, 8) * std::abs(f(x)) + std::pow(w, 9) * std::abs(f.derivative(x)));
  }
  return best;
}

namespace {

std::complex<double> trapezoid_fourier(const Profile& f, double xi, bool moment) {
  const double r = f.space_radius();
  const double step = std::min(1.0 / 64.0, 1.0 / (4.0 * (std::abs(xi) + 4.0 * f.freq_radius())));
  const auto m = static_cast<std::int64_t>(std::ceil(r / step));
  std::complex<double> s = 0.0;
  for (std::int64_t i = -m; i <= m; ++i) {
    const double x = static_cast<double>(i) * step;
    double v = f(x);
    if (moment) v *= x;
    s += v * std::polar(1.0, -2.0 * kPi * x * xi);
  }
  return s * step;
}

}  // namespace

std::complex<double> numeric_fourier(const Profile& f, double xi) {
  return trapezoid_fourier(f, xi, false);
}

std::complex<double> numeric_fourier_derivative(const Profile& f, double xi) {
  return std::complex<double>(0.0, -2.0 * kPi) * trapezoid_fourier(f, xi, true);
}

IdentityResidual fourier_pair_residual_numeric(const AdmissiblePair& pair,
                                               std::span<const double> ts,
                                               std::span<const double> taus) {
  IdentityResidual r;
  for (double t : ts) {
    for (double tau : taus) {
      const double xi = t * tau;
      const auto rh = numeric_fourier(pair.rho, xi);
      const auto rd = numeric_fourier_derivative(pair.rho, xi);
      const auto sh = numeric_fourier(pair.sigma, xi);
      const double lhs = -2.0 * xi * std::real(std::conj(rh) * rd);
      const double rhs = std::norm(sh);
      r.max_abs_error = std::max(r.max_abs_error, std::abs(lhs - rhs));
      r.max_reference = std::max(r.max_reference, std::abs(rhs));
    }
  }
  return r;
}

IdentityResidual fourier_pair_residual_fd(const std::function<double(double)>& rho_hat_sq,
                                          const std::function<double(double)>& sigma_hat_sq,
                                          std::span<const double> ts,
                                          std::span<const double> taus, double log_step) {
  IdentityResidual r;
  const double up = std::exp(log_step), down = std::exp(-log_step);
  for (double t : ts) {
    for (double tau : taus) {
      const double lhs = -(rho_hat_sq(t * up * tau) - rho_hat_sq(t * down * tau)) / (2.0 * log_step);
      const double rhs = sigma_hat_sq(t * tau);
      r.max_abs_error = std::max(r.max_abs_error, std::abs(lhs - rhs));
      r.max_reference = std::max(r.max_reference, std::abs(rhs));
    }
  }
  return r;
}

IdentityResidual dilation_telescoping_residual(const Profile& rho, int k,
                                               std::span<const double> xs, int steps) {
  if (steps < 2 || steps % 2 != 0) {
    throw std::invalid_argument("dilation_telescoping_residual: steps must be even and >= 2");
  }
  const double t1 = std::ldexp(1.0, k - 1), t2 = std::ldexp(1.0, k);
  const double a = std::log(t1), b = std::log(t2);
  const double h = (b - a) / steps;
  IdentityResidual r;
  for (double x : xs) {
    const double lhs = rho.dilated(x, t1) - rho.dilated(x, t2);
    double s = 0.0;
    for (int i = 0; i <= steps; ++i) {
      const double w = (i == 0 || i == steps) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
      s += w * rho.scale_derivative(x, std::exp(a + h * i));
    }
    s *= h / 3.0;
    r.max_abs_error = std::max(r.max_abs_error, std::abs(lhs - s));
    r.max_reference = std::max(r.max_reference, std::abs(lhs));
  }
  return r;
}

SampledField wave_packet(const SampledField& base, double shift, double exponent) {
  if (base.dim() != 1) throw std::invalid_argument("wave_packet: 1D fields only");
  if (shift == 0.0) return base;
  const auto& g = base.grid();
  const double h = g.spacing();
  if (std::abs(shift) >= 2.0 * g.half_width) {
    throw std::domain_error("wave_packet: shift " + std::to_string(shift) + " moves the support off the grid");
  }
  const double w = std::pow(1.0 + std::abs(shift), -exponent);
  SampledField out(g);
  const double cells = shift / h;
  const double rounded = std::round(cells);
  if (std::abs(cells - rounded) < 1e-9) {
    const auto s = static_cast<std::int64_t>(rounded);
    for (std::int64_t i = 0; i < g.n; ++i) {
      const std::int64_t j = i - s;
      if (j >= 0 && j < g.n) out[i] = w * base[j];
    }
  } else {
    for (std::int64_t i = 0; i < g.n; ++i) out[i] = w * sinc_interpolate(base, g.coord(i) - shift);
  }
  if (out.is_zero() && !base.is_zero()) {
    throw std::domain_error("wave_packet: shift " + std::to_string(shift) + " moves the support off the grid");
  }
  return out;
}

SampledField dilate(const Profile& f, double t, const Grid& grid) {
  if (!(t > 0.0)) throw std::invalid_argument("dilate: t must be positive");
  Grid g = grid;
  g.dim = 1;
  return SampledField::sample_1d(g, [&f, t](double x) { return f.dilated(x, t); });
}

}  // namespace ev
