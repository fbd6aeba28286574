#pragma once

// One-dimensional profiles (kernels, Gaussians, the square-function pair and
// wave packets) with analytic or tabulated values, derivatives,
// antiderivatives and Fourier transforms.
//
// Fourier convention: f^(xi) = int f(x) e^{-2 pi i x xi} dx.

#include <complex>
#include <functional>
#include <span>
#include <string>

#include "ev/field.hpp"

namespace ev {

class Profile {
 public:
  using RealFn = std::function<double(double)>;
  using FourierFn = std::function<std::complex<double>(double)>;

  Profile(std::string name, RealFn value, RealFn derivative, RealFn antiderivative,
          FourierFn fourier, double space_radius, double freq_radius);

  double operator()(double x) const { return value_(x); }
  double derivative(double x) const { return derivative_(x); }
  /// int_{-inf}^x f.
  double antiderivative(double x) const { return antiderivative_(x); }
  bool has_fourier() const { return static_cast<bool>(fourier_); }
  std::complex<double> fourier(double xi) const;

  /// |f| is below double resolution of its peak outside [-space_radius, space_radius].
  double space_radius() const { return space_radius_; }
  /// Same for the Fourier transform.
  double freq_radius() const { return freq_radius_; }
  const std::string& name() const { return name_; }

  /// [f]_t(x) = t^{-1} f(x / t).
  double dilated(double x, double t) const { return value_(x / t) / t; }
  /// -t d/dt [f]_t(x) = t^{-1} f(x/t) + t^{-1} (x/t) f'(x/t).
  double scale_derivative(double x, double t) const;

  /// Wave packet (1 + |shift|)^{-exponent} f(x - shift).
  Profile packet(double shift, double exponent) const;
  Profile scaled(double c) const;

 private:
  std::string name_;
  RealFn value_;
  RealFn derivative_;
  RealFn antiderivative_;
  FourierFn fourier_;
  double space_radius_;
  double freq_radius_;
};

// --- Kernels --------------------------------------------------------------

/// theta(x, y) = (1 + |(x, y)|^4)^{-1}.
double theta(double x, double y);
/// vartheta(x) = (1 + |x|)^{-4}.
double vartheta(double x);

Profile vartheta_profile();
/// Pointwise square (1 + |x|)^{-8}.
Profile vartheta_squared_profile();

struct Kernels {
  SampledField theta;     // 2D
  SampledField vartheta;  // 1D
};

/// Samples theta and vartheta on [-L, L)^dim; throws if n is not a power of two.
Kernels make_kernels(double half_width, std::int64_t n);

// --- Admissible pairs ------------------------------------------------------

/// g_alpha(x) = (sqrt(pi) alpha)^{-1} e^{-(x/alpha)^2}.
Profile gaussian(double alpha);
/// h_alpha = alpha g_alpha'.
Profile gaussian_derivative(double alpha);

enum class PairKind { gaussian, square_function };

struct AdmissiblePair {
  Profile rho;
  Profile sigma;
  PairKind kind;
  double alpha = 0.0;
};

/// (g_alpha, h_alpha); throws std::invalid_argument for alpha <= 0.
AdmissiblePair gaussian_pair(double alpha);

/// psi^(tau) = exp(-1 / ((|tau| - 1)(2 - |tau|))) on 1 < |tau| < 2, else 0.
double psi_hat(double tau);
/// int_xi^inf |psi^(tau)|^2 dtau / tau by direct quadrature over the two
/// support pieces intersected with [xi, inf).
double tail_integral_direct(double xi);
/// phi^(xi)^2 = int_{max(|xi|,1)}^2 |psi^|^2 dtau / tau, the even form of the tail.
double phi_hat_squared(double xi);
double phi_hat(double xi);

/// (phi, psi) with phi^ the square-root tail of |psi^|^2. Spatial values are
/// tabulated once from the Fourier side and shared by all copies.
AdmissiblePair make_square_function_pair();

/// Phi(x) = int_1^inf alpha^{-21} e^{-(x/alpha)^2} d alpha. Throws
/// std::runtime_error if the adaptive quadrature does not converge.
double phi_superposition(double x);

// --- Seminorms and identity residuals -------------------------------------

/// sup (1+|x|)^8 |f| + (1+|x|)^9 |f'| with centred differences for f'.
double schwartz_seminorm(const SampledField& f);
/// Same seminorm from analytic values on a fine sample of [-R, R].
double schwartz_seminorm(const Profile& f);

/// Trapezoid-rule Fourier transform of the spatial profile values.
std::complex<double> numeric_fourier(const Profile& f, double xi);
/// Transform of x f(x) multiplied by -2 pi i, i.e. the xi-derivative of f^.
std::complex<double> numeric_fourier_derivative(const Profile& f, double xi);

struct IdentityResidual {
  double max_abs_error = 0.0;
  double max_reference = 0.0;
  double relative() const { return max_reference > 0.0 ? max_abs_error / max_reference : max_abs_error; }
};

/// Checks -t d_t |rho^(t tau)|^2 = |sigma^(t tau)|^2 using numeric Fourier
/// transforms of the spatial profiles and the analytic t-derivative
/// -2 t tau Re(conj(rho^) rho^').
IdentityResidual fourier_pair_residual_numeric(const AdmissiblePair& pair,
                                               std::span<const double> ts,
                                               std::span<const double> taus);

/// Same identity with the t-derivative taken by centred finite differences in
/// log t of rho_hat_sq and compared with sigma_hat_sq.
IdentityResidual fourier_pair_residual_fd(const std::function<double(double)>& rho_hat_sq,
                                          const std::function<double(double)>& sigma_hat_sq,
                                          std::span<const double> ts,
                                          std::span<const double> taus, double log_step = 1e-4);

/// [rho]_{2^{k-1}}(x) - [rho]_{2^k}(x) against composite Simpson quadrature of
/// int -t d_t [rho]_t(x) dt/t over `steps` log-uniform steps.
IdentityResidual dilation_telescoping_residual(const Profile& rho, int k,
                                               std::span<const double> xs, int steps = 64);

/// Sampled wave packet (1+|shift|)^{-exponent} base(x - shift). Throws
/// std::domain_error when the shift moves the support fully off the grid.
SampledField wave_packet(const SampledField& base, double shift, double exponent);

/// Samples [f]_t on the grid from the analytic profile.
SampledField dilate(const Profile& f, double t, const Grid& grid);

}  // namespace ev
