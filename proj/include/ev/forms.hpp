#pragma once

// Entangled four-linear forms on 2D sampled fields.
//
// Fields are piecewise constant on grid cells. Kernels enter through exact
// cell integrals of their dilates, so the four-fold products reduce to finite
// sums. Kernel slots (k1, k2, k3, k4) act on (x, y, x', y') of
// F1(x,y) F2(x',y) F3(x',y') F4(x,y').

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ev/dyadic.hpp"
#include "ev/field.hpp"
#include "ev/profiles.hpp"

namespace ev {

struct EntangledQuadruple {
  SampledField F1, F2, F3, F4;

  /// Throws std::invalid_argument unless all four are 2D on one grid.
  void validate() const;
  const Grid& grid() const { return F1.grid(); }
};

struct KernelQuad {
  Profile k1, k2, k3, k4;
};

/// (a, b, a, b).
KernelQuad same_pair(const Profile& a, const Profile& b);
/// (phi^(u), psi^(v), phi^(-u), psi^(-v)) with weight exponents 25 and 10.
KernelQuad packet_quad(const Profile& phi, const Profile& psi, double u, double v);

/// Cell integrals of [f]_t(p - x) over the n cells of the grid axis.
std::vector<double> cell_weights(const Profile& f, const Grid& grid, double p, double t);

struct FormEvaluation {
  double value = 0.0;
  double imag_residual = 0.0;
  std::int64_t t_samples = 0;
  std::int64_t pq_samples = 0;
  bool empty = false;
  std::vector<std::string> flags;
};

/// One (p, q, t) sample with its quadrature weight (area times dt/t weight).
struct FormSample {
  double p = 0.0;
  double q = 0.0;
  double t = 1.0;
  double weight = 0.0;
};

enum class Integrand { signed_value, absolute_value };

/// boldF * [k1 x k2 x k3 x k4]_t (p, q, p, q) at a single point.
double pointwise_form(const EntangledQuadruple& Q, const KernelQuad& K, double p, double q, double t);

/// Weighted sum of the pointwise form over samples, optionally multiplied by
/// mu(t) or taken in absolute value. Samples sharing (t, p) share work.
double sum_over_samples(const EntangledQuadruple& Q, const KernelQuad& K,
                        std::span<const FormSample> samples, Integrand mode,
                        const std::function<double(double)>& mu = nullptr);

/// Pointwise form at every sample, in input order (weights ignored).
std::vector<double> sample_values(const EntangledQuadruple& Q, const KernelQuad& K,
                                  std::span<const FormSample> samples);

/// Sample points of the Whitney region of a collection: cell-centred (p, q)
/// points inside each square (one point per cell, or the square centre with
/// sub-cell squares) times `steps_per_octave` log-midpoint t samples in
/// [l(S)/2, l(S)]. At least `min_per_side` points per side in each square.
std::vector<FormSample> whitney_samples(std::span<const DyadicSquare> collection, const Grid& grid,
                                        int steps_per_octave, int min_per_side = 1);

struct FormConfig {
  int steps_per_octave = 4;
  int min_points_per_side = 1;
};

/// Theta^C with kernels K.
FormEvaluation local_form(const EntangledQuadruple& Q, std::span<const DyadicSquare> collection,
                          const KernelQuad& K, const FormConfig& config = {});

/// Theta-tilde: the absolute value inside the integral, with packet kernels.
FormEvaluation sublinear_local_form(const EntangledQuadruple& Q, const ConvexTree& tree,
                                    const Profile& phi, const Profile& psi, double u, double v,
                                    const FormConfig& config = {});

/// Gowers box average A^{(p,q,t)} with vartheta in all four slots.
double box_average(const EntangledQuadruple& Q, double p, double q, double t);

/// Literal quadruple sum over all cells; O(n^4). Reference for box_average.
double box_average_bruteforce(const EntangledQuadruple& Q, double p, double q, double t);

struct CauchySchwarzCheck {
  double a = 0.0;           // A(F1,F2,F3,F4)
  double first_rhs = 0.0;   // A(F1,F2,F2,F1)^{1/2} A(F4,F3,F3,F4)^{1/2}
  double chain_rhs = 0.0;   // prod_j (F_j^2 * [vartheta x vartheta]_t)^{1/2}
  bool first_ok = false;
  bool chain_ok = false;
};

CauchySchwarzCheck box_cauchy_schwarz_check(const EntangledQuadruple& Q, double p, double q, double t,
                                            double slack = 1e-9);

/// Octave range [2^lo, 2^hi] with log-midpoint samples.
struct TruncationConfig {
  int lo = -2;
  int hi = 2;
  int steps_per_octave = 4;

  static TruncationConfig symmetric(int N, int steps_per_octave = 4) { return {-N, N, steps_per_octave}; }
  std::vector<double> t_samples() const;
  /// dt/t weight of one sample.
  double weight() const;
  std::size_t size() const;
};

struct CoefficientSequence {
  std::vector<double> mu;

  /// Throws std::invalid_argument if some |mu| > 1 or the size does not match.
  void validate(const TruncationConfig& config) const;
  static CoefficientSequence constant(const TruncationConfig& config, double value);
};

/// Lambda^N over the whole plane in (p, q): the p and q integrals of products
/// of cell weights are done first on a fine lattice, then the cell sums.
FormEvaluation truncated_form(const EntangledQuadruple& Q, const KernelQuad& K,
                              const CoefficientSequence& mu, const TruncationConfig& config);

/// Same quantity by Fourier transforms in x, x' per (y, y') pair and in
/// y - y', integrated in frequency by the trapezoid rule. Throws for n > 64.
FormEvaluation frequency_side_form(const EntangledQuadruple& Q, const KernelQuad& K,
                                   const CoefficientSequence& mu, const TruncationConfig& config);

}  // namespace ev
