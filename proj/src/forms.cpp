#include "ev/forms.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace ev {

namespace {

using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr double kPi = std::numbers::pi;
constexpr double kLn2 = std::numbers::ln2;

Eigen::Map<const RowMat> as_matrix(const SampledField& f) {
  return Eigen::Map<const RowMat>(f.values().data(), f.n(), f.n());
}

double sinc(double z) {
  if (std::abs(z) < 1e-12) return 1.0;
  return std::sin(kPi * z) / (kPi * z);
}

}  // namespace

void EntangledQuadruple::validate() const {
  for (const auto* f : {&F1, &F2, &F3, &F4}) {
    if (f->dim() != 2) throw std::invalid_argument("EntangledQuadruple: fields must be 2D");
    if (!(f->grid() == F1.grid())) throw std::invalid_argument("EntangledQuadruple: grid mismatch");
  }
}

KernelQuad same_pair(const Profile& a, const Profile& b) { return KernelQuad{a, b, a, b}; }

KernelQuad packet_quad(const Profile& phi, const Profile& psi, double u, double v) {
  return KernelQuad{phi.packet(u, 25.0), psi.packet(v, 10.0), phi.packet(-u, 25.0),
                    psi.packet(-v, 10.0)};
}

std::vector<double> cell_weights(const Profile& f, const Grid& grid, double p, double t) {
  const double h = grid.spacing();
  std::vector<double> w(static_cast<std::size_t>(grid.n));
  double upper = f.antiderivative((p - grid.coord(0)) / t);
  for (std::int64_t i = 0; i < grid.n; ++i) {
    const double lower = f.antiderivative((p - grid.coord(i) - h) / t);
    w[i] = upper - lower;
    upper = lower;
  }
  return w;
}

namespace {

// R = (F1^T W1 F4) o (F2^T W3 F3), indexed (y, y').
Mat entangled_core(const EntangledQuadruple& Q, const std::vector<double>& w1,
                   const std::vector<double>& w3) {
  const auto n = Q.grid().n;
  Eigen::Map<const Eigen::VectorXd> v1(w1.data(), n), v3(w3.data(), n);
  const auto F1 = as_matrix(Q.F1), F2 = as_matrix(Q.F2), F3 = as_matrix(Q.F3), F4 = as_matrix(Q.F4);
  const Mat P = F1.transpose() * v1.asDiagonal() * F4;
  const Mat R = F2.transpose() * v3.asDiagonal() * F3;
  return P.cwiseProduct(R);
}

double quadratic(const Mat& R, const std::vector<double>& w2, const std::vector<double>& w4) {
  const auto n = R.rows();
  Eigen::Map<const Eigen::VectorXd> v2(w2.data(), n), v4(w4.data(), n);
  return v2.dot(R * v4);
}

}  // namespace

double pointwise_form(const EntangledQuadruple& Q, const KernelQuad& K, double p, double q, double t) {
  Q.validate();
  if (!(t > 0.0)) throw std::invalid_argument("pointwise_form: t must be positive");
  const auto& g = Q.grid();
  const Mat R = entangled_core(Q, cell_weights(K.k1, g, p, t), cell_weights(K.k3, g, p, t));
  return quadratic(R, cell_weights(K.k2, g, q, t), cell_weights(K.k4, g, q, t));
}

std::vector<double> sample_values(const EntangledQuadruple& Q, const KernelQuad& K,
                                  std::span<const FormSample> samples) {
  Q.validate();
  const auto& g = Q.grid();
  std::map<std::pair<double, double>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (!(s.t > 0.0)) throw std::invalid_argument("sample_values: t must be positive");
    groups[{s.t, s.p}].push_back(i);
  }
  std::vector<double> out(samples.size(), 0.0);
  for (const auto& [key, idx] : groups) {
    const auto [t, p] = key;
    const Mat R = entangled_core(Q, cell_weights(K.k1, g, p, t), cell_weights(K.k3, g, p, t));
    for (std::size_t i : idx) {
      const double q = samples[i].q;
      out[i] = quadratic(R, cell_weights(K.k2, g, q, t), cell_weights(K.k4, g, q, t));
    }
  }
  return out;
}

double sum_over_samples(const EntangledQuadruple& Q, const KernelQuad& K,
                        std::span<const FormSample> samples, Integrand mode,
                        const std::function<double(double)>& mu) {
  const auto values = sample_values(Q, K, samples);
  double total = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double v = values[i];
    total += samples[i].weight * (mode == Integrand::absolute_value ? std::abs(v) : (mu ? mu(samples[i].t) : 1.0) * v);
  }
  return total;
}

std::vector<FormSample> whitney_samples(std::span<const DyadicSquare> collection, const Grid& grid,
                                        int steps_per_octave, int min_per_side) {
  if (steps_per_octave < 1) throw std::invalid_argument("whitney_samples: steps_per_octave < 1");
  if (min_per_side < 1) throw std::invalid_argument("whitney_samples: min_per_side < 1");
  const double h = grid.spacing();
  std::vector<FormSample> out;
  for (const auto& s : collection) {
    const double side = s.side();
    const auto m = static_cast<std::int64_t>(std::max<double>(min_per_side, std::floor(side / h + 1e-9)));
    const double sub = side / static_cast<double>(m);
    const double x0 = side * static_cast<double>(s.mx), y0 = side * static_cast<double>(s.my);
    for (int k = 0; k < steps_per_octave; ++k) {
      const double t = std::exp2(static_cast<double>(s.k) - 1.0 + (k + 0.5) / steps_per_octave);
      const double w = sub * sub * kLn2 / steps_per_octave;
      for (std::int64_t a = 0; a < m; ++a)
        for (std::int64_t b = 0; b < m; ++b)
          out.push_back({x0 + (a + 0.5) * sub, y0 + (b + 0.5) * sub, t, w});
    }
  }
  return out;
}

FormEvaluation local_form(const EntangledQuadruple& Q, std::span<const DyadicSquare> collection,
                          const KernelQuad& K, const FormConfig& config) {
  FormEvaluation e;
  if (collection.empty()) {
    e.empty = true;
    e.flags.push_back("empty collection");
    return e;
  }
  const auto samples = whitney_samples(collection, Q.grid(), config.steps_per_octave, config.min_points_per_side);
  e.value = sum_over_samples(Q, K, samples, Integrand::signed_value);
  e.pq_samples = static_cast<std::int64_t>(samples.size()) / config.steps_per_octave;
  e.t_samples = config.steps_per_octave;
  return e;
}

FormEvaluation sublinear_local_form(const EntangledQuadruple& Q, const ConvexTree& tree,
                                    const Profile& phi, const Profile& psi, double u, double v,
                                    const FormConfig& config) {
  std::vector<DyadicSquare> members(tree.members().begin(), tree.members().end());
  const auto samples = whitney_samples(members, Q.grid(), config.steps_per_octave, config.min_points_per_side);
  FormEvaluation e;
  e.value = sum_over_samples(Q, packet_quad(phi, psi, u, v), samples, Integrand::absolute_value);
  e.pq_samples = static_cast<std::int64_t>(samples.size()) / config.steps_per_octave;
  e.t_samples = config.steps_per_octave;
  return e;
}

// --- Box averages ---------------------------------------------------------

double box_average(const EntangledQuadruple& Q, double p, double q, double t) {
  const auto vt = vartheta_profile();
  return pointwise_form(Q, KernelQuad{vt, vt, vt, vt}, p, q, t);
}

double box_average_bruteforce(const EntangledQuadruple& Q, double p, double q, double t) {
  Q.validate();
  const auto& g = Q.grid();
  const auto vt = vartheta_profile();
  const auto wx = cell_weights(vt, g, p, t), wy = cell_weights(vt, g, q, t);
  const auto n = g.n;
  double s = 0.0;
  for (std::int64_t x = 0; x < n; ++x)
    for (std::int64_t y = 0; y < n; ++y)
      for (std::int64_t x2 = 0; x2 < n; ++x2)
        for (std::int64_t y2 = 0; y2 < n; ++y2)
          s += Q.F1.at(x, y) * Q.F2.at(x2, y) * Q.F3.at(x2, y2) * Q.F4.at(x, y2) * wx[x] * wy[y] *
               wx[x2] * wy[y2];
  return s;
}

CauchySchwarzCheck box_cauchy_schwarz_check(const EntangledQuadruple& Q, double p, double q, double t,
                                            double slack) {
  CauchySchwarzCheck c;
  c.a = box_average(Q, p, q, t);
  const double a1 = box_average({Q.F1, Q.F2, Q.F2, Q.F1}, p, q, t);
  const double a2 = box_average({Q.F4, Q.F3, Q.F3, Q.F4}, p, q, t);
  c.first_rhs = std::sqrt(std::max(a1, 0.0)) * std::sqrt(std::max(a2, 0.0));
  const auto vt = vartheta_profile();
  const auto& g = Q.grid();
  const auto wx = cell_weights(vt, g, p, t), wy = cell_weights(vt, g, q, t);
  c.chain_rhs = 1.0;
  for (const auto* f : {&Q.F1, &Q.F2, &Q.F3, &Q.F4}) {
    double s = 0.0;
    for (std::int64_t i = 0; i < g.n; ++i)
      for (std::int64_t j = 0; j < g.n; ++j) s += wx[i] * wy[j] * f->at(i, j) * f->at(i, j);
    c.chain_rhs *= std::sqrt(s);
  }
  c.first_ok = c.a <= c.first_rhs + slack;
  c.chain_ok = c.first_rhs <= c.chain_rhs + slack && c.a <= c.chain_rhs + slack;
  return c;
}

// --- Truncated form -------------------------------------------------------

std::vector<double> TruncationConfig::t_samples() const {
  if (hi <= lo || steps_per_octave < 1) throw std::invalid_argument("TruncationConfig: empty range");
  std::vector<double> ts;
  for (int o = lo; o < hi; ++o)
    for (int s = 0; s < steps_per_octave; ++s)
      ts.push_back(std::exp2(o + (s + 0.5) / steps_per_octave));
  return ts;
}

double TruncationConfig::weight() const { return kLn2 / steps_per_octave; }

std::size_t TruncationConfig::size() const {
  return static_cast<std::size_t>((hi - lo) * steps_per_octave);
}

void CoefficientSequence::validate(const TruncationConfig& config) const {
  if (mu.size() != config.size()) {
    throw std::invalid_argument("CoefficientSequence: " + std::to_string(mu.size()) +
                                " samples for " + std::to_string(config.size()) + " t-samples");
  }
  for (double m : mu)
    if (!(std::abs(m) <= 1.0)) throw std::invalid_argument("CoefficientSequence: |mu| > 1");
}

CoefficientSequence CoefficientSequence::constant(const TruncationConfig& config, double value) {
  return CoefficientSequence{std::vector<double>(config.size(), value)};
}

namespace {

// W(d) = int C_f(s) C_g(s - d h) ds for d in [-(n-1), n-1], where
// C_f(s) = A_f(s/t) - A_f((s-h)/t) is the cell integral of [f]_t.
std::vector<double> cell_correlation(const Profile& f, const Profile& g, double h, std::int64_t n,
                                     double t) {
  const auto r = static_cast<std::int64_t>(std::max(8.0, std::ceil(8.0 * h / t)));
  const double delta = h / static_cast<double>(r);
  auto cell = [h, t](const Profile& k, double s) {
    return k.antiderivative(s / t) - k.antiderivative((s - h) / t);
  };
  const double rf = f.space_radius() * t;
  const auto mlo = static_cast<std::int64_t>(std::floor(-rf / delta)) - 1;
  const auto mhi = static_cast<std::int64_t>(std::ceil((rf + h) / delta)) + 1;
  std::vector<double> cf(static_cast<std::size_t>(mhi - mlo + 1));
  for (std::int64_t m = mlo; m <= mhi; ++m) cf[m - mlo] = cell(f, m * delta);
  const std::int64_t glo = mlo - (n - 1) * r, ghi = mhi + (n - 1) * r;
  std::vector<double> cg(static_cast<std::size_t>(ghi - glo + 1));
  for (std::int64_t m = glo; m <= ghi; ++m) cg[m - glo] = cell(g, m * delta);
  std::vector<double> w(static_cast<std::size_t>(2 * n - 1));
  for (std::int64_t d = -(n - 1); d <= n - 1; ++d) {
    double s = 0.0;
    for (std::int64_t m = mlo; m <= mhi; ++m) s += cf[m - mlo] * cg[m - d * r - glo];
    w[d + n - 1] = s * delta;
  }
  return w;
}

Mat toeplitz(const std::vector<double>& w, std::int64_t n) {
  Mat m(n, n);
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = 0; j < n; ++j) m(i, j) = w[j - i + n - 1];
  return m;
}

void flag_octaves(const TruncationConfig& config, double h, FormEvaluation& e) {
  for (int o = config.lo; o < config.hi; ++o) {
    if (std::exp2(o + 1) < h) {
      e.flags.push_back("octave [2^" + std::to_string(o) + ", 2^" + std::to_string(o + 1) +
                        "] below grid spacing");
    }
  }
}

}  // namespace

FormEvaluation truncated_form(const EntangledQuadruple& Q, const KernelQuad& K,
                              const CoefficientSequence& mu, const TruncationConfig& config) {
  Q.validate();
  mu.validate(config);
  const auto& g = Q.grid();
  const auto n = g.n;
  const double h = g.spacing();
  const auto F1 = as_matrix(Q.F1), F2 = as_matrix(Q.F2), F3 = as_matrix(Q.F3), F4 = as_matrix(Q.F4);
  FormEvaluation e;
  flag_octaves(config, h, e);
  const auto ts = config.t_samples();
  e.t_samples = static_cast<std::int64_t>(ts.size());
  double total = 0.0;
  for (std::size_t it = 0; it < ts.size(); ++it) {
    if (mu.mu[it] == 0.0) continue;
    const double t = ts[it];
    const Mat wx = toeplitz(cell_correlation(K.k1, K.k3, h, n, t), n);
    const Mat wy = toeplitz(cell_correlation(K.k2, K.k4, h, n, t), n);
    // S(j, j') = sum_{i,i'} F1(i,j) F4(i,j') Wx(i,i') F2(i',j) F3(i',j').
    Mat S(n, n);
    for (std::int64_t j = 0; j < n; ++j) {
      const Mat G = F1.col(j).asDiagonal() * F4;
      const Mat H = F2.col(j).asDiagonal() * F3;
      S.row(j) = G.cwiseProduct(wx * H).colwise().sum();
    }
    total += mu.mu[it] * config.weight() * S.cwiseProduct(wy).sum();
  }
  e.value = total;
  return e;
}

FormEvaluation frequency_side_form(const EntangledQuadruple& Q, const KernelQuad& K,
                                   const CoefficientSequence& mu, const TruncationConfig& config) {
  Q.validate();
  mu.validate(config);
  const auto& g = Q.grid();
  const auto n = g.n;
  if (n > 64) throw std::invalid_argument("frequency_side_form: n = " + std::to_string(n) + " exceeds 64");
  const double h = g.spacing(), L = g.half_width;
  const auto F1 = as_matrix(Q.F1), F2 = as_matrix(Q.F2), F3 = as_matrix(Q.F3), F4 = as_matrix(Q.F4);
  FormEvaluation e;
  flag_octaves(config, h, e);
  const auto ts = config.t_samples();
  e.t_samples = static_cast<std::int64_t>(ts.size());

  // Trapezoid grid for m(xi) = a^(t xi) b^(-t xi) h^2 sinc^2(h xi).
  auto grid_for = [&](const Profile& a, const Profile& b, double t) {
    const double radius = std::min(a.freq_radius(), b.freq_radius()) / t;
    const double span = 2.0 * L + t * (a.space_radius() + b.space_radius()) + h;
    const double step = 1.0 / (2.0 * span);
    const auto kmax = static_cast<std::int64_t>(std::ceil(radius / step));
    return std::pair{step, kmax};
  };
  auto multiplier = [h](const Profile& a, const Profile& b, double t, double xi) {
    const double s = sinc(h * xi);
    return a.fourier(t * xi) * b.fourier(-t * xi) * (h * h * s * s);
  };

  std::complex<double> total = 0.0;
  double scale = 0.0;
  for (std::size_t it = 0; it < ts.size(); ++it) {
    if (mu.mu[it] == 0.0) continue;
    const double t = ts[it];
    // X(j, j') = int m1(xi) a_{jj'}(xi) b_{jj'}(xi) dxi.
    CMat X = CMat::Zero(n, n);
    const auto [dxi, kx] = grid_for(K.k1, K.k3, t);
    const CMat c1 = F1.cast<std::complex<double>>(), c2 = F2.cast<std::complex<double>>();
    const CMat c3 = F3.cast<std::complex<double>>(), c4 = F4.cast<std::complex<double>>();
    Eigen::VectorXcd ph(n);
    for (std::int64_t k = -kx; k <= kx; ++k) {
      const double xi = static_cast<double>(k) * dxi;
      const auto m = multiplier(K.k1, K.k3, t, xi);
      if (m == 0.0) continue;
      for (std::int64_t i = 0; i < n; ++i) ph[i] = std::polar(1.0, -2.0 * kPi * g.coord(i) * xi);
      const CMat A = c1.transpose() * ph.asDiagonal() * c4;
      const CMat B = c2.transpose() * ph.conjugate().asDiagonal() * c3;
      X += (m * dxi) * A.cwiseProduct(B);
    }
    // Group by d = j - j' and transform in y - y'.
    std::vector<std::complex<double>> xd(static_cast<std::size_t>(2 * n - 1), 0.0);
    for (std::int64_t j = 0; j < n; ++j)
      for (std::int64_t j2 = 0; j2 < n; ++j2) xd[j - j2 + n - 1] += X(j, j2);
    const auto [deta, ky] = grid_for(K.k2, K.k4, t);
    std::complex<double> y = 0.0;
    for (std::int64_t k = -ky; k <= ky; ++k) {
      const double eta = static_cast<double>(k) * deta;
      const auto m = multiplier(K.k2, K.k4, t, eta);
      if (m == 0.0) continue;
      std::complex<double> s = 0.0;
      for (std::int64_t d = -(n - 1); d <= n - 1; ++d)
        s += xd[d + n - 1] * std::polar(1.0, -2.0 * kPi * static_cast<double>(d) * h * eta);
      y += m * deta * s;
    }
    total += mu.mu[it] * config.weight() * y;
    scale += std::abs(config.weight() * y);
  }
  e.value = total.real();
  e.imag_residual = scale > 0.0 ? std::abs(total.imag()) / scale : std::abs(total.imag());
  return e;
}

}  // namespace ev
