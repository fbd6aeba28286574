#include "ev/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>

#include "ev/profiles.hpp"
#include "fft.hpp"

namespace ev {

namespace {

using Gauss = boost::math::quadrature::gauss<double, 10>;

double rect_distance(double u0, double u1, double v0, double v1) {
  const double du = (u0 > 0) ? u0 : (u1 < 0 ? -u1 : 0.0);
  const double dv = (v0 > 0) ? v0 : (v1 < 0 ? -v1 : 0.0);
  return std::hypot(du, dv);
}

// Sum over cells of w(i, j) * int_cell [theta]_t(p - x, q - y).
double theta_sum_at(const SampledField& W, double p, double q, double t) {
  const auto& g = W.grid();
  const double h = g.spacing();
  double s = 0.0;
  for (std::int64_t i = 0; i < g.n; ++i) {
    const double u1 = (p - g.coord(i)) / t, u0 = (p - g.coord(i) - h) / t;
    for (std::int64_t j = 0; j < g.n; ++j) {
      const double w = W.at(i, j);
      if (w == 0.0) continue;
      const double v1 = (q - g.coord(j)) / t, v0 = (q - g.coord(j) - h) / t;
      s += w * theta_rectangle_integral(u0, u1, v0, v1);
    }
  }
  return s;
}

std::vector<double> build_theta_table(const Grid& grid, double t);

}  // namespace

double theta_rectangle_integral(double u0, double u1, double v0, double v1) {
  const double target = std::max(0.5, 0.5 * rect_distance(u0, u1, v0, v1));
  const auto mu = static_cast<int>(std::ceil((u1 - u0) / target - 1e-12));
  const auto mv = static_cast<int>(std::ceil((v1 - v0) / target - 1e-12));
  const double su = (u1 - u0) / std::max(mu, 1), sv = (v1 - v0) / std::max(mv, 1);
  double total = 0.0;
  for (int a = 0; a < std::max(mu, 1); ++a) {
    const double ua = u0 + a * su;
    for (int b = 0; b < std::max(mv, 1); ++b) {
      const double vb = v0 + b * sv;
      total += Gauss::integrate(
          [&](double U) { return Gauss::integrate([&](double V) { return theta(U, V); }, vb, vb + sv); }, ua,
          ua + su);
    }
  }
  return total;
}

std::vector<double> theta_cell_table(const Grid& grid, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("theta_cell_table: t must be positive");
  // Tables depend only on (h / t, n); repeated trials on one grid reuse them.
  static std::mutex mutex;
  static std::map<std::pair<double, std::int64_t>, std::vector<double>> cache;
  const std::pair<double, std::int64_t> key{grid.spacing() / t, grid.n};
  {
    std::lock_guard lock(mutex);
    if (const auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto table = build_theta_table(grid, t);
  std::lock_guard lock(mutex);
  if (cache.size() >= 256) cache.clear();
  cache.emplace(key, table);
  return table;
}

namespace {

std::vector<double> build_theta_table(const Grid& grid, double t) {
  const auto n = grid.n;
  const double s = grid.spacing() / t;
  const std::int64_t w = 2 * n - 1;
  std::vector<double> table(static_cast<std::size_t>(w * w));
  for (std::int64_t dx = 0; dx < n; ++dx) {
    for (std::int64_t dy = 0; dy <= dx; ++dy) {
      const double v = theta_rectangle_integral((dx - 0.5) * s, (dx + 0.5) * s, (dy - 0.5) * s, (dy + 0.5) * s);
      for (std::int64_t sx : {-1, 1})
        for (std::int64_t sy : {-1, 1}) {
          table[(sx * dx + n - 1) * w + (sy * dy + n - 1)] = v;
          table[(sx * dy + n - 1) * w + (sy * dx + n - 1)] = v;
        }
    }
  }
  return table;
}

}  // namespace

namespace {

using Spectrum = std::vector<std::complex<double>>;

// Padded transform of the cell table, m x m with m >= 3n - 2.
std::shared_ptr<const Spectrum> table_spectrum(const Grid& grid, double t) {
  static std::mutex mutex;
  static std::map<std::pair<double, std::int64_t>, std::shared_ptr<const Spectrum>> cache;
  const std::pair<double, std::int64_t> key{grid.spacing() / t, grid.n};
  {
    std::lock_guard lock(mutex);
    if (const auto it = cache.find(key); it != cache.end()) return it->second;
  }
  const auto n = grid.n, w = 2 * n - 1, m = detail::next_power_of_two(3 * n - 2);
  const auto table = theta_cell_table(grid, t);
  auto spec = std::make_shared<Spectrum>(static_cast<std::size_t>(m * m));
  for (std::int64_t i = 0; i < w; ++i)
    for (std::int64_t j = 0; j < w; ++j) (*spec)[i * m + j] = table[i * w + j];
  detail::fft_2d(*spec, m, m, -1);
  std::lock_guard lock(mutex);
  if (cache.size() >= 32) cache.clear();
  cache.emplace(key, spec);
  return spec;
}

}  // namespace

SampledField theta_average(const SampledField& F, double t) {
  if (F.dim() != 2) throw std::invalid_argument("theta_average: 2D fields only");
  const auto& g = F.grid();
  const auto n = g.n, m = detail::next_power_of_two(3 * n - 2);
  const auto spec = table_spectrum(g, t);
  Spectrum a(static_cast<std::size_t>(m * m));
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = 0; j < n; ++j) a[i * m + j] = F.at(i, j) * F.at(i, j);
  detail::fft_2d(a, m, m, -1);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] *= (*spec)[i];
  detail::fft_2d(a, m, m, +1);
  const double scale = 1.0 / static_cast<double>(m * m);
  SampledField out(g);
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = 0; j < n; ++j) out.at(i, j) = std::max(0.0, a[(i + n - 1) * m + (j + n - 1)].real() * scale);
  return out;
}

SampledField theta_average(const SampledField& F, std::span<const double> table) {
  if (F.dim() != 2) throw std::invalid_argument("theta_average: 2D fields only");
  const auto& g = F.grid();
  const auto n = g.n;
  if (table.size() != static_cast<std::size_t>((2 * n - 1) * (2 * n - 1))) {
    throw std::invalid_argument("theta_average: table size mismatch");
  }
  const auto sq = F.squared();
  const auto full = linear_convolution_2d(sq.values(), n, n, table, 2 * n - 1, 2 * n - 1);
  const std::int64_t w = 3 * n - 2;
  SampledField out(g);
  for (std::int64_t a = 0; a < n; ++a)
    for (std::int64_t b = 0; b < n; ++b) out.at(a, b) = std::max(0.0, full[(a + n - 1) * w + (b + n - 1)]);
  return out;
}

double theta_average_at(const SampledField& F, double p, double q, double t) {
  if (F.dim() != 2) throw std::invalid_argument("theta_average_at: 2D fields only");
  return std::sqrt(std::max(0.0, theta_sum_at(F.squared(), p, q, t)));
}

TreeSize tree_size(const SampledField& F, std::span<const DyadicSquare> collection, int steps_per_octave,
                   int min_per_side) {
  TreeSize best;
  if (collection.empty()) {
    best.empty = true;
    return best;
  }
  std::int64_t r = 1;
  for (const auto& S : collection) {
    const double cells = S.side() / F.spacing();
    if (cells < min_per_side) r = std::max(r, static_cast<std::int64_t>(std::ceil(min_per_side / cells - 1e-9)));
  }
  if (r > 1 && is_power_of_two(r)) {
    SampledField fine(Grid{2, F.grid().half_width, F.n() * r});
    for (std::int64_t i = 0; i < fine.n(); ++i)
      for (std::int64_t j = 0; j < fine.n(); ++j) fine.at(i, j) = F.at(i / r, j / r);
    return tree_size(fine, collection, steps_per_octave, min_per_side);
  }
  const auto& g = F.grid();
  const double h = g.spacing();
  const auto samples = whitney_samples(collection, g, steps_per_octave, min_per_side);
  std::map<double, std::vector<const FormSample*>> by_t;
  for (const auto& s : samples) by_t[s.t].push_back(&s);
  auto cell_of = [&](double x, std::int64_t& idx) {
    const double c = (x + g.half_width) / h - 0.5;
    const double r = std::round(c);
    if (std::abs(c - r) > 1e-9 || r < 0 || r >= static_cast<double>(g.n)) return false;
    idx = static_cast<std::int64_t>(r);
    return true;
  };
  const auto sq = F.squared();
  bool first = true;
  for (const auto& [t, pts] : by_t) {
    SampledField avg;
    bool have = false;
    for (const auto* s : pts) {
      std::int64_t a = 0, b = 0;
      double v = 0.0;
      if (cell_of(s->p, a) && cell_of(s->q, b)) {
        if (!have) {
          avg = theta_average(F, t);
          have = true;
        }
        v = avg.at(a, b);
      } else {
        v = std::max(0.0, theta_sum_at(sq, s->p, s->q, t));
      }
      v = std::sqrt(v);
      if (first || v > best.value) {
        best = TreeSize{v, s->p, s->q, t, false};
        first = false;
      }
    }
  }
  return best;
}

TreeSize tree_size(const SampledField& F, const ConvexTree& tree, int steps_per_octave, int min_per_side) {
  std::vector<DyadicSquare> members(tree.members().begin(), tree.members().end());
  return tree_size(F, members, steps_per_octave, min_per_side);
}

namespace {

std::vector<double> summed_area(const SampledField& sq) {
  const auto n = sq.n();
  std::vector<double> s(static_cast<std::size_t>((n + 1) * (n + 1)), 0.0);
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = 0; j < n; ++j)
      s[(i + 1) * (n + 1) + (j + 1)] =
          sq.at(i, j) + s[i * (n + 1) + (j + 1)] + s[(i + 1) * (n + 1) + j] - s[i * (n + 1) + j];
  return s;
}

double block_sum(const std::vector<double>& s, std::int64_t n, std::int64_t i0, std::int64_t j0,
                 std::int64_t len) {
  const auto w = n + 1;
  return s[(i0 + len) * w + (j0 + len)] - s[i0 * w + (j0 + len)] - s[(i0 + len) * w + j0] + s[i0 * w + j0];
}

// out[c] = max of in[k] over k in [c - s + 1, c] intersected with [0, in.size()).
std::vector<double> sliding_max(const std::vector<double>& in, std::int64_t s, std::int64_t n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  std::deque<std::int64_t> dq;
  const auto m = static_cast<std::int64_t>(in.size());
  std::int64_t next = 0;
  for (std::int64_t c = 0; c < n; ++c) {
    while (next <= c && next < m) {
      while (!dq.empty() && in[dq.back()] <= in[next]) dq.pop_back();
      dq.push_back(next++);
    }
    while (!dq.empty() && dq.front() < c - s + 1) dq.pop_front();
    out[c] = in[dq.front()];
  }
  return out;
}

}  // namespace

double square_rms(const SampledField& F, std::int64_t i0, std::int64_t j0, std::int64_t s) {
  double sum = 0.0;
  for (std::int64_t i = i0; i < i0 + s; ++i)
    for (std::int64_t j = j0; j < j0 + s; ++j) sum += F.at(i, j) * F.at(i, j);
  return std::sqrt(sum / static_cast<double>(s * s));
}

MaximalField quadratic_maximal(const SampledField& F) {
  if (F.dim() != 2) throw std::invalid_argument("quadratic_maximal: 2D fields only");
  const auto n = F.n();
  const auto sat = summed_area(F.squared());
  SampledField out(F.grid());
  for (std::int64_t s = 1; s <= n; s *= 2) {
    const std::int64_t m = n - s + 1;
    const double inv = 1.0 / static_cast<double>(s * s);
    // Row pass: R(i0, b) = max over admissible j0 of avg(i0, j0).
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(m));
    for (std::int64_t i0 = 0; i0 < m; ++i0) {
      std::vector<double> avg(static_cast<std::size_t>(m));
      for (std::int64_t j0 = 0; j0 < m; ++j0) avg[j0] = std::max(0.0, block_sum(sat, n, i0, j0, s) * inv);
      rows[i0] = sliding_max(avg, s, n);
    }
    for (std::int64_t b = 0; b < n; ++b) {
      std::vector<double> col(static_cast<std::size_t>(m));
      for (std::int64_t i0 = 0; i0 < m; ++i0) col[i0] = rows[i0][b];
      const auto best = sliding_max(col, s, n);
      for (std::int64_t a = 0; a < n; ++a) out.at(a, b) = std::max(out.at(a, b), best[a]);
    }
  }
  for (double& v : out.values()) v = std::sqrt(v);
  return MaximalField{std::move(out), "grid-aligned squares of side 2^m h at every position inside the box"};
}

LevelSet level_set(const MaximalField& M, double lambda) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("level_set: lambda must be nonnegative");
  LevelSet out;
  const auto vals = M.values.values();
  for (std::size_t i = 0; i < vals.size(); ++i)
    if (vals[i] > lambda) out.cells.push_back(static_cast<std::int64_t>(i));
  out.measure = static_cast<double>(out.cells.size()) * M.values.grid().weight();
  return out;
}

DominationCheck theta_ball_domination_check(const SampledField& G, double t, int k, double p, double q) {
  if (t < std::ldexp(1.0, k - 1) || t > std::ldexp(1.0, k)) {
    throw std::invalid_argument("theta_ball_domination_check: t outside [2^{k-1}, 2^k]");
  }
  const auto& g = G.grid();
  const double h = g.spacing();
  const auto sq = G.squared();
  const double full = theta_sum_at(sq, p, q, t);
  constexpr int kSub = 32;
  double ball = 0.0;
  for (std::int64_t i = 0; i < g.n; ++i) {
    for (std::int64_t j = 0; j < g.n; ++j) {
      const double w = sq.at(i, j);
      if (w == 0.0) continue;
      const double u0 = (p - g.coord(i) - h) / t, v0 = (q - g.coord(j) - h) / t;
      const double s = h / t;
      if (rect_distance(u0, u0 + s, v0, v0 + s) > 1.0) continue;
      const double d = s / kSub;
      double part = 0.0;
      for (int a = 0; a < kSub; ++a)
        for (int b = 0; b < kSub; ++b) {
          const double U = u0 + (a + 0.5) * d, V = v0 + (b + 0.5) * d;
          if (U * U + V * V <= 1.0) part += theta(U, V);
        }
      ball += w * part * d * d;
    }
  }
  DominationCheck c;
  c.ball = ball;
  c.complement = std::max(0.0, full - ball);
  const double norm = std::ldexp(1.0, 2 * k);
  c.ratio_ball = c.ball / norm;
  c.ratio_complement = c.complement / norm;
  return c;
}

}  // namespace ev
