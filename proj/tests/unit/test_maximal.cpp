#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ev/maximal.hpp"
#include "helpers.hpp"

using namespace ev;
using ev::test::random_field;

namespace {
constexpr double kThetaMass = std::numbers::pi * std::numbers::pi / 2.0;
}

TEST_CASE("theta integrals") {
  // Tail outside [-R, R]^2 is below pi / R^2.
  const double R = 200.0;
  const double total = theta_rectangle_integral(-R, R, -R, R);
  CHECK(total <= kThetaMass);
  CHECK(total >= kThetaMass - std::numbers::pi / (R * R));
  // Quarter-plane symmetry.
  CHECK(theta_rectangle_integral(0, 3, 0, 3) * 4 == doctest::Approx(theta_rectangle_integral(-3, 3, -3, 3)).epsilon(1e-13));

  const Grid g{2, 2.0, 8};
  const double t = 0.7;
  const auto table = theta_cell_table(g, t);
  const double s = g.spacing() / t;
  const std::int64_t w = 2 * g.n - 1;
  for (std::int64_t dx : {-7, -2, 0, 3}) {
    for (std::int64_t dy : {-5, 0, 1, 7}) {
      const double direct = theta_rectangle_integral((dx - 0.5) * s, (dx + 0.5) * s, (dy - 0.5) * s, (dy + 0.5) * s);
      CHECK(table[(dx + g.n - 1) * w + (dy + g.n - 1)] == doctest::Approx(direct).epsilon(1e-14));
    }
  }
}

TEST_CASE("theta average by FFT against direct sums") {
  const Grid g{2, 2.0, 16};
  Rng rng(12);
  const auto F = random_field(g, rng, -1.0, 1.0, -1.5, 1.0);
  const double t = 0.6;
  const auto avg = theta_average(F, t);
  for (std::int64_t a : {0, 5, 15})
    for (std::int64_t b : {2, 9}) {
      const double direct = theta_average_at(F, g.cell_center(a), g.cell_center(b), t);
      CHECK(std::sqrt(avg.at(a, b)) == doctest::Approx(direct).epsilon(1e-11));
    }
}

TEST_CASE("tree size") {
  const Grid g{2, 16.0, 64};
  const std::vector<DyadicSquare> c{{-1, 0, 0}};
  CHECK(tree_size(SampledField(g), c).value == 0.0);
  CHECK(tree_size(SampledField(g), std::vector<DyadicSquare>{}).empty);
  const double cval = 1.7;
  const auto F = SampledField::sample_2d(g, [cval](double, double) { return cval; });
  CHECK(tree_size(F, c).value == doctest::Approx(cval * std::sqrt(kThetaMass)).epsilon(1e-2));

  const Grid small{2, 2.0, 16};
  Rng rng(3);
  const auto G = random_field(small, rng, 0.0, 1.0, -1.0, 0.5);
  const std::vector<DyadicSquare> c1{{-1, -1, 0}};
  const std::vector<DyadicSquare> c2{{-1, -1, 0}, {-2, 1, 1}, {0, 0, -1}};
  CHECK(tree_size(G, c1).value <= tree_size(G, c2).value);
  // Sub-cell squares are sampled at their centres.
  const std::vector<DyadicSquare> tiny{{-4, 1, 1}};
  const auto ts = tree_size(G, tiny);
  CHECK(ts.value == doctest::Approx(theta_average_at(G, ts.p, ts.q, ts.t)).epsilon(1e-12));
}

TEST_CASE("quadratic maximal function") {
  const Grid g{2, 4.0, 16};
  SampledField E(g);
  for (std::int64_t i = 4; i < 8; ++i)
    for (std::int64_t j = 6; j < 10; ++j) E.at(i, j) = 1.0;
  const auto M = quadratic_maximal(E);
  CHECK(M.values.at(5, 7) == doctest::Approx(1.0));
  CHECK(M.values.at(0, 0) > 0.0);

  Rng rng(21);
  const auto F = random_field(g, rng, -1.0, 1.0, -3.0, 2.0);
  const auto MF = quadratic_maximal(F);
  const auto M3 = quadratic_maximal(-3.0 * F);
  for (std::int64_t i = 0; i < g.size(); ++i) CHECK(M3.values[i] == doctest::Approx(3.0 * MF.values[i]).epsilon(1e-12));

  // Exhaustive domination of every family square average.
  bool dominated = true;
  bool attained = true;
  for (std::int64_t s = 1; s <= g.n; s *= 2)
    for (std::int64_t i0 = 0; i0 + s <= g.n; ++i0)
      for (std::int64_t j0 = 0; j0 + s <= g.n; ++j0) {
        const double r = square_rms(F, i0, j0, s);
        for (std::int64_t a = i0; a < i0 + s; ++a)
          for (std::int64_t b = j0; b < j0 + s; ++b) dominated = dominated && MF.values.at(a, b) >= r - 1e-12;
      }
  for (std::int64_t a = 0; a < g.n; ++a)
    for (std::int64_t b = 0; b < g.n; ++b) {
      double best = 0.0;
      for (std::int64_t s = 1; s <= g.n; s *= 2)
        for (std::int64_t i0 = std::max<std::int64_t>(0, a - s + 1); i0 <= std::min(a, g.n - s); ++i0)
          for (std::int64_t j0 = std::max<std::int64_t>(0, b - s + 1); j0 <= std::min(b, g.n - s); ++j0)
            best = std::max(best, square_rms(F, i0, j0, s));
      attained = attained && std::abs(best - MF.values.at(a, b)) < 1e-12;
    }
  CHECK(dominated);
  CHECK(attained);

  // Rescaling the box leaves the maximal field unchanged.
  const Grid half{2, 2.0, 16};
  const SampledField Fa(half, std::vector<double>(F.values().begin(), F.values().end()));
  const auto Ma = quadratic_maximal(Fa);
  for (std::int64_t i = 0; i < g.size(); ++i) CHECK(std::abs(Ma.values[i] - MF.values[i]) <= 1e-12);
}

TEST_CASE("level sets") {
  const Grid g{2, 4.0, 16};
  Rng rng(8);
  const auto F = random_field(g, rng, 0.0, 2.0, -2.0, 2.0);
  const auto M = quadratic_maximal(F);
  CHECK(level_set(M, M.values.max_abs() + 1.0).cells.empty());
  std::size_t positive = 0;
  for (double v : M.values.values()) positive += v > 0.0;
  CHECK(level_set(M, 0.0).cells.size() == positive);
  double prev = level_set(M, 0.0).measure;
  for (double lam = 0.1; lam < 3.0; lam += 0.1) {
    const double m = level_set(M, lam).measure;
    CHECK(m <= prev);
    prev = m;
  }
  CHECK_THROWS_AS(level_set(M, -1.0), std::invalid_argument);
}

TEST_CASE("theta ball domination") {
  const Grid g{2, 32.0, 64};
  const int k = 1;
  const double t = 1.5;
  const auto zero = theta_ball_domination_check(SampledField(g), t, k, 0.25, 0.25);
  CHECK(zero.ball == 0.0);
  CHECK(zero.complement == 0.0);
  const auto G = SampledField::sample_2d(g, [k](double, double) { return std::ldexp(1.0, k); });
  const auto c = theta_ball_domination_check(G, t, k, 0.25, 0.25);
  CHECK(c.ratio_ball + c.ratio_complement == doctest::Approx(kThetaMass).epsilon(0.05));
  CHECK(c.ratio_ball > 0.0);
  CHECK(c.ratio_complement > 0.0);
  CHECK_THROWS_AS(theta_ball_domination_check(G, 3.0, k, 0.0, 0.0), std::invalid_argument);
}
