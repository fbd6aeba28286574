#include <doctest.h>

#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ev/forms.hpp"
#include "helpers.hpp"

using namespace ev;
using ev::test::random_field;

namespace {

EntangledQuadruple random_quad(const Grid& g, std::uint64_t seed, double lo = -1.0, double a = -1.0,
                               double b = 1.0) {
  Rng rng(seed);
  return {random_field(g, rng, lo, 1.0, a, b), random_field(g, rng, lo, 1.0, a, b),
          random_field(g, rng, lo, 1.0, a, b), random_field(g, rng, lo, 1.0, a, b)};
}

double cell_integral_gk(const Profile& f, double p, double t, double x0, double h) {
  auto k = [&](double x) { return f.dilated(p - x, t); };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(k, x0, x0 + h, 15, 1e-14);
}

}  // namespace

TEST_CASE("cell weights match quadrature") {
  const Grid g{2, 2.0, 8};
  const auto gp = gaussian_pair(1.0);
  const auto w = cell_weights(gp.sigma, g, 0.3, 0.7);
  for (std::int64_t i = 0; i < g.n; ++i)
    CHECK(w[i] == doctest::Approx(cell_integral_gk(gp.sigma, 0.3, 0.7, g.coord(i), g.spacing())).epsilon(1e-12).scale(1e-3));
  const auto sq = make_square_function_pair();
  const auto ws = cell_weights(sq.rho, g, -0.4, 1.3);
  for (std::int64_t i = 0; i < g.n; ++i)
    CHECK(std::abs(ws[i] - cell_integral_gk(sq.rho, -0.4, 1.3, g.coord(i), g.spacing())) < 1e-10);
}

TEST_CASE("pointwise form against a literal quadruple sum") {
  const Grid g{2, 1.0, 4};
  const auto Q = random_quad(g, 3);
  const auto gp = gaussian_pair(1.0);
  const KernelQuad K{gp.rho, gp.sigma, gaussian(2.0), gaussian_derivative(1.5)};
  const double p = 0.2, q = -0.35, t = 0.6;
  const double h = g.spacing();
  double s = 0.0;
  for (std::int64_t x = 0; x < g.n; ++x)
    for (std::int64_t y = 0; y < g.n; ++y)
      for (std::int64_t x2 = 0; x2 < g.n; ++x2)
        for (std::int64_t y2 = 0; y2 < g.n; ++y2)
          s += Q.F1.at(x, y) * Q.F2.at(x2, y) * Q.F3.at(x2, y2) * Q.F4.at(x, y2) *
               cell_integral_gk(K.k1, p, t, g.coord(x), h) * cell_integral_gk(K.k2, q, t, g.coord(y), h) *
               cell_integral_gk(K.k3, p, t, g.coord(x2), h) * cell_integral_gk(K.k4, q, t, g.coord(y2), h);
  CHECK(pointwise_form(Q, K, p, q, t) == doctest::Approx(s).epsilon(1e-11));
}

TEST_CASE("box average") {
  const Grid g{2, 2.0, 8};
  SampledField zero(g);
  const auto Q = random_quad(g, 1);
  CHECK(box_average({Q.F1, zero, Q.F3, Q.F4}, 0.1, 0.2, 0.5) == 0.0);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto R = random_quad(g, seed);
    const double p = -0.3 + 0.1 * seed, q = 0.25, t = 0.4 + 0.2 * seed;
    CHECK(box_average(R, p, q, t) == doctest::Approx(box_average_bruteforce(R, p, q, t)).epsilon(1e-10).scale(1e-6));
  }
  // F = 1 on a box much larger than t: (int vartheta)^4 = (2/3)^4.
  const Grid big{2, 16.0, 16};
  const auto one = SampledField::sample_2d(big, [](double, double) { return 1.0; });
  CHECK(box_average({one, one, one, one}, 0.0, 0.0, 0.5) == doctest::Approx(std::pow(2.0 / 3.0, 4)).epsilon(1e-3));
}

TEST_CASE("box Cauchy-Schwarz chain") {
  const Grid g{2, 2.0, 16};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto Q = random_quad(g, seed, 0.0);
    const auto c = box_cauchy_schwarz_check(Q, 0.1 * seed - 1.0, 0.3, 0.25 + 0.1 * seed);
    CHECK(c.first_ok);
    CHECK(c.chain_ok);
  }
  const auto Q = random_quad(g, 77, 0.0);
  const auto c = box_cauchy_schwarz_check({Q.F1, Q.F1, Q.F1, Q.F1}, 0.2, 0.1, 0.5);
  CHECK(c.a == doctest::Approx(c.first_rhs).epsilon(1e-12));
}

TEST_CASE("local forms") {
  const Grid g{2, 2.0, 16};
  const auto Q = random_quad(g, 5);
  const auto gp = gaussian_pair(1.0);
  const auto K = same_pair(gp.rho, gp.sigma);
  const std::vector<DyadicSquare> none;
  const auto e0 = local_form(Q, none, K);
  CHECK(e0.value == 0.0);
  CHECK(e0.empty);

  const std::vector<DyadicSquare> c1{{-1, 0, 0}, {-2, -1, 1}};
  const std::vector<DyadicSquare> c2{{-1, -1, -1}, {-1, 1, 0}};
  std::vector<DyadicSquare> both = c1;
  both.insert(both.end(), c2.begin(), c2.end());
  const double v1 = local_form(Q, c1, K).value, v2 = local_form(Q, c2, K).value;
  CHECK(local_form(Q, both, K).value == doctest::Approx(v1 + v2).epsilon(1e-12));

  auto scaled = Q;
  scaled.F1 *= -2.5;
  CHECK(local_form(scaled, both, K).value == doctest::Approx(-2.5 * (v1 + v2)).epsilon(1e-12));
}

TEST_CASE("sublinear local form") {
  const Grid g{2, 2.0, 16};
  const auto tree = random_convex_tree(4, 2, 0.7, DyadicSquare{0, -1, 0});
  std::vector<DyadicSquare> members(tree.members().begin(), tree.members().end());
  const auto sq = make_square_function_pair();
  const auto Q = random_quad(g, 6);
  const auto tilde = sublinear_local_form(Q, tree, sq.rho, sq.sigma, 1.0, -1.0);
  const auto plain = local_form(Q, members, packet_quad(sq.rho, sq.sigma, 1.0, -1.0));
  CHECK(tilde.value >= 0.0);
  CHECK(tilde.value >= std::abs(plain.value));

  // Sign-definite integrand: nonnegative fields and kernels.
  const auto P = random_quad(g, 8, 0.0);
  const auto gs = gaussian(1.0);
  const auto a = sublinear_local_form(P, tree, gs, gaussian(2.0), 0.0, 0.0);
  const auto b = local_form(P, members, packet_quad(gs, gaussian(2.0), 0.0, 0.0));
  CHECK(a.value == doctest::Approx(b.value).epsilon(1e-12));
}

TEST_CASE("squares of one form are nonnegative") {
  const Grid g{2, 2.0, 16};
  const auto tree = random_convex_tree(9, 2, 0.6, DyadicSquare{0, -1, -1});
  std::vector<DyadicSquare> members(tree.members().begin(), tree.members().end());
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed);
    const auto F = random_field(g, rng, -1.0, 1.0, -1.0, 1.0);
    const auto K = same_pair(gaussian(1.0), gaussian_derivative(1.0));
    CHECK(local_form({F, F, F, F}, members, K).value >= 0.0);
  }
}

TEST_CASE("truncated form basics") {
  const Grid g{2, 2.0, 16};
  const auto Q = random_quad(g, 10);
  const auto sq = make_square_function_pair();
  const auto K = packet_quad(sq.rho, sq.sigma, 1.0, 0.0);
  const auto cfg = TruncationConfig::symmetric(1, 2);
  CHECK(cfg.size() == 4);
  CHECK(truncated_form(Q, K, CoefficientSequence::constant(cfg, 0.0), cfg).value == 0.0);
  CHECK_THROWS_AS(CoefficientSequence::constant(cfg, 1.5).validate(cfg), std::invalid_argument);
  CHECK_THROWS_AS(CoefficientSequence{{1.0}}.validate(cfg), std::invalid_argument);
  SampledField zero(g);
  const auto mu = CoefficientSequence{{1.0, -1.0, 0.5, -0.25}};
  CHECK(truncated_form({Q.F1, Q.F2, zero, Q.F4}, K, mu, cfg).value == 0.0);

  // Additivity and homogeneity in F3.
  Rng rng(99);
  const auto G = random_field(g, rng, -1.0, 1.0, -1.0, 1.0);
  auto Qa = Q;
  Qa.F3 = G;
  auto Qs = Q;
  Qs.F3 = Q.F3 + (-3.0 * G);
  const double v = truncated_form(Q, K, mu, cfg).value;
  const double va = truncated_form(Qa, K, mu, cfg).value;
  const double vs = truncated_form(Qs, K, mu, cfg).value;
  CHECK(vs == doctest::Approx(v - 3.0 * va).epsilon(1e-12));

  // Swapping (F1, F4) <-> (F2, F3) with u -> -u.
  const auto Kneg = packet_quad(sq.rho, sq.sigma, -1.0, 0.0);
  const double swapped = truncated_form({Q.F2, Q.F1, Q.F4, Q.F3}, Kneg, mu, cfg).value;
  CHECK(swapped == doctest::Approx(v).epsilon(1e-10));
}

TEST_CASE("truncated form agrees with the frequency side") {
  const Grid g{2, 2.0, 16};
  const auto sq = make_square_function_pair();
  const auto cfg = TruncationConfig::symmetric(2, 2);
  for (std::uint64_t seed = 0; seed < 2; ++seed) {
    const auto Q = random_quad(g, 100 + seed);
    Rng rng(seed);
    CoefficientSequence mu;
    for (std::size_t i = 0; i < cfg.size(); ++i) mu.mu.push_back(rng.sign());
    const auto K = packet_quad(sq.rho, sq.sigma, seed == 0 ? 0.0 : 1.0, seed == 0 ? 1.0 : 0.0);
    const auto a = truncated_form(Q, K, mu, cfg);
    const auto b = frequency_side_form(Q, K, mu, cfg);
    CHECK(b.imag_residual < 1e-10);
    CHECK(a.value == doctest::Approx(b.value).epsilon(1e-3));
  }
  const Grid large{2, 2.0, 128};
  const EntangledQuadruple Z{SampledField(large), SampledField(large), SampledField(large), SampledField(large)};
  CHECK_THROWS_AS(frequency_side_form(Z, packet_quad(sq.rho, sq.sigma, 0, 0),
                                      CoefficientSequence::constant(cfg, 1.0), cfg),
                  std::invalid_argument);
}
