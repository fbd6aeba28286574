#include <doctest.h>

#include <cmath>
#include <sstream>

#include "ev/decomposition.hpp"
#include "helpers.hpp"

using namespace ev;

namespace {

const std::array<double, 4> kQuarter{0.25, 0.25, 0.25, 0.25};

CellSet block_set(const Grid& g, std::int64_t i0, std::int64_t j0, std::int64_t w, std::int64_t ht) {
  CellSet e(g);
  for (auto i = i0; i < i0 + w; ++i)
    for (auto j = j0; j < j0 + ht; ++j) e.insert(i, j);
  return e;
}

}  // namespace

TEST_CASE("cell blocks and window squares") {
  const Grid g{2, 4.0, 32};
  const auto b = cell_block(g, DyadicSquare{0, -1, 2});
  CHECK(b.inside);
  CHECK(b.s == 4);
  CHECK(b.i0 == 12);
  CHECK(b.j0 == 24);
  CHECK_FALSE(cell_block(g, DyadicSquare{0, 4, 0}).inside);
  CHECK_FALSE(cell_block(g, DyadicSquare{-3, 0, 0}).inside);
  CHECK(window_squares(g, -3, 2).size() == 1024 + 256 + 64 + 16 + 4);
  CHECK(window_squares(g, -1, 1).size() == 64 + 16);
  CHECK_THROWS_AS(window_squares(Grid{2, 3.0, 32}, -3, 2), std::invalid_argument);
}

TEST_CASE("exponents and relabeling") {
  CHECK_NOTHROW(validate_exponents({0.5, 0.5, 0.5, -0.5}));
  CHECK_NOTHROW(validate_exponents({0.5, 1.0 / 6, 1.0 / 6, 1.0 / 6}));
  CHECK_THROWS_AS(validate_exponents({0.6, 0.2, 0.1, 0.1}), std::invalid_argument);
  CHECK_THROWS_AS(validate_exponents({0.25, 0.25, 0.25, 0.2}), std::invalid_argument);

  const Grid g{2, 4.0, 32};
  RestrictedInstance inst;
  inst.grid = g;
  inst.alpha = {0.5, 0.5, 0.5, -0.5};
  inst.E = {block_set(g, 0, 0, 2, 2), block_set(g, 0, 0, 8, 8), block_set(g, 0, 0, 3, 3), block_set(g, 0, 0, 8, 8)};
  const auto r = relabel(inst);
  CHECK(r.E[0].count() == 64);
  CHECK(r.alpha[0] == -0.5);
  CHECK(r.E[1].count() == 9);
  CHECK(r.E[2].count() == 64);
  CHECK(r.E[3].count() == 4);
  CHECK(r.alpha[3] == 0.5);
  CHECK(entangled_count(r.E) == entangled_count(inst.E));
}

TEST_CASE("normalization") {
  const Grid g{2, 8.0, 16};
  RestrictedInstance inst;
  inst.grid = g;
  inst.E = {block_set(g, 0, 0, 4, 4), block_set(g, 1, 0, 2, 3), block_set(g, 1, 2, 3, 2), block_set(g, 0, 1, 2, 3)};
  inst.t_lo = -1;
  inst.t_hi = 2;
  const auto nrm = normalize_instance(inst);
  CHECK(inst.E[0].measure() == 16.0);
  CHECK(nrm.k == 1);
  CHECK(nrm.inst.E[0].measure() == 4.0);
  CHECK(nrm.inst.t_lo == -2);
  CHECK(nrm.inst.grid.half_width == 4.0);

  RestrictedInstance small;
  small.grid = Grid{2, 2.0, 16};
  small.E[0] = block_set(small.grid, 0, 0, 1, 1);
  const auto ns = normalize_instance(small);
  CHECK(ns.k == -2);
  CHECK(ns.inst.E[0].measure() == 1.0);
  CHECK(ns.inst.grid.half_width == 8.0);
  CHECK_THROWS_AS(normalize_instance(RestrictedInstance{}), std::invalid_argument);

  // Lambda(F) = a^2 Lambda(F(a .)) with the octave range shifted.
  auto field = [](const RestrictedInstance& r, std::size_t j) { return r.E[j].indicator(); };
  const auto K = same_pair(gaussian(1.0), gaussian_derivative(1.0));
  const TruncationConfig tc{inst.t_lo, inst.t_hi, 4};
  const TruncationConfig tn{nrm.inst.t_lo, nrm.inst.t_hi, 4};
  const auto mu = CoefficientSequence::constant(tc, 1.0);
  const double before =
      truncated_form({field(inst, 0), field(inst, 1), field(inst, 2), field(inst, 3)}, K, mu, tc).value;
  const double after =
      truncated_form({field(nrm.inst, 0), field(nrm.inst, 1), field(nrm.inst, 2), field(nrm.inst, 3)}, K, mu, tn)
          .value;
  CHECK(before != 0.0);
  CHECK(before == doctest::Approx(nrm.a * nrm.a * after).epsilon(1e-3));
}

TEST_CASE("random instances") {
  const Grid g{2, 4.0, 32};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto inst = random_instance(g, {0.5, 0.5, 0.5, -0.5}, -3, 2, seed);
    const auto r = relabel(inst);
    for (std::size_t j = 1; j < 4; ++j) CHECK(r.E[0].count() >= r.E[j].count());
    const auto nrm = normalize_instance(r);
    CHECK(nrm.inst.E[0].measure() >= 1.0);
    CHECK(nrm.inst.E[0].measure() <= 4.0);
  }
  const auto a = random_instance(g, kQuarter, -3, 2, 7);
  const auto b = random_instance(g, kQuarter, -3, 2, 7);
  for (std::size_t j = 0; j < 4; ++j) CHECK(a.E[j].mask == b.E[j].mask);

  std::stringstream ss;
  write_instance(ss, a);
  const auto c = read_instance(ss);
  CHECK(c.grid == a.grid);
  CHECK(c.alpha == a.alpha);
  CHECK(c.seed == 7);
  for (std::size_t j = 0; j < 4; ++j) CHECK(c.E[j].mask == a.E[j].mask);
  std::stringstream bad("nonsense 3");
  CHECK_THROWS_AS(read_instance(bad), std::runtime_error);
}

TEST_CASE("exceptional set") {
  const Grid g{2, 4.0, 32};
  const auto inst = normalize_instance(relabel(random_instance(g, kQuarter, -3, 2, 3))).inst;
  const auto empty = build_exceptional_set(inst);
  CHECK(empty.H.count() == 0);
  CHECK(empty.R.empty());
  CHECK(empty.h_ok);
  CHECK(empty.e1_ok);
  CHECK(empty.E1_prime.mask == inst.E[0].mask);

  const auto exc = build_exceptional_set(inst, 0.8);
  REQUIRE(exc.H.count() > 0);
  CellSet cover(inst.grid);
  bool disjoint = true, maximal = true;
  for (const auto& r : exc.R) {
    const auto b = cell_block(inst.grid, r);
    for (auto i = b.i0; i < b.i0 + b.s; ++i)
      for (auto j = b.j0; j < b.j0 + b.s; ++j) {
        disjoint = disjoint && !cover.contains(i, j);
        cover.insert(i, j);
      }
    const auto p = cell_block(inst.grid, r.parent());
    if (p.inside) {
      bool all = true;
      for (auto i = p.i0; i < p.i0 + p.s; ++i)
        for (auto j = p.j0; j < p.j0 + p.s; ++j) all = all && exc.H.contains(i, j);
      maximal = maximal && !all;
    }
  }
  CHECK(disjoint);
  CHECK(maximal);
  CHECK(cover.mask == exc.H.mask);
  CHECK(exc.E1_prime.count() <= inst.E[0].count());
  for (std::int64_t i = 0; i < inst.grid.n * inst.grid.n; ++i)
    if (exc.H.mask[i] && inst.E[0].mask[i]) CHECK_FALSE(exc.E1_prime.mask[i]);
}

TEST_CASE("tree selection") {
  const Grid g{2, 4.0, 32};
  const auto inst = normalize_instance(relabel(random_instance(g, kQuarter, -3, 2, 11))).inst;
  const double thr = 1.0;
  const auto exc = build_exceptional_set(inst, thr);
  std::array<SampledField, 4> G;
  for (std::size_t j = 0; j < 4; ++j)
    G[j] = (1.0 / std::sqrt(inst.E[j].measure())) * (j == 0 ? exc.E1_prime : inst.E[j]).indicator();
  const auto forest = select_trees(G, exc.H, inst.t_lo, inst.t_hi, thr);
  CHECK(forest.convex_ok);
  CHECK(forest.covered_ok);
  CHECK(forest.below_threshold_ok);
  CHECK_FALSE(forest.trees.empty());
  CHECK_FALSE(forest.inside_H.empty());

  bool in_level = true, roots_maximal = true, values_in_range = true;
  for (const auto& st : forest.trees) {
    for (const auto& s : st.tree.members()) {
      in_level = in_level && forest.level.at(s) == st.k;
      const double v = containing_average(G, cell_block(inst.grid, s));
      values_in_range = values_in_range && v > std::ldexp(1.0, st.k - 1) && v <= std::ldexp(1.0, st.k);
    }
    const auto it = forest.level.find(st.tree.root().parent());
    roots_maximal = roots_maximal && (it == forest.level.end() || it->second != st.k);
  }
  CHECK(in_level);
  CHECK(roots_maximal);
  CHECK(values_in_range);

  // Zero fields select nothing.
  std::array<SampledField, 4> Z{SampledField(inst.grid), SampledField(inst.grid), SampledField(inst.grid),
                                SampledField(inst.grid)};
  const auto none = select_trees(Z, CellSet(inst.grid), inst.t_lo, inst.t_hi);
  CHECK(none.trees.empty());
  CHECK(none.covered_ok);
}

TEST_CASE("restricted-type verification") {
  const Grid g{2, 4.0, 32};
  const auto pair = make_square_function_pair();
  const auto inst = random_instance(g, {0.5, 1.0 / 6, 1.0 / 6, 1.0 / 6}, -3, 2, 5);
  const auto nrm = normalize_instance(relabel(inst)).inst;
  const TruncationConfig tc{nrm.t_lo, nrm.t_hi, 4};
  Rng rng(9);
  CoefficientSequence mu{std::vector<double>(tc.size())};
  for (double& m : mu.mu) m = rng.sign();

  RestrictedOptions opt;
  opt.u = 1.0;
  opt.v = 4.0;
  opt.full_plane = false;
  const auto rep = restricted_type_verify(inst, pair, mu, opt, 1);
  CHECK(rep.pass());
  CHECK(rep.H_measure == 0.0);
  CHECK(rep.tree_count > 0);
  CHECK(rep.direct > 0.0);
  CHECK(rep.direct <= rep.majorant);
  CHECK(rep.majorant_H == 0.0);
  CHECK(rep.C_gen > 0.0);

  opt.threshold = 1.0;
  opt.policy = SignPolicy::random_signs;
  const auto low = restricted_type_verify(inst, pair, mu, opt, 2);
  CHECK(low.majorant_ok);
  CHECK(low.convex_ok);
  CHECK(low.covered_ok);
  CHECK(low.packing_ok);
  CHECK(low.level_mass_ok);
  CHECK(low.majorant_H > 0.0);
  CHECK_FALSE(low.H_by_generation.empty());
}

TEST_CASE("error and boundary sums") {
  const Grid g{2, 4.0, 32};
  const ConvexTree tree(DyadicSquare{1, 0, -1}, {{1, 0, -1}, {0, 0, -2}, {0, 1, -1}, {-1, 0, -3}});
  const EntangledQuadruple zero{SampledField(g), SampledField(g), SampledField(g), SampledField(g)};
  const auto z = error_boundary_terms(zero, tree);
  CHECK(z.error == 0.0);
  CHECK(z.boundary == 0.0);
  CHECK(z.C_err() == 0.0);

  Rng rng(4);
  const auto F = [&] { return ev::test::random_field(g, rng, -1.0, 1.0, -2.0, 2.0); };
  const EntangledQuadruple Q{F(), F(), F(), F()};
  const auto t = error_boundary_terms(Q, tree);
  CHECK(t.error > 0.0);
  CHECK(t.boundary > 0.0);
  CHECK(t.scale > 0.0);
  CHECK(std::isfinite(t.C_err()));
  CHECK(std::isfinite(t.C_bnd()));
  CHECK(t.tail_bound > 0.0);
  const EntangledQuadruple negated{-1.0 * Q.F1, Q.F2, -1.0 * Q.F3, Q.F4};
  CHECK(error_boundary_terms(negated, tree).error == doctest::Approx(t.error).epsilon(1e-14));
  CHECK_THROWS_AS(error_boundary_terms(Q, ConvexTree::root_only(DyadicSquare{-4, 0, 0})), std::invalid_argument);
}
