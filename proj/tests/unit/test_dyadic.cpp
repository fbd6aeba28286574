#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "ev/dyadic.hpp"

using namespace ev;

namespace {

const DyadicSquare kUnit{0, 0, 0};

ConvexTree two_by_two() {
  const DyadicSquare root{1, 0, 0};
  std::vector<DyadicSquare> m{root};
  for (const auto& c : children(root)) m.push_back(c);
  return ConvexTree(root, m);
}

}  // namespace

TEST_CASE("children tile the parent") {
  const auto c = children(kUnit);
  CHECK(c[0] == DyadicSquare{-1, 0, 0});
  CHECK(c[1] == DyadicSquare{-1, 1, 0});
  CHECK(c[2] == DyadicSquare{-1, 0, 1});
  CHECK(c[3] == DyadicSquare{-1, 1, 1});
  std::uint64_t total = 0;
  for (const auto& s : c) {
    CHECK(s.parent() == kUnit);
    total += area_units(s, -1);
  }
  CHECK(total == area_units(kUnit, -1));
  const DyadicSquare neg{0, -3, -1};
  for (const auto& s : children(neg)) CHECK(s.parent() == neg);
}

TEST_CASE("nested or almost disjoint at small scales") {
  std::vector<DyadicSquare> all;
  for (int k = -2; k <= 1; ++k) {
    const std::int64_t span = std::int64_t{1} << (2 - k);
    for (std::int64_t a = -span; a < span; ++a)
      for (std::int64_t b = -span; b < span; ++b) all.push_back({k, a, b});
  }
  std::size_t bad = 0;
  for (const auto& s : all) {
    for (const auto& t : all) {
      const int cases = int(s.contains(t)) + int(t.contains(s)) + int(s.almost_disjoint(t));
      if (cases != (s == t ? 2 : 1)) ++bad;
    }
  }
  CHECK(bad == 0);
}

TEST_CASE("convexity examples") {
  CHECK(is_convex({kUnit, {kUnit, {-1, 0, 0}, {-2, 0, 0}}}));
  CHECK_FALSE(is_convex({kUnit, {kUnit, {-2, 0, 0}}}));
  CHECK(is_convex({kUnit, {kUnit}}));
  CHECK_THROWS_AS(is_convex({kUnit, {kUnit, {0, 1, 0}}}), std::invalid_argument);
  CHECK_THROWS_AS(ConvexTree(kUnit, {kUnit, {-2, 0, 0}}), std::invalid_argument);
}

TEST_CASE("leaves") {
  const auto root_only = ConvexTree::root_only(kUnit);
  auto l = leaves(root_only);
  std::sort(l.begin(), l.end());
  auto c = children(kUnit);
  std::vector<DyadicSquare> expect(c.begin(), c.end());
  std::sort(expect.begin(), expect.end());
  CHECK(l == expect);

  const ConvexTree t(kUnit, {kUnit, {-1, 0, 0}});
  auto l2 = leaves(t);
  CHECK(l2.size() == 7);
  std::vector<DyadicSquare> e2{{-1, 1, 0}, {-1, 0, 1}, {-1, 1, 1}};
  for (const auto& s : children(DyadicSquare{-1, 0, 0})) e2.push_back(s);
  std::sort(e2.begin(), e2.end());
  std::sort(l2.begin(), l2.end());
  CHECK(l2 == e2);

  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto tree = random_convex_tree(seed, 5, 0.6);
    const auto lv = leaves(tree);
    const int base = tree.finest_scale() - 1;
    std::uint64_t sum = 0;
    for (const auto& s : lv) sum += area_units(s, base);
    CHECK(sum == area_units(tree.root(), base));
    bool disjoint = true;
    for (std::size_t i = 0; i < lv.size(); ++i)
      for (std::size_t j = i + 1; j < lv.size(); ++j) disjoint = disjoint && lv[i].almost_disjoint(lv[j]);
    CHECK(disjoint);
  }
}

TEST_CASE("generations and nesting") {
  const auto root_only = ConvexTree::root_only(kUnit);
  CHECK(generation(root_only, 0).squares == std::vector<DyadicSquare>{kUnit});
  CHECK(generation(root_only, 5).empty());
  CHECK(generation(root_only, 0).in_complement(DyadicSquare{0, 1, 0}));
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto tree = random_convex_tree(seed, 4, 0.5);
    const auto scales = tree.scales();
    for (std::size_t i = 0; i + 1 < scales.size(); ++i) {
      const auto fine = generation(tree, scales[i]);
      const auto coarse = generation(tree, scales[i + 1]);
      for (const auto& s : fine.squares) {
        CHECK(coarse.contains(ancestor(s, scales[i + 1])));
      }
    }
  }
}

TEST_CASE("boundary lattice points") {
  const auto root_only = ConvexTree::root_only(kUnit);
  const auto p = boundary_lattice_points(root_only, 0);
  CHECK(p == std::vector<LatticePoint>{{0, 0, 0}, {0, 0, 1}, {0, 1, 0}, {0, 1, 1}});
  CHECK(boundary_weight(root_only).value() == doctest::Approx(4.0));

  const auto t = two_by_two();
  CHECK(boundary_lattice_points(t, 0).size() == 8);
  CHECK(boundary_lattice_points(t, 1).size() == 4);
  const auto w = boundary_weight(t);
  CHECK(w.value() == doctest::Approx(24.0));
  CHECK(w.ratio_to_root(t.root()) == doctest::Approx(6.0));
}

TEST_CASE("whitney region") {
  const std::vector<DyadicSquare> one{kUnit};
  const auto r = whitney_region(one);
  REQUIRE(r.boxes.size() == 1);
  CHECK(r.boxes[0].t_lo_exp == -1);
  CHECK(r.boxes[0].t_hi_exp == 0);
  const auto tree = random_convex_tree(7, 4, 0.7);
  std::vector<DyadicSquare> members(tree.members().begin(), tree.members().end());
  const auto region = whitney_region(members);
  CHECK(region.boxes.size() == members.size());
  for (const auto& [k, squares] : region.slices()) {
    CHECK(squares == generation(tree, k).squares);
  }
}

TEST_CASE("random trees") {
  CHECK(random_convex_tree(3, 6, 0.0) == ConvexTree::root_only(kUnit));
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto tree = random_convex_tree(seed, 4, 0.5);
    std::vector<DyadicSquare> m(tree.members().begin(), tree.members().end());
    CHECK(is_convex({tree.root(), m}));
  }
  CHECK(random_convex_tree(42, 5, 0.5) == random_convex_tree(42, 5, 0.5));
}

TEST_CASE("enumeration count") {
  std::size_t count = 0;
  enumerate_convex_trees(kUnit, 2, [&](const ConvexTree&) { ++count; });
  CHECK(count == 16);
  count = 0;
  enumerate_convex_trees(kUnit, 3, [&](const ConvexTree&) { ++count; });
  CHECK(count == 83521);
}

TEST_CASE("tree serialization round trip") {
  const auto tree = random_convex_tree(11, 4, 0.6);
  std::stringstream ss;
  write_tree(ss, tree);
  CHECK(read_tree(ss) == tree);
  std::stringstream bad("0 0 0\n-2 0 0\n");
  CHECK_THROWS(read_tree(bad));
}
