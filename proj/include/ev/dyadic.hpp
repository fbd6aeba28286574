#pragma once

// Exact dyadic geometry on integer (scale, index) coordinates.
//
// A dyadic interval of scale k and index m is [2^k m, 2^k (m+1)]. A dyadic
// square is the product of two dyadic intervals of the same scale. Nothing in
// this header touches floating point except the final conversion helpers.

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <vector>

namespace ev {

struct DyadicInterval {
  int k = 0;
  std::int64_t m = 0;

  auto operator<=>(const DyadicInterval&) const = default;

  DyadicInterval parent() const { return {k + 1, m >> 1}; }
  std::array<DyadicInterval, 2> children() const {
    return {DyadicInterval{k - 1, 2 * m}, DyadicInterval{k - 1, 2 * m + 1}};
  }
  /// Closed containment of dyadic intervals (nested case only).
  bool contains(const DyadicInterval& other) const;
  /// True when the intersection has zero length.
  bool almost_disjoint(const DyadicInterval& other) const;
};

struct DyadicSquare {
  int k = 0;
  std::int64_t mx = 0;
  std::int64_t my = 0;

  auto operator<=>(const DyadicSquare&) const = default;

  DyadicInterval x_interval() const { return {k, mx}; }
  DyadicInterval y_interval() const { return {k, my}; }

  DyadicSquare parent() const { return {k + 1, mx >> 1, my >> 1}; }
  bool contains(const DyadicSquare& other) const;
  bool almost_disjoint(const DyadicSquare& other) const;

  /// Side length 2^k as a double (exact for any realistic k).
  double side() const;
  double area() const;
};

/// The four children in the order (lower-left, lower-right, upper-left,
/// upper-right).
std::array<DyadicSquare, 4> children(const DyadicSquare& s);

/// Ancestor of s at scale k (k >= s.k).
DyadicSquare ancestor(const DyadicSquare& s, int k);

/// |s| measured in units of 4^base_k. Requires s.k >= base_k.
std::uint64_t area_units(const DyadicSquare& s, int base_k);

/// A lattice point (2^k a, 2^k b) of the scale-k lattice.
struct LatticePoint {
  int k = 0;
  std::int64_t a = 0;
  std::int64_t b = 0;
  auto operator<=>(const LatticePoint&) const = default;
};

/// Finite collection with a designated root containing every member.
struct CandidateTree {
  DyadicSquare root;
  std::vector<DyadicSquare> members;
};

/// Brute-force convexity test: for every nested member pair S1 in S3, every
/// dyadic S2 between them must be a member. Throws std::invalid_argument if a
/// member is not contained in the root or the root is missing.
bool is_convex(const CandidateTree& candidate);

class ConvexTree {
 public:
  /// Validates convexity; throws std::invalid_argument otherwise.
  ConvexTree(DyadicSquare root, std::vector<DyadicSquare> members);

  static ConvexTree root_only(DyadicSquare root) { return ConvexTree(root, {root}); }

  const DyadicSquare& root() const { return root_; }
  const std::set<DyadicSquare>& members() const { return members_; }
  bool contains(const DyadicSquare& s) const { return members_.count(s) != 0; }
  std::size_t size() const { return members_.size(); }

  /// Scales present, finest first.
  std::vector<int> scales() const;
  int finest_scale() const;

  bool operator==(const ConvexTree& other) const {
    return root_ == other.root_ && members_ == other.members_;
  }

 private:
  DyadicSquare root_;
  std::set<DyadicSquare> members_;
};

std::vector<DyadicSquare> leaves(const ConvexTree& tree);

/// Scale-k generation of a tree. The complement within D_k is represented by
/// the membership predicate `in_complement`.
struct Generation {
  int k = 0;
  std::vector<DyadicSquare> squares;

  bool contains(const DyadicSquare& s) const;
  bool in_complement(const DyadicSquare& s) const { return s.k == k && !contains(s); }
  bool empty() const { return squares.empty(); }
};

Generation generation(const ConvexTree& tree, int k);

/// Scale-k lattice points on the topological boundary of the union of the
/// scale-k members. Sorted.
std::vector<LatticePoint> boundary_lattice_points(const ConvexTree& tree, int k);

/// sum_k 4^k #Delta(T_k), reported exactly as an integer count of units
/// 4^unit_scale together with the ratio to |R_T|.
struct BoundaryWeight {
  std::uint64_t units = 0;
  int unit_scale = 0;
  double value() const;
  double ratio_to_root(const DyadicSquare& root) const;
};

BoundaryWeight boundary_weight(const ConvexTree& tree);

struct WhitneyBox {
  DyadicSquare square;
  // t ranges over [2^t_lo_exp, 2^t_hi_exp] = [l(S)/2, l(S)].
  int t_lo_exp = 0;
  int t_hi_exp = 0;
};

struct WhitneyRegion {
  std::vector<WhitneyBox> boxes;
  /// Squares grouped by scale; the slice at scale k is union(T_k) x [2^{k-1}, 2^k].
  std::map<int, std::vector<DyadicSquare>> slices() const;
};

WhitneyRegion whitney_region(std::span<const DyadicSquare> collection);

/// Top-down random tree: every child of a member above max_depth is added
/// independently with the given probability.
ConvexTree random_convex_tree(std::uint64_t seed, int max_depth, double refine_probability,
                              DyadicSquare root = {0, 0, 0});

/// Visits every convex tree rooted at `root` whose members are at most
/// `levels - 1` generations below the root. levels = 3 visits 83521 trees.
void enumerate_convex_trees(const DyadicSquare& root, int levels,
                            const std::function<void(const ConvexTree&)>& visit);

/// Line format: first line the root, then one member per line, each `k mx my`.
void write_tree(std::ostream& out, const ConvexTree& tree);
ConvexTree read_tree(std::istream& in);

}  // namespace ev
