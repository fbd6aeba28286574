#include "ev/dyadic.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "ev/random.hpp"

namespace ev {

namespace {

// Floor division by 2^shift; valid for negative indices.
std::int64_t floor_shift(std::int64_t m, int shift) {
  if (shift >= 63) return m < 0 ? -1 : 0;
  return m >> shift;
}

}  // namespace

bool DyadicInterval::contains(const DyadicInterval& other) const {
  if (other.k > k) return false;
  return floor_shift(other.m, k - other.k) == m;
}

bool DyadicInterval::almost_disjoint(const DyadicInterval& other) const {
  return !contains(other) && !other.contains(*this);
}

bool DyadicSquare::contains(const DyadicSquare& other) const {
  if (other.k > k) return false;
  const int d = k - other.k;
  return floor_shift(other.mx, d) == mx && floor_shift(other.my, d) == my;
}

bool DyadicSquare::almost_disjoint(const DyadicSquare& other) const {
  return !contains(other) && !other.contains(*this);
}

double DyadicSquare::side() const { return std::ldexp(1.0, k); }
double DyadicSquare::area() const { return std::ldexp(1.0, 2 * k); }

std::array<DyadicSquare, 4> children(const DyadicSquare& s) {
  const int k = s.k - 1;
  return {DyadicSquare{k, 2 * s.mx, 2 * s.my}, DyadicSquare{k, 2 * s.mx + 1, 2 * s.my},
          DyadicSquare{k, 2 * s.mx, 2 * s.my + 1}, DyadicSquare{k, 2 * s.mx + 1, 2 * s.my + 1}};
}

DyadicSquare ancestor(const DyadicSquare& s, int k) {
  if (k < s.k) throw std::invalid_argument("ancestor: target scale below the square");
  const int d = k - s.k;
  return {k, floor_shift(s.mx, d), floor_shift(s.my, d)};
}

std::uint64_t area_units(const DyadicSquare& s, int base_k) {
  if (s.k < base_k) throw std::invalid_argument("area_units: square finer than the unit");
  const int d = s.k - base_k;
  if (2 * d >= 64) throw std::overflow_error("area_units: scale range too large");
  return std::uint64_t{1} << (2 * d);
}

bool is_convex(const CandidateTree& candidate) {
  const std::set<DyadicSquare> members(candidate.members.begin(), candidate.members.end());
  if (!members.count(candidate.root)) {
    throw std::invalid_argument("is_convex: root is not a member");
  }
  for (const auto& s : members) {
    if (!candidate.root.contains(s)) {
      throw std::invalid_argument("is_convex: member not contained in the root");
    }
  }
  // The root contains every member, so the intermediate-square condition is
  // equivalent to closure under taking parents below the root.
  for (const auto& s : members) {
    if (s == candidate.root) continue;
    if (!members.count(s.parent())) return false;
  }
  return true;
}

ConvexTree::ConvexTree(DyadicSquare root, std::vector<DyadicSquare> members)
    : root_(root), members_(members.begin(), members.end()) {
  if (!is_convex(CandidateTree{root, std::move(members)})) {
    throw std::invalid_argument("ConvexTree: collection is not convex");
  }
}

std::vector<int> ConvexTree::scales() const {
  std::set<int> ks;
  for (const auto& s : members_) ks.insert(s.k);
  return {ks.begin(), ks.end()};
}

int ConvexTree::finest_scale() const {
  int k = root_.k;
  for (const auto& s : members_) k = std::min(k, s.k);
  return k;
}

std::vector<DyadicSquare> leaves(const ConvexTree& tree) {
  std::vector<DyadicSquare> out;
  for (const auto& s : tree.members()) {
    for (const auto& c : children(s)) {
      if (!tree.contains(c)) out.push_back(c);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool Generation::contains(const DyadicSquare& s) const {
  return s.k == k && std::binary_search(squares.begin(), squares.end(), s);
}

Generation generation(const ConvexTree& tree, int k) {
  Generation g;
  g.k = k;
  for (const auto& s : tree.members()) {
    if (s.k == k) g.squares.push_back(s);
  }
  return g;  // std::set iteration keeps squares sorted
}

std::vector<LatticePoint> boundary_lattice_points(const ConvexTree& tree, int k) {
  const Generation g = generation(tree, k);
  std::set<LatticePoint> candidates;
  for (const auto& s : g.squares) {
    for (int dx = 0; dx <= 1; ++dx) {
      for (int dy = 0; dy <= 1; ++dy) candidates.insert({k, s.mx + dx, s.my + dy});
    }
  }
  std::vector<LatticePoint> out;
  for (const auto& p : candidates) {
    int inside = 0;
    for (int dx = -1; dx <= 0; ++dx) {
      for (int dy = -1; dy <= 0; ++dy) {
        if (g.contains({k, p.a + dx, p.b + dy})) ++inside;
      }
    }
    // Every candidate touches at least one member; it is a boundary point
    // unless all four incident squares are members.
    if (inside > 0 && inside < 4) out.push_back(p);
  }
  return out;
}

double BoundaryWeight::value() const {
  return std::ldexp(static_cast<double>(units), 2 * unit_scale);
}

double BoundaryWeight::ratio_to_root(const DyadicSquare& root) const {
  return static_cast<double>(units) /
         static_cast<double>(area_units(root, unit_scale));
}

BoundaryWeight boundary_weight(const ConvexTree& tree) {
  BoundaryWeight w;
  w.unit_scale = tree.finest_scale();
  for (int k : tree.scales()) {
    const auto count = static_cast<std::uint64_t>(boundary_lattice_points(tree, k).size());
    w.units += count * area_units(DyadicSquare{k, 0, 0}, w.unit_scale);
  }
  return w;
}

std::map<int, std::vector<DyadicSquare>> WhitneyRegion::slices() const {
  std::map<int, std::vector<DyadicSquare>> out;
  for (const auto& b : boxes) out[b.square.k].push_back(b.square);
  for (auto& [k, v] : out) std::sort(v.begin(), v.end());
  return out;
}

WhitneyRegion whitney_region(std::span<const DyadicSquare> collection) {
  WhitneyRegion r;
  r.boxes.reserve(collection.size());
  for (const auto& s : collection) r.boxes.push_back({s, s.k - 1, s.k});
  return r;
}

ConvexTree random_convex_tree(std::uint64_t seed, int max_depth, double refine_probability,
                              DyadicSquare root) {
  if (max_depth < 0) throw std::invalid_argument("random_convex_tree: negative depth");
  if (!(refine_probability >= 0.0 && refine_probability <= 1.0)) {
    throw std::invalid_argument("random_convex_tree: probability outside [0,1]");
  }
  Rng rng(seed);
  std::vector<DyadicSquare> members{root};
  std::deque<std::pair<DyadicSquare, int>> queue{{root, 0}};
  while (!queue.empty()) {
    const auto [s, depth] = queue.front();
    queue.pop_front();
    if (depth >= max_depth) continue;
    for (const auto& c : children(s)) {
      if (rng.bernoulli(refine_probability)) {
        members.push_back(c);
        queue.emplace_back(c, depth + 1);
      }
    }
  }
  return ConvexTree(root, std::move(members));
}

namespace {

using SubtreeList = std::vector<std::vector<DyadicSquare>>;

SubtreeList subtrees(const DyadicSquare& node, int levels) {
  SubtreeList out;
  if (levels <= 1) {
    out.push_back({node});
    return out;
  }
  const auto kids = children(node);
  std::array<SubtreeList, 4> options;
  for (int i = 0; i < 4; ++i) options[i] = subtrees(kids[i], levels - 1);
  // Index 0 means "child absent", index j > 0 picks options[i][j - 1].
  std::array<std::size_t, 4> idx{};
  while (true) {
    std::vector<DyadicSquare> members{node};
    for (int i = 0; i < 4; ++i) {
      if (idx[i] > 0) {
        const auto& sub = options[i][idx[i] - 1];
        members.insert(members.end(), sub.begin(), sub.end());
      }
    }
    out.push_back(std::move(members));
    int i = 0;
    while (i < 4) {
      if (++idx[i] <= options[i].size()) break;
      idx[i] = 0;
      ++i;
    }
    if (i == 4) break;
  }
  return out;
}

}  // namespace

void enumerate_convex_trees(const DyadicSquare& root, int levels,
                            const std::function<void(const ConvexTree&)>& visit) {
  if (levels < 1) throw std::invalid_argument("enumerate_convex_trees: levels < 1");
  for (auto& members : subtrees(root, levels)) visit(ConvexTree(root, std::move(members)));
}

void write_tree(std::ostream& out, const ConvexTree& tree) {
  const auto& r = tree.root();
  out << r.k << ' ' << r.mx << ' ' << r.my << '\n';
  for (const auto& s : tree.members()) {
    if (s == r) continue;
    out << s.k << ' ' << s.mx << ' ' << s.my << '\n';
  }
}

ConvexTree read_tree(std::istream& in) {
  std::vector<DyadicSquare> squares;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    DyadicSquare s;
    if (!(ls >> s.k >> s.mx >> s.my)) {
      throw std::invalid_argument("read_tree: malformed line " + std::to_string(lineno));
    }
    squares.push_back(s);
  }
  if (squares.empty()) throw std::invalid_argument("read_tree: no root line");
  const DyadicSquare root = squares.front();
  return ConvexTree(root, std::move(squares));
}

}  // namespace ev
