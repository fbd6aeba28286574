#pragma once

// Restricted-type decomposition on cell sets: normalization, the exceptional
// set H, tree selection by maximal averages, and the direct-vs-majorant check.
// Also the error and boundary sums attached to a single convex tree.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <vector>

#include "ev/dyadic.hpp"
#include "ev/field.hpp"
#include "ev/forms.hpp"
#include "ev/maximal.hpp"
#include "ev/profiles.hpp"
#include "ev/random.hpp"

namespace ev {

/// Subset of the cells of a 2D grid.
struct CellSet {
  Grid grid;
  std::vector<std::uint8_t> mask;  // ix * n + iy

  explicit CellSet(Grid g = Grid{2, 1.0, 2});
  bool contains(std::int64_t i, std::int64_t j) const { return mask[i * grid.n + j] != 0; }
  void insert(std::int64_t i, std::int64_t j) { mask[i * grid.n + j] = 1; }
  std::int64_t count() const;
  double measure() const;
  SampledField indicator() const;
};

/// Cell block [i0, i0+s) x [j0, j0+s) covered by a dyadic square. Requires a
/// power-of-two box half width and a side of at least one cell.
struct CellBlock {
  std::int64_t i0 = 0, j0 = 0, s = 1;
  bool inside = false;
};
CellBlock cell_block(const Grid& grid, const DyadicSquare& S);

/// Dyadic squares inside the grid box with side in [max(h, 2^{lo+1}), 2^hi].
std::vector<DyadicSquare> window_squares(const Grid& grid, int lo, int hi);

enum class SignPolicy { indicator, random_signs };

struct RestrictedInstance {
  Grid grid{2, 4.0, 32};
  std::array<CellSet, 4> E;
  std::array<double, 4> alpha{0.25, 0.25, 0.25, 0.25};
  int t_lo = -3;  // truncation octaves [2^t_lo, 2^t_hi]
  int t_hi = 2;
  std::uint64_t seed = 0;
};

/// Throws std::invalid_argument unless every alpha_j is in [-1/2, 1/2] and they sum to 1.
void validate_exponents(const std::array<double, 4>& alpha);

/// Moves a set of largest measure (the last one on ties) to slot 1 by one of
/// the slot permutations (2,1,4,3), (3,4,1,2), (4,3,2,1), exponents alongside.
/// These preserve the entangled pattern; (2,1,4,3) and (4,3,2,1) exchange the
/// kernel slot pairs, which amounts to u -> -u or v -> -v.
RestrictedInstance relabel(const RestrictedInstance& inst);

struct NormalizedInstance {
  RestrictedInstance inst;
  int k = 0;        // dilation a = 2^k
  double a = 1.0;
};

/// Rescales by a = 2^k so that 1 <= |E_1| <= 4: same cell arrays on the box of
/// half width L / a, octave range shifted by -k. Lambda changes by the factor a^2.
NormalizedInstance normalize_instance(const RestrictedInstance& inst);

/// Random unions of random cell rectangles inside a common cluster box of side
/// about 2|E_1|^{1/2}. |E_1| is drawn in [1, 4], the others in [h^2, |E_1|];
/// with alpha_4 < 0 the last set is the smallest. Draws with
/// entangled_count(E) == 0 are repeated.
RestrictedInstance random_instance(const Grid& grid, const std::array<double, 4>& alpha, int t_lo,
                                   int t_hi, std::uint64_t seed);

/// Number of cell quadruples (x, y, x', y') with (x,y) in E_1, (x',y) in E_2,
/// (x',y') in E_3 and (x,y') in E_4.
std::int64_t entangled_count(const std::array<CellSet, 4>& E);

void write_instance(std::ostream& out, const RestrictedInstance& inst);
RestrictedInstance read_instance(std::istream& in);

struct ExceptionalSet {
  CellSet H;
  std::vector<DyadicSquare> R;  // maximal dyadic squares inside H
  CellSet E1_prime;             // E_1 minus the union of 3R
  bool escapes = false;         // some 3R leaves the grid box
  bool h_ok = false;            // |H| <= 1/18
  bool e1_ok = false;           // 2|E_1'| >= |E_1|
};

/// H = union_j {M(|E_j|^{-1/2} 1_{E_j}) > threshold}.
ExceptionalSet build_exceptional_set(const RestrictedInstance& inst, double threshold = 1024.0);

struct SelectedTree {
  int k = 0;
  ConvexTree tree;
};

struct Forest {
  std::map<int, std::vector<DyadicSquare>> S;   // S_k
  std::vector<SelectedTree> trees;              // one per R in R_k, all k
  std::map<DyadicSquare, int> level;            // k of each selected square
  std::vector<DyadicSquare> inside_H;           // window squares contained in H
  bool convex_ok = true;
  bool covered_ok = true;                       // every window square accounted for once
  bool below_threshold_ok = true;               // v(S) <= threshold off H
};

/// v(S) = max_j sup over family squares S' containing S of the rms of G_j;
/// S_k collects window squares not inside H with v(S) in (2^{k-1}, 2^k].
/// Squares with v(S) = 0 join no forest.
Forest select_trees(const std::array<SampledField, 4>& G, const CellSet& H, int t_lo, int t_hi,
                    double threshold = 1024.0);

/// max_j sup over family squares containing the block of the rms of G_j.
double containing_average(const std::array<SampledField, 4>& G, const CellBlock& b);

struct RestrictedOptions {
  double threshold = 1024.0;
  double u = 0.0;
  double v = 0.0;
  int steps_per_octave = 4;
  SignPolicy policy = SignPolicy::indicator;
  bool full_plane = true;  // also evaluate Lambda^N over the whole plane
};

struct RestrictedReport {
  std::array<double, 4> measures{};  // after normalization
  int k_norm = 0;
  double H_measure = 0.0;
  double E1_measure = 0.0;
  double E1_prime_measure = 0.0;
  double direct = 0.0;        // |windowed Lambda^N(G)|
  double lambda_full = 0.0;   // |Lambda^N(G)| over the plane
  double majorant = 0.0;      // sum of tree terms plus the H part
  double majorant_trees = 0.0;
  double majorant_H = 0.0;
  double tree_bound = 0.0;    // sum over trees of |R| prod_j M(G_j, T_R)
  std::map<int, double> H_by_generation;
  double C_HL = 0.0;          // max_j,k |{M(G_j) > 2^{k-1}}| 2^{2(k-1)} / |G_j|_2^2
  double C_gen = 0.0;         // max over trees and j of M(G_j, T_R) / 2^k
  std::size_t tree_count = 0;
  bool h_ok = false;
  bool e1_ok = false;
  bool exponent_ok = false;   // prod |E_j|^alpha_j >= prod |E_j|^{1/2} / 4
  bool convex_ok = false;
  bool covered_ok = false;
  bool below_threshold_ok = false;
  bool level_mass_ok = false; // sum_{R in R_k} |R| <= sum_j |{M(G_j) > 2^{k-1}}|
  bool packing_ok = false;    // sum_{S in S_{R,k}} |S| <= |R|
  bool majorant_ok = false;   // direct <= majorant (1e-12 relative)
  bool decay_ok = false;      // H part nonincreasing in the generation from 4 on
  bool pass() const;
};

RestrictedReport restricted_type_verify(const RestrictedInstance& inst, const AdmissiblePair& pair,
                                        const CoefficientSequence& mu, const RestrictedOptions& options,
                                        std::uint64_t sign_seed = 0);

struct ErrorBoundaryTerms {
  double error = 0.0;      // sum_k Theta^{T_k}(|F1| 1_{T_k^c}, |F2|, |F3|, |F4|)
  double boundary = 0.0;   // sum_k Theta^{box \ T_k}((|F_j| 1_{T_k})_j)
  double tail_bound = 0.0; // bound for the boundary integrand outside the box
  double scale = 0.0;      // |R_T| prod_j M(F_j, T)
  double C_err() const { return scale > 0.0 ? error / scale : 0.0; }
  double C_bnd() const { return scale > 0.0 ? boundary / scale : 0.0; }
};

/// Kernels are the pointwise square (1+|x|)^{-8} in all four slots. Every
/// tree square must be at least one cell wide.
ErrorBoundaryTerms error_boundary_terms(const EntangledQuadruple& Q, const ConvexTree& tree,
                                        int steps_per_octave = 4);

}  // namespace ev
