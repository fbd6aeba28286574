#pragma once

// Tree sizes M(F, C) and the quadratic Hardy-Littlewood maximal function on
// cell-constant 2D fields.

#include <span>
#include <string>
#include <vector>

#include "ev/dyadic.hpp"
#include "ev/field.hpp"
#include "ev/forms.hpp"

namespace ev {

/// int over [u0,u1] x [v0,v1] of theta(U, V), by subdivided tensor Gauss rules.
double theta_rectangle_integral(double u0, double u1, double v0, double v1);

/// T(dx, dy) = int over the cell centred at (dx h, dy h) of [theta]_t, for
/// dx, dy in [-(n-1), n-1]; row-major (2n-1) x (2n-1).
std::vector<double> theta_cell_table(const Grid& grid, double t);

/// (F^2 * [theta]_t) at every cell centre of the grid.
SampledField theta_average(const SampledField& F, double t);
/// Same with a table from theta_cell_table on the grid of F.
SampledField theta_average(const SampledField& F, std::span<const double> table);

struct TreeSize {
  double value = 0.0;
  double p = 0.0;
  double q = 0.0;
  double t = 0.0;
  bool empty = false;
};

/// sup of (F^2 * [theta]_t (p, q))^{1/2} over the Whitney samples of C.
TreeSize tree_size(const SampledField& F, std::span<const DyadicSquare> collection,
                   int steps_per_octave = 4, int min_per_side = 1);
TreeSize tree_size(const SampledField& F, const ConvexTree& tree, int steps_per_octave = 4,
                   int min_per_side = 1);

/// (F^2 * [theta]_t (p, q))^{1/2} at an arbitrary point.
double theta_average_at(const SampledField& F, double p, double q, double t);

struct MaximalField {
  SampledField values;
  std::string family;
};

/// sup over grid-aligned squares of side 2^m h (every position fully inside
/// the grid box) containing the cell, of the root mean square of F.
MaximalField quadratic_maximal(const SampledField& F);

/// Root mean square of F over the cell block [i0, i0+s) x [j0, j0+s).
double square_rms(const SampledField& F, std::int64_t i0, std::int64_t j0, std::int64_t s);

struct LevelSet {
  std::vector<std::int64_t> cells;  // flat indices ix * n + iy
  double measure = 0.0;
};

/// Cells where M > lambda. Throws std::invalid_argument for lambda < 0.
LevelSet level_set(const MaximalField& M, double lambda);

struct DominationCheck {
  double ball = 0.0;        // G^2 * [theta 1_{B_1}]_t
  double complement = 0.0;  // G^2 * [theta 1_{B_1^c}]_t
  double ratio_ball = 0.0;  // ball / 2^{2k}
  double ratio_complement = 0.0;
};

/// Splits the theta average of G at (p, q) into the unit-ball part and its
/// complement and normalises both by 2^{2k}. Requires t in [2^{k-1}, 2^k].
DominationCheck theta_ball_domination_check(const SampledField& G, double t, int k, double p, double q);

}  // namespace ev
