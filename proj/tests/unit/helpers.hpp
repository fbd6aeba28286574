#pragma once

#include "ev/field.hpp"
#include "ev/random.hpp"

namespace ev::test {

// Uniform values in [lo, hi) on cells whose centre lies in [a, b)^2, zero elsewhere.
inline SampledField random_field(const Grid& g, Rng& rng, double lo, double hi, double a, double b) {
  SampledField f(g);
  for (std::int64_t i = 0; i < g.n; ++i) {
    for (std::int64_t j = 0; j < g.n; ++j) {
      const double x = g.cell_center(i), y = g.cell_center(j);
      if (x >= a && x < b && y >= a && y < b) f.at(i, j) = rng.uniform(lo, hi);
    }
  }
  return f;
}

}  // namespace ev::test
