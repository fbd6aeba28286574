#pragma once

#include <cstdint>
#include <vector>

namespace ev::detail {

// Cubic Hermite interpolation on a uniform table x0 + i dx; zero outside.
struct HermiteTable {
  double x0 = 0.0;
  double dx = 1.0;
  std::vector<double> f;
  std::vector<double> d;

  double eval(double x) const {
    const double s = (x - x0) / dx;
    if (!(s >= 0.0) || s > static_cast<double>(f.size() - 1)) return 0.0;
    auto i = static_cast<std::int64_t>(s);
    if (i >= static_cast<std::int64_t>(f.size()) - 1) i = static_cast<std::int64_t>(f.size()) - 2;
    const double u = s - static_cast<double>(i);
    const double u2 = u * u, u3 = u2 * u;
    const double h00 = 2 * u3 - 3 * u2 + 1, h10 = u3 - 2 * u2 + u;
    const double h01 = -2 * u3 + 3 * u2, h11 = u3 - u2;
    return h00 * f[i] + h10 * dx * d[i] + h01 * f[i + 1] + h11 * dx * d[i + 1];
  }

  double x_max() const { return x0 + dx * static_cast<double>(f.size() - 1); }
};

}  // namespace ev::detail
