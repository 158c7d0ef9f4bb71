#pragma once

#include <cmath>
#include <functional>
#include <limits>

namespace orex::detail {

struct GridMin {
  double value = std::numeric_limits<double>::infinity();
  double x = 0.0;
  double y = 0.0;
};

// Minimizes value(x, y) over the closed quadrant x, y >= 0, for values
// that are +inf outside a convex feasible cone and increase radially away
// from its boundary. A 60x60 log-spaced grid spans [1e-4, 1e4] times the
// per-axis scale; both axes and the origin are scanned explicitly since
// log grids never reach zero. Refinement rounds zoom on the incumbent,
// and a radial bisection finally pushes it onto the feasibility boundary
// where such minima live.
inline GridMin grid_minimize(const std::function<double(double, double)>& value,
                             double scale_x, double scale_y) {
  constexpr int kGrid = 60;
  constexpr int kRounds = 4;
  GridMin best;

  double lo_x = std::log10(scale_x * 1e-4), hi_x = std::log10(scale_x * 1e4);
  double lo_y = std::log10(scale_y * 1e-4), hi_y = std::log10(scale_y * 1e4);

  const auto consider = [&](double x, double y) {
    const double v = value(x, y);
    if (v < best.value) {
      best.value = v;
      best.x = x;
      best.y = y;
    }
  };

  for (int round = 0; round < kRounds; ++round) {
    for (int i = 0; i < kGrid; ++i) {
      const double x = std::pow(10.0, lo_x + (hi_x - lo_x) * i / (kGrid - 1));
      consider(x, 0.0);
      for (int j = 0; j < kGrid; ++j) {
        const double y =
            std::pow(10.0, lo_y + (hi_y - lo_y) * j / (kGrid - 1));
        if (i == 0) consider(0.0, y);
        consider(x, y);
      }
    }
    consider(0.0, 0.0);
    if (!std::isfinite(best.value)) break;
    // Zoom to a fifth of the range, centered on the incumbent.
    const double half_x = 0.1 * (hi_x - lo_x);
    const double half_y = 0.1 * (hi_y - lo_y);
    if (best.x > 0.0) {
      lo_x = std::log10(best.x) - half_x;
      hi_x = std::log10(best.x) + half_x;
    }
    if (best.y > 0.0) {
      lo_y = std::log10(best.y) - half_y;
      hi_y = std::log10(best.y) + half_y;
    }
  }
  if (!std::isfinite(best.value) || (best.x == 0.0 && best.y == 0.0)) {
    return best;
  }

  // Radial polish: bisect toward the origin for the feasibility boundary
  // along the incumbent's ray.
  double t_lo = 0.0, t_hi = 1.0;
  if (std::isfinite(value(0.0, 0.0))) return best;
  for (int iter = 0; iter < 60; ++iter) {
    const double t = 0.5 * (t_lo + t_hi);
    if (std::isfinite(value(t * best.x, t * best.y))) {
      t_hi = t;
    } else {
      t_lo = t;
    }
  }
  consider(t_hi * best.x, t_hi * best.y);
  return best;
}

}  // namespace orex::detail
