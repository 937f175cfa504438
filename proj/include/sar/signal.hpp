#pragma once

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sar/maze.hpp"

namespace sar {

/// Indoor propagation constants: carrier frequency, per-wall attenuation
/// (brick-wall figure), and the physical size of one grid cell.
struct PropagationParams {
  double frequency_mhz = 2400.0;
  double wall_attenuation_db = 4.4349;
  double cell_size_m = 1.0;

  void validate() const {
    if (!(frequency_mhz > 0.0)) throw std::invalid_argument("frequency must be positive");
    if (!(wall_attenuation_db >= 0.0))
      throw std::invalid_argument("wall attenuation must be non-negative");
    if (!(cell_size_m > 0.0)) throw std::invalid_argument("cell size must be positive");
  }
};

namespace detail {

// Supercover line walk between cell centers: visits every cell the segment
// touches. When the segment passes exactly through a lattice corner, both
// side cells are reported, so a diagonal link cannot slip between two walls
// that meet corner-to-corner. Endpoints are visited too; callers filter.
template <typename Visit>
void supercover(Cell a, Cell b, Visit&& visit) {
  int x = a.x, y = a.y;
  const int dx = std::abs(b.x - a.x), dy = std::abs(b.y - a.y);
  const int xstep = b.x > a.x ? 1 : -1, ystep = b.y > a.y ? 1 : -1;
  visit(Cell{x, y});
  const int ddx = 2 * dx, ddy = 2 * dy;
  if (ddx >= ddy) {
    int error = dx, errorprev = dx;
    for (int i = 0; i < dx; ++i) {
      x += xstep;
      error += ddy;
      if (error > ddx) {
        y += ystep;
        error -= ddx;
        if (error + errorprev < ddx) {
          visit(Cell{x, y - ystep});
        } else if (error + errorprev > ddx) {
          visit(Cell{x - xstep, y});
        } else {  // exact corner crossing
          visit(Cell{x, y - ystep});
          visit(Cell{x - xstep, y});
        }
      }
      visit(Cell{x, y});
      errorprev = error;
    }
  } else {
    int error = dy, errorprev = dy;
    for (int i = 0; i < dy; ++i) {
      y += ystep;
      error += ddx;
      if (error > ddy) {
        x += xstep;
        error -= ddy;
        if (error + errorprev < ddy) {
          visit(Cell{x - xstep, y});
        } else if (error + errorprev > ddy) {
          visit(Cell{x, y - ystep});
        } else {
          visit(Cell{x - xstep, y});
          visit(Cell{x, y - ystep});
        }
      }
      visit(Cell{x, y});
      errorprev = error;
    }
  }
}

}  // namespace detail

/// Wall cells intersected by the straight segment between the centers of two
/// free cells (endpoints excluded, corner-grazed cells included). Symmetric:
/// the walk is canonicalized to run from the row-major smaller endpoint.
inline int wall_count(const Maze& maze, Cell a, Cell b) {
  if (!maze.in_bounds(a) || maze.is_wall(a) || !maze.in_bounds(b) || maze.is_wall(b))
    throw std::invalid_argument("wall_count endpoints must be free cells");
  if (b < a) std::swap(a, b);
  int count = 0;
  detail::supercover(a, b, [&](Cell c) {
    if (c != a && c != b && maze.is_wall(c)) ++count;
  });
  return count;
}

inline bool line_of_sight(const Maze& maze, Cell a, Cell b) {
  return wall_count(maze, a, b) == 0;
}

/// Indoor path loss in dB for a link of `distance_m` meters crossing `walls`
/// wall cells: 20·log10(f) + 28·log10(d) - 28 + w·c.
inline double path_loss(double distance_m, int walls, const PropagationParams& params = {}) {
  if (!(distance_m > 0.0)) throw std::domain_error("path_loss requires a positive distance");
  if (walls < 0) throw std::invalid_argument("wall count must be non-negative");
  return 20.0 * std::log10(params.frequency_mhz) + 28.0 * std::log10(distance_m) - 28.0 +
         params.wall_attenuation_db * walls;
}

/// How a measured loss is turned back into a distance. The forward model
/// raises distance to exponent 28; inverting with the same divisor makes the
/// round trip the identity and folds each wall into a clean multiplicative
/// stretch of 10^(w/28). Divisor20 inverts with 20 instead, which distorts
/// the round trip (d^1.4 at zero walls) but is kept for comparison runs.
enum class InversionMode { Consistent, Divisor20 };

inline double effective_distance(double pl, const PropagationParams& params = {},
                                 InversionMode mode = InversionMode::Consistent) {
  const double divisor = mode == InversionMode::Consistent ? 28.0 : 20.0;
  return std::pow(10.0, (pl + 28.0 - 20.0 * std::log10(params.frequency_mhz)) / divisor);
}

/// Received-loss map of a beacon over a maze: per free cell, the path loss
/// from the beacon; walls carry NaN. Immutable once built.
class PowerField {
 public:
  PowerField(const Maze& maze, Cell beacon, const PropagationParams& params = {})
      : width_(maze.width()),
        height_(maze.height()),
        beacon_(beacon),
        loss_(static_cast<std::size_t>(maze.width()) * maze.height(),
              std::numeric_limits<double>::quiet_NaN()) {
    params.validate();
    if (!maze.in_bounds(beacon) || maze.is_wall(beacon))
      throw std::invalid_argument("beacon must be a free in-bounds cell");
    // Distance at the beacon's own cell is clamped to half a cell so the
    // log never sees zero; the clamp keeps the beacon the field minimum.
    const double eps = 0.5 * params.cell_size_m;
    for (int y = 0; y < height_; ++y) {
      for (int x = 0; x < width_; ++x) {
        const Cell u{x, y};
        if (maze.is_wall(u)) continue;
        const double d = std::max(eps, euclid(u, beacon) * params.cell_size_m);
        loss_[index(u)] = path_loss(d, wall_count(maze, u, beacon), params);
      }
    }
  }

  int width() const { return width_; }
  int height() const { return height_; }
  Cell beacon() const { return beacon_; }

  bool has_value(Cell c) const {
    return c.x >= 0 && c.x < width_ && c.y >= 0 && c.y < height_ && !std::isnan(loss_[index(c)]);
  }

  /// Path loss in dB at a free cell; NaN at walls and out of bounds.
  double at(Cell c) const {
    if (c.x < 0 || c.x >= width_ || c.y < 0 || c.y >= height_)
      return std::numeric_limits<double>::quiet_NaN();
    return loss_[index(c)];
  }

  /// CSV matrix, one row per grid row; wall cells are empty fields.
  std::string to_csv() const {
    std::ostringstream oss;
    for (int y = 0; y < height_; ++y) {
      for (int x = 0; x < width_; ++x) {
        if (x) oss << ',';
        const double v = loss_[y * width_ + x];
        if (!std::isnan(v)) {
          char buf[32];
          std::snprintf(buf, sizeof buf, "%.6g", v);
          oss << buf;
        }
      }
      oss << '\n';
    }
    return oss.str();
  }

 private:
  int index(Cell c) const { return c.y * width_ + c.x; }

  int width_;
  int height_;
  Cell beacon_;
  std::vector<double> loss_;
};

inline PowerField beacon_field(const Maze& maze, Cell beacon, const PropagationParams& params = {}) {
  return PowerField(maze, beacon, params);
}

}  // namespace sar
