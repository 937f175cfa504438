#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sar/rng.hpp"

namespace sar {

// Grid conventions used throughout the library:
//   x is the column index and grows east, y is the row index and grows south.
//   A cell is one agent-sized unit; cells outside the grid count as walls.

enum class Direction : int { North = 0, East = 1, South = 2, West = 3 };

inline constexpr std::array<Direction, 4> all_directions{
    Direction::North, Direction::East, Direction::South, Direction::West};

inline constexpr int dx(Direction d) {
  constexpr std::array<int, 4> k{0, 1, 0, -1};
  return k[static_cast<int>(d)];
}

inline constexpr int dy(Direction d) {
  constexpr std::array<int, 4> k{-1, 0, 1, 0};
  return k[static_cast<int>(d)];
}

inline constexpr Direction opposite(Direction d) {
  return static_cast<Direction>((static_cast<int>(d) + 2) % 4);
}

inline constexpr bool perpendicular(Direction a, Direction b) {
  return (static_cast<int>(a) + static_cast<int>(b)) % 2 == 1;
}

inline const char* name(Direction d) {
  constexpr std::array<const char*, 4> k{"N", "E", "S", "W"};
  return k[static_cast<int>(d)];
}

struct Cell {
  int x = 0;
  int y = 0;

  friend bool operator==(Cell a, Cell b) { return a.x == b.x && a.y == b.y; }
  friend bool operator!=(Cell a, Cell b) { return !(a == b); }
  // Row-major order; doubles as the tie-breaking order "lowest (y, x)".
  friend bool operator<(Cell a, Cell b) {
    return a.y != b.y ? a.y < b.y : a.x < b.x;
  }
};

inline Cell step(Cell c, Direction d) { return Cell{c.x + dx(d), c.y + dy(d)}; }

inline int chebyshev(Cell a, Cell b) {
  return std::max(std::abs(a.x - b.x), std::abs(a.y - b.y));
}

/// Center-to-center Euclidean distance in cell units.
inline double euclid(Cell a, Cell b) {
  const double ex = a.x - b.x;
  const double ey = a.y - b.y;
  return std::sqrt(ex * ex + ey * ey);
}

struct MazeParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MazeGenerationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Immutable grid world: occupancy plus a source and a target cell.
/// Construction validates that source and target are distinct free cells
/// connected by a 4-neighbor path, so a constructed maze is always solvable.
class Maze {
 public:
  Maze(int width, int height, std::vector<std::uint8_t> walls, Cell source, Cell target)
      : width_(width), height_(height), wall_(std::move(walls)), source_(source), target_(target) {
    validate();
  }

  int width() const { return width_; }
  int height() const { return height_; }
  Cell source() const { return source_; }
  Cell target() const { return target_; }

  bool in_bounds(Cell c) const {
    return c.x >= 0 && c.x < width_ && c.y >= 0 && c.y < height_;
  }
  bool is_wall(Cell c) const { return !in_bounds(c) || wall_[index(c)] != 0; }
  bool is_free(Cell c) const { return !is_wall(c); }

  int index(Cell c) const { return c.y * width_ + c.x; }

  int free_cell_count() const {
    int n = 0;
    for (std::uint8_t w : wall_) n += (w == 0);
    return n;
  }

  /// Same layout, different target. Used for the near/middle target studies.
  Maze with_target(Cell target) const { return Maze(width_, height_, wall_, source_, target); }

  friend bool operator==(const Maze& a, const Maze& b) {
    return a.width_ == b.width_ && a.height_ == b.height_ && a.wall_ == b.wall_ &&
           a.source_ == b.source_ && a.target_ == b.target_;
  }

 private:
  void validate() const {
    if (width_ < 1 || height_ < 1)
      throw std::invalid_argument("maze dimensions must be positive");
    if (wall_.size() != static_cast<std::size_t>(width_) * height_)
      throw std::invalid_argument("occupancy grid size does not match dimensions");
    if (!in_bounds(source_) || is_wall(source_))
      throw std::invalid_argument("source must be a free in-bounds cell");
    if (!in_bounds(target_) || is_wall(target_))
      throw std::invalid_argument("target must be a free in-bounds cell");
    if (source_ == target_)
      throw std::invalid_argument("source and target must be distinct");
    // Flood fill from source; a maze with an unreachable target is rejected.
    std::vector<std::uint8_t> seen(wall_.size(), 0);
    std::queue<Cell> queue;
    queue.push(source_);
    seen[index(source_)] = 1;
    while (!queue.empty()) {
      Cell c = queue.front();
      queue.pop();
      if (c == target_) return;
      for (Direction d : all_directions) {
        Cell n = step(c, d);
        if (in_bounds(n) && !is_wall(n) && !seen[index(n)]) {
          seen[index(n)] = 1;
          queue.push(n);
        }
      }
    }
    throw std::invalid_argument("unsolvable: no free path from source to target");
  }

  int width_;
  int height_;
  std::vector<std::uint8_t> wall_;
  Cell source_;
  Cell target_;
};

/// A size/complexity bucket for maze generation. Complexity targets follow
/// the turn-count metric of complexity() below.
struct MazeClass {
  std::string name;
  int width = 0;
  int height = 0;
  int target_complexity = 0;
  int tolerance = 0;
};

/// BFS hop distances over free cells from `from`; -1 where unreachable.
inline std::vector<int> bfs_distances(const Maze& maze, Cell from) {
  std::vector<int> dist(static_cast<std::size_t>(maze.width()) * maze.height(), -1);
  if (!maze.in_bounds(from) || maze.is_wall(from)) return dist;
  std::queue<Cell> queue;
  dist[maze.index(from)] = 0;
  queue.push(from);
  while (!queue.empty()) {
    Cell c = queue.front();
    queue.pop();
    for (Direction d : all_directions) {
      Cell n = step(c, d);
      if (maze.in_bounds(n) && maze.is_free(n) && dist[maze.index(n)] < 0) {
        dist[maze.index(n)] = dist[maze.index(c)] + 1;
        queue.push(n);
      }
    }
  }
  return dist;
}

/// Number of 90-degree turn opportunities over the whole layout: for every
/// free cell, count the perpendicular neighbor pairs {(N,E),(E,S),(S,W),(W,N)}
/// in which both neighbors are free.
inline int complexity(const Maze& maze) {
  constexpr std::array<std::pair<Direction, Direction>, 4> kPairs{{
      {Direction::North, Direction::East},
      {Direction::East, Direction::South},
      {Direction::South, Direction::West},
      {Direction::West, Direction::North},
  }};
  int turns = 0;
  for (int y = 0; y < maze.height(); ++y) {
    for (int x = 0; x < maze.width(); ++x) {
      Cell c{x, y};
      if (maze.is_wall(c)) continue;
      for (auto [a, b] : kPairs) {
        if (maze.is_free(step(c, a)) && maze.is_free(step(c, b))) ++turns;
      }
    }
  }
  return turns;
}

namespace detail {

// Rooms sit on odd coordinates; the cells between adjacent rooms are the
// carvable walls. For even dimensions the last odd row/column touches the
// border, which is fine: out-of-grid already acts as a wall.
inline std::vector<Cell> room_lattice(int width, int height) {
  std::vector<Cell> rooms;
  for (int y = 1; y < height; y += 2)
    for (int x = 1; x < width; x += 2) rooms.push_back(Cell{x, y});
  return rooms;
}

}  // namespace detail

/// Randomized depth-first (recursive-backtracker) block maze with an optional
/// loop-adding pass that reopens a fraction of the removable walls. The
/// source is carved as a border opening; the target lands on the free cell
/// farthest from it by BFS (ties to the lowest (y, x)).
/// Identical (width, height, seed, loop_fraction) give an identical maze.
inline Maze generate_maze(int width, int height, std::uint64_t seed,
                          double loop_fraction = 0.05) {
  if (width < 4 || height < 4)
    throw std::invalid_argument("maze dimensions below minimum of 4x4");

  Rng rng(mix64(seed));
  const auto at = [width](Cell c) { return c.y * width + c.x; };
  std::vector<std::uint8_t> wall(static_cast<std::size_t>(width) * height, 1);

  // Depth-first carve over the room lattice.
  const std::vector<Cell> rooms = detail::room_lattice(width, height);
  std::vector<std::uint8_t> visited(wall.size(), 0);
  std::vector<Cell> stack;
  Cell start = rooms[uniform_below(rng, rooms.size())];
  wall[at(start)] = 0;
  visited[at(start)] = 1;
  stack.push_back(start);
  while (!stack.empty()) {
    Cell c = stack.back();
    std::vector<Direction> open;
    for (Direction d : all_directions) {
      Cell n{c.x + 2 * dx(d), c.y + 2 * dy(d)};
      if (n.x >= 1 && n.x < width && n.y >= 1 && n.y < height && !visited[at(n)])
        open.push_back(d);
    }
    if (open.empty()) {
      stack.pop_back();
      continue;
    }
    Direction d = open[uniform_below(rng, open.size())];
    Cell mid = step(c, d);
    Cell next = step(mid, d);
    wall[at(mid)] = 0;
    wall[at(next)] = 0;
    visited[at(next)] = 1;
    stack.push_back(next);
  }

  // Loop-adding pass: open a fraction of the walls that separate two free
  // cells on opposite sides, so complexity can move past perfect-maze values.
  if (loop_fraction > 0.0) {
    std::vector<Cell> removable;
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        Cell c{x, y};
        if (!wall[at(c)]) continue;
        const bool ns = y > 0 && y + 1 < height && !wall[at(step(c, Direction::North))] &&
                        !wall[at(step(c, Direction::South))];
        const bool ew = x > 0 && x + 1 < width && !wall[at(step(c, Direction::East))] &&
                        !wall[at(step(c, Direction::West))];
        if (ns || ew) removable.push_back(c);
      }
    }
    shuffle(removable, rng);
    const auto open_count =
        static_cast<std::size_t>(loop_fraction * static_cast<double>(removable.size()) + 0.5);
    for (std::size_t i = 0; i < open_count && i < removable.size(); ++i)
      wall[at(removable[i])] = 0;
  }

  // Carve the entry: one border wall cell adjacent to a free cell.
  std::vector<Cell> openings;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (x != 0 && x != width - 1 && y != 0 && y != height - 1) continue;
      Cell c{x, y};
      if (!wall[at(c)]) continue;
      for (Direction d : all_directions) {
        Cell n = step(c, d);
        if (n.x >= 0 && n.x < width && n.y >= 0 && n.y < height && !wall[at(n)]) {
          openings.push_back(c);
          break;
        }
      }
    }
  }
  Cell source;
  if (openings.empty()) {
    // Every border cell is already free (tiny fully-open layouts): use the
    // lowest free border cell as the entry.
    for (int y = 0; y < height && wall[at(source)]; ++y)
      for (int x = 0; x < width; ++x)
        if ((x == 0 || x == width - 1 || y == 0 || y == height - 1) && !wall[y * width + x]) {
          source = Cell{x, y};
          y = height;
          break;
        }
  } else {
    source = openings[uniform_below(rng, openings.size())];
    wall[at(source)] = 0;
  }

  // Target: the free cell with maximal BFS distance from the source.
  Maze partial(width, height, wall, source,
               // Temporary placeholder target; replaced below. Any free
               // neighbor of the source works and one must exist.
               [&] {
                 for (Direction d : all_directions) {
                   Cell n = step(source, d);
                   if (n.x >= 0 && n.x < width && n.y >= 0 && n.y < height && !wall[n.y * width + n.x])
                     return n;
                 }
                 throw MazeGenerationError("generated maze has an isolated source");
               }());
  const std::vector<int> dist = bfs_distances(partial, source);
  Cell target = source;
  int best = -1;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const int d = dist[y * width + x];
      if (d > best) {
        best = d;
        target = Cell{x, y};
      }
    }
  }
  return partial.with_target(target);
}

/// Generate until the complexity lands inside [target - tol, target + tol],
/// drawing attempt seeds from a deterministic sequence derived from `seed`.
inline Maze generate_with_complexity(const MazeClass& cls, std::uint64_t seed,
                                     int max_attempts = 10000, double loop_fraction = 0.05) {
  if (cls.target_complexity <= 0)
    throw std::invalid_argument("maze class target complexity must be positive");
  if (cls.tolerance < 0) throw std::invalid_argument("maze class tolerance must be non-negative");
  std::uint64_t h = hash_string(seed, cls.name);
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    Maze maze = generate_maze(cls.width, cls.height, hash_combine(h, attempt), loop_fraction);
    const int c = complexity(maze);
    if (std::abs(c - cls.target_complexity) <= cls.tolerance) return maze;
  }
  std::ostringstream oss;
  oss << "no " << cls.width << "x" << cls.height << " maze with complexity "
      << cls.target_complexity << " +/- " << cls.tolerance << " found for class " << cls.name
      << " within " << max_attempts << " attempts";
  throw MazeGenerationError(oss.str());
}

/// In-bounds free 4-neighbors of a free cell, in fixed N, E, S, W order.
inline std::vector<std::pair<Direction, Cell>> free_neighbors(const Maze& maze, Cell cell) {
  if (!maze.in_bounds(cell) || maze.is_wall(cell))
    throw std::invalid_argument("free_neighbors requires an in-bounds free cell");
  std::vector<std::pair<Direction, Cell>> out;
  for (Direction d : all_directions) {
    Cell n = step(cell, d);
    if (maze.is_free(n)) out.emplace_back(d, n);
  }
  return out;
}

// Text form: "width height" header, then height rows of width glyphs.
// '#' wall, '.' free, 'S' source, 'T' target; exactly one S and one T.

inline std::string save_maze(const Maze& maze) {
  std::ostringstream oss;
  oss << maze.width() << ' ' << maze.height() << '\n';
  for (int y = 0; y < maze.height(); ++y) {
    for (int x = 0; x < maze.width(); ++x) {
      Cell c{x, y};
      if (c == maze.source())
        oss << 'S';
      else if (c == maze.target())
        oss << 'T';
      else
        oss << (maze.is_wall(c) ? '#' : '.');
    }
    oss << '\n';
  }
  return oss.str();
}

inline Maze load_maze(const std::string& text) {
  std::istringstream in(text);
  std::string header;
  if (!std::getline(in, header)) throw MazeParseError("line 1: missing header");
  int width = 0, height = 0;
  {
    std::istringstream hs(header);
    if (!(hs >> width >> height) || width < 1 || height < 1) {
      throw MazeParseError("line 1: header must be \"width height\" with positive integers");
    }
    std::string rest;
    if (hs >> rest) throw MazeParseError("line 1: trailing content after header");
  }

  std::vector<std::uint8_t> wall(static_cast<std::size_t>(width) * height, 1);
  std::optional<Cell> source, target;
  std::string row;
  for (int y = 0; y < height; ++y) {
    if (!std::getline(in, row)) {
      throw MazeParseError("line " + std::to_string(y + 2) + ": expected " +
                           std::to_string(height) + " rows, found " + std::to_string(y));
    }
    if (static_cast<int>(row.size()) != width) {
      throw MazeParseError("line " + std::to_string(y + 2) + ": expected " +
                           std::to_string(width) + " glyphs, got " + std::to_string(row.size()));
    }
    for (int x = 0; x < width; ++x) {
      const char g = row[x];
      const Cell c{x, y};
      switch (g) {
        case '#':
          break;
        case '.':
          wall[c.y * width + c.x] = 0;
          break;
        case 'S':
          if (source) throw MazeParseError("line " + std::to_string(y + 2) + ", column " +
                                           std::to_string(x + 1) + ": duplicate source");
          source = c;
          wall[c.y * width + c.x] = 0;
          break;
        case 'T':
          if (target) throw MazeParseError("line " + std::to_string(y + 2) + ", column " +
                                           std::to_string(x + 1) + ": duplicate target");
          target = c;
          wall[c.y * width + c.x] = 0;
          break;
        default:
          throw MazeParseError("line " + std::to_string(y + 2) + ", column " +
                               std::to_string(x + 1) + ": unknown glyph '" + g + "'");
      }
    }
  }
  while (std::getline(in, row)) {
    if (!row.empty() && row.find_first_not_of(" \t\r") != std::string::npos)
      throw MazeParseError("trailing content after row " + std::to_string(height));
  }
  if (!source) throw MazeParseError("missing source");
  if (!target) throw MazeParseError("missing target");
  try {
    return Maze(width, height, std::move(wall), *source, *target);
  } catch (const std::invalid_argument& e) {
    throw MazeParseError(e.what());
  }
}

/// Relative target positions reproducing the near / middle / far studies.
enum class TargetPlacement { FarCorner, Midway, NearSource };

/// Move the target to the free cell whose BFS distance from the source best
/// matches the placement (far: maximal; midway: half of maximal; near:
/// quarter of maximal). Ties to the lowest (y, x).
inline Maze place_target(const Maze& maze, TargetPlacement placement) {
  const std::vector<int> dist = bfs_distances(maze, maze.source());
  int max_dist = 0;
  for (int d : dist) max_dist = std::max(max_dist, d);
  double wanted = max_dist;
  if (placement == TargetPlacement::Midway) wanted = max_dist / 2.0;
  if (placement == TargetPlacement::NearSource) wanted = max_dist / 4.0;
  Cell best{};
  double best_err = -1.0;
  for (int y = 0; y < maze.height(); ++y) {
    for (int x = 0; x < maze.width(); ++x) {
      const int d = dist[y * maze.width() + x];
      if (d < 1) continue;  // walls, unreachable cells and the source itself
      const double err = std::abs(d - wanted);
      if (best_err < 0.0 || err < best_err) {
        best_err = err;
        best = Cell{x, y};
      }
    }
  }
  if (best_err < 0.0) throw std::invalid_argument("maze has no reachable cell for a target");
  return maze.with_target(best);
}

/// The five standard complexity buckets. Complexity targets are fixed;
/// dimensions were calibrated against the generator so each target sits
/// near the middle of that size's complexity distribution (28-72% of seeds
/// land inside the window, so rejection sampling stays cheap).
inline const std::array<MazeClass, 5>& standard_maze_classes() {
  static const std::array<MazeClass, 5> classes{{
      {"M1", 11, 11, 22, 2},
      {"M2", 15, 15, 47, 3},
      {"M3", 19, 19, 81, 5},
      {"M4", 25, 25, 129, 7},
      {"M5", 31, 31, 210, 11},
  }};
  return classes;
}

inline const MazeClass& maze_class_by_name(const std::string& name) {
  for (const MazeClass& c : standard_maze_classes())
    if (c.name == name) return c;
  throw std::invalid_argument("unknown maze class: " + name);
}

}  // namespace sar
