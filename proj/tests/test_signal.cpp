#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "sar/maze.hpp"
#include "sar/rng.hpp"
#include "sar/signal.hpp"

using namespace sar;

namespace {

// Open room with a given size; source top-left, target bottom-right.
Maze open_room(int w, int h) {
  std::vector<std::uint8_t> walls(static_cast<std::size_t>(w) * h, 0);
  return Maze(w, h, std::move(walls), Cell{0, 0}, Cell{w - 1, h - 1});
}

Maze room_with_walls(int w, int h, const std::vector<Cell>& blocked, Cell s, Cell t) {
  std::vector<std::uint8_t> walls(static_cast<std::size_t>(w) * h, 0);
  for (Cell c : blocked) walls[c.y * w + c.x] = 1;
  return Maze(w, h, std::move(walls), s, t);
}

}  // namespace

// ---------------------------------------------------------------------------
// Wall counting.

TEST_CASE("wall_count counts interposed wall cells") {
  //  S#.
  //  ...
  //  .#T
  const Maze maze =
      room_with_walls(3, 3, {Cell{1, 0}, Cell{1, 2}}, Cell{0, 0}, Cell{2, 2});
  CHECK(wall_count(maze, Cell{0, 0}, Cell{2, 0}) == 1);
  CHECK(wall_count(maze, Cell{0, 2}, Cell{2, 2}) == 1);
  CHECK(wall_count(maze, Cell{0, 1}, Cell{2, 1}) == 0);
  CHECK(wall_count(maze, Cell{0, 0}, Cell{0, 0}) == 0);
}

TEST_CASE("wall_count on an open room is zero everywhere") {
  const Maze maze = open_room(5, 5);
  CHECK(wall_count(maze, Cell{0, 0}, Cell{4, 4}) == 0);
  CHECK(wall_count(maze, Cell{0, 4}, Cell{4, 0}) == 0);
  CHECK(wall_count(maze, Cell{2, 0}, Cell{2, 4}) == 0);
}

TEST_CASE("corner-grazing diagonal cannot slip between two corner walls") {
  //  .#.S
  //  #...   segment (0,0)->(1,1) passes exactly through the lattice corner
  //  ....   shared by the two walls; supercover charges both of them.
  const Maze maze = room_with_walls(4, 4, {Cell{1, 0}, Cell{0, 1}}, Cell{3, 0}, Cell{3, 3});
  CHECK(wall_count(maze, Cell{0, 0}, Cell{1, 1}) == 2);
  CHECK_FALSE(line_of_sight(maze, Cell{0, 0}, Cell{1, 1}));
  // A parallel diagonal clear of both walls has no obstruction, even though
  // it also grazes lattice corners (their flanking cells are free).
  CHECK(wall_count(maze, Cell{1, 2}, Cell{3, 0}) == 0);
}

TEST_CASE("wall_count endpoints must be free") {
  const Maze maze = room_with_walls(3, 3, {Cell{1, 1}}, Cell{0, 0}, Cell{2, 2});
  CHECK_THROWS_AS(wall_count(maze, Cell{1, 1}, Cell{0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(wall_count(maze, Cell{0, 0}, Cell{-1, 0}), std::invalid_argument);
}

TEST_CASE("wall_count is symmetric over random pairs") {
  const Maze maze = generate_maze(21, 21, 4242);
  std::vector<Cell> free;
  for (int y = 0; y < maze.height(); ++y)
    for (int x = 0; x < maze.width(); ++x)
      if (maze.is_free(Cell{x, y})) free.push_back(Cell{x, y});
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const Cell a = free[uniform_below(rng, free.size())];
    const Cell b = free[uniform_below(rng, free.size())];
    REQUIRE(wall_count(maze, a, b) == wall_count(maze, b, a));
  }
}

// ---------------------------------------------------------------------------
// Path loss. Reference values evaluated by hand from the formula.

TEST_CASE("path_loss reference points") {
  const PropagationParams p;
  CHECK_THAT(path_loss(1.0, 0, p), Catch::Matchers::WithinAbs(39.6042, 1e-4));
  CHECK_THAT(path_loss(10.0, 0, p), Catch::Matchers::WithinAbs(67.6042, 1e-4));
  CHECK_THAT(path_loss(1.0, 1, p), Catch::Matchers::WithinAbs(44.0391, 1e-4));
}

TEST_CASE("path_loss is strictly monotone in distance and walls") {
  const PropagationParams p;
  double prev = path_loss(0.25, 0, p);
  for (double d = 0.5; d <= 64.0; d *= 2.0) {
    const double cur = path_loss(d, 0, p);
    CHECK(cur > prev);
    prev = cur;
  }
  for (int c = 0; c < 5; ++c) CHECK(path_loss(3.0, c + 1, p) > path_loss(3.0, c, p));
}

TEST_CASE("path_loss rejects non-positive distance") {
  CHECK_THROWS_AS(path_loss(0.0, 0), std::domain_error);
  CHECK_THROWS_AS(path_loss(-1.0, 0), std::domain_error);
}

// ---------------------------------------------------------------------------
// Inversion.

TEST_CASE("effective_distance round-trips exactly in consistent mode") {
  const PropagationParams p;
  for (double d = 0.5; d <= 100.0; d += 0.7) {
    const double back = effective_distance(path_loss(d, 0, p), p);
    CHECK_THAT(back, Catch::Matchers::WithinAbs(d, 1e-9));
  }
}

TEST_CASE("each wall stretches the effective link by a fixed factor") {
  const PropagationParams p;
  const double stretch = std::pow(10.0, p.wall_attenuation_db / 28.0);
  for (int c = 0; c <= 3; ++c) {
    for (double d : {1.0, 2.5, 7.5, 30.0}) {
      const double eff = effective_distance(path_loss(d, c, p), p);
      CHECK_THAT(eff / d, Catch::Matchers::WithinRel(std::pow(stretch, c), 1e-9));
    }
  }
  CHECK_THAT(effective_distance(path_loss(1.0, 1, p), p),
             Catch::Matchers::WithinAbs(1.4403, 1e-3));
}

TEST_CASE("divisor-20 mode matches the alternative printed form") {
  const PropagationParams p;
  CHECK_THAT(effective_distance(67.6042, p, InversionMode::Divisor20),
             Catch::Matchers::WithinAbs(25.119, 1e-2));
  // At zero walls the divisor-20 inverse returns d^1.4, not d.
  const double d = 10.0;
  CHECK_THAT(effective_distance(path_loss(d, 0, p), p, InversionMode::Divisor20),
             Catch::Matchers::WithinRel(std::pow(d, 1.4), 1e-9));
}

// ---------------------------------------------------------------------------
// Beacon field.

TEST_CASE("open-room field grows with distance and has its minimum at the beacon") {
  const Maze maze = open_room(9, 9);
  const Cell beacon{4, 4};
  const PowerField field = beacon_field(maze, beacon);
  struct Sample {
    double dist;
    double loss;
  };
  std::vector<Sample> samples;
  for (int y = 0; y < 9; ++y)
    for (int x = 0; x < 9; ++x)
      samples.push_back({euclid(Cell{x, y}, beacon), field.at(Cell{x, y})});
  std::sort(samples.begin(), samples.end(),
            [](const Sample& a, const Sample& b) { return a.dist < b.dist; });
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (samples[i].dist > samples[i - 1].dist + 1e-12) {
      CHECK(samples[i].loss > samples[i - 1].loss);
    } else {
      CHECK_THAT(samples[i].loss, Catch::Matchers::WithinAbs(samples[i - 1].loss, 1e-12));
    }
  }
  // Beacon cell is the global minimum.
  double min_loss = samples[0].loss;
  for (const Sample& s : samples) min_loss = std::min(min_loss, s.loss);
  CHECK_THAT(field.at(beacon), Catch::Matchers::WithinAbs(min_loss, 1e-12));
}

TEST_CASE("a wall at equal distance costs exactly the wall attenuation") {
  // 9x9 room, beacon centre, single wall straight above the beacon.
  const Maze maze = room_with_walls(9, 9, {Cell{4, 2}}, Cell{0, 0}, Cell{8, 8});
  const Cell beacon{4, 4};
  const PowerField field = beacon_field(maze, beacon);
  const PropagationParams p;
  // (4,0) is 4 cells away through the wall; (0,4) is 4 cells away in the open.
  CHECK_THAT(field.at(Cell{4, 0}) - field.at(Cell{0, 4}),
             Catch::Matchers::WithinAbs(p.wall_attenuation_db, 1e-9));
}

TEST_CASE("field stores NaN at walls and rejects a beacon on a wall") {
  const Maze maze = room_with_walls(5, 5, {Cell{2, 2}}, Cell{0, 0}, Cell{4, 4});
  const PowerField field = beacon_field(maze, Cell{0, 1});
  CHECK_FALSE(field.has_value(Cell{2, 2}));
  CHECK(std::isnan(field.at(Cell{2, 2})));
  CHECK(std::isnan(field.at(Cell{9, 9})));
  CHECK(field.has_value(Cell{1, 1}));
  CHECK_THROWS_AS(beacon_field(maze, Cell{2, 2}), std::invalid_argument);
}

TEST_CASE("field CSV has one row per grid row and blanks for walls") {
  const Maze maze = room_with_walls(3, 2, {Cell{1, 0}}, Cell{0, 0}, Cell{2, 1});
  const PowerField field = beacon_field(maze, Cell{0, 0});
  const std::string csv = field.to_csv();
  std::istringstream in(csv);
  std::string line;
  std::vector<std::string> rows;
  while (std::getline(in, line)) rows.push_back(line);
  REQUIRE(rows.size() == 2);
  // Row 0: value, empty, value.
  const auto comma1 = rows[0].find(',');
  const auto comma2 = rows[0].find(',', comma1 + 1);
  REQUIRE(comma2 != std::string::npos);
  CHECK(comma2 == comma1 + 1);  // middle field empty
  CHECK(comma1 > 0);
  // All three fields of row 1 non-empty.
  CHECK(rows[1].find(",,") == std::string::npos);
  CHECK(rows[1].front() != ',');
  CHECK(rows[1].back() != ',');
}

TEST_CASE("beacon cell distance clamp uses half a cell") {
  const Maze maze = open_room(3, 3);
  const PropagationParams p;
  const PowerField field = beacon_field(maze, Cell{1, 1}, p);
  CHECK_THAT(field.at(Cell{1, 1}), Catch::Matchers::WithinAbs(path_loss(0.5, 0, p), 1e-12));
}

// ---------------------------------------------------------------------------
// Line of sight.

TEST_CASE("line_of_sight basics") {
  const Maze maze = room_with_walls(3, 3, {Cell{1, 0}}, Cell{0, 0}, Cell{2, 2});
  CHECK(line_of_sight(maze, Cell{0, 0}, Cell{0, 1}));   // adjacent
  CHECK(line_of_sight(maze, Cell{0, 0}, Cell{0, 0}));   // reflexive
  CHECK_FALSE(line_of_sight(maze, Cell{0, 0}, Cell{2, 0}));  // through the wall
  CHECK(line_of_sight(maze, Cell{0, 2}, Cell{2, 2}));
  // Symmetry spot-checks.
  CHECK(line_of_sight(maze, Cell{2, 0}, Cell{0, 0}) == line_of_sight(maze, Cell{0, 0}, Cell{2, 0}));
}

TEST_CASE("propagation parameter validation") {
  PropagationParams p;
  p.frequency_mhz = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {};
  p.wall_attenuation_db = -1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {};
  p.cell_size_m = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}
