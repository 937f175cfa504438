#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sar/maze.hpp"
#include "sar/rng.hpp"
#include "sar/signal.hpp"

namespace sar {

// ---------------------------------------------------------------------------
// Policies and moves.

/// Movement policies: uniform Random, attractive pheromone following (AA),
/// inverted/repulsive (iAA), iAA with beacon-initialized pheromone (iAA-B),
/// and iAA with region-averaged sensing (iAA-R).
enum class PolicyKind { Random, AA, IAA, IAA_B, IAA_R };

inline const char* name(PolicyKind p) {
  switch (p) {
    case PolicyKind::Random: return "random";
    case PolicyKind::AA: return "aa";
    case PolicyKind::IAA: return "iaa";
    case PolicyKind::IAA_B: return "iaa-b";
    case PolicyKind::IAA_R: return "iaa-r";
  }
  return "?";
}

inline PolicyKind parse_policy(const std::string& s) {
  if (s == "random") return PolicyKind::Random;
  if (s == "aa") return PolicyKind::AA;
  if (s == "iaa") return PolicyKind::IAA;
  if (s == "iaa-b") return PolicyKind::IAA_B;
  if (s == "iaa-r") return PolicyKind::IAA_R;
  throw std::invalid_argument("unknown policy: " + s);
}

/// The five possible actions per tick, in the fixed slot order used by
/// pheromone views and move distributions: N, E, S, W, stay.
enum class Move : int { North = 0, East = 1, South = 2, West = 3, Stay = 4 };

inline constexpr bool is_stay(Move m) { return m == Move::Stay; }

inline constexpr Direction direction_of(Move m) {
  return static_cast<Direction>(static_cast<int>(m));
}

inline const char* name(Move m) {
  constexpr std::array<const char*, 5> k{"N", "E", "S", "W", "stay"};
  return k[static_cast<int>(m)];
}

// ---------------------------------------------------------------------------
// Configuration.

/// Per-move energy factors. Backward is the most expensive motion; idling
/// costs a small upkeep amount.
struct MoveCostTable {
  double forward = 1.0;
  double turn_90 = 1.5;
  double backward = 2.0;
  double stay = 0.1;

  void validate() const {
    if (forward < 0 || turn_90 < 0 || backward < 0 || stay < 0)
      throw std::invalid_argument("energy factors must be non-negative");
    if (backward < forward || backward < turn_90 || backward < stay)
      throw std::invalid_argument("backward must be the most expensive move");
  }
};

struct SwarmConfig {
  double c = 20.0;       // unexplored-path attraction constant
  double alpha = 2.0;    // pheromone bias exponent
  double deposit = 1.0;  // pheromone added per visit
  int comm_range = 1;    // Chebyshev radius for map exchange
  int region_radius = 3; // sensing radius for iAA-R
  MoveCostTable energy_costs;
  int max_iterations = 10000;
  int group_size = 1;
  PolicyKind policy = PolicyKind::IAA;
  double beacon_scale = 0.5;  // pheromone intensity per dB for iAA-B
  int detection_radius = 0;   // 0 = target found only by cell occupancy
  PropagationParams propagation;

  void validate() const {
    if (!(c > 0)) throw std::invalid_argument("c must be positive");
    if (!(alpha > 0)) throw std::invalid_argument("alpha must be positive");
    if (!(deposit > 0)) throw std::invalid_argument("deposit must be positive");
    if (group_size < 1) throw std::invalid_argument("group size must be at least 1");
    if (comm_range < 0) throw std::invalid_argument("comm range must be non-negative");
    if (region_radius < 1) throw std::invalid_argument("region radius must be at least 1");
    if (max_iterations < 1) throw std::invalid_argument("max iterations must be at least 1");
    if (beacon_scale < 0) throw std::invalid_argument("beacon scale must be non-negative");
    if (detection_radius < 0) throw std::invalid_argument("detection radius must be non-negative");
    energy_costs.validate();
    propagation.validate();
  }
};

// ---------------------------------------------------------------------------
// Pheromone maps.

/// One agent's knowledge of the world: per-cell pheromone intensity plus a
/// visited flag. Agents write only their own copy; knowledge spreads by
/// pairwise exchange.
struct PheromoneMap {
  int width = 0;
  int height = 0;
  std::vector<double> intensity;
  std::vector<std::uint8_t> visited;

  PheromoneMap() = default;
  PheromoneMap(int w, int h)
      : width(w), height(h),
        intensity(static_cast<std::size_t>(w) * h, 0.0),
        visited(static_cast<std::size_t>(w) * h, 0) {}
  explicit PheromoneMap(const Maze& maze) : PheromoneMap(maze.width(), maze.height()) {}

  int index(Cell c) const { return c.y * width + c.x; }
  bool in_bounds(Cell c) const { return c.x >= 0 && c.x < width && c.y >= 0 && c.y < height; }
  double intensity_at(Cell c) const { return in_bounds(c) ? intensity[index(c)] : 0.0; }
  bool visited_at(Cell c) const { return in_bounds(c) && visited[index(c)] != 0; }

  friend bool operator==(const PheromoneMap& a, const PheromoneMap& b) {
    return a.width == b.width && a.height == b.height && a.intensity == b.intensity &&
           a.visited == b.visited;
  }
};

/// Cell-wise union of knowledge: max intensity, OR of visited. Commutative,
/// associative and idempotent, so repeated meetings never double-count.
inline PheromoneMap merge_maps(const PheromoneMap& a, const PheromoneMap& b) {
  if (a.width != b.width || a.height != b.height)
    throw std::invalid_argument("cannot merge pheromone maps of different dimensions");
  PheromoneMap out = a;
  for (std::size_t i = 0; i < out.intensity.size(); ++i) {
    if (b.intensity[i] > out.intensity[i]) out.intensity[i] = b.intensity[i];
    out.visited[i] |= b.visited[i];
  }
  return out;
}

/// Both parties leave the meeting with the merged map.
inline void exchange_maps(PheromoneMap& a, PheromoneMap& b) {
  PheromoneMap merged = merge_maps(a, b);
  b = merged;
  a = std::move(merged);
}

/// Record a visit: add the configured pheromone amount and set visited.
inline void deposit(PheromoneMap& map, const Maze& maze, Cell cell, const SwarmConfig& config) {
  if (!maze.in_bounds(cell) || maze.is_wall(cell))
    throw std::invalid_argument("deposit requires a free in-bounds cell");
  map.intensity[map.index(cell)] += config.deposit;
  map.visited[map.index(cell)] = 1;
}

/// Pre-load a map from a beacon's loss field: intensity grows with path loss
/// (shifted so the beacon cell sits at zero). Under repulsive policies the
/// swarm then drifts down the loss gradient, toward the beacon.
inline PheromoneMap init_beacon_pheromone(const Maze& maze, const PowerField& field,
                                          double scale) {
  if (field.width() != maze.width() || field.height() != maze.height())
    throw std::invalid_argument("power field dimensions do not match the maze");
  if (scale < 0) throw std::invalid_argument("beacon scale must be non-negative");
  double min_loss = std::numeric_limits<double>::infinity();
  for (int y = 0; y < maze.height(); ++y)
    for (int x = 0; x < maze.width(); ++x)
      if (field.has_value(Cell{x, y})) min_loss = std::min(min_loss, field.at(Cell{x, y}));
  PheromoneMap map(maze);
  for (int y = 0; y < maze.height(); ++y) {
    for (int x = 0; x < maze.width(); ++x) {
      const Cell u{x, y};
      if (field.has_value(u)) map.intensity[map.index(u)] = scale * (field.at(u) - min_loss);
    }
  }
  return map;
}

// ---------------------------------------------------------------------------
// Movement mathematics.

/// Probability of taking branch A at a two-way fork given the pheromone
/// levels on each branch: (c+n_a)^alpha / ((c+n_a)^alpha + (c+n_b)^alpha).
inline double aco_fork_probability(double n_a, double n_b, double c, double alpha) {
  if (n_a < 0 || n_b < 0) throw std::invalid_argument("pheromone levels must be non-negative");
  if (!(c > 0)) throw std::invalid_argument("c must be positive");
  const double wa = std::pow(c + n_a, alpha);
  const double wb = std::pow(c + n_b, alpha);
  return wa / (wa + wb);
}

/// Which of the five moves are physically possible from `pos`: a direction
/// is admissible when the adjacent cell is free; stay always is.
inline std::array<bool, 5> admissible_moves(const Maze& maze, Cell pos) {
  if (!maze.in_bounds(pos) || maze.is_wall(pos))
    throw std::invalid_argument("agent position must be a free cell");
  std::array<bool, 5> adm{};
  for (Direction d : all_directions) adm[static_cast<int>(d)] = maze.is_free(step(pos, d));
  adm[static_cast<int>(Move::Stay)] = true;
  return adm;
}

/// The five pheromone readings (N, E, S, W, stay) a policy bases its move
/// on. Most policies read the single adjacent cell; iAA-R reads the mean
/// intensity over free cells within region_radius that lie strictly in the
/// direction's half-plane, falling back to the adjacent cell when that set
/// is empty. The stay slot always reads the agent's own cell.
inline std::array<double, 5> pheromone_view(const Maze& maze, const PheromoneMap& map, Cell pos,
                                            const SwarmConfig& config) {
  std::array<double, 5> view{};
  if (config.policy == PolicyKind::IAA_R) {
    const int r = config.region_radius;
    std::array<double, 4> sum{};
    std::array<int, 4> count{};
    for (int y = pos.y - r; y <= pos.y + r; ++y) {
      for (int x = pos.x - r; x <= pos.x + r; ++x) {
        const Cell v{x, y};
        if ((v.x == pos.x && v.y == pos.y) || !maze.in_bounds(v) || maze.is_wall(v)) continue;
        const double n = map.intensity_at(v);
        if (v.y < pos.y) { sum[0] += n; ++count[0]; }  // north half-plane
        if (v.x > pos.x) { sum[1] += n; ++count[1]; }  // east
        if (v.y > pos.y) { sum[2] += n; ++count[2]; }  // south
        if (v.x < pos.x) { sum[3] += n; ++count[3]; }  // west
      }
    }
    for (int d = 0; d < 4; ++d) {
      view[d] = count[d] ? sum[d] / count[d]
                         : map.intensity_at(step(pos, static_cast<Direction>(d)));
    }
  } else {
    for (Direction d : all_directions)
      view[static_cast<int>(d)] = map.intensity_at(step(pos, d));
  }
  view[static_cast<int>(Move::Stay)] = map.intensity_at(pos);
  return view;
}

/// Turn a pheromone view into a move distribution. AA weights (c+n)^alpha
/// (drawn toward marking), the iAA family weights (c+n)^(-alpha) (repelled
/// by marking), Random weights admissible moves uniformly. Inadmissible
/// moves get probability zero; the rest renormalize to sum 1.
inline std::array<double, 5> move_probabilities(PolicyKind policy,
                                                const std::array<double, 5>& view,
                                                const std::array<bool, 5>& admissible,
                                                const SwarmConfig& config) {
  if (!admissible[static_cast<int>(Move::Stay)])
    throw std::invalid_argument("the stay move must always be admissible");
  std::array<double, 5> weights{};
  for (int i = 0; i < 5; ++i) {
    if (!admissible[i]) continue;
    if (view[i] < 0) throw std::invalid_argument("pheromone view values must be non-negative");
    switch (policy) {
      case PolicyKind::Random:
        weights[i] = 1.0;
        break;
      case PolicyKind::AA:
        weights[i] = std::pow(config.c + view[i], config.alpha);
        break;
      case PolicyKind::IAA:
      case PolicyKind::IAA_B:
      case PolicyKind::IAA_R:
        weights[i] = std::pow(config.c + view[i], -config.alpha);
        break;
    }
  }
  double total = 0;
  for (double w : weights) total += w;
  std::array<double, 5> probs{};
  for (int i = 0; i < 5; ++i) probs[i] = weights[i] / total;
  return probs;
}

/// Roulette-wheel selection with a single uniform draw.
inline int sample_move(const std::array<double, 5>& distribution, Rng& rng) {
  double total = 0;
  for (double p : distribution) {
    if (p < 0 || !(p <= 1.0)) throw std::invalid_argument("malformed move distribution");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("move distribution must sum to 1");
  const double u = uniform_unit(rng);
  double cum = 0;
  int last_nonzero = static_cast<int>(Move::Stay);
  for (int i = 0; i < 5; ++i) {
    if (distribution[i] <= 0) continue;
    cum += distribution[i];
    last_nonzero = i;
    if (u < cum) return i;
  }
  return last_nonzero;  // numeric drift: land on the final admissible slot
}

/// Motion-based energy cost of one action, relative to the previous heading:
/// continuing straight is cheapest of the motions, right-angle turns cost
/// more, reversing costs the most, idling has a small upkeep cost.
inline double energy_of_transition(Direction prev_heading, Move move,
                                   const MoveCostTable& costs) {
  if (is_stay(move)) return costs.stay;
  const Direction d = direction_of(move);
  if (d == prev_heading) return costs.forward;
  if (d == opposite(prev_heading)) return costs.backward;
  return costs.turn_90;
}

// ---------------------------------------------------------------------------
// Simulation.

struct Agent {
  int id = 0;
  Cell position{};
  Direction heading = Direction::North;
  std::shared_ptr<PheromoneMap> map;
  double cumulative_energy = 0.0;
  long long cumulative_steps = 0;
  bool stopped = false;
};

struct TraceEvent {
  int tick = 0;
  int agent = 0;
  Cell position{};  // position after the move
  Move move = Move::Stay;
  double energy = 0.0;  // cumulative energy of this agent
};

struct SearchResult {
  bool found = false;
  int iterations = 0;
  long long total_steps = 0;
  double total_energy = 0.0;
  double coverage = 0.0;
  std::vector<Cell> final_positions;
  PheromoneMap merged_map;
};

/// One deterministic swarm run. All agents start at the source; each tick
/// they move (in id order), deposit pheromone, then exchange maps pairwise
/// within communication range (pairs in ascending id order). The target
/// counts as found when an agent stands on it (or within detection_radius).
///
/// The object is copyable: copies share immutable pheromone-map state via
/// copy-on-write and then evolve independently. This is what makes
/// comparing wall modes on an identical mid-run swarm state cheap.
class Simulation {
 public:
  Simulation(Maze maze, SwarmConfig config, std::uint64_t seed)
      : maze_(std::move(maze)), config_(std::move(config)), rng_(mix64(seed)) {
    config_.validate();
    // All agents share one initial map (beacon-seeded for iAA-B, blank
    // otherwise) carrying the injection visit at the source.
    PheromoneMap base =
        config_.policy == PolicyKind::IAA_B
            ? init_beacon_pheromone(
                  maze_, beacon_field(maze_, maze_.target(), config_.propagation),
                  config_.beacon_scale)
            : PheromoneMap(maze_);
    deposit(base, maze_, maze_.source(), config_);
    auto shared = std::make_shared<PheromoneMap>(std::move(base));
    agents_.resize(config_.group_size);
    for (int i = 0; i < config_.group_size; ++i) {
      agents_[i].id = i;
      agents_[i].position = maze_.source();
      agents_[i].map = shared;
    }
    update_found();
  }

  const Maze& maze() const { return maze_; }
  const SwarmConfig& config() const { return config_; }
  const std::vector<Agent>& agents() const { return agents_; }
  int tick() const { return tick_; }
  bool found() const { return found_; }
  /// Tick at which the target was first reached (meaningful when found()).
  int found_tick() const { return found_tick_; }

  void set_trace(std::function<void(const TraceEvent&)> sink) { trace_ = std::move(sink); }

  /// Permanently freeze an agent in place: it stops moving, depositing and
  /// exchanging. Used by the relay-construction protocol.
  void stop_agent(int id) {
    if (id < 0 || id >= static_cast<int>(agents_.size()))
      throw std::invalid_argument("no such agent");
    agents_[id].stopped = true;
  }

  /// Advance one tick; returns whether the target has been found so far.
  bool step() {
    ++tick_;
    // Movement, in ascending id order, one shared RNG stream.
    for (Agent& agent : agents_) {
      if (agent.stopped) continue;
      const auto adm = admissible_moves(maze_, agent.position);
      const auto view = pheromone_view(maze_, *agent.map, agent.position, config_);
      const auto probs = move_probabilities(config_.policy, view, adm, config_);
      const Move move = static_cast<Move>(sample_move(probs, rng_));
      agent.cumulative_energy += energy_of_transition(agent.heading, move, config_.energy_costs);
      if (!is_stay(move)) {
        agent.position = sar::step(agent.position, direction_of(move));
        agent.heading = direction_of(move);
        ++agent.cumulative_steps;
      }
      // Copy-on-write before the deposit so sharing partners keep theirs.
      if (agent.map.use_count() > 1) agent.map = std::make_shared<PheromoneMap>(*agent.map);
      deposit(*agent.map, maze_, agent.position, config_);
      if (trace_) trace_(TraceEvent{tick_, agent.id, agent.position, move, agent.cumulative_energy});
    }
    exchange_phase();
    update_found();
    return found_;
  }

  /// Fraction of free cells visited by at least one agent.
  double coverage() const {
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(maze_.width()) * maze_.height(), 0);
    for (const PheromoneMap* map : distinct_maps()) {
      for (std::size_t i = 0; i < seen.size(); ++i) seen[i] |= map->visited[i];
    }
    long long visited = 0;
    for (std::uint8_t v : seen) visited += v;
    return static_cast<double>(visited) / maze_.free_cell_count();
  }

  /// Union of every agent's knowledge.
  PheromoneMap merged_map() const {
    PheromoneMap out(maze_);
    for (const PheromoneMap* map : distinct_maps()) {
      for (std::size_t i = 0; i < out.intensity.size(); ++i) {
        if (map->intensity[i] > out.intensity[i]) out.intensity[i] = map->intensity[i];
        out.visited[i] |= map->visited[i];
      }
    }
    return out;
  }

  SearchResult result() const {
    SearchResult r;
    r.found = found_;
    r.iterations = found_ ? found_tick_ : tick_;
    for (const Agent& a : agents_) {
      r.total_steps += a.cumulative_steps;
      r.total_energy += a.cumulative_energy;
      r.final_positions.push_back(a.position);
    }
    r.coverage = coverage();
    r.merged_map = merged_map();
    return r;
  }

 private:
  // The meeting phase. Processing every in-range pair (a < b) sequentially
  // — both ends take the merge — is equivalent to tracking, per agent, the
  // set of original maps that have flowed into it (merge is associative,
  // commutative and idempotent) and handing each agent the union of its
  // final set. Doing it that way lets agents with identical final sets
  // share one physical map, which collapses the cost of dense clusters.
  void exchange_phase() {
    // Dense ids for agents that meet at least one partner this tick.
    std::vector<std::pair<int, int>> pairs;
    std::vector<int> dense(agents_.size(), -1);
    std::vector<int> members;
    const int n = static_cast<int>(agents_.size());
    for (int a = 0; a < n; ++a) {
      if (agents_[a].stopped) continue;
      for (int b = a + 1; b < n; ++b) {
        if (agents_[b].stopped) continue;
        if (chebyshev(agents_[a].position, agents_[b].position) > config_.comm_range) continue;
        for (int id : {a, b}) {
          if (dense[id] < 0) {
            dense[id] = static_cast<int>(members.size());
            members.push_back(id);
          }
        }
        pairs.emplace_back(dense[a], dense[b]);
      }
    }
    if (pairs.empty()) return;

    const int m = static_cast<int>(members.size());
    const int words = (m + 63) / 64;
    std::vector<std::uint64_t> sets(static_cast<std::size_t>(m) * words, 0);
    for (int i = 0; i < m; ++i) sets[static_cast<std::size_t>(i) * words + i / 64] |= 1ULL << (i % 64);
    for (auto [a, b] : pairs) {
      auto* ra = &sets[static_cast<std::size_t>(a) * words];
      auto* rb = &sets[static_cast<std::size_t>(b) * words];
      for (int w = 0; w < words; ++w) {
        const std::uint64_t u = ra[w] | rb[w];
        ra[w] = u;
        rb[w] = u;
      }
    }

    // Group members by final set; build each distinct union once.
    std::unordered_map<std::string, std::shared_ptr<PheromoneMap>> built;
    std::vector<std::shared_ptr<PheromoneMap>> originals(m);
    for (int i = 0; i < m; ++i) originals[i] = agents_[members[i]].map;
    for (int i = 0; i < m; ++i) {
      const char* raw = reinterpret_cast<const char*>(&sets[static_cast<std::size_t>(i) * words]);
      std::string key(raw, static_cast<std::size_t>(words) * sizeof(std::uint64_t));
      auto it = built.find(key);
      if (it == built.end()) {
        std::shared_ptr<PheromoneMap> merged;
        for (int j = 0; j < m; ++j) {
          if (!(sets[static_cast<std::size_t>(i) * words + j / 64] >> (j % 64) & 1)) continue;
          if (!merged) {
            merged = std::make_shared<PheromoneMap>(*originals[j]);
          } else {
            for (std::size_t k = 0; k < merged->intensity.size(); ++k) {
              if (originals[j]->intensity[k] > merged->intensity[k])
                merged->intensity[k] = originals[j]->intensity[k];
              merged->visited[k] |= originals[j]->visited[k];
            }
          }
        }
        it = built.emplace(std::move(key), std::move(merged)).first;
      }
      agents_[members[i]].map = it->second;
    }
  }

  void update_found() {
    if (found_) return;
    for (const Agent& a : agents_) {
      if (chebyshev(a.position, maze_.target()) <= config_.detection_radius) {
        found_ = true;
        found_tick_ = tick_;
        return;
      }
    }
  }

  std::vector<const PheromoneMap*> distinct_maps() const {
    std::vector<const PheromoneMap*> maps;
    for (const Agent& a : agents_) {
      const PheromoneMap* p = a.map.get();
      bool seen = false;
      for (const PheromoneMap* q : maps) {
        if (q == p) {
          seen = true;
          break;
        }
      }
      if (!seen) maps.push_back(p);
    }
    return maps;
  }

  Maze maze_;
  SwarmConfig config_;
  Rng rng_;
  std::vector<Agent> agents_;
  int tick_ = 0;
  bool found_ = false;
  int found_tick_ = 0;
  std::function<void(const TraceEvent&)> trace_;
};

/// Run a full search: tick until the target is found or the budget runs out.
inline SearchResult run_search(const Maze& maze, const SwarmConfig& config, std::uint64_t seed) {
  Simulation sim(maze, config, seed);
  while (!sim.found() && sim.tick() < config.max_iterations) sim.step();
  return sim.result();
}

}  // namespace sar
