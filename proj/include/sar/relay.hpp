#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sar/maze.hpp"
#include "sar/signal.hpp"
#include "sar/swarm.hpp"

namespace sar {

/// Whether radio links may cross walls. Impenetrable demands line of sight;
/// Penetrable lets links pass through walls at the cost of the per-wall
/// attenuation, which inflates the link's effective length.
enum class WallMode { Impenetrable, Penetrable };

inline const char* name(WallMode m) {
  return m == WallMode::Impenetrable ? "impenetrable" : "penetrable";
}

inline WallMode parse_wall_mode(const std::string& s) {
  if (s == "impenetrable") return WallMode::Impenetrable;
  if (s == "penetrable") return WallMode::Penetrable;
  throw std::invalid_argument("unknown wall mode: " + s);
}

enum class NodeKind { Source, Agent, Target };

struct RelayNode {
  int id = 0;
  Cell position{};
  NodeKind kind = NodeKind::Agent;
  std::optional<int> depth;  // hops-to-source minus one; empty = unknown
};

/// Connectivity graph over {source, agents, target}. Costs are meters
/// (impenetrable) or effective meters after wall stretch (penetrable);
/// absent edges are stored as +infinity. Immutable once built.
class RelayGraph {
 public:
  RelayGraph(std::vector<RelayNode> nodes, std::vector<double> cost, double trange, WallMode mode)
      : nodes_(std::move(nodes)), cost_(std::move(cost)), trange_(trange), mode_(mode) {
    const std::size_t n = nodes_.size();
    if (cost_.size() != n * n) throw std::invalid_argument("cost matrix size mismatch");
    for (std::size_t u = 0; u < n; ++u) {
      if (cost_[u * n + u] != kNoEdge) throw std::invalid_argument("self edges are not allowed");
      for (std::size_t v = u + 1; v < n; ++v) {
        const double w = cost_[u * n + v];
        if (w != cost_[v * n + u]) throw std::invalid_argument("cost matrix must be symmetric");
        if (w == kNoEdge) continue;
        if (!(w > 0)) throw std::invalid_argument("edge costs must be positive");
        if (w > trange_) throw std::invalid_argument("edge cost exceeds transmission range");
      }
    }
  }

  static constexpr double kNoEdge = std::numeric_limits<double>::infinity();

  int size() const { return static_cast<int>(nodes_.size()); }
  const std::vector<RelayNode>& nodes() const { return nodes_; }
  const RelayNode& node(int id) const {
    check_id(id);
    return nodes_[id];
  }
  bool has_edge(int u, int v) const { return cost(u, v) != kNoEdge; }
  double cost(int u, int v) const {
    check_id(u);
    check_id(v);
    return cost_[static_cast<std::size_t>(u) * nodes_.size() + v];
  }
  double trange() const { return trange_; }
  WallMode mode() const { return mode_; }

 private:
  void check_id(int id) const {
    if (id < 0 || id >= static_cast<int>(nodes_.size()))
      throw std::invalid_argument("unknown relay node id");
  }

  std::vector<RelayNode> nodes_;
  std::vector<double> cost_;  // row-major square matrix
  double trange_;
  WallMode mode_;
};

/// Build the relay graph for a set of agent positions. Node 0 is the maze
/// source, nodes 1..k the agents in input order, node k+1 the target.
/// Impenetrable: an edge needs line of sight and Euclidean length ≤ trange.
/// Penetrable: walls are allowed; each crossed wall stretches the effective
/// length by 10^(w/28), and the edge exists when the stretched length fits
/// the range. Colocated nodes get no edge (a zero-length hop is meaningless
/// and the twin's other edges are identical anyway).
inline RelayGraph build_graph(const std::vector<Cell>& agent_positions, const Maze& maze,
                              double trange, WallMode mode,
                              const PropagationParams& params = {}) {
  if (!(trange > 0)) throw std::invalid_argument("transmission range must be positive");
  std::vector<RelayNode> nodes;
  nodes.push_back(RelayNode{0, maze.source(), NodeKind::Source, std::nullopt});
  for (const Cell& p : agent_positions) {
    if (!maze.in_bounds(p) || maze.is_wall(p))
      throw std::invalid_argument("relay nodes must stand on free cells");
    nodes.push_back(RelayNode{static_cast<int>(nodes.size()), p, NodeKind::Agent, std::nullopt});
  }
  nodes.push_back(RelayNode{static_cast<int>(nodes.size()), maze.target(), NodeKind::Target,
                            std::nullopt});

  const std::size_t n = nodes.size();
  std::vector<double> cost(n * n, RelayGraph::kNoEdge);
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = u + 1; v < n; ++v) {
      const Cell a = nodes[u].position, b = nodes[v].position;
      if (a == b) continue;
      const double d = euclid(a, b) * params.cell_size_m;
      // Every wall only lengthens a link, so anything beyond the range in
      // the open is out of range in both modes.
      if (d > trange) continue;
      const int walls = wall_count(maze, a, b);
      double w;
      if (mode == WallMode::Impenetrable) {
        if (walls > 0) continue;
        w = d;
      } else {
        // Zero-wall links keep the exact Euclidean weight (the stretch
        // factor is 1); computing it through the loss model would only add
        // rounding noise.
        w = walls == 0 ? d : effective_distance(path_loss(d, walls, params), params);
        if (w > trange) continue;
      }
      cost[u * n + v] = w;
      cost[v * n + u] = w;
    }
  }
  return RelayGraph(std::move(nodes), std::move(cost), trange, mode);
}

struct DijkstraResult {
  std::vector<int> path;  // node ids, from → to inclusive
  double cost = 0.0;
};

namespace detail {

// Textbook Dijkstra with linear-scan extraction; `allowed` masks the node
// set (the stop-and-extend exit test searches the stopped chain only).
// The scan picks the lowest id among equal tentative distances.
inline std::optional<DijkstraResult> dijkstra_masked(const RelayGraph& graph, int from, int to,
                                                     const std::vector<char>& allowed) {
  const int n = graph.size();
  graph.node(from);
  graph.node(to);
  if (!allowed[from] || !allowed[to]) return std::nullopt;
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(n, inf);
  std::vector<int> prev(n, -1);
  std::vector<char> done(n, 0);
  dist[from] = 0.0;
  for (;;) {
    int u = -1;
    for (int i = 0; i < n; ++i)
      if (allowed[i] && !done[i] && dist[i] < inf && (u < 0 || dist[i] < dist[u])) u = i;
    if (u < 0) break;
    if (u == to) break;
    done[u] = 1;
    for (int v = 0; v < n; ++v) {
      if (!allowed[v] || done[v] || !graph.has_edge(u, v)) continue;
      const double cand = dist[u] + graph.cost(u, v);
      if (cand < dist[v]) {
        dist[v] = cand;
        prev[v] = u;
      }
    }
  }
  if (dist[to] == inf) return std::nullopt;
  DijkstraResult r;
  r.cost = dist[to];
  for (int v = to; v != -1; v = prev[v]) r.path.push_back(v);
  std::reverse(r.path.begin(), r.path.end());
  return r;
}

}  // namespace detail

/// Minimum-cost path between two nodes, or nothing when unreachable.
inline std::optional<DijkstraResult> dijkstra(const RelayGraph& graph, int from, int to) {
  return detail::dijkstra_masked(graph, from, to, std::vector<char>(graph.size(), 1));
}

/// Relay depth per node: a node with a direct source edge has depth 0, each
/// further hop adds one (so depth = hop-count-to-source − 1). The source
/// itself and unreachable nodes carry no depth.
inline std::vector<std::optional<int>> compute_depths(const RelayGraph& graph, int source_id) {
  graph.node(source_id);
  const int n = graph.size();
  std::vector<int> hops(n, -1);
  std::vector<int> queue{source_id};
  hops[source_id] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const int u = queue[head];
    for (int v = 0; v < n; ++v) {
      if (hops[v] < 0 && graph.has_edge(u, v)) {
        hops[v] = hops[u] + 1;
        queue.push_back(v);
      }
    }
  }
  std::vector<std::optional<int>> depth(n);
  for (int v = 0; v < n; ++v)
    if (v != source_id && hops[v] > 0) depth[v] = hops[v] - 1;
  return depth;
}

struct RelayResult {
  WallMode mode = WallMode::Impenetrable;
  double trange = 0.0;
  std::vector<int> path_nodes;  // node ids in the final graph
  std::vector<Cell> path;       // the same path as positions, source → target
  int hops = 0;
  double total_cost = 0.0;        // meters (or effective meters)
  int protocol_iterations = 0;    // extra swarm ticks spent extending
  std::vector<int> stopped_ids;   // agent ids frozen into the relay, in stop order
};

/// Raised when the stop-and-extend tick budget runs out; carries the chain
/// built so far.
struct RelayBudgetError : std::runtime_error {
  explicit RelayBudgetError(std::vector<int> stopped)
      : std::runtime_error("relay protocol budget exhausted with a partial chain of " +
                           std::to_string(stopped.size()) + " stopped agents"),
        stopped_ids(std::move(stopped)) {}
  std::vector<int> stopped_ids;
};

/// Phase II: grow a relay chain back from the found target to the source.
///
/// The discovering agent freezes at the target. Then, repeatedly: if the
/// chain of frozen agents (plus source and target) already carries a path,
/// stop; otherwise the most recently frozen agent looks for moving agents
/// it can reach under the wall mode and freezes the one with the lowest
/// relay depth (ties to the lower id); when none is reachable the swarm
/// advances one tick and tries again. A final full-graph shortest-path run
/// (over frozen and moving agents alike) yields the returned path.
///
/// The tick budget defaults to 10× the simulation's per-phase budget.
inline RelayResult stop_and_extend(Simulation& sim, double trange, WallMode mode,
                                   long long budget_ticks = -1) {
  if (!sim.found()) throw std::invalid_argument("relay construction requires a found target");
  if (budget_ticks < 0) budget_ticks = 10LL * sim.config().max_iterations;
  const PropagationParams& params = sim.config().propagation;
  const Maze& maze = sim.maze();
  const int n_agents = static_cast<int>(sim.agents().size());
  const auto node_of = [](int agent_id) { return agent_id + 1; };
  const int source_node = 0;
  const int target_node = n_agents + 1;

  // The discovering agent: lowest id standing exactly on the target.
  int last = -1;
  for (const Agent& a : sim.agents()) {
    if (a.position == maze.target()) {
      last = a.id;
      break;
    }
  }
  if (last < 0) throw std::invalid_argument("no agent stands on the target");
  sim.stop_agent(last);
  std::vector<int> stopped{last};
  std::vector<char> in_chain(n_agents + 2, 0);
  in_chain[source_node] = 1;
  in_chain[target_node] = 1;
  in_chain[node_of(last)] = 1;

  int protocol_iterations = 0;
  for (;;) {
    std::vector<Cell> positions;
    positions.reserve(n_agents);
    for (const Agent& a : sim.agents()) positions.push_back(a.position);
    const RelayGraph graph = build_graph(positions, maze, trange, mode, params);

    // Done as soon as the frozen chain alone connects source to target.
    if (detail::dijkstra_masked(graph, source_node, target_node, in_chain)) {
      auto final_path = dijkstra(graph, source_node, target_node);
      RelayResult r;
      r.mode = mode;
      r.trange = trange;
      r.path_nodes = final_path->path;
      for (int id : final_path->path) r.path.push_back(graph.node(id).position);
      r.hops = static_cast<int>(final_path->path.size()) - 1;
      r.total_cost = final_path->cost;
      r.protocol_iterations = protocol_iterations;
      r.stopped_ids = stopped;
      return r;
    }

    // Reachable moving agents, ranked by relay depth then id.
    const auto depths = compute_depths(graph, source_node);
    int best = -1;
    long long best_depth = 0;
    for (const Agent& a : sim.agents()) {
      if (a.stopped || !graph.has_edge(node_of(last), node_of(a.id))) continue;
      const long long d =
          depths[node_of(a.id)] ? *depths[node_of(a.id)] : std::numeric_limits<int>::max();
      if (best < 0 || d < best_depth) {
        best = a.id;
        best_depth = d;
      }
    }
    if (best >= 0) {
      sim.stop_agent(best);
      stopped.push_back(best);
      in_chain[node_of(best)] = 1;
      last = best;
      continue;
    }

    // Nobody in reach: let the swarm move and try again. With every agent
    // already frozen nothing can ever change, so give up immediately.
    const bool any_moving =
        std::any_of(sim.agents().begin(), sim.agents().end(),
                    [](const Agent& a) { return !a.stopped; });
    if (!any_moving || protocol_iterations >= budget_ticks) throw RelayBudgetError(stopped);
    sim.step();
    ++protocol_iterations;
  }
}

/// CSV row: mode, trange, hops, total_cost_m, protocol_iterations, path
/// (the path as semicolon-joined "x:y" cells).
inline std::string relay_csv_row(const RelayResult& r) {
  std::ostringstream oss;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", r.trange);
  oss << name(r.mode) << ',' << buf << ',' << r.hops << ',';
  std::snprintf(buf, sizeof buf, "%.6g", r.total_cost);
  oss << buf << ',' << r.protocol_iterations << ',';
  for (std::size_t i = 0; i < r.path.size(); ++i) {
    if (i) oss << ';';
    oss << r.path[i].x << ':' << r.path[i].y;
  }
  return oss.str();
}

}  // namespace sar
