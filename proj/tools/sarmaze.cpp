// sarmaze — generate mazes, inspect them, run swarm searches, build relay
// chains, and execute batch experiment plans. Every run is fully determined
// by its flags: identical invocations produce identical outputs.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sar/experiments.hpp"
#include "sar/maze.hpp"
#include "sar/relay.hpp"
#include "sar/signal.hpp"
#include "sar/swarm.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path + " for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
  out.flush();
  if (!out) throw std::runtime_error("write to " + path + " failed");
}

sar::Maze load_maze_file(const std::string& path) {
  try {
    return sar::load_maze(read_file(path));
  } catch (const sar::MazeParseError& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

// Options shared by every command that runs a swarm search.
struct SearchOptions {
  std::string maze_path;
  std::string policy = "iaa";
  int agents = 100;
  std::uint64_t seed = 0;
  double c = 20.0;
  double alpha = 2.0;
  int region_radius = 3;
  int comm_range = 1;
  int max_iter = 10000;

  sar::SwarmConfig config() const {
    sar::SwarmConfig cfg;
    cfg.policy = sar::parse_policy(policy);
    cfg.group_size = agents;
    cfg.c = c;
    cfg.alpha = alpha;
    cfg.region_radius = region_radius;
    cfg.comm_range = comm_range;
    cfg.max_iterations = max_iter;
    cfg.validate();
    return cfg;
  }
};

void add_search_flags(CLI::App* cmd, SearchOptions& opt) {
  cmd->add_option("--policy", opt.policy, "Move policy")
      ->transform(CLI::IsMember({"random", "aa", "iaa", "iaa-b", "iaa-r"}))
      ->capture_default_str();
  cmd->add_option("--agents", opt.agents, "Swarm size")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--seed", opt.seed, "RNG seed")->capture_default_str();
  cmd->add_option("--c", opt.c, "Unexplored-path attraction constant")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--alpha", opt.alpha, "Pheromone bias exponent")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--region-radius", opt.region_radius, "Sensing radius for iaa-r")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--comm-range", opt.comm_range, "Map-exchange radius (cells)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--max-iter", opt.max_iter, "Iteration budget")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

// Run Phase I to completion (in tick order, streaming trace rows if asked).
sar::Simulation run_phase1(const sar::Maze& maze, const sar::SwarmConfig& cfg,
                           std::uint64_t seed, std::ostream* trace) {
  sar::Simulation sim(maze, cfg, seed);
  if (trace) {
    *trace << "tick,agent,x,y,move,energy\n";
    sim.set_trace([trace](const sar::TraceEvent& ev) {
      *trace << ev.tick << ',' << ev.agent << ',' << ev.position.x << ',' << ev.position.y << ','
             << sar::name(ev.move) << ',' << sar::format6(ev.energy) << '\n';
    });
  }
  while (!sim.found() && sim.tick() < cfg.max_iterations) sim.step();
  sim.set_trace(nullptr);
  return sim;
}

std::string search_summary_csv(const sar::SearchResult& r) {
  std::ostringstream out;
  out << "found,iterations,total_steps,total_energy,coverage\n"
      << (r.found ? 1 : 0) << ',' << r.iterations << ',' << r.total_steps << ','
      << sar::format6(r.total_energy) << ',' << sar::format6(r.coverage) << '\n';
  return out.str();
}

nlohmann::json phase1_json(const sar::Maze& maze, const SearchOptions& opt,
                           const sar::SearchResult& result) {
  return nlohmann::json{{"maze", sar::save_maze(maze)},
                        {"policy", opt.policy},
                        {"agents", opt.agents},
                        {"seed", opt.seed},
                        {"c", opt.c},
                        {"alpha", opt.alpha},
                        {"region_radius", opt.region_radius},
                        {"comm_range", opt.comm_range},
                        {"max_iter", opt.max_iter},
                        {"found", result.found},
                        {"iterations", result.iterations}};
}

// --- generate ---------------------------------------------------------------

struct GenerateOptions {
  int width = 15;
  int height = 15;
  std::uint64_t seed = 0;
  std::string cls;
  std::string out;
};

int run_generate(const GenerateOptions& opt) {
  sar::Maze maze = [&] {
    if (!opt.cls.empty()) {
      for (const sar::MazeClass& c : sar::known_maze_classes())
        if (c.name == opt.cls) return sar::generate_with_complexity(c, opt.seed);
      throw std::runtime_error("unknown maze class " + opt.cls);
    }
    return sar::generate_maze(opt.width, opt.height, opt.seed);
  }();
  const std::string text = sar::save_maze(maze);
  if (opt.out.empty()) {
    std::cout << text;
  } else {
    write_file(opt.out, text);
    std::cout << maze.width() << 'x' << maze.height() << " maze, complexity "
              << sar::complexity(maze) << " -> " << opt.out << '\n';
  }
  return 0;
}

// --- complexity -------------------------------------------------------------

int run_complexity(const std::string& maze_path) {
  std::cout << sar::complexity(load_maze_file(maze_path)) << '\n';
  return 0;
}

// --- field ------------------------------------------------------------------

struct FieldOptions {
  std::string maze_path;
  bool beacon_at_target = false;
  std::string beacon;  // "x:y"
  std::string out;
};

int run_field(const FieldOptions& opt) {
  const sar::Maze maze = load_maze_file(opt.maze_path);
  sar::Cell beacon = maze.target();
  if (!opt.beacon.empty()) {
    try {
      const std::size_t colon = opt.beacon.find(':');
      if (colon == std::string::npos) throw std::invalid_argument(opt.beacon);
      beacon.x = std::stoi(opt.beacon.substr(0, colon));
      beacon.y = std::stoi(opt.beacon.substr(colon + 1));
    } catch (const std::exception&) {
      throw CLI::ValidationError("--beacon", "expects x:y, got " + opt.beacon);
    }
  }
  const std::string csv = sar::beacon_field(maze, beacon).to_csv();
  if (opt.out.empty())
    std::cout << csv;
  else
    write_file(opt.out, csv);
  return 0;
}

// --- search -----------------------------------------------------------------

struct SearchCommand {
  SearchOptions search;
  std::string csv;
  std::string trace;
  std::string out;  // Phase I JSON for later replay with `rescue --phase1-json`
};

int run_search_command(const SearchCommand& opt) {
  const sar::Maze maze = load_maze_file(opt.search.maze_path);
  const sar::SwarmConfig cfg = opt.search.config();

  std::ofstream trace_file;
  std::ostream* trace = nullptr;
  if (!opt.trace.empty()) {
    trace_file.open(opt.trace, std::ios::binary);
    if (!trace_file) throw std::runtime_error("cannot open " + opt.trace + " for writing");
    trace = &trace_file;
  }
  const sar::Simulation sim = run_phase1(maze, cfg, opt.search.seed, trace);
  if (trace) {
    trace_file.flush();
    if (!trace_file) throw std::runtime_error("write to " + opt.trace + " failed");
  }
  const sar::SearchResult result = sim.result();

  std::cout << "found=" << (result.found ? 1 : 0) << " iterations=" << result.iterations
            << " total_steps=" << result.total_steps
            << " total_energy=" << sar::format6(result.total_energy)
            << " coverage=" << sar::format6(result.coverage) << '\n';
  if (!opt.csv.empty()) write_file(opt.csv, search_summary_csv(result));
  if (!opt.out.empty()) write_file(opt.out, phase1_json(maze, opt.search, result).dump(2) + "\n");
  return 0;
}

// --- rescue -----------------------------------------------------------------

struct RescueCommand {
  SearchOptions search;
  std::string mode = "impenetrable";
  double trange = 6.0;
  std::string phase1_json_path;
  std::string csv;
};

int run_rescue(const RescueCommand& opt) {
  SearchOptions search = opt.search;
  std::optional<nlohmann::json> stored;
  if (!opt.phase1_json_path.empty()) {
    stored = nlohmann::json::parse(read_file(opt.phase1_json_path));
    search.policy = stored->at("policy").get<std::string>();
    search.agents = stored->at("agents").get<int>();
    search.seed = stored->at("seed").get<std::uint64_t>();
    search.c = stored->at("c").get<double>();
    search.alpha = stored->at("alpha").get<double>();
    search.region_radius = stored->at("region_radius").get<int>();
    search.comm_range = stored->at("comm_range").get<int>();
    search.max_iter = stored->at("max_iter").get<int>();
  }
  const sar::Maze maze = stored ? sar::load_maze(stored->at("maze").get<std::string>())
                                : load_maze_file(search.maze_path);
  const sar::SwarmConfig cfg = search.config();

  sar::Simulation sim = run_phase1(maze, cfg, search.seed, nullptr);
  if (!sim.found())
    throw std::runtime_error("target not found within " + std::to_string(cfg.max_iterations) +
                             " iterations; relay phase needs a located target");

  const sar::RelayResult relay =
      sar::stop_and_extend(sim, opt.trange, sar::parse_wall_mode(opt.mode));
  const std::string row = sar::relay_csv_row(relay);
  std::cout << row << '\n';
  if (!opt.csv.empty())
    write_file(opt.csv, "mode,trange_m,hops,total_cost_m,protocol_iterations,path\n" + row + "\n");
  return 0;
}

// --- experiment -------------------------------------------------------------

struct ExperimentCommand {
  std::string plan_path;
  int workers = 1;
  std::string csv;
  std::string stats;
  std::string long_csv;
};

int run_experiment(const ExperimentCommand& opt) {
  const sar::ExperimentPlan plan = sar::load_plan_file(opt.plan_path);
  const std::vector<sar::RunRecord> records = sar::run_plan(plan, opt.workers);

  if (opt.csv.empty()) {
    sar::write_records_csv(std::cout, records);
  } else {
    sar::write_records_csv(opt.csv, records);
    std::size_t found = 0, failed = 0;
    for (const sar::RunRecord& r : records) {
      found += r.found ? 1 : 0;
      failed += r.failure.empty() ? 0 : 1;
    }
    std::cout << records.size() << " runs, " << found << " found, " << failed
              << " failed -> " << opt.csv << '\n';
  }
  if (!opt.stats.empty()) {
    std::vector<sar::PlanCoord> by{sar::PlanCoord::MazeClass, sar::PlanCoord::Policy,
                                   sar::PlanCoord::GroupSize};
    if (!plan.wall_modes.empty()) by.push_back(sar::PlanCoord::Mode);
    sar::write_stats_csv(opt.stats, sar::aggregate(records, by));
  }
  if (!opt.long_csv.empty()) sar::write_long_csv(opt.long_csv, records);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Swarm search-and-rescue simulator for grid mazes"};
  app.require_subcommand(1);

  GenerateOptions gen;
  CLI::App* generate = app.add_subcommand("generate", "Generate a maze and write its text form");
  generate->add_option("--width", gen.width, "Maze width (cells)")
      ->check(CLI::Range(4, 1000))
      ->capture_default_str();
  generate->add_option("--height", gen.height, "Maze height (cells)")
      ->check(CLI::Range(4, 1000))
      ->capture_default_str();
  generate->add_option("--seed", gen.seed, "RNG seed")->capture_default_str();
  std::vector<std::string> class_names;
  for (const sar::MazeClass& c : sar::known_maze_classes()) class_names.push_back(c.name);
  auto* gen_class =
      generate
          ->add_option("--class", gen.cls,
                       "Named maze class (M1..M5, B8, B15) with a complexity window")
          ->transform(CLI::IsMember(class_names));
  gen_class->excludes(generate->get_option("--width"));
  gen_class->excludes(generate->get_option("--height"));
  generate->add_option("--out", gen.out, "Output path (default: stdout)");
  generate->callback([&gen] { run_generate(gen); });

  std::string complexity_maze;
  CLI::App* complexity = app.add_subcommand("complexity", "Print a maze's turn-pair complexity");
  complexity->add_option("--maze", complexity_maze, "Maze file")->required();
  complexity->callback([&complexity_maze] { run_complexity(complexity_maze); });

  FieldOptions field;
  CLI::App* field_cmd =
      app.add_subcommand("field", "Export the beacon's path-loss field as a CSV matrix");
  field_cmd->add_option("--maze", field.maze_path, "Maze file")->required();
  auto* beacon_at_target = field_cmd->add_flag(
      "--beacon-at-target", field.beacon_at_target, "Place the beacon on the target cell (default)");
  field_cmd->add_option("--beacon", field.beacon, "Beacon cell as x:y (default: the target)")
      ->excludes(beacon_at_target);
  field_cmd->add_option("--out", field.out, "Output path (default: stdout)");
  field_cmd->callback([&field] { run_field(field); });

  SearchCommand search;
  CLI::App* search_cmd = app.add_subcommand("search", "Run a swarm search until the target is found");
  search_cmd->add_option("--maze", search.search.maze_path, "Maze file")->required();
  add_search_flags(search_cmd, search.search);
  search_cmd->add_option("--csv", search.csv, "Write the run summary as CSV");
  search_cmd->add_option("--trace", search.trace, "Write per-step trace rows as CSV");
  search_cmd->add_option("--out", search.out, "Write the run's parameters as JSON for rescue --phase1-json");
  search_cmd->callback([&search] { run_search_command(search); });

  RescueCommand rescue;
  CLI::App* rescue_cmd =
      app.add_subcommand("rescue", "Run search, then build a relay chain back to the source");
  auto* rescue_maze = rescue_cmd->add_option("--maze", rescue.search.maze_path, "Maze file");
  add_search_flags(rescue_cmd, rescue.search);
  rescue_cmd->add_option("--mode", rescue.mode, "Wall handling for radio links")
      ->transform(CLI::IsMember({"impenetrable", "penetrable"}))
      ->capture_default_str();
  rescue_cmd->add_option("--trange", rescue.trange, "Transmission range (m)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  auto* phase1 = rescue_cmd->add_option("--phase1-json", rescue.phase1_json_path,
                                        "Replay a search stored by `search --out` instead of "
                                        "reading --maze and search flags");
  phase1->excludes(rescue_maze);
  rescue_cmd->add_option("--csv", rescue.csv, "Write the relay row as CSV");
  rescue_cmd->callback([&rescue, rescue_maze, phase1] {
    if (rescue_maze->empty() && phase1->empty())
      throw CLI::RequiredError("rescue: either --maze or --phase1-json");
    run_rescue(rescue);
  });

  ExperimentCommand experiment;
  CLI::App* exp_cmd = app.add_subcommand("experiment", "Execute an experiment plan file");
  exp_cmd->add_option("--plan", experiment.plan_path, "Plan file (key = value lines)")->required();
  exp_cmd->add_option("--workers", experiment.workers, "Worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  exp_cmd->add_option("--csv", experiment.csv, "Write run records CSV (default: stdout)");
  exp_cmd->add_option("--stats", experiment.stats,
                      "Write aggregate CSV grouped by class, policy, group size and mode");
  exp_cmd->add_option("--long", experiment.long_csv, "Write plot-ready long-format CSV");
  exp_cmd->callback([&experiment] { run_experiment(experiment); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "sarmaze: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
