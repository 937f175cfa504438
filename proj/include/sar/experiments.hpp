#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "sar/maze.hpp"
#include "sar/relay.hpp"
#include "sar/rng.hpp"
#include "sar/swarm.hpp"

namespace sar {

// ---------------------------------------------------------------------------
// Numeric formatting. Float metrics are quantized to 6 significant digits
// the moment a record is created, so the CSV text (printed with %.6g) is an
// exact representation: aggregates over written-then-reparsed records equal
// aggregates over in-memory records bit for bit.

inline std::string format6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline double quantize6(double v) { return std::strtod(format6(v).c_str(), nullptr); }

// ---------------------------------------------------------------------------
// Plans.

/// A full sweep: every combination of maze class, layout, policy, group
/// size, repetition and (optionally) wall mode becomes one run.
struct ExperimentPlan {
  std::vector<MazeClass> maze_classes;
  int layouts_per_class = 10;
  int repetitions = 50;
  std::vector<int> group_sizes{100, 200, 300, 400, 500, 600};
  std::vector<PolicyKind> policies;
  std::vector<WallMode> wall_modes;  // empty: search phase only
  double trange = 6.0;
  std::uint64_t base_seed = 0;
  /// Template for per-run simulation settings; policy and group_size are
  /// overwritten by the tuple coordinates.
  SwarmConfig base_config;

  void validate() const {
    if (maze_classes.empty()) throw std::invalid_argument("plan needs at least one maze class");
    if (policies.empty()) throw std::invalid_argument("plan needs at least one policy");
    if (group_sizes.empty()) throw std::invalid_argument("plan needs at least one group size");
    if (layouts_per_class < 1) throw std::invalid_argument("layouts must be at least 1");
    if (repetitions < 1) throw std::invalid_argument("repetitions must be at least 1");
    if (!(trange > 0)) throw std::invalid_argument("trange must be positive");
    for (int g : group_sizes)
      if (g < 1) throw std::invalid_argument("group sizes must be at least 1");
  }

  std::size_t run_count() const {
    const std::size_t modes = wall_modes.empty() ? 1 : wall_modes.size();
    return maze_classes.size() * layouts_per_class * policies.size() * group_sizes.size() *
           static_cast<std::size_t>(repetitions) * modes;
  }
};

/// Seed for a maze layout: a function of the base seed, class and layout
/// index only, so every policy/group/repetition sees the same layouts.
inline std::uint64_t layout_seed(std::uint64_t base, const MazeClass& cls, int layout) {
  std::uint64_t h = hash_combine(base, 0x4c41594f55545331ULL);  // domain tag
  h = hash_string(h, cls.name);
  return hash_combine(h, static_cast<std::uint64_t>(layout));
}

/// Seed for one run. Wall mode is deliberately excluded: both modes replay
/// the identical search phase and differ only in relay construction.
inline std::uint64_t run_seed(std::uint64_t base, const MazeClass& cls, int layout,
                              PolicyKind policy, int group_size, int repetition) {
  std::uint64_t h = hash_combine(base, 0x52554e5345454431ULL);  // domain tag
  h = hash_string(h, cls.name);
  h = hash_combine(h, static_cast<std::uint64_t>(layout));
  h = hash_string(h, name(policy));
  h = hash_combine(h, static_cast<std::uint64_t>(group_size));
  return hash_combine(h, static_cast<std::uint64_t>(repetition));
}

// ---------------------------------------------------------------------------
// Records.

/// One run's coordinates and metrics. Float metrics are stored 6-digit
/// quantized (see above). duration_s is wall-clock bookkeeping and is
/// deliberately kept out of the CSV so outputs stay byte-reproducible.
struct RunRecord {
  std::string maze_class;
  int layout = 0;
  PolicyKind policy = PolicyKind::IAA;
  int group_size = 0;
  int repetition = 0;
  std::optional<WallMode> mode;
  std::uint64_t seed = 0;
  int maze_complexity = 0;

  bool found = false;
  int iterations = 0;
  long long total_steps = 0;
  double total_energy = 0.0;
  double coverage = 0.0;

  bool relay_ok = false;
  int hops = 0;
  double relay_cost = 0.0;
  int protocol_iterations = 0;
  std::string failure;  // "", "not-found", "relay-budget"

  double duration_s = 0.0;  // in-memory only
};

/// Execute every run in the plan. Records come back in tuple order
/// (classes, layouts, policies, groups, repetitions, modes — innermost
/// last) no matter how many workers execute them. Run failures (target
/// not found, relay budget exhausted) become rows with a failure reason.
inline std::vector<RunRecord> run_plan(
    const ExperimentPlan& plan, int workers = 1,
    const std::function<void(std::size_t, std::size_t)>& progress = nullptr) {
  plan.validate();
  if (workers < 1) throw std::invalid_argument("workers must be at least 1");

  // The layouts are shared by every run, so build them first.
  std::vector<std::vector<Maze>> layout_mazes;
  for (const MazeClass& cls : plan.maze_classes) {
    std::vector<Maze> mazes;
    for (int l = 0; l < plan.layouts_per_class; ++l)
      mazes.push_back(generate_with_complexity(cls, layout_seed(plan.base_seed, cls, l)));
    layout_mazes.push_back(std::move(mazes));
  }

  struct Job {
    std::size_t slot;
    std::size_t cls;
    int layout;
    PolicyKind policy;
    int group;
    int repetition;
  };
  std::vector<Job> jobs;
  const std::size_t modes = plan.wall_modes.empty() ? 1 : plan.wall_modes.size();
  {
    std::size_t slot = 0;
    for (std::size_t c = 0; c < plan.maze_classes.size(); ++c)
      for (int l = 0; l < plan.layouts_per_class; ++l)
        for (PolicyKind p : plan.policies)
          for (int g : plan.group_sizes)
            for (int r = 0; r < plan.repetitions; ++r) {
              jobs.push_back(Job{slot, c, l, p, g, r});
              slot += modes;  // one record per wall mode, adjacent slots
            }
  }

  std::vector<RunRecord> records(plan.run_count());
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;

  const auto work = [&]() {
    for (;;) {
      const std::size_t j = next.fetch_add(1);
      if (j >= jobs.size()) return;
      const Job& job = jobs[j];
      const MazeClass& cls = plan.maze_classes[job.cls];
      const Maze& maze = layout_mazes[job.cls][job.layout];
      const auto t0 = std::chrono::steady_clock::now();

      SwarmConfig cfg = plan.base_config;
      cfg.policy = job.policy;
      cfg.group_size = job.group;
      const std::uint64_t seed =
          run_seed(plan.base_seed, cls, job.layout, job.policy, job.group, job.repetition);

      RunRecord base;
      base.maze_class = cls.name;
      base.layout = job.layout;
      base.policy = job.policy;
      base.group_size = job.group;
      base.repetition = job.repetition;
      base.seed = seed;
      base.maze_complexity = complexity(maze);

      Simulation sim(maze, cfg, seed);
      while (!sim.found() && sim.tick() < cfg.max_iterations) sim.step();
      const SearchResult sr = sim.result();
      base.found = sr.found;
      base.iterations = sr.iterations;
      base.total_steps = sr.total_steps;
      base.total_energy = quantize6(sr.total_energy);
      base.coverage = quantize6(sr.coverage);

      if (plan.wall_modes.empty()) {
        base.duration_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        records[job.slot] = base;
      } else {
        for (std::size_t m = 0; m < plan.wall_modes.size(); ++m) {
          RunRecord rec = base;
          rec.mode = plan.wall_modes[m];
          if (!sr.found) {
            rec.failure = "not-found";
          } else {
            Simulation relay_sim = sim;  // each mode replays the same search state
            try {
              const RelayResult rr = stop_and_extend(relay_sim, plan.trange, plan.wall_modes[m]);
              rec.relay_ok = true;
              rec.hops = rr.hops;
              rec.relay_cost = quantize6(rr.total_cost);
              rec.protocol_iterations = rr.protocol_iterations;
            } catch (const RelayBudgetError&) {
              rec.failure = "relay-budget";
            }
          }
          rec.duration_s =
              std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
          records[job.slot + m] = rec;
        }
      }
      const std::size_t finished = done.fetch_add(1) + 1;
      if (progress) {
        std::lock_guard<std::mutex> lock(progress_mutex);
        progress(finished, jobs.size());
      }
    }
  };

  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }
  return records;
}

// ---------------------------------------------------------------------------
// Aggregation.

enum class PlanCoord { MazeClass, Layout, Policy, GroupSize, Repetition, Mode };

struct MetricStats {
  double mean = 0.0;
  double stddev = 0.0;  // population standard deviation
  double min = 0.0;
  double max = 0.0;
  long long count = 0;
};

struct AggregateStats {
  std::string key;        // e.g. "maze_class=M1|group_size=100"
  long long rows = 0;     // records in the group
  long long failures = 0; // not-found rows plus failed relay rows
  MetricStats iterations, steps, energy, coverage;      // over found rows
  MetricStats hops, relay_cost, protocol_iterations;    // over successful relay rows
};

namespace detail {

inline MetricStats stats_of(const std::vector<double>& values) {
  MetricStats s;
  s.count = static_cast<long long>(values.size());
  if (values.empty()) return s;
  double sum = 0;
  s.min = values.front();
  s.max = values.front();
  for (double v : values) {
    sum += v;
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
  }
  s.mean = sum / static_cast<double>(values.size());
  double sq = 0;
  for (double v : values) sq += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(sq / static_cast<double>(values.size()));
  return s;
}

}  // namespace detail

/// Group records by a subset of their coordinates and compute exact
/// per-group statistics. Search metrics cover found rows; relay metrics
/// cover successful relay rows; everything else lands in `failures`.
inline std::vector<AggregateStats> aggregate(const std::vector<RunRecord>& records,
                                             const std::vector<PlanCoord>& group_by) {
  struct Bucket {
    long long rows = 0;
    long long failures = 0;
    std::vector<double> iterations, steps, energy, coverage;
    std::vector<double> hops, relay_cost, protocol_iterations;
  };
  std::map<std::string, Bucket> buckets;
  for (const RunRecord& r : records) {
    std::string key;
    for (PlanCoord c : group_by) {
      if (!key.empty()) key += '|';
      switch (c) {
        case PlanCoord::MazeClass: key += "maze_class=" + r.maze_class; break;
        case PlanCoord::Layout: key += "layout=" + std::to_string(r.layout); break;
        case PlanCoord::Policy: key += std::string("policy=") + name(r.policy); break;
        case PlanCoord::GroupSize: key += "group_size=" + std::to_string(r.group_size); break;
        case PlanCoord::Repetition: key += "repetition=" + std::to_string(r.repetition); break;
        case PlanCoord::Mode:
          key += std::string("mode=") + (r.mode ? name(*r.mode) : "");
          break;
      }
    }
    Bucket& b = buckets[key];
    ++b.rows;
    const bool relay_expected = r.mode.has_value();
    if (!r.found || (relay_expected && !r.relay_ok)) ++b.failures;
    if (r.found) {
      b.iterations.push_back(r.iterations);
      b.steps.push_back(static_cast<double>(r.total_steps));
      b.energy.push_back(r.total_energy);
      b.coverage.push_back(r.coverage);
    }
    if (r.relay_ok) {
      b.hops.push_back(r.hops);
      b.relay_cost.push_back(r.relay_cost);
      b.protocol_iterations.push_back(r.protocol_iterations);
    }
  }
  std::vector<AggregateStats> out;
  for (auto& [key, b] : buckets) {
    AggregateStats s;
    s.key = key;
    s.rows = b.rows;
    s.failures = b.failures;
    s.iterations = detail::stats_of(b.iterations);
    s.steps = detail::stats_of(b.steps);
    s.energy = detail::stats_of(b.energy);
    s.coverage = detail::stats_of(b.coverage);
    s.hops = detail::stats_of(b.hops);
    s.relay_cost = detail::stats_of(b.relay_cost);
    s.protocol_iterations = detail::stats_of(b.protocol_iterations);
    out.push_back(std::move(s));
  }
  return out;  // std::map iteration ⇒ sorted by key, deterministic
}

/// The small two-maze benchmark sweep: 8×8 and 15×15 layouts, tiny groups,
/// repulsive policy with and without beacon initialization. Steps-to-solve
/// is the headline metric; search phase only.
inline ExperimentPlan benchmark_plan(std::uint64_t base_seed = 0) {
  ExperimentPlan plan;
  plan.maze_classes = {MazeClass{"B8", 8, 8, 14, 1}, MazeClass{"B15", 15, 15, 44, 3}};
  plan.layouts_per_class = 1;
  plan.group_sizes = {2, 5, 10};
  plan.policies = {PolicyKind::IAA, PolicyKind::IAA_B};
  plan.base_seed = base_seed;
  return plan;
}

/// Maze classes addressable by name in plan files: the five standard
/// complexity buckets plus the two benchmark sizes.
inline std::vector<MazeClass> known_maze_classes() {
  std::vector<MazeClass> all(standard_maze_classes().begin(), standard_maze_classes().end());
  all.push_back(MazeClass{"B8", 8, 8, 14, 1});
  all.push_back(MazeClass{"B15", 15, 15, 44, 3});
  return all;
}

// ---------------------------------------------------------------------------
// CSV output.
//
// Record columns, in order:
//   maze_class,layout,policy,group_size,repetition,mode,seed,maze_complexity,
//   found,iterations,total_steps,total_energy,coverage,
//   relay_ok,hops,relay_cost_m,protocol_iterations,failure
// mode and the relay columns are empty for search-only rows; hops,
// relay_cost_m and protocol_iterations are empty when the relay failed.

inline const char* record_csv_header() {
  return "maze_class,layout,policy,group_size,repetition,mode,seed,maze_complexity,"
         "found,iterations,total_steps,total_energy,coverage,"
         "relay_ok,hops,relay_cost_m,protocol_iterations,failure";
}

inline void write_records_csv(std::ostream& out, const std::vector<RunRecord>& records) {
  out << record_csv_header() << '\n';
  for (const RunRecord& r : records) {
    out << r.maze_class << ',' << r.layout << ',' << name(r.policy) << ',' << r.group_size << ','
        << r.repetition << ',' << (r.mode ? name(*r.mode) : "") << ',' << r.seed << ','
        << r.maze_complexity << ',' << (r.found ? 1 : 0) << ',' << r.iterations << ','
        << r.total_steps << ',' << format6(r.total_energy) << ',' << format6(r.coverage) << ',';
    if (r.mode) {
      out << (r.relay_ok ? 1 : 0) << ',';
      if (r.relay_ok)
        out << r.hops << ',' << format6(r.relay_cost) << ',' << r.protocol_iterations;
      else
        out << ",,";
    } else {
      out << ",,,";
    }
    out << ',' << r.failure << '\n';
  }
}

/// Aggregate columns: group key, row/failure counts, then mean/std/min/max/
/// count blocks for each metric in the order iterations, steps, energy,
/// coverage, hops, relay_cost, protocol_iterations.
inline void write_stats_csv(std::ostream& out, const std::vector<AggregateStats>& stats) {
  out << "group,rows,failures";
  for (const char* metric : {"iterations", "steps", "energy", "coverage", "hops", "relay_cost",
                             "protocol_iterations"}) {
    out << ',' << metric << "_mean," << metric << "_std," << metric << "_min," << metric
        << "_max," << metric << "_count";
  }
  out << '\n';
  const auto block = [&out](const MetricStats& m) {
    out << ',' << format6(m.mean) << ',' << format6(m.stddev) << ',' << format6(m.min) << ','
        << format6(m.max) << ',' << m.count;
  };
  for (const AggregateStats& s : stats) {
    out << s.key << ',' << s.rows << ',' << s.failures;
    block(s.iterations);
    block(s.steps);
    block(s.energy);
    block(s.coverage);
    block(s.hops);
    block(s.relay_cost);
    block(s.protocol_iterations);
    out << '\n';
  }
}

/// Plot-ready long format: one metric per row.
/// Columns: maze_class,layout,policy,group_size,repetition,mode,metric,value
inline void write_long_csv(std::ostream& out, const std::vector<RunRecord>& records) {
  out << "maze_class,layout,policy,group_size,repetition,mode,metric,value\n";
  for (const RunRecord& r : records) {
    const auto row = [&](const char* metric, const std::string& value) {
      out << r.maze_class << ',' << r.layout << ',' << name(r.policy) << ',' << r.group_size
          << ',' << r.repetition << ',' << (r.mode ? name(*r.mode) : "") << ',' << metric << ','
          << value << '\n';
    };
    row("found", std::to_string(r.found ? 1 : 0));
    row("iterations", std::to_string(r.iterations));
    row("total_steps", std::to_string(r.total_steps));
    row("total_energy", format6(r.total_energy));
    row("coverage", format6(r.coverage));
    if (r.relay_ok) {
      row("hops", std::to_string(r.hops));
      row("relay_cost_m", format6(r.relay_cost));
      row("protocol_iterations", std::to_string(r.protocol_iterations));
    }
  }
}

namespace detail {

inline void write_file(const std::string& path, const std::function<void(std::ostream&)>& fn) {
  std::ofstream out(path, std::ios::binary);  // binary: keep '\n' endings everywhere
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  fn(out);
  out.flush();
  if (!out) throw std::runtime_error("write to " + path + " failed");
}

}  // namespace detail

inline void write_records_csv(const std::string& path, const std::vector<RunRecord>& records) {
  detail::write_file(path, [&](std::ostream& o) { write_records_csv(o, records); });
}
inline void write_stats_csv(const std::string& path, const std::vector<AggregateStats>& stats) {
  detail::write_file(path, [&](std::ostream& o) { write_stats_csv(o, stats); });
}
inline void write_long_csv(const std::string& path, const std::vector<RunRecord>& records) {
  detail::write_file(path, [&](std::ostream& o) { write_long_csv(o, records); });
}

// ---------------------------------------------------------------------------
// CSV input (round-trip support).

inline std::vector<RunRecord> read_records_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("record CSV is empty");
  if (line != record_csv_header())
    throw std::runtime_error("record CSV header does not match the documented columns");
  std::vector<RunRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::size_t start = 0;
    for (;;) {
      const std::size_t comma = line.find(',', start);
      f.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (f.size() != 18)
      throw std::runtime_error("record CSV row has " + std::to_string(f.size()) +
                               " fields, expected 18");
    RunRecord r;
    r.maze_class = f[0];
    r.layout = std::stoi(f[1]);
    r.policy = parse_policy(f[2]);
    r.group_size = std::stoi(f[3]);
    r.repetition = std::stoi(f[4]);
    if (!f[5].empty()) r.mode = parse_wall_mode(f[5]);
    r.seed = std::stoull(f[6]);
    r.maze_complexity = std::stoi(f[7]);
    r.found = f[8] == "1";
    r.iterations = std::stoi(f[9]);
    r.total_steps = std::stoll(f[10]);
    r.total_energy = std::strtod(f[11].c_str(), nullptr);
    r.coverage = std::strtod(f[12].c_str(), nullptr);
    r.relay_ok = f[13] == "1";
    if (r.relay_ok) {
      r.hops = std::stoi(f[14]);
      r.relay_cost = std::strtod(f[15].c_str(), nullptr);
      r.protocol_iterations = std::stoi(f[16]);
    }
    r.failure = f[17];
    records.push_back(std::move(r));
  }
  return records;
}

inline std::vector<RunRecord> read_records_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path + " for reading");
  return read_records_csv(in);
}

// ---------------------------------------------------------------------------
// Plan files. Grammar: one "key = value" per line; lists are
// comma-separated; '#' starts a comment; blank lines ignored.
//
//   classes      = M1, M2           (class names; see known_maze_classes)
//   layouts      = 10
//   repetitions  = 50
//   groups       = 100, 200, 300
//   policies     = iaa, iaa-b
//   modes        = impenetrable, penetrable   (omit for search-only plans)
//   trange       = 6.0
//   seed         = 42
//   max_iter     = 10000
//   comm_range   = 1
//   c            = 20
//   alpha        = 2
//   region_radius = 3
//   beacon_scale = 0.5
//   deposit      = 1.0

inline ExperimentPlan parse_plan_file(const std::string& text) {
  ExperimentPlan plan;
  bool have_classes = false, have_policies = false;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  const auto fail = [&lineno](const std::string& what) {
    throw std::invalid_argument("plan line " + std::to_string(lineno) + ": " + what);
  };
  const auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    const auto b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  const auto split_list = [&trim](const std::string& s) {
    std::vector<std::string> items;
    std::size_t start = 0;
    for (;;) {
      const std::size_t comma = s.find(',', start);
      items.push_back(trim(s.substr(start, comma - start)));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    return items;
  };
  const auto to_int = [&fail](const std::string& s) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      fail("expected an integer, got \"" + s + "\"");
      return 0;  // unreachable
    }
  };
  const auto to_double = [&fail](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      fail("expected a number, got \"" + s + "\"");
      return 0.0;  // unreachable
    }
  };
  const auto to_u64 = [&fail](const std::string& s) {
    try {
      std::size_t used = 0;
      const std::uint64_t v = std::stoull(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      fail("expected an unsigned integer, got \"" + s + "\"");
      return std::uint64_t{0};  // unreachable
    }
  };

  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) fail("expected \"key = value\"");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (value.empty()) fail("empty value for " + key);

    if (key == "classes") {
      plan.maze_classes.clear();
      const auto known = known_maze_classes();
      for (const std::string& item : split_list(value)) {
        bool matched = false;
        for (const MazeClass& cls : known) {
          if (cls.name == item) {
            plan.maze_classes.push_back(cls);
            matched = true;
            break;
          }
        }
        if (!matched) fail("unknown maze class " + item);
      }
      have_classes = true;
    } else if (key == "layouts") {
      plan.layouts_per_class = to_int(value);
    } else if (key == "repetitions") {
      plan.repetitions = to_int(value);
    } else if (key == "groups") {
      plan.group_sizes.clear();
      for (const std::string& item : split_list(value)) plan.group_sizes.push_back(to_int(item));
    } else if (key == "policies") {
      plan.policies.clear();
      for (const std::string& item : split_list(value)) {
        try {
          plan.policies.push_back(parse_policy(item));
        } catch (const std::exception&) {
          fail("unknown policy " + item);
        }
      }
      have_policies = true;
    } else if (key == "modes") {
      plan.wall_modes.clear();
      for (const std::string& item : split_list(value)) {
        try {
          plan.wall_modes.push_back(parse_wall_mode(item));
        } catch (const std::exception&) {
          fail("unknown wall mode " + item);
        }
      }
    } else if (key == "trange") {
      plan.trange = to_double(value);
    } else if (key == "seed") {
      plan.base_seed = to_u64(value);
    } else if (key == "max_iter") {
      plan.base_config.max_iterations = to_int(value);
    } else if (key == "comm_range") {
      plan.base_config.comm_range = to_int(value);
    } else if (key == "c") {
      plan.base_config.c = to_double(value);
    } else if (key == "alpha") {
      plan.base_config.alpha = to_double(value);
    } else if (key == "region_radius") {
      plan.base_config.region_radius = to_int(value);
    } else if (key == "beacon_scale") {
      plan.base_config.beacon_scale = to_double(value);
    } else if (key == "deposit") {
      plan.base_config.deposit = to_double(value);
    } else {
      fail("unknown key " + key);
    }
  }
  if (!have_classes) throw std::invalid_argument("plan file must set classes");
  if (!have_policies) throw std::invalid_argument("plan file must set policies");
  plan.validate();
  return plan;
}

inline ExperimentPlan load_plan_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path + " for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_plan_file(buf.str());
}

}  // namespace sar
