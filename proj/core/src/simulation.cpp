#include "ftct/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <deque>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "ftct/advection.hpp"
#include "ftct/errors.hpp"

namespace ftct {
namespace {

constexpr double kNever = std::numeric_limits<double>::infinity();

std::string plan_key(const CombinationPlan& plan) {
  std::ostringstream os;
  os << plan;
  return os.str();
}

std::string fingerprint(const SimConfig& c) {
  std::ostringstream os;
  os.precision(17);
  os << c.d << ',' << c.n << ',' << c.tau << ',' << c.t_s << ','
     << c.combination_steps << ',' << c.cfl << ',' << c.probe_level;
  return os.str();
}

bool is_protected(const SimConfig& c, const MultiIndex& i) {
  switch (c.policy) {
    case Policy::discard_top_2: return i.level() >= c.n - 1;
    case Policy::discard_top_1: return i.level() == c.n;
    case Policy::recompute_all: return false;
  }
  return false;
}

struct Node {
  RandomStream rng;
  double clock = 0.0;
  double next_failure = kNever;
};

class FaultClock {
 public:
  FaultClock(const SimConfig& c, std::uint64_t seed) : config_(c) {
    for (std::size_t id = 0; id < c.node_count; ++id) {
      nodes_.push_back(Node{RandomStream(seed, id), 0.0, kNever});
      if (c.faults) {
        nodes_.back().next_failure = sample_time_to_failure(*c.faults, nodes_.back().rng);
      }
    }
  }

  Node& node(std::size_t id) { return nodes_[id]; }

  // Runs one task on a node; true if it must be discarded.
  bool run_task(std::size_t id, double cost, bool forced) {
    Node& nd = nodes_[id];
    nd.clock += cost;
    const bool failed = forced || nd.clock > nd.next_failure;
    if (failed) {
      nd.clock += config_.repair_time;
      nd.next_failure = config_.faults
                            ? nd.clock + sample_time_to_failure(*config_.faults, nd.rng)
                            : kNever;
    }
    return failed;
  }

  double barrier() {
    double t = 0.0;
    for (const auto& nd : nodes_) t = std::max(t, nd.clock);
    for (auto& nd : nodes_) nd.clock = t;
    return t;
  }

 private:
  const SimConfig& config_;
  std::vector<Node> nodes_;
};

class ForcedSet {
 public:
  explicit ForcedSet(const std::vector<ForcedFault>& faults) {
    for (const auto& f : faults) pending_.emplace_back(f.step, f.index);
  }
  // Consumes a pending fault for (step, i).
  bool take(int step, const MultiIndex& i) {
    for (auto it = pending_.begin(); it != pending_.end(); ++it) {
      if (it->first == step && it->second == i) {
        pending_.erase(it);
        return true;
      }
    }
    return false;
  }

 private:
  std::vector<std::pair<int, MultiIndex>> pending_;
};

struct Workload {
  CombinationPlan base;
  std::vector<double> cost;  // aligned with base.support()
  std::vector<std::vector<std::size_t>> assignment;
};

double measured_cost(const SimConfig& c, const MultiIndex& i) {
  const auto problem = default_problem(c.d);
  const double dt = step_size(c);
  const std::size_t steps = steps_per_round(c);
  const std::size_t probe = std::min<std::size_t>(steps, 2);
  ComponentGrid g = interpolate_function(problem.initial, i);
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t s = 0; s < probe; ++s) lax_wendroff_step(g, problem.velocity, dt);
  const std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
  return took.count() * static_cast<double>(steps) / static_cast<double>(probe);
}

Workload make_workload(const SimConfig& c) {
  Workload w{base_plan(c), {}, {}};
  for (const auto& i : w.base.support()) {
    w.cost.push_back(c.cost_model == CostModel::measured ? measured_cost(c, i)
                                                         : task_cost(c, i));
  }
  w.assignment = schedule(w.cost, c.node_count);
  for (const auto& f : c.forced_faults) {
    if (f.step < 0 || f.step >= c.combination_steps) {
      throw std::invalid_argument("forced fault step out of range");
    }
    if (!w.base.support().contains(f.index)) {
      throw std::invalid_argument("forced fault index " + f.index.to_string() +
                                  " is not computed");
    }
  }
  return w;
}

// One pass over every node's queue. Failed tasks are either lost (protected
// indices), requeued at the front, or only counted.
struct StepTally {
  std::size_t faults = 0;
  std::size_t recomputed = 0;
  std::vector<MultiIndex> lost;
};

enum class OnFault { policy, recompute, count };

StepTally run_step(const SimConfig& c, const Workload& w, FaultClock& clock,
                   ForcedSet& forced, int step, OnFault mode) {
  StepTally tally;
  const IndexSet& band = w.base.support();
  for (std::size_t id = 0; id < w.assignment.size(); ++id) {
    std::deque<std::size_t> queue(w.assignment[id].begin(), w.assignment[id].end());
    while (!queue.empty()) {
      const std::size_t task = queue.front();
      queue.pop_front();
      const MultiIndex& i = band[task];
      if (!clock.run_task(id, w.cost[task], forced.take(step, i))) continue;
      ++tally.faults;
      if (mode == OnFault::count) continue;
      if (mode == OnFault::policy && is_protected(c, i)) {
        tally.lost.push_back(i);
      } else {
        queue.push_front(task);
        ++tally.recomputed;
      }
    }
  }
  return tally;
}

template <typename T>
std::size_t footprint(const T& values) {
  return values.size() * sizeof(double);
}

}  // namespace

const char* to_string(Policy p) {
  switch (p) {
    case Policy::discard_top_1: return "discard-top-1";
    case Policy::discard_top_2: return "discard-top-2";
    case Policy::recompute_all: return "recompute-all";
  }
  return "?";
}

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::recombine: return "recombine";
    case Strategy::local_checkpoint: return "local";
    case Strategy::global_checkpoint: return "global";
  }
  return "?";
}

const char* to_string(CostModel c) {
  return c == CostModel::virtual_time ? "virtual" : "measured";
}

Policy parse_policy(const std::string& name) {
  for (Policy p : {Policy::discard_top_1, Policy::discard_top_2, Policy::recompute_all}) {
    if (name == to_string(p)) return p;
  }
  throw std::invalid_argument("unknown policy '" + name + "'");
}

Strategy parse_strategy(const std::string& name) {
  for (Strategy s : {Strategy::recombine, Strategy::local_checkpoint,
                     Strategy::global_checkpoint}) {
    if (name == to_string(s)) return s;
  }
  throw std::invalid_argument("unknown strategy '" + name + "'");
}

CostModel parse_cost_model(const std::string& name) {
  if (name == "virtual") return CostModel::virtual_time;
  if (name == "measured") return CostModel::measured;
  throw std::invalid_argument("unknown cost model '" + name + "'");
}

SimConfig resolve(SimConfig c) {
  auto fail = [](const std::string& what) { throw std::invalid_argument(what); };
  if (c.d == 0) fail("d must be >= 1");
  if (c.tau < 0) fail("tau must be >= 0");
  if (c.n < 0) fail("n must be >= 0");
  if (c.layers < 0) fail("layers must be >= 0");
  if (c.node_count == 0) fail("node_count must be >= 1");
  if (!(c.t_s > 0.0)) fail("t_s must be positive");
  if (c.combination_steps < 1) fail("combination_steps must be >= 1");
  if (!(c.cfl > 0.0 && c.cfl <= 1.0)) fail("cfl must lie in (0, 1]");
  if (!(c.task_seconds > 0.0)) fail("task_seconds must be positive");
  if (!(c.repair_time >= 0.0)) fail("repair_time must be >= 0");
  if (c.probe_level < 0 || c.probe_level > 10) fail("probe_level must lie in [0, 10]");
  if (c.max_attempts < 1) fail("max_attempts must be >= 1");
  if (c.cost_model == CostModel::measured && !c.solve) {
    fail("measured cost model needs solve = true");
  }
  const int d = static_cast<int>(c.d);
  if (c.layers == 0) {
    if (c.strategy != Strategy::recombine) {
      c.layers = d;
    } else if (c.policy == Policy::discard_top_2) {
      c.layers = d + 2;
    } else if (c.policy == Policy::discard_top_1) {
      c.layers = d + 1;
    } else {
      c.layers = d;
    }
  }
  if (c.layers < d) fail("layers must be >= d");
  if (c.strategy == Strategy::recombine) {
    const int needed = c.policy == Policy::discard_top_2   ? d + 2
                       : c.policy == Policy::discard_top_1 ? d + 1
                                                           : d;
    if (c.layers < needed) {
      fail(std::string("policy ") + to_string(c.policy) + " needs at least " +
           std::to_string(needed) + " layers");
    }
  }
  if (c.n < d * c.tau + c.layers - 1) {
    throw InfeasibleError("band is empty: need n >= d*tau + layers - 1 = " +
                          std::to_string(d * c.tau + c.layers - 1));
  }
  if (steps_per_round(c) == 0) fail("t_s is shorter than one time step");
  return c;
}

double grid_points(const MultiIndex& i) {
  double p = 1.0;
  for (std::size_t k = 0; k < i.dim(); ++k) p *= std::ldexp(1.0, i[k]) + 1.0;
  return p;
}

double estimate_cost(const MultiIndex& i, std::size_t steps, double c0) {
  return c0 * static_cast<double>(steps) * std::ldexp(1.0, i.level());
}

std::vector<std::vector<std::size_t>> schedule(std::span<const double> costs,
                                               std::size_t node_count) {
  if (node_count == 0) throw std::invalid_argument("node_count must be >= 1");
  std::vector<std::size_t> order(costs.size());
  for (std::size_t t = 0; t < order.size(); ++t) order[t] = t;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return costs[a] > costs[b];
  });
  std::vector<std::vector<std::size_t>> out(node_count);
  std::vector<double> load(node_count, 0.0);
  for (std::size_t t : order) {
    const std::size_t id = static_cast<std::size_t>(
        std::min_element(load.begin(), load.end()) - load.begin());
    out[id].push_back(t);
    load[id] += costs[t];
  }
  for (auto& tasks : out) {
    std::stable_sort(tasks.begin(), tasks.end(), [&](std::size_t a, std::size_t b) {
      return costs[a] < costs[b] || (costs[a] == costs[b] && a < b);
    });
  }
  return out;
}

std::vector<std::vector<MultiIndex>> schedule(const IndexSet& tasks,
                                              std::size_t node_count) {
  std::vector<double> costs;
  for (const auto& i : tasks) costs.push_back(std::ldexp(1.0, i.level()));
  std::vector<std::vector<MultiIndex>> out;
  for (const auto& ids : schedule(costs, node_count)) {
    out.emplace_back();
    for (std::size_t t : ids) out.back().push_back(tasks[t]);
  }
  return out;
}

CombinationPlan base_plan(const SimConfig& c) {
  return truncated_plan(c.d, c.n, c.tau, c.layers);
}

double step_size(const SimConfig& c) {
  const std::vector<double> a(c.d, 1.0);
  return shared_timestep(c.d, c.n, c.tau, a, c.cfl);
}

std::size_t steps_per_round(const SimConfig& c) {
  const double round = c.t_s / c.combination_steps;
  return static_cast<std::size_t>(std::llround(round / step_size(c)));
}

double task_cost(const SimConfig& c, const MultiIndex& i) {
  // Top-layer grids cost task_seconds, the next layer half of that.
  const std::size_t steps = steps_per_round(c);
  const double c0 =
      c.task_seconds / (static_cast<double>(steps) * std::ldexp(1.0, c.n));
  return estimate_cost(i, steps, c0);
}

CheckpointStore::CheckpointStore(std::string dir) : dir_(std::move(dir)) {
  if (!dir_.empty()) std::filesystem::create_directories(dir_);
}

std::string CheckpointStore::name(int step, const MultiIndex& i) {
  std::string s = "step" + std::to_string(step);
  for (std::size_t k = 0; k < i.dim(); ++k) s += "_" + std::to_string(i[k]);
  return s + ".grid";
}

void CheckpointStore::save(int step, const ComponentGrid& g) {
  const std::string key = name(step, g.index());
  if (dir_.empty()) {
    memory_.insert_or_assign(key, g);
  } else {
    std::ofstream out(std::filesystem::path(dir_) / key);
    if (!out) throw std::runtime_error("cannot write checkpoint " + key);
    write_grid(out, g);
  }
  ++saved_;
}

ComponentGrid CheckpointStore::load(int step, const MultiIndex& i) const {
  const std::string key = name(step, i);
  if (dir_.empty()) {
    auto it = memory_.find(key);
    if (it == memory_.end()) throw std::out_of_range("no checkpoint " + key);
    return it->second;
  }
  std::ifstream in(std::filesystem::path(dir_) / key);
  if (!in) throw std::out_of_range("no checkpoint " + key);
  return read_grid(in);
}

struct NumericsCache::Impl {
  std::mutex lock;
  std::size_t budget = 0;
  std::size_t used = 0;
  std::unordered_map<std::string, std::shared_ptr<const SparseGridSurplus>> states;
  std::unordered_map<std::string, std::shared_ptr<const ComponentGrid>> evolved;
  std::unordered_map<std::string, double> errors;

  template <typename Map, typename Value>
  std::shared_ptr<const Value> find(Map& map, const std::string& key) {
    std::lock_guard<std::mutex> guard(lock);
    auto it = map.find(key);
    return it == map.end() ? nullptr : it->second;
  }

  template <typename Map, typename Value>
  void put(Map& map, const std::string& key, std::shared_ptr<const Value> v,
           std::size_t bytes) {
    std::lock_guard<std::mutex> guard(lock);
    if (used + bytes > budget) return;
    if (map.emplace(key, std::move(v)).second) used += bytes;
  }
};

NumericsCache::NumericsCache(std::size_t budget_bytes)
    : impl_(std::make_unique<Impl>()) {
  impl_->budget = budget_bytes;
}

NumericsCache::~NumericsCache() = default;

double combined_error(const SimConfig& config,
                      const std::vector<CombinationPlan>& plans,
                      NumericsCache* cache, CheckpointStore* store) {
  if (static_cast<int>(plans.size()) != config.combination_steps) {
    throw std::invalid_argument("need one plan per combination step");
  }
  NumericsCache local;
  NumericsCache::Impl& memo = cache ? cache->impl() : local.impl();
  using State = std::shared_ptr<const SparseGridSurplus>;
  using Grid = std::shared_ptr<const ComponentGrid>;

  const auto problem = default_problem(config.d);
  const double dt = step_size(config);
  const std::size_t steps = steps_per_round(config);
  const double round = static_cast<double>(steps) * dt;

  std::string key = fingerprint(config);
  State state;
  for (std::size_t s = 0; s < plans.size(); ++s) {
    const std::string prev = key;
    key += "|" + plan_key(plans[s]);
    if (auto hit = memo.find<decltype(memo.states), SparseGridSurplus>(memo.states, key)) {
      state = hit;
      continue;
    }
    const double t0 = static_cast<double>(s) * round;
    std::vector<Grid> grids;
    std::vector<std::pair<double, const ComponentGrid*>> terms;
    const auto& support = plans[s].support();
    for (std::size_t p = 0; p < support.size(); ++p) {
      const std::int64_t c = plans[s].coefficients()[p];
      if (c == 0) continue;
      const MultiIndex& i = support[p];
      const std::string gkey = prev + "#" + i.to_string();
      Grid g = memo.find<decltype(memo.evolved), ComponentGrid>(memo.evolved, gkey);
      if (!g) {
        ComponentGrid start = state ? sample_component(*state, i)
                                    : interpolate_function(problem.initial, i);
        if (store) {
          store->save(static_cast<int>(s), start);
          start = store->load(static_cast<int>(s), i);
        }
        auto evolved = std::make_shared<const ComponentGrid>(
            evolve(start, problem, t0, t0 + round, dt).grid);
        memo.put(memo.evolved, gkey, Grid(evolved), footprint(evolved->values()));
        g = evolved;
      }
      grids.push_back(g);
      terms.emplace_back(static_cast<double>(c), g.get());
    }
    auto combined = std::make_shared<const SparseGridSurplus>(combine(terms));
    std::size_t bytes = 0;
    for (const auto& [j, b] : combined->blocks()) bytes += footprint(b);
    memo.put(memo.states, key, State(combined), bytes);
    state = combined;
  }

  {
    std::lock_guard<std::mutex> guard(memo.lock);
    auto it = memo.errors.find(key);
    if (it != memo.errors.end()) return it->second;
  }
  const double t_end = static_cast<double>(plans.size()) * round;
  const auto exact = [&](std::span<const double> x) { return problem.exact(x, t_end); };
  const double err = grid_error(*state, exact, Norm::l1,
                                MultiIndex::uniform(config.d, config.probe_level));
  std::lock_guard<std::mutex> guard(memo.lock);
  memo.errors.emplace(key, err);
  return err;
}

RunReport run_ftct(const SimConfig& input, NumericsCache* cache) {
  const SimConfig c = resolve(input);
  if (c.strategy != Strategy::recombine) {
    throw std::invalid_argument("run_ftct needs strategy = recombine");
  }
  const Workload w = make_workload(c);
  FaultClock clock(c, c.seed);
  ForcedSet forced(c.forced_faults);
  RunReport report;
  report.seed = c.seed;
  std::vector<CombinationPlan> plans;
  for (int s = 0; s < c.combination_steps; ++s) {
    StepTally tally = run_step(c, w, clock, forced, s, OnFault::policy);
    report.wall_time = clock.barrier();
    report.faults += tally.faults;
    report.recomputations.push_back(tally.recomputed);
    report.lost.push_back(tally.lost.size());
    report.attempts.push_back(1);
    if (tally.lost.empty()) {
      plans.push_back(w.base);
    } else {
      plans.push_back(solve_gcp_two_layer(w.base, IndexSet(std::move(tally.lost))));
    }
  }
  if (c.solve) report.error = combined_error(c, plans, cache);
  report.final_plan = plans.back();
  return report;
}

RunReport run_checkpoint_baseline(const SimConfig& input, NumericsCache* cache) {
  const SimConfig c = resolve(input);
  if (c.strategy == Strategy::recombine) {
    throw std::invalid_argument("baseline needs strategy = local or global");
  }
  const Workload w = make_workload(c);
  FaultClock clock(c, c.seed);
  ForcedSet forced(c.forced_faults);
  RunReport report;
  report.seed = c.seed;
  for (int s = 0; s < c.combination_steps; ++s) {
    if (c.strategy == Strategy::local_checkpoint) {
      StepTally tally = run_step(c, w, clock, forced, s, OnFault::recompute);
      report.faults += tally.faults;
      report.recomputations.push_back(tally.recomputed);
      report.attempts.push_back(1);
    } else {
      std::size_t attempts = 0;
      for (;;) {
        if (++attempts > static_cast<std::size_t>(c.max_attempts)) {
          throw InfeasibleError("no fault-free global attempt within max_attempts");
        }
        StepTally tally = run_step(c, w, clock, forced, s, OnFault::count);
        clock.barrier();
        report.faults += tally.faults;
        if (tally.faults == 0) break;
      }
      report.recomputations.push_back(attempts - 1);
      report.attempts.push_back(attempts);
    }
    report.lost.push_back(0);
    report.wall_time = clock.barrier();
  }
  std::vector<CombinationPlan> plans(static_cast<std::size_t>(c.combination_steps), w.base);
  if (c.solve) {
    CheckpointStore store(c.checkpoint_dir);
    report.error = combined_error(c, plans, cache, &store);
  }
  report.final_plan = w.base;
  return report;
}

RunReport run(const SimConfig& config, NumericsCache* cache) {
  return config.strategy == Strategy::recombine
             ? run_ftct(config, cache)
             : run_checkpoint_baseline(config, cache);
}

std::uint64_t run_seed(std::uint64_t seed, std::size_t k) {
  return mix_seed(seed ^ 0x5851f42d4c957f2dULL, k);
}

BatchStats aggregate(std::vector<RunReport> reports) {
  BatchStats st;
  st.runs = reports.size();
  if (reports.empty()) return st;
  const double r = static_cast<double>(reports.size());
  st.eps_min = st.w_min = kNever;
  st.eps_max = st.w_max = -kNever;
  for (const auto& rep : reports) {
    st.f_ave += static_cast<double>(rep.faults);
    st.eps_ave += rep.error;
    st.w_ave += rep.wall_time;
    st.eps_min = std::min(st.eps_min, rep.error);
    st.eps_max = std::max(st.eps_max, rep.error);
    st.w_min = std::min(st.w_min, rep.wall_time);
    st.w_max = std::max(st.w_max, rep.wall_time);
  }
  st.f_ave /= r;
  st.eps_ave /= r;
  st.w_ave /= r;
  if (reports.size() > 1) {
    double fv = 0.0, ev = 0.0;
    for (const auto& rep : reports) {
      fv += std::pow(static_cast<double>(rep.faults) - st.f_ave, 2);
      ev += std::pow(rep.error - st.eps_ave, 2);
    }
    st.f_std = std::sqrt(fv / (r - 1.0));
    st.eps_std = std::sqrt(ev / (r - 1.0));
  }
  st.reports = std::move(reports);
  return st;
}

BatchStats batch_runs(const SimConfig& config, std::size_t r,
                      std::size_t threads) {
  if (r == 0) throw std::invalid_argument("need at least one run");
  const SimConfig resolved = resolve(config);
  std::vector<RunReport> reports(r);
  NumericsCache cache;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_lock;
  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= r) return;
      try {
        SimConfig c = resolved;
        c.seed = run_seed(resolved.seed, k);
        reports[k] = run(c, &cache);
      } catch (...) {
        std::lock_guard<std::mutex> guard(failure_lock);
        if (!failure) failure = std::current_exception();
        next.store(r);
      }
    }
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min(threads, r));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return aggregate(std::move(reports));
}

}  // namespace ftct
