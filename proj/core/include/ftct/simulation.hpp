#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ftct/coefficients.hpp"
#include "ftct/fault_model.hpp"
#include "ftct/grid_fields.hpp"
#include "ftct/index_lattice.hpp"

namespace ftct {

enum class Policy { discard_top_1, discard_top_2, recompute_all };
enum class Strategy { recombine, local_checkpoint, global_checkpoint };
enum class CostModel { virtual_time, measured };

const char* to_string(Policy p);
const char* to_string(Strategy s);
const char* to_string(CostModel c);
// Throw std::invalid_argument for unknown names.
Policy parse_policy(const std::string& name);
Strategy parse_strategy(const std::string& name);
CostModel parse_cost_model(const std::string& name);

// The first attempt of `index` in combination step `step` fails.
struct ForcedFault {
  int step = 0;
  MultiIndex index;
};

struct SimConfig {
  std::size_t d = 3;
  int n = 10;
  int tau = 2;
  // 0 picks the band from the policy: d+2 for discard_top_2, d+1 for
  // discard_top_1, d otherwise.
  int layers = 0;
  Policy policy = Policy::discard_top_2;
  Strategy strategy = Strategy::recombine;
  std::size_t node_count = 2;
  std::optional<WeibullFaults> faults;
  double t_s = 0.25;
  int combination_steps = 2;
  double cfl = 0.5;
  std::uint64_t seed = 1;
  CostModel cost_model = CostModel::virtual_time;
  // Virtual seconds for one top-layer grid over one combination step.
  double task_seconds = 1.0;
  double repair_time = 0.0;
  int probe_level = 6;
  // Run the numerics; off leaves error at 0 and only simulates time.
  bool solve = true;
  // Empty keeps checkpoints in memory.
  std::string checkpoint_dir;
  // Global restarts per step before giving up with InfeasibleError.
  int max_attempts = 10000;
  std::vector<ForcedFault> forced_faults;
};

// Validates and fills derived fields (layers). Throws std::invalid_argument.
SimConfig resolve(SimConfig config);

struct RunReport {
  std::uint64_t seed = 0;
  std::size_t faults = 0;
  double error = 0.0;
  double wall_time = 0.0;
  std::vector<std::size_t> recomputations;  // per combination step
  std::vector<std::size_t> lost;            // per combination step
  std::vector<std::size_t> attempts;        // per combination step
  std::optional<CombinationPlan> final_plan;
};

// Points of the grid of level i, prod (2^{i_k}+1).
double grid_points(const MultiIndex& i);
// c0 * steps * 2^{|i|}: proportional to the interior point count.
double estimate_cost(const MultiIndex& i, std::size_t steps, double c0);

// Longest processing time first onto the least loaded node (lowest id on
// ties). Each node's list is returned in ascending cost order. The IndexSet
// overload weighs tasks by 2^{|i|}.
std::vector<std::vector<std::size_t>> schedule(std::span<const double> costs,
                                               std::size_t node_count);
std::vector<std::vector<MultiIndex>> schedule(const IndexSet& tasks,
                                              std::size_t node_count);

// Band plan the configuration computes before any fault.
CombinationPlan base_plan(const SimConfig& config);
// Time steps per combination step and the shared step size.
std::size_t steps_per_round(const SimConfig& config);
double step_size(const SimConfig& config);
// Virtual cost of one band task over one combination step.
double task_cost(const SimConfig& config, const MultiIndex& i);

// Memoised numerics shared between runs of one configuration. Results are
// pure functions of the plan history, so sharing never changes a report.
class NumericsCache {
 public:
  explicit NumericsCache(std::size_t budget_bytes = std::size_t{1} << 28);
  ~NumericsCache();
  NumericsCache(const NumericsCache&) = delete;
  NumericsCache& operator=(const NumericsCache&) = delete;

  struct Impl;
  Impl& impl() { return *impl_; }

 private:
  std::unique_ptr<Impl> impl_;
};

// Component states saved at the start of each combination step, in memory or
// as grid text files under a directory.
class CheckpointStore {
 public:
  explicit CheckpointStore(std::string dir = {});

  void save(int step, const ComponentGrid& g);
  // Throws std::out_of_range if nothing was saved for (step, i).
  ComponentGrid load(int step, const MultiIndex& i) const;
  std::size_t size() const { return saved_; }
  const std::string& dir() const { return dir_; }

 private:
  static std::string name(int step, const MultiIndex& i);

  std::string dir_;
  std::size_t saved_ = 0;
  std::map<std::string, ComponentGrid> memory_;  // keyed by file name
};

// l1 error at the final time of the solution obtained by applying the given
// plans at successive combination steps. With a store, every component is
// restarted from its saved state.
double combined_error(const SimConfig& config,
                      const std::vector<CombinationPlan>& plans,
                      NumericsCache* cache = nullptr,
                      CheckpointStore* store = nullptr);

RunReport run_ftct(const SimConfig& config, NumericsCache* cache = nullptr);
RunReport run_checkpoint_baseline(const SimConfig& config,
                                  NumericsCache* cache = nullptr);
// Dispatches on config.strategy.
RunReport run(const SimConfig& config, NumericsCache* cache = nullptr);

struct BatchStats {
  std::size_t runs = 0;
  double f_ave = 0.0, f_std = 0.0;
  double eps_ave = 0.0, eps_std = 0.0, eps_min = 0.0, eps_max = 0.0;
  double w_ave = 0.0, w_min = 0.0, w_max = 0.0;
  std::vector<RunReport> reports;
};

// Seed of repetition k of a batch.
std::uint64_t run_seed(std::uint64_t seed, std::size_t k);

// r repetitions with derived seeds. `threads` only changes throughput.
BatchStats batch_runs(const SimConfig& config, std::size_t r,
                      std::size_t threads = 1);
BatchStats aggregate(std::vector<RunReport> reports);

}  // namespace ftct
