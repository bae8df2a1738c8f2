#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "transnn/mdp_control.hpp"
#include "transnn/mean_field.hpp"
#include "transnn/optimal_control.hpp"
#include "transnn/scenario.hpp"

namespace transnn {

struct RunOptions {
  std::string out_dir;  // empty: compute only, write nothing
  std::optional<std::uint64_t> seed_override;
  std::int64_t trials = 100000;
  int max_iters = 50;
  bool skip_mdp = false;
  int mdp_cap = kDefaultMdpCap;
  int traced_trials = 1;
};

/// Wall-clock seconds for one method. Sub-millisecond solves are re-run and
/// the median single-run time is reported; the repeated runs are pure and
/// deterministic, so only the timing benefits.
struct MethodTiming {
  double seconds = 0.0;
  int repetitions = 1;
};

/// Per-(i,k) containment of the realized MDP actions in the open-loop
/// schedule, plus first-step agreement. Diagnostics, not theorems.
struct CompareReport {
  int mdp_active = 0;     // cells where the MDP rollout vaccinated
  int shared_active = 0;  // of those, cells the schedule also vaccinates
  double inclusion_fraction = 1.0;  // shared/active, 1 when active = 0
  bool first_step_equal = true;
  Schedule mdp_actions;  // realized T x n action table from the rollout
};

CompareReport compare_actions(const Rollout::Trace& mdp_trace, const Schedule& schedule);

struct ScenarioResult {
  std::string id;
  std::uint64_t seed = 0;

  TimeSeries mc_marginals;
  BoundReport bounds;

  bool mdp_ran = false;
  std::string mdp_skip_reason;
  MdpSolution mdp;
  Rollout mdp_rollout;
  double mdp_initial_value = 0.0;  // V_0 evaluated under the initial condition

  SolveReport transnn;
  MinimizerReport minimizer;
  Rollout schedule_rollout;  // TransNN schedule replayed on the exact chain

  CompareReport compare;

  MethodTiming time_simulate;
  MethodTiming time_mdp;
  MethodTiming time_transnn;

  std::vector<std::string> warnings;
  int exit_code = 0;  // 0 ok, 3 completed with warnings
};

/// Runs all requested methods on one scenario with its seed, times them on a
/// single thread for a like-for-like comparison, and writes result.json,
/// traces.csv, timing.csv and actions_{method}.csv under out_dir.
ScenarioResult run_scenario(const Scenario& sc, const RunOptions& opt);

/// JSON document for result.json. Timing lives under the top-level "timing"
/// key and is the only part that varies between identical runs.
std::string scenario_result_to_json(const ScenarioResult& r);

/// Full solver dump: schedule, p/s trajectories, adjoint and switching
/// tables, verification summary, iteration count and wall time.
std::string transnn_solution_to_json(const SolveReport& sol, const MinimizerReport& min,
                                     const MethodTiming& timing);

struct BenchRow {
  std::string method;  // "mdp" or "transnn"
  int n = 0;
  int horizon = 0;
  double seconds = 0.0;  // median over repeats
};

/// Times both solvers on seeded random networks over the given grids.
/// MDP rows are skipped (not emitted) for n > mdp_cap.
std::vector<BenchRow> benchmark(const std::vector<int>& sizes, const std::vector<int>& horizons,
                                int repeats, std::uint64_t seed, int mdp_cap = kDefaultMdpCap);

void write_benchmark_csv(const std::string& path, const std::vector<BenchRow>& rows);

void write_actions_csv(const std::string& path, const Schedule& actions);

}  // namespace transnn
