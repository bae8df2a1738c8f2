// Command-line front end: scenario simulation, bound checking, both control
// solvers, the full comparison pipeline and the method benchmark.
//
// Exit codes: 0 success, 1 validation error, 2 runtime error,
// 3 completed with warnings.

#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "transnn/exact_chain.hpp"
#include "transnn/format.hpp"
#include "transnn/harness.hpp"
#include "transnn/mdp_control.hpp"
#include "transnn/mean_field.hpp"
#include "transnn/optimal_control.hpp"
#include "transnn/scenario.hpp"

using namespace transnn;
namespace fs = std::filesystem;

namespace {

struct CommonArgs {
  std::string scenario;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::int64_t trials = 100000;
  int max_iters = 50;
  bool skip_mdp = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_scenario = true) {
  auto* sc = cmd->add_option("--scenario", args.scenario, "scenario JSON file");
  if (needs_scenario) sc->required();
  cmd->add_option("--out", args.out, "output directory");
  cmd->add_option("--seed", args.seed, "override the scenario seed");
  cmd->add_option("--trials", args.trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
  cmd->add_option("--max-iters", args.max_iters, "forward-backward sweep limit")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--skip-mdp", args.skip_mdp, "skip the exact MDP method");
}

Scenario load(const CommonArgs& args) {
  Scenario sc = load_scenario(args.scenario);
  if (args.seed) sc.seed = *args.seed;
  return sc;
}

int cmd_simulate(const CommonArgs& args) {
  const Scenario sc = load(args);
  const RngStream root(sc.seed);
  const auto marginals =
      monte_carlo_marginals(sc.network, sc.initial, args.trials, root.child(1));

  fs::create_directories(args.out);
  write_series_csv((fs::path(args.out) / "marginals.csv").string(), marginals);

  RngStream traj_stream = root.child(4);
  const auto traj = sample_trajectory(sc.network, sc.initial, traj_stream);
  TimeSeries series(traj.size(), std::vector<double>(sc.network.node_count()));
  for (std::size_t k = 0; k < traj.size(); ++k) {
    for (int i = 0; i < sc.network.node_count(); ++i) series[k][i] = traj[k][i];
  }
  write_series_csv((fs::path(args.out) / "traces.csv").string(), series);

  std::printf("simulated %lld trials over %d steps; marginals.csv and traces.csv written to %s\n",
              static_cast<long long>(args.trials), sc.network.horizon(), args.out.c_str());
  return 0;
}

int cmd_bound_check(const CommonArgs& args) {
  const Scenario sc = load(args);
  const RngStream root(sc.seed);
  const auto rep = check_upper_bound(sc.network, sc.initial, args.trials, root.child(1));

  fs::create_directories(args.out);
  write_series_csv((fs::path(args.out) / "mean_field.csv").string(), rep.mean_field);
  write_series_csv((fs::path(args.out) / "monte_carlo.csv").string(), rep.monte_carlo);
  write_series_csv((fs::path(args.out) / "linear_bound.csv").string(), rep.linear);

  nlohmann::json doc;
  doc["ok"] = rep.ok;
  doc["trials"] = rep.trials;
  doc["max_prob_violation"] = rep.max_prob_violation;
  doc["max_linear_violation"] = rep.max_linear_violation;
  std::ofstream(fs::path(args.out) / "bound_report.json") << doc.dump(2) << '\n';

  std::printf("bound check %s: max probability violation %s, max linear violation %s\n",
              rep.ok ? "passed" : "FAILED beyond tolerance",
              format_double(rep.max_prob_violation).c_str(),
              format_double(rep.max_linear_violation).c_str());
  return rep.ok ? 0 : 3;
}

int cmd_solve_mdp(const CommonArgs& args) {
  const Scenario sc = load(args);
  const auto sol = solve_bellman(sc.network, sc.params, Exec::kParallel);
  const RngStream root(sc.seed);
  const auto roll =
      simulate_policy(sc.network, sc.params, sol, sc.initial, args.trials, root.child(2), 1);

  fs::create_directories(args.out);
  std::ofstream(fs::path(args.out) / "mdp_solution.json") << mdp_solution_to_json(sol) << '\n';
  write_trace_csv((fs::path(args.out) / "mdp_rollout.csv").string(), roll.traces);

  std::printf("solved MDP with %d states x %d actions over %d stages; mean rollout cost %s\n",
              1 << sol.n, 1 << sol.n, sol.horizon, format_double(roll.mean_cost).c_str());
  return 0;
}

int cmd_solve_transnn(const CommonArgs& args) {
  const Scenario sc = load(args);
  SolveReport sol;
  MethodTiming timing;
  const auto t0 = std::chrono::steady_clock::now();
  sol = forward_backward_solve(sc.network, sc.params, sc.initial, args.max_iters);
  timing.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const auto verification = verify_minimizer(sol, sc.network, sc.params);

  fs::create_directories(args.out);
  std::ofstream(fs::path(args.out) / "transnn_solution.json")
      << transnn_solution_to_json(sol, verification, timing) << '\n';
  write_actions_csv((fs::path(args.out) / "actions_transnn.csv").string(), sol.schedule);
  write_series_csv((fs::path(args.out) / "p_trajectory.csv").string(), sol.p);
  write_series_csv((fs::path(args.out) / "s_trajectory.csv").string(), sol.s);

  std::printf("%s in %d iterations, J2 = %s\n",
              sol.converged ? "converged" : "did not converge", sol.iterations,
              format_double(sol.j2).c_str());
  return sol.converged ? 0 : 3;
}

int cmd_compare(const CommonArgs& args) {
  const Scenario sc = load(args);
  RunOptions opt;
  opt.out_dir = args.out;
  opt.trials = args.trials;
  opt.max_iters = args.max_iters;
  opt.skip_mdp = args.skip_mdp;
  if (args.seed) opt.seed_override = args.seed;
  const auto r = run_scenario(sc, opt);

  std::printf("scenario %s (seed %llu)\n", r.id.c_str(),
              static_cast<unsigned long long>(r.seed));
  std::printf("  simulate: %s s (x%d)\n", format_double(r.time_simulate.seconds).c_str(),
              r.time_simulate.repetitions);
  if (r.mdp_ran) {
    std::printf("  mdp:      %s s (x%d), V0 = %s, simulated mean = %s\n",
                format_double(r.time_mdp.seconds).c_str(), r.time_mdp.repetitions,
                format_double(r.mdp_initial_value).c_str(),
                format_double(r.mdp_rollout.mean_cost).c_str());
  } else {
    std::printf("  mdp:      skipped (%s)\n", r.mdp_skip_reason.c_str());
  }
  std::printf("  transnn:  %s s (x%d), J2 = %s, on-chain mean = %s\n",
              format_double(r.time_transnn.seconds).c_str(), r.time_transnn.repetitions,
              format_double(r.transnn.j2).c_str(),
              format_double(r.schedule_rollout.mean_cost).c_str());
  if (r.mdp_ran) {
    std::printf("  speedup:  %s x\n",
                format_double(r.time_mdp.seconds / r.time_transnn.seconds).c_str());
    std::printf("  actions:  inclusion %s, first step %s\n",
                format_double(r.compare.inclusion_fraction).c_str(),
                r.compare.first_step_equal ? "equal" : "different");
  }
  for (const auto& w : r.warnings) std::printf("  warning:  %s\n", w.c_str());
  std::printf("artifacts written to %s\n", args.out.c_str());
  return r.exit_code;
}

int cmd_bench(const std::vector<int>& sizes, const std::vector<int>& horizons, int repeats,
              std::uint64_t seed, const std::string& out) {
  const auto rows = benchmark(sizes, horizons, repeats, seed);
  write_benchmark_csv(out, rows);
  std::printf("%-8s %4s %4s %14s\n", "method", "n", "T", "median_s");
  for (const auto& row : rows) {
    std::printf("%-8s %4d %4d %14s\n", row.method.c_str(), row.n, row.horizon,
                format_double(row.seconds).c_str());
  }
  std::printf("benchmark table written to %s\n", out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact and mean-field SIS epidemic toolkit with vaccination control"};
  app.require_subcommand(1);

  CommonArgs sim_args, bound_args, mdp_args, tnn_args, cmp_args;
  auto* sim = app.add_subcommand("simulate", "Monte Carlo marginals and a sampled trajectory");
  add_common(sim, sim_args);
  auto* bound = app.add_subcommand("bound-check", "mean-field and linear bounds vs sampling");
  add_common(bound, bound_args);
  auto* mdp = app.add_subcommand("solve-mdp", "exact backward induction and policy rollout");
  add_common(mdp, mdp_args);
  auto* tnn = app.add_subcommand("solve-transnn", "forward-backward sweep on the mean field");
  add_common(tnn, tnn_args);
  auto* cmp = app.add_subcommand("compare", "run all methods and compare actions, costs, time");
  add_common(cmp, cmp_args);

  std::vector<int> bench_sizes{3, 4, 5, 6};
  std::vector<int> bench_horizons{10};
  int bench_repeats = 3;
  std::uint64_t bench_seed = 1;
  std::string bench_out = "bench.csv";
  auto* bench = app.add_subcommand("bench", "timing grid over network sizes and horizons");
  bench->add_option("--n-list", bench_sizes, "node counts")->delimiter(',');
  bench->add_option("--t-list", bench_horizons, "horizons")->delimiter(',');
  bench->add_option("--repeats", bench_repeats, "repeats per cell")->check(CLI::PositiveNumber);
  bench->add_option("--seed", bench_seed, "workload seed");
  bench->add_option("--out", bench_out, "output CSV path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(sim_args);
    if (bound->parsed()) return cmd_bound_check(bound_args);
    if (mdp->parsed()) return cmd_solve_mdp(mdp_args);
    if (tnn->parsed()) return cmd_solve_transnn(tnn_args);
    if (cmp->parsed()) return cmd_compare(cmp_args);
    if (bench->parsed()) return cmd_bench(bench_sizes, bench_horizons, bench_repeats,
                                          bench_seed, bench_out);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
