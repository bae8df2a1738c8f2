// Compares the OpenMP kernels against their serial reference
// implementations: wall time for both paths and a bit-exact equality check
// on the results. Pass --smoke for a fast run with tiny workloads.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <string>

#include "transnn/exact_chain.hpp"
#include "transnn/mdp_control.hpp"
#include "transnn/network.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace transnn;
using steady = std::chrono::steady_clock;

namespace {

int g_mismatches = 0;

template <class F>
double time_seconds(F&& f) {
  const auto t0 = steady::now();
  f();
  return std::chrono::duration<double>(steady::now() - t0).count();
}

void row(const char* kernel, double serial_s, double parallel_s, bool identical) {
  std::printf("%-22s %12.6f %12.6f %9.2fx %s\n", kernel, serial_s, parallel_s,
              serial_s / parallel_s, identical ? "identical" : "MISMATCH");
  if (!identical) ++g_mismatches;
}

}  // namespace

int main(int argc, char** argv) {
  const bool smoke = argc > 1 && std::strcmp(argv[1], "--smoke") == 0;

#ifdef _OPENMP
  std::printf("openmp threads: %d\n", omp_get_max_threads());
#else
  std::printf("built without openmp; parallel path runs serially\n");
#endif
  std::printf("%-22s %12s %12s %10s %s\n", "kernel", "serial_s", "openmp_s", "speedup",
              "results");

  {
    const int n = smoke ? 6 : 16;
    const int horizon = smoke ? 4 : 12;
    const std::int64_t trials = smoke ? 2000 : 60000;
    const auto net = make_random_network(n, horizon, 0.3, 0.05, 0.9, true, RngStream(1));
    ProbVector initial(n, 0.0);
    for (int i = 0; i < n; i += 3) initial[i] = 1.0;

    TimeSeries serial_out, parallel_out;
    const double ts = time_seconds(
        [&] { serial_out = monte_carlo_marginals(net, initial, trials, RngStream(2),
                                                 Exec::kSerial); });
    const double tp = time_seconds(
        [&] { parallel_out = monte_carlo_marginals(net, initial, trials, RngStream(2),
                                                   Exec::kParallel); });
    row("monte_carlo_marginals", ts, tp, serial_out == parallel_out);
  }

  {
    const int n = smoke ? 5 : 10;
    const auto net = make_random_network(n, 1, 0.4, 0.05, 0.9, false, RngStream(3));
    std::vector<double> serial_out, parallel_out;
    const double ts =
        time_seconds([&] { serial_out = transition_matrix(net, 0, Exec::kSerial); });
    const double tp =
        time_seconds([&] { parallel_out = transition_matrix(net, 0, Exec::kParallel); });
    row("transition_matrix", ts, tp, serial_out == parallel_out);
  }

  {
    const int n = smoke ? 3 : 6;
    const int horizon = smoke ? 3 : 8;
    const auto net = make_random_network(n, horizon, 0.4, 0.05, 0.9, true, RngStream(4));
    const CostParams params{100.0, 0.3, horizon};
    MdpSolution serial_out, parallel_out;
    const double ts =
        time_seconds([&] { serial_out = solve_bellman(net, params, Exec::kSerial); });
    const double tp =
        time_seconds([&] { parallel_out = solve_bellman(net, params, Exec::kParallel); });
    row("solve_bellman", ts, tp,
        serial_out.value == parallel_out.value && serial_out.policy == parallel_out.policy);
  }

  return g_mismatches;
}
