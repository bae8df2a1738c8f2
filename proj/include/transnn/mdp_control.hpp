#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "transnn/network.hpp"
#include "transnn/rng.hpp"
#include "transnn/types.hpp"

namespace transnn {

/// m = u*w*beta + (1-u)*w: vaccinating the receiver scales its whole
/// incoming row by beta.
inline double controlled_prob(double w, int u_bit, double beta) {
  return u_bit ? w * beta : w;
}

/// l(x, u) = c * |infected| + |vaccinated|; x and u are bitmask indices.
double stage_cost(std::uint64_t x, std::uint64_t u, double c);

/// rho_i under action u: conditional_infection_probs with w_ij replaced by
/// m_ij(u_i).
ProbVector controlled_infection_probs(std::uint64_t x, std::uint64_t u,
                                      const ContactNetwork& net, int k, double beta);

/// Pr(X(k+1) = q | X(k) = x, u) on state/action bitmask indices.
double controlled_transition_probability(std::uint64_t x, std::uint64_t q, std::uint64_t u,
                                         const ContactNetwork& net, int k, double beta);

/// Joint state/action enumeration is 4^n; keep the default modest.
inline constexpr int kDefaultMdpCap = 10;

struct MdpSolution {
  int n = 0;
  int horizon = 0;
  std::vector<std::vector<double>> value;          // (T+1) x 2^n, value[T] = 0
  std::vector<std::vector<std::uint32_t>> policy;  // T x 2^n action indices
};

/// Finite-horizon backward induction over the 2^n-state chain with 2^n
/// actions. Ties in the minimization keep the lowest action index, so the
/// policy table is reproducible. Backups at one stage may run in parallel;
/// the result is identical either way.
MdpSolution solve_bellman(const ContactNetwork& net, const CostParams& params,
                          Exec exec = Exec::kParallel, int max_nodes = kDefaultMdpCap);

/// Exact expected cost of a fixed policy (no minimization); same recursion
/// shape as solve_bellman.
std::vector<std::vector<double>> evaluate_policy(
    const ContactNetwork& net, const CostParams& params,
    const std::vector<std::vector<std::uint32_t>>& policy);

/// Closed-loop or open-loop sampled rollouts of the controlled chain.
struct Rollout {
  struct Trace {
    std::vector<StateBits> states;       // T+1 entries
    std::vector<std::uint64_t> actions;  // T entries (bitmask indices)
  };

  std::vector<double> costs;   // realized total cost per trial
  std::vector<Trace> traces;   // first `traced` trials only
  double mean_cost = 0.0;
};

Rollout simulate_policy(const ContactNetwork& net, const CostParams& params,
                        const MdpSolution& solution, const ProbVector& initial,
                        std::int64_t trials, const RngStream& rng, int traced = 1);

Rollout simulate_schedule(const ContactNetwork& net, const CostParams& params,
                          const Schedule& schedule, const ProbVector& initial,
                          std::int64_t trials, const RngStream& rng, int traced = 1);

/// Value and policy tables keyed by time then state index.
std::string mdp_solution_to_json(const MdpSolution& solution);

/// Rollout traces as CSV `trial,k,node,state,action`.
void write_trace_csv(const std::string& path, const std::vector<Rollout::Trace>& traces);

}  // namespace transnn
