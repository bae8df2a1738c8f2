#include "transnn/mdp_control.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <stdexcept>

#include "json.hpp"
#include "transnn/exact_chain.hpp"
#include "transnn/format.hpp"

namespace transnn {

double stage_cost(std::uint64_t x, std::uint64_t u, double c) {
  return c * std::popcount(x) + std::popcount(u);
}

ProbVector controlled_infection_probs(std::uint64_t x, std::uint64_t u,
                                      const ContactNetwork& net, int k, double beta) {
  const int n = net.node_count();
  ProbVector rho(n);
  for (int i = 0; i < n; ++i) {
    const double scale = ((u >> i) & 1u) ? beta : 1.0;
    double healthy = 1.0;
    for (const Link& l : net.in_links(k, i)) {
      if ((x >> l.node) & 1u) healthy *= 1.0 - l.weight * scale;
    }
    rho[i] = 1.0 - healthy;
  }
  return rho;
}

double controlled_transition_probability(std::uint64_t x, std::uint64_t q, std::uint64_t u,
                                         const ContactNetwork& net, int k, double beta) {
  const ProbVector rho = controlled_infection_probs(x, u, net, k, beta);
  double p = 1.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    p *= ((q >> i) & 1u) ? rho[i] : 1.0 - rho[i];
  }
  return p;
}

namespace {

// One Bellman backup: min over actions of stage cost plus the expectation of
// `next_value` under the controlled transition law from state x. The
// expectation enumerates all 2^n successor configurations with the product
// form of the transition probability. Scratch buffers avoid per-call
// allocation in the stage loop.
struct BackupScratch {
  std::vector<double> rho1;
  std::vector<double> rho0;
};

double backup_state(std::uint64_t x, const ContactNetwork& net, const CostParams& params, int k,
                    const std::vector<double>& next_value, std::uint32_t* best_action,
                    BackupScratch& scratch) {
  const int n = net.node_count();
  const std::uint64_t actions = std::uint64_t{1} << n;
  const std::uint64_t states = std::uint64_t{1} << n;
  scratch.rho1.resize(n);
  scratch.rho0.resize(n);

  double best = std::numeric_limits<double>::infinity();
  std::uint32_t arg = 0;
  for (std::uint64_t u = 0; u < actions; ++u) {
    for (int i = 0; i < n; ++i) {
      const double scale = ((u >> i) & 1u) ? params.beta : 1.0;
      double healthy = 1.0;
      for (const Link& l : net.in_links(k, i)) {
        if ((x >> l.node) & 1u) healthy *= 1.0 - l.weight * scale;
      }
      scratch.rho1[i] = 1.0 - healthy;
      scratch.rho0[i] = healthy;
    }
    double expected = 0.0;
    for (std::uint64_t q = 0; q < states; ++q) {
      double pr = 1.0;
      for (int i = 0; i < n; ++i) {
        pr *= ((q >> i) & 1u) ? scratch.rho1[i] : scratch.rho0[i];
      }
      expected += pr * next_value[q];
    }
    const double total = stage_cost(x, u, params.c) + expected;
    // strict improvement only: ties keep the lowest action index
    if (total < best) {
      best = total;
      arg = static_cast<std::uint32_t>(u);
    }
  }
  if (best_action) *best_action = arg;
  return best;
}

}  // namespace

MdpSolution solve_bellman(const ContactNetwork& net, const CostParams& params, Exec exec,
                          int max_nodes) {
  params.validate();
  const int n = net.node_count();
  if (params.horizon != net.horizon())
    throw std::invalid_argument("cost horizon differs from network horizon");
  if (n > max_nodes) {
    throw std::invalid_argument("solve_bellman: n = " + std::to_string(n) +
                                " exceeds the joint state/action cap of " +
                                std::to_string(max_nodes) + " nodes");
  }
  const std::size_t states = std::size_t{1} << n;
  const int horizon = params.horizon;

  MdpSolution sol;
  sol.n = n;
  sol.horizon = horizon;
  sol.value.assign(horizon + 1, std::vector<double>(states, 0.0));
  sol.policy.assign(horizon, std::vector<std::uint32_t>(states, 0));

  for (int k = horizon - 1; k >= 0; --k) {
    const std::vector<double>& next = sol.value[k + 1];
    std::vector<double>& cur = sol.value[k];
    std::vector<std::uint32_t>& pol = sol.policy[k];
    if (exec == Exec::kParallel) {
#pragma omp parallel
      {
        BackupScratch scratch;
#pragma omp for schedule(static)
        for (std::int64_t x = 0; x < static_cast<std::int64_t>(states); ++x) {
          cur[x] = backup_state(static_cast<std::uint64_t>(x), net, params, k, next, &pol[x],
                                scratch);
        }
      }
    } else {
      BackupScratch scratch;
      for (std::size_t x = 0; x < states; ++x) {
        cur[x] = backup_state(x, net, params, k, next, &pol[x], scratch);
      }
    }
  }
  return sol;
}

std::vector<std::vector<double>> evaluate_policy(
    const ContactNetwork& net, const CostParams& params,
    const std::vector<std::vector<std::uint32_t>>& policy) {
  params.validate();
  const int n = net.node_count();
  const std::size_t states = std::size_t{1} << n;
  const int horizon = static_cast<int>(policy.size());

  std::vector<std::vector<double>> value(horizon + 1, std::vector<double>(states, 0.0));
  std::vector<double> rho1(n), rho0(n);
  for (int k = horizon - 1; k >= 0; --k) {
    for (std::uint64_t x = 0; x < states; ++x) {
      const std::uint64_t u = policy[k][x];
      for (int i = 0; i < n; ++i) {
        const double scale = ((u >> i) & 1u) ? params.beta : 1.0;
        double healthy = 1.0;
        for (const Link& l : net.in_links(k, i)) {
          if ((x >> l.node) & 1u) healthy *= 1.0 - l.weight * scale;
        }
        rho1[i] = 1.0 - healthy;
        rho0[i] = healthy;
      }
      double expected = 0.0;
      for (std::uint64_t q = 0; q < states; ++q) {
        double pr = 1.0;
        for (int i = 0; i < n; ++i) pr *= ((q >> i) & 1u) ? rho1[i] : rho0[i];
        expected += pr * value[k + 1][q];
      }
      value[k][x] = stage_cost(x, u, params.c) + expected;
    }
  }
  return value;
}

namespace {

Rollout simulate_impl(const ContactNetwork& net, const CostParams& params,
                      const std::function<std::uint64_t(int, std::uint64_t)>& action_at,
                      const ProbVector& initial, std::int64_t trials, const RngStream& rng,
                      int traced) {
  params.validate();
  const int n = net.node_count();
  if (static_cast<int>(initial.size()) != n)
    throw std::invalid_argument("initial condition size mismatch");
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  const int horizon = params.horizon;

  Rollout out;
  out.costs.assign(trials, 0.0);
  out.traces.resize(std::min<std::int64_t>(traced, trials));

#pragma omp parallel for schedule(static)
  for (std::int64_t t = 0; t < trials; ++t) {
    RngStream stream = rng.child(static_cast<std::uint64_t>(t));
    StateBits x(n);
    for (int i = 0; i < n; ++i) x[i] = stream.bernoulli(initial[i]) ? 1 : 0;

    const bool trace = t < static_cast<std::int64_t>(out.traces.size());
    Rollout::Trace* tr = trace ? &out.traces[t] : nullptr;
    if (tr) tr->states.push_back(x);

    double cost = 0.0;
    for (int k = 0; k < horizon; ++k) {
      const std::uint64_t xi = encode_state(x);
      const std::uint64_t u = action_at(k, xi);
      cost += stage_cost(xi, u, params.c);
      const ProbVector rho = controlled_infection_probs(xi, u, net, k, params.beta);
      StateBits next(n);
      for (int i = 0; i < n; ++i) next[i] = stream.bernoulli(rho[i]) ? 1 : 0;
      x = std::move(next);
      if (tr) {
        tr->actions.push_back(u);
        tr->states.push_back(x);
      }
    }
    out.costs[t] = cost;
  }

  double sum = 0.0;
  for (const double c : out.costs) sum += c;
  out.mean_cost = sum / static_cast<double>(trials);
  return out;
}

}  // namespace

Rollout simulate_policy(const ContactNetwork& net, const CostParams& params,
                        const MdpSolution& solution, const ProbVector& initial,
                        std::int64_t trials, const RngStream& rng, int traced) {
  return simulate_impl(
      net, params,
      [&solution](int k, std::uint64_t x) -> std::uint64_t { return solution.policy[k][x]; },
      initial, trials, rng, traced);
}

Rollout simulate_schedule(const ContactNetwork& net, const CostParams& params,
                          const Schedule& schedule, const ProbVector& initial,
                          std::int64_t trials, const RngStream& rng, int traced) {
  const int n = net.node_count();
  std::vector<std::uint64_t> step_actions(schedule.horizon, 0);
  for (int k = 0; k < schedule.horizon; ++k) {
    for (int i = 0; i < n; ++i) {
      if (schedule.at(k, i)) step_actions[k] |= (std::uint64_t{1} << i);
    }
  }
  return simulate_impl(
      net, params,
      [&step_actions](int k, std::uint64_t) -> std::uint64_t { return step_actions[k]; },
      initial, trials, rng, traced);
}

std::string mdp_solution_to_json(const MdpSolution& solution) {
  nlohmann::json doc;
  doc["n"] = solution.n;
  doc["T"] = solution.horizon;
  nlohmann::json value = nlohmann::json::object();
  for (int k = 0; k <= solution.horizon; ++k) {
    nlohmann::json row = nlohmann::json::object();
    for (std::size_t x = 0; x < solution.value[k].size(); ++x) {
      row[std::to_string(x)] = solution.value[k][x];
    }
    value[std::to_string(k)] = std::move(row);
  }
  doc["value"] = std::move(value);
  nlohmann::json policy = nlohmann::json::object();
  for (int k = 0; k < solution.horizon; ++k) {
    nlohmann::json row = nlohmann::json::object();
    for (std::size_t x = 0; x < solution.policy[k].size(); ++x) {
      row[std::to_string(x)] = solution.policy[k][x];
    }
    policy[std::to_string(k)] = std::move(row);
  }
  doc["policy"] = std::move(policy);
  return doc.dump(2);
}

void write_trace_csv(const std::string& path, const std::vector<Rollout::Trace>& traces) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "trial,k,node,state,action\n";
  for (std::size_t t = 0; t < traces.size(); ++t) {
    const Rollout::Trace& tr = traces[t];
    for (std::size_t k = 0; k < tr.states.size(); ++k) {
      for (std::size_t i = 0; i < tr.states[k].size(); ++i) {
        out << t << ',' << k << ',' << i << ',' << int(tr.states[k][i]) << ',';
        if (k < tr.actions.size()) out << ((tr.actions[k] >> i) & 1u);
        out << '\n';
      }
    }
  }
}

}  // namespace transnn
