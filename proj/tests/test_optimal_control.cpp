#include "transnn/optimal_control.hpp"

#include <cmath>
#include <limits>

#include "doctest.h"
#include "transnn/mean_field.hpp"

using namespace transnn;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Cost-to-go of the controlled mean-field model from stage k with the info
// state at stage k replaced by s_k; used as the finite-difference oracle for
// the adjoint. Runs its own forward loop straight off the weights.
double cost_to_go(const ContactNetwork& net, const CostParams& params, const Schedule& u,
                  int from, std::vector<double> s_k) {
  const int n = net.node_count();
  std::vector<double> p(n);
  for (int i = 0; i < n; ++i) p[i] = 1.0 - std::exp(-s_k[i]);
  double cost = 0.0;
  for (int k = from; k < params.horizon; ++k) {
    for (int i = 0; i < n; ++i) cost += params.c * p[i] + u.at(k, i);
    std::vector<double> next(n);
    for (int i = 0; i < n; ++i) {
      double healthy = 1.0;
      for (int j = 0; j < n; ++j) {
        double w = net.weight(k, i, j);
        if (u.at(k, i)) w *= params.beta;
        healthy *= 1.0 - w * p[j];
      }
      next[i] = 1.0 - healthy;
    }
    p = std::move(next);
  }
  return cost;
}

Schedule random_schedule(int horizon, int n, RngStream rng) {
  Schedule u(horizon, n);
  for (int k = 0; k < horizon; ++k) {
    for (int i = 0; i < n; ++i) u.at(k, i) = rng.bernoulli(0.4);
  }
  return u;
}

}  // namespace

TEST_SUITE("transnn_control") {

TEST_CASE("hamiltonian vanishes with zero state, action and adjoint") {
  const auto net = make_random_network(3, 2, 0.5, 0.1, 0.9, false, RngStream(90));
  const std::vector<double> zero(3, 0.0);
  CHECK(hamiltonian(0, zero, zero, zero, net, CostParams{5.0, 0.3, 2}) == 0.0);
}

TEST_CASE("zero adjoint leaves only the stage cost") {
  const auto net = make_random_network(3, 2, 0.5, 0.1, 0.9, false, RngStream(91));
  const CostParams params{7.0, 0.3, 2};
  const std::vector<double> s{0.5, 1.2, 0.0};
  const std::vector<double> u{1.0, 0.0, 1.0};
  const std::vector<double> zero(3, 0.0);
  double expect = 0.0;
  for (int i = 0; i < 3; ++i) expect += params.c * (1.0 - std::exp(-s[i])) + u[i];
  CHECK(hamiltonian(0, s, u, zero, net, params) == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("hand-evaluated single-node hamiltonian") {
  const auto net = ContactNetwork::static_network(1, 1, {0.4});
  const CostParams params{100.0, 0.3, 1};
  const std::vector<double> s{std::log(2.0)};
  const std::vector<double> u{0.0};
  const std::vector<double> lambda{1.0};
  // 100 * 0.5 + Psi(0.4, log 2) = 50 - log(0.8)
  CHECK(hamiltonian(0, s, u, lambda, net, params) ==
        doctest::Approx(50.22314355131421).epsilon(1e-12));
}

TEST_CASE("terminal adjoint stage is the marginal stage-cost gradient") {
  const auto net = make_random_network(4, 3, 0.5, 0.1, 0.9, true, RngStream(92));
  const CostParams params{11.0, 0.3, 3};
  const Schedule u = random_schedule(3, 4, RngStream(93));
  const auto traj = controlled_trajectory(net, params, ProbVector{0.6, 0.1, 0.9, 0.3}, u);
  const auto lambda = adjoint_backward(traj.s, u, net, params);
  for (int i = 0; i < 4; ++i) {
    CHECK(lambda[3][i] == 0.0);
    CHECK(lambda[2][i] == doctest::Approx(params.c * std::exp(-traj.s[2][i])).epsilon(1e-13));
  }
}

TEST_CASE("zero cost weight gives an identically zero adjoint") {
  const auto net = make_random_network(3, 4, 0.5, 0.1, 0.9, true, RngStream(94));
  const CostParams params{0.0, 0.3, 4};
  const Schedule u = random_schedule(4, 3, RngStream(95));
  const auto traj = controlled_trajectory(net, params, ProbVector{0.5, 0.2, 0.8}, u);
  const auto lambda = adjoint_backward(traj.s, u, net, params);
  for (const auto& row : lambda) {
    for (const double v : row) CHECK(v == 0.0);
  }
}

TEST_CASE("adjoint is nonnegative") {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
    const auto net = make_random_network(4, 5, 0.5, 0.05, 0.95, true, RngStream(seed));
    const CostParams params{50.0, 0.2, 5};
    const Schedule u = random_schedule(5, 4, RngStream(seed + 10));
    ProbVector initial{1.0, 0.4, 0.0, 0.8};
    const auto traj = controlled_trajectory(net, params, initial, u);
    const auto lambda = adjoint_backward(traj.s, u, net, params);
    for (const auto& row : lambda) {
      for (const double v : row) CHECK(v >= 0.0);
    }
  }
}

TEST_CASE("adjoint matches finite differences of the cost-to-go") {
  const auto net = make_random_network(3, 4, 0.6, 0.1, 0.8, true, RngStream(96));
  const CostParams params{3.0, 0.3, 4};
  const Schedule u = random_schedule(4, 3, RngStream(97));
  const ProbVector initial{0.5, 0.15, 0.65};
  const auto traj = controlled_trajectory(net, params, initial, u);
  const auto lambda = adjoint_backward(traj.s, u, net, params);

  const double h = 1e-6;
  for (int k = 0; k < 4; ++k) {
    for (int i = 0; i < 3; ++i) {
      auto up = traj.s[k];
      auto dn = traj.s[k];
      up[i] += h;
      dn[i] -= h;
      const double fd =
          (cost_to_go(net, params, u, k, up) - cost_to_go(net, params, u, k, dn)) / (2.0 * h);
      CHECK(std::abs(lambda[k][i] - fd) <=
            1e-5 * std::max(std::abs(lambda[k][i]), std::abs(fd)));
    }
  }
}

TEST_CASE("delta_H is 1 when the adjoint vanishes and when the vaccine is useless") {
  const auto net = make_random_network(3, 2, 0.6, 0.1, 0.9, false, RngStream(98));
  const std::vector<double> s{0.4, 1.0, 0.2};
  const std::vector<double> zero(3, 0.0);
  const std::vector<double> lambda{2.0, 1.0, 0.5};
  for (int i = 0; i < 3; ++i) {
    CHECK(delta_H(i, 0, s, zero, net, CostParams{5.0, 0.3, 2}) == 1.0);
    CHECK(delta_H(i, 0, s, lambda, net, CostParams{5.0, 1.0, 2}) == 1.0);
  }
}

TEST_CASE("delta_H equals the two-point hamiltonian difference") {
  RngStream rng(99);
  for (int rep = 0; rep < 20; ++rep) {
    const auto net = make_random_network(4, 2, 0.5, 0.05, 0.9, true, rng.child(rep));
    const CostParams params{2.0, 0.35, 2};
    RngStream draws = rng.child(500 + rep);
    std::vector<double> s(4), lambda(4), u(4);
    for (int i = 0; i < 4; ++i) {
      s[i] = draws.uniform() * 3.0;
      lambda[i] = draws.uniform() * 4.0;
      u[i] = draws.bernoulli(0.5) ? 1.0 : 0.0;
    }
    for (int i = 0; i < 4; ++i) {
      auto u0 = u, u1 = u;
      u0[i] = 0.0;
      u1[i] = 1.0;
      const double diff = hamiltonian(0, s, u1, lambda, net, params) -
                          hamiltonian(0, s, u0, lambda, net, params);
      const double dh = delta_H(i, 0, s, lambda, net, params);
      CHECK(std::abs(dh - diff) <= 1e-12);
      CHECK(dh <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("control rule: never vaccinate without future sensitivity, ties stay healthy") {
  const auto net = ContactNetwork::static_network(1, 1, {0.5});
  const CostParams params{10.0, 0.3, 1};
  const std::vector<double> s{1.0};
  const std::vector<double> zero{0.0};
  CHECK(control_rule(0, s, zero, net, params) == std::vector<std::uint8_t>{0});

  // lambda tuned so delta_H is exactly zero: 1 - lambda * r = 0
  const double r = std::log((1.0 - 0.5 * 0.3 + 0.5 * 0.3 * std::exp(-1.0)) /
                            (1.0 - 0.5 + 0.5 * std::exp(-1.0)));
  const std::vector<double> tie{1.0 / r};
  CHECK(delta_H(0, 0, s, tie, net, params) == 0.0);
  CHECK(control_rule(0, s, tie, net, params) == std::vector<std::uint8_t>{0});
}

TEST_CASE("control rule vaccinates the at-risk node under a strong vaccine") {
  // node 1 healthy, node 0 infected for sure, harsh cost, effective vaccine
  std::vector<double> w(4, 0.0);
  w[0 * 2 + 0] = 0.6;
  w[1 * 2 + 1] = 0.2;
  w[1 * 2 + 0] = 0.9;
  const auto net = ContactNetwork::static_network(2, 2, w);
  const CostParams params{1e6, 0.01, 2};
  const ProbVector initial{1.0, 0.0};
  const Schedule none(2, 2);
  const auto traj = controlled_trajectory(net, params, initial, none);
  const auto lambda = adjoint_backward(traj.s, none, net, params);
  CHECK(delta_H(1, 0, traj.s[0], lambda[1], net, params) < 0.0);
  const auto u = control_rule(0, traj.s[0], lambda[1], net, params);
  CHECK(u[1] == 1);
}

TEST_CASE("healthy start converges immediately to no vaccination") {
  const auto net = make_random_network(4, 3, 0.5, 0.1, 0.9, true, RngStream(100));
  const auto sol = forward_backward_solve(net, CostParams{80.0, 0.3, 3}, ProbVector(4, 0.0));
  CHECK(sol.converged);
  CHECK(sol.iterations == 1);
  CHECK(sol.j2 == 0.0);
  for (const auto b : sol.schedule.bits) CHECK(b == 0);
}

TEST_CASE("zero infection cost converges to no vaccination") {
  const auto net = make_random_network(4, 3, 0.5, 0.1, 0.9, true, RngStream(101));
  const auto sol =
      forward_backward_solve(net, CostParams{0.0, 0.3, 3}, ProbVector{1.0, 0.5, 0.0, 0.2});
  CHECK(sol.converged);
  for (const auto b : sol.schedule.bits) CHECK(b == 0);
}

TEST_CASE("solver output is internally consistent") {
  const auto net = make_random_network(5, 10, 0.4, 0.1, 0.85, false, RngStream(107));
  const CostParams params{100.0, 0.3, 10};
  const ProbVector initial{1.0, 0.0, 0.0, 1.0, 0.0};
  const auto sol = forward_backward_solve(net, params, initial);
  CHECK(sol.converged);
  CHECK(sol.j2 == doctest::Approx(evaluate_j2_prob(sol.p, sol.schedule, 100.0)).epsilon(1e-13));
  // the returned schedule is the rule applied to its own trajectory
  for (int k = 0; k < 10; ++k) {
    const auto uk = control_rule(k, sol.s[k], sol.adjoint[k + 1], net, params);
    for (int i = 0; i < 5; ++i) {
      CHECK(uk[i] == sol.schedule.at(k, i));
      CHECK((sol.delta_h[k][i] < 0.0) == (sol.schedule.at(k, i) == 1));
    }
  }
}

TEST_CASE("single-pass mode returns the first rule update") {
  const auto net = make_random_network(4, 4, 0.5, 0.2, 0.9, false, RngStream(103));
  const CostParams params{200.0, 0.2, 4};
  const ProbVector initial{1.0, 1.0, 0.0, 0.0};
  const auto one = forward_backward_solve(net, params, initial, 1);
  CHECK(one.iterations == 1);

  // reproduce by hand: rule along the uncontrolled trajectory
  const Schedule none(4, 4);
  const auto traj = controlled_trajectory(net, params, initial, none);
  const auto lambda = adjoint_backward(traj.s, none, net, params);
  for (int k = 0; k < 4; ++k) {
    const auto uk = control_rule(k, traj.s[k], lambda[k + 1], net, params);
    for (int i = 0; i < 4; ++i) CHECK(one.schedule.at(k, i) == uk[i]);
  }
}

TEST_CASE("near-optimality against exhaustive open-loop search") {
  const auto net = make_random_network(3, 3, 0.6, 0.1, 0.85, true, RngStream(104));
  const CostParams params{100.0, 0.3, 3};
  const ProbVector initial{1.0, 0.0, 0.4};
  const auto sol = forward_backward_solve(net, params, initial);

  double best = std::numeric_limits<double>::infinity();
  const int slots = 9;
  for (std::uint32_t code = 0; code < (1u << slots); ++code) {
    Schedule u(3, 3);
    for (int b = 0; b < slots; ++b) u.bits[b] = (code >> b) & 1u;
    const auto traj = controlled_trajectory(net, params, initial, u);
    best = std::min(best, evaluate_j2_prob(traj.p, u, params.c));
  }
  CHECK(sol.j2 <= 1.05 * best + 1e-9);
}

TEST_CASE("minimizer verification: zero adjoint confirms the healthy boundary") {
  const auto net = make_random_network(3, 3, 0.5, 0.1, 0.9, true, RngStream(105));
  const CostParams params{0.0, 0.3, 3};
  const auto sol = forward_backward_solve(net, params, ProbVector{0.7, 0.2, 0.9});
  const auto rep = verify_minimizer(sol, net, params);
  CHECK(rep.mismatches == 0);
  CHECK(rep.inconclusive == 0);
  for (const auto& chk : rep.checks) {
    CHECK(chk.grad_at_0 == 1.0);
    CHECK(chk.grad_at_1 == 1.0);
    CHECK(chk.boundary_confirmed);
  }
}

TEST_CASE("minimizer verification on a converged solve") {
  const auto net = make_random_network(4, 5, 0.5, 0.1, 0.85, true, RngStream(106));
  const CostParams params{3.0, 0.3, 5};
  const ProbVector initial{0.9, 0.1, 0.6, 0.0};
  const auto sol = forward_backward_solve(net, params, initial);
  REQUIRE(sol.converged);
  const auto rep = verify_minimizer(sol, net, params);
  CHECK(rep.mismatches == 0);
  CHECK(rep.rule_mismatches == 0);
  CHECK(rep.max_dh_gap <= 1e-12);
  CHECK_FALSE(rep.corner_flagged);
}

TEST_CASE("hamiltonian is convex in each relaxed action") {
  RngStream rng(107);
  for (int rep = 0; rep < 15; ++rep) {
    const auto net = make_random_network(4, 2, 0.5, 0.05, 0.95, true, rng.child(rep));
    const CostParams params{5.0, 0.25, 2};
    RngStream draws = rng.child(700 + rep);
    std::vector<double> s(4), lambda(4), u(4);
    for (int i = 0; i < 4; ++i) {
      s[i] = draws.uniform() * 4.0;
      lambda[i] = draws.uniform() * 3.0;
      u[i] = draws.uniform();
    }
    for (int i = 0; i < 4; ++i) {
      auto u0 = u, um = u, u1 = u;
      u0[i] = 0.0;
      um[i] = 0.5;
      u1[i] = 1.0;
      const double second = hamiltonian(0, s, u0, lambda, net, params) -
                            2.0 * hamiltonian(0, s, um, lambda, net, params) +
                            hamiltonian(0, s, u1, lambda, net, params);
      CHECK(second >= -1e-12);
    }
  }
}

TEST_CASE("J2 on both coordinate systems agrees") {
  const auto net = make_random_network(4, 4, 0.5, 0.1, 0.9, true, RngStream(108));
  const CostParams params{12.0, 0.4, 4};
  const Schedule u = random_schedule(4, 4, RngStream(109));
  const auto traj = controlled_trajectory(net, params, ProbVector{1.0, 0.3, 0.0, 0.8}, u);
  const double a = evaluate_j2_prob(traj.p, u, params.c);
  const double b = evaluate_j2_info(traj.s, u, params.c);
  CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)));
}

TEST_CASE("empty epidemic with no actions costs nothing") {
  const auto net = make_random_network(3, 3, 0.5, 0.1, 0.9, false, RngStream(110));
  const Schedule u(3, 3);
  const auto traj =
      controlled_trajectory(net, CostParams{10.0, 0.3, 3}, ProbVector(3, 0.0), u);
  CHECK(evaluate_j2_prob(traj.p, u, 10.0) == 0.0);
}

TEST_CASE("hand-evaluated single-node J2") {
  const auto net = ContactNetwork::static_network(1, 2, {0.4});
  const CostParams params{100.0, 0.3, 2};
  const Schedule u(2, 1);
  const auto traj = controlled_trajectory(net, params, ProbVector{1.0}, u);
  CHECK(evaluate_j2_prob(traj.p, u, 100.0) == doctest::Approx(140.0).epsilon(1e-12));
  CHECK(evaluate_j2_info(traj.s, u, 100.0) == doctest::Approx(140.0).epsilon(1e-12));
}

TEST_CASE("saturated initial states flow through the information coordinates") {
  // p = 1 initial entries give s = +inf; the solve must stay finite-valued
  const auto net = make_random_network(4, 4, 0.6, 0.1, 0.9, false, RngStream(111));
  const CostParams params{50.0, 0.3, 4};
  const ProbVector initial{1.0, 1.0, 0.0, 0.0};
  const auto sol = forward_backward_solve(net, params, initial);
  CHECK(sol.s[0][0] == kInf);
  for (int k = 0; k <= 4; ++k) {
    for (int i = 0; i < 4; ++i) {
      CHECK(std::isfinite(sol.adjoint[k][i]));
      CHECK(sol.adjoint[k][i] >= 0.0);
      CHECK(std::isfinite(sol.p[k][i]));
    }
  }
  for (int k = 0; k < 4; ++k) {
    for (int i = 0; i < 4; ++i) CHECK(std::isfinite(sol.delta_h[k][i]));
  }
}

}  // TEST_SUITE
