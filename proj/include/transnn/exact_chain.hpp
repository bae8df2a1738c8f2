#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "transnn/network.hpp"
#include "transnn/rng.hpp"
#include "transnn/types.hpp"

namespace transnn {

/// State-index convention used everywhere (value tables, policies, matrices):
/// node i occupies bit i, index = sum_i X_i * 2^i.
std::uint64_t encode_state(std::span<const std::uint8_t> bits);
StateBits decode_state(std::uint64_t index, int n);

/// Realized transmissions W_ij at one step; entries off the weight support
/// are always 0 (the diagonal is part of the support).
struct TransmissionDraw {
  int n = 0;
  std::vector<std::uint8_t> success;  // n*n, receiver-major

  bool at(int receiver, int sender) const {
    return success[static_cast<std::size_t>(receiver) * n + sender] != 0;
  }
};

/// Independent Bernoulli(w_ij^k) draw per supported link.
TransmissionDraw sample_transmissions(const ContactNetwork& net, int k, RngStream& rng);

/// One-step update: node i is infected next iff some incoming link (i,j)
/// with X_j = 1 realized a transmission (j = i included).
StateBits step_state(const StateBits& x, const TransmissionDraw& draw,
                     const ContactNetwork& net, int k);

/// rho_i = 1 - prod_{j in N_i with self} (1 - w_ij^k x_j), the conditional
/// probability that node i is infected at k+1 given X(k) = x.
ProbVector conditional_infection_probs(const StateBits& x, const ContactNetwork& net, int k);

/// Pr(X(k+1) = q | X(k) = x) = prod_i [q_i rho_i + (1-q_i)(1-rho_i)].
double transition_probability(const StateBits& x, const StateBits& q,
                              const ContactNetwork& net, int k);

inline constexpr int kDefaultMatrixCap = 14;

/// Row-major 2^n x 2^n one-step transition matrix; entry (x,q) equals
/// transition_probability(x, q). Throws when n exceeds max_nodes.
std::vector<double> transition_matrix(const ContactNetwork& net, int k,
                                      Exec exec = Exec::kParallel,
                                      int max_nodes = kDefaultMatrixCap);

/// Draws the initial state (independent Bernoulli(initial[i]) per node) and
/// advances one trajectory through all T steps. Returns T+1 states.
std::vector<StateBits> sample_trajectory(const ContactNetwork& net,
                                         const ProbVector& initial, RngStream& rng);

/// Single exact chain step consuming draws from `rng`; shared by
/// sample_trajectory and the Monte Carlo estimators.
StateBits sample_step(const ContactNetwork& net, int k, const StateBits& x, RngStream& rng);

/// Per-node infection frequencies over `trials` independent trajectories,
/// one derived RNG stream per trial. Returns a (T+1) x n table. Counts are
/// integers, so the result is identical for any worker count.
TimeSeries monte_carlo_marginals(const ContactNetwork& net, const ProbVector& initial,
                                 std::int64_t trials, const RngStream& rng,
                                 Exec exec = Exec::kParallel);

/// Writes a (T+1) x n (or T x n) table as CSV with header `k,node,value`.
void write_series_csv(const std::string& path, const TimeSeries& series);

}  // namespace transnn
