#pragma once

#include <span>
#include <vector>

#include "transnn/network.hpp"
#include "transnn/types.hpp"

namespace transnn {

/// Mean-field trajectory under an open-loop schedule, in both coordinates.
/// p is the primary numerical path; s = -log(1-p) is derived from it.
struct ControlledTrajectory {
  TimeSeries p;  // (T+1) x n
  TimeSeries s;  // (T+1) x n, +inf where p = 1
};

ControlledTrajectory controlled_trajectory(const ContactNetwork& net, const CostParams& params,
                                           const ProbVector& initial, const Schedule& schedule);

/// H(k) = sum_i [c(1 - e^-s_i) + u_i]
///      + sum_i lambda_i(k+1) sum_{j in N_i with self} Psi(m_ij(u_i), s_j).
/// u may be relaxed (entries in [0,1]); m_ij(u_i) = w_ij (1 - u_i(1-beta)).
double hamiltonian(int k, std::span<const double> s_k, std::span<const double> u_k,
                   std::span<const double> lambda_next, const ContactNetwork& net,
                   const CostParams& params);

/// Backward adjoint recursion along a controlled trajectory:
/// lambda(T) = 0,
/// lambda_i(k) = c e^-s_i(k)
///             + sum_{l in outgoing nbhd of i} lambda_l(k+1)
///               * d/ds Psi(m_li(u_l(k)), s_i(k)).
/// All entries are nonnegative. corner_flagged, when given, is set if the
/// recursion evaluated d/ds Psi at (w = 1, s = +inf).
TimeSeries adjoint_backward(const TimeSeries& s_traj, const Schedule& schedule,
                            const ContactNetwork& net, const CostParams& params,
                            bool* corner_flagged = nullptr);

/// Switching value for vaccinating node i at step k with everything else
/// held fixed: equals hamiltonian with u_i = 1 minus hamiltonian with
/// u_i = 0, computed in closed form as
/// 1 - lambda_i(k+1) * sum_{j in N_i with self}
///       log[(1 - w_ij b + w_ij b e^-s_j) / (1 - w_ij + w_ij e^-s_j)],
/// b = beta. Always <= 1 when the adjoint is nonnegative.
double delta_H(int i, int k, std::span<const double> s_k, std::span<const double> lambda_next,
               const ContactNetwork& net, const CostParams& params);

/// Variant with the adjoint factor indexed by the sending node inside the
/// sum (lambda_j instead of lambda_i). Kept as a diagnostic only: it does
/// NOT equal the Hamiltonian difference when the adjoint is heterogeneous,
/// and verify_minimizer reports the gap between the two.
double delta_H_sender_indexed(int i, int k, std::span<const double> s_k,
                              std::span<const double> lambda_next,
                              const ContactNetwork& net, const CostParams& params);

/// u_i = 1 iff delta_H_i < 0; ties (= 0) give 0.
std::vector<std::uint8_t> control_rule(int k, std::span<const double> s_k,
                                       std::span<const double> lambda_next,
                                       const ContactNetwork& net, const CostParams& params);

struct SolveReport {
  Schedule schedule;
  TimeSeries p;        // (T+1) x n under the returned schedule
  TimeSeries s;        // (T+1) x n
  TimeSeries adjoint;  // (T+1) x n
  TimeSeries delta_h;  // T x n switching values at the returned iterate
  int iterations = 0;
  bool converged = false;
  bool oscillated = false;
  /// Set when the adjoint recursion hit d/ds Psi at (w = 1, s = +inf),
  /// where the 0 convention is applied.
  bool corner_flagged = false;
  double j2 = 0.0;
  std::vector<double> j2_history;  // one entry per sweep iterate
};

/// Fixed-point forward-backward sweep: start from u = 0, alternate forward
/// state pass, backward adjoint pass and a synchronous full-schedule control
/// update until the schedule repeats. A 2-cycle counts as oscillation; the
/// cheaper of the two cycling schedules is returned with oscillated set.
SolveReport forward_backward_solve(const ContactNetwork& net, const CostParams& params,
                                   const ProbVector& initial, int max_iters = 50);

struct MinimizerCheck {
  double grad_at_0 = 0.0;  // dH/du_i at u_i = 0, others at schedule
  double grad_at_1 = 0.0;  // dH/du_i at u_i = 1
  bool boundary_confirmed = false;  // gradients share a sign
  bool matches_rule = false;        // chosen bit equals the sign prediction
};

struct MinimizerReport {
  std::vector<MinimizerCheck> checks;  // T * n, entry k*n + i
  int confirmed = 0;
  int inconclusive = 0;
  int mismatches = 0;
  /// cells where the schedule bit differs from "1 iff delta_H < 0"; zero
  /// whenever the solve converged.
  int rule_mismatches = 0;
  /// max |delta_H - (H|u_i=1 - H|u_i=0)| over all (i,k).
  double max_dh_gap = 0.0;
  /// max |delta_H - delta_H_sender_indexed|; reported, not asserted.
  double max_alt_formula_gap = 0.0;
  bool corner_flagged = false;
};

/// Evaluates both relaxed endpoint gradients of H in each u_i along the
/// solve's trajectory. Since H is convex in each u_i, matching signs
/// certify the boundary minimizer; disagreements are reported, never
/// raised.
MinimizerReport verify_minimizer(const SolveReport& sol, const ContactNetwork& net,
                                 const CostParams& params);

/// J2 = sum_{k=0}^{T-1} sum_i (c p_i(k) + u_i(k)).
double evaluate_j2_prob(const TimeSeries& p_traj, const Schedule& schedule, double c);

/// Same cost from information coordinates, p = 1 - e^-s.
double evaluate_j2_info(const TimeSeries& s_traj, const Schedule& schedule, double c);

}  // namespace transnn
