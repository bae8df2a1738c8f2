#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "transnn/network.hpp"
#include "transnn/rng.hpp"
#include "transnn/types.hpp"

namespace transnn {

/// TlogSigmoid activation Psi(w, x) = -log(1 - w + w*e^-x) for activation
/// level w in [0,1] and input x in [0, +inf]. Monotone nondecreasing in both
/// arguments; Psi(w, 0) = 0, Psi(1, x) = x, Psi(w, +inf) = -log(1-w).
double tlog_sigmoid(double w, double x);

/// d/dx Psi(w, x) = w e^-x / (1 - w + w e^-x), in [0,1]. At x = +inf the
/// limit 0 is returned for every w, including the w = 1 corner where the
/// two-sided limit does not exist (callers that care flag that corner).
double dpsi_ds(double w, double x);

/// d/dw Psi(w, x) = (1 - e^-x) / (1 - w + w e^-x).
double dpsi_dw(double w, double x);

/// s = -log(1-p); maps [0,1] onto [0,+inf], p = 1 <-> s = +inf.
double to_info(double p);
InfoVector to_info(std::span<const double> p);

/// p = 1 - e^-s, inverse of to_info.
double from_info(double s);
ProbVector from_info(std::span<const double> s);

/// Mean-field update 1 - p_i' = prod_{j in N_i with self} (1 - w_ij^k p_j).
ProbVector step_prob(std::span<const double> p, const ContactNetwork& net, int k);

/// Same dynamics in information coordinates:
/// s_i' = sum_{j in N_i with self} Psi(w_ij^k, s_j).
InfoVector step_info(std::span<const double> s, const ContactNetwork& net, int k);

/// Iterates step_prob from the initial condition; returns (T+1) x n.
TimeSeries prob_trajectory(const ContactNetwork& net, const ProbVector& initial);

/// Linear-system bound: the value at step k of v(t+1) = (A_t . W_t) v(t)
/// started from mu0, with . the elementwise product of adjacency and
/// weights. Entries may exceed 1; they still bound the infection
/// probabilities from above.
ProbVector linear_upper_bound(const ContactNetwork& net, std::span<const double> mu0, int k);

/// linear_upper_bound for every k = 0..T as one table.
TimeSeries linear_bound_series(const ContactNetwork& net, std::span<const double> mu0);

/// Elementwise comparison of the mean-field iterates (and the linear system
/// above them) against Monte Carlo estimates of the exact chain.
struct BoundReport {
  TimeSeries mean_field;   // (T+1) x n mean-field iterates
  TimeSeries monte_carlo;  // (T+1) x n sampled frequencies
  TimeSeries linear;       // (T+1) x n linear-system bound
  TimeSeries slack;        // mean_field - monte_carlo
  TimeSeries tolerance;    // 3-sigma allowance per entry
  std::int64_t trials = 0;

  /// Largest amount by which a sampled frequency exceeded the mean-field
  /// bound beyond its tolerance; <= 0 means the bound held everywhere.
  double max_prob_violation = 0.0;

  /// Largest amount by which a mean-field iterate exceeded the linear bound
  /// (deterministic comparison, small fp slack only).
  double max_linear_violation = 0.0;

  bool ok = true;
};

BoundReport check_upper_bound(const ContactNetwork& net, const ProbVector& initial,
                              std::int64_t trials, const RngStream& rng);

}  // namespace transnn
