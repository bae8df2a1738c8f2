#include "transnn/mean_field.hpp"

#include <cmath>
#include <stdexcept>

#include "transnn/exact_chain.hpp"
#include "transnn/stats.hpp"

namespace transnn {

double tlog_sigmoid(double w, double x) {
  if (w == 1.0) return x;  // -log(e^-x) exactly
  // 1 - w + w e^-x = 1 + w(e^-x - 1); expm1/log1p keep accuracy near 0 and
  // extend continuously to x = +inf, where expm1(-x) = -1.
  return -std::log1p(w * std::expm1(-x));
}

double dpsi_ds(double w, double x) {
  if (std::isinf(x)) return 0.0;  // limit for w < 1, convention at w = 1
  if (w == 1.0) return 1.0;
  const double t = w * std::exp(-x);
  return t / (1.0 - w + t);
}

double dpsi_dw(double w, double x) {
  const double a = -std::expm1(-x);  // 1 - e^-x
  return a / (1.0 - w * a);
}

double to_info(double p) { return -std::log1p(-p); }

InfoVector to_info(std::span<const double> p) {
  InfoVector s(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) s[i] = to_info(p[i]);
  return s;
}

double from_info(double s) { return -std::expm1(-s); }

ProbVector from_info(std::span<const double> s) {
  ProbVector p(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) p[i] = from_info(s[i]);
  return p;
}

ProbVector step_prob(std::span<const double> p, const ContactNetwork& net, int k) {
  const int n = net.node_count();
  if (static_cast<int>(p.size()) != n) throw std::invalid_argument("state size mismatch");
  ProbVector next(n);
  for (int i = 0; i < n; ++i) {
    double healthy = 1.0;
    for (const Link& l : net.in_links(k, i)) healthy *= 1.0 - l.weight * p[l.node];
    next[i] = 1.0 - healthy;
  }
  return next;
}

InfoVector step_info(std::span<const double> s, const ContactNetwork& net, int k) {
  const int n = net.node_count();
  if (static_cast<int>(s.size()) != n) throw std::invalid_argument("state size mismatch");
  InfoVector next(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (const Link& l : net.in_links(k, i)) acc += tlog_sigmoid(l.weight, s[l.node]);
    next[i] = acc;
  }
  return next;
}

TimeSeries prob_trajectory(const ContactNetwork& net, const ProbVector& initial) {
  TimeSeries traj;
  traj.reserve(net.horizon() + 1);
  traj.push_back(initial);
  for (int k = 0; k < net.horizon(); ++k) traj.push_back(step_prob(traj.back(), net, k));
  return traj;
}

ProbVector linear_upper_bound(const ContactNetwork& net, std::span<const double> mu0, int k) {
  const int n = net.node_count();
  if (static_cast<int>(mu0.size()) != n) throw std::invalid_argument("state size mismatch");
  ProbVector v(mu0.begin(), mu0.end());
  ProbVector next(n);
  for (int t = 0; t < k; ++t) {
    // A_t (.) Omega_t equals the weight matrix itself: the adjacency is its
    // support plus the diagonal, which always carries a stored weight.
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (const Link& l : net.in_links(t, i)) acc += l.weight * v[l.node];
      next[i] = acc;
    }
    v.swap(next);
  }
  return v;
}

TimeSeries linear_bound_series(const ContactNetwork& net, std::span<const double> mu0) {
  const int n = net.node_count();
  TimeSeries out;
  out.reserve(net.horizon() + 1);
  ProbVector v(mu0.begin(), mu0.end());
  out.push_back(v);
  ProbVector next(n);
  for (int t = 0; t < net.horizon(); ++t) {
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (const Link& l : net.in_links(t, i)) acc += l.weight * v[l.node];
      next[i] = acc;
    }
    v = next;
    out.push_back(v);
  }
  return out;
}

BoundReport check_upper_bound(const ContactNetwork& net, const ProbVector& initial,
                              std::int64_t trials, const RngStream& rng) {
  BoundReport rep;
  rep.trials = trials;
  rep.mean_field = prob_trajectory(net, initial);
  rep.monte_carlo = monte_carlo_marginals(net, initial, trials, rng);
  rep.linear = linear_bound_series(net, initial);

  const int n = net.node_count();
  rep.slack.assign(rep.mean_field.size(), std::vector<double>(n));
  rep.tolerance.assign(rep.mean_field.size(), std::vector<double>(n));

  // fp noise allowance on the deterministic mean-field vs linear comparison
  constexpr double kFpSlack = 1e-12;

  for (std::size_t k = 0; k < rep.mean_field.size(); ++k) {
    for (int i = 0; i < n; ++i) {
      const double mf = rep.mean_field[k][i];
      const double mc = rep.monte_carlo[k][i];
      rep.slack[k][i] = mf - mc;
      rep.tolerance[k][i] = 3.0 * frequency_sigma(mc, trials);
      rep.max_prob_violation =
          std::max(rep.max_prob_violation, mc - mf - rep.tolerance[k][i]);
      rep.max_linear_violation =
          std::max(rep.max_linear_violation, mf - rep.linear[k][i] - kFpSlack);
    }
  }
  rep.ok = rep.max_prob_violation <= 0.0 && rep.max_linear_violation <= 0.0;
  return rep;
}

}  // namespace transnn
