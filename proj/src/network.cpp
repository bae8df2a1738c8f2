#include "transnn/network.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace transnn {

namespace {

void check_probability(double w, int k, int i, int j) {
  if (!(w >= 0.0 && w <= 1.0)) {
    throw std::invalid_argument("probability out of range: w(" + std::to_string(i) + "," +
                                std::to_string(j) + ") at step " + std::to_string(k) + " is " +
                                std::to_string(w));
  }
}

}  // namespace

std::shared_ptr<const ContactNetwork::Slice> ContactNetwork::build_slice(
    int n, const std::vector<double>& weights, int k) {
  if (static_cast<int>(weights.size()) != n * n) {
    throw std::invalid_argument("weight matrix at step " + std::to_string(k) + " has " +
                                std::to_string(weights.size()) + " entries, expected " +
                                std::to_string(n * n));
  }
  auto slice = std::make_shared<Slice>();
  slice->in.resize(n);
  slice->out.resize(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double w = weights[static_cast<std::size_t>(i) * n + j];
      check_probability(w, k, i, j);
      if (w > 0.0 || i == j) {
        slice->in[i].push_back({j, w});
        slice->out[j].push_back({i, w});
      }
    }
  }
  if (n <= kDenseLimit) slice->dense = weights;
  return slice;
}

ContactNetwork ContactNetwork::static_network(int n, int horizon, std::vector<double> weights) {
  if (n < 1) throw std::invalid_argument("node count must be >= 1");
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  ContactNetwork net(n, horizon);
  auto slice = build_slice(n, weights, 0);
  net.slices_.assign(horizon, slice);
  return net;
}

ContactNetwork ContactNetwork::time_varying(int n, std::vector<std::vector<double>> step_weights) {
  if (n < 1) throw std::invalid_argument("node count must be >= 1");
  if (step_weights.empty()) throw std::invalid_argument("horizon must be >= 1");
  ContactNetwork net(n, static_cast<int>(step_weights.size()));
  net.slices_.reserve(step_weights.size());
  for (std::size_t k = 0; k < step_weights.size(); ++k) {
    net.slices_.push_back(build_slice(n, step_weights[k], static_cast<int>(k)));
  }
  return net;
}

bool ContactNetwork::is_static() const {
  return std::all_of(slices_.begin(), slices_.end(),
                     [&](const auto& s) { return s == slices_.front(); });
}

const ContactNetwork::Slice& ContactNetwork::slice(int k) const {
  if (k < 0 || k >= horizon_) {
    throw std::out_of_range("time index " + std::to_string(k) + " out of range [0," +
                            std::to_string(horizon_) + ")");
  }
  return *slices_[k];
}

void ContactNetwork::check_node(int node) const {
  if (node < 0 || node >= n_) {
    throw std::out_of_range("node index " + std::to_string(node) + " out of range [0," +
                            std::to_string(n_) + ")");
  }
}

double ContactNetwork::weight(int k, int receiver, int sender) const {
  const Slice& s = slice(k);
  check_node(receiver);
  check_node(sender);
  if (!s.dense.empty()) return s.dense[static_cast<std::size_t>(receiver) * n_ + sender];
  const auto& row = s.in[receiver];
  auto it = std::lower_bound(row.begin(), row.end(), sender,
                             [](const Link& l, int node) { return l.node < node; });
  return (it != row.end() && it->node == sender) ? it->weight : 0.0;
}

bool ContactNetwork::adjacent(int k, int receiver, int sender) const {
  return receiver == sender || weight(k, receiver, sender) > 0.0;
}

std::span<const Link> ContactNetwork::in_links(int k, int node) const {
  const Slice& s = slice(k);
  check_node(node);
  return s.in[node];
}

std::span<const Link> ContactNetwork::out_links(int k, int node) const {
  const Slice& s = slice(k);
  check_node(node);
  return s.out[node];
}

std::vector<int> ContactNetwork::in_neighborhood(int k, int node) const {
  std::vector<int> ids;
  for (const Link& l : in_links(k, node)) ids.push_back(l.node);
  return ids;
}

std::vector<int> ContactNetwork::out_neighborhood(int k, int node) const {
  std::vector<int> ids;
  for (const Link& l : out_links(k, node)) ids.push_back(l.node);
  return ids;
}

bool ContactNetwork::same_weights(const ContactNetwork& other) const {
  if (n_ != other.n_ || horizon_ != other.horizon_) return false;
  for (int k = 0; k < horizon_; ++k) {
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) {
        if (weight(k, i, j) != other.weight(k, i, j)) return false;
      }
    }
  }
  return true;
}

ContactNetwork make_random_network(int n, int horizon, double edge_prob, double w_lo,
                                   double w_hi, bool time_varying, const RngStream& rng) {
  auto draw_matrix = [&](RngStream stream) {
    std::vector<double> w(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        // two draws per pair regardless of the outcome
        const bool edge = stream.bernoulli(edge_prob);
        const double u = stream.uniform();
        if (i == j || edge) w[static_cast<std::size_t>(i) * n + j] = w_lo + (w_hi - w_lo) * u;
      }
    }
    return w;
  };

  if (!time_varying) return ContactNetwork::static_network(n, horizon, draw_matrix(rng.child(0)));

  std::vector<std::vector<double>> steps;
  steps.reserve(horizon);
  for (int k = 0; k < horizon; ++k) steps.push_back(draw_matrix(rng.child(k)));
  return ContactNetwork::time_varying(n, std::move(steps));
}

}  // namespace transnn
