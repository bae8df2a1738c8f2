#pragma once

#include <memory>
#include <span>
#include <vector>

#include "transnn/rng.hpp"
#include "transnn/types.hpp"

namespace transnn {

/// One directed link as seen from a fixed node: the other endpoint and the
/// transmission probability carried by the link.
struct Link {
  int node = 0;
  double weight = 0.0;
};

/// Time-varying directed contact network with heterogeneous transmission
/// probabilities. weight(k, i, j) is the probability that node j infects
/// node i at step k, so row i of each matrix lists node i's incoming links.
/// Self-links (i, i) exist at every step; their weight encodes failure to
/// recover. Immutable after construction, safe for concurrent reads.
class ContactNetwork {
 public:
  /// Same n*n row-major weight matrix at every step.
  static ContactNetwork static_network(int n, int horizon, std::vector<double> weights);

  /// One n*n row-major weight matrix per step; horizon = step_weights.size().
  static ContactNetwork time_varying(int n, std::vector<std::vector<double>> step_weights);

  int node_count() const { return n_; }
  int horizon() const { return horizon_; }

  /// True when every step shares one weight matrix.
  bool is_static() const;

  double weight(int k, int receiver, int sender) const;

  /// Adjacency a_ij: support of the weight matrix plus the diagonal.
  bool adjacent(int k, int receiver, int sender) const;

  /// Incoming links of `node` (senders that can infect it), self included,
  /// sorted by node id. Entries with zero weight appear only for the self
  /// link, which is always present.
  std::span<const Link> in_links(int k, int node) const;

  /// Outgoing links of `node` (receivers it can infect), self included,
  /// sorted by node id. Link::weight is w(receiver, node).
  std::span<const Link> out_links(int k, int node) const;

  /// Sorted node ids of the incoming neighborhood with self.
  std::vector<int> in_neighborhood(int k, int node) const;

  /// Sorted node ids of the outgoing neighborhood with self.
  std::vector<int> out_neighborhood(int k, int node) const;

  /// Elementwise weight equality over all steps.
  bool same_weights(const ContactNetwork& other) const;

 private:
  struct Slice {
    std::vector<double> dense;               // n*n, kept only for n <= kDenseLimit
    std::vector<std::vector<Link>> in;       // per receiver
    std::vector<std::vector<Link>> out;      // per sender
  };

  static constexpr int kDenseLimit = 64;

  ContactNetwork(int n, int horizon) : n_(n), horizon_(horizon) {}
  static std::shared_ptr<const Slice> build_slice(int n, const std::vector<double>& weights, int k);
  const Slice& slice(int k) const;
  void check_node(int node) const;

  int n_ = 0;
  int horizon_ = 0;
  std::vector<std::shared_ptr<const Slice>> slices_;
};

/// Seeded Erdos-Renyi style generator: every directed pair (i,j), i != j,
/// carries a link with probability edge_prob, weights uniform in [w_lo, w_hi];
/// self-links always exist with a weight from the same range. With
/// time_varying, each step draws an independent graph.
ContactNetwork make_random_network(int n, int horizon, double edge_prob, double w_lo,
                                   double w_hi, bool time_varying, const RngStream& rng);

}  // namespace transnn
