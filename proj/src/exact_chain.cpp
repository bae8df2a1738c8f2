#include "transnn/exact_chain.hpp"

#include <fstream>
#include <stdexcept>
#include <string>

#include "transnn/format.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace transnn {

std::uint64_t encode_state(std::span<const std::uint8_t> bits) {
  if (bits.size() > 64) throw std::invalid_argument("state index encoding limited to 64 nodes");
  std::uint64_t index = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) index |= (std::uint64_t{1} << i);
  }
  return index;
}

StateBits decode_state(std::uint64_t index, int n) {
  StateBits bits(n);
  for (int i = 0; i < n; ++i) bits[i] = static_cast<std::uint8_t>((index >> i) & 1u);
  return bits;
}

TransmissionDraw sample_transmissions(const ContactNetwork& net, int k, RngStream& rng) {
  const int n = net.node_count();
  TransmissionDraw draw;
  draw.n = n;
  draw.success.assign(static_cast<std::size_t>(n) * n, 0);
  for (int i = 0; i < n; ++i) {
    for (const Link& l : net.in_links(k, i)) {
      if (rng.bernoulli(l.weight))
        draw.success[static_cast<std::size_t>(i) * n + l.node] = 1;
    }
  }
  return draw;
}

StateBits step_state(const StateBits& x, const TransmissionDraw& draw,
                     const ContactNetwork& net, int k) {
  const int n = net.node_count();
  StateBits next(n, 0);
  for (int i = 0; i < n; ++i) {
    for (const Link& l : net.in_links(k, i)) {
      if (x[l.node] && draw.at(i, l.node)) {
        next[i] = 1;
        break;
      }
    }
  }
  return next;
}

ProbVector conditional_infection_probs(const StateBits& x, const ContactNetwork& net, int k) {
  const int n = net.node_count();
  ProbVector rho(n);
  for (int i = 0; i < n; ++i) {
    double healthy = 1.0;
    for (const Link& l : net.in_links(k, i)) {
      if (x[l.node]) healthy *= 1.0 - l.weight;
    }
    rho[i] = 1.0 - healthy;
  }
  return rho;
}

double transition_probability(const StateBits& x, const StateBits& q,
                              const ContactNetwork& net, int k) {
  const ProbVector rho = conditional_infection_probs(x, net, k);
  double p = 1.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    p *= q[i] ? rho[i] : 1.0 - rho[i];
  }
  return p;
}

namespace {

// Expands the product-of-Bernoullis distribution over next states into
// `row` (size 2^n): after node i is folded in, row[q] holds the probability
// of the first i+1 bits of q. Multiplication order matches
// transition_probability, so entries agree bit for bit.
void assemble_row(const ProbVector& rho, double* row) {
  row[0] = 1.0;
  std::size_t width = 1;
  for (const double r : rho) {
    const double h = 1.0 - r;
    for (std::size_t s = 0; s < width; ++s) {
      row[width + s] = row[s] * r;
      row[s] = row[s] * h;
    }
    width <<= 1;
  }
}

}  // namespace

std::vector<double> transition_matrix(const ContactNetwork& net, int k, Exec exec, int max_nodes) {
  const int n = net.node_count();
  if (n > max_nodes) {
    throw std::invalid_argument("transition_matrix: n = " + std::to_string(n) +
                                " exceeds the state-space cap of " + std::to_string(max_nodes) +
                                " nodes");
  }
  const std::size_t states = std::size_t{1} << n;
  std::vector<double> matrix(states * states);

  if (exec == Exec::kParallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t x = 0; x < static_cast<std::int64_t>(states); ++x) {
      const StateBits bits = decode_state(static_cast<std::uint64_t>(x), n);
      assemble_row(conditional_infection_probs(bits, net, k), &matrix[x * states]);
    }
  } else {
    for (std::size_t x = 0; x < states; ++x) {
      const StateBits bits = decode_state(x, n);
      assemble_row(conditional_infection_probs(bits, net, k), &matrix[x * states]);
    }
  }
  return matrix;
}

StateBits sample_step(const ContactNetwork& net, int k, const StateBits& x, RngStream& rng) {
  const int n = net.node_count();
  StateBits next(n, 0);
  for (int i = 0; i < n; ++i) {
    // draws only for infected senders; stop at the first success
    for (const Link& l : net.in_links(k, i)) {
      if (x[l.node] && rng.bernoulli(l.weight)) {
        next[i] = 1;
        break;
      }
    }
  }
  return next;
}

std::vector<StateBits> sample_trajectory(const ContactNetwork& net, const ProbVector& initial,
                                         RngStream& rng) {
  const int n = net.node_count();
  if (static_cast<int>(initial.size()) != n)
    throw std::invalid_argument("initial condition size mismatch");
  std::vector<StateBits> traj;
  traj.reserve(net.horizon() + 1);
  StateBits x(n);
  for (int i = 0; i < n; ++i) x[i] = rng.bernoulli(initial[i]) ? 1 : 0;
  traj.push_back(x);
  for (int k = 0; k < net.horizon(); ++k) {
    x = sample_step(net, k, x, rng);
    traj.push_back(x);
  }
  return traj;
}

namespace {

void accumulate_trial(const ContactNetwork& net, const ProbVector& initial, RngStream stream,
                      std::vector<std::uint64_t>& counts) {
  const int n = net.node_count();
  StateBits x(n);
  for (int i = 0; i < n; ++i) x[i] = stream.bernoulli(initial[i]) ? 1 : 0;
  for (int i = 0; i < n; ++i) counts[i] += x[i];
  for (int k = 0; k < net.horizon(); ++k) {
    x = sample_step(net, k, x, stream);
    std::uint64_t* row = counts.data() + static_cast<std::size_t>(k + 1) * n;
    for (int i = 0; i < n; ++i) row[i] += x[i];
  }
}

}  // namespace

TimeSeries monte_carlo_marginals(const ContactNetwork& net, const ProbVector& initial,
                                 std::int64_t trials, const RngStream& rng, Exec exec) {
  const int n = net.node_count();
  if (static_cast<int>(initial.size()) != n)
    throw std::invalid_argument("initial condition size mismatch");
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");

  const std::size_t cells = static_cast<std::size_t>(net.horizon() + 1) * n;
  std::vector<std::uint64_t> counts(cells, 0);

  if (exec == Exec::kParallel) {
#pragma omp parallel
    {
      std::vector<std::uint64_t> local(cells, 0);
#pragma omp for schedule(static)
      for (std::int64_t t = 0; t < trials; ++t) {
        accumulate_trial(net, initial, rng.child(static_cast<std::uint64_t>(t)), local);
      }
      // integer merge: the total is independent of thread count and order
#pragma omp critical
      {
        for (std::size_t c = 0; c < cells; ++c) counts[c] += local[c];
      }
    }
  } else {
    for (std::int64_t t = 0; t < trials; ++t) {
      accumulate_trial(net, initial, rng.child(static_cast<std::uint64_t>(t)), counts);
    }
  }

  TimeSeries freq(net.horizon() + 1, std::vector<double>(n));
  for (int k = 0; k <= net.horizon(); ++k) {
    for (int i = 0; i < n; ++i) {
      freq[k][i] = static_cast<double>(counts[static_cast<std::size_t>(k) * n + i]) /
                   static_cast<double>(trials);
    }
  }
  return freq;
}

void write_series_csv(const std::string& path, const TimeSeries& series) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "k,node,value\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    for (std::size_t i = 0; i < series[k].size(); ++i) {
      out << k << ',' << i << ',' << format_double(series[k][i]) << '\n';
    }
  }
}

}  // namespace transnn
