#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace transnn {

/// Per-node infection probabilities p, elementwise in [0,1].
using ProbVector = std::vector<double>;

/// Per-node information states s = -log(1-p), elementwise in [0,+inf].
using InfoVector = std::vector<double>;

/// Binary node states, one byte per node (0 healthy, 1 infected).
using StateBits = std::vector<std::uint8_t>;

/// Node-indexed values over time: series[k][i] for k = 0..T (or 0..T-1).
using TimeSeries = std::vector<std::vector<double>>;

/// Whether a data-parallel kernel runs serially or with OpenMP. Both paths
/// produce bit-identical results; the serial one is the reference.
enum class Exec { kSerial, kParallel };

struct CostParams {
  double c = 0.0;      // per-step cost of one infected node
  double beta = 1.0;   // vaccine effectiveness factor: w -> w*beta while vaccinated
  int horizon = 1;     // T

  void validate() const {
    if (c < 0.0) throw std::invalid_argument("cost weight c must be >= 0");
    if (!(beta >= 0.0 && beta <= 1.0))
      throw std::invalid_argument("beta must be in [0,1]");
    if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  }
};

/// Open-loop vaccination schedule, bit per (time, node).
struct Schedule {
  int horizon = 0;
  int n = 0;
  std::vector<std::uint8_t> bits;  // horizon * n, row k then node i

  Schedule() = default;
  Schedule(int horizon_, int n_)
      : horizon(horizon_), n(n_), bits(static_cast<std::size_t>(horizon_) * n_, 0) {}

  std::uint8_t at(int k, int i) const { return bits[static_cast<std::size_t>(k) * n + i]; }
  std::uint8_t& at(int k, int i) { return bits[static_cast<std::size_t>(k) * n + i]; }

  bool operator==(const Schedule&) const = default;
};

}  // namespace transnn
