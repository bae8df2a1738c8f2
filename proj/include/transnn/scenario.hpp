#pragma once

#include <cstdint>
#include <string>

#include "transnn/network.hpp"
#include "transnn/types.hpp"

namespace transnn {

/// A fully specified experiment: network, cost parameters, initial infection
/// probabilities (0/1 entries express a deterministic state) and RNG seed.
struct Scenario {
  std::string id;
  ContactNetwork network;
  CostParams params;
  ProbVector initial;
  std::uint64_t seed = 0;
};

/// Parses a scenario document. Schema (all fields required, unknown fields
/// rejected):
///   n        node count
///   T        horizon
///   beta     vaccine effectiveness factor in [0,1]
///   c        infection cost weight >= 0
///   initial  array of n per-node infection probabilities
///   weights  n*n matrix (static) or array of T n*n matrices (time-varying);
///            off-diagonal null means "no link", diagonal entries must be
///            numbers (self-links are never defaulted)
///   seed     unsigned RNG seed
Scenario parse_scenario(const std::string& json_text, std::string id);

/// Loads and parses; scenario id is the file stem.
Scenario load_scenario(const std::string& path);

/// Inverse of parse_scenario up to elementwise weight equality; absent links
/// serialize as null.
std::string scenario_to_json(const Scenario& sc);

}  // namespace transnn
