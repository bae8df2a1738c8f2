#include "transnn/scenario.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace transnn {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& what) {
  throw std::invalid_argument("scenario: " + what);
}

double number_field(const json& doc, const char* key) {
  if (!doc.at(key).is_number()) fail(std::string(key) + " must be a number");
  return doc.at(key).get<double>();
}

std::vector<double> parse_matrix(const json& m, int n, int step) {
  if (!m.is_array() || static_cast<int>(m.size()) != n)
    fail("weights matrix at step " + std::to_string(step) + " must have " + std::to_string(n) +
         " rows");
  std::vector<double> w(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    const json& row = m[i];
    if (!row.is_array() || static_cast<int>(row.size()) != n)
      fail("weights row " + std::to_string(i) + " at step " + std::to_string(step) +
           " must have " + std::to_string(n) + " entries");
    for (int j = 0; j < n; ++j) {
      const json& cell = row[j];
      if (cell.is_null()) {
        if (i == j)
          fail("missing self-loop weight for node " + std::to_string(i) + " at step " +
               std::to_string(step));
        continue;  // null off-diagonal: no link
      }
      if (!cell.is_number())
        fail("weight (" + std::to_string(i) + "," + std::to_string(j) + ") at step " +
             std::to_string(step) + " must be a number or null");
      const double v = cell.get<double>();
      if (!(v >= 0.0 && v <= 1.0))
        fail("probability out of range: weight (" + std::to_string(i) + "," + std::to_string(j) +
             ") at step " + std::to_string(step) + " is " + std::to_string(v));
      w[static_cast<std::size_t>(i) * n + j] = v;
    }
  }
  return w;
}

}  // namespace

Scenario parse_scenario(const std::string& json_text, std::string id) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(std::string("malformed document: ") + e.what());
  }
  if (!doc.is_object()) fail("document must be a JSON object");

  static const std::set<std::string> known = {"n", "T", "beta", "c", "initial", "weights", "seed"};
  for (const auto& item : doc.items()) {
    if (!known.count(item.key())) fail("unknown field \"" + item.key() + "\"");
  }
  for (const auto& key : known) {
    if (!doc.contains(key)) fail("missing field \"" + key + "\"");
  }

  if (!doc["n"].is_number_integer() || doc["n"].get<long long>() < 1) fail("n must be >= 1");
  if (!doc["T"].is_number_integer() || doc["T"].get<long long>() < 1) fail("T must be >= 1");
  const int n = doc["n"].get<int>();
  const int horizon = doc["T"].get<int>();

  CostParams params;
  params.beta = number_field(doc, "beta");
  params.c = number_field(doc, "c");
  params.horizon = horizon;
  if (!(params.beta >= 0.0 && params.beta <= 1.0)) fail("beta must be in [0,1]");
  if (params.c < 0.0) fail("c must be >= 0");

  const json& init = doc["initial"];
  if (!init.is_array() || static_cast<int>(init.size()) != n)
    fail("initial must be an array of " + std::to_string(n) + " probabilities");
  ProbVector initial(n);
  for (int i = 0; i < n; ++i) {
    if (!init[i].is_number()) fail("initial[" + std::to_string(i) + "] must be a number");
    initial[i] = init[i].get<double>();
    if (!(initial[i] >= 0.0 && initial[i] <= 1.0))
      fail("initial[" + std::to_string(i) + "] out of [0,1]");
  }

  if (!doc["seed"].is_number_unsigned()) fail("seed must be a nonnegative integer");
  const std::uint64_t seed = doc["seed"].get<std::uint64_t>();

  const json& weights = doc["weights"];
  if (!weights.is_array() || weights.empty()) fail("weights must be a non-empty array");

  ContactNetwork net = [&] {
    const bool per_step = weights[0].is_array() && !weights[0].empty() && weights[0][0].is_array();
    if (!per_step) {
      return ContactNetwork::static_network(n, horizon, parse_matrix(weights, n, 0));
    }
    if (static_cast<int>(weights.size()) != horizon)
      fail("time-varying weights must list exactly T = " + std::to_string(horizon) + " matrices");
    std::vector<std::vector<double>> steps;
    steps.reserve(weights.size());
    for (int k = 0; k < horizon; ++k) steps.push_back(parse_matrix(weights[k], n, k));
    return ContactNetwork::time_varying(n, std::move(steps));
  }();

  return Scenario{std::move(id), std::move(net), params, std::move(initial), seed};
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("scenario: cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), std::filesystem::path(path).stem().string());
}

std::string scenario_to_json(const Scenario& sc) {
  const int n = sc.network.node_count();
  auto matrix_json = [&](int k) {
    json m = json::array();
    for (int i = 0; i < n; ++i) {
      json row = json::array();
      for (int j = 0; j < n; ++j) {
        if (sc.network.adjacent(k, i, j))
          row.push_back(sc.network.weight(k, i, j));
        else
          row.push_back(nullptr);
      }
      m.push_back(std::move(row));
    }
    return m;
  };

  json doc;
  doc["n"] = n;
  doc["T"] = sc.network.horizon();
  doc["beta"] = sc.params.beta;
  doc["c"] = sc.params.c;
  doc["initial"] = sc.initial;
  doc["seed"] = sc.seed;
  if (sc.network.is_static()) {
    doc["weights"] = matrix_json(0);
  } else {
    json steps = json::array();
    for (int k = 0; k < sc.network.horizon(); ++k) steps.push_back(matrix_json(k));
    doc["weights"] = std::move(steps);
  }
  return doc.dump(2);
}

}  // namespace transnn
