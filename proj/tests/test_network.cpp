#include "transnn/network.hpp"

#include <string>

#include "doctest.h"
#include "transnn/scenario.hpp"

using namespace transnn;

namespace {

std::string minimal_doc(const std::string& weights) {
  return R"({"n": 1, "T": 1, "beta": 0.5, "c": 1.0, "initial": [0.0], "weights": )" + weights +
         R"(, "seed": 1})";
}

}  // namespace

TEST_SUITE("network") {

TEST_CASE("minimal single-node scenario loads") {
  const Scenario sc = parse_scenario(minimal_doc("[[0.4]]"), "mini");
  CHECK(sc.network.node_count() == 1);
  CHECK(sc.network.horizon() == 1);
  CHECK(sc.network.weight(0, 0, 0) == 0.4);
  CHECK(sc.network.in_neighborhood(0, 0) == std::vector<int>{0});
  CHECK(sc.network.out_neighborhood(0, 0) == std::vector<int>{0});
}

TEST_CASE("probability out of range is rejected") {
  const std::string doc =
      R"({"n": 2, "T": 1, "beta": 0.5, "c": 1.0, "initial": [0, 0],
          "weights": [[0.2, 1.3], [null, 0.5]], "seed": 1})";
  CHECK_THROWS_WITH_AS(parse_scenario(doc, "bad"),
                       doctest::Contains("probability out of range"), std::invalid_argument);
}

TEST_CASE("missing self-loop weight is rejected, not defaulted") {
  const std::string doc =
      R"({"n": 2, "T": 1, "beta": 0.5, "c": 1.0, "initial": [0, 0],
          "weights": [[null, 0.2], [0.1, 0.5]], "seed": 1})";
  CHECK_THROWS_WITH_AS(parse_scenario(doc, "bad"), doctest::Contains("self-loop"),
                       std::invalid_argument);
}

TEST_CASE("unknown fields are rejected") {
  const std::string doc =
      R"({"n": 1, "T": 1, "beta": 0.5, "c": 1.0, "initial": [0], "weights": [[0.4]],
          "seed": 1, "extra": 2})";
  CHECK_THROWS_WITH_AS(parse_scenario(doc, "bad"), doctest::Contains("unknown field"),
                       std::invalid_argument);
}

TEST_CASE("malformed JSON is rejected") {
  CHECK_THROWS_WITH_AS(parse_scenario("{not json", "bad"), doctest::Contains("malformed"),
                       std::invalid_argument);
}

TEST_CASE("static specification expands to identical matrices at every step") {
  const std::string doc =
      R"({"n": 5, "T": 10, "beta": 0.3, "c": 100.0, "initial": [1, 0, 0, 1, 0],
          "weights": [[0.3, 0.6, null, null, null],
                      [0.8, 0.4, null, null, 0.4],
                      [0.7, null, 0.35, 0.5, null],
                      [0.35, null, null, 0.45, 0.75],
                      [null, null, null, 0.55, 0.3]],
          "seed": 42})";
  const Scenario sc = parse_scenario(doc, "static5");
  CHECK(sc.network.horizon() == 10);
  CHECK(sc.network.is_static());
  for (int k = 0; k < 10; ++k) {
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 5; ++j) {
        CHECK(sc.network.weight(k, i, j) == sc.network.weight(0, i, j));
      }
    }
  }
}

TEST_CASE("time-varying specification keeps per-step matrices") {
  const std::string doc =
      R"({"n": 1, "T": 2, "beta": 0.5, "c": 1.0, "initial": [0],
          "weights": [[[0.1]], [[0.9]]], "seed": 1})";
  const Scenario sc = parse_scenario(doc, "tv");
  CHECK_FALSE(sc.network.is_static());
  CHECK(sc.network.weight(0, 0, 0) == 0.1);
  CHECK(sc.network.weight(1, 0, 0) == 0.9);
}

TEST_CASE("time-varying weights must list exactly T matrices") {
  const std::string doc =
      R"({"n": 1, "T": 3, "beta": 0.5, "c": 1.0, "initial": [0],
          "weights": [[[0.1]], [[0.9]]], "seed": 1})";
  CHECK_THROWS_AS(parse_scenario(doc, "bad"), std::invalid_argument);
}

TEST_CASE("neighborhoods on a complete 3-node graph") {
  std::vector<double> w(9, 0.5);
  const auto net = ContactNetwork::static_network(3, 1, w);
  const std::vector<int> all{0, 1, 2};
  for (int i = 0; i < 3; ++i) {
    CHECK(net.in_neighborhood(0, i) == all);
    CHECK(net.out_neighborhood(0, i) == all);
  }
}

TEST_CASE("single directed edge orients in and out neighborhoods") {
  // edge (receiver 2 <- sender 1) plus self-loops
  std::vector<double> w(9, 0.0);
  w[0 * 3 + 0] = 0.2;
  w[1 * 3 + 1] = 0.2;
  w[2 * 3 + 2] = 0.2;
  w[2 * 3 + 1] = 0.7;
  const auto net = ContactNetwork::static_network(3, 1, w);
  CHECK(net.in_neighborhood(0, 2) == std::vector<int>{1, 2});
  CHECK(net.out_neighborhood(0, 1) == std::vector<int>{1, 2});
  CHECK(net.in_neighborhood(0, 1) == std::vector<int>{1});
  CHECK(net.out_neighborhood(0, 2) == std::vector<int>{2});
  CHECK(net.adjacent(0, 2, 1));
  CHECK_FALSE(net.adjacent(0, 1, 2));
}

TEST_CASE("isolated node neighborhoods are the node itself") {
  std::vector<double> w(4, 0.0);
  w[0] = 0.0;  // explicit zero self weight still keeps the self link
  w[3] = 0.5;
  const auto net = ContactNetwork::static_network(2, 1, w);
  CHECK(net.in_neighborhood(0, 0) == std::vector<int>{0});
  CHECK(net.out_neighborhood(0, 0) == std::vector<int>{0});
  CHECK(net.adjacent(0, 0, 0));
}

TEST_CASE("symmetric weights make in and out neighborhoods agree") {
  const RngStream rng(11);
  const int n = 6;
  std::vector<double> w(n * n, 0.0);
  RngStream s = rng.child(0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      const bool edge = s.bernoulli(0.5);
      const double v = edge ? s.uniform() : 0.0;
      w[i * n + j] = v;
      w[j * n + i] = v;
    }
  }
  for (int i = 0; i < n; ++i) w[i * n + i] = 0.3;
  const auto net = ContactNetwork::static_network(n, 2, w);
  for (int i = 0; i < n; ++i) {
    CHECK(net.in_neighborhood(1, i) == net.out_neighborhood(1, i));
  }
}

TEST_CASE("every neighborhood contains the node itself") {
  const auto net = make_random_network(7, 3, 0.4, 0.1, 0.9, true, RngStream(3));
  for (int k = 0; k < 3; ++k) {
    for (int i = 0; i < 7; ++i) {
      const auto in = net.in_neighborhood(k, i);
      const auto out = net.out_neighborhood(k, i);
      CHECK(std::find(in.begin(), in.end(), i) != in.end());
      CHECK(std::find(out.begin(), out.end(), i) != out.end());
    }
  }
}

TEST_CASE("in_links and weight agree") {
  const auto net = make_random_network(5, 2, 0.5, 0.05, 0.95, true, RngStream(17));
  for (int k = 0; k < 2; ++k) {
    for (int i = 0; i < 5; ++i) {
      for (const Link& l : net.in_links(k, i)) {
        CHECK(net.weight(k, i, l.node) == l.weight);
      }
      for (const Link& l : net.out_links(k, i)) {
        CHECK(net.weight(k, l.node, i) == l.weight);
      }
    }
  }
}

TEST_CASE("index errors") {
  const auto net = make_random_network(3, 2, 0.5, 0.1, 0.9, false, RngStream(1));
  CHECK_THROWS_AS(net.weight(2, 0, 0), std::out_of_range);
  CHECK_THROWS_AS(net.weight(0, 3, 0), std::out_of_range);
  CHECK_THROWS_AS(net.in_links(0, -1), std::out_of_range);
  CHECK_THROWS_AS(net.out_links(0, 5), std::out_of_range);
}

TEST_CASE("random networks are reproducible and respect the weight range") {
  const auto a = make_random_network(6, 4, 0.4, 0.2, 0.8, true, RngStream(5));
  const auto b = make_random_network(6, 4, 0.4, 0.2, 0.8, true, RngStream(5));
  CHECK(a.same_weights(b));
  for (int k = 0; k < 4; ++k) {
    for (int i = 0; i < 6; ++i) {
      CHECK(a.weight(k, i, i) >= 0.2);  // self-links always drawn
      for (const Link& l : a.in_links(k, i)) {
        CHECK(l.weight >= 0.2);
        CHECK(l.weight <= 0.8);
      }
    }
  }
}

TEST_CASE("scenario round-trips through JSON") {
  const auto original = load_scenario("scenarios/five_node.json");
  const std::string text = scenario_to_json(original);
  const Scenario back = parse_scenario(text, original.id);
  CHECK(back.network.same_weights(original.network));
  CHECK(back.initial == original.initial);
  CHECK(back.params.beta == original.params.beta);
  CHECK(back.params.c == original.params.c);
  CHECK(back.seed == original.seed);
}

}  // TEST_SUITE
