#include "transnn/rng.hpp"

#include "doctest.h"

using transnn::RngStream;

TEST_SUITE("rng") {

TEST_CASE("same seed reproduces the sequence") {
  RngStream a(123), b(123);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different seeds diverge") {
  RngStream a(1), b(2);
  int equal = 0;
  for (int i = 0; i < 64; ++i) equal += a.next_u64() == b.next_u64();
  CHECK(equal == 0);
}

TEST_CASE("children are deterministic and distinct") {
  const RngStream root(7);
  RngStream c0 = root.child(0);
  RngStream c0b = root.child(0);
  RngStream c1 = root.child(1);
  CHECK(c0.next_u64() == c0b.next_u64());
  RngStream c0c = root.child(0);
  CHECK(c0c.next_u64() != c1.next_u64());
}

TEST_CASE("uniform stays in [0,1)") {
  RngStream r(99);
  for (int i = 0; i < 10000; ++i) {
    const double u = r.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("bernoulli edge probabilities are exact") {
  RngStream r(5);
  for (int i = 0; i < 1000; ++i) {
    CHECK_FALSE(r.bernoulli(0.0));
    CHECK(r.bernoulli(1.0));
  }
}

TEST_CASE("bernoulli mean is unbiased") {
  RngStream r(2024);
  const int trials = 100000;
  int hits = 0;
  for (int i = 0; i < trials; ++i) hits += r.bernoulli(0.3);
  const double mean = static_cast<double>(hits) / trials;
  CHECK(std::abs(mean - 0.3) < 3.0 * std::sqrt(0.3 * 0.7 / trials));
}

}  // TEST_SUITE
