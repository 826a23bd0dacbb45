#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include "doctest.h"
#include "lpmk/parallel.hpp"

TEST_CASE("pairwise sum reproduces exact closed forms") {
  std::vector<double> ones(100000, 1.0);
  CHECK(lpmk::pairwise_sum(ones) == 100000.0);

  // sum of 1/2^k is exactly representable and the tree must hit it exactly.
  std::vector<double> geometric;
  for (int k = 1; k <= 40; ++k) geometric.push_back(std::ldexp(1.0, -k));
  CHECK(lpmk::pairwise_sum(geometric) == 1.0 - std::ldexp(1.0, -40));
}

TEST_CASE("pairwise sum beats naive accumulation on an ill-conditioned series") {
  // Alternating series with huge cancellation: pairwise error stays O(log N).
  const std::size_t count = 1 << 18;
  std::vector<double> data(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double x = static_cast<double>(i % 997) - 498.0;
    data[i] = x * 1e10 + 1.0 / (1.0 + static_cast<double>(i));
  }
  const double pw = lpmk::pairwise_sum(data);
  long double exact = 0.0L;
  for (double v : data) exact += static_cast<long double>(v);
  CHECK(std::abs(pw - static_cast<double>(exact)) <=
        1e-6 * std::abs(static_cast<double>(exact)));
}

TEST_CASE("sum_terms is bit-identical across worker counts") {
  const std::size_t count = 50000;
  const auto term = [](std::size_t i) {
    const double x = 0.001 * static_cast<double>(i);
    return std::sin(x) * std::exp(-x * 1e-3);
  };
  const double serial = lpmk::sum_terms_serial(count, term);
  for (int workers : {1, 2, 3, 7}) {
    CHECK(lpmk::sum_terms(count, workers, term) == serial);
  }
}

TEST_CASE("parallel_for writes every index exactly once for any worker count") {
  const std::size_t count = 12345;
  for (int workers : {1, 4}) {
    std::vector<int> hits(count, 0);
    lpmk::parallel_for(count, workers, [&](std::size_t i) { hits[i] += 1; });
    bool all_once = true;
    for (int h : hits) all_once = all_once && (h == 1);
    CHECK(all_once);
  }
}

TEST_CASE("max_terms returns the exact maximum and rejects empty input") {
  std::mt19937_64 rng(42);
  const std::size_t count = 10001;
  std::vector<double> data(count);
  double expected = -1e300;
  for (std::size_t i = 0; i < count; ++i) {
    data[i] = static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5;
    expected = std::max(expected, data[i]);
  }
  CHECK(lpmk::max_terms(count, 3, [&](std::size_t i) { return data[i]; }) == expected);
  CHECK_THROWS_AS(lpmk::max_terms(0, 1, [](std::size_t) { return 0.0; }),
                  std::invalid_argument);
}

TEST_CASE("resolve_workers maps nonpositive requests to at least one thread") {
  CHECK(lpmk::resolve_workers(0) >= 1);
  CHECK(lpmk::resolve_workers(-3) >= 1);
  CHECK(lpmk::resolve_workers(5) >= 1);
}
