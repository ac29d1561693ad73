#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "divcap/parallel.hpp"

using namespace divcap;

TEST_CASE("compensated sum recovers cancelled mass") {
  CompensatedSum s;
  s.add(1e16);
  s.add(1.0);
  s.add(-1e16);
  CHECK(s.value() == 1.0);
  const std::vector<double> xs{0.1, 0.2, 0.3};
  CHECK(compensated_sum(xs) == Catch::Approx(0.6));
}

TEST_CASE("parallel_map equals serial_map") {
  const auto f = [](std::size_t i) { return std::sin(static_cast<double>(i)) / (1.0 + i); };
  CHECK(parallel_map<double>(1000, f) == serial_map<double>(1000, f));
}

TEST_CASE("blocked_sum is bit-identical across thread counts") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> xs(50000);
  for (auto& x : xs) x = u(rng) * std::pow(10.0, 8.0 * u(rng));
  const auto f = [&](std::size_t i) { return xs[i]; };
  double one, many;
  {
    ThreadScope t(1);
    one = blocked_sum(xs.size(), f);
  }
  {
    ThreadScope t(4);
    many = blocked_sum(xs.size(), f);
  }
  CHECK(one == many);
}
