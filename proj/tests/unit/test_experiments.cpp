#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "prophet_lab/errors.hpp"
#include "prophet_lab/experiments.hpp"
#include "prophet_lab/policies.hpp"
#include "prophet_lab/stopping_dp.hpp"

using namespace prophet;

TEST_CASE("non-iid example") {
  const auto r = noniid_demo(0.01, 10, 3);
  CHECK(std::abs(r.gambler - 1.0) <= 1e-12);
  CHECK(std::abs(r.prophet - 1.99) <= 1e-12);
  CHECK(std::abs(r.ratio - 1.0 / 1.99) <= 1e-12);
  CHECK(r.ratio == doctest::Approx(0.502513).epsilon(1e-6));

  for (double eps : {0.5, 0.1, 0.01, 0.9, 0.999}) {
    for (std::size_t w : {2u, 4u}) {
      const auto x = noniid_demo(eps, 6, w);
      CHECK(std::abs(x.ratio - 1.0 / (2.0 - eps)) <= 1e-12);
    }
  }
  CHECK(noniid_demo(0.999, 5, 2).ratio > 0.99);

  CHECK_THROWS_AS(noniid_demo(0.1, 10, 10), ConfigError);
  CHECK_THROWS_AS(noniid_demo(0.1, 10, 12), ConfigError);
  CHECK_THROWS_AS(noniid_demo(0.1, 10, 1), ConfigError);
  CHECK_THROWS_AS(noniid_demo(0.0, 10, 3), ValidationError);
  CHECK_THROWS_AS(noniid_demo(1.0, 10, 3), ValidationError);

  // a full window does see both useful draws
  const auto laws = noniid_sequence(0.1, 5);
  CHECK(exact_window_value(laws, 5) == doctest::Approx(exact_prophet_value(laws)).epsilon(1e-14));
}

TEST_CASE("exact window values on i.i.d. input") {
  std::mt19937_64 rng(61);
  for (int t = 0; t < 40; ++t) {
    const auto d = oracle::random_dist(rng, 3);
    const std::size_t n = 2 + rng() % 5;
    const std::vector<FiniteDist> laws(n, d);
    CHECK(std::abs(exact_window_value(laws, 1) - build_table(d, n).gambler(n)) <= 1e-12);
    CHECK(std::abs(exact_window_value(laws, n) - prophet_value(d, n)) <= 1e-12);
    CHECK(std::abs(exact_prophet_value(laws) - prophet_value(d, n)) <= 1e-12);
    double prev = 0.0;
    for (std::size_t w = 1; w <= n; ++w) {
      const double v = exact_window_value(laws, w);
      CHECK(v >= prev - 1e-12);
      prev = v;
      if (n % w == 0) CHECK(v >= batch_value(d, n, w) - 1e-12);
    }
  }
}

TEST_CASE("padding experiment") {
  const auto d_m = FiniteDist({1, 2, 4}, {0.6, 0.3, 0.1});

  SUBCASE("collisions respect the union bound") {
    const std::size_t n = 2000;
    const std::size_t k = 10;
    const double p = 0.005;
    const auto pol = threshold_policy(build_table(zero_pad(d_m, p), n));
    const auto rep = padding_experiment(d_m, n, k, p, *pol, 20000, 3, 4);
    CHECK(rep.collision_bound == doctest::Approx(0.5));
    CHECK_FALSE(rep.regime_violation);
    CHECK(rep.collision.mean <= rep.collision_bound + 3 * rep.collision.std_error);
    CHECK(rep.collision.mean > 0.0);
    CHECK(rep.standard_horizon == 10u);
    CHECK(rep.windowed.mean <= rep.prophet + 3 * rep.windowed.std_error);
  }

  SUBCASE("regime flag") {
    const auto pol = final_window_max_policy();
    const auto rep = padding_experiment(d_m, 1000, 10, 0.05, *pol, 100, 3);
    CHECK(rep.regime_violation);
    CHECK(rep.collision_bound >= 1.0);
  }

  SUBCASE("large padded instance behaves like the short standard game") {
    const std::size_t n = 100000;
    const std::size_t k = 100;
    const double p = std::pow(10.0, -3.5);
    const auto padded = zero_pad(d_m, p);
    const auto table = build_table(padded, n);
    const auto pol = threshold_policy(table);
    const auto rep = padding_experiment(d_m, n, k, p, *pol, 4000, 11, 8);
    CHECK(rep.standard_horizon == 32u);
    // n k p^2 sits right at 1 here, so the union bound is exhausted
    CHECK(rep.collision_bound == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(rep.windowed_ratio - rep.standard_ratio) <= 0.02);
    // exact version of the same comparison
    CHECK(std::abs(table.gambler(n) / table.prophet(n) - rep.standard_ratio) <= 0.02);
  }

  const auto pol = final_window_max_policy();
  CHECK_THROWS_AS(padding_experiment(d_m, 10, 11, 0.1, *pol, 10, 1), ConfigError);
  CHECK_THROWS_AS(padding_experiment(d_m, 10, 2, 1.0, *pol, 10, 1), ValidationError);
}
