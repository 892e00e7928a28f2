#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "oracles.hpp"
#include "prophet_lab/dist_io.hpp"
#include "prophet_lab/errors.hpp"
#include "prophet_lab/finite_dist.hpp"
#include "prophet_lab/stopping_dp.hpp"

using namespace prophet;

namespace {

FiniteDist D(std::vector<double> v, std::vector<double> p) { return FiniteDist(std::move(v), std::move(p)); }

void check_same(const FiniteDist& a, const FiniteDist& b, double tol) {
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.value(i) == b.value(i));
    CHECK(std::abs(a.prob(i) - b.prob(i)) <= tol);
  }
}

void check_valid(const FiniteDist& d) {
  double total = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    CHECK(d.prob(i) > 0.0);
    CHECK(d.value(i) >= 0.0);
    if (i > 0) CHECK(d.value(i) > d.value(i - 1));
    total += d.prob(i);
  }
  CHECK(std::abs(total - 1.0) <= 1e-12);
}

}  // namespace

TEST_CASE("mean") {
  CHECK(mean(D({0, 1}, {0.5, 0.5})) == 0.5);
  CHECK(mean(FiniteDist::point_mass(1.0)) == 1.0);
  CHECK(mean(D({0, 1, 10}, {0.5, 0.4, 0.1})) == doctest::Approx(1.4).epsilon(1e-15));
}

TEST_CASE("cdf and quantile_upper") {
  const auto two = D({0, 1}, {0.25, 0.75});
  CHECK(cdf(two, 0) == 0.25);
  CHECK(cdf(two, -1) == 0.0);
  CHECK(cdf(two, 5) == 1.0);
  CHECK(quantile_upper(two, 0.75) == 0.0);
  const auto three = D({0, 1, 10}, {0.5, 0.4, 0.1});
  CHECK(quantile_upper(three, 0.05) == 10.0);
  CHECK(quantile_upper(three, 1.0) == 0.0);
  CHECK(quantile_upper(three, 0.0) == 10.0);
  CHECK(quantile_upper(three, 0.1) == 1.0);
  CHECK_THROWS_AS(quantile_upper(three, 1.5), ValidationError);

  std::mt19937_64 rng(3);
  for (int t = 0; t < 200; ++t) {
    const auto d = oracle::random_dist(rng, 6);
    double prev = -1.0;
    for (double x = -0.5; x < 11.0; x += 0.01) {
      const double c = cdf(d, x);
      CHECK(c >= prev);
      prev = c;
    }
  }
}

TEST_CASE("max_power") {
  check_same(max_power(D({0, 1}, {0.5, 0.5}), 2), D({0, 1}, {0.25, 0.75}), 1e-15);
  check_same(max_power(D({0, 1, 10}, {0.5, 0.4, 0.1}), 2), D({0, 1, 10}, {0.25, 0.56, 0.19}), 1e-15);
  const auto d = D({0.5, 2, 3}, {0.2, 0.3, 0.5});
  CHECK(max_power(d, 1) == d);

  std::mt19937_64 rng(5);
  for (int t = 0; t < 300; ++t) {
    const auto x = oracle::random_dist(rng, 6);
    for (std::size_t j = 1; j <= 4; ++j) {
      for (std::size_t k = 1; k <= 4; ++k) {
        const auto direct = max_power(x, j * k);
        const auto nested = max_power(max_power(x, j), k);
        check_same(direct, nested, 1e-12);
        check_valid(direct);
      }
    }
    // mean of the power law equals the enumerated prophet value
    CHECK(mean(max_power(x, 3)) == doctest::Approx(oracle::prophet_enum(x, 3)).epsilon(1e-12));
  }
}

TEST_CASE("kth_root") {
  check_same(kth_root(D({0, 1}, {0.25, 0.75}), 2), D({0, 1}, {0.5, 0.5}), 1e-15);
  const auto d = D({0.5, 2, 3}, {0.2, 0.3, 0.5});
  CHECK(kth_root(d, 1) == d);

  std::mt19937_64 rng(7);
  for (int t = 0; t < 300; ++t) {
    const auto x = oracle::random_dist(rng, 6);
    for (std::size_t k : {2u, 3u, 5u, 8u}) {
      const auto root = kth_root(x, k);
      check_valid(root);
      // closed form against the top-down peeling
      const auto peeled = oracle::root_top_down(x, k);
      REQUIRE(root.size() == peeled.size());
      for (std::size_t i = 0; i < peeled.size(); ++i) CHECK(std::abs(root.prob(i) - peeled[i]) <= 1e-12);
      check_same(kth_root(max_power(x, k), k), x, 1e-12);
      check_same(max_power(root, k), x, 1e-12);
    }
  }
}

TEST_CASE("dilate") {
  check_same(dilate(D({0.25, 0.75}, {0.5, 0.5}), 0, 1), D({0, 1}, {0.5, 0.5}), 1e-15);
  const auto outside = D({0, 5, 9}, {0.2, 0.5, 0.3});
  CHECK(dilate(outside, 1, 4) == outside);
  // endpoints already in the support are merged
  check_same(dilate(D({0, 0.5, 1}, {0.2, 0.4, 0.4}), 0, 1), D({0, 1}, {0.4, 0.6}), 1e-15);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int t = 0; t < 1000; ++t) {
    const auto x = oracle::random_dist(rng, 5);
    const auto y = oracle::random_dist(rng, 5);
    double a = u(rng);
    double b = u(rng);
    if (a > b) std::swap(a, b);
    if (b - a < 1e-3) b = a + 1e-3;
    const auto yd = dilate(y, a, b);
    check_valid(yd);
    CHECK(std::abs(mean(yd) - mean(y)) <= 1e-12);
    CHECK(oracle::expected_max_pair(x, yd) >= oracle::expected_max_pair(x, y) - 1e-12);
  }
}

TEST_CASE("zero_pad") {
  check_same(zero_pad(FiniteDist::point_mass(1.0), 0.3), D({0, 1}, {0.7, 0.3}), 1e-15);
  const auto d = D({0, 2, 3}, {0.2, 0.3, 0.5});
  CHECK(zero_pad(d, 1.0) == d);
  check_same(zero_pad(d, 0.5), D({0, 2, 3}, {0.6, 0.15, 0.25}), 1e-15);
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int t = 0; t < 200; ++t) {
    const auto x = oracle::random_dist(rng, 6);
    const double p = u(rng);
    CHECK(std::abs(mean(zero_pad(x, p)) - p * mean(x)) <= 1e-12);
  }
  CHECK_THROWS_AS(zero_pad(d, 0.0), ValidationError);
  CHECK_THROWS_AS(zero_pad(d, 1.5), ValidationError);
}

TEST_CASE("scale") {
  check_same(scale(D({0, 2}, {0.5, 0.5}), 0.5), D({0, 1}, {0.5, 0.5}), 0);
  std::mt19937_64 rng(17);
  for (int t = 0; t < 200; ++t) {
    const auto x = oracle::random_dist(rng, 6);
    if (mean(x) == 0.0) continue;
    const auto unit = scale(x, 1.0 / mean(x));
    CHECK(mean(unit) == doctest::Approx(1.0).epsilon(1e-14));
    if (x.max_value() > 0.0) {
      CHECK(std::abs(competitive_ratio(unit, 7) - competitive_ratio(x, 7)) <= 1e-12);
    }
  }
  CHECK_THROWS_AS(scale(FiniteDist::point_mass(1.0), 0.0), ValidationError);
}

TEST_CASE("construction hygiene") {
  SUBCASE("sorting and merging") {
    const auto d = D({2, 1, 1 + 1e-13}, {0.2, 0.5, 0.3});
    REQUIRE(d.size() == 2);
    CHECK(d.value(0) == 1.0);
    CHECK(d.prob(0) == doctest::Approx(0.8));
  }
  SUBCASE("zero masses dropped") {
    const auto d = D({0, 1, 2}, {0.5, 0.0, 0.5});
    CHECK(d.size() == 2);
  }
  SUBCASE("renormalization is recorded") {
    const auto d = D({0, 1}, {0.5, 0.5 + 1e-10});
    CHECK(d.hygiene_adjustment() > 0.0);
    CHECK(d.hygiene_adjustment() < 1e-9);
  }
  SUBCASE("invalid input") {
    CHECK_THROWS_AS(D({-1, 1}, {0.5, 0.5}), ValidationError);
    CHECK_THROWS_AS(D({0, INFINITY}, {0.5, 0.5}), ValidationError);
    CHECK_THROWS_AS(D({0, 1}, {0.5, 0.6}), ValidationError);
    CHECK_THROWS_AS(D({0, 1}, {1.5, -0.5}), ValidationError);
    CHECK_THROWS_AS(D({0, 1}, {0.5}), ValidationError);
    CHECK_THROWS_AS(D({}, {}), ValidationError);
  }
}

TEST_CASE("distribution files and inline specs") {
  const auto d = D({0, 1, 10}, {0.5, 0.4, 0.1});
  const auto path = std::filesystem::temp_directory_path() / "prophet_lab_dist_roundtrip.json";
  save_dist_file(path, d);
  const auto loaded = load_dist_file(path);
  CHECK(loaded.dist == d);
  CHECK(loaded.id == "prophet_lab_dist_roundtrip");
  CHECK(resolve_dist(path.string()).dist == d);
  std::filesystem::remove(path);

  CHECK(parse_inline_dist("0:0.5,1:0.4,10:0.1") == d);
  CHECK(resolve_dist("0:0.5, 1:0.4, 10:0.1").dist == d);
  CHECK_THROWS_AS(parse_inline_dist("0:0.5,1"), ValidationError);
  CHECK_THROWS_AS(parse_inline_dist("a:1"), ValidationError);
  CHECK_THROWS_AS(parse_inline_dist("0:0.5,1:0.2"), ValidationError);

  CHECK_THROWS_AS(dist_from_json(nlohmann::json{{"support", {1, 0}}, {"probs", {0.5, 0.5}}}), ValidationError);
  CHECK_THROWS_AS(dist_from_json(nlohmann::json{{"support", {0, 1}}, {"probs", {1.0, 0.0}}}), ValidationError);
  CHECK_THROWS_AS(dist_from_json(nlohmann::json{{"support", {0, 1}}}), ValidationError);
}
