#include "prophet_lab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "prophet_lab/errors.hpp"
#include "prophet_lab/stopping_dp.hpp"
#include "prophet_lab/summation.hpp"

namespace prophet {

namespace {

class WindowSolver {
 public:
  WindowSolver(const std::vector<FiniteDist>& laws, std::size_t w) : laws_(laws), w_(w) {}

  double start() { return expect_next({}, 0); }

 private:
  // window holds the visible values after `consumed` draws.
  double value(const std::vector<double>& window, std::size_t consumed) {
    const double now = *std::max_element(window.begin(), window.end());
    if (consumed == laws_.size()) return now;
    const auto key = std::make_pair(consumed, window);
    if (const auto it = memo_.find(key); it != memo_.end()) return it->second;
    const double v = std::max(now, expect_next(window, consumed));
    memo_.emplace(key, v);
    return v;
  }

  double expect_next(const std::vector<double>& window, std::size_t consumed) {
    const FiniteDist& law = laws_[consumed];
    std::vector<double> next(window);
    if (next.size() == w_) next.erase(next.begin());
    next.push_back(0.0);
    CompensatedSum acc;
    for (std::size_t i = 0; i < law.size(); ++i) {
      next.back() = law.value(i);
      acc += law.prob(i) * value(next, consumed + 1);
    }
    return acc.value();
  }

  const std::vector<FiniteDist>& laws_;
  std::size_t w_;
  std::map<std::pair<std::size_t, std::vector<double>>, double> memo_;
};

}  // namespace

double exact_window_value(const std::vector<FiniteDist>& laws, std::size_t w) {
  if (laws.empty()) throw ValidationError("sequence must not be empty");
  if (w == 0 || w > laws.size()) throw ConfigError("window size must satisfy 1 <= w <= n");
  return WindowSolver(laws, w).start();
}

double exact_prophet_value(const std::vector<FiniteDist>& laws) {
  if (laws.empty()) throw ValidationError("sequence must not be empty");
  std::vector<double> xs;
  for (const auto& d : laws) xs.insert(xs.end(), d.support().begin(), d.support().end());
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  CompensatedSum acc;
  double prev = 0.0;
  for (const double x : xs) {
    double g = 1.0;
    for (const auto& d : laws) g *= cdf(d, x);
    acc += x * (g - prev);
    prev = g;
  }
  return acc.value();
}

std::vector<FiniteDist> noniid_sequence(double eps, std::size_t n) {
  if (!(eps > 0.0 && eps < 1.0)) throw ValidationError("eps must lie in (0, 1)");
  if (n < 2) throw ValidationError("sequence needs n >= 2");
  std::vector<FiniteDist> laws(n, FiniteDist::point_mass(0.0));
  laws.front() = FiniteDist::point_mass(1.0);
  laws.back() = FiniteDist({0.0, 1.0 / eps}, {1.0 - eps, eps});
  return laws;
}

NoniidResult noniid_demo(double eps, std::size_t n, std::size_t w) {
  if (w >= n) {
    throw ConfigError("window w = " + std::to_string(w) + " covers the whole input (n = " + std::to_string(n) +
                      "); the gambler sees every draw and the ratio is 1");
  }
  if (w < 2) throw ConfigError("demo needs w >= 2");
  const auto laws = noniid_sequence(eps, n);
  NoniidResult r;
  r.gambler = exact_window_value(laws, w);
  r.prophet = exact_prophet_value(laws);
  r.ratio = r.gambler / r.prophet;
  return r;
}

PaddingReport padding_experiment(const FiniteDist& d_m, std::size_t n, std::size_t k, double p,
                                 const Policy& policy, std::size_t trials, std::uint64_t seed,
                                 unsigned workers) {
  if (k == 0 || k > n) throw ConfigError("padding experiment needs 1 <= k <= n");
  if (!(p > 0.0 && p < 1.0)) throw ValidationError("p must lie in (0, 1)");
  const FiniteDist padded = zero_pad(d_m, p);

  PaddingReport rep;
  rep.windowed = monte_carlo(GameSetting::windowed(n, k), policy, padded, trials, seed, workers);
  rep.prophet = prophet_value(padded, n);
  rep.windowed_ratio = rep.windowed.mean / rep.prophet;
  rep.windowed_ratio_stderr = rep.windowed.std_error / rep.prophet;
  rep.standard_horizon = static_cast<std::size_t>(std::llround(static_cast<double>(n) * p));
  if (rep.standard_horizon >= 1) rep.standard_ratio = competitive_ratio(d_m, rep.standard_horizon);

  const double nonzero = survival(padded, 0.0);
  const std::uint64_t collision_root = derive_seed(seed, 0xc011151011ULL);
  std::vector<double> hits(trials, 0.0);
  if (nonzero > 0.0) {
    parallel_for(trials, workers, [&](std::size_t t) {
      std::mt19937_64 rng(derive_seed(collision_root, t));
      std::geometric_distribution<std::size_t> gap(nonzero);
      std::size_t last = 0;
      std::size_t pos = gap(rng) + 1;
      bool first = true;
      while (pos <= n) {
        if (!first && pos - last < k) {
          hits[t] = 1.0;
          return;
        }
        first = false;
        last = pos;
        pos += gap(rng) + 1;
      }
    });
  }
  rep.collision = summarize(hits, seed);
  const double nd = static_cast<double>(n);
  rep.collision_bound = nd * static_cast<double>(k) * p * p;
  rep.regime_violation = rep.collision_bound >= 1.0;
  return rep;
}

}  // namespace prophet
