#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "prophet_lab/engine.hpp"
#include "prophet_lab/finite_dist.hpp"

namespace prophet {

/// Optimal expected payoff in the windowed game over independent, not
/// necessarily identical draws X_i ~ laws[i], by exhaustive recursion over
/// window contents. Exponential in the window; meant for small instances.
double exact_window_value(const std::vector<FiniteDist>& laws, std::size_t w);

/// E[max_i X_i] for independent X_i ~ laws[i].
double exact_prophet_value(const std::vector<FiniteDist>& laws);

struct NoniidResult {
  double gambler = 0.0;
  double prophet = 0.0;
  double ratio = 0.0;
};

/// X_1 = 1, X_n = 1/eps with probability eps (else 0), all other draws 0.
/// Any window smaller than n separates the two useful draws.
std::vector<FiniteDist> noniid_sequence(double eps, std::size_t n);

/// Exact values of the non-i.i.d. example. Needs 0 < eps < 1 and
/// 2 <= w < n; w >= n throws ConfigError since the gambler then sees
/// everything.
NoniidResult noniid_demo(double eps, std::size_t n, std::size_t w);

struct PaddingReport {
  McEstimate windowed;
  /// E_n of the padded law.
  double prophet = 0.0;
  double windowed_ratio = 0.0;
  double windowed_ratio_stderr = 0.0;
  std::size_t standard_horizon = 0;
  /// Exact standard-game ratio of the unpadded law at round(n p).
  double standard_ratio = 0.0;
  /// Frequency of two nonzero draws less than k apart.
  McEstimate collision;
  double collision_bound = 0.0;
  /// n k p^2 >= 1: the union bound says nothing.
  bool regime_violation = false;
};

/// Windowed game (window k) on n draws of zero_pad(d_m, p) played by
/// `policy`. Collisions are sampled from an independent stream by drawing
/// geometric gaps between nonzero positions.
PaddingReport padding_experiment(const FiniteDist& d_m, std::size_t n, std::size_t k, double p,
                                 const Policy& policy, std::size_t trials, std::uint64_t seed,
                                 unsigned workers = 1);

}  // namespace prophet
