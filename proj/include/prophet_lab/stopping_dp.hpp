#pragma once

#include <cstddef>
#include <vector>

#include "prophet_lab/finite_dist.hpp"

namespace prophet {

/// Backward-induction values for the i.i.d. game on one distribution.
///
/// gambler_values[k-1] = V_k, prophet_values[k-1] = E_k, and
/// thresholds[i-1] = t_i = V_{n-i} with t_n = 0. A sample at step i is
/// accepted iff it is strictly greater than t_i.
struct StoppingTable {
  FiniteDist dist;
  std::size_t horizon = 0;
  std::vector<double> gambler_values;
  std::vector<double> prophet_values;
  std::vector<double> thresholds;

  /// V_k for 0 <= k <= horizon, with V_0 = 0.
  double gambler(std::size_t k) const { return k == 0 ? 0.0 : gambler_values.at(k - 1); }
  /// E_k for 1 <= k <= horizon.
  double prophet(std::size_t k) const { return prophet_values.at(k - 1); }
  /// t_step for 1 <= step <= horizon.
  double threshold(std::size_t step) const { return thresholds.at(step - 1); }
};

/// E[max{X, t}] = t P(X <= t) + sum_{v > t} v p_v.
double expected_max_with(const FiniteDist& d, double t);

/// E_k = E[max of k i.i.d. draws].
double prophet_value(const FiniteDist& d, std::size_t k);

StoppingTable build_table(const FiniteDist& d, std::size_t n);

/// V_n / E_n. Throws std::domain_error("prophet value zero") for the
/// all-zero distribution.
double competitive_ratio(const FiniteDist& d, std::size_t n);

/// Optimal value of the batch game: n draws of d_prime revealed b at a time,
/// equal to V_{n/b}(max_power(d_prime, b)). Throws unless b divides n.
double batch_value(const FiniteDist& d_prime, std::size_t n, std::size_t b);

/// q_i = P(X > t_i) for the thresholds of build_table(d, horizon).
std::vector<double> acceptance_probs(const FiniteDist& d, std::size_t horizon);

}  // namespace prophet
