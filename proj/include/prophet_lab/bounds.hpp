#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "prophet_lab/finite_dist.hpp"
#include "prophet_lab/hardsearch.hpp"

namespace prophet {

/// Guaranteed improvement of the window algorithm over the optimal batch
/// rule, for k batches whose maxima follow d_batchmax:
///
///   sum_{i<k} q_i^2 / 4 * E[max - min | both > F^{-1}(1 - q_i)] * prod_{j<i} (1 - q_j)
///
/// with q_i = acceptance_probs(d_batchmax, k)[i] and the expectation over two
/// independent draws. Always >= 0.
double delta_gap(const FiniteDist& d_batchmax, std::size_t k);

/// alpha_l + (l-1)/(l-1.35) * (1 - (0.35/(l-1))^(l/k)). Needs 2 <= l <= k.
double clean_upper_bound(std::size_t k, std::size_t l, double alpha_l);

/// clean_upper_bound with l = round(sqrt(k)), at least 2.
double clean_upper_bound(std::size_t k, double alpha_sqrt_k);

/// Refined upper bound on the window-n/k ratio built from a hard l-sample
/// distribution. d_prime is the law of one window maximum; its (k/l)-th CDF
/// power is the batch-maximum law H whose l-sample ratio is alpha_l.
/// The failure event of batch j (counted from the end) is a window maximum
/// above V_{j-2}(H); thresholds for j <= 2 are 0. Throws ValidationError if
/// alpha_l * delta >= 1 or l is not in [2, k].
double tight_upper_bound(const FiniteDist& d_prime, std::size_t l, std::size_t k, double alpha_l, double delta);

/// The window-maximum law matching a hard l-sample distribution at window
/// n/k: cdf_power(hard, l / k).
FiniteDist window_max_law(const FiniteDist& hard, std::size_t l, std::size_t k);

struct BoundReport {
  std::size_t k = 0;
  /// Sample count of the hard distribution behind the upper bound.
  std::size_t l = 0;
  double alpha_l = 0.0;
  Provenance alpha_l_source = Provenance::search;
  /// Lower bound column: the alpha_k estimate.
  double alpha_k = 0.0;
  Provenance alpha_k_source = Provenance::search;
  /// Gap of the window algorithm over batch play on the alpha_k witness; 0
  /// when no witness is available.
  double delta_gap = 0.0;
  double clean_bound = 0.0;
  std::optional<double> tight_bound;
  /// min(clean, tight) at the chosen l.
  double upper = 0.0;
  /// upper > 1: no information about the ratio.
  bool vacuous = false;
};

/// For each k, picks the l in the table (2 <= l < k) that minimizes the
/// tight bound when a witness is available and the clean bound otherwise,
/// and reports it next to the alpha_k estimate. Every k needs an entry.
std::vector<BoundReport> bound_sweep(const std::vector<std::size_t>& k_list, const AlphaTable& table,
                                     double delta = 1e-4);

}  // namespace prophet
