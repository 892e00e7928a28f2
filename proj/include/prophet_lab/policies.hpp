#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "prophet_lab/engine.hpp"
#include "prophet_lab/finite_dist.hpp"
#include "prophet_lab/stopping_dp.hpp"

namespace prophet {

/// Accept/reject rule of the batch game: batch i's maximum is taken iff it
/// exceeds threshold i. Built from the stopping table of the batch-maximum
/// distribution, so threshold i is the continuation value V_{batches - i}.
class BatchRule {
 public:
  explicit BatchRule(const StoppingTable& batch_max_table);

  std::size_t batches() const { return thresholds_.size(); }
  double threshold(std::size_t batch) const { return thresholds_.at(batch - 1); }
  const std::vector<double>& thresholds() const { return thresholds_; }

  void override_threshold(std::size_t batch, double value);

  bool accepts(std::size_t batch, double batch_max) const { return batch_max > threshold(batch); }

 private:
  std::vector<double> thresholds_;
};

/// Standard threshold rule: at step i accept the newest sample iff it is
/// strictly greater than t_i = V_{n-i}. Plays standard mode, windowed mode
/// (ignoring older samples) and batched mode with b = 1.
PolicyPtr threshold_policy(StoppingTable table);

/// Optimal batch rule for batches of size b. Also plays standard or windowed
/// mode when b = 1.
PolicyPtr batch_policy(BatchRule rule, std::size_t b);

/// Convenience: the optimal batch rule for n draws of d in batches of b.
PolicyPtr batch_policy(const FiniteDist& d, std::size_t n, std::size_t b);

/// Rule used inside the window algorithm: the optimal rule for k aligned
/// batches of w = n / k draws of d, with the second-to-last threshold
/// replaced by 1 - eps3 when eps3 is given.
BatchRule window_batch_rule(const FiniteDist& d, std::size_t n, std::size_t k,
                            std::optional<double> eps3 = std::nullopt);

/// Window algorithm for window size w = n / k: simulate the batch rule on the
/// aligned batches until it picks some X*, keep sliding until X* is the
/// oldest sample in the window (or the input ends), then accept the largest
/// visible sample.
PolicyPtr window_algo_a(const FiniteDist& d, std::size_t n, std::size_t k);

/// window_algo_a with the second-to-last batch threshold set to 1 - eps3.
/// Requires the batch-maximum law max_power(d, n / k) to have mean 1.
PolicyPtr window_algo_a_prime(const FiniteDist& d, std::size_t n, std::size_t k, double eps3);

/// m = n - (n mod b) - b, the slice length used by uniform_offset_wrapper.
std::size_t offset_slice_length(std::size_t n, std::size_t b);

/// Draws s uniformly from {1, ..., b}, ignores the first s samples, runs
/// `inner` (built for horizon m) on the next m samples and ignores the rest.
/// Throws ValidationError("input too short for offset wrapper") if m < 1.
PolicyPtr uniform_offset_wrapper(PolicyPtr inner, std::size_t n, std::size_t b, std::uint64_t salt);

/// Batched-mode policy that feeds each batch one sample at a time into a
/// window-k policy. If that policy picks a sample of the current batch it is
/// accepted; if it picks one from an earlier batch the game is forfeited.
PolicyPtr batch_from_window(PolicyPtr window_policy, std::size_t n, std::size_t b, std::size_t k);

/// Accepts the largest visible sample at the last step. With w = n this is
/// the prophet.
PolicyPtr final_window_max_policy();

}  // namespace prophet
