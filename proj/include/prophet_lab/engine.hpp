#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "prophet_lab/finite_dist.hpp"

namespace prophet {

enum class Mode { standard, batched, windowed };

std::string to_string(Mode mode);

/// Presentation mode plus horizon. `param` is the batch size b, the window
/// size w, or 1 in standard mode.
struct GameSetting {
  Mode mode = Mode::standard;
  std::size_t n = 1;
  std::size_t param = 1;

  static GameSetting standard(std::size_t n);
  static GameSetting batched(std::size_t n, std::size_t b);
  static GameSetting windowed(std::size_t n, std::size_t w);

  /// Throws ConfigError unless b | n (batched) or 1 <= w <= n (windowed).
  void validate() const;
};

/// One revealed sample; `index` is 1-based and absolute.
struct Sample {
  std::size_t index = 0;
  double value = 0.0;
};

/// What a policy may see: the samples it can still accept, how many samples
/// have been revealed so far, and the total horizon.
struct ViewState {
  std::span<const Sample> visible;
  std::size_t consumed = 0;
  std::size_t n = 0;

  const Sample& newest() const { return visible.back(); }
  /// Largest visible value; the latest index wins ties.
  const Sample& best() const;
};

struct Decision {
  enum class Kind { pass, accept, forfeit };
  Kind kind = Kind::pass;
  std::size_t index = 0;

  static Decision pass() { return {}; }
  static Decision accept(std::size_t i) { return {Kind::accept, i}; }
  /// Ends the game with payoff 0.
  static Decision forfeit() { return {Kind::forfeit, 0}; }
};

/// Per-trajectory policy state. decide() is called once per step with the
/// current view.
class PolicyRun {
 public:
  virtual ~PolicyRun() = default;
  virtual Decision decide(const ViewState& view) = 0;
};

/// Immutable stopping policy; start() creates the state for one trajectory.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::unique_ptr<PolicyRun> start(std::uint64_t trajectory_seed) const = 0;
  /// Throws ConfigError if the policy cannot play the given setting.
  virtual void check(const GameSetting& setting) const = 0;
  virtual std::string name() const = 0;
};

using PolicyPtr = std::shared_ptr<const Policy>;

struct Outcome {
  double payoff = 0.0;
  std::optional<std::size_t> index;
  bool forfeited = false;
  /// Samples revealed when the game ended.
  std::size_t steps = 0;
};

/// Mixes a root seed with a counter (splitmix64 finalizer); used for
/// per-trajectory seeds and for independent sub-streams.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index);

/// Inverse-CDF sampler for one trajectory.
class SampleStream {
 public:
  SampleStream(const FiniteDist& d, std::uint64_t trajectory_seed);
  double next();

 private:
  const FiniteDist* dist_;
  std::mt19937_64 rng_;
};

/// Plays one game, drawing samples lazily from d with the given trajectory
/// seed. Throws std::logic_error if the policy accepts an index that is not
/// visible.
Outcome play(const GameSetting& setting, const Policy& policy, const FiniteDist& d,
             std::uint64_t trajectory_seed);

/// Plays one game on a pre-drawn sequence of exactly setting.n samples.
Outcome play_sequence(const GameSetting& setting, const Policy& policy,
                      std::span<const double> samples, std::uint64_t trajectory_seed);

/// Full sample sequence of a trajectory, identical to what play() reveals.
std::vector<double> draw_sequence(const FiniteDist& d, std::size_t n, std::uint64_t trajectory_seed);

struct McEstimate {
  double mean = 0.0;
  /// Sample standard deviation over sqrt(trials).
  double std_error = 0.0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
};

/// Mean and standard error of a sample, merged with pairwise summation.
McEstimate summarize(std::span<const double> values, std::uint64_t seed);

/// Plays `trials` independent games; trajectory t uses derive_seed(seed, t).
/// The result is identical for every worker count.
std::vector<Outcome> simulate(const GameSetting& setting, const Policy& policy, const FiniteDist& d,
                              std::size_t trials, std::uint64_t seed, unsigned workers = 1);

McEstimate monte_carlo(const GameSetting& setting, const Policy& policy, const FiniteDist& d,
                       std::size_t trials, std::uint64_t seed, unsigned workers = 1);

std::vector<double> payoffs(std::span<const Outcome> outcomes);

/// Runs fn(t) for t in [0, count) split into contiguous chunks over
/// `workers` threads.
template <class Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn);

}  // namespace prophet

#include "prophet_lab/detail/parallel_for.hpp"
