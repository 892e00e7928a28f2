#include "prophet_lab/engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "prophet_lab/errors.hpp"
#include "prophet_lab/summation.hpp"

namespace prophet {

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::standard:
      return "standard";
    case Mode::batched:
      return "batched";
    case Mode::windowed:
      return "windowed";
  }
  return "unknown";
}

GameSetting GameSetting::standard(std::size_t n) { return {Mode::standard, n, 1}; }
GameSetting GameSetting::batched(std::size_t n, std::size_t b) { return {Mode::batched, n, b}; }
GameSetting GameSetting::windowed(std::size_t n, std::size_t w) { return {Mode::windowed, n, w}; }

void GameSetting::validate() const {
  if (n == 0) throw ConfigError("game needs n >= 1");
  switch (mode) {
    case Mode::standard:
      if (param != 1) throw ConfigError("standard mode has no batch/window parameter");
      break;
    case Mode::batched:
      if (param == 0 || n % param != 0) {
        throw ConfigError("batch size " + std::to_string(param) + " must divide n = " + std::to_string(n));
      }
      break;
    case Mode::windowed:
      if (param == 0 || param > n) throw ConfigError("window size must satisfy 1 <= w <= n");
      break;
  }
}

const Sample& ViewState::best() const {
  const Sample* top = &visible.front();
  for (const Sample& s : visible) {
    if (s.value >= top->value) top = &s;
  }
  return *top;
}

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) {
  std::uint64_t z = root + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

SampleStream::SampleStream(const FiniteDist& d, std::uint64_t trajectory_seed)
    : dist_(&d), rng_(derive_seed(trajectory_seed, 0)) {}

double SampleStream::next() {
  const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  std::size_t lo = 0;
  std::size_t hi = dist_->size() - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (dist_->cdf_at(mid) > u) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return dist_->value(lo);
}

namespace {

// Applies a decision to the outcome; returns true when the game is over.
bool settle(const Decision& decision, const ViewState& view, Outcome& out) {
  switch (decision.kind) {
    case Decision::Kind::pass:
      return false;
    case Decision::Kind::forfeit:
      out.forfeited = true;
      out.payoff = 0.0;
      return true;
    case Decision::Kind::accept: {
      const auto it = std::lower_bound(
          view.visible.begin(), view.visible.end(), decision.index,
          [](const Sample& s, std::size_t idx) { return s.index < idx; });
      if (it == view.visible.end() || it->index != decision.index) {
        throw std::logic_error("policy accepted index " + std::to_string(decision.index) +
                               " which is not visible at step " + std::to_string(view.consumed));
      }
      out.payoff = it->value;
      out.index = it->index;
      return true;
    }
  }
  return false;
}

template <class Source>
Outcome run_game(const GameSetting& setting, const Policy& policy, Source&& next,
                 std::uint64_t trajectory_seed) {
  setting.validate();
  policy.check(setting);
  auto run = policy.start(trajectory_seed);
  const std::size_t n = setting.n;
  Outcome out;
  std::vector<Sample> buf;

  if (setting.mode == Mode::batched) {
    const std::size_t b = setting.param;
    buf.resize(b);
    for (std::size_t consumed = 0; consumed < n;) {
      for (std::size_t j = 0; j < b; ++j) buf[j] = Sample{consumed + j + 1, next()};
      consumed += b;
      const ViewState view{buf, consumed, n};
      if (settle(run->decide(view), view, out)) {
        out.steps = consumed;
        return out;
      }
    }
  } else {
    const std::size_t cap = setting.mode == Mode::standard ? 1 : setting.param;
    buf.reserve(2 * cap + 1);
    std::size_t start = 0;
    for (std::size_t consumed = 1; consumed <= n; ++consumed) {
      buf.push_back(Sample{consumed, next()});
      if (buf.size() - start > cap) ++start;
      if (start >= cap) {
        buf.erase(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(start));
        start = 0;
      }
      const ViewState view{std::span<const Sample>(buf).subspan(start), consumed, n};
      if (settle(run->decide(view), view, out)) {
        out.steps = consumed;
        return out;
      }
    }
  }
  out.steps = n;
  return out;
}

}  // namespace

Outcome play(const GameSetting& setting, const Policy& policy, const FiniteDist& d,
             std::uint64_t trajectory_seed) {
  SampleStream stream(d, trajectory_seed);
  return run_game(setting, policy, [&] { return stream.next(); }, trajectory_seed);
}

Outcome play_sequence(const GameSetting& setting, const Policy& policy,
                      std::span<const double> samples, std::uint64_t trajectory_seed) {
  if (samples.size() != setting.n) throw ValidationError("sequence length must equal n");
  std::size_t pos = 0;
  return run_game(setting, policy, [&] { return samples[pos++]; }, trajectory_seed);
}

std::vector<double> draw_sequence(const FiniteDist& d, std::size_t n, std::uint64_t trajectory_seed) {
  SampleStream stream(d, trajectory_seed);
  std::vector<double> xs(n);
  for (double& x : xs) x = stream.next();
  return xs;
}

McEstimate summarize(std::span<const double> values, std::uint64_t seed) {
  if (values.empty()) throw ValidationError("cannot summarize an empty sample");
  const std::size_t n = values.size();
  // Shifting by the first value makes a constant sample give exactly zero
  // variance.
  const double shift = values.front();
  std::vector<double> dev(n);
  std::vector<double> sq(n);
  for (std::size_t i = 0; i < n; ++i) {
    dev[i] = values[i] - shift;
    sq[i] = dev[i] * dev[i];
  }
  const double sum_dev = pairwise_sum(dev);
  const double sum_sq = pairwise_sum(sq);
  const double nd = static_cast<double>(n);
  McEstimate est;
  est.mean = shift + sum_dev / nd;
  est.trials = n;
  est.seed = seed;
  if (n > 1) {
    const double var = std::max(0.0, (sum_sq - sum_dev * sum_dev / nd) / (nd - 1.0));
    est.std_error = std::sqrt(var / nd);
  }
  return est;
}

std::vector<Outcome> simulate(const GameSetting& setting, const Policy& policy, const FiniteDist& d,
                              std::size_t trials, std::uint64_t seed, unsigned workers) {
  setting.validate();
  policy.check(setting);
  std::vector<Outcome> outcomes(trials);
  parallel_for(trials, workers,
               [&](std::size_t t) { outcomes[t] = play(setting, policy, d, derive_seed(seed, t)); });
  return outcomes;
}

McEstimate monte_carlo(const GameSetting& setting, const Policy& policy, const FiniteDist& d,
                       std::size_t trials, std::uint64_t seed, unsigned workers) {
  if (trials < 2) throw ValidationError("monte_carlo needs at least 2 trials");
  const auto outcomes = simulate(setting, policy, d, trials, seed, workers);
  return summarize(payoffs(outcomes), seed);
}

std::vector<double> payoffs(std::span<const Outcome> outcomes) {
  std::vector<double> xs;
  xs.reserve(outcomes.size());
  for (const auto& o : outcomes) xs.push_back(o.payoff);
  return xs;
}

}  // namespace prophet
