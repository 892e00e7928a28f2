#include "prophet_lab/policies.hpp"

#include <cmath>
#include <random>
#include <utility>

#include "prophet_lab/errors.hpp"

namespace prophet {

BatchRule::BatchRule(const StoppingTable& batch_max_table) : thresholds_(batch_max_table.thresholds) {}

void BatchRule::override_threshold(std::size_t batch, double value) {
  if (batch == 0 || batch > thresholds_.size()) throw ConfigError("batch index out of range");
  thresholds_[batch - 1] = value;
}

namespace {

// ---------------------------------------------------------------- threshold

class ThresholdPolicy final : public Policy {
 public:
  explicit ThresholdPolicy(StoppingTable table) : table_(std::move(table)) {}

  std::unique_ptr<PolicyRun> start(std::uint64_t) const override { return std::make_unique<Run>(this); }

  void check(const GameSetting& s) const override {
    if (s.mode == Mode::batched && s.param != 1) {
      throw ConfigError("threshold policy needs batch size 1 in batched mode");
    }
    if (s.n != table_.horizon) throw ConfigError("threshold policy horizon does not match n");
  }

  std::string name() const override { return "threshold"; }

 private:
  struct Run final : PolicyRun {
    explicit Run(const ThresholdPolicy* p) : policy(p) {}
    Decision decide(const ViewState& view) override {
      const Sample& s = view.newest();
      if (s.value > policy->table_.threshold(view.consumed)) return Decision::accept(s.index);
      return Decision::pass();
    }
    const ThresholdPolicy* policy;
  };

  StoppingTable table_;
};

// -------------------------------------------------------------------- batch

class BatchPolicy final : public Policy {
 public:
  BatchPolicy(BatchRule rule, std::size_t b) : rule_(std::move(rule)), b_(b) {
    if (b_ == 0) throw ConfigError("batch size must be positive");
  }

  std::unique_ptr<PolicyRun> start(std::uint64_t) const override { return std::make_unique<Run>(this); }

  void check(const GameSetting& s) const override {
    if (s.n != rule_.batches() * b_) throw ConfigError("batch policy horizon does not match n");
    if (s.mode == Mode::batched) {
      if (s.param != b_) throw ConfigError("batch policy built for a different batch size");
    } else if (b_ != 1) {
      throw ConfigError("batch policy with b > 1 needs batched mode");
    }
  }

  std::string name() const override { return "batch"; }

 private:
  struct Run final : PolicyRun {
    explicit Run(const BatchPolicy* p) : policy(p) {}
    Decision decide(const ViewState& view) override {
      const Sample& top = policy->b_ == 1 ? view.newest() : view.best();
      if (policy->rule_.accepts(view.consumed / policy->b_, top.value)) return Decision::accept(top.index);
      return Decision::pass();
    }
    const BatchPolicy* policy;
  };

  BatchRule rule_;
  std::size_t b_;
};

// ----------------------------------------------------------- window algo A

class WindowAlgoA final : public Policy {
 public:
  WindowAlgoA(BatchRule rule, std::size_t n, std::size_t w, std::string name)
      : rule_(std::move(rule)), n_(n), w_(w), name_(std::move(name)) {}

  std::unique_ptr<PolicyRun> start(std::uint64_t) const override { return std::make_unique<Run>(this); }

  void check(const GameSetting& s) const override {
    if (s.mode != Mode::windowed || s.param != w_ || s.n != n_) {
      throw ConfigError(name_ + " needs windowed mode with w = " + std::to_string(w_) +
                        " and n = " + std::to_string(n_));
    }
  }

  std::string name() const override { return name_; }

 private:
  struct Run final : PolicyRun {
    explicit Run(const WindowAlgoA* p) : policy(p) {}
    Decision decide(const ViewState& view) override {
      const std::size_t w = policy->w_;
      if (!star) {
        // At a batch boundary the visible window is exactly the aligned batch.
        if (view.consumed % w != 0) return Decision::pass();
        const Sample& top = view.best();
        if (!policy->rule_.accepts(view.consumed / w, top.value)) return Decision::pass();
        star = top.index;
      }
      if (view.consumed >= *star + w - 1 || view.consumed == view.n) {
        return Decision::accept(view.best().index);
      }
      return Decision::pass();
    }
    const WindowAlgoA* policy;
    std::optional<std::size_t> star;
  };

  BatchRule rule_;
  std::size_t n_;
  std::size_t w_;
  std::string name_;
};

// ---------------------------------------------------------- offset wrapper

class UniformOffsetWrapper final : public Policy {
 public:
  UniformOffsetWrapper(PolicyPtr inner, std::size_t n, std::size_t b, std::uint64_t salt)
      : inner_(std::move(inner)), n_(n), b_(b), m_(offset_slice_length(n, b)), salt_(salt) {}

  std::unique_ptr<PolicyRun> start(std::uint64_t seed) const override {
    std::mt19937_64 rng(derive_seed(seed, salt_));
    std::uniform_int_distribution<std::size_t> offset(1, b_);
    return std::make_unique<Run>(this, inner_->start(seed), offset(rng));
  }

  void check(const GameSetting& s) const override {
    if (s.mode == Mode::batched) throw ConfigError("offset wrapper plays standard or windowed mode");
    if (s.n != n_) throw ConfigError("offset wrapper horizon does not match n");
    const std::size_t w = s.mode == Mode::windowed ? std::min(s.param, m_) : 1;
    inner_->check(s.mode == Mode::windowed ? GameSetting::windowed(m_, w) : GameSetting::standard(m_));
  }

  std::string name() const override { return "offset(" + inner_->name() + ")"; }

 private:
  struct Run final : PolicyRun {
    Run(const UniformOffsetWrapper* p, std::unique_ptr<PolicyRun> in, std::size_t s)
        : policy(p), inner(std::move(in)), offset(s) {}

    Decision decide(const ViewState& view) override {
      const std::size_t m = policy->m_;
      if (view.consumed <= offset || view.consumed > offset + m) return Decision::pass();
      slice.clear();
      for (const Sample& s : view.visible) {
        if (s.index > offset) slice.push_back(Sample{s.index - offset, s.value});
      }
      const Decision d = inner->decide(ViewState{slice, view.consumed - offset, m});
      if (d.kind == Decision::Kind::accept) return Decision::accept(d.index + offset);
      return d;
    }

    const UniformOffsetWrapper* policy;
    std::unique_ptr<PolicyRun> inner;
    std::size_t offset;
    std::vector<Sample> slice;
  };

  PolicyPtr inner_;
  std::size_t n_;
  std::size_t b_;
  std::size_t m_;
  std::uint64_t salt_;
};

// ------------------------------------------------------- batch from window

class BatchFromWindow final : public Policy {
 public:
  BatchFromWindow(PolicyPtr window_policy, std::size_t n, std::size_t b, std::size_t k)
      : inner_(std::move(window_policy)), n_(n), b_(b), k_(k) {
    if (k_ == 0 || k_ > b_) throw ConfigError("batch_from_window needs 1 <= k <= b");
  }

  std::unique_ptr<PolicyRun> start(std::uint64_t seed) const override {
    return std::make_unique<Run>(this, inner_->start(seed));
  }

  void check(const GameSetting& s) const override {
    if (s.mode != Mode::batched || s.param != b_ || s.n != n_) {
      throw ConfigError("batch_from_window needs batched mode with b = " + std::to_string(b_));
    }
    inner_->check(GameSetting::windowed(n_, k_));
  }

  std::string name() const override { return "batch_from_window(" + inner_->name() + ")"; }

 private:
  struct Run final : PolicyRun {
    Run(const BatchFromWindow* p, std::unique_ptr<PolicyRun> in) : policy(p), inner(std::move(in)) {}

    Decision decide(const ViewState& view) override {
      const std::size_t k = policy->k_;
      const std::size_t batch_start = view.visible.front().index;
      for (const Sample& s : view.visible) {
        window.push_back(s);
        if (window.size() > k) window.erase(window.begin());
        const Decision d = inner->decide(ViewState{window, s.index, policy->n_});
        if (d.kind == Decision::Kind::forfeit) return d;
        if (d.kind == Decision::Kind::accept) {
          return d.index >= batch_start ? d : Decision::forfeit();
        }
      }
      return Decision::pass();
    }

    const BatchFromWindow* policy;
    std::unique_ptr<PolicyRun> inner;
    std::vector<Sample> window;
  };

  PolicyPtr inner_;
  std::size_t n_;
  std::size_t b_;
  std::size_t k_;
};

// ------------------------------------------------------- final window max

class FinalWindowMax final : public Policy {
 public:
  std::unique_ptr<PolicyRun> start(std::uint64_t) const override { return std::make_unique<Run>(); }
  void check(const GameSetting&) const override {}
  std::string name() const override { return "final_window_max"; }

 private:
  struct Run final : PolicyRun {
    Decision decide(const ViewState& view) override {
      if (view.consumed == view.n) return Decision::accept(view.best().index);
      return Decision::pass();
    }
  };
};

std::size_t checked_window(std::size_t n, std::size_t k) {
  if (k == 0 || n % k != 0) {
    throw ConfigError("window algorithm needs k | n (n = " + std::to_string(n) + ", k = " + std::to_string(k) + ")");
  }
  return n / k;
}

}  // namespace

PolicyPtr threshold_policy(StoppingTable table) { return std::make_shared<ThresholdPolicy>(std::move(table)); }

PolicyPtr batch_policy(BatchRule rule, std::size_t b) { return std::make_shared<BatchPolicy>(std::move(rule), b); }

PolicyPtr batch_policy(const FiniteDist& d, std::size_t n, std::size_t b) {
  if (b == 0 || n % b != 0) throw ConfigError("batch size must divide n");
  return batch_policy(BatchRule(build_table(max_power(d, b), n / b)), b);
}

BatchRule window_batch_rule(const FiniteDist& d, std::size_t n, std::size_t k, std::optional<double> eps3) {
  const std::size_t w = checked_window(n, k);
  const FiniteDist batch_max = max_power(d, w);
  BatchRule rule(build_table(batch_max, k));
  if (eps3) {
    if (!(*eps3 > 0.0 && *eps3 < 1.0)) throw ValidationError("eps3 must lie in (0, 1)");
    if (std::abs(mean(batch_max) - 1.0) > 1e-9) {
      throw ValidationError("window_algo_a_prime needs the batch-maximum law scaled to mean 1");
    }
    if (k >= 2) rule.override_threshold(k - 1, 1.0 - *eps3);
  }
  return rule;
}

PolicyPtr window_algo_a(const FiniteDist& d, std::size_t n, std::size_t k) {
  return std::make_shared<WindowAlgoA>(window_batch_rule(d, n, k), n, checked_window(n, k), "window_algo_a");
}

PolicyPtr window_algo_a_prime(const FiniteDist& d, std::size_t n, std::size_t k, double eps3) {
  return std::make_shared<WindowAlgoA>(window_batch_rule(d, n, k, eps3), n, checked_window(n, k),
                                       "window_algo_a_prime");
}

std::size_t offset_slice_length(std::size_t n, std::size_t b) {
  if (b == 0 || b > n || n - n % b <= b) throw ValidationError("input too short for offset wrapper");
  return n - n % b - b;
}

PolicyPtr uniform_offset_wrapper(PolicyPtr inner, std::size_t n, std::size_t b, std::uint64_t salt) {
  return std::make_shared<UniformOffsetWrapper>(std::move(inner), n, b, salt);
}

PolicyPtr batch_from_window(PolicyPtr window_policy, std::size_t n, std::size_t b, std::size_t k) {
  return std::make_shared<BatchFromWindow>(std::move(window_policy), n, b, k);
}

PolicyPtr final_window_max_policy() { return std::make_shared<FinalWindowMax>(); }

}  // namespace prophet
