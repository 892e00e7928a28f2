#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace prophet {

/// Nonnegative discrete distribution with finite support.
///
/// Construction runs a fixed hygiene pass: atoms are sorted by value, values
/// closer than kMergeTolerance are merged, masses that are zero or would be
/// subnormal are dropped, and the result is renormalized. The instance is
/// immutable afterwards. Cumulative (P(X <= v_i)) and survival
/// (P(X > v_i)) tables are kept separately so that both tails stay accurate.
class FiniteDist {
 public:
  static constexpr double kMergeTolerance = 1e-12;
  /// Maximum |sum(probs) - 1| accepted on construction.
  static constexpr double kSumTolerance = 1e-9;

  FiniteDist(std::vector<double> support, std::vector<double> probs);

  static FiniteDist point_mass(double value);

  std::span<const double> support() const { return support_; }
  std::span<const double> probs() const { return probs_; }
  std::size_t size() const { return support_.size(); }

  double value(std::size_t i) const { return support_[i]; }
  double prob(std::size_t i) const { return probs_[i]; }
  /// P(X <= v_i).
  double cdf_at(std::size_t i) const { return cdf_[i]; }
  /// P(X > v_i).
  double tail_at(std::size_t i) const { return tail_[i]; }

  double min_value() const { return support_.front(); }
  double max_value() const { return support_.back(); }

  /// Number of support points <= x.
  std::size_t count_at_or_below(double x) const;

  /// L1 distance between the probabilities as given and as stored.
  double hygiene_adjustment() const { return adjustment_; }

  friend bool operator==(const FiniteDist& a, const FiniteDist& b) {
    return a.support_ == b.support_ && a.probs_ == b.probs_;
  }

 private:
  std::vector<double> support_;
  std::vector<double> probs_;
  std::vector<double> cdf_;
  std::vector<double> tail_;
  double adjustment_ = 0.0;
};

/// E[X], compensated.
double mean(const FiniteDist& d);

/// P(X <= x).
double cdf(const FiniteDist& d, double x);

/// P(X > x).
double survival(const FiniteDist& d, double x);

/// Smallest support value v with P(X > v) <= q, i.e. F^{-1}(1 - q) under the
/// strict-exceedance convention. q = 1 gives the smallest support value and
/// q = 0 the largest.
double quantile_upper(const FiniteDist& d, double q);

/// Distribution with CDF F^r for real r > 0. For integer r this is the law
/// of the maximum of r independent draws; for r = 1/k it is the unique law
/// whose k-fold maximum is d.
FiniteDist cdf_power(const FiniteDist& d, double exponent);

/// Law of max{X_1, ..., X_k} for i.i.d. X_i ~ d.
FiniteDist max_power(const FiniteDist& d, std::size_t k);

/// The unique D' with max_power(D', k) == d.
FiniteDist kth_root(const FiniteDist& d, std::size_t k);

/// Mean-preserving spread of the mass in [a, b] onto the endpoints a and b.
FiniteDist dilate(const FiniteDist& d, double a, double b);

/// With probability p a draw from d, otherwise 0.
FiniteDist zero_pad(const FiniteDist& d, double p);

/// Every support value multiplied by c > 0.
FiniteDist scale(const FiniteDist& d, double c);

/// Rescaled copy with mean 1. Throws ValidationError for the all-zero law.
FiniteDist normalize_mean(const FiniteDist& d);

}  // namespace prophet
