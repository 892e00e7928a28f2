#include "prophet_lab/finite_dist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "prophet_lab/errors.hpp"
#include "prophet_lab/summation.hpp"

namespace prophet {

namespace {

// Smallest mass kept after hygiene; anything below would be subnormal.
constexpr double kMinMass = std::numeric_limits<double>::min();

void require_finite_nonnegative(double x, const char* what, std::size_t i) {
  if (!std::isfinite(x) || x < 0.0) {
    std::ostringstream os;
    os << what << "[" << i << "] = " << x << " must be finite and nonnegative";
    throw ValidationError(os.str());
  }
}

}  // namespace

FiniteDist::FiniteDist(std::vector<double> support, std::vector<double> probs) {
  if (support.empty()) throw ValidationError("distribution must have at least one support point");
  if (support.size() != probs.size()) {
    throw ValidationError("support and probs must have equal length");
  }
  CompensatedSum total;
  for (std::size_t i = 0; i < support.size(); ++i) {
    require_finite_nonnegative(support[i], "support", i);
    require_finite_nonnegative(probs[i], "probs", i);
    total += probs[i];
  }
  if (std::abs(total.value() - 1.0) > kSumTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << "probabilities sum to " << total.value() << ", expected 1 +/- " << kSumTolerance;
    throw ValidationError(os.str());
  }

  std::vector<std::size_t> order(support.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return support[a] < support[b]; });

  // Merge near-coincident values, keeping the smallest value of each group.
  std::vector<double> values;
  std::vector<CompensatedSum> masses;
  for (std::size_t idx : order) {
    if (!values.empty() && support[idx] - values.back() < kMergeTolerance) {
      masses.back() += probs[idx];
    } else {
      values.push_back(support[idx]);
      masses.emplace_back();
      masses.back() += probs[idx];
    }
  }

  CompensatedSum kept_total;
  double dropped = 0.0;
  std::vector<double> raw;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double m = masses[i].value();
    if (m < kMinMass) {
      dropped += m;
      continue;
    }
    support_.push_back(values[i]);
    raw.push_back(m);
    kept_total += m;
  }
  if (support_.empty()) throw ValidationError("distribution has no positive mass");

  const double norm = kept_total.value();
  probs_.reserve(raw.size());
  adjustment_ = dropped;
  for (double m : raw) {
    probs_.push_back(m / norm);
    adjustment_ += std::abs(probs_.back() - m);
  }

  const std::size_t n = probs_.size();
  cdf_.resize(n);
  tail_.resize(n);
  CompensatedSum run;
  for (std::size_t i = 0; i < n; ++i) {
    run += probs_[i];
    cdf_[i] = std::min(run.value(), 1.0);
  }
  cdf_[n - 1] = 1.0;
  CompensatedSum back;
  for (std::size_t i = n; i-- > 0;) {
    tail_[i] = std::min(back.value(), 1.0);
    back += probs_[i];
  }
}

FiniteDist FiniteDist::point_mass(double value) { return FiniteDist({value}, {1.0}); }

std::size_t FiniteDist::count_at_or_below(double x) const {
  return static_cast<std::size_t>(std::upper_bound(support_.begin(), support_.end(), x) -
                                  support_.begin());
}

double mean(const FiniteDist& d) {
  CompensatedSum s;
  for (std::size_t i = 0; i < d.size(); ++i) s += d.value(i) * d.prob(i);
  return s.value();
}

double cdf(const FiniteDist& d, double x) {
  const std::size_t c = d.count_at_or_below(x);
  return c == 0 ? 0.0 : d.cdf_at(c - 1);
}

double survival(const FiniteDist& d, double x) {
  const std::size_t c = d.count_at_or_below(x);
  return c == 0 ? 1.0 : d.tail_at(c - 1);
}

double quantile_upper(const FiniteDist& d, double q) {
  if (!(q >= 0.0 && q <= 1.0)) throw ValidationError("quantile_upper requires 0 <= q <= 1");
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d.tail_at(i) <= q) return d.value(i);
  }
  return d.max_value();
}

FiniteDist cdf_power(const FiniteDist& d, double exponent) {
  if (!(exponent > 0.0) || !std::isfinite(exponent)) {
    throw ValidationError("cdf exponent must be positive and finite");
  }
  if (exponent == 1.0) return d;

  // Powers of the CDF are taken from whichever of F and 1 - F is smaller, so
  // that thin upper tails keep their relative precision.
  const std::size_t n = d.size();
  std::vector<double> lower(n), upper(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = d.cdf_at(i);
    const double t = d.tail_at(i);
    if (t == 0.0) {
      lower[i] = 1.0;
      upper[i] = 0.0;
    } else if (t <= 0.5) {
      const double log_s = std::log1p(-t);
      upper[i] = -std::expm1(exponent * log_s);
      lower[i] = std::exp(exponent * log_s);
    } else {
      lower[i] = std::pow(s, exponent);
      upper[i] = 1.0 - lower[i];
    }
  }
  std::vector<double> masses(n);
  double prev_lower = 0.0;
  double prev_upper = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    double m;
    if (lower[i] <= 0.5) {
      m = lower[i] - prev_lower;
    } else if (prev_lower >= 0.5) {
      m = prev_upper - upper[i];
    } else {
      m = (1.0 - upper[i]) - prev_lower;
    }
    masses[i] = std::max(m, 0.0);
    prev_lower = lower[i];
    prev_upper = upper[i];
  }
  return FiniteDist(std::vector<double>(d.support().begin(), d.support().end()),
                    std::move(masses));
}

FiniteDist max_power(const FiniteDist& d, std::size_t k) {
  if (k == 0) throw ValidationError("max_power requires k >= 1");
  if (k == 1) return d;
  return cdf_power(d, static_cast<double>(k));
}

FiniteDist kth_root(const FiniteDist& d, std::size_t k) {
  if (k == 0) throw ValidationError("kth_root requires k >= 1");
  if (k == 1) return d;
  return cdf_power(d, 1.0 / static_cast<double>(k));
}

FiniteDist dilate(const FiniteDist& d, double a, double b) {
  if (!(a >= 0.0 && a < b && std::isfinite(b))) {
    throw ValidationError("dilate requires 0 <= a < b < infinity");
  }
  std::vector<double> values;
  std::vector<double> masses;
  CompensatedSum to_a;
  CompensatedSum to_b;
  bool touched = false;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double y = d.value(i);
    const double p = d.prob(i);
    if (y >= a && y <= b) {
      touched = true;
      to_a += p * (b - y) / (b - a);
      to_b += p * (y - a) / (b - a);
    } else {
      values.push_back(y);
      masses.push_back(p);
    }
  }
  if (!touched) return d;
  values.push_back(a);
  masses.push_back(to_a.value());
  values.push_back(b);
  masses.push_back(to_b.value());
  return FiniteDist(std::move(values), std::move(masses));
}

FiniteDist zero_pad(const FiniteDist& d, double p) {
  if (!(p > 0.0 && p <= 1.0)) throw ValidationError("zero_pad requires 0 < p <= 1");
  if (p == 1.0) return d;
  std::vector<double> values(d.support().begin(), d.support().end());
  std::vector<double> masses;
  masses.reserve(d.size() + 1);
  for (double q : d.probs()) masses.push_back(p * q);
  values.push_back(0.0);
  masses.push_back(1.0 - p);
  return FiniteDist(std::move(values), std::move(masses));
}

FiniteDist scale(const FiniteDist& d, double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw ValidationError("scale factor must be positive and finite");
  std::vector<double> values;
  values.reserve(d.size());
  for (double v : d.support()) values.push_back(v * c);
  return FiniteDist(std::move(values), std::vector<double>(d.probs().begin(), d.probs().end()));
}

FiniteDist normalize_mean(const FiniteDist& d) {
  const double mu = mean(d);
  if (!(mu > 0.0)) throw ValidationError("cannot normalize a distribution with zero mean");
  return scale(d, 1.0 / mu);
}

}  // namespace prophet
