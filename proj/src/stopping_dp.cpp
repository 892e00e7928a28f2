#include "prophet_lab/stopping_dp.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "prophet_lab/errors.hpp"
#include "prophet_lab/summation.hpp"

namespace prophet {

namespace {

// upper[i] = sum_{j >= i} v_j p_j, upper[size] = 0.
std::vector<double> upper_partial_means(const FiniteDist& d) {
  std::vector<double> upper(d.size() + 1, 0.0);
  CompensatedSum s;
  for (std::size_t i = d.size(); i-- > 0;) {
    s += d.value(i) * d.prob(i);
    upper[i] = s.value();
  }
  return upper;
}

double max_with(const FiniteDist& d, const std::vector<double>& upper, std::size_t below, double t) {
  const double p_below = below == 0 ? 0.0 : d.cdf_at(below - 1);
  return t * p_below + upper[below];
}

}  // namespace

double expected_max_with(const FiniteDist& d, double t) {
  return max_with(d, upper_partial_means(d), d.count_at_or_below(t), t);
}

double prophet_value(const FiniteDist& d, std::size_t k) {
  if (k == 0) throw ValidationError("prophet value needs k >= 1");
  return mean(max_power(d, k));
}

namespace {

std::vector<double> gambler_sequence(const FiniteDist& d, std::size_t n) {
  std::vector<double> values;
  values.reserve(n);
  const auto upper = upper_partial_means(d);
  double v = mean(d);
  values.push_back(v);
  std::size_t below = d.count_at_or_below(v);
  for (std::size_t k = 2; k <= n; ++k) {
    // V is nondecreasing, so the split point only moves right.
    while (below < d.size() && d.value(below) <= v) ++below;
    v = max_with(d, upper, below, v);
    values.push_back(v);
  }
  return values;
}

}  // namespace

StoppingTable build_table(const FiniteDist& d, std::size_t n) {
  if (n == 0) throw ValidationError("horizon must be at least 1");
  StoppingTable table{d, n, gambler_sequence(d, n), {}, {}};
  table.prophet_values.reserve(n);
  for (std::size_t k = 1; k <= n; ++k) table.prophet_values.push_back(prophet_value(d, k));
  table.thresholds.resize(n);
  for (std::size_t i = 1; i <= n; ++i) table.thresholds[i - 1] = table.gambler(n - i);
  return table;
}

double competitive_ratio(const FiniteDist& d, std::size_t n) {
  if (n == 0) throw ValidationError("horizon must be at least 1");
  const double e = prophet_value(d, n);
  if (!(e > 0.0)) throw std::domain_error("prophet value zero");
  // V_n <= E_n holds exactly; the two are summed differently, so clip the
  // last-ulp excess when they coincide.
  return std::min(1.0, gambler_sequence(d, n).back() / e);
}

double batch_value(const FiniteDist& d_prime, std::size_t n, std::size_t b) {
  if (b == 0 || n == 0 || n % b != 0) {
    throw ValidationError("batch size " + std::to_string(b) + " must divide n = " + std::to_string(n));
  }
  return build_table(max_power(d_prime, b), n / b).gambler(n / b);
}

std::vector<double> acceptance_probs(const FiniteDist& d, std::size_t horizon) {
  const auto table = build_table(d, horizon);
  std::vector<double> q;
  q.reserve(horizon);
  for (std::size_t i = 1; i <= horizon; ++i) q.push_back(survival(d, table.threshold(i)));
  return q;
}

}  // namespace prophet
