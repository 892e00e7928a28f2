#include "prophet_lab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "prophet_lab/errors.hpp"
#include "prophet_lab/stopping_dp.hpp"
#include "prophet_lab/summation.hpp"

namespace prophet {

namespace {

// E|X1 - X2| * P(X > u)^2 restricted to both draws above u, i.e.
// sum_{a,b > u} p_a p_b |a - b|.
double pair_spread_above(const FiniteDist& d, double u) {
  CompensatedSum below_mass;
  CompensatedSum below_moment;
  CompensatedSum total;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double v = d.value(i);
    if (!(v > u)) continue;
    const double p = d.prob(i);
    // every earlier atom a < v contributes 2 p_a p (v - a)
    total += 2.0 * p * (v * below_mass.value() - below_moment.value());
    below_mass += p;
    below_moment += p * v;
  }
  return total.value();
}

}  // namespace

double delta_gap(const FiniteDist& d_batchmax, std::size_t k) {
  if (k < 2) throw ValidationError("delta_gap needs k >= 2");
  const std::vector<double> q = acceptance_probs(d_batchmax, k);
  CompensatedSum gap;
  double reach = 1.0;  // prod_{j<i} (1 - q_j)
  for (std::size_t i = 0; i + 1 < k; ++i) {
    const double qi = q[i];
    const double u = quantile_upper(d_batchmax, qi);
    const double mass = survival(d_batchmax, u);
    if (qi > 0.0 && mass > 0.0) {
      const double cond = pair_spread_above(d_batchmax, u) / (mass * mass);
      gap += 0.25 * qi * qi * cond * reach;
    }
    reach *= 1.0 - qi;
  }
  return std::max(0.0, gap.value());
}

double clean_upper_bound(std::size_t k, std::size_t l, double alpha_l) {
  if (l < 2) throw ValidationError("clean_upper_bound needs l >= 2");
  if (l > k) throw ValidationError("clean_upper_bound needs l <= k");
  const double lm1 = static_cast<double>(l - 1);
  const double expo = static_cast<double>(l) / static_cast<double>(k);
  return alpha_l + lm1 / (lm1 - 0.35) * (1.0 - std::pow(0.35 / lm1, expo));
}

double clean_upper_bound(std::size_t k, double alpha_sqrt_k) {
  const auto l = std::max<std::size_t>(2, static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(k)))));
  return clean_upper_bound(k, l, alpha_sqrt_k);
}

FiniteDist window_max_law(const FiniteDist& hard, std::size_t l, std::size_t k) {
  if (l == 0 || k < l) throw ValidationError("window_max_law needs 1 <= l <= k");
  return cdf_power(hard, static_cast<double>(l) / static_cast<double>(k));
}

double tight_upper_bound(const FiniteDist& d_prime, std::size_t l, std::size_t k, double alpha_l, double delta) {
  if (l < 2 || l > k) throw ValidationError("tight_upper_bound needs 2 <= l <= k");
  if (!(delta >= 0.0)) throw ValidationError("delta must be nonnegative");
  if (alpha_l * delta >= 1.0) throw ValidationError("alpha_l * delta must be below 1");

  const FiniteDist batch_max = cdf_power(d_prime, static_cast<double>(k) / static_cast<double>(l));
  const StoppingTable table = build_table(batch_max, l);
  const double e_l = table.prophet(l);
  if (!(e_l > 0.0)) throw std::domain_error("prophet value zero");

  const double km1 = static_cast<double>(k - 1);
  std::vector<double> sigma(l + 1, 0.0);
  std::vector<double> theta(l + 1, 0.0);
  for (std::size_t j = 1; j <= l; ++j) {
    theta[j] = j >= 3 ? table.gambler(j - 2) : 0.0;
    sigma[j] = cdf(d_prime, theta[j]);
  }

  CompensatedSum total;
  double tail_prod = 1.0;  // prod_{f=j+1}^{l} sigma_f
  for (std::size_t j = l; j >= 1; --j) {
    CompensatedSum inner;
    double prev = 0.0;
    for (std::size_t i = 0; i < d_prime.size(); ++i) {
      const double s = d_prime.cdf_at(i);
      if (d_prime.value(i) > theta[j]) {
        const double hit = std::pow(s, km1) * (s - sigma[j]);
        const double below = std::pow(prev, km1) * std::max(0.0, prev - sigma[j]);
        inner += d_prime.value(i) * (hit - below);
      }
      prev = s;
    }
    total += inner.value() * tail_prod;
    tail_prod *= sigma[j];
  }

  return alpha_l + delta * alpha_l * alpha_l / (1.0 - delta * alpha_l) + total.value() / e_l;
}

std::vector<BoundReport> bound_sweep(const std::vector<std::size_t>& k_list, const AlphaTable& table,
                                     double delta) {
  std::vector<BoundReport> rows;
  for (const std::size_t k : k_list) {
    const AlphaEntry* own = table.find(k);
    if (own == nullptr) throw ConfigError("no alpha estimate for k = " + std::to_string(k));

    BoundReport row;
    row.k = k;
    row.alpha_k = own->alpha;
    row.alpha_k_source = own->provenance;
    if (own->witness && k >= 2) row.delta_gap = delta_gap(*own->witness, k);
    row.upper = std::numeric_limits<double>::infinity();

    for (const AlphaEntry& e : table.entries()) {
      if (e.k < 2 || e.k >= k) continue;
      const double clean = clean_upper_bound(k, e.k, e.alpha);
      std::optional<double> tight;
      if (e.witness) tight = tight_upper_bound(window_max_law(*e.witness, e.k, k), e.k, k, e.alpha, delta);
      const double upper = tight ? std::min(clean, *tight) : clean;
      if (upper < row.upper) {
        row.l = e.k;
        row.alpha_l = e.alpha;
        row.alpha_l_source = e.provenance;
        row.clean_bound = clean;
        row.tight_bound = tight;
        row.upper = upper;
      }
    }
    if (row.l == 0) throw ConfigError("no alpha estimate with 2 <= l < " + std::to_string(k));
    row.vacuous = row.upper > 1.0;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace prophet
