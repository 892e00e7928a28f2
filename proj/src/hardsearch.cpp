#include "prophet_lab/hardsearch.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>

#include "prophet_lab/dist_io.hpp"
#include "prophet_lab/engine.hpp"
#include "prophet_lab/errors.hpp"
#include "prophet_lab/stopping_dp.hpp"

namespace prophet {

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::search:
      return "search";
    case Provenance::imported:
      return "imported";
    case Provenance::paper_constant:
      return "paper-constant";
  }
  return "unknown";
}

void AlphaTable::insert(AlphaEntry entry) {
  if (entry.k == 0) throw ValidationError("alpha entry needs k >= 1");
  if (!(entry.alpha >= 0.744 && entry.alpha <= 1.0)) {
    throw ValidationError("alpha estimate " + std::to_string(entry.alpha) + " for k = " + std::to_string(entry.k) +
                          " is outside [0.744, 1]");
  }
  if (entry.witness) {
    const double r = competitive_ratio(*entry.witness, entry.k);
    if (std::abs(r - entry.alpha) > 1e-9) {
      throw ValidationError("witness for k = " + std::to_string(entry.k) + " has ratio " + std::to_string(r) +
                            ", not " + std::to_string(entry.alpha));
    }
  }
  const auto it = std::lower_bound(entries_.begin(), entries_.end(), entry.k,
                                   [](const AlphaEntry& e, std::size_t k) { return e.k < k; });
  if (it != entries_.end() && it->k == entry.k) {
    *it = std::move(entry);
  } else {
    entries_.insert(it, std::move(entry));
  }
}

const AlphaEntry* AlphaTable::find(std::size_t k) const {
  const auto it = std::lower_bound(entries_.begin(), entries_.end(), k,
                                   [](const AlphaEntry& e, std::size_t kk) { return e.k < kk; });
  return it != entries_.end() && it->k == k ? &*it : nullptr;
}

double fast_ratio(std::span<const double> values, std::span<const double> probs, std::size_t k) {
  constexpr double kBad = 2.0;
  const std::size_t m = values.size();
  if (m == 0 || probs.size() != m || k == 0) return kBad;
  for (std::size_t i = 0; i < m; ++i) {
    if (!std::isfinite(values[i]) || !std::isfinite(probs[i]) || values[i] < 0.0 || probs[i] < 0.0) return kBad;
    if (i > 0 && values[i] < values[i - 1]) return kBad;
  }
  if (values.back() > 1e12) return kBad;

  // Tail masses rather than CDF values keep 1 - P(X <= v) accurate when
  // almost all mass sits at the bottom.
  std::vector<double> tail(m + 1, 0.0);   // tail[i] = sum_{j >= i} p_j
  std::vector<double> upper(m + 1, 0.0);  // upper[i] = sum_{j >= i} v_j p_j
  for (std::size_t i = m; i-- > 0;) {
    tail[i] = tail[i + 1] + probs[i];
    upper[i] = upper[i + 1] + values[i] * probs[i];
  }
  if (!(std::abs(tail[0] - 1.0) < 1e-9)) return kBad;

  // E_k = sum_i (v_i - v_{i-1}) (1 - P(X < v_i)^k)
  const double kd = static_cast<double>(k);
  double prophet = 0.0;
  double below = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double t = std::min(tail[i], 1.0);
    prophet += (values[i] - below) * -std::expm1(kd * std::log1p(-t));
    below = values[i];
  }
  if (!(prophet > 0.0) || !std::isfinite(prophet)) return kBad;

  // V_{j+r} = F + (V_j - F) a^r while V stays below the next atom, where
  // a = P(X <= V) and F = E[X | X > V] is the fixed point.
  double v = upper[0];
  std::size_t j = 1;
  while (j < k) {
    const auto idx = static_cast<std::size_t>(std::upper_bound(values.begin(), values.end(), v) - values.begin());
    if (idx >= m || !(tail[idx] > 0.0)) break;
    const double above = std::min(tail[idx], 1.0);
    const double log_a = std::log1p(-above);
    const double fixed = upper[idx] / above;
    const double next_atom = values[idx];
    const std::size_t rem = k - j;
    std::size_t r = 1;
    if (idx > 0) {
      if (fixed <= next_atom) {
        r = rem;
      } else {
        const double steps = std::log1p((v - next_atom) / (fixed - v)) / log_a;
        r = steps > static_cast<double>(rem) ? rem
                                              : std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(steps - 1e-12)));
      }
    }
    r = std::min(r, rem);
    const double x = static_cast<double>(r) * log_a;
    v = v * std::exp(x) - fixed * std::expm1(x);
    j += r;
  }
  const double ratio = v / prophet;
  return std::isfinite(ratio) ? ratio : kBad;
}

namespace {

// Parameter layout for m atoms. The ratio is scale invariant, so the
// smallest nonzero atom is pinned at 1.
//   m >= 3: atom 0 pinned at value 0 with logit 0, atom 1 at value 1.
//     x[0..m-3]       log of the log-gaps between consecutive nonzero atoms
//     x[m-2..2m-4]    logits of atoms 1..m-1
//   m == 2: atom 0 at 1; x[0] log log-gap, x[1] logit of atom 1.
struct Layout {
  std::size_t m;
  bool zero_atom() const { return m >= 3; }
  std::size_t gaps() const { return zero_atom() ? m - 2 : m - 1; }
  std::size_t dims() const { return gaps() + (m - 1); }

  void decode(const double* x, std::vector<double>& values, std::vector<double>& probs) const {
    values.assign(m, 0.0);
    probs.assign(m, 0.0);
    const std::size_t off = zero_atom() ? 1 : 0;
    double lv = 0.0;
    values[off] = 1.0;
    for (std::size_t i = 0; i < gaps(); ++i) {
      lv += std::exp(x[i]);
      values[off + i + 1] = std::exp(lv);
    }
    const double* logit = x + gaps();
    double top = 0.0;
    for (std::size_t i = 0; i + 1 < m; ++i) top = std::max(top, logit[i]);
    double total = std::exp(-top);
    probs[0] = total;
    for (std::size_t i = 1; i < m; ++i) {
      probs[i] = std::exp(logit[i - 1] - top);
      total += probs[i];
    }
    for (double& p : probs) p /= total;
  }

  // values need not be normalized; they are rescaled so atom `off` is 1.
  std::vector<double> encode(const std::vector<double>& values, const std::vector<double>& probs) const {
    std::vector<double> x(dims());
    const std::size_t off = zero_atom() ? 1 : 0;
    double lv = std::log(values[off]);
    for (std::size_t i = 0; i < gaps(); ++i) {
      const double next = std::log(values[off + i + 1]);
      x[i] = std::log(std::max(next - lv, 1e-9));
      lv = next;
    }
    const double base = std::log(probs[0]);
    for (std::size_t i = 1; i < m; ++i) x[gaps() + i - 1] = std::log(probs[i]) - base;
    return x;
  }
};

struct Objective {
  Layout layout;
  std::size_t k;
  std::vector<double> values;
  std::vector<double> probs;
  std::size_t evals = 0;

  double operator()(const double* x) {
    ++evals;
    layout.decode(x, values, probs);
    return fast_ratio(values, probs, k);
  }
};

double gsl_objective(const gsl_vector* v, void* params) {
  auto* obj = static_cast<Objective*>(params);
  return (*obj)(v->data);
}

// One Nelder-Mead run from x (updated in place); returns the best value.
double nelder_mead(Objective& obj, std::vector<double>& x, std::size_t max_evals, double step) {
  const std::size_t dims = x.size();
  gsl_multimin_function fn{&gsl_objective, dims, &obj};
  gsl_vector* start = gsl_vector_alloc(dims);
  gsl_vector* steps = gsl_vector_alloc(dims);
  for (std::size_t i = 0; i < dims; ++i) gsl_vector_set(start, i, x[i]);
  gsl_vector_set_all(steps, step);
  gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, dims);
  gsl_multimin_fminimizer_set(s, &fn, start, steps);

  const std::size_t budget_end = obj.evals + max_evals;
  while (obj.evals < budget_end) {
    if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS) break;
    if (gsl_multimin_fminimizer_size(s) < 1e-11) break;
  }
  const double best = gsl_multimin_fminimizer_minimum(s);
  for (std::size_t i = 0; i < dims; ++i) x[i] = gsl_vector_get(s->x, i);
  gsl_multimin_fminimizer_free(s);
  gsl_vector_free(steps);
  gsl_vector_free(start);
  return best;
}

std::vector<double> random_start(const Layout& layout, std::size_t k, std::mt19937_64& rng, bool spread_evenly) {
  // log-values of the atoms above the pinned one, spread over (0, log k + 3)
  const std::size_t g = layout.gaps();
  const double hi = std::log(static_cast<double>(k)) + 3.0;
  std::vector<double> lv(g);
  std::uniform_real_distribution<double> uni(0.0, hi);
  for (std::size_t i = 0; i < g; ++i) {
    lv[i] = spread_evenly ? hi * (static_cast<double>(i) + 1.0) / static_cast<double>(g + 1) : uni(rng);
  }
  std::sort(lv.begin(), lv.end());
  std::vector<double> x(layout.dims());
  double prev = 0.0;
  for (std::size_t i = 0; i < g; ++i) {
    x[i] = std::log(std::max(lv[i] - prev, 1e-3));
    prev = lv[i];
  }
  std::normal_distribution<double> noise(0.0, 1.0);
  const double base = -std::log(static_cast<double>(k));
  for (std::size_t i = 0; i + 1 < layout.m; ++i) x[g + i] = base + (spread_evenly ? 0.0 : noise(rng));
  return x;
}

// Grows a law to m atoms by inserting geometric midpoints (and v_1 / 2 below
// the first nonzero atom); new atoms take a small share of a neighbour's mass.
void refine(std::vector<double>& values, std::vector<double>& probs, std::size_t m) {
  if (values.front() != 0.0) {
    values.insert(values.begin(), 0.0);
    probs.insert(probs.begin(), 1e-6);
  }
  while (values.size() < m) {
    std::vector<double> nv{values[0]};
    std::vector<double> np{probs[0]};
    for (std::size_t i = 1; i < values.size(); ++i) {
      if (values.size() + (nv.size() - i) < m) {
        const double mid = i == 1 ? values[1] / 2.0 : std::sqrt(values[i - 1] * values[i]);
        const double share = 1e-3 * probs[i];
        nv.push_back(mid);
        np.push_back(share);
        probs[i] -= share;
      }
      nv.push_back(values[i]);
      np.push_back(probs[i]);
    }
    values = std::move(nv);
    probs = std::move(np);
  }
  double total = 0.0;
  for (double p : probs) total += p;
  for (double& p : probs) p /= total;
}

bool lex_less(std::span<const double> a, std::span<const double> b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

SearchResult search_hard(std::size_t k, std::size_t support_size, std::size_t restarts, std::size_t iters,
                         std::uint64_t seed, const std::optional<FiniteDist>& warm_start) {
  if (support_size < 2) throw ValidationError("search_hard needs support_size >= 2");
  if (k == 0) throw ValidationError("search_hard needs k >= 1");
  if (k == 1) return {FiniteDist::point_mass(1.0), 1.0};

  gsl_set_error_handler_off();
  const Layout layout{support_size};
  const std::size_t rounds = 4;
  const std::size_t max_evals = std::max<std::size_t>(iters, 1) * support_size;

  std::optional<SearchResult> best;
  for (std::size_t r = 0; r < std::max<std::size_t>(restarts, 1); ++r) {
    std::mt19937_64 rng(derive_seed(seed, r));
    std::vector<double> x;
    if (r == 0 && warm_start) {
      std::vector<double> values(warm_start->support().begin(), warm_start->support().end());
      std::vector<double> probs(warm_start->probs().begin(), warm_start->probs().end());
      if (layout.zero_atom()) refine(values, probs, support_size);
      if (values.size() == support_size) x = layout.encode(values, probs);
    }
    if (x.empty()) x = random_start(layout, k, rng, r == 0);

    Objective obj{layout, k, {}, {}, 0};
    double step = 0.5;
    for (std::size_t round = 0; round < rounds; ++round) {
      nelder_mead(obj, x, max_evals, step);
      step = 0.1;
    }
    std::vector<double> values;
    std::vector<double> probs;
    layout.decode(x.data(), values, probs);
    SearchResult cand{normalize_mean(FiniteDist(values, probs)), 0.0};
    cand.ratio = competitive_ratio(cand.dist, k);
    if (!best || cand.ratio < best->ratio ||
        (cand.ratio == best->ratio && lex_less(cand.dist.support(), best->dist.support()))) {
      best = std::move(cand);
    }
  }
  return *best;
}

AlphaEntry alpha_estimate(std::size_t k, const SearchBudget& budget) {
  if (k == 0) throw ValidationError("alpha_estimate needs k >= 1");
  if (k == 1) return AlphaEntry{1, 1.0, FiniteDist::point_mass(1.0), Provenance::search};

  std::size_t m = 3;
  SearchResult best = search_hard(k, m, budget.restarts, budget.iters, derive_seed(budget.seed, m));
  for (m = 2 * m - 1; m <= budget.max_support; m = 2 * m - 1) {
    SearchResult next = search_hard(k, m, budget.restarts, budget.iters, derive_seed(budget.seed, m), best.dist);
    const double gain = best.ratio - next.ratio;
    if (next.ratio < best.ratio) best = std::move(next);
    if (gain < 1e-4) break;
  }
  return AlphaEntry{k, best.ratio, std::move(best.dist), Provenance::search};
}

AlphaEntry import_hard(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open witness file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("witness file " + path.string() + " is not valid JSON: " + e.what());
  }
  if (!j.contains("k") || !j["k"].is_number_integer() || j["k"].get<long long>() < 1) {
    throw ValidationError("witness file " + path.string() + " needs a positive integer \"k\"");
  }
  if (!j.contains("ratio") || !j["ratio"].is_number()) {
    throw ValidationError("witness file " + path.string() + " needs a numeric \"ratio\"");
  }
  const auto k = j["k"].get<std::size_t>();
  const double claimed = j["ratio"].get<double>();
  FiniteDist d = dist_from_json(j);
  const double ratio = competitive_ratio(d, k);
  if (std::abs(ratio - claimed) > 1e-6) {
    throw ValidationError("witness file " + path.string() + " claims ratio " + std::to_string(claimed) +
                          " but its distribution gives " + std::to_string(ratio) + " at k = " + std::to_string(k));
  }
  if (ratio < 0.744) {
    throw ValidationError("witness ratio " + std::to_string(ratio) + " is below the universal lower bound");
  }
  return AlphaEntry{k, ratio, std::move(d), Provenance::imported};
}

void write_witness(const std::filesystem::path& path, const AlphaEntry& entry) {
  if (!entry.witness) throw ValidationError("alpha entry has no witness to write");
  nlohmann::json j = dist_to_json(*entry.witness);
  j["k"] = entry.k;
  j["ratio"] = entry.alpha;
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write witness file " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace prophet
