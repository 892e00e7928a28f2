#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "prophet_lab/finite_dist.hpp"

namespace prophet {

enum class Provenance { search, imported, paper_constant };

std::string to_string(Provenance p);

/// The limiting i.i.d. ratio, used only as a labelled reference constant.
inline constexpr double kAlphaLimit = 0.745;

struct AlphaEntry {
  std::size_t k = 0;
  double alpha = 0.0;
  /// Mean-1 distribution whose k-sample ratio is `alpha`.
  std::optional<FiniteDist> witness;
  Provenance provenance = Provenance::search;
};

/// Entries kept sorted by k, at most one per k.
class AlphaTable {
 public:
  /// Replaces any entry with the same k. Throws ValidationError if alpha is
  /// outside [0.744, 1] or a witness does not reproduce it to 1e-9.
  void insert(AlphaEntry entry);
  const AlphaEntry* find(std::size_t k) const;
  const std::vector<AlphaEntry>& entries() const { return entries_; }

 private:
  std::vector<AlphaEntry> entries_;
};

/// V_k / E_k for the law (values, probs); values ascending, probs summing to
/// one. The gambler recursion is advanced in closed form between threshold
/// crossings, so the cost is O(m log m + crossings) rather than O(k m).
/// Returns 2 for degenerate or non-finite input, which makes it usable as an
/// optimizer objective.
double fast_ratio(std::span<const double> values, std::span<const double> probs, std::size_t k);

struct SearchResult {
  FiniteDist dist;
  double ratio = 1.0;
};

/// Local minimization of the k-sample ratio over laws with `support_size`
/// atoms using Nelder-Mead on log-spaced values and softmax probabilities.
/// For support_size >= 3 one atom is pinned at 0. The returned law is scaled
/// to mean 1 and its ratio recomputed exactly by backward induction.
SearchResult search_hard(std::size_t k, std::size_t support_size, std::size_t restarts, std::size_t iters,
                         std::uint64_t seed, const std::optional<FiniteDist>& warm_start = std::nullopt);

struct SearchBudget {
  std::size_t restarts = 3;
  /// Function evaluations per simplex run, per atom.
  std::size_t iters = 2000;
  std::size_t max_support = 33;
  std::uint64_t seed = 1;
};

/// Best ratio over search_hard with support sizes 3, 5, 9, 17, ... (each
/// warm-started from the previous optimum) until the gain drops below 1e-4.
/// k = 1 gives exactly 1.
AlphaEntry alpha_estimate(std::size_t k, const SearchBudget& budget = {});

/// Reads a witness file: distribution JSON plus "k" and "ratio". The ratio is
/// recomputed and the file rejected (ValidationError) if it differs from the
/// claim by more than 1e-6.
AlphaEntry import_hard(const std::filesystem::path& path);

void write_witness(const std::filesystem::path& path, const AlphaEntry& entry);

}  // namespace prophet
