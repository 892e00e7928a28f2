#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "prophet_lab/hardsearch.hpp"

namespace prophet::cli {

/// One output record. Column order is fixed and shared by every command.
struct Row {
  std::string command;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string dist_id;
  std::size_t n = 0;
  std::string mode;
  std::size_t param = 0;
  std::size_t trials = 0;
  double mean = 0.0;
  double stderr_ = 0.0;
  double exact_reference = 0.0;
  std::string extra;
};

std::string csv_header();
std::string to_csv(const Row& row);
nlohmann::json to_json(const Row& row);

/// 64-bit FNV-1a of the canonical option string, as 16 hex digits.
std::string config_hash(std::string_view canonical);

/// %.17g, so values round-trip and output is byte-stable.
std::string format_double(double x);

/// Seed from PROPHET_LAB_SEED, else 20240601. Throws ConfigError if the
/// variable is set but not an unsigned integer.
std::uint64_t default_seed();

struct RatioOptions {
  std::string dist;
  std::size_t n = 1;
};

struct SimulateOptions {
  std::string dist;
  std::size_t n = 1;
  /// threshold | batch | window_a | window_a_prime | final_max
  std::string policy = "threshold";
  /// standard | batched | windowed; empty picks the policy's natural mode.
  std::string mode;
  std::optional<std::size_t> b;
  std::optional<std::size_t> w;
  /// Number of aligned batches for the window algorithms (w = n / k).
  std::optional<std::size_t> k;
  double eps3 = 0.05;
  std::size_t trials = 10000;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  /// Also run the optimal batch rule on the same trajectories and report the
  /// per-trajectory gap.
  bool paired = false;
};

struct BoundsOptions {
  std::vector<std::size_t> k_list{100, 1000, 10000};
  /// Candidate l values for the upper bound; empty uses a default ladder.
  std::vector<std::size_t> l_list;
  /// Directory of witness files to import instead of searching.
  std::string hard_dir;
  double delta = 1e-4;
  SearchBudget budget;
};

struct HardsearchOptions {
  std::size_t k = 2;
  SearchBudget budget;
  std::string out;
};

struct DemoOptions {
  double eps = 0.01;
  std::size_t n = 10;
  std::size_t w = 3;
};

struct PaddingOptions {
  std::string dist;
  std::size_t n = 1000;
  std::size_t k = 10;
  double p = 0.01;
  std::size_t trials = 10000;
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

std::vector<Row> cmd_ratio(const RatioOptions& opt);
std::vector<Row> cmd_simulate(const SimulateOptions& opt);
std::vector<Row> cmd_bounds(const BoundsOptions& opt);
std::vector<Row> cmd_hardsearch(const HardsearchOptions& opt);
std::vector<Row> cmd_demo_noniid(const DemoOptions& opt);
std::vector<Row> cmd_padding(const PaddingOptions& opt);

/// Default ladder of l values used by cmd_bounds.
std::vector<std::size_t> default_l_ladder(std::size_t k_max);

/// Entry point shared by the executable and the tests. Returns the exit
/// code: 0 success, 1 validation error, 2 configuration error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace prophet::cli
