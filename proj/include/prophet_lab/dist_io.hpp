#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "prophet_lab/finite_dist.hpp"

namespace prophet {

struct LoadedDist {
  FiniteDist dist;
  /// Probability mass moved by the hygiene pass (L1).
  double adjustment = 0.0;
  /// Identifier used in reports: file stem or the inline spec itself.
  std::string id;
};

/// Parses {"support": [...], "probs": [...]}. Extra fields are ignored.
FiniteDist dist_from_json(const nlohmann::json& j);
nlohmann::json dist_to_json(const FiniteDist& d);

LoadedDist load_dist_file(const std::filesystem::path& path);
void save_dist_file(const std::filesystem::path& path, const FiniteDist& d);

/// Inline syntax "v:p,v:p,...".
FiniteDist parse_inline_dist(std::string_view spec);

/// A path to an existing file is loaded as JSON; anything else is parsed as
/// an inline spec.
LoadedDist resolve_dist(const std::string& arg);

}  // namespace prophet
