#include "prophet_lab/dist_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "prophet_lab/errors.hpp"

namespace prophet {

namespace {

std::vector<double> number_array(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array()) {
    throw ValidationError(std::string("distribution JSON needs an array field \"") + key + "\"");
  }
  std::vector<double> out;
  for (const auto& x : j.at(key)) {
    if (!x.is_number()) throw ValidationError(std::string("non-numeric entry in \"") + key + "\"");
    out.push_back(x.get<double>());
  }
  return out;
}

double parse_double(std::string_view s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  while (first < last && *first == ' ') ++first;
  while (last > first && last[-1] == ' ') --last;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw ValidationError("cannot parse number '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

FiniteDist dist_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("distribution JSON must be an object");
  auto support = number_array(j, "support");
  auto probs = number_array(j, "probs");
  if (support.size() != probs.size()) throw ValidationError("\"support\" and \"probs\" differ in length");
  for (std::size_t i = 1; i < support.size(); ++i) {
    if (!(support[i] > support[i - 1])) throw ValidationError("\"support\" must be strictly ascending");
  }
  for (double p : probs) {
    if (!(p > 0.0)) throw ValidationError("\"probs\" entries must be positive");
  }
  return FiniteDist(std::move(support), std::move(probs));
}

nlohmann::json dist_to_json(const FiniteDist& d) {
  nlohmann::json j;
  j["support"] = std::vector<double>(d.support().begin(), d.support().end());
  j["probs"] = std::vector<double>(d.probs().begin(), d.probs().end());
  return j;
}

LoadedDist load_dist_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open distribution file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("malformed JSON in " + path.string() + ": " + e.what());
  }
  FiniteDist d = dist_from_json(j);
  const double adj = d.hygiene_adjustment();
  return LoadedDist{std::move(d), adj, path.stem().string()};
}

void save_dist_file(const std::filesystem::path& path, const FiniteDist& d) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << dist_to_json(d).dump(2) << '\n';
}

FiniteDist parse_inline_dist(std::string_view spec) {
  std::vector<double> support;
  std::vector<double> probs;
  while (!spec.empty()) {
    const auto comma = spec.find(',');
    const std::string_view item = spec.substr(0, comma);
    const auto colon = item.find(':');
    if (colon == std::string_view::npos) {
      throw ValidationError("inline distribution item '" + std::string(item) + "' is not of the form v:p");
    }
    support.push_back(parse_double(item.substr(0, colon)));
    probs.push_back(parse_double(item.substr(colon + 1)));
    if (comma == std::string_view::npos) break;
    spec.remove_prefix(comma + 1);
  }
  if (support.empty()) throw ValidationError("empty inline distribution");
  return FiniteDist(std::move(support), std::move(probs));
}

LoadedDist resolve_dist(const std::string& arg) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(arg, ec)) return load_dist_file(arg);
  FiniteDist d = parse_inline_dist(arg);
  const double adj = d.hygiene_adjustment();
  return LoadedDist{std::move(d), adj, arg};
}

}  // namespace prophet
