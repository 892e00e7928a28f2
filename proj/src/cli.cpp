#include "prophet_lab/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "prophet_lab/bounds.hpp"
#include "prophet_lab/dist_io.hpp"
#include "prophet_lab/engine.hpp"
#include "prophet_lab/errors.hpp"
#include "prophet_lab/experiments.hpp"
#include "prophet_lab/policies.hpp"
#include "prophet_lab/stopping_dp.hpp"

namespace prophet::cli {

std::string csv_header() {
  return "command,config_hash,seed,dist_id,n,mode,param,trials,mean,stderr,exact_reference,extra";
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

// key=value pairs joined with ';', used for the canonical config string and
// for the extra column.
class Fields {
 public:
  Fields& add(const std::string& key, const std::string& value) {
    if (!text_.empty()) text_ += ';';
    text_ += key + '=' + value;
    return *this;
  }
  Fields& add(const std::string& key, double value) { return add(key, format_double(value)); }
  Fields& add(const std::string& key, std::size_t value) { return add(key, std::to_string(value)); }
  Fields& add(const std::string& key, std::uint64_t value, bool) { return add(key, std::to_string(value)); }
  const std::string& str() const { return text_; }

 private:
  std::string text_;
};

std::string join(const std::vector<std::size_t>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? " " : "") + std::to_string(xs[i]);
  return s;
}

Fields budget_fields(const std::string& command, const SearchBudget& b) {
  Fields f;
  f.add("command", command)
      .add("restarts", b.restarts)
      .add("iters", b.iters)
      .add("max_support", b.max_support)
      .add("seed", b.seed, true);
  return f;
}

}  // namespace

std::string to_csv(const Row& r) {
  std::ostringstream os;
  os << csv_field(r.command) << ',' << r.config_hash << ',' << r.seed << ',' << csv_field(r.dist_id) << ',' << r.n
     << ',' << r.mode << ',' << r.param << ',' << r.trials << ',' << format_double(r.mean) << ','
     << format_double(r.stderr_) << ',' << format_double(r.exact_reference) << ',' << csv_field(r.extra);
  return os.str();
}

nlohmann::json to_json(const Row& r) {
  return nlohmann::json{{"command", r.command},
                        {"config_hash", r.config_hash},
                        {"seed", r.seed},
                        {"dist_id", r.dist_id},
                        {"n", r.n},
                        {"mode", r.mode},
                        {"param", r.param},
                        {"trials", r.trials},
                        {"mean", r.mean},
                        {"stderr", r.stderr_},
                        {"exact_reference", r.exact_reference},
                        {"extra", r.extra}};
}

std::string config_hash(std::string_view canonical) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::uint64_t default_seed() {
  const char* env = std::getenv("PROPHET_LAB_SEED");
  if (env == nullptr || *env == '\0') return 20240601;
  std::uint64_t seed = 0;
  const char* end = env + std::char_traits<char>::length(env);
  const auto [ptr, ec] = std::from_chars(env, end, seed);
  if (ec != std::errc() || ptr != end) throw ConfigError("PROPHET_LAB_SEED must be an unsigned integer");
  return seed;
}

std::vector<Row> cmd_ratio(const RatioOptions& opt) {
  if (opt.n == 0) throw ConfigError("--n must be at least 1");
  const LoadedDist ld = resolve_dist(opt.dist);
  const StoppingTable table = build_table(ld.dist, opt.n);
  Fields canon;
  canon.add("command", std::string("ratio")).add("dist", opt.dist).add("n", opt.n);
  const std::string hash = config_hash(canon.str());
  std::vector<Row> rows;
  for (std::size_t k = 1; k <= opt.n; ++k) {
    Row r;
    r.command = "ratio";
    r.config_hash = hash;
    r.dist_id = ld.id;
    r.n = k;
    r.mode = "standard";
    r.param = 1;
    r.mean = table.gambler(k);
    r.exact_reference = table.prophet(k);
    Fields extra;
    extra.add("ratio", table.prophet(k) > 0.0 ? table.gambler(k) / table.prophet(k) : std::nan(""));
    extra.add("threshold", table.threshold(k));
    r.extra = extra.str();
    rows.push_back(std::move(r));
  }
  if (!(table.prophet(opt.n) > 0.0)) throw ValidationError("prophet value zero");
  return rows;
}

std::vector<Row> cmd_simulate(const SimulateOptions& opt) {
  if (opt.n == 0) throw ConfigError("--n must be at least 1");
  LoadedDist ld = resolve_dist(opt.dist);
  FiniteDist d = ld.dist;
  const std::size_t n = opt.n;

  PolicyPtr policy;
  GameSetting setting;
  std::optional<double> dp;
  std::size_t batch_width = 0;  // for paired runs
  Fields extra;

  const auto window_batches = [&]() -> std::size_t {
    if (opt.k) return *opt.k;
    if (opt.w && *opt.w > 0 && n % *opt.w == 0) return n / *opt.w;
    throw ConfigError("window algorithms need --k (or --w dividing n)");
  };

  if (opt.policy == "threshold") {
    policy = threshold_policy(build_table(d, n));
    const std::string mode = opt.mode.empty() ? "standard" : opt.mode;
    if (mode == "standard") {
      setting = GameSetting::standard(n);
    } else if (mode == "windowed") {
      setting = GameSetting::windowed(n, opt.w.value_or(1));
    } else if (mode == "batched") {
      setting = GameSetting::batched(n, opt.b.value_or(1));
    } else {
      throw ConfigError("unknown mode '" + mode + "'");
    }
    dp = build_table(d, n).gambler(n);
  } else if (opt.policy == "batch") {
    if (!opt.b) throw ConfigError("batch policy needs --b");
    if (*opt.b == 0 || n % *opt.b != 0) throw ConfigError("--b must divide --n");
    policy = batch_policy(d, n, *opt.b);
    setting = *opt.b == 1 && opt.mode == "standard" ? GameSetting::standard(n) : GameSetting::batched(n, *opt.b);
    dp = batch_value(d, n, *opt.b);
  } else if (opt.policy == "window_a" || opt.policy == "window_a_prime") {
    const std::size_t k = window_batches();
    if (k == 0 || n % k != 0) throw ConfigError("--k must divide --n");
    batch_width = n / k;
    if (opt.policy == "window_a") {
      policy = window_algo_a(d, n, k);
    } else {
      const double c = 1.0 / mean(max_power(d, batch_width));
      d = scale(d, c);
      ld.id += "*" + format_double(c);
      extra.add("scale", c);
      policy = window_algo_a_prime(d, n, k, opt.eps3);
    }
    setting = GameSetting::windowed(n, batch_width);
    dp = batch_value(d, n, batch_width);
  } else if (opt.policy == "final_max") {
    setting = GameSetting::windowed(n, opt.w.value_or(n));
    policy = final_window_max_policy();
  } else {
    throw ConfigError("unknown policy '" + opt.policy + "'");
  }
  if (!opt.mode.empty() && opt.mode != to_string(setting.mode)) {
    throw ConfigError("policy '" + opt.policy + "' does not play " + opt.mode + " mode");
  }
  if (opt.paired && batch_width == 0) throw ConfigError("--paired needs a window algorithm");

  if (opt.trials < 2) throw ValidationError("--trials must be at least 2");
  const std::vector<Outcome> outcomes = simulate(setting, *policy, d, opt.trials, opt.seed, opt.workers);
  const std::vector<double> pay = payoffs(outcomes);
  const McEstimate est = summarize(pay, opt.seed);

  if (dp) extra.add("dp", *dp);
  if (opt.paired) {
    const auto base = simulate(GameSetting::batched(n, batch_width), *batch_policy(d, n, batch_width), d, opt.trials,
                               opt.seed, opt.workers);
    std::vector<double> gap(opt.trials);
    for (std::size_t t = 0; t < opt.trials; ++t) gap[t] = outcomes[t].payoff - base[t].payoff;
    const McEstimate g = summarize(gap, opt.seed);
    extra.add("gap", g.mean).add("gap_stderr", g.std_error).add("min_gap", *std::min_element(gap.begin(), gap.end()));
  }

  Fields canon;
  canon.add("command", std::string("simulate"))
      .add("dist", opt.dist)
      .add("n", n)
      .add("policy", opt.policy)
      .add("mode", to_string(setting.mode))
      .add("param", setting.param)
      .add("eps3", opt.eps3)
      .add("trials", opt.trials)
      .add("seed", opt.seed, true)
      .add("paired", std::string(opt.paired ? "1" : "0"));

  Row r;
  r.command = "simulate";
  r.config_hash = config_hash(canon.str());
  r.seed = opt.seed;
  r.dist_id = ld.id;
  r.n = n;
  r.mode = to_string(setting.mode);
  r.param = setting.param;
  r.trials = opt.trials;
  r.mean = est.mean;
  r.stderr_ = est.std_error;
  r.exact_reference = prophet_value(d, n);
  r.extra = extra.str();
  return {r};
}

std::vector<std::size_t> default_l_ladder(std::size_t k_max) {
  std::vector<std::size_t> ls;
  for (double l = 2.0; l < static_cast<double>(k_max); l *= 1.5) {
    const auto v = static_cast<std::size_t>(std::llround(l));
    if (v >= k_max) break;
    if (ls.empty() || ls.back() != v) ls.push_back(v);
  }
  return ls;
}

std::vector<Row> cmd_bounds(const BoundsOptions& opt) {
  if (opt.k_list.empty()) throw ConfigError("--k-list must not be empty");
  std::vector<std::size_t> ks = opt.k_list;
  for (std::size_t i = 1; i < ks.size(); ++i) {
    if (ks[i] <= ks[i - 1]) throw ConfigError("--k-list must be strictly increasing");
  }
  if (ks.front() < 3) throw ConfigError("bounds need k >= 3");

  AlphaTable table;
  Fields canon = budget_fields("bounds", opt.budget);
  canon.add("k_list", join(ks)).add("delta", opt.delta);
  std::string dist_id = "search";
  if (!opt.hard_dir.empty()) {
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(opt.hard_dir)) {
      if (e.path().extension() == ".json") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw ValidationError("no witness files in " + opt.hard_dir);
    for (const auto& f : files) table.insert(import_hard(f));
    dist_id = opt.hard_dir;
    canon.add("hard_dir", opt.hard_dir);
  } else {
    std::vector<std::size_t> ls = opt.l_list.empty() ? default_l_ladder(ks.back()) : opt.l_list;
    canon.add("l_list", join(ls));
    ls.insert(ls.end(), ks.begin(), ks.end());
    std::sort(ls.begin(), ls.end());
    ls.erase(std::unique(ls.begin(), ls.end()), ls.end());
    for (const std::size_t l : ls) {
      if (l < 1) continue;
      SearchBudget b = opt.budget;
      b.seed = derive_seed(opt.budget.seed, l);
      table.insert(alpha_estimate(l, b));
    }
  }

  const std::string hash = config_hash(canon.str());
  std::vector<Row> rows;
  for (const BoundReport& rep : bound_sweep(ks, table, opt.delta)) {
    Row r;
    r.command = "bounds";
    r.config_hash = hash;
    r.seed = opt.budget.seed;
    r.dist_id = dist_id;
    r.n = rep.k;
    r.mode = "bounds";
    r.param = rep.l;
    r.mean = rep.alpha_k;
    r.exact_reference = rep.upper;
    Fields extra;
    extra.add("lower", rep.alpha_k)
        .add("clean_upper", rep.clean_bound)
        .add("tight_upper", rep.tight_bound ? *rep.tight_bound : std::nan(""))
        .add("alpha_l", rep.alpha_l)
        .add("alpha_l_source", to_string(rep.alpha_l_source))
        .add("alpha_k_source", to_string(rep.alpha_k_source))
        .add("delta_gap", rep.delta_gap)
        .add("vacuous", std::string(rep.vacuous ? "1" : "0"));
    r.extra = extra.str();
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<Row> cmd_hardsearch(const HardsearchOptions& opt) {
  if (opt.k == 0) throw ConfigError("--k must be at least 1");
  const AlphaEntry entry = alpha_estimate(opt.k, opt.budget);
  if (!opt.out.empty()) write_witness(opt.out, entry);
  Fields canon = budget_fields("hardsearch", opt.budget);
  canon.add("k", opt.k);
  Row r;
  r.command = "hardsearch";
  r.config_hash = config_hash(canon.str());
  r.seed = opt.budget.seed;
  r.dist_id = opt.out.empty() ? "-" : std::filesystem::path(opt.out).stem().string();
  r.n = opt.k;
  r.mode = "standard";
  r.param = 1;
  r.mean = entry.alpha;
  r.exact_reference = competitive_ratio(*entry.witness, opt.k);
  Fields extra;
  extra.add("support_size", entry.witness->size()).add("provenance", to_string(entry.provenance));
  r.extra = extra.str();
  return {r};
}

std::vector<Row> cmd_demo_noniid(const DemoOptions& opt) {
  const NoniidResult res = noniid_demo(opt.eps, opt.n, opt.w);
  Fields canon;
  canon.add("command", std::string("demo-noniid")).add("eps", opt.eps).add("n", opt.n).add("w", opt.w);
  Row r;
  r.command = "demo-noniid";
  r.config_hash = config_hash(canon.str());
  r.dist_id = "noniid(eps=" + format_double(opt.eps) + ")";
  r.n = opt.n;
  r.mode = "windowed";
  r.param = opt.w;
  r.mean = res.gambler;
  r.exact_reference = res.prophet;
  Fields extra;
  extra.add("ratio", res.ratio);
  r.extra = extra.str();
  return {r};
}

std::vector<Row> cmd_padding(const PaddingOptions& opt) {
  const LoadedDist ld = resolve_dist(opt.dist);
  if (!(opt.p > 0.0 && opt.p < 1.0)) throw ValidationError("--p must lie in (0, 1)");
  const FiniteDist padded = zero_pad(ld.dist, opt.p);
  const PolicyPtr policy = threshold_policy(build_table(padded, opt.n));
  const PaddingReport rep = padding_experiment(ld.dist, opt.n, opt.k, opt.p, *policy, opt.trials, opt.seed,
                                               opt.workers);
  Fields canon;
  canon.add("command", std::string("padding"))
      .add("dist", opt.dist)
      .add("n", opt.n)
      .add("k", opt.k)
      .add("p", opt.p)
      .add("trials", opt.trials)
      .add("seed", opt.seed, true);
  Row r;
  r.command = "padding";
  r.config_hash = config_hash(canon.str());
  r.seed = opt.seed;
  r.dist_id = ld.id;
  r.n = opt.n;
  r.mode = "windowed";
  r.param = opt.k;
  r.trials = opt.trials;
  r.mean = rep.windowed.mean;
  r.stderr_ = rep.windowed.std_error;
  r.exact_reference = rep.prophet;
  Fields extra;
  extra.add("windowed_ratio", rep.windowed_ratio)
      .add("ratio_stderr", rep.windowed_ratio_stderr)
      .add("standard_horizon", rep.standard_horizon)
      .add("standard_ratio", rep.standard_ratio)
      .add("collision", rep.collision.mean)
      .add("collision_stderr", rep.collision.std_error)
      .add("collision_bound", rep.collision_bound)
      .add("regime_violation", std::string(rep.regime_violation ? "1" : "0"));
  r.extra = extra.str();
  return {r};
}

namespace {

void emit(const std::vector<Row>& rows, const std::string& format, const std::string& out_path, std::ostream& out) {
  std::ostringstream os;
  if (format == "json") {
    nlohmann::json arr = nlohmann::json::array();
    for (const Row& r : rows) arr.push_back(to_json(r));
    os << arr.dump(2) << '\n';
  } else {
    os << csv_header() << '\n';
    for (const Row& r : rows) os << to_csv(r) << '\n';
  }
  if (out_path.empty()) {
    out << os.str();
    return;
  }
  std::ofstream file(out_path, std::ios::binary);
  if (!file) throw ValidationError("cannot write " + out_path);
  file << os.str();
}

void add_budget(CLI::App* sub, SearchBudget& b) {
  sub->add_option("--restarts", b.restarts, "Nelder-Mead restarts per support size")->capture_default_str();
  sub->add_option("--iters", b.iters, "function evaluations per run and atom")->capture_default_str();
  sub->add_option("--max-support", b.max_support, "largest support size tried")->capture_default_str();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Batched and windowed prophet inequality laboratory"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string format = "csv";
  std::string out_path;
  std::uint64_t seed = 0;
  bool seed_given = false;
  unsigned workers = 1;
  app.add_option("--format", format, "output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  app.add_option("--out", out_path, "write output to this file instead of stdout");
  app.add_option_function<std::uint64_t>(
      "--seed", [&](const std::uint64_t& s) { seed = s, seed_given = true; }, "root seed (default: PROPHET_LAB_SEED)");
  app.add_option("--workers", workers, "simulation threads")->capture_default_str();

  RatioOptions ratio_opt;
  auto* ratio = app.add_subcommand("ratio", "exact V_k, E_k and ratio tables");
  ratio->add_option("--dist", ratio_opt.dist, "distribution file or inline v:p,...")->required();
  ratio->add_option("--n", ratio_opt.n, "horizon")->required();

  SimulateOptions sim_opt;
  std::size_t b = 0;
  std::size_t w = 0;
  std::size_t k = 0;
  auto* sim = app.add_subcommand("simulate", "Monte Carlo run of one policy");
  sim->add_option("--dist", sim_opt.dist, "distribution file or inline v:p,...")->required();
  sim->add_option("--n", sim_opt.n, "number of draws")->required();
  sim->add_option("--policy", sim_opt.policy, "threshold | batch | window_a | window_a_prime | final_max")
      ->capture_default_str();
  sim->add_option("--mode", sim_opt.mode, "standard | batched | windowed");
  auto* b_opt = sim->add_option("--b", b, "batch size");
  auto* w_opt = sim->add_option("--w", w, "window size");
  auto* k_opt = sim->add_option("--k", k, "number of aligned batches for the window algorithms");
  sim->add_option("--eps3", sim_opt.eps3, "second-to-last threshold offset for window_a_prime")->capture_default_str();
  sim->add_option("--trials", sim_opt.trials, "number of trajectories")->capture_default_str();
  sim->add_flag("--paired", sim_opt.paired, "also run the batch rule on the same trajectories");

  BoundsOptions bounds_opt;
  auto* bounds = app.add_subcommand("bounds", "lower and upper bounds on the window-n/k ratio");
  bounds->add_option("--k-list", bounds_opt.k_list, "values of k")->delimiter(',')->capture_default_str();
  bounds->add_option("--l-list", bounds_opt.l_list, "candidate l values")->delimiter(',');
  bounds->add_option("--hard-dir", bounds_opt.hard_dir, "import witness files from this directory");
  bounds->add_option("--delta", bounds_opt.delta, "slack of the hard distributions")->capture_default_str();
  add_budget(bounds, bounds_opt.budget);

  HardsearchOptions hard_opt;
  auto* hard = app.add_subcommand("hardsearch", "search for a hard k-sample distribution");
  hard->add_option("--k", hard_opt.k, "number of samples")->required();
  hard->add_option("--out", hard_opt.out, "witness file to write");
  add_budget(hard, hard_opt.budget);

  DemoOptions demo_opt;
  auto* demo = app.add_subcommand("demo-noniid", "exact values of the non-i.i.d. window example");
  demo->add_option("--eps", demo_opt.eps, "probability of the large draw")->capture_default_str();
  demo->add_option("--n", demo_opt.n, "number of draws")->capture_default_str();
  demo->add_option("--w", demo_opt.w, "window size")->capture_default_str();

  PaddingOptions pad_opt;
  auto* pad = app.add_subcommand("padding", "windowed game on a zero-padded distribution");
  pad->add_option("--dist", pad_opt.dist, "distribution file or inline v:p,...")->required();
  pad->add_option("--n", pad_opt.n, "number of draws")->required();
  pad->add_option("--k", pad_opt.k, "window size")->required();
  pad->add_option("--p", pad_opt.p, "probability of a nonzero draw")->required();
  pad->add_option("--trials", pad_opt.trials, "number of trajectories")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (!seed_given) seed = default_seed();
    std::vector<Row> rows;
    if (*ratio) {
      rows = cmd_ratio(ratio_opt);
      for (Row& r : rows) r.seed = seed;
    } else if (*sim) {
      if (*b_opt) sim_opt.b = b;
      if (*w_opt) sim_opt.w = w;
      if (*k_opt) sim_opt.k = k;
      sim_opt.seed = seed;
      sim_opt.workers = workers;
      rows = cmd_simulate(sim_opt);
    } else if (*bounds) {
      bounds_opt.budget.seed = seed;
      rows = cmd_bounds(bounds_opt);
    } else if (*hard) {
      hard_opt.budget.seed = seed;
      rows = cmd_hardsearch(hard_opt);
    } else if (*demo) {
      rows = cmd_demo_noniid(demo_opt);
      for (Row& r : rows) r.seed = seed;
    } else if (*pad) {
      pad_opt.seed = seed;
      pad_opt.workers = workers;
      rows = cmd_padding(pad_opt);
    }
    emit(rows, format, out_path, out);
    return 0;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace prophet::cli
