#include "onebit/cli.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <vector>

#include <CLI11.hpp>

#include "onebit/experiments.hpp"

namespace onebit::cli {

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "scenario", "output", "seed",  "workers",  "snr_db",   "alpha",    "sigma",    "blocks",
      "particles", "kappa", "trials", "realizations", "lambda", "unit", "bayes", "beta_min",
      "beta_max", "points", "betas", "resampler", "exact"};
  return keys;
}

std::string normalize_key(std::string key) {
  for (char& c : key)
    if (c == '-') c = '_';
  return key;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Typed access to the merged settings; every failure names its key.
class Settings {
 public:
  explicit Settings(std::map<std::string, std::string> values) : values_(std::move(values)) {}

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string text(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  std::optional<double> real(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    double v = 0.0;
    const std::string& s = it->second;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
      throw ConfigError("invalid number for key '" + key + "': '" + s + "'");
    return v;
  }

  std::optional<std::uint64_t> count(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    std::uint64_t v = 0;
    const std::string& s = it->second;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
      throw ConfigError("invalid non-negative integer for key '" + key + "': '" + s + "'");
    return v;
  }

  bool flag(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return false;
    const std::string& s = it->second;
    if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
    if (s == "0" || s == "false" || s == "no" || s == "off") return false;
    throw ConfigError("invalid boolean for key '" + key + "': '" + s + "'");
  }

  std::vector<double> list(const std::string& key) const {
    std::vector<double> out;
    std::stringstream ss(text(key, ""));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
      if (item.empty() || ec != std::errc() || ptr != item.data() + item.size())
        throw ConfigError("invalid list entry for key '" + key + "': '" + item + "'");
      out.push_back(v);
    }
    return out;
  }

 private:
  std::map<std::string, std::string> values_;
};

void write_row(std::ostream& out, std::initializer_list<std::string> cells) {
  bool first = true;
  for (const auto& c : cells) {
    if (!first) out << ',';
    out << c;
    first = false;
  }
  out << '\n';
}

std::string fmt(double v) { return format_double(v); }
std::string fmt(std::size_t v) { return std::to_string(v); }

Scenario scenario_from(const Settings& s) {
  ScenarioParams p;
  p.snr_db = s.real("snr_db");
  p.alpha = s.real("alpha");
  p.sigma = s.real("sigma");
  if (auto b = s.count("blocks")) p.blocks = *b;
  if (auto l = s.count("particles")) p.particles = *l;
  p.kappa = s.real("kappa");
  Scenario sc;
  try {
    sc = build_scenario(s.text("scenario", "ranging"), p);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const std::string resampler = s.text("resampler", "systematic");
  if (resampler == "systematic") {
    sc.filter.resampler = Resampler::Systematic;
  } else if (resampler == "multinomial") {
    sc.filter.resampler = Resampler::Multinomial;
  } else {
    throw ConfigError("invalid value for key 'resampler': '" + resampler + "'");
  }
  return sc;
}

Unit unit_from(const Settings& s, const Scenario& sc) {
  if (!s.has("unit")) return sc.report_unit;
  Unit u;
  try {
    u = parse_unit(s.text("unit", ""));
    to_report_unit(1.0, sc, u);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("invalid value for key 'unit': " + std::string(e.what()));
  }
  return u;
}

int cmd_fisher(const Settings& s, std::ostream& out) {
  const Scenario sc = scenario_from(s);
  const Unit unit = unit_from(s, sc);
  // information scales with 1 / length^2
  const double scale = to_report_unit(1.0, sc, unit);
  const double inv_sq = 1.0 / (scale * scale);
  const InfoReport f = scenario_fisher(sc);
  write_row(out, {"quantity", "value"});
  write_row(out, {"fisher_onebit", fmt(f.fisher_onebit * inv_sq)});
  write_row(out, {"fisher_ideal", fmt(f.fisher_ideal * inv_sq)});
  write_row(out, {"chi", fmt(f.chi)});
  write_row(out, {"chi_db", fmt(to_db(f.chi))});
  if (s.flag("bayes")) {
    const BayesReport b = scenario_bayes(sc);
    write_row(out, {"fbar_onebit", fmt(b.fbar_onebit * inv_sq)});
    write_row(out, {"fbar_ideal", fmt(b.fbar_ideal * inv_sq)});
    write_row(out, {"j_prior", fmt(b.j_prior * inv_sq)});
    write_row(out, {"j_onebit", fmt(b.j_onebit * inv_sq)});
    write_row(out, {"j_ideal", fmt(b.j_ideal * inv_sq)});
    write_row(out, {"psi", fmt(b.psi)});
    write_row(out, {"psi_db", fmt(to_db(b.psi))});
  }
  return kExitOk;
}

int cmd_bound(const Settings& s, std::ostream& out) {
  const Scenario sc = scenario_from(s);
  const Unit unit = unit_from(s, sc);
  const BoundTrajectory t = run_bounds(sc);
  auto root = [&](double u) { return fmt(to_report_unit(1.0 / std::sqrt(u), sc, unit)); };
  write_row(out, {"k", "u_inv_sqrt_onebit", "u_inv_sqrt_ideal", "rho_db"});
  for (std::size_t k = 0; k < t.rho.size(); ++k)
    write_row(out, {fmt(k), root(t.u_onebit[k]), root(t.u_ideal[k]), fmt(to_db(t.rho[k]))});
  write_row(out, {"steady", root(t.steady_onebit), root(t.steady_ideal), fmt(to_db(t.rho_steady))});
  return kExitOk;
}

int parse_workers(const Settings& s) {
  const std::string w = s.text("workers", "auto");
  if (w == "auto") return 0;
  const auto n = s.count("workers");
  if (*n < 1) throw ConfigError("invalid value for key 'workers': must be >= 1 or 'auto'");
  return static_cast<int>(*n);
}

int cmd_track(const Settings& s, std::ostream& out) {
  const Scenario sc = scenario_from(s);
  MonteCarloOptions opt;
  opt.unit = unit_from(s, sc);
  opt.processes = s.count("trials").value_or(20);
  opt.realizations = s.count("realizations").value_or(50);
  if (opt.processes < 1) throw ConfigError("invalid value for key 'trials': must be >= 1");
  if (opt.realizations < 1) throw ConfigError("invalid value for key 'realizations': must be >= 1");
  if (sc.blocks < 1) throw ConfigError("invalid value for key 'blocks': tracking needs >= 1");
  opt.seed = s.count("seed").value_or(1);
  opt.workers = parse_workers(s);
  opt.exact_likelihood = s.flag("exact");
  const MonteCarloResult r = run_montecarlo(sc, opt);
  write_row(out, {"k", "rmse_onebit", "rmse_ideal", "bound_onebit", "bound_ideal", "discarded"});
  for (const BlockStats& b : r.per_block)
    write_row(out, {fmt(b.k), fmt(b.rmse_onebit), fmt(b.rmse_ideal), fmt(b.bound_onebit), fmt(b.bound_ideal),
                    fmt(r.discarded)});
  return r.discarded > 0 ? kExitDiscarded : kExitOk;
}

int cmd_sweep(const Settings& s, std::ostream& out) {
  const Scenario sc = scenario_from(s);
  if (sc.is_delay()) throw ConfigError("invalid value for key 'scenario': sweep needs a gain scenario (uwb, mobile)");
  try {
    if (s.has("betas")) {
      const std::vector<double> betas = s.list("betas");
      write_row(out, {"beta", "k", "rho_k_db"});
      for (const auto& row : finite_k_loss(sc, betas, sc.blocks))
        write_row(out, {fmt(row.beta), fmt(row.k), fmt(row.rho_k_db)});
      return kExitOk;
    }
    const std::vector<double> grid = log_grid(s.real("beta_min").value_or(1e-7), s.real("beta_max").value_or(1.0),
                                              s.count("points").value_or(61));
    write_row(out, {"beta", "rho_db", "psi_db"});
    for (const auto& row : sweep_beta(sc, grid)) write_row(out, {fmt(row.beta), fmt(row.rho_db), fmt(row.psi_db)});
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid sweep range: ") + e.what());
  }
  return kExitOk;
}

int cmd_transient(const Settings& s, std::ostream& out) {
  const Scenario sc = scenario_from(s);
  const double lambda = s.real("lambda").value_or(3.0);
  if (!(lambda > 1.0)) throw ConfigError("invalid value for key 'lambda': must exceed 1");
  const TransientReport t = scenario_transient(sc, lambda);
  write_row(out, {"quantity", "value"});
  write_row(out, {"lambda", fmt(t.lambda)});
  write_row(out, {"nu", std::to_string(t.nu)});
  write_row(out, {"xi", fmt(t.xi)});
  write_row(out, {"xi_ideal", fmt(t.xi_ideal)});
  write_row(out, {"k_lambda", fmt(t.k_lambda)});
  write_row(out, {"k_lambda_ideal", fmt(t.k_lambda_ideal)});
  write_row(out, {"k_lambda_xi", fmt(t.k_lambda_xi)});
  write_row(out, {"k_lambda_xi_ideal", fmt(t.k_lambda_xi_ideal)});
  write_row(out, {"k_lambda_slow", fmt(t.k_lambda_slow)});
  write_row(out, {"k_lambda_slow_ideal", fmt(t.k_lambda_slow_ideal)});
  write_row(out, {"delta", fmt(t.delta)});
  write_row(out, {"delta_xi", fmt(t.delta_xi)});
  write_row(out, {"delta_approx", fmt(t.delta_approx)});
  write_row(out, {"steady_conditions_hold", t.conditions.steady_approximation_valid() ? "1" : "0"});
  write_row(out, {"loss_conditions_hold", t.conditions.loss_approximation_valid() ? "1" : "0"});
  return kExitOk;
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general, 17);
  return std::string(buf.data(), ptr);
}

std::map<std::string, std::string> parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::map<std::string, std::string> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = normalize_key(trim(line.substr(0, eq)));
    if (!known_keys().count(key))
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
    values[key] = trim(line.substr(eq + 1));
  }
  return values;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"1-bit tracking bounds and particle-filter experiments", "onebit"};
  std::string command;
  app.add_option("command", command, "fisher | bound | track | sweep | transient")
      ->required()
      ->check(CLI::IsMember({"fisher", "bound", "track", "sweep", "transient"}));
  std::string config_path;
  app.add_option("--config", config_path, "key = value settings file; flags override it");

  std::map<std::string, std::string> flag_values;
  std::vector<std::pair<std::string, CLI::Option*>> options;
  auto value_flag = [&](const std::string& name, const std::string& help) {
    options.emplace_back(normalize_key(name), app.add_option("--" + name, flag_values[normalize_key(name)], help));
  };
  value_flag("scenario", "ranging | uwb | mobile");
  value_flag("output", "write CSV here instead of stdout");
  value_flag("seed", "master seed");
  value_flag("workers", "worker threads or 'auto'");
  value_flag("snr-db", "SNR in dB");
  value_flag("alpha", "AR(1) coefficient");
  value_flag("sigma", "process noise (chips for ranging)");
  value_flag("blocks", "number of blocks K");
  value_flag("particles", "particles per filter");
  value_flag("kappa", "resampling threshold");
  value_flag("trials", "theta processes P");
  value_flag("realizations", "noise realizations R per process");
  value_flag("lambda", "transient quality");
  value_flag("unit", "chips | seconds | meters | native");
  value_flag("beta-min", "sweep lower end");
  value_flag("beta-max", "sweep upper end");
  value_flag("points", "sweep grid size");
  value_flag("betas", "comma-separated betas for per-block loss curves");
  value_flag("resampler", "systematic | multinomial");
  bool bayes = false;
  bool exact = false;
  auto* bayes_opt = app.add_flag("--bayes", bayes, "also print the Bayesian loss");
  auto* exact_opt = app.add_flag("--exact", exact, "evaluate delay likelihoods exactly (slow)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfig;
  }

  try {
    std::map<std::string, std::string> merged;
    if (!config_path.empty()) merged = parse_config_file(config_path);
    for (const auto& [key, opt] : options)
      if (opt->count() > 0) merged[key] = flag_values[key];
    if (bayes_opt->count() > 0) merged["bayes"] = bayes ? "1" : "0";
    if (exact_opt->count() > 0) merged["exact"] = exact ? "1" : "0";
    const Settings settings(std::move(merged));

    std::ostringstream buffer;
    int code = kExitOk;
    if (command == "fisher") {
      code = cmd_fisher(settings, buffer);
    } else if (command == "bound") {
      code = cmd_bound(settings, buffer);
    } else if (command == "track") {
      code = cmd_track(settings, buffer);
    } else if (command == "sweep") {
      code = cmd_sweep(settings, buffer);
    } else {
      code = cmd_transient(settings, buffer);
    }

    const std::string output = settings.text("output", "");
    if (output.empty()) {
      out << buffer.str();
    } else {
      std::ofstream file(output, std::ios::binary);
      if (!file) throw ConfigError("cannot write output file '" + output + "'");
      file << buffer.str();
    }
    if (code == kExitDiscarded) err << "warning: some trials were discarded (degenerate particle cloud)\n";
    return code;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace onebit::cli
