// Copyright 2026 The DRDP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Run configuration for the simulator CLI. Values resolve in the order
// defaults < config file < command-line flags. The config file is plain
// `key=value` text, one pair per line, `#` starting a comment; keys are the
// long flag names without the leading dashes.

#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "drdp/coop.hpp"
#include "drdp/dp_noise.hpp"
#include "drdp/errors.hpp"
#include "drdp/metering.hpp"

namespace drdp {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown by parse_config for --help; carries the help text.
class HelpRequested : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Mode { Run, MaeSweep, BillError, Convergence, CoopTable, BaselineCompare };

inline const std::map<std::string, Mode>& mode_names() {
  static const std::map<std::string, Mode> names = {
      {"run", Mode::Run},
      {"mae-sweep", Mode::MaeSweep},
      {"bill-error", Mode::BillError},
      {"convergence", Mode::Convergence},
      {"coop-table", Mode::CoopTable},
      {"baseline-compare", Mode::BaselineCompare},
  };
  return names;
}

inline std::string to_string(Mode mode) {
  for (const auto& [name, m] : mode_names())
    if (m == mode) return name;
  return "unknown";
}

struct RunConfig {
  Mode mode = Mode::Run;
  std::optional<std::string> input;
  std::size_t synth_days = 3;
  std::size_t meters = 10;
  std::size_t cooperative_homes = 1;
  double epsilon1 = 0.5;
  double epsilon2 = 0.5;
  double delta_f1 = 1.0;
  double delta_f2 = 1.0;
  double mu = 0.0;
  double peak_factor = 12000.0;
  double unit_price = 10.0;
  double peak_price = 25.0;
  std::uint64_t seed = 42;
  std::string output_dir = "drdp_out";
  std::vector<double> epsilons = {0.01, 0.1, 0.5, 1.0, 2.0};
  std::size_t coop_n = 12;
  std::size_t meter = 0;  // row used by convergence mode
  bool noise = true;      // off: every noise draw is zero

  bool synthetic() const { return !input.has_value(); }

  Tariff tariff() const { return {unit_price, peak_price, peak_factor}; }
  PrivacyParams meter_params() const {
    return PrivacyParams::create(epsilon1, delta_f1, mu);
  }
  PrivacyParams grid_params() const {
    return PrivacyParams::create(epsilon2, delta_f2, mu);
  }
};

inline nlohmann::ordered_json to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["mode"] = to_string(c.mode);
  if (c.input) {
    j["input"] = *c.input;
  } else {
    j["synth_days"] = c.synth_days;
    j["meters"] = c.meters;
    j["cooperative_homes"] = c.cooperative_homes;
  }
  j["epsilon1"] = c.epsilon1;
  j["epsilon2"] = c.epsilon2;
  j["delta_f1"] = c.delta_f1;
  j["delta_f2"] = c.delta_f2;
  j["mu"] = c.mu;
  j["peak_factor"] = c.peak_factor;
  j["unit_price"] = c.unit_price;
  j["peak_price"] = c.peak_price;
  j["seed"] = c.seed;
  j["epsilons"] = c.epsilons;
  j["coop_n"] = c.coop_n;
  j["meter"] = c.meter;
  j["noise"] = c.noise;
  return j;
}

struct ParsedConfig {
  RunConfig config;
  std::vector<std::string> warnings;
};

namespace detail {

template <class T>
T parse_value(const std::string& key, const std::string& text) {
  std::string_view trimmed = trim(text);
  if constexpr (std::is_same_v<T, std::string>) {
    return std::string(trimmed);
  } else {
    auto v = parse_number<T>(trimmed);
    if (!v) throw ConfigError("invalid value '" + text + "' for " + key);
    return *v;
  }
}

inline std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_value<double>(key, item));
  if (out.empty()) throw ConfigError("empty list for " + key);
  return out;
}

/// key -> setter. Shared by the config file and the flag parser.
inline std::map<std::string, std::function<void(RunConfig&, const std::string&)>>
setters() {
  using Setter = std::function<void(RunConfig&, const std::string&)>;
  auto field = [](auto member, const char* key) -> Setter {
    return [member, key](RunConfig& c, const std::string& v) {
      using T = std::remove_reference_t<decltype(c.*member)>;
      c.*member = parse_value<T>(key, v);
    };
  };
  return {
      {"input", [](RunConfig& c, const std::string& v) { c.input = std::string(trim(v)); }},
      {"synth-days", field(&RunConfig::synth_days, "synth-days")},
      {"meters", field(&RunConfig::meters, "meters")},
      {"cooperative-homes", field(&RunConfig::cooperative_homes, "cooperative-homes")},
      {"epsilon1", field(&RunConfig::epsilon1, "epsilon1")},
      {"epsilon2", field(&RunConfig::epsilon2, "epsilon2")},
      {"delta-f1", field(&RunConfig::delta_f1, "delta-f1")},
      {"delta-f2", field(&RunConfig::delta_f2, "delta-f2")},
      {"mu", field(&RunConfig::mu, "mu")},
      {"peak-factor", field(&RunConfig::peak_factor, "peak-factor")},
      {"unit-price", field(&RunConfig::unit_price, "unit-price")},
      {"peak-price", field(&RunConfig::peak_price, "peak-price")},
      {"seed", field(&RunConfig::seed, "seed")},
      {"out", field(&RunConfig::output_dir, "out")},
      {"epsilons",
       [](RunConfig& c, const std::string& v) { c.epsilons = parse_list("epsilons", v); }},
      {"coop-n", field(&RunConfig::coop_n, "coop-n")},
      {"meter", field(&RunConfig::meter, "meter")},
      {"noise",
       [](RunConfig& c, const std::string& v) {
         const std::string_view t = trim(v);
         if (t != "on" && t != "off") throw ConfigError("noise must be on or off");
         c.noise = t == "on";
       }},
      {"mode",
       [](RunConfig& c, const std::string& v) {
         auto it = mode_names().find(std::string(trim(v)));
         if (it == mode_names().end()) throw ConfigError("unknown mode '" + v + "'");
         c.mode = it->second;
       }},
  };
}

}  // namespace detail

/// Reads `key=value` pairs. Blank lines and `#` comments are skipped.
inline std::map<std::string, std::string> read_config_file(std::istream& in,
                                                           const std::string& source) {
  std::map<std::string, std::string> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::string_view row = detail::trim(line);
    if (row.empty()) continue;
    auto eq = row.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(source + ":" + std::to_string(line_no) + ": expected key=value");
    std::string key(detail::trim(row.substr(0, eq)));
    pairs[key] = std::string(detail::trim(row.substr(eq + 1)));
  }
  return pairs;
}

inline ParsedConfig parse_config(const std::vector<std::string>& args) {
  CLI::App app{"Differentially private smart-meter reporting and dynamic billing simulator",
               "drdp_sim"};
  const auto setters = detail::setters();

  std::string config_path;
  app.add_option("--config", config_path, "key=value config file");
  std::map<std::string, std::string> flag_values;
  std::map<std::string, CLI::Option*> options;
  const std::map<std::string, std::string> help = {
      {"input", "CSV of meter_id,slot,wh readings"},
      {"synth-days", "days of synthetic readings (default 3)"},
      {"meters", "synthetic meter count (default 10)"},
      {"cooperative-homes", "synthetic homes with a reduced peak (default 1)"},
      {"epsilon1", "meter-side privacy budget (default 0.5)"},
      {"epsilon2", "grid-side privacy budget (default 0.5)"},
      {"delta-f1", "meter-side sensitivity, Wh (default 1)"},
      {"delta-f2", "grid-side sensitivity, Wh (default 1)"},
      {"mu", "noise location, Wh (default 0)"},
      {"peak-factor", "regional peak threshold, Wh (default 12000)"},
      {"unit-price", "off-peak price, cents/Wh (default 10)"},
      {"peak-price", "peak price, cents/Wh (default 25)"},
      {"seed", "master seed (default 42)"},
      {"out", "output directory (default drdp_out)"},
      {"mode", "run | mae-sweep | bill-error | convergence | coop-table | baseline-compare"},
      {"epsilons", "comma-separated budgets for sweeps"},
      {"coop-n", "meter count for coop-table (default 12)"},
      {"meter", "meter row for convergence (default 0)"},
      {"noise", "on | off (default on)"},
  };
  for (const auto& [key, description] : help)
    options[key] = app.add_option("--" + key, flag_values[key], description);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(app.help());
  } catch (const CLI::ParseError& e) {
    throw ConfigError(std::string(e.what()) + "\n" + app.help());
  }

  std::map<std::string, std::string> file_values;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot open config file " + config_path);
    file_values = read_config_file(in, config_path);
    for (const auto& [key, value] : file_values)
      if (!setters.contains(key)) throw ConfigError("unknown config key '" + key + "'");
  }

  ParsedConfig parsed;
  RunConfig& c = parsed.config;
  for (const auto& [key, value] : file_values) setters.at(key)(c, value);
  for (const auto& [key, option] : options)
    if (option->count() > 0) setters.at(key)(c, flag_values[key]);

  auto explicitly = [&](const std::string& key) {
    return options.at(key)->count() > 0 || file_values.contains(key);
  };
  if (explicitly("input") && explicitly("synth-days"))
    throw ConfigError("--input and --synth-days are mutually exclusive");

  try {
    (void)c.meter_params();
    (void)c.grid_params();
    for (double e : c.epsilons) compute_scale(1.0, e);
    c.tariff().validate();
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }
  if (c.synthetic() && (c.meters == 0 || c.synth_days == 0))
    throw ConfigError("meters and synth-days must be positive");
  if (c.coop_n == 0 || c.coop_n > kMaxExactBinomialN)
    throw ConfigError("coop-n must be in 1..64");
  if (!c.tariff().has_peak_premium())
    parsed.warnings.push_back("peak price does not exceed unit price");
  return parsed;
}

inline ParsedConfig parse_config(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return parse_config(args);
}

}  // namespace drdp
