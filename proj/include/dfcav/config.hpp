#pragma once

// Experiment configuration files: INI-style "key = value" lines grouped under
// [section] headers, '#' or ';' comments. Every key is checked against the
// schema of the selected scenario; errors carry the file line.

#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dfcav/cavity.hpp"
#include "dfcav/csv.hpp"
#include "dfcav/error.hpp"

namespace dfc {

class ConfigError : public Error {
 public:
  ConfigError(const std::string& source, std::size_t line, const std::string& message)
      : Error(source + ":" + std::to_string(line) + ": " + message), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

struct ConfigEntry {
  std::string section;
  std::string key;
  std::string value;
  std::size_t line;
};

/// Raw section/key/value triples in file order.
inline std::vector<ConfigEntry> parse_ini(std::istream& in, const std::string& source) {
  std::vector<ConfigEntry> entries;
  std::set<std::string> seen;
  std::string section;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = csv::trim(raw);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(source, line_no, "unterminated section header");
      section = std::string(csv::trim(line.substr(1, line.size() - 2)));
      if (section.empty()) throw ConfigError(source, line_no, "empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(source, line_no, "expected 'key = value'");
    std::string key(csv::trim(line.substr(0, eq)));
    std::string_view value = line.substr(eq + 1);
    if (auto hash = value.find('#'); hash != std::string_view::npos) value = value.substr(0, hash);
    value = csv::trim(value);
    if (key.empty()) throw ConfigError(source, line_no, "missing key name");
    if (section.empty()) throw ConfigError(source, line_no, "key '" + key + "' outside of any section");
    if (!seen.insert(section + "." + key).second)
      throw ConfigError(source, line_no, "duplicate key '" + key + "' in [" + section + "]");
    entries.push_back({section, key, std::string(value), line_no});
  }
  return entries;
}

enum class Scenario { fig2_gaussian, fig2_optimal, fig3_orthogonal, fig4_design, alpha_scan, green_kernel, units };

struct ScenarioInfo {
  Scenario id;
  const char* name;
  const char* title;
  const char* description;
  std::vector<std::string> keys;  ///< scenario-section keys besides "name"
};

inline const std::vector<ScenarioInfo>& scenario_registry() {
  static const std::vector<ScenarioInfo> registry{
      {Scenario::fig2_gaussian, "fig2-gaussian", "Gaussian input",
       "Gaussian control, input shaped like the control", {"control_center"}},
      {Scenario::fig2_optimal, "fig2-optimal", "optimal input",
       "Gaussian control, optimal input mode N Ω* exp(f_s ε)", {"control_center"}},
      {Scenario::fig3_orthogonal, "fig3-orthogonal", "orthogonal modes",
       "Gram-Schmidt modes orthogonal to the optimal mode",
       {"control_center", "family_size", "basis", "basis_center", "basis_width"}},
      {Scenario::fig4_design, "fig4-design", "control design",
       "designed control for a Hermite-Gaussian target",
       {"target_order", "target_center", "target_width", "q", "theta"}},
      {Scenario::alpha_scan, "alpha-scan", "coupling scan",
       "W_out of the optimal mode versus alpha",
       {"control_center", "alpha_start", "alpha_stop", "alpha_step", "model"}},
      {Scenario::green_kernel, "green-kernel", "Schmidt analysis",
       "Schmidt decomposition of the input-mode to converted-channel kernel",
       {"control_center", "basis_size", "model"}},
      {Scenario::units, "units", "laboratory units",
       "rates, lifetimes and quality factors in laboratory units", {"unit_time", "lambda_s", "lambda_c"}},
  };
  return registry;
}

inline const ScenarioInfo& scenario_info(Scenario id) {
  for (const auto& info : scenario_registry())
    if (info.id == id) return info;
  throw InvalidArgument("unknown scenario id");
}

inline std::optional<Scenario> find_scenario(const std::string& name) {
  for (const auto& info : scenario_registry())
    if (name == info.name) return info.id;
  return std::nullopt;
}

struct GridSettings {
  double t_start = 0.0;
  double t_end = 10.0;
  std::size_t samples = 10001;
};

struct ExperimentConfig {
  Scenario scenario = Scenario::fig2_optimal;
  CavityParams cavity{};
  GridSettings grid{};

  double control_center = 3.0;
  // fig3-orthogonal
  std::size_t family_size = 2;
  std::string basis = "polynomial";  // polynomial | hermite
  std::optional<double> basis_center;
  double basis_width = 1.0;
  // fig4-design
  int target_order = 0;
  double target_center = 3.0;
  double target_width = 1.0;
  double q = 1e-7;
  double theta = 0.0;
  // alpha-scan
  double alpha_start = 0.5;
  double alpha_stop = 10.0;
  double alpha_step = 0.25;
  Model model = Model::full;
  // green-kernel
  std::size_t basis_size = 8;
  // units
  double unit_time = 100e-12;
  double lambda_s = 1550e-9;
  double lambda_c = 775e-9;

  std::optional<std::string> output_directory;
};

/// Defaults per scenario; fig4-design widens the window so the unit-width target
/// clears the clipping margin.
inline ExperimentConfig default_config(Scenario scenario) {
  ExperimentConfig c;
  c.scenario = scenario;
  if (scenario == Scenario::fig4_design) c.grid = {-2.0, 10.0, 12001};
  return c;
}

namespace detail {

inline double to_number(const ConfigEntry& e, const std::string& source) {
  try {
    const double v = csv::parse_double(e.value);
    if (!std::isfinite(v)) throw InvalidArgument("not finite");
    return v;
  } catch (const InvalidArgument&) {
    throw ConfigError(source, e.line, "'" + e.key + "' expects a number, got '" + e.value + "'");
  }
}

inline std::size_t to_count(const ConfigEntry& e, const std::string& source) {
  const double v = to_number(e, source);
  if (v < 0 || v != std::floor(v) || v > 1e9)
    throw ConfigError(source, e.line, "'" + e.key + "' expects a non-negative integer, got '" + e.value + "'");
  return static_cast<std::size_t>(v);
}

}  // namespace detail

/// Parses and validates a configuration. Unknown sections and keys are errors.
inline ExperimentConfig parse_config(std::istream& in, const std::string& source = "<config>") {
  const std::vector<ConfigEntry> entries = parse_ini(in, source);

  const ConfigEntry* name_entry = nullptr;
  for (const auto& e : entries)
    if (e.section == "scenario" && e.key == "name") name_entry = &e;
  if (!name_entry) throw ConfigError(source, 0, "missing [scenario] name");
  const auto scenario = find_scenario(name_entry->value);
  if (!scenario) throw ConfigError(source, name_entry->line, "unknown scenario '" + name_entry->value + "'");

  ExperimentConfig c = default_config(*scenario);
  const ScenarioInfo& info = scenario_info(*scenario);
  const std::set<std::string> scenario_keys(info.keys.begin(), info.keys.end());
  std::size_t cavity_line = 0;
  std::size_t grid_line = 0;

  for (const auto& e : entries) {
    auto number = [&] { return detail::to_number(e, source); };
    auto count = [&] { return detail::to_count(e, source); };
    if (e.section == "cavity") {
      cavity_line = cavity_line ? cavity_line : e.line;
      if (e.key == "alpha") c.cavity.alpha = number();
      else if (e.key == "gamma_s") c.cavity.gamma_s = number();
      else if (e.key == "gamma_c") c.cavity.gamma_c = number();
      else if (e.key == "kappa_s") c.cavity.kappa_s = number();
      else if (e.key == "kappa_c") c.cavity.kappa_c = number();
      else throw ConfigError(source, e.line, "unknown key '" + e.key + "' in [cavity]");
    } else if (e.section == "grid") {
      grid_line = grid_line ? grid_line : e.line;
      if (e.key == "t_start") c.grid.t_start = number();
      else if (e.key == "t_end") c.grid.t_end = number();
      else if (e.key == "samples") c.grid.samples = count();
      else throw ConfigError(source, e.line, "unknown key '" + e.key + "' in [grid]");
    } else if (e.section == "output") {
      if (e.key == "directory") c.output_directory = e.value;
      else throw ConfigError(source, e.line, "unknown key '" + e.key + "' in [output]");
    } else if (e.section == "scenario") {
      if (e.key == "name") continue;
      if (!scenario_keys.count(e.key))
        throw ConfigError(source, e.line, "key '" + e.key + "' is not valid for scenario '" + info.name + "'");
      if (e.key == "control_center") c.control_center = number();
      else if (e.key == "family_size") c.family_size = count();
      else if (e.key == "basis") {
        if (e.value != "polynomial" && e.value != "hermite")
          throw ConfigError(source, e.line, "basis must be 'polynomial' or 'hermite'");
        c.basis = e.value;
      } else if (e.key == "basis_center") c.basis_center = number();
      else if (e.key == "basis_width") c.basis_width = number();
      else if (e.key == "target_order") c.target_order = static_cast<int>(count());
      else if (e.key == "target_center") c.target_center = number();
      else if (e.key == "target_width") c.target_width = number();
      else if (e.key == "q") c.q = number();
      else if (e.key == "theta") c.theta = number();
      else if (e.key == "alpha_start") c.alpha_start = number();
      else if (e.key == "alpha_stop") c.alpha_stop = number();
      else if (e.key == "alpha_step") c.alpha_step = number();
      else if (e.key == "model") {
        try {
          c.model = parse_model(e.value);
        } catch (const InvalidArgument& err) {
          throw ConfigError(source, e.line, err.what());
        }
      } else if (e.key == "basis_size") c.basis_size = count();
      else if (e.key == "unit_time") c.unit_time = number();
      else if (e.key == "lambda_s") c.lambda_s = number();
      else if (e.key == "lambda_c") c.lambda_c = number();
    } else {
      throw ConfigError(source, e.line, "unknown section [" + e.section + "]");
    }
  }

  try {
    c.cavity.validate();
  } catch (const InvalidArgument& err) {
    throw ConfigError(source, cavity_line, err.what());
  }
  if (!(c.grid.t_end > c.grid.t_start) || c.grid.samples < 2)
    throw ConfigError(source, grid_line, "grid needs t_end > t_start and at least 2 samples");
  if (c.family_size < 1) throw ConfigError(source, name_entry->line, "family_size must be at least 1");
  if (c.basis_size < 2) throw ConfigError(source, name_entry->line, "basis_size must be at least 2");
  if (!(c.alpha_step > 0.0) || !(c.alpha_stop > c.alpha_start))
    throw ConfigError(source, name_entry->line, "alpha scan needs alpha_step > 0 and alpha_stop > alpha_start");
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, 0, "cannot open configuration file");
  return parse_config(in, path);
}

/// Serializes a configuration in the format parse_config reads.
inline std::string format_config(const ExperimentConfig& c) {
  using csv::format_double;
  const ScenarioInfo& info = scenario_info(c.scenario);
  std::ostringstream out;
  out << "# " << info.title << ": " << info.description << "\n\n";
  out << "[cavity]\n"
      << "alpha = " << format_double(c.cavity.alpha) << "\n"
      << "gamma_s = " << format_double(c.cavity.gamma_s) << "\n"
      << "gamma_c = " << format_double(c.cavity.gamma_c) << "\n"
      << "kappa_s = " << format_double(c.cavity.kappa_s) << "\n"
      << "kappa_c = " << format_double(c.cavity.kappa_c) << "\n\n";
  out << "[grid]\n"
      << "t_start = " << format_double(c.grid.t_start) << "\n"
      << "t_end = " << format_double(c.grid.t_end) << "\n"
      << "samples = " << c.grid.samples << "\n\n";
  out << "[scenario]\nname = " << info.name << "\n";
  for (const auto& key : info.keys) {
    if (key == "control_center") out << "control_center = " << format_double(c.control_center) << "\n";
    else if (key == "family_size") out << "family_size = " << c.family_size << "\n";
    else if (key == "basis") out << "basis = " << c.basis << "\n";
    else if (key == "basis_center") {
      if (c.basis_center) out << "basis_center = " << format_double(*c.basis_center) << "\n";
    } else if (key == "basis_width") out << "basis_width = " << format_double(c.basis_width) << "\n";
    else if (key == "target_order") out << "target_order = " << c.target_order << "\n";
    else if (key == "target_center") out << "target_center = " << format_double(c.target_center) << "\n";
    else if (key == "target_width") out << "target_width = " << format_double(c.target_width) << "\n";
    else if (key == "q") out << "q = " << format_double(c.q) << "\n";
    else if (key == "theta") out << "theta = " << format_double(c.theta) << "\n";
    else if (key == "alpha_start") out << "alpha_start = " << format_double(c.alpha_start) << "\n";
    else if (key == "alpha_stop") out << "alpha_stop = " << format_double(c.alpha_stop) << "\n";
    else if (key == "alpha_step") out << "alpha_step = " << format_double(c.alpha_step) << "\n";
    else if (key == "model") out << "model = " << to_string(c.model) << "\n";
    else if (key == "basis_size") out << "basis_size = " << c.basis_size << "\n";
    else if (key == "unit_time") out << "unit_time = " << format_double(c.unit_time) << "\n";
    else if (key == "lambda_s") out << "lambda_s = " << format_double(c.lambda_s) << "\n";
    else if (key == "lambda_c") out << "lambda_c = " << format_double(c.lambda_c) << "\n";
  }
  return out.str();
}

}  // namespace dfc
