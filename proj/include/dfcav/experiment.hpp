#pragma once

// Scenario runner behind the command-line tool: builds the inputs of a
// configured experiment, runs it, writes CSV artifacts and returns the JSON
// summary record.

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dfcav/analysis.hpp"
#include "dfcav/cavity.hpp"
#include "dfcav/config.hpp"
#include "dfcav/control_design.hpp"
#include "dfcav/modes.hpp"
#include "dfcav/signal.hpp"

namespace dfc {

using Json = nlohmann::ordered_json;

inline constexpr int kSummaryFormatVersion = 1;

namespace detail {

inline Json complex_json(Complex z) { return Json::array({z.real(), z.imag()}); }

inline Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

/// Writes text to dir/name, creating dir if needed.
inline void write_file(const std::filesystem::path& dir, const std::string& name, const std::string& text) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / name, std::ios::binary);
  if (!out) throw Error("cannot write " + (dir / name).string());
  out << text;
}

template <class T>
std::string to_csv(const T& value) {
  std::ostringstream out;
  write_csv(out, value);
  return out.str();
}

inline Json params_json(const ExperimentConfig& c) {
  const DerivedRates r = c.cavity.derived();
  return Json{{"cavity",
               {{"alpha", c.cavity.alpha},
                {"gamma_s", c.cavity.gamma_s},
                {"gamma_c", c.cavity.gamma_c},
                {"kappa_s", c.cavity.kappa_s},
                {"kappa_c", c.cavity.kappa_c}}},
              {"derived",
               {{"gamma_tilde_s", r.gamma_tilde_s},
                {"gamma_tilde_c", r.gamma_tilde_c},
                {"f_s", r.f_s},
                {"g_s", r.g_s}}},
              {"grid", {{"t_start", c.grid.t_start}, {"t_end", c.grid.t_end}, {"samples", c.grid.samples}}}};
}

/// Largest-magnitude real part of −iC, keeping its sign (the plotted quantity).
inline double extreme_minus_i_converted(const CavityTrajectory& traj) {
  double best = 0.0;
  for (std::size_t k = 0; k < traj.converted.size(); ++k) {
    const double v = (Complex(0.0, -1.0) * traj.converted[k]).real();
    if (std::abs(v) > std::abs(best)) best = v;
  }
  return best;
}

inline Json trajectory_json(const CavityTrajectory& traj) {
  const UnconvertedEnergy w = unconverted_energy(traj);
  const Complex minus_i(0.0, -1.0);
  const std::size_t peak = traj.converted.argmax_abs();
  Json j{{"w_out", w.value},
         {"w_out_tail_fraction", w.tail_fraction},
         {"w_out_plateaued", w.plateaued},
         {"input_energy", energy(traj.signal_in)},
         {"max_abs_signal", traj.signal.max_abs()},
         {"max_abs_converted", traj.converted.max_abs()},
         {"minus_i_converted_at_peak", complex_json(minus_i * traj.converted[peak])},
         {"minus_i_converted_extreme_real", extreme_minus_i_converted(traj)},
         {"minus_i_converted_final", complex_json(minus_i * traj.converted.back())},
         {"final_converted_energy", std::norm(traj.converted.back())}};
  if (energy(traj.signal_in) > 0.0) j["conservation_residual"] = conservation_residual(traj);
  return j;
}

inline std::vector<double> alpha_values(const ExperimentConfig& c) {
  const auto n = static_cast<std::size_t>(std::floor((c.alpha_stop - c.alpha_start) / c.alpha_step + 1e-9)) + 1;
  std::vector<double> alphas(n);
  for (std::size_t k = 0; k < n; ++k) alphas[k] = c.alpha_start + static_cast<double>(k) * c.alpha_step;
  return alphas;
}

inline ModeFamily optimal_family(const CavityParams& params, const TemporalSignal& control, double center,
                                 std::size_t extra_modes) {
  const TemporalSignal seed = normalize(optimal_input_mode(params, control));
  return gram_schmidt_family(seed, polynomial_seed_basis(seed, center, extra_modes), extra_modes);
}

}  // namespace detail

inline TimeGrid make_grid(const ExperimentConfig& c) { return TimeGrid(c.grid.t_start, c.grid.t_end, c.grid.samples); }

/// Runs one configured scenario, writing artifacts into out_dir (summary.json
/// included). Returns the summary record.
inline Json run_scenario(const ExperimentConfig& c, const std::filesystem::path& out_dir) {
  using detail::to_csv;
  using detail::write_file;
  const ScenarioInfo& info = scenario_info(c.scenario);
  const TimeGrid grid = make_grid(c);
  const CavityParams& params = c.cavity;

  Json summary{{"scenario", info.name}, {"title", info.title}, {"parameters", detail::params_json(c)}};
  Json results = Json::object();

  switch (c.scenario) {
    case Scenario::fig2_gaussian:
    case Scenario::fig2_optimal: {
      const TemporalSignal control = gaussian_control(c.control_center, grid);
      const TemporalSignal input =
          c.scenario == Scenario::fig2_gaussian ? control : optimal_input_mode(params, control);
      const CavityTrajectory traj = simulate_full(params, control, input);
      write_file(out_dir, "input.csv", to_csv(input));
      write_file(out_dir, "trajectory.csv", to_csv(traj));
      results = detail::trajectory_json(traj);
      results["reduced_w_out"] = unconverted_energy(simulate_reduced(params, control, input)).value;
      results["analytic_final_converted_energy"] = std::norm(analytic_conversion(params, control, input).final_amplitude);
      break;
    }
    case Scenario::fig3_orthogonal: {
      const TemporalSignal control = gaussian_control(c.control_center, grid);
      const TemporalSignal seed = normalize(optimal_input_mode(params, control));
      const double center = c.basis_center.value_or(c.control_center);
      std::vector<TemporalSignal> raw;
      if (c.basis == "hermite") {
        for (std::size_t n = 1; n <= c.family_size; ++n)
          raw.push_back(hermite_gaussian(static_cast<int>(n), center, grid, c.basis_width));
      } else {
        raw = polynomial_seed_basis(seed, center, c.family_size);
      }
      const ModeFamily family = gram_schmidt_family(seed, raw, c.family_size);
      write_file(out_dir, "modes.csv", to_csv(family));
      Json modes = Json::array();
      for (std::size_t i = 1; i < family.size(); ++i) {
        const CavityTrajectory traj = simulate_full(params, control, family[i]);
        write_file(out_dir, "trajectory_mode" + std::to_string(i) + ".csv", to_csv(traj));
        Json m{{"mode", i}};
        m.update(detail::trajectory_json(traj));
        m["analytic_final_abs"] = std::abs(analytic_conversion(params, control, family[i]).final_amplitude);
        modes.push_back(std::move(m));
      }
      results["raw_basis"] = c.basis;
      results["modes"] = std::move(modes);
      break;
    }
    case Scenario::fig4_design: {
      const TemporalSignal target = hermite_gaussian(c.target_order, c.target_center, grid, c.target_width);
      const DesignInputs inputs(target, params.derived().f_s, c.q, c.theta);
      const TemporalSignal control = design_control(inputs);
      const CavityTrajectory traj = simulate_full(params, control, target);
      const DesignReport report = design_report(inputs, control, params);
      write_file(out_dir, "target.csv", to_csv(target));
      write_file(out_dir, "control.csv", to_csv(control));
      write_file(out_dir, "trajectory.csv", to_csv(traj));
      results = detail::trajectory_json(traj);
      results["reduced_w_out"] = unconverted_energy(simulate_reduced(params, control, target)).value;
      results["design"] = Json{{"target_order", c.target_order},
                               {"q", report.q},
                               {"theta", report.theta},
                               {"f_s", report.f_s},
                               {"impedance_residual", detail::finite_or_null(report.residual)},
                               {"control_norm", report.control_norm}};
      break;
    }
    case Scenario::alpha_scan: {
      const TemporalSignal control = gaussian_control(c.control_center, grid);
      const AlphaScan scan = scan_alpha(detail::alpha_values(c), ScanTemplate{params, control, c.model});
      std::ostringstream csv_out;
      csv_out << "alpha,w_out,status\n";
      Json curve = Json::array();
      for (const auto& p : scan.points) {
        csv_out << csv::format_double(p.alpha) << ',' << (p.w_out ? csv::format_double(*p.w_out) : "") << ','
                << (p.w_out ? "ok" : "diverged") << '\n';
        curve.push_back(Json{{"alpha", p.alpha}, {"w_out", p.w_out ? Json(*p.w_out) : Json(nullptr)}});
      }
      write_file(out_dir, "alpha_scan.csv", csv_out.str());
      results["model"] = to_string(c.model);
      results["best_alpha"] = scan.best_alpha ? Json(*scan.best_alpha) : Json(nullptr);
      results["curve"] = std::move(curve);
      break;
    }
    case Scenario::green_kernel: {
      const TemporalSignal control = gaussian_control(c.control_center, grid);
      const ModeFamily basis = detail::optimal_family(params, control, c.control_center, c.basis_size - 1);
      const SchmidtReport report = green_kernel(params, control, basis, c.model);
      std::ostringstream csv_out;
      csv_out << "index,singular_value,efficiency,basis_conversion\n";
      for (std::size_t k = 0; k < report.singular_values.size(); ++k)
        csv_out << k << ',' << csv::format_double(report.singular_values[k]) << ','
                << csv::format_double(report.conversion_efficiencies[k]) << ','
                << csv::format_double(report.basis_conversion[k]) << '\n';
      write_file(out_dir, "singular_values.csv", csv_out.str());
      write_file(out_dir, "schmidt_modes.csv", to_csv(report.input_modes));
      results["model"] = to_string(c.model);
      results["basis_size"] = basis.size();
      results["singular_values"] = report.singular_values;
      results["conversion_efficiencies"] = report.conversion_efficiencies;
      results["basis_conversion"] = report.basis_conversion;
      results["schmidt_number"] = report.schmidt_number ? Json(*report.schmidt_number) : Json(nullptr);
      results["separability_ratio"] = report.separability_ratio();
      results["contrast"] = detail::finite_or_null(report.contrast());
      results["basis_contrast"] = detail::finite_or_null(report.basis_contrast());
      results["dominant_mode_fidelity"] = std::norm(inner_product(report.input_modes[0], basis[0]));
      break;
    }
    case Scenario::units: {
      const PhysicalUnitsReport r = physical_units(c.unit_time, c.lambda_s, c.lambda_c, params);
      results = Json{{"unit_time", r.unit_time},   {"lambda_s", c.lambda_s},     {"lambda_c", c.lambda_c},
                     {"omega_s", r.omega_s},       {"omega_c", r.omega_c},       {"rate_s", r.rate_s},
                     {"rate_c", r.rate_c},         {"lifetime_s", r.lifetime_s}, {"lifetime_c", r.lifetime_c},
                     {"q_s", r.q_s},               {"q_c", r.q_c}};
      break;
    }
  }

  summary["results"] = std::move(results);
  summary["metadata"] = Json{{"tool", "dfcav"}, {"format_version", kSummaryFormatVersion}};
  write_file(out_dir, "summary.json", summary.dump(2) + "\n");
  return summary;
}

/// One configuration per figure scenario, keyed by file name.
inline std::vector<std::pair<std::string, ExperimentConfig>> figure_configs() {
  std::vector<std::pair<std::string, ExperimentConfig>> out;
  out.emplace_back("fig2-gaussian.ini", default_config(Scenario::fig2_gaussian));
  out.emplace_back("fig2-optimal.ini", default_config(Scenario::fig2_optimal));
  out.emplace_back("fig3-orthogonal.ini", default_config(Scenario::fig3_orthogonal));
  ExperimentConfig hg0 = default_config(Scenario::fig4_design);
  out.emplace_back("fig4-design-hg0.ini", hg0);
  ExperimentConfig hg1 = hg0;
  hg1.target_order = 1;
  out.emplace_back("fig4-design-hg1.ini", hg1);
  out.emplace_back("alpha-scan.ini", default_config(Scenario::alpha_scan));
  ExperimentConfig scan_analytic = default_config(Scenario::alpha_scan);
  scan_analytic.model = Model::analytic;
  scan_analytic.cavity.gamma_c = 0.0;
  out.emplace_back("alpha-scan-analytic.ini", scan_analytic);
  out.emplace_back("green-kernel.ini", default_config(Scenario::green_kernel));
  ExperimentConfig kernel_analytic = default_config(Scenario::green_kernel);
  kernel_analytic.model = Model::analytic;
  out.emplace_back("green-kernel-analytic.ini", kernel_analytic);
  out.emplace_back("units.ini", default_config(Scenario::units));
  return out;
}

inline std::string list_scenarios() {
  std::ostringstream out;
  for (const auto& info : scenario_registry()) {
    const ExperimentConfig d = default_config(info.id);
    out << info.name << "  [" << info.title << "]  " << info.description << "\n";
    out << "    defaults: alpha=" << csv::format_double(d.cavity.alpha)
        << " gamma_s=" << csv::format_double(d.cavity.gamma_s) << " gamma_c=" << csv::format_double(d.cavity.gamma_c)
        << " grid=[" << csv::format_double(d.grid.t_start) << ", " << csv::format_double(d.grid.t_end) << "] x "
        << d.grid.samples;
    switch (info.id) {
      case Scenario::fig3_orthogonal: out << " family_size=" << d.family_size << " basis=" << d.basis; break;
      case Scenario::fig4_design:
        out << " target_order=" << d.target_order << " q=" << csv::format_double(d.q);
        break;
      case Scenario::alpha_scan:
        out << " alpha=" << csv::format_double(d.alpha_start) << ":" << csv::format_double(d.alpha_step) << ":"
            << csv::format_double(d.alpha_stop);
        break;
      case Scenario::green_kernel: out << " basis_size=" << d.basis_size << " model=" << to_string(d.model); break;
      case Scenario::units:
        out << " unit_time=" << csv::format_double(d.unit_time) << " lambda_s=" << csv::format_double(d.lambda_s)
            << " lambda_c=" << csv::format_double(d.lambda_c);
        break;
      default: break;
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace dfc
