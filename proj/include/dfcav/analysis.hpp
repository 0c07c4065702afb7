#pragma once

// Diagnostics on trajectories: unconverted energy, photon balance, the
// input-mode → converted-channel kernel and its Schmidt decomposition, the
// coupling-strength scan and conversion to laboratory units.

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dfcav/cavity.hpp"
#include "dfcav/error.hpp"
#include "dfcav/modes.hpp"
#include "dfcav/signal.hpp"

namespace dfc {

struct UnconvertedEnergy {
  double value;          ///< W_out = ∫|S_out|² dt
  double tail_fraction;  ///< share of W_out collected in the last 10% of the window
  bool plateaued;        ///< tail_fraction < 1e-3
};

inline constexpr double kPlateauTail = 0.1;
inline constexpr double kPlateauThreshold = 1e-3;

inline UnconvertedEnergy unconverted_energy(const CavityTrajectory& traj) {
  const TemporalSignal running = cumulative_integral(traj.signal_out);
  const double total = running.back().real();
  const TimeGrid& grid = traj.grid();
  const std::size_t tail_start = grid.index_at_or_after(grid.t_end() - kPlateauTail * grid.duration());
  const double tail = total - running[tail_start].real();
  const double fraction = total > 0.0 ? tail / total : 0.0;
  return {total, fraction, fraction < kPlateauThreshold};
}

/// |E_in − (|S(T)|² + |C(T)|² + ∫|S_out|² + ∫|C_out|²)| / E_in. Zero for a
/// lossless cavity up to discretization error.
inline double conservation_residual(const CavityTrajectory& traj) {
  const double input = energy(traj.signal_in);
  if (!(input > 0.0)) throw DegenerateSignal("conservation residual undefined for zero input energy");
  const double stored = std::norm(traj.signal.back()) + std::norm(traj.converted.back());
  const double emitted = energy(traj.signal_out) + energy(traj.converted_out);
  return std::abs(input - stored - emitted) / input;
}

struct SchmidtReport {
  std::vector<double> singular_values;          ///< descending, padded with zeros to the basis size
  ModeFamily input_modes;                       ///< right singular vectors as signals
  std::vector<double> conversion_efficiencies;  ///< σ_k²
  std::optional<double> schmidt_number;         ///< empty when the kernel vanishes
  std::vector<double> basis_conversion;         ///< converted energy of each unit basis input
  Eigen::MatrixXcd response;                    ///< columns: converted-channel response per basis mode

  /// σ₁²/σ₂² (infinite for a rank-1 kernel).
  double contrast() const {
    if (conversion_efficiencies.size() < 2 || conversion_efficiencies[1] <= 0.0)
      return std::numeric_limits<double>::infinity();
    return conversion_efficiencies[0] / conversion_efficiencies[1];
  }

  /// Conversion of basis mode 0 over the largest conversion among the others.
  double basis_contrast() const {
    double worst = 0.0;
    for (std::size_t k = 1; k < basis_conversion.size(); ++k) worst = std::max(worst, basis_conversion[k]);
    return worst > 0.0 ? basis_conversion[0] / worst : std::numeric_limits<double>::infinity();
  }

  double separability_ratio() const {
    if (singular_values.size() < 2 || singular_values[0] <= 0.0) return 0.0;
    return singular_values[1] / singular_values[0];
  }
};

namespace detail {

/// Converted-channel response: [C(T), √w_j C_out(t_j)...] so that its squared norm
/// is the total converted energy. The analytic model has no C leakage.
inline Eigen::VectorXcd converted_response(Model model, const CavityParams& params, const TemporalSignal& control,
                                           const TemporalSignal& input) {
  if (model == Model::analytic) {
    Eigen::VectorXcd y(1);
    y(0) = analytic_conversion(params, control, input).final_amplitude;
    return y;
  }
  const CavityTrajectory traj = simulate(model, params, control, input);
  const std::vector<double> w = traj.grid().trapezoid_weights();
  Eigen::VectorXcd y(1 + static_cast<Eigen::Index>(w.size()));
  y(0) = traj.converted.back();
  for (std::size_t j = 0; j < w.size(); ++j) y(1 + static_cast<Eigen::Index>(j)) = std::sqrt(w[j]) * traj.converted_out[j];
  return y;
}

}  // namespace detail

/// Runs the model once per basis mode and decomposes the linear map from input
/// coefficients to the converted channel.
inline SchmidtReport green_kernel(const CavityParams& params, const TemporalSignal& control, const ModeFamily& basis,
                                  Model model) {
  if (basis.size() < 2) throw InvalidArgument("green kernel needs a basis of at least 2 modes");
  require_same_grid(control, basis[0]);

  const auto n = static_cast<Eigen::Index>(basis.size());
  std::vector<Eigen::VectorXcd> columns;
  columns.reserve(basis.size());
  for (const auto& mode : basis.modes()) columns.push_back(detail::converted_response(model, params, control, mode));

  Eigen::MatrixXcd response(columns.front().size(), n);
  std::vector<double> basis_conversion;
  for (Eigen::Index k = 0; k < n; ++k) {
    response.col(k) = columns[static_cast<std::size_t>(k)];
    basis_conversion.push_back(columns[static_cast<std::size_t>(k)].squaredNorm());
  }

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(response, Eigen::ComputeThinU | Eigen::ComputeFullV);
  const Eigen::VectorXd& sigma = svd.singularValues();
  std::vector<double> singular(basis.size(), 0.0);
  for (Eigen::Index k = 0; k < sigma.size(); ++k) singular[static_cast<std::size_t>(k)] = sigma(k);

  std::vector<TemporalSignal> modes;
  const Eigen::MatrixXcd& v = svd.matrixV();
  for (Eigen::Index k = 0; k < n; ++k) {
    std::vector<Complex> coefficients(basis.size());
    for (Eigen::Index i = 0; i < n; ++i) coefficients[static_cast<std::size_t>(i)] = v(i, k);
    modes.push_back(basis.combine(coefficients));
  }

  std::vector<double> efficiencies;
  double s2 = 0.0;
  double s4 = 0.0;
  for (double s : singular) {
    efficiencies.push_back(s * s);
    s2 += s * s;
    s4 += s * s * s * s;
  }
  std::optional<double> schmidt;
  if (s4 > 0.0) schmidt = s2 * s2 / s4;

  return SchmidtReport{std::move(singular), ModeFamily(std::move(modes)), std::move(efficiencies), schmidt,
                       std::move(basis_conversion), std::move(response)};
}

struct AlphaPoint {
  double alpha;
  std::optional<double> w_out;  ///< empty if the run diverged
  std::string error;
};

struct AlphaScan {
  std::vector<AlphaPoint> points;
  std::optional<double> best_alpha;
};

/// Everything held fixed while α varies. The input is the optimal mode of each α.
struct ScanTemplate {
  CavityParams params;
  TemporalSignal control;
  Model model = Model::full;
};

inline AlphaScan scan_alpha(const std::vector<double>& alpha_grid, const ScanTemplate& tmpl) {
  if (alpha_grid.size() < 3) throw InvalidArgument("alpha scan needs at least 3 points");
  for (std::size_t i = 1; i < alpha_grid.size(); ++i)
    if (!(alpha_grid[i] > alpha_grid[i - 1])) throw InvalidArgument("alpha grid must be strictly ascending");

  AlphaScan scan;
  for (double alpha : alpha_grid) {
    CavityParams p = tmpl.params;
    p.alpha = alpha;
    AlphaPoint point{alpha, std::nullopt, {}};
    try {
      const TemporalSignal input = optimal_input_mode(p, tmpl.control);
      point.w_out = unconverted_energy(simulate(tmpl.model, p, tmpl.control, input)).value;
    } catch (const Instability& e) {
      point.error = e.what();
    }
    scan.points.push_back(std::move(point));
  }
  double best_w = std::numeric_limits<double>::infinity();
  for (const auto& point : scan.points) {
    if (point.w_out && *point.w_out < best_w) {
      best_w = *point.w_out;
      scan.best_alpha = point.alpha;
    }
  }
  return scan;
}

inline constexpr double kSpeedOfLight = 299792458.0;

struct PhysicalUnitsReport {
  double unit_time;   ///< s per dimensionless time unit
  double omega_s;     ///< rad/s
  double omega_c;
  double rate_s;      ///< 1/s
  double rate_c;
  double lifetime_s;  ///< s
  double lifetime_c;
  double q_s;
  double q_c;
};

inline PhysicalUnitsReport physical_units(double unit_time, double lambda_s, double lambda_c,
                                          const CavityParams& params) {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(unit_time) || !positive(lambda_s) || !positive(lambda_c))
    throw InvalidArgument("unit time and wavelengths must be positive");
  if (!positive(params.gamma_s) || !positive(params.gamma_c))
    throw InvalidArgument("quality factors need positive gamma_s and gamma_c");
  PhysicalUnitsReport r{};
  r.unit_time = unit_time;
  r.omega_s = 2.0 * std::numbers::pi * kSpeedOfLight / lambda_s;
  r.omega_c = 2.0 * std::numbers::pi * kSpeedOfLight / lambda_c;
  r.rate_s = params.gamma_s / unit_time;
  r.rate_c = params.gamma_c / unit_time;
  r.lifetime_s = 1.0 / r.rate_s;
  r.lifetime_c = 1.0 / r.rate_c;
  r.q_s = r.omega_s / (2.0 * r.rate_s);
  r.q_c = r.omega_c / (2.0 * r.rate_c);
  return r;
}

}  // namespace dfc
