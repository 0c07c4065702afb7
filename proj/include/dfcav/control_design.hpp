#pragma once

// Inverse problem: the control that stores a chosen target mode.
//
// Requiring S_out = 0 in the bad-cavity model gives the impedance-matching
// condition ∂_tK/(2K) + K = ∂_t S_in / S_in for the coupling K = f_s|Ω|², solved by
//   K(t) = f_s |S_in(t)|² / (q + 2 f_s ∫_{t0}^{t} |S_in|²),
//   Ω_opt(t) = e^{iθ} e^{−i arg S_in(t)} √(K(t)/f_s).
// q = |S_in(t0)|²/|Ω(t0)|² is a small regularizer fixing the control before onset.

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "dfcav/cavity.hpp"
#include "dfcav/error.hpp"
#include "dfcav/signal.hpp"

namespace dfc {

/// Relative amplitude below which the phase of the target is treated as 0.
inline constexpr double kPhaseFloor = 1e-12;
/// Relative amplitude defining the well-supported region of impedance checks.
inline constexpr double kSupportFraction = 0.05;

struct DesignInputs {
  TemporalSignal target;  ///< target input mode, unit norm
  double f_s;
  double q = 1e-7;
  double theta = 0.0;
  double t0;  ///< start of the coupling integral

  DesignInputs(TemporalSignal target_mode, double f_s_value, double q_value = 1e-7, double theta_value = 0.0)
      : target(std::move(target_mode)), f_s(f_s_value), q(q_value), theta(theta_value),
        t0(target.grid().t_start()) {}
};

namespace detail {

inline void validate(const DesignInputs& in) {
  if (!(in.q > 0.0) || !std::isfinite(in.q)) throw InvalidArgument("design regularization q must be positive");
  if (!(in.f_s > 0.0) || !std::isfinite(in.f_s)) throw InvalidArgument("design requires f_s > 0");
  if (!std::isfinite(in.theta)) throw InvalidArgument("design phase theta must be finite");
  const TimeGrid& grid = in.target.grid();
  if (in.t0 > grid.t_start()) {
    const double floor = kPhaseFloor * in.target.max_abs();
    const std::size_t start = grid.index_at_or_after(in.t0);
    for (std::size_t k = 0; k < start; ++k)
      if (std::abs(in.target[k]) > floor)
        throw InvalidArgument("target is not negligible before the design start time t0");
  }
}

}  // namespace detail

/// q + 2 f_s ∫_{t0}^{t} |S_in|² (samples before t0 hold q).
inline std::vector<double> coupling_denominator(const DesignInputs& in) {
  detail::validate(in);
  const TimeGrid& grid = in.target.grid();
  const std::size_t start = grid.index_at_or_after(in.t0);
  std::vector<double> den(grid.size(), in.q);
  const double half_dt = 0.5 * grid.dt();
  double running = 0.0;
  for (std::size_t k = start + 1; k < grid.size(); ++k) {
    running += half_dt * (std::norm(in.target[k - 1]) + std::norm(in.target[k]));
    den[k] = in.q + 2.0 * in.f_s * running;
  }
  return den;
}

/// Optimal coupling K(t), real and non-negative.
inline TemporalSignal design_coupling(const DesignInputs& in) {
  const std::vector<double> den = coupling_denominator(in);
  const std::size_t start = in.target.grid().index_at_or_after(in.t0);
  std::vector<Complex> k_values(den.size());
  for (std::size_t k = start; k < den.size(); ++k) k_values[k] = in.f_s * std::norm(in.target[k]) / den[k];
  return TemporalSignal(in.target.grid(), std::move(k_values));
}

/// Control field that impedance-matches the target. Not renormalized: its energy
/// grows like log(1/q).
inline TemporalSignal design_control(const DesignInputs& in) {
  const std::vector<double> den = coupling_denominator(in);
  const std::size_t start = in.target.grid().index_at_or_after(in.t0);
  const double floor = kPhaseFloor * in.target.max_abs();
  const Complex global = std::polar(1.0, in.theta);
  std::vector<Complex> omega(den.size());
  for (std::size_t k = start; k < den.size(); ++k) {
    const Complex s = in.target[k];
    const double magnitude = std::abs(s);
    const Complex phase = magnitude > floor ? std::conj(s) / magnitude : Complex(1.0);
    omega[k] = global * phase * std::sqrt(magnitude * magnitude / den[k]);
  }
  return TemporalSignal(in.target.grid(), std::move(omega));
}

/// max |∂_tK/(2K) + K − ∂_t|s|/|s|| with K = f_s|control|², over interior samples
/// where |s_in| > 5% of its peak. Central differences; +inf if K vanishes there.
inline double impedance_residual(const TemporalSignal& control, const TemporalSignal& s_in,
                                 const CavityParams& params) {
  require_same_grid(control, s_in);
  const double f_s = params.derived().f_s;
  const double threshold = kSupportFraction * s_in.max_abs();
  const std::size_t n = control.size();
  const double two_dt = 2.0 * control.grid().dt();
  double worst = 0.0;
  bool supported = false;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double amp = std::abs(s_in[k]);
    if (!(amp > threshold)) continue;
    supported = true;
    const double coupling = f_s * std::norm(control[k]);
    if (!(coupling > 0.0)) return std::numeric_limits<double>::infinity();
    const double d_coupling = f_s * (std::norm(control[k + 1]) - std::norm(control[k - 1])) / two_dt;
    const double d_amp = (std::abs(s_in[k + 1]) - std::abs(s_in[k - 1])) / two_dt;
    const double r = std::abs(d_coupling / (2.0 * coupling) + coupling - d_amp / amp);
    worst = std::max(worst, r);
  }
  if (!supported) throw InvalidArgument("impedance residual: target has no well-supported region");
  return worst;
}

struct DesignReport {
  double q;
  double theta;
  double f_s;
  double residual;
  double control_norm;  ///< ∫|Ω_opt|² dt
};

inline DesignReport design_report(const DesignInputs& in, const TemporalSignal& control, const CavityParams& params) {
  return {in.q, in.theta, in.f_s, impedance_residual(control, in.target, params), energy(control)};
}

}  // namespace dfc
