#pragma once

// Coupled-mode dynamics of the dichroic-finesse SFG cavity.
//
//   dS/dt = i α Ω* C − γ̃_s S + √(2γ_s) S_in
//   dC/dt = i α Ω  S − γ̃_c C
//   S_out = −S_in + √(2γ_s) S,   C_out = √(2γ_c) C
//
// Three routes to C(t): the full two-mode system, the bad-cavity reduction
// (S eliminated adiabatically) and its closed-form solution with γ̃_c dropped.
// Fields are classical complex amplitudes; the equations are linear in them.

#include <array>
#include <cmath>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "dfcav/csv.hpp"
#include "dfcav/error.hpp"
#include "dfcav/signal.hpp"

namespace dfc {

struct DerivedRates {
  double gamma_tilde_s;
  double gamma_tilde_c;
  double f_s;  ///< α²/γ̃_s, effective conversion rate per unit control energy
  double g_s;  ///< α√(2γ_s/γ̃_s²), input-to-C coupling of the reduced model
};

struct CavityParams {
  double gamma_s = 10.1;  ///< unitary out-coupling, signal band
  double gamma_c = 0.01;  ///< unitary out-coupling, converted band
  double kappa_s = 0.0;   ///< internal loss, signal band
  double kappa_c = 0.0;   ///< internal loss, converted band
  double alpha = 5.5;     ///< nonlinear coupling (control energy absorbed)

  void validate() const {
    auto bad = [](double v) { return !std::isfinite(v) || v < 0.0; };
    if (bad(gamma_s) || bad(gamma_c) || bad(kappa_s) || bad(kappa_c) || bad(alpha))
      throw InvalidArgument("cavity rates and alpha must be finite and non-negative");
    if (!(gamma_s > 0.0)) throw InvalidArgument("gamma_s must be positive");
  }

  DerivedRates derived() const {
    const double gts = gamma_s + kappa_s;
    if (!(gts > 0.0)) throw InvalidArgument("gamma_s + kappa_s must be positive");
    return {gts, gamma_c + kappa_c, alpha * alpha / gts, alpha * std::sqrt(2.0 * gamma_s / (gts * gts))};
  }
};

inline DerivedRates derived_rates(const CavityParams& params) { return params.derived(); }

/// Intracavity amplitudes and output fields of one run. S = C = 0 at t_start.
struct CavityTrajectory {
  TemporalSignal signal;         ///< S(t)
  TemporalSignal converted;      ///< C(t)
  TemporalSignal signal_out;     ///< S_out(t)
  TemporalSignal converted_out;  ///< C_out(t)
  TemporalSignal signal_in;
  TemporalSignal control;

  const TimeGrid& grid() const noexcept { return signal.grid(); }
};

namespace detail {

template <std::size_t N>
using State = std::array<Complex, N>;

template <std::size_t N>
State<N> axpy(const State<N>& y, double h, const State<N>& k) {
  State<N> out;
  for (std::size_t i = 0; i < N; ++i) out[i] = y[i] + h * k[i];
  return out;
}

/// Drive values (control, input) seen by the right-hand side at one instant.
struct Drive {
  Complex control;
  Complex input;
};

/// Classic fixed-step RK4 on the grid of the drives. Drives at half steps are
/// the linear interpolation of neighbouring samples. Returns one state per sample.
template <std::size_t N, class Rhs>
std::vector<State<N>> integrate_rk4(const TemporalSignal& control, const TemporalSignal& input,
                                    const std::string& model, Rhs&& rhs) {
  const TimeGrid& grid = control.grid();
  const double dt = grid.dt();
  std::vector<State<N>> states(grid.size());
  states[0].fill(Complex{});
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    const Drive d0{control[k], input[k]};
    const Drive d1{control[k + 1], input[k + 1]};
    const Drive dh{0.5 * (d0.control + d1.control), 0.5 * (d0.input + d1.input)};
    const State<N>& y = states[k];
    const State<N> k1 = rhs(d0, y);
    const State<N> k2 = rhs(dh, axpy(y, 0.5 * dt, k1));
    const State<N> k3 = rhs(dh, axpy(y, 0.5 * dt, k2));
    const State<N> k4 = rhs(d1, axpy(y, dt, k3));
    State<N>& next = states[k + 1];
    for (std::size_t i = 0; i < N; ++i) {
      next[i] = y[i] + (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      if (!std::isfinite(next[i].real()) || !std::isfinite(next[i].imag()))
        throw Instability(model, k + 1, grid.time(k + 1));
    }
  }
  return states;
}

inline void require_common_grid(const TemporalSignal& control, const TemporalSignal& s_in) {
  if (!(control.grid() == s_in.grid()))
    throw GridMismatch("control and input signal must share a time grid");
}

inline CavityTrajectory assemble(const CavityParams& params, const TemporalSignal& control,
                                 const TemporalSignal& s_in, std::vector<Complex> s,
                                 std::vector<Complex> c) {
  const TimeGrid& grid = control.grid();
  const double root_s = std::sqrt(2.0 * params.gamma_s);
  const double root_c = std::sqrt(2.0 * params.gamma_c);
  std::vector<Complex> s_out(grid.size());
  std::vector<Complex> c_out(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    s_out[k] = -s_in[k] + root_s * s[k];
    c_out[k] = root_c * c[k];
  }
  return CavityTrajectory{TemporalSignal(grid, std::move(s)), TemporalSignal(grid, std::move(c)),
                          TemporalSignal(grid, std::move(s_out)),
                          TemporalSignal(grid, std::move(c_out)), s_in, control};
}

/// S from the adiabatic elimination: S = i(α/γ̃_s) Ω* C + √(2γ_s/γ̃_s²) S_in.
inline std::vector<Complex> adiabatic_signal(const CavityParams& params, const TemporalSignal& control,
                                             const TemporalSignal& s_in, const TemporalSignal& c) {
  const DerivedRates r = params.derived();
  const Complex i_ratio(0.0, params.alpha / r.gamma_tilde_s);
  const double feed = std::sqrt(2.0 * params.gamma_s) / r.gamma_tilde_s;
  std::vector<Complex> s(control.size());
  for (std::size_t k = 0; k < s.size(); ++k) s[k] = i_ratio * std::conj(control[k]) * c[k] + feed * s_in[k];
  return s;
}

}  // namespace detail

/// Integrates the full two-mode equations from an empty cavity.
inline CavityTrajectory simulate_full(const CavityParams& params, const TemporalSignal& control,
                                      const TemporalSignal& s_in) {
  params.validate();
  detail::require_common_grid(control, s_in);
  const DerivedRates r = params.derived();
  const Complex i_alpha(0.0, params.alpha);
  const double feed = std::sqrt(2.0 * params.gamma_s);

  auto states = detail::integrate_rk4<2>(
      control, s_in, "full-model", [&](const detail::Drive& d, const detail::State<2>& y) {
        return detail::State<2>{
            i_alpha * std::conj(d.control) * y[1] - r.gamma_tilde_s * y[0] + feed * d.input,
            i_alpha * d.control * y[0] - r.gamma_tilde_c * y[1]};
      });

  std::vector<Complex> s(states.size());
  std::vector<Complex> c(states.size());
  for (std::size_t k = 0; k < states.size(); ++k) {
    s[k] = states[k][0];
    c[k] = states[k][1];
  }
  return detail::assemble(params, control, s_in, std::move(s), std::move(c));
}

/// Bad-cavity model: RK4 on dC/dt = (−f_s|Ω|² − γ̃_c) C + i g_s Ω S_in, with S
/// reconstructed algebraically.
inline CavityTrajectory simulate_reduced(const CavityParams& params, const TemporalSignal& control,
                                         const TemporalSignal& s_in) {
  params.validate();
  detail::require_common_grid(control, s_in);
  const DerivedRates r = params.derived();
  const Complex i_g(0.0, r.g_s);

  auto states = detail::integrate_rk4<1>(
      control, s_in, "reduced-model", [&](const detail::Drive& d, const detail::State<1>& y) {
        return detail::State<1>{(-r.f_s * std::norm(d.control) - r.gamma_tilde_c) * y[0] +
                                i_g * d.control * d.input};
      });

  std::vector<Complex> c(states.size());
  for (std::size_t k = 0; k < states.size(); ++k) c[k] = states[k][0];
  TemporalSignal converted(control.grid(), c);
  auto s = detail::adiabatic_signal(params, control, s_in, converted);
  return detail::assemble(params, control, s_in, std::move(s), std::move(c));
}

struct AnalyticConversion {
  TemporalSignal converted;  ///< C(t)
  Complex final_amplitude;   ///< C(∞), taken at the last grid sample
};

/// Closed form of the reduced model without C damping:
///   C(t) = i g_s e^{−f_s ε(t)} ∫ e^{f_s ε(t')} Ω(t') S_in(t') dt',  ε = ∫|Ω|².
inline AnalyticConversion analytic_conversion(const CavityParams& params, const TemporalSignal& control,
                                              const TemporalSignal& s_in) {
  params.validate();
  detail::require_common_grid(control, s_in);
  const DerivedRates r = params.derived();
  const TemporalSignal eps = cumulative_integral(control);

  std::vector<Complex> integrand(control.size());
  for (std::size_t k = 0; k < integrand.size(); ++k)
    integrand[k] = std::exp(r.f_s * eps[k].real()) * control[k] * s_in[k];
  const TemporalSignal running = cumulative_integral(TemporalSignal(control.grid(), std::move(integrand)), Identity{});

  std::vector<Complex> c(control.size());
  const Complex i_g(0.0, r.g_s);
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = i_g * std::exp(-r.f_s * eps[k].real()) * running[k];
  TemporalSignal converted(control.grid(), std::move(c));
  const Complex final_amplitude = converted.back();
  return {std::move(converted), final_amplitude};
}

/// Trajectory built on the closed-form C(t): S from the adiabatic relation, outputs
/// from the input-output relations.
inline CavityTrajectory simulate_analytic(const CavityParams& params, const TemporalSignal& control,
                                          const TemporalSignal& s_in) {
  AnalyticConversion a = analytic_conversion(params, control, s_in);
  auto s = detail::adiabatic_signal(params, control, s_in, a.converted);
  std::vector<Complex> c(a.converted.values().begin(), a.converted.values().end());
  return detail::assemble(params, control, s_in, std::move(s), std::move(c));
}

enum class Model { full, reduced, analytic };

inline std::string to_string(Model m) {
  switch (m) {
    case Model::full: return "full";
    case Model::reduced: return "reduced";
    case Model::analytic: return "analytic";
  }
  return "unknown";
}

inline Model parse_model(const std::string& name) {
  if (name == "full") return Model::full;
  if (name == "reduced") return Model::reduced;
  if (name == "analytic") return Model::analytic;
  throw InvalidArgument("unknown model '" + name + "' (expected full, reduced or analytic)");
}

inline CavityTrajectory simulate(Model model, const CavityParams& params, const TemporalSignal& control,
                                 const TemporalSignal& s_in) {
  switch (model) {
    case Model::full: return simulate_full(params, control, s_in);
    case Model::reduced: return simulate_reduced(params, control, s_in);
    case Model::analytic: return simulate_analytic(params, control, s_in);
  }
  throw InvalidArgument("unknown model");
}

/// CSV columns: t, S_re, S_im, C_re, C_im, Sout_re, Sout_im, Cout_re, Cout_im, control_abs.
inline void write_csv(std::ostream& out, const CavityTrajectory& traj) {
  using csv::format_double;
  out << "t,S_re,S_im,C_re,C_im,Sout_re,Sout_im,Cout_re,Cout_im,control_abs\n";
  const TimeGrid& grid = traj.grid();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    out << format_double(grid.time(k)) << ',' << format_double(traj.signal[k].real()) << ','
        << format_double(traj.signal[k].imag()) << ',' << format_double(traj.converted[k].real()) << ','
        << format_double(traj.converted[k].imag()) << ',' << format_double(traj.signal_out[k].real())
        << ',' << format_double(traj.signal_out[k].imag()) << ','
        << format_double(traj.converted_out[k].real()) << ','
        << format_double(traj.converted_out[k].imag()) << ',' << format_double(std::abs(traj.control[k]))
        << '\n';
  }
}

}  // namespace dfc
