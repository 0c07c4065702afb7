#pragma once

// Control pulses, Hermite-Gaussian modes, the optimal input mode of a given
// control and Gram-Schmidt families orthogonal to it.

#include <cmath>
#include <numbers>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "dfcav/cavity.hpp"
#include "dfcav/csv.hpp"
#include "dfcav/error.hpp"
#include "dfcav/signal.hpp"

namespace dfc {

inline constexpr double kControlSigma = 0.70710678118654752440;  // e^{-(t-c)^2} = e^{-(t-c)^2/2σ²}
inline constexpr double kMarginWidths = 4.0;
inline constexpr int kMaxHermiteOrder = 20;

namespace detail {

inline void require_margin(const TimeGrid& grid, double center, double width, const char* what) {
  const double margin = kMarginWidths * width;
  if (center - margin < grid.t_start() || center + margin > grid.t_end())
    throw InvalidArgument(std::string(what) + " centered at " + std::to_string(center) +
                          " is clipped by the window [" + std::to_string(grid.t_start()) + ", " +
                          std::to_string(grid.t_end()) + "]; need " + std::to_string(margin) +
                          " of margin on each side");
}

}  // namespace detail

/// Unit-energy Gaussian control, (2/π)^{1/4} exp[−(t − center)²].
inline TemporalSignal gaussian_control(double center, const TimeGrid& grid) {
  detail::require_margin(grid, center, kControlSigma, "gaussian control");
  const double peak = std::pow(2.0 / std::numbers::pi, 0.25);
  return TemporalSignal::sample(grid, [&](double t) {
    const double x = t - center;
    return peak * std::exp(-x * x);
  });
}

/// Normalized Hermite-Gaussian HG_n((t − center)/width)/√width, physicists' H_n.
inline TemporalSignal hermite_gaussian(int n, double center, const TimeGrid& grid, double width = 1.0) {
  if (n < 0 || n > kMaxHermiteOrder)
    throw InvalidArgument("Hermite-Gaussian order " + std::to_string(n) + " unsupported (0.." +
                          std::to_string(kMaxHermiteOrder) + ")");
  if (!(width > 0.0)) throw InvalidArgument("Hermite-Gaussian width must be positive");
  detail::require_margin(grid, center, width, "Hermite-Gaussian");

  // 1/√(2^n n! √π), accumulated as a product to stay in range.
  double norm = 1.0 / std::sqrt(std::sqrt(std::numbers::pi) * width);
  for (int k = 1; k <= n; ++k) norm /= std::sqrt(2.0 * k);

  return TemporalSignal::sample(grid, [&](double t) {
    const double x = (t - center) / width;
    double h_prev = 1.0;
    double h = n == 0 ? 1.0 : 2.0 * x;
    for (int k = 1; k < n; ++k) {
      const double h_next = 2.0 * x * h - 2.0 * k * h_prev;
      h_prev = h;
      h = h_next;
    }
    return norm * h * std::exp(-0.5 * x * x);
  });
}

/// N Ω*(t) exp[f_s ε(t)], N = √(2f_s/(e^{2f_s} − 1)). Orthogonal inputs to this
/// mode leave C(∞) = 0 in the bad-cavity, no-leak limit.
inline TemporalSignal optimal_input_mode(const CavityParams& params, const TemporalSignal& control) {
  const double f_s = params.derived().f_s;
  // log N, kept finite for large f_s where e^{2f_s} overflows
  double log_weight = 0.0;
  if (f_s > 0.0) {
    const double x = 2.0 * f_s;
    const double log_expm1 = x > 1.0 ? x + std::log1p(-std::exp(-x)) : std::log(std::expm1(x));
    log_weight = 0.5 * (std::log(x) - log_expm1);
  }
  const TemporalSignal eps = cumulative_integral(control);
  std::vector<Complex> out(control.size());
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = std::conj(control[k]) * std::exp(log_weight + f_s * eps[k].real());
  return TemporalSignal(control.grid(), std::move(out));
}

inline constexpr double kOrthonormalTolerance = 1e-9;
inline constexpr double kDegenerateNorm = 1e-8;

/// Ordered orthonormal set of modes on one grid.
class ModeFamily {
 public:
  explicit ModeFamily(std::vector<TemporalSignal> modes) : modes_(std::move(modes)) {
    if (modes_.empty()) throw InvalidArgument("mode family must not be empty");
    for (std::size_t i = 0; i < modes_.size(); ++i) {
      require_same_grid(modes_[0], modes_[i]);
      for (std::size_t j = 0; j <= i; ++j) {
        const Complex overlap = inner_product(modes_[i], modes_[j]);
        const double expected = i == j ? 1.0 : 0.0;
        if (std::abs(overlap - expected) >= kOrthonormalTolerance)
          throw InvalidArgument("mode family is not orthonormal: <" + std::to_string(i) + "," +
                                std::to_string(j) + "> = " + std::to_string(std::abs(overlap)));
      }
    }
  }

  const TimeGrid& grid() const noexcept { return modes_.front().grid(); }
  std::size_t size() const noexcept { return modes_.size(); }
  const TemporalSignal& operator[](std::size_t i) const { return modes_[i]; }
  const std::vector<TemporalSignal>& modes() const noexcept { return modes_; }

  /// Σ_k coefficients[k] · mode_k.
  template <class Coefficients>
  TemporalSignal combine(const Coefficients& coefficients) const {
    std::vector<Complex> out(grid().size());
    for (std::size_t i = 0; i < modes_.size(); ++i) {
      const Complex c = coefficients[i];
      auto v = modes_[i].values();
      for (std::size_t k = 0; k < out.size(); ++k) out[k] += c * v[k];
    }
    return TemporalSignal(grid(), std::move(out));
  }

 private:
  std::vector<TemporalSignal> modes_;
};

/// Mode 0 is the seed; modes 1..count orthonormalize raw_basis[0..count) in order
/// against every earlier mode (modified Gram-Schmidt, applied twice).
inline ModeFamily gram_schmidt_family(const TemporalSignal& seed, const std::vector<TemporalSignal>& raw_basis,
                                      std::size_t count) {
  if (std::abs(energy(seed) - 1.0) >= kOrthonormalTolerance)
    throw InvalidArgument("Gram-Schmidt seed must be unit-norm");
  if (raw_basis.size() < count)
    throw InvalidArgument("raw basis has " + std::to_string(raw_basis.size()) + " vectors, need " +
                          std::to_string(count));
  std::vector<TemporalSignal> modes{seed};
  modes.reserve(count + 1);
  for (std::size_t i = 0; i < count; ++i) {
    require_same_grid(seed, raw_basis[i]);
    const double raw_norm = std::sqrt(energy(raw_basis[i]));
    if (!(raw_norm > 0.0)) throw DegenerateBasis(i, 0.0);
    std::vector<Complex> v(raw_basis[i].values().begin(), raw_basis[i].values().end());
    for (auto& x : v) x /= raw_norm;
    TemporalSignal current(seed.grid(), v);
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& m : modes) {
        const Complex overlap = inner_product(m, current);
        current = current - overlap * m;
      }
    }
    const double residual = std::sqrt(energy(current));
    if (residual < kDegenerateNorm) throw DegenerateBasis(i, residual);
    modes.push_back(Complex(1.0 / residual) * current);
  }
  return ModeFamily(std::move(modes));
}

/// Raw vectors (t − center)^k · seed for k = 1..count: the seed's moment sequence.
/// Orthonormalizing them against the seed gives smooth modes with k nodes.
inline std::vector<TemporalSignal> polynomial_seed_basis(const TemporalSignal& seed, double center,
                                                         std::size_t count) {
  std::vector<TemporalSignal> raw;
  raw.reserve(count);
  for (std::size_t k = 1; k <= count; ++k) {
    raw.push_back(seed.map_with_time(
        [&](double t, Complex v) { return std::pow(t - center, static_cast<double>(k)) * v; }));
  }
  return raw;
}

/// HG_0..HG_{count-1} about center, as a family.
inline ModeFamily hermite_gaussian_family(std::size_t count, double center, const TimeGrid& grid,
                                          double width = 1.0) {
  std::vector<TemporalSignal> modes;
  for (std::size_t n = 0; n < count; ++n) modes.push_back(hermite_gaussian(static_cast<int>(n), center, grid, width));
  return ModeFamily(std::move(modes));
}

/// CSV: t, then mode<i>_re, mode<i>_im per mode.
inline void write_csv(std::ostream& out, const ModeFamily& family) {
  out << 't';
  for (std::size_t i = 0; i < family.size(); ++i) out << ",mode" << i << "_re,mode" << i << "_im";
  out << '\n';
  for (std::size_t k = 0; k < family.grid().size(); ++k) {
    out << csv::format_double(family.grid().time(k));
    for (std::size_t i = 0; i < family.size(); ++i)
      out << ',' << csv::format_double(family[i][k].real()) << ',' << csv::format_double(family[i][k].imag());
    out << '\n';
  }
}

}  // namespace dfc
