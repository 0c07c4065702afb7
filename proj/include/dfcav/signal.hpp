#pragma once

// Uniform time grids, sampled complex envelopes and trapezoidal quadrature.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dfcav/csv.hpp"
#include "dfcav/error.hpp"

namespace dfc {

using Complex = std::complex<double>;

/// Uniform discretization of [t_start, t_end] with n_samples points.
class TimeGrid {
 public:
  TimeGrid(double t_start, double t_end, std::size_t n_samples)
      : t_start_(t_start), t_end_(t_end), n_samples_(n_samples) {
    if (!std::isfinite(t_start) || !std::isfinite(t_end) || !(t_end > t_start))
      throw InvalidArgument("time grid requires finite t_end > t_start");
    if (n_samples < 2) throw InvalidArgument("time grid requires at least 2 samples");
    dt_ = (t_end - t_start) / static_cast<double>(n_samples - 1);
  }

  double t_start() const noexcept { return t_start_; }
  double t_end() const noexcept { return t_end_; }
  double dt() const noexcept { return dt_; }
  std::size_t size() const noexcept { return n_samples_; }
  double duration() const noexcept { return t_end_ - t_start_; }

  double time(std::size_t k) const noexcept {
    return k + 1 == n_samples_ ? t_end_ : t_start_ + static_cast<double>(k) * dt_;
  }

  std::vector<double> times() const {
    std::vector<double> out(n_samples_);
    for (std::size_t k = 0; k < n_samples_; ++k) out[k] = time(k);
    return out;
  }

  /// Trapezoid weights: dt everywhere, dt/2 at both ends.
  std::vector<double> trapezoid_weights() const {
    std::vector<double> w(n_samples_, dt_);
    w.front() = w.back() = 0.5 * dt_;
    return w;
  }

  /// Same window, half the spacing.
  TimeGrid refined() const { return TimeGrid(t_start_, t_end_, 2 * n_samples_ - 1); }

  /// Index of the first sample with time >= t (clamped to the grid).
  std::size_t index_at_or_after(double t) const {
    if (t <= t_start_) return 0;
    if (t >= t_end_) return n_samples_ - 1;
    auto k = static_cast<std::size_t>(std::ceil((t - t_start_) / dt_ - 1e-9));
    return k < n_samples_ ? k : n_samples_ - 1;
  }

  bool operator==(const TimeGrid& other) const noexcept {
    return t_start_ == other.t_start_ && t_end_ == other.t_end_ &&
           n_samples_ == other.n_samples_;
  }

 private:
  double t_start_;
  double t_end_;
  std::size_t n_samples_;
  double dt_;
};

/// Complex amplitude sampled once per grid point. Immutable; all values finite.
class TemporalSignal {
 public:
  TemporalSignal(TimeGrid grid, std::vector<Complex> values)
      : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.size())
      throw InvalidArgument("signal has " + std::to_string(values_.size()) +
                            " values for a grid of " + std::to_string(grid_.size()));
    for (std::size_t k = 0; k < values_.size(); ++k) {
      if (!std::isfinite(values_[k].real()) || !std::isfinite(values_[k].imag()))
        throw InvalidArgument("signal value at sample " + std::to_string(k) + " is not finite");
    }
  }

  static TemporalSignal zeros(const TimeGrid& grid) {
    return TemporalSignal(grid, std::vector<Complex>(grid.size()));
  }

  /// Samples f(t) at every grid time.
  template <class F>
  static TemporalSignal sample(const TimeGrid& grid, F&& f) {
    std::vector<Complex> values(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) values[k] = Complex(f(grid.time(k)));
    return TemporalSignal(grid, std::move(values));
  }

  const TimeGrid& grid() const noexcept { return grid_; }
  std::span<const Complex> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  Complex operator[](std::size_t k) const { return values_[k]; }
  Complex front() const { return values_.front(); }
  Complex back() const { return values_.back(); }

  /// Applies f(value) sample by sample.
  template <class F>
  TemporalSignal map(F&& f) const {
    std::vector<Complex> out(values_.size());
    for (std::size_t k = 0; k < values_.size(); ++k) out[k] = Complex(f(values_[k]));
    return TemporalSignal(grid_, std::move(out));
  }

  /// Applies f(t, value) sample by sample.
  template <class F>
  TemporalSignal map_with_time(F&& f) const {
    std::vector<Complex> out(values_.size());
    for (std::size_t k = 0; k < values_.size(); ++k) out[k] = Complex(f(grid_.time(k), values_[k]));
    return TemporalSignal(grid_, std::move(out));
  }

  TemporalSignal conj() const {
    return map([](Complex v) { return std::conj(v); });
  }

  double max_abs() const {
    double m = 0.0;
    for (auto v : values_) m = std::max(m, std::abs(v));
    return m;
  }

  std::size_t argmax_abs() const {
    std::size_t best = 0;
    for (std::size_t k = 1; k < values_.size(); ++k)
      if (std::abs(values_[k]) > std::abs(values_[best])) best = k;
    return best;
  }

  friend TemporalSignal operator*(Complex scale, const TemporalSignal& s) {
    return s.map([scale](Complex v) { return scale * v; });
  }
  friend TemporalSignal operator*(const TemporalSignal& s, Complex scale) { return scale * s; }

  friend TemporalSignal operator+(const TemporalSignal& a, const TemporalSignal& b) {
    return combine(a, b, [](Complex x, Complex y) { return x + y; });
  }
  friend TemporalSignal operator-(const TemporalSignal& a, const TemporalSignal& b) {
    return combine(a, b, [](Complex x, Complex y) { return x - y; });
  }

  /// Pointwise product a(t)·b(t).
  friend TemporalSignal pointwise_product(const TemporalSignal& a, const TemporalSignal& b) {
    return combine(a, b, [](Complex x, Complex y) { return x * y; });
  }

 private:
  template <class Op>
  static TemporalSignal combine(const TemporalSignal& a, const TemporalSignal& b, Op op) {
    if (!(a.grid_ == b.grid_)) throw GridMismatch();
    std::vector<Complex> out(a.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = op(a.values_[k], b.values_[k]);
    return TemporalSignal(a.grid_, std::move(out));
  }

  TimeGrid grid_;
  std::vector<Complex> values_;
};

inline void require_same_grid(const TemporalSignal& a, const TemporalSignal& b) {
  if (!(a.grid() == b.grid())) throw GridMismatch();
}

/// Composite trapezoid of the samples themselves.
inline Complex integrate(const TemporalSignal& f) {
  auto v = f.values();
  Complex sum = 0.5 * (v.front() + v.back());
  for (std::size_t k = 1; k + 1 < v.size(); ++k) sum += v[k];
  return sum * f.grid().dt();
}

/// ∫ conj(a) b dt on the common grid.
inline Complex inner_product(const TemporalSignal& a, const TemporalSignal& b) {
  require_same_grid(a, b);
  auto x = a.values();
  auto y = b.values();
  const std::size_t n = x.size();
  Complex sum = 0.5 * (std::conj(x[0]) * y[0] + std::conj(x[n - 1]) * y[n - 1]);
  for (std::size_t k = 1; k + 1 < n; ++k) sum += std::conj(x[k]) * y[k];
  return sum * a.grid().dt();
}

/// ∫ |f|² dt.
inline double energy(const TemporalSignal& f) { return inner_product(f, f).real(); }

struct SquaredMagnitude {
  Complex operator()(Complex v) const { return std::norm(v); }
};

struct Identity {
  Complex operator()(Complex v) const { return v; }
};

/// Running trapezoid of map(f): out[0] = 0, out[k] = ∫_{t_start}^{t_k} map(f) dt.
template <class Map = SquaredMagnitude>
TemporalSignal cumulative_integral(const TemporalSignal& f, Map integrand_map = {}) {
  const double half_dt = 0.5 * f.grid().dt();
  auto v = f.values();
  std::vector<Complex> out(v.size());
  Complex previous = integrand_map(v[0]);
  for (std::size_t k = 1; k < v.size(); ++k) {
    Complex current = integrand_map(v[k]);
    out[k] = out[k - 1] + half_dt * (previous + current);
    previous = current;
  }
  return TemporalSignal(f.grid(), std::move(out));
}

/// Rescales f by a positive real factor to unit L² norm.
inline TemporalSignal normalize(const TemporalSignal& f) {
  const double norm = std::sqrt(energy(f));
  if (!(norm > 0.0) || !std::isfinite(norm))
    throw DegenerateSignal("cannot normalize a signal with zero norm");
  return Complex(1.0 / norm) * f;
}

// CSV: header "t,re,im", one row per sample.

inline void write_csv(std::ostream& out, const TemporalSignal& f) {
  out << "t,re,im\n";
  for (std::size_t k = 0; k < f.size(); ++k) {
    out << csv::format_double(f.grid().time(k)) << ',' << csv::format_double(f[k].real()) << ','
        << csv::format_double(f[k].imag()) << '\n';
  }
}

/// Reads the CSV written by write_csv; the time column must be uniform.
inline TemporalSignal read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || csv::trim(line) != "t,re,im")
    throw InvalidArgument("signal CSV must start with header 't,re,im'");
  std::vector<double> times;
  std::vector<Complex> values;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (csv::trim(line).empty()) continue;
    auto fields = csv::split(line);
    if (fields.size() != 3)
      throw InvalidArgument("signal CSV line " + std::to_string(line_no) + ": expected 3 columns");
    try {
      times.push_back(csv::parse_double(fields[0]));
      values.emplace_back(csv::parse_double(fields[1]), csv::parse_double(fields[2]));
    } catch (const InvalidArgument& e) {
      throw InvalidArgument("signal CSV line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (times.size() < 2) throw InvalidArgument("signal CSV needs at least 2 rows");
  TimeGrid grid(times.front(), times.back(), times.size());
  const double tolerance = 1e-9 * grid.duration();
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (std::abs(times[k] - grid.time(k)) > tolerance)
      throw InvalidArgument("signal CSV time column is not uniform at row " + std::to_string(k + 1));
  }
  return TemporalSignal(grid, std::move(values));
}

}  // namespace dfc
