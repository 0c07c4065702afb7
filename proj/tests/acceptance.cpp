// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dfcav/analysis.hpp"
#include "dfcav/control_design.hpp"
#include "dfcav/modes.hpp"
#include "oracles.hpp"

using namespace dfc;

namespace {

const TimeGrid kGrid(0.0, 10.0, 10001);
const TimeGrid kWide(-2.0, 10.0, 12001);

CavityParams baseline() { return CavityParams{10.1, 0.01, 0.0, 0.0, 5.5}; }

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " FAILED(" << what << ")";
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double peak_minus_i_converted(const CavityTrajectory& traj) { return traj.converted.max_abs(); }

// most negative real part of −iC
double min_minus_i_converted(const CavityTrajectory& traj) {
  double lo = 0.0;
  for (std::size_t k = 0; k < traj.converted.size(); ++k) lo = std::min(lo, (Complex(0, -1) * traj.converted[k]).real());
  return lo;
}

ModeFamily orthogonal_family(const CavityParams& p, const TemporalSignal& control, std::size_t extra) {
  const auto seed = normalize(optimal_input_mode(p, control));
  return gram_schmidt_family(seed, polynomial_seed_basis(seed, 3.0, extra), extra);
}

double designed_w_out(int order, double q) {
  const auto target = hermite_gaussian(order, 3.0, kWide);
  const auto control = design_control(DesignInputs(target, baseline().derived().f_s, q));
  return unconverted_energy(simulate_full(baseline(), control, target)).value;
}

std::vector<double> alpha_grid() {
  std::vector<double> a;
  for (int k = 0; k <= 38; ++k) a.push_back(0.5 + 0.25 * k);
  return a;
}

void gaussian_input(Outcome& o) {
  const auto start = std::chrono::steady_clock::now();
  const auto control = gaussian_control(3.0, kGrid);
  const auto traj = simulate_full(baseline(), control, control);
  const double w = unconverted_energy(traj).value;
  const double s = traj.signal.max_abs();
  const double c = peak_minus_i_converted(traj);
  const double t = seconds_since(start);
  o.detail << "W_out=" << w << " max|S|=" << s << " max|-iC|=" << c << " t=" << t << "s";
  o.check(std::abs(w - 0.36) <= 0.04, "W_out");
  o.check(std::abs(s - 0.2) <= 0.05, "max|S|");
  o.check(std::abs(c - 0.8) <= 0.05, "max|-iC|");
  o.check(t < 1.0, "runtime");
}

void optimal_input(Outcome& o) {
  const auto start = std::chrono::steady_clock::now();
  const auto p = baseline();
  const auto control = gaussian_control(3.0, kGrid);
  const auto traj = simulate_full(p, control, optimal_input_mode(p, control));
  const double w = unconverted_energy(traj).value;
  const double c = peak_minus_i_converted(traj);
  const double t = seconds_since(start);
  o.detail << "W_out=" << w << " max|-iC|=" << c << " t=" << t << "s";
  o.check(std::abs(w - 0.016) <= 0.006, "W_out");
  o.check(c >= 0.97, "max|-iC|");
  o.check(t < 1.0, "runtime");
}

void orthogonal_modes(Outcome& o) {
  const auto p = baseline();
  const auto control = gaussian_control(3.0, kGrid);
  const auto family = orthogonal_family(p, control, 2);
  const auto t1 = simulate_full(p, control, family[1]);
  const auto t2 = simulate_full(p, control, family[2]);
  const double w1 = unconverted_energy(t1).value;
  const double w2 = unconverted_energy(t2).value;
  const double transient = min_minus_i_converted(t1);
  const double extreme = std::max(std::abs(transient), peak_minus_i_converted(t1));
  o.detail << "W_out(1)=" << w1 << " W_out(2)=" << w2 << " transient -iC(1)=" << transient
           << " final |C(1)|=" << std::abs(t1.converted.back());
  o.check(std::abs(w1 - 0.98) <= 0.01, "W_out mode 1");
  o.check(std::abs(w2 - 0.99) <= 0.01, "W_out mode 2");
  o.check(std::abs(extreme - 0.7) <= 0.1, "transient");
}

void designed_controls(Outcome& o) {
  const double w0 = designed_w_out(0, 1e-7);
  const double w1 = designed_w_out(1, 1e-7);
  o.detail << "W_out(HG0)=" << w0 << " W_out(HG1)=" << w1;
  o.check(w0 <= 0.010, "HG0");
  o.check(std::abs(w1 - 0.015) <= 0.008, "HG1");
}

void analytic_law(Outcome& o) {
  const auto control = gaussian_control(3.0, kGrid);
  double worst = 0.0;
  for (double f : {0.5, 1.0, 2.0, 2.995, 4.0}) {
    CavityParams p{10.1, 0.0, 0.0, 0.0, std::sqrt(f * 10.1)};
    const auto input = optimal_input_mode(p, control);
    for (Model m : {Model::reduced, Model::analytic}) {
      const double w = unconverted_energy(simulate(m, p, control, input)).value;
      worst = std::max(worst, std::abs(w - std::exp(-2.0 * f)));
    }
  }
  o.detail << "max |W_out - exp(-2 f_s)|=" << worst;
  o.check(worst < 1e-4, "analytic law");
}

void analytic_selectivity(Outcome& o) {
  CavityParams p = baseline();
  p.gamma_c = 0.0;
  const auto control = gaussian_control(3.0, kGrid);
  const auto family = orthogonal_family(p, control, 5);
  double worst = 0.0;
  for (std::size_t i = 1; i <= 5; ++i) worst = std::max(worst, std::abs(analytic_conversion(p, control, family[i]).final_amplitude));
  const double ratio = green_kernel(p, control, orthogonal_family(p, control, 7), Model::analytic).separability_ratio();
  o.detail << "max |C(inf)|=" << worst << " sigma2/sigma1=" << ratio;
  o.check(worst < 1e-7, "orthogonal modes");
  o.check(ratio < 1e-6, "rank one");
}

void full_selectivity(Outcome& o) {
  const auto p = baseline();
  const auto control = gaussian_control(3.0, kGrid);
  const auto rep = green_kernel(p, control, orthogonal_family(p, control, 7), Model::full);
  o.detail << "eta1=" << rep.conversion_efficiencies[0] << " eta2=" << rep.conversion_efficiencies[1]
           << " contrast=" << rep.contrast();
  o.check(rep.contrast() >= 40.0, "contrast");
}

void conservation_suite(Outcome& o) {
  const auto p = baseline();
  const auto control = gaussian_control(3.0, kGrid);
  std::mt19937_64 rng(2718);
  double balance = 0.0;
  for (int trial = 0; trial < 20; ++trial)
    balance = std::max(balance, conservation_residual(simulate_full(p, control, oracle::random_smooth_pulse(rng, kGrid, 2.0, 5.0))));

  double linear = 0.0;
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 3; ++trial) {
    const auto s1 = oracle::random_smooth_pulse(rng, kGrid, 2.0, 5.0);
    const auto s2 = oracle::random_smooth_pulse(rng, kGrid, 2.0, 5.0);
    const Complex a(u(rng), u(rng)), b(u(rng), u(rng));
    const auto y1 = simulate_full(p, control, s1);
    const auto y2 = simulate_full(p, control, s2);
    const auto y = simulate_full(p, control, a * s1 + b * s2);
    for (std::size_t k = 0; k < kGrid.size(); ++k) {
      linear = std::max(linear, std::abs(y.signal[k] - a * y1.signal[k] - b * y2.signal[k]));
      linear = std::max(linear, std::abs(y.converted[k] - a * y1.converted[k] - b * y2.converted[k]));
    }
  }

  auto w_out = [&](const TimeGrid& g) {
    const auto c = gaussian_control(3.0, g);
    return unconverted_energy(simulate_full(p, c, optimal_input_mode(p, c))).value;
  };
  const double halving = std::abs(w_out(kGrid) - w_out(kGrid.refined()));

  o.detail << "balance=" << balance << " linearity=" << linear << " dt-halving=" << halving;
  o.check(balance < 1e-5, "balance");
  o.check(linear < 1e-9, "linearity");
  o.check(halving < 1e-6, "dt halving");
}

void alpha_optimization(Outcome& o) {
  const auto control = gaussian_control(3.0, kGrid);
  const auto full = scan_alpha(alpha_grid(), ScanTemplate{baseline(), control, Model::full});
  CavityParams no_leak = baseline();
  no_leak.gamma_c = 0.0;
  const auto analytic = scan_alpha(alpha_grid(), ScanTemplate{no_leak, control, Model::analytic});

  bool rises_after_best = false;
  double best_w = 1.0;
  for (const auto& pt : full.points) {
    if (!pt.w_out) continue;
    best_w = std::min(best_w, *pt.w_out);
    if (full.best_alpha && pt.alpha > *full.best_alpha && *pt.w_out > best_w + 1e-6) rises_after_best = true;
  }
  bool decreasing = true;
  for (std::size_t k = 1; k < analytic.points.size(); ++k) {
    const auto& a = analytic.points[k - 1].w_out;
    const auto& b = analytic.points[k].w_out;
    if (!a || !b || !(*b < *a)) decreasing = false;
  }
  o.detail << "best alpha=" << (full.best_alpha ? *full.best_alpha : NAN) << " min W_out=" << best_w
           << " W_out(10)=" << full.points.back().w_out.value_or(NAN);
  o.check(full.best_alpha && std::abs(*full.best_alpha - 5.5) <= 0.5, "best alpha");
  o.check(rises_after_best, "non-monotone");
  o.check(decreasing, "analytic strictly decreasing");
}

void physical(Outcome& o) {
  const auto r = physical_units(100e-12, 1550e-9, 775e-9, baseline());
  o.detail << "Q_s=" << r.q_s << " Q_c=" << r.q_c << " rate_s=" << r.rate_s << " rate_c=" << r.rate_c;
  o.check(std::abs(r.q_s - 6020) / 6020 <= 0.01, "Q_s");
  o.check(std::abs(r.q_c - 1.2e7) / 1.2e7 <= 0.02, "Q_c");
  o.check(std::abs(r.rate_s - 1.01e11) / 1.01e11 <= 0.01, "rate_s");
  o.check(std::abs(r.rate_c - 1.0e8) / 1.0e8 <= 0.01, "rate_c");
}

void design_consistency(Outcome& o) {
  const auto p = baseline();
  double residual = 0.0;
  double spread = 0.0;
  for (int order : {0, 1}) {
    const auto target = hermite_gaussian(order, 3.0, kWide);
    residual = std::max(residual, impedance_residual(design_control(DesignInputs(target, p.derived().f_s)), target, p));
    double lo = 1.0, hi = 0.0;
    for (double q : {1e-6, 1e-7, 1e-8}) {
      const double w = designed_w_out(order, q);
      lo = std::min(lo, w);
      hi = std::max(hi, w);
    }
    spread = std::max(spread, hi - lo);
  }
  o.detail << "impedance residual=" << residual << " q spread=" << spread;
  o.check(residual < 1e-3, "residual");
  o.check(spread <= 0.003, "q robustness");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"Gaussian control and Gaussian input", gaussian_input},
      {"optimal input mode", optimal_input},
      {"Gram-Schmidt orthogonal modes", orthogonal_modes},
      {"designed controls for HG0 and HG1", designed_controls},
      {"analytic law W_out = exp(-2 f_s)", analytic_law},
      {"analytic-model selectivity", analytic_selectivity},
      {"full-model selectivity contrast", full_selectivity},
      {"conservation, linearity, convergence", conservation_suite},
      {"alpha optimization", alpha_optimization},
      {"physical units", physical},
      {"design self-consistency", design_consistency},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " exception: " << e.what();
    }
    failures += o.pass ? 0 : 1;
    std::printf("%s %2zu  %-40s %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.str().c_str());
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
