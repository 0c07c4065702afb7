#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <sstream>

#include "dfcav/analysis.hpp"
#include "dfcav/modes.hpp"
#include "oracles.hpp"

using namespace dfc;

namespace {

const TimeGrid kGrid(0.0, 10.0, 10001);

CavityParams baseline_params() { return CavityParams{10.1, 0.01, 0.0, 0.0, 5.5}; }

ModeFamily polynomial_family(const CavityParams& p, const TemporalSignal& control, std::size_t count) {
  const auto seed = normalize(optimal_input_mode(p, control));
  return gram_schmidt_family(seed, polynomial_seed_basis(seed, 3.0, count), count);
}

}  // namespace

TEST_CASE("Gaussian control", "[modes]") {
  const auto g = gaussian_control(3.0, kGrid);
  CHECK(std::abs(g[3000].real() - 0.893244) < 1e-6);
  CHECK(g[3000].imag() == 0.0);
  CHECK(g.argmax_abs() == 3000);
  for (std::size_t d = 1; d < 2500; d += 97) REQUIRE(std::abs(g[3000 + d] - g[3000 - d]) < 1e-14);
  CHECK(std::abs(energy(g) - 1.0) < 1e-8);
  CHECK(std::abs(g[1234].real() - std::pow(2.0 / std::numbers::pi, 0.25) * std::exp(-1.766 * 1.766)) < 1e-14);

  CHECK_THROWS_AS(gaussian_control(1.0, kGrid), InvalidArgument);
  CHECK_THROWS_AS(gaussian_control(8.0, kGrid), InvalidArgument);
}

TEST_CASE("Hermite-Gaussian modes", "[modes]") {
  TimeGrid g(-10.0, 10.0, 8001);
  for (int m = 0; m <= 5; ++m)
    for (int n = 0; n <= m; ++n) {
      const Complex overlap = inner_product(hermite_gaussian(m, 0.0, g), hermite_gaussian(n, 0.0, g));
      CHECK(std::abs(overlap - (m == n ? 1.0 : 0.0)) < 1e-8);
    }

  const auto hg1 = hermite_gaussian(1, 0.0, g);
  CHECK(std::abs(hg1[4000]) < 1e-15);
  for (std::size_t d = 1; d < 4000; d += 131) REQUIRE(std::abs(hg1[4000 + d] + hg1[4000 - d]) < 1e-14);

  // HG_2 against its closed form (4x² − 2) / √(8√π) e^{−x²/2}
  const auto hg2 = hermite_gaussian(2, 0.0, g);
  const double x = g.time(4321);
  CHECK(std::abs(hg2[4321].real() - (4 * x * x - 2) / std::sqrt(8 * std::sqrt(std::numbers::pi)) *
                                        std::exp(-0.5 * x * x)) < 1e-14);

  // the width parameter rescales time and preserves the norm
  const auto narrow = hermite_gaussian(3, 0.0, g, 0.5);
  CHECK(std::abs(energy(narrow) - 1.0) < 1e-8);

  CHECK_THROWS_AS(hermite_gaussian(21, 0.0, g), InvalidArgument);
  CHECK_THROWS_AS(hermite_gaussian(-1, 0.0, g), InvalidArgument);
  CHECK_THROWS_AS(hermite_gaussian(0, 0.0, g, 0.0), InvalidArgument);
  CHECK_THROWS_AS(hermite_gaussian(0, 7.0, g), InvalidArgument);
}

TEST_CASE("optimal input mode", "[modes]") {
  const auto p = baseline_params();
  const double f_s = p.derived().f_s;
  const auto control = gaussian_control(3.0, kGrid);
  const auto mode = optimal_input_mode(p, control);

  SECTION("matches the closed form") {
    // ε by trapezoid carries an O(dt²) error that f_s amplifies
    for (std::size_t k = 0; k < kGrid.size(); k += 250)
      REQUIRE(std::abs(mode[k].real() - oracle::optimal_mode_closed_form(kGrid.time(k), 3.0, f_s)) < 1e-6);
  }
  SECTION("peak trails the control") {
    // brute-force maximum of the closed form on a fine scan
    double best_t = 0.0, best = 0.0;
    for (double t = 2.0; t <= 5.0; t += 1e-5) {
      const double v = oracle::optimal_mode_closed_form(t, 3.0, f_s);
      if (v > best) best = v, best_t = t;
    }
    CHECK(best_t > 3.0);
    CHECK(std::abs(kGrid.time(mode.argmax_abs()) - best_t) <= kGrid.dt());
  }
  SECTION("weak coupling recovers the control") {
    CavityParams weak = p;
    weak.alpha = 1e-5;
    const auto w = optimal_input_mode(weak, control);
    for (std::size_t k = 0; k < kGrid.size(); k += 500) REQUIRE(std::abs(w[k] - std::conj(control[k])) < 1e-9);
  }
  SECTION("phase of the control is conjugated") {
    const Complex phase = std::polar(1.0, 0.7);
    const auto rotated = optimal_input_mode(p, phase * control);
    for (std::size_t k = 0; k < kGrid.size(); k += 250)
      REQUIRE(std::abs(rotated[k] - std::conj(phase) * mode[k]) < 1e-14);
  }
}

TEST_CASE("Gram-Schmidt family", "[modes]") {
  const auto p = baseline_params();
  const auto control = gaussian_control(3.0, kGrid);
  const auto seed = normalize(optimal_input_mode(p, control));
  const auto raw = polynomial_seed_basis(seed, 3.0, 4);
  const auto family = gram_schmidt_family(seed, raw, 4);

  REQUIRE(family.size() == 5);
  for (std::size_t k = 0; k < kGrid.size(); ++k) REQUIRE(family[0][k] == seed[k]);
  for (std::size_t i = 0; i < family.size(); ++i)
    for (std::size_t j = 0; j < family.size(); ++j)
      CHECK(std::abs(inner_product(family[i], family[j]) - (i == j ? 1.0 : 0.0)) < 1e-9);

  // raw vectors lie in the span of the family
  for (const auto& r : raw) {
    std::vector<Complex> c;
    for (const auto& m : family.modes()) c.push_back(inner_product(m, r));
    const auto residual = r - family.combine(c);
    CHECK(std::sqrt(energy(residual) / energy(r)) < 1e-8);
  }

  SECTION("dependent raw vector names its index") {
    std::vector<TemporalSignal> bad{raw[0], raw[1], Complex(2.0) * raw[0]};
    try {
      gram_schmidt_family(seed, bad, 3);
      FAIL("expected a degenerate basis");
    } catch (const DegenerateBasis& e) {
      CHECK(e.index() == 2);
    }
  }
  SECTION("seed must be unit norm") {
    CHECK_THROWS_AS(gram_schmidt_family(Complex(2.0) * seed, raw, 1), InvalidArgument);
  }
  SECTION("raw basis must be long enough") {
    CHECK_THROWS_AS(gram_schmidt_family(seed, raw, 5), InvalidArgument);
  }
}

TEST_CASE("Gram-Schmidt output is orthonormal for random raw bases", "[modes][property]") {
  std::mt19937_64 rng(31337);
  TimeGrid g(0.0, 8.0, 1601);
  for (int trial = 0; trial < 8; ++trial) {
    const auto seed = normalize(oracle::random_smooth_pulse(rng, g, 2.5, 5.5));
    std::vector<TemporalSignal> raw;
    for (int i = 0; i < 4; ++i) raw.push_back(oracle::random_smooth_pulse(rng, g, 2.0, 6.0));
    try {
      const auto family = gram_schmidt_family(seed, raw, 4);
      for (std::size_t i = 0; i < family.size(); ++i)
        for (std::size_t j = 0; j < family.size(); ++j)
          REQUIRE(std::abs(inner_product(family[i], family[j]) - (i == j ? 1.0 : 0.0)) < 1e-9);
    } catch (const DegenerateBasis&) {
      // a random draw may repeat a bump; that is the documented outcome
    }
  }
}

TEST_CASE("orthogonal modes are reflected by the full model", "[modes]") {
  const auto p = baseline_params();
  const auto control = gaussian_control(3.0, kGrid);
  const auto family = polynomial_family(p, control, 2);
  const double w1 = unconverted_energy(simulate_full(p, control, family[1])).value;
  const double w2 = unconverted_energy(simulate_full(p, control, family[2])).value;
  CHECK(w1 >= 0.97);
  CHECK(w2 >= 0.97);
  CHECK(std::abs(w1 - 0.98237) < 1e-4);
  CHECK(std::abs(w2 - 0.99362) < 1e-4);
}

TEST_CASE("analytic model stores nothing from orthogonal modes", "[modes]") {
  CavityParams p = baseline_params();
  p.gamma_c = 0.0;
  const auto control = gaussian_control(3.0, kGrid);
  const auto family = polynomial_family(p, control, 6);
  for (std::size_t i = 1; i < family.size(); ++i)
    CHECK(std::abs(analytic_conversion(p, control, family[i]).final_amplitude) < 1e-7);
}

TEST_CASE("mode family validation and CSV", "[modes][io]") {
  TimeGrid g(-6.0, 6.0, 1201);
  const auto family = hermite_gaussian_family(3, 0.0, g);
  CHECK(family.size() == 3);
  CHECK_THROWS_AS(ModeFamily({family[0], family[0]}), InvalidArgument);
  CHECK_THROWS_AS(ModeFamily({}), InvalidArgument);

  std::ostringstream out;
  write_csv(out, family);
  std::istringstream in(out.str());
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,mode0_re,mode0_im,mode1_re,mode1_im,mode2_re,mode2_im");
}
