#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "wpk/errors.hpp"
#include "wpk/grid.hpp"
#include "wpk/observables.hpp"
#include "wpk/wavefunction.hpp"

using Catch::Approx;
using Catch::Matchers::WithinAbs;

namespace {

// small 4-axis state with reproducible pseudo-random amplitudes
wpk::WaveFunction random_state_4d(std::size_t n, double step, std::uint64_t seed) {
  wpk::GridSpec g;
  for (int i = 0; i < 4; ++i) g.axes.push_back(wpk::centered_axis(n, step));
  auto psi = wpk::make_zero_state(g);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto& a : psi.amplitudes) a = {u(rng), u(rng)};
  wpk::normalize(psi);
  return psi;
}

}  // namespace

TEST_CASE("nuclear marginal against a brute-force reduction", "[observables]") {
  const std::size_t n = 4;
  const double step = 0.3;
  const auto psi = random_state_4d(n, step, 99);

  const auto marginal = wpk::nuclear_marginal(psi);
  REQUIRE(marginal.grid.rank() == 2);
  REQUIRE(marginal.grid.axes[0] == psi.grid.axes[0]);
  REQUIRE(marginal.p.size() == n * n);

  // integrate the electron axes by explicit nested loops
  const double dv_rest = step * step;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t l = 0; l < n; ++l) {
          acc += std::norm(psi.amplitudes[((i * n + j) * n + k) * n + l]);
        }
      }
      REQUIRE_THAT(marginal.p[i * n + j], WithinAbs(acc * dv_rest, 1e-13));
    }
  }

  // the marginal of a unit state integrates to one
  double total = 0.0;
  for (double p : marginal.p) total += p;
  REQUIRE(total * step * step == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("marginal needs at least two axes", "[observables]") {
  wpk::GridSpec g{{wpk::centered_axis(4, 0.5)}, {}};
  auto psi = wpk::make_zero_state(g);
  psi.amplitudes[0] = 1.0;
  REQUIRE_THROWS_AS(wpk::nuclear_marginal(psi), wpk::ConfigError);
}

TEST_CASE("bond length statistics on hand-built densities", "[observables]") {
  wpk::GridSpec g{{wpk::AxisSpec{2, 0.1, 0.3}, wpk::AxisSpec{2, 0.1, 0.4}}, {}};
  // coordinates: x in {0.3, 0.4}, y in {0.4, 0.5}
  const double dv = 0.01;

  SECTION("all mass on one point") {
    wpk::MarginalDensity m{g, {1.0 / dv, 0.0, 0.0, 0.0}};
    const auto s = wpk::bond_length_stats(m);
    const double r = std::hypot(0.3, 0.4);
    REQUIRE(s.mean == Approx(r).epsilon(1e-14));
    REQUIRE_THAT(s.std_dev, WithinAbs(0.0, 1e-9));
    REQUIRE(s.mode == Approx(r).epsilon(1e-14));
  }

  SECTION("two-point mixture") {
    // 3/4 on (0.3, 0.4), 1/4 on (0.4, 0.5)
    wpk::MarginalDensity m{g, {75.0, 0.0, 0.0, 25.0}};
    const double r1 = std::hypot(0.3, 0.4), r2 = std::hypot(0.4, 0.5);
    const auto s = wpk::bond_length_stats(m);
    const double mean = 0.75 * r1 + 0.25 * r2;
    REQUIRE(s.mean == Approx(mean).epsilon(1e-13));
    const double var = 0.75 * r1 * r1 + 0.25 * r2 * r2 - mean * mean;
    REQUIRE(s.std_dev == Approx(std::sqrt(var)).epsilon(1e-12));
    REQUIRE(s.mode == Approx(r1).epsilon(1e-14));
  }

  SECTION("mode tie breaks toward the shorter bond") {
    wpk::MarginalDensity m{g, {50.0, 0.0, 0.0, 50.0}};
    const auto s = wpk::bond_length_stats(m);
    REQUIRE(s.mode == Approx(std::hypot(0.3, 0.4)).epsilon(1e-14));
  }
}

TEST_CASE("conditional slice pins axes and reports its weight", "[observables]") {
  const std::size_t n = 4;
  const double step = 0.3;
  const auto psi = random_state_4d(n, step, 7);
  const auto xs = wpk::coordinates(psi.grid.axes[2]);

  const std::size_t k0 = 1, l0 = 2;
  const auto slice = wpk::conditional_slice(psi, {{2, xs[k0]}, {3, xs[l0]}});
  REQUIRE(slice.grid.rank() == 2);
  REQUIRE(slice.values.size() == n * n);

  double expected_weight = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double expected = std::norm(psi.amplitudes[((i * n + j) * n + k0) * n + l0]);
      REQUIRE_THAT(slice.values[i * n + j], WithinAbs(expected, 1e-14));
      expected_weight += expected;
    }
  }
  REQUIRE(slice.weight == Approx(expected_weight * step * step).epsilon(1e-12));
}

TEST_CASE("slice coordinate snapping and rejection", "[observables]") {
  const auto psi = random_state_4d(4, 0.3, 8);
  const auto xs = wpk::coordinates(psi.grid.axes[2]);

  // within 1e-6 of the spacing the coordinate snaps to the grid point
  REQUIRE_NOTHROW(wpk::conditional_slice(psi, {{2, xs[1] + 1e-8}, {3, xs[0]}}));

  // off-grid coordinates name the neighbours in the complaint
  try {
    wpk::conditional_slice(psi, {{2, xs[1] + 0.5 * 0.3}, {3, xs[0]}});
    FAIL("expected a config error");
  } catch (const wpk::ConfigError& e) {
    const std::string msg = e.what();
    REQUIRE(msg.find("nearest grid points") != std::string::npos);
  }

  REQUIRE_THROWS_AS(wpk::conditional_slice(psi, {}), wpk::ConfigError);
  REQUIRE_THROWS_AS(
      wpk::conditional_slice(psi, {{0, xs[0]}, {1, xs[0]}, {2, xs[0]}, {3, xs[0]}}),
      wpk::ConfigError);
  REQUIRE_THROWS_AS(wpk::conditional_slice(psi, {{2, xs[0]}, {2, xs[1]}}), wpk::ConfigError);
  REQUIRE_THROWS_AS(wpk::conditional_slice(psi, {{9, xs[0]}}), wpk::ConfigError);
}

TEST_CASE("slice of a product state factorizes the fixed axes out", "[observables]") {
  // gaussian product state: the slice shape along the free axes must not
  // depend on where the fixed axes are pinned
  wpk::GridSpec g;
  for (int i = 0; i < 3; ++i) g.axes.push_back(wpk::centered_axis(5, 0.4));
  const auto psi = wpk::gaussian_initial(g, 0.8);
  const auto xs = wpk::coordinates(g.axes[2]);
  const auto s1 = wpk::conditional_slice(psi, {{2, xs[1]}});
  const auto s2 = wpk::conditional_slice(psi, {{2, xs[3]}});
  const double ratio = s1.values[7] / s2.values[7];
  for (std::size_t i = 0; i < s1.values.size(); ++i) {
    REQUIRE(s1.values[i] == Approx(ratio * s2.values[i]).epsilon(1e-10));
  }
}
