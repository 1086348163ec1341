#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "wpk/analysis.hpp"
#include "wpk/errors.hpp"
#include "wpk/grid.hpp"

using Catch::Approx;
using Catch::Matchers::WithinAbs;

TEST_CASE("separation ladder is inclusive on both ends", "[analysis]") {
  const auto rs = wpk::scan_separations(0.25, 0.60, 0.05);
  REQUIRE(rs.size() == 8);
  REQUIRE(rs.front() == Approx(0.25));
  REQUIRE(rs.back() == Approx(0.60));
  for (std::size_t i = 1; i < rs.size(); ++i) {
    REQUIRE(rs[i] - rs[i - 1] == Approx(0.05).epsilon(1e-9));
  }
  REQUIRE_THROWS_AS(wpk::scan_separations(0.6, 0.25, 0.05), wpk::ConfigError);
  REQUIRE_THROWS_AS(wpk::scan_separations(0.25, 0.6, 0.0), wpk::ConfigError);
}

TEST_CASE("equilibrium picks the lowest total energy", "[analysis]") {
  wpk::PesScan scan;
  scan.points = {{0.3, -1.0, 2.33}, {0.4, -1.2, 1.30}, {0.5, -1.1, 0.90}, {0.6, -0.9, 0.77}};
  scan.completed = true;
  wpk::pick_equilibrium(scan);
  REQUIRE(scan.equilibrium == Approx(0.6));
  scan.points[1].e_total = 0.5;
  wpk::pick_equilibrium(scan);
  REQUIRE(scan.equilibrium == Approx(0.4));
}

TEST_CASE("chain mode frequencies", "[analysis]") {
  // omega(n) = 2 sqrt(k/m) sin(n pi / N); N = 4 gives sqrt2, 2, sqrt2
  const auto w = wpk::chain_frequencies(4, 1.0, 1.0);
  REQUIRE(w.size() == 3);
  REQUIRE(w[0] == Approx(std::sqrt(2.0)).epsilon(1e-14));
  REQUIRE(w[1] == Approx(2.0).epsilon(1e-14));
  REQUIRE(w[2] == Approx(std::sqrt(2.0)).epsilon(1e-14));

  // mass and spring constant enter through sqrt(k/m)
  const auto w2 = wpk::chain_frequencies(4, 4.0, 1.0);
  REQUIRE(w2[1] == Approx(1.0).epsilon(1e-14));

  REQUIRE_THROWS_AS(wpk::chain_frequencies(1, 1.0, 1.0), wpk::ConfigError);
  REQUIRE_THROWS_AS(wpk::chain_frequencies(4, -1.0, 1.0), wpk::ConfigError);
}

TEST_CASE("zero-point widths", "[analysis]") {
  REQUIRE(wpk::zero_point_sigma(1.0, 2.0) == Approx(0.5).epsilon(1e-14));
  REQUIRE(wpk::zero_point_sigma(2.0, 1.0) == Approx(0.5).epsilon(1e-14));
  REQUIRE_THROWS_AS(wpk::zero_point_sigma(0.0, 1.0), wpk::ConfigError);

  // the closed-form large-N expression approaches the exact first-mode width
  for (std::size_t n : {50u, 100u, 1000u}) {
    const double w1 = wpk::chain_frequencies(n, 1.0, 1.0)[0];
    const double exact = wpk::zero_point_sigma(1.0, w1);
    const double approx = wpk::zero_point_sigma_approx_first_mode(n, 1.0, 1.0);
    REQUIRE(exact / approx == Approx(1.0).margin(2e-2 / static_cast<double>(n) * 50.0));
  }
  // spot value: N = 100, m = k = 1
  const double w1 = 2.0 * std::sin(std::numbers::pi / 100.0);
  REQUIRE(wpk::zero_point_sigma(1.0, w1) ==
          Approx(std::sqrt(1.0 / (2.0 * w1))).epsilon(1e-14));
  REQUIRE(wpk::zero_point_sigma_approx_first_mode(100, 1.0, 1.0) ==
          Approx(std::sqrt(100.0 / (4.0 * std::numbers::pi))).epsilon(1e-14));
}

TEST_CASE("chain table rows and the sqrt growth law", "[analysis]") {
  const std::vector<std::size_t> sizes = {100, 200, 500, 1000, 2000, 5000, 10000};
  const auto rows = wpk::chain_table(sizes, 1.0, 1.0);
  REQUIRE(rows.size() == sizes.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    REQUIRE(rows[i].n_sites == sizes[i]);
    REQUIRE(rows[i].mode == 1);
    REQUIRE(rows[i].omega ==
            Approx(2.0 * std::sin(std::numbers::pi / static_cast<double>(sizes[i])))
                .epsilon(1e-13));
    // the approximation is within a tenth of a percent by N = 100
    REQUIRE(rows[i].sigma_exact == Approx(rows[i].sigma_approx).epsilon(1e-3));
  }

  std::vector<double> ln_n, ln_sigma;
  for (const auto& r : rows) {
    ln_n.push_back(std::log(static_cast<double>(r.n_sites)));
    ln_sigma.push_back(std::log(r.sigma_exact));
  }
  REQUIRE_THAT(wpk::fitted_slope(ln_n, ln_sigma), WithinAbs(0.5, 1e-3));
}

TEST_CASE("least-squares slope", "[analysis]") {
  const std::vector<double> x = {0.0, 1.0, 2.0, 3.0};
  const std::vector<double> y = {1.0, 3.0, 5.0, 7.0};
  REQUIRE(wpk::fitted_slope(x, y) == Approx(2.0).epsilon(1e-14));
  REQUIRE_THROWS_AS(wpk::fitted_slope({1.0}, {1.0}), wpk::ConfigError);
  REQUIRE_THROWS_AS(wpk::fitted_slope({1.0, 2.0}, {1.0}), wpk::ConfigError);
}

TEST_CASE("energy curve over separations on a small grid", "[analysis]") {
  wpk::GridSpec g{{wpk::centered_axis(16, 0.15), wpk::centered_axis(16, 0.15)}, {}};
  wpk::PropagatorParams params;
  params.d_tau = 0.01;
  params.energy_tol = 1e-9;
  const double cap = wpk::default_softening_cap(0.15, 0.15);
  const auto scan = wpk::pes_scan(g, {0.3, 0.45, 0.9}, cap, 0.5, params);

  REQUIRE(scan.completed);
  REQUIRE(scan.points.size() == 3);
  for (const auto& p : scan.points) {
    REQUIRE(p.e_total == Approx(p.e_electronic + 1.0 / p.separation).epsilon(1e-12));
    // bound electronic states on this potential sit well below zero
    REQUIRE(p.e_electronic < 0.0);
  }
  // the equilibrium is one of the scanned separations
  bool found = false;
  for (const auto& p : scan.points) found = found || p.separation == scan.equilibrium;
  REQUIRE(found);
}

TEST_CASE("a diverging point aborts the scan but keeps earlier points", "[analysis]") {
  wpk::GridSpec g{{wpk::centered_axis(12, 0.15), wpk::centered_axis(12, 0.15)}, {}};
  wpk::PropagatorParams params;
  params.d_tau = 1e7;  // exp(-V d_tau) overflows immediately
  const double cap = wpk::default_softening_cap(0.15, 0.15);
  const auto scan = wpk::pes_scan(g, {0.3, 0.45}, cap, 0.5, params);
  REQUIRE_FALSE(scan.completed);
  REQUIRE(scan.points.empty());
}
