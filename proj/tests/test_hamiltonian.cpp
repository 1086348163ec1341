#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "wpk/errors.hpp"
#include "wpk/grid.hpp"
#include "wpk/hamiltonian.hpp"

using Catch::Approx;
using Catch::Matchers::WithinAbs;

TEST_CASE("softened coulomb replaces only the singular point", "[operators]") {
  const double cap = 10.0;
  // away from the charge: plain 1/d with the charge sign
  REQUIRE(wpk::softened_coulomb(1.0, 2.0, cap) == Approx(0.5));
  REQUIRE(wpk::softened_coulomb(-1.0, 2.0, cap) == Approx(-0.5));
  // close samples stay bare and may dwarf the replacement value
  REQUIRE(wpk::softened_coulomb(1.0, 0.01, cap) == Approx(100.0));
  REQUIRE(wpk::softened_coulomb(-1.0, 0.01, cap) == Approx(-100.0));
  // right at the charge the finite stand-in takes over, sign intact
  REQUIRE(wpk::softened_coulomb(-1.0, 0.0, cap) == Approx(-10.0));
  REQUIRE(wpk::softened_coulomb(2.0, 0.0, cap) == Approx(20.0));
  // rounding residue of an exact hit counts as the singular point
  REQUIRE(wpk::softened_coulomb(1.0, 1e-13, cap) == Approx(10.0));
  REQUIRE(wpk::softened_coulomb(1.0, 1e-9, cap) == Approx(1e9));

  REQUIRE_THROWS_AS(wpk::softened_coulomb(1.0, 1.0, 0.0), wpk::ConfigError);
  REQUIRE_THROWS_AS(wpk::softened_coulomb(1.0, -1.0, cap), wpk::ConfigError);
}

TEST_CASE("default cap is the inverse cell diagonal", "[operators]") {
  REQUIRE(wpk::default_softening_cap(0.075, 0.075) ==
          Approx(9.428090415820634).epsilon(1e-14));
  REQUIRE(wpk::default_softening_cap(3.0, 4.0) == Approx(0.2).epsilon(1e-14));
}

TEST_CASE("mass constants and reduced masses", "[operators]") {
  REQUIRE(wpk::proton_mass == Approx(1863.15));
  REQUIRE(wpk::deuteron_mass == Approx(2.0 * 1863.15));
  REQUIRE(wpk::triton_mass == Approx(3.0 * 1863.15));

  wpk::GridSpec g;
  for (int i = 0; i < 4; ++i) g.axes.push_back(wpk::centered_axis(4, 0.075));
  const auto m = wpk::build_h2plus_reduced(g, wpk::ParticleMasses{}, 9.0);

  // relative nuclear coordinate: mu = m1 m2 / (m1 + m2) = 931.575
  REQUIRE(m.inv_mass[0] == Approx(1.0 / (2.0 * 931.575)).epsilon(1e-14));
  REQUIRE(m.inv_mass[1] == m.inv_mass[0]);
  // electron against the joint nuclear mass: mu = M / (1 + M), barely below 1
  const double mu_rc = 3726.3 / 3727.3;
  REQUIRE(m.inv_mass[2] == Approx(1.0 / (2.0 * mu_rc)).epsilon(1e-14));
  REQUIRE(m.inv_mass[3] == m.inv_mass[2]);
  REQUIRE(m.grid.labels == std::vector<std::string>{"R_x", "R_y", "r_cx", "r_cy"});
}

TEST_CASE("reduced-coordinate potential at a spot-checked point", "[operators]") {
  // 32 points, 0.075 spacing: the value below was worked out by hand from
  // 1/|R| - 1/|r_c + R/2| - 1/|r_c - R/2| for equal nuclear masses
  wpk::GridSpec g;
  for (int i = 0; i < 4; ++i) g.axes.push_back(wpk::centered_axis(32, 0.075));
  const double cap = wpk::default_softening_cap(0.075, 0.075);
  const auto model = wpk::build_h2plus_reduced(g, wpk::ParticleMasses{}, cap);

  // R = (0.375, 0.0375... pick exact grid indices instead of fishing floats
  const auto xs = wpk::coordinates(g.axes[0]);
  // xs[i] = -1.1625 + 0.075 i; 0.375 is i = 20.5 -- not a grid point, so
  // evaluate through the same index arithmetic the builder used
  const auto flat_index = [&](std::size_t i0, std::size_t i1, std::size_t i2, std::size_t i3) {
    return ((i0 * 32 + i1) * 32 + i2) * 32 + i3;
  };
  // choose indices whose coordinates are R = (0.4125, 0.0375), rc = (0.0375, 0.0375)
  const std::size_t iR = 21, i0 = 16;
  REQUIRE_THAT(xs[iR], WithinAbs(0.4125, 1e-12));
  REQUIRE_THAT(xs[i0], WithinAbs(0.0375, 1e-12));
  const double R[2] = {xs[iR], xs[i0]};
  const double rc[2] = {xs[i0], xs[i0]};
  const double da = std::hypot(rc[0] + 0.5 * R[0], rc[1] + 0.5 * R[1]);
  const double db = std::hypot(rc[0] - 0.5 * R[0], rc[1] - 0.5 * R[1]);
  const double expected = wpk::softened_coulomb(1.0, std::hypot(R[0], R[1]), cap) +
                          wpk::softened_coulomb(-1.0, da, cap) +
                          wpk::softened_coulomb(-1.0, db, cap);
  REQUIRE(model.potential[flat_index(iR, i0, i0, i0)] == Approx(expected).epsilon(1e-13));

  // frozen reference value for R = (0.375, 0), rc = (0.0375, 0.0375), which
  // needs a grid that actually contains those coordinates
  wpk::GridSpec g2;
  g2.axes = {wpk::AxisSpec{2, 0.075, 0.375}, wpk::AxisSpec{2, 0.075, 0.0},
             wpk::AxisSpec{2, 0.075, 0.0375}, wpk::AxisSpec{2, 0.075, 0.0375}};
  const auto model2 = wpk::build_h2plus_reduced(g2, wpk::ParticleMasses{}, cap);
  REQUIRE_THAT(model2.potential[0], WithinAbs(-8.184922995778408, 1e-10));
}

TEST_CASE("pinned-nuclei electronic potential", "[operators]") {
  wpk::GridSpec g{{wpk::centered_axis(8, 0.075), wpk::centered_axis(8, 0.075)}, {}};
  const double cap = wpk::default_softening_cap(0.075, 0.075);
  const double sep = 0.45;
  const auto model = wpk::build_point_charge_electronic(g, sep, cap);

  REQUIRE(model.inv_mass == std::vector<double>{0.5, 0.5});
  const auto xs = wpk::coordinates(g.axes[0]);
  std::size_t flat = 0;
  for (std::size_t i = 0; i < 8; ++i) {
    for (std::size_t j = 0; j < 8; ++j, ++flat) {
      const double expected =
          wpk::softened_coulomb(-1.0, std::hypot(xs[i] - 0.5 * sep, xs[j]), cap) +
          wpk::softened_coulomb(-1.0, std::hypot(xs[i] + 0.5 * sep, xs[j]), cap);
      REQUIRE_THAT(model.potential[flat], WithinAbs(expected, 1e-13));
    }
  }
  // the nucleus-nucleus 1/sep term is deliberately not baked in
  REQUIRE(*std::min_element(model.potential.begin(), model.potential.end()) < -cap);

  REQUIRE_THROWS_AS(wpk::build_point_charge_electronic(g, -0.1, cap), wpk::ConfigError);
}

TEST_CASE("harmonic potential", "[operators]") {
  wpk::GridSpec g{{wpk::centered_axis(9, 0.5)}, {}};
  const auto model = wpk::build_harmonic(g, 2.0, 3.0);
  REQUIRE(model.inv_mass[0] == Approx(0.25));
  const auto xs = wpk::coordinates(g.axes[0]);
  for (std::size_t i = 0; i < 9; ++i) {
    REQUIRE(model.potential[i] == Approx(0.5 * 2.0 * 9.0 * xs[i] * xs[i]).margin(1e-14));
  }
}

TEST_CASE("full cartesian builder wires pairwise charges", "[operators]") {
  // two fixed-charge nuclei and one electron in the plane: 6 axes
  wpk::GridSpec g;
  for (int i = 0; i < 6; ++i) g.axes.push_back(wpk::centered_axis(3, 0.5));
  std::vector<wpk::ChargedParticle> nuclei = {{100.0, 1.0}, {200.0, 1.0}};
  const double cap = 5.0;
  const auto model = wpk::build_full_cartesian(g, nuclei, 1, 1.0, cap);

  REQUIRE(model.grid.rank() == 6);
  REQUIRE(model.inv_mass[0] == Approx(1.0 / 200.0));
  REQUIRE(model.inv_mass[2] == Approx(1.0 / 400.0));
  REQUIRE(model.inv_mass[4] == Approx(0.5));

  // check one grid point against the three pairwise terms
  const auto xs = wpk::coordinates(g.axes[0]);
  const std::size_t idx[6] = {0, 1, 2, 1, 1, 0};
  std::size_t flat = 0;
  for (int a = 0; a < 6; ++a) flat = flat * 3 + idx[a];
  const double n1[2] = {xs[idx[0]], xs[idx[1]]};
  const double n2[2] = {xs[idx[2]], xs[idx[3]]};
  const double e1[2] = {xs[idx[4]], xs[idx[5]]};
  const double expected =
      wpk::softened_coulomb(1.0, std::hypot(n1[0] - n2[0], n1[1] - n2[1]), cap) +
      wpk::softened_coulomb(-1.0, std::hypot(n1[0] - e1[0], n1[1] - e1[1]), cap) +
      wpk::softened_coulomb(-1.0, std::hypot(n2[0] - e1[0], n2[1] - e1[1]), cap);
  REQUIRE_THAT(model.potential[flat], WithinAbs(expected, 1e-13));

  // the guard against accidentally gigantic grids
  REQUIRE_THROWS_AS(wpk::build_full_cartesian(g, nuclei, 1, 1.0, cap, 100), wpk::ConfigError);
}

TEST_CASE("model validation", "[operators]") {
  wpk::GridSpec g{{wpk::centered_axis(4, 0.5)}, {}};
  wpk::HamiltonianModel m;
  m.grid = g;
  m.inv_mass = {0.5};
  m.potential.assign(4, 0.0);
  REQUIRE_NOTHROW(wpk::validate_model(m));

  m.inv_mass = {0.5, 0.5};
  REQUIRE_THROWS_AS(wpk::validate_model(m), wpk::ConfigError);
  m.inv_mass = {0.5};
  m.potential.assign(3, 0.0);
  REQUIRE_THROWS_AS(wpk::validate_model(m), wpk::ConfigError);
}
