#pragma once

#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "wpk/errors.hpp"
#include "wpk/grid.hpp"
#include "wpk/wavefunction.hpp"

namespace wpk {

// Atomic units throughout (hbar = m_e = e = 1, energies in hartree, lengths
// in bohr). The nuclear default reproduces the reference mass choice of
// 1863.15 m_e per proton; deuteron and triton scale it by 2 and 3.
inline constexpr double proton_mass = 1863.15;
inline constexpr double deuteron_mass = 2.0 * proton_mass;
inline constexpr double triton_mass = 3.0 * proton_mass;

struct ParticleMasses {
  double m1 = proton_mass;
  double m2 = proton_mass;
  double m_electron = 1.0;
};

// A grid-diagonal potential plus per-axis quadratic kinetic coefficients:
//   T(k) = sum_a inv_mass[a] * k_a^2,   inv_mass[a] = 1 / (2 m_a)
struct HamiltonianModel {
  GridSpec grid;
  std::vector<double> inv_mass;
  std::vector<double> potential;  // row-major over grid
};

inline void validate_model(const HamiltonianModel& m) {
  validate_grid(m.grid);
  if (m.inv_mass.size() != m.grid.rank()) {
    throw ConfigError("model needs one kinetic coefficient per axis");
  }
  for (double c : m.inv_mass) {
    if (!(c > 0.0)) throw ConfigError("kinetic coefficients must be positive");
  }
  if (m.potential.size() != total_points(m.grid)) {
    throw ConfigError("model potential is not sized to its grid");
  }
}

// Coulomb interaction q/d with the singular point replaced by a finite value
// of magnitude |q|*cap. Every regular sample keeps the bare quotient; only an
// exact hit on the charge location is substituted, so the grid offset decides
// whether the replacement ever fires. The sign survives the substitution, so
// d = 0 still distinguishes attraction from repulsion.
inline double softened_coulomb(double q, double distance, double cap) {
  if (!(cap > 0.0)) throw ConfigError("softening cap must be positive");
  if (distance < 0.0) throw ConfigError("softened_coulomb needs a nonnegative distance");
  // distances this small are rounding residue of an exact coincidence; the
  // bare quotient there would blow up the dynamics instead of sampling it
  constexpr double singular_below = 1e-12;
  if (distance < singular_below) return q < 0.0 ? -std::abs(q) * cap : std::abs(q) * cap;
  return q / distance;
}

// default replacement value: the inverse diagonal of one 2D grid cell
inline double default_softening_cap(double step_x, double step_y) {
  return 1.0 / std::sqrt(step_x * step_x + step_y * step_y);
}

// Any custom scalar potential over the grid; the workhorse behind the named
// builders and handy for one-off validation models.
inline HamiltonianModel build_potential_model(
    const GridSpec& grid, const std::function<double(const std::vector<double>&)>& v,
    std::vector<double> inv_mass) {
  HamiltonianModel m;
  m.grid = grid;
  m.inv_mass = std::move(inv_mass);
  m.potential.resize(total_points(grid));

  std::vector<std::vector<double>> coords;
  coords.reserve(grid.rank());
  for (const auto& a : grid.axes) coords.push_back(coordinates(a));

  std::vector<double> x(grid.rank());
  IndexWalker walk(grid);
  for (std::size_t flat = 0; flat < m.potential.size(); ++flat, walk.advance()) {
    for (std::size_t r = 0; r < grid.rank(); ++r) x[r] = coords[r][walk[r]];
    m.potential[flat] = v(x);
  }
  validate_model(m);
  return m;
}

// Two nuclei and one electron in two dimensions, reduced to the internuclear
// vector R = (x0, x1) and the electron position r_c = (x2, x3) measured from
// the nuclear center of mass:
//
//   V = 1/|R| - 1/|r_c + (m2/Mn) R| - 1/|r_c - (m1/Mn) R|,   Mn = m1 + m2
//
// with the singular point of every 1/d replaced by the capped value. Kinetic
// masses are the two reduced masses: mu_R = m1 m2 / Mn on the R axes and
// mu_rc = m_e Mn / (m_e + Mn) on the electron axes.
inline HamiltonianModel build_h2plus_reduced(const GridSpec& grid, const ParticleMasses& masses,
                                             double cap) {
  validate_grid(grid);
  if (grid.rank() != 4) {
    throw ConfigError("reduced two-nucleus model needs 4 axes (R_x, R_y, r_cx, r_cy)");
  }
  if (!(masses.m1 > 0.0) || !(masses.m2 > 0.0) || !(masses.m_electron > 0.0)) {
    throw ConfigError("particle masses must be positive");
  }
  const double nuclear_mass = masses.m1 + masses.m2;
  const double mu_r = masses.m1 * masses.m2 / nuclear_mass;
  const double mu_rc = masses.m_electron * nuclear_mass / (masses.m_electron + nuclear_mass);
  const double f1 = masses.m1 / nuclear_mass;
  const double f2 = masses.m2 / nuclear_mass;

  HamiltonianModel m = build_potential_model(
      grid,
      [cap, f1, f2](const std::vector<double>& x) {
        const double rx = x[0], ry = x[1], cx = x[2], cy = x[3];
        const double r_nn = std::hypot(rx, ry);
        const double r_e1 = std::hypot(cx + f2 * rx, cy + f2 * ry);
        const double r_e2 = std::hypot(cx - f1 * rx, cy - f1 * ry);
        return softened_coulomb(1.0, r_nn, cap) + softened_coulomb(-1.0, r_e1, cap) +
               softened_coulomb(-1.0, r_e2, cap);
      },
      {1.0 / (2.0 * mu_r), 1.0 / (2.0 * mu_r), 1.0 / (2.0 * mu_rc), 1.0 / (2.0 * mu_rc)});
  if (m.grid.labels.empty()) m.grid.labels = {"R_x", "R_y", "r_cx", "r_cy"};
  return m;
}

// One electron around two unit point charges pinned at (-sep/2, 0) and
// (+sep/2, 0). Only the electronic energy lives in the tensor; the
// internuclear repulsion 1/sep is a constant and is added by whoever reports
// a total energy.
inline HamiltonianModel build_point_charge_electronic(const GridSpec& grid, double separation,
                                                      double cap) {
  validate_grid(grid);
  if (grid.rank() != 2) throw ConfigError("point-charge electronic model needs 2 axes");
  if (separation < 0.0) throw ConfigError("nuclear separation must be nonnegative");
  const double half = 0.5 * separation;
  HamiltonianModel m = build_potential_model(
      grid,
      [cap, half](const std::vector<double>& x) {
        return softened_coulomb(-1.0, std::hypot(x[0] - half, x[1]), cap) +
               softened_coulomb(-1.0, std::hypot(x[0] + half, x[1]), cap);
      },
      {0.5, 0.5});
  if (m.grid.labels.empty()) m.grid.labels = {"x", "y"};
  return m;
}

// Isotropic harmonic trap V = (1/2) m omega^2 sum_a x_a^2; exact spectrum
// makes it the standard calibration model.
inline HamiltonianModel build_harmonic(const GridSpec& grid, double mass, double omega) {
  validate_grid(grid);
  if (!(mass > 0.0) || !(omega > 0.0)) throw ConfigError("harmonic model needs mass, omega > 0");
  const double k = 0.5 * mass * omega * omega;
  return build_potential_model(
      grid,
      [k](const std::vector<double>& x) {
        double r2 = 0.0;
        for (double xi : x) r2 += xi * xi;
        return k * r2;
      },
      std::vector<double>(grid.rank(), 1.0 / (2.0 * mass)));
}

// A particle entering the direct-product construction below.
struct ChargedParticle {
  double mass = 1.0;
  double charge = 1.0;  // electrons carry -1
};

// Full Cartesian many-body grid: two axes (x, y) per particle, nuclei first,
// then electrons. Pairwise Coulomb terms with the product of charges setting
// sign and strength. Exponential in particle count by construction,
// hence the hard element cap; anything realistic must go through a reduced
// model instead.
inline HamiltonianModel build_full_cartesian(const GridSpec& grid,
                                             const std::vector<ChargedParticle>& nuclei,
                                             std::size_t n_electrons, double electron_mass,
                                             double cap,
                                             std::size_t max_elements = std::size_t{1} << 26) {
  validate_grid(grid);
  const std::size_t n_particles = nuclei.size() + n_electrons;
  if (n_particles == 0) throw ConfigError("full Cartesian model needs at least one particle");
  if (grid.rank() != 2 * n_particles) {
    throw ConfigError("full Cartesian model needs 2 axes per particle: expected " +
                      std::to_string(2 * n_particles) + ", got " + std::to_string(grid.rank()));
  }
  const std::size_t n = total_points(grid);
  if (n > max_elements) {
    std::ostringstream msg;
    msg << "full Cartesian grid has " << n << " elements, above the cap of " << max_elements
        << "; use a reduced-coordinate model for systems of this size";
    throw ConfigError(msg.str());
  }

  std::vector<ChargedParticle> particles = nuclei;
  for (const auto& p : particles) {
    if (!(p.mass > 0.0)) throw ConfigError("particle masses must be positive");
  }
  if (!(electron_mass > 0.0)) throw ConfigError("particle masses must be positive");
  for (std::size_t e = 0; e < n_electrons; ++e) {
    particles.push_back(ChargedParticle{electron_mass, -1.0});
  }

  std::vector<double> inv_mass;
  inv_mass.reserve(2 * n_particles);
  std::vector<std::string> labels;
  for (std::size_t p = 0; p < particles.size(); ++p) {
    inv_mass.push_back(1.0 / (2.0 * particles[p].mass));
    inv_mass.push_back(1.0 / (2.0 * particles[p].mass));
    const std::string base =
        (p < nuclei.size()) ? "R" + std::to_string(p + 1) : "r" + std::to_string(p - nuclei.size() + 1);
    labels.push_back(base + "_x");
    labels.push_back(base + "_y");
  }

  HamiltonianModel m = build_potential_model(
      grid,
      [&particles, cap](const std::vector<double>& x) {
        double v = 0.0;
        for (std::size_t i = 0; i < particles.size(); ++i) {
          for (std::size_t j = i + 1; j < particles.size(); ++j) {
            const double d = std::hypot(x[2 * i] - x[2 * j], x[2 * i + 1] - x[2 * j + 1]);
            v += softened_coulomb(particles[i].charge * particles[j].charge, d, cap);
          }
        }
        return v;
      },
      std::move(inv_mass));
  if (m.grid.labels.empty()) m.grid.labels = std::move(labels);
  return m;
}

}  // namespace wpk
