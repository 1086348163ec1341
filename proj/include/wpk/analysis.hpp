#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "wpk/errors.hpp"
#include "wpk/hamiltonian.hpp"
#include "wpk/propagator.hpp"
#include "wpk/wavefunction.hpp"

namespace wpk {

struct PesPoint {
  double separation = 0.0;
  double e_electronic = 0.0;
  double e_total = 0.0;  // electronic plus the 1/separation point-charge repulsion
};

struct PesScan {
  std::vector<PesPoint> points;
  double equilibrium = 0.0;  // separation with the lowest total energy
  // false when a propagation failed and the scan stopped early; `points`
  // then holds the part that did complete
  bool completed = false;
};

// inclusive ladder r_min, r_min + r_step, ... up to r_max (within roundoff)
inline std::vector<double> scan_separations(double r_min, double r_max, double r_step) {
  if (!(r_min > 0.0)) throw ConfigError("scan separations must be positive");
  if (!(r_step > 0.0)) throw ConfigError("scan step must be positive");
  if (r_max < r_min) throw ConfigError("scan range is empty (r_max < r_min)");
  std::vector<double> rs;
  for (std::size_t i = 0;; ++i) {
    const double r = r_min + static_cast<double>(i) * r_step;
    if (r > r_max + 0.5 * r_step) break;
    rs.push_back(r);
  }
  return rs;
}

inline void pick_equilibrium(PesScan& scan) {
  double best = scan.points.front().e_total;
  scan.equilibrium = scan.points.front().separation;
  for (const auto& p : scan.points) {
    if (p.e_total < best) {
      best = p.e_total;
      scan.equilibrium = p.separation;
    }
  }
}

// Ground-state energy of the fixed-nuclei electronic problem at each
// separation, plus the point-charge repulsion. Nuclear masses never enter:
// the scanned Hamiltonian treats the nuclei as classical point charges, which
// is exactly why every isotope shares this curve.
inline PesScan pes_scan(const GridSpec& grid, const std::vector<double>& separations,
                        double softening_cap, double initial_width,
                        const PropagatorParams& params) {
  if (separations.empty()) throw ConfigError("scan needs at least one separation");
  for (double r : separations) {
    if (!(r > 0.0)) throw ConfigError("scan separations must be positive");
  }

  PesScan scan;
  scan.points.reserve(separations.size());
  const WaveFunction psi0 = gaussian_initial(grid, initial_width);
  for (double r : separations) {
    const HamiltonianModel model = build_point_charge_electronic(grid, r, softening_cap);
    GroundStateResult result;
    try {
      result = evolve_to_ground_state(psi0, model, params);
    } catch (const NumericError&) {
      scan.completed = false;
      if (!scan.points.empty()) pick_equilibrium(scan);
      return scan;
    }
    const double e_elec = result.report.final_energy;
    scan.points.push_back({r, e_elec, e_elec + 1.0 / r});
  }
  scan.completed = true;
  pick_equilibrium(scan);
  return scan;
}

// Dispersion of a periodic chain of N masses coupled by springs k:
// omega(n) = 2 sqrt(k/m) sin(n pi / N) for the modes n = 1 .. N-1. The n = 0
// translation mode has zero frequency and no zero-point width, so it is left
// out.
inline std::vector<double> chain_frequencies(std::size_t n_sites, double mass, double spring_k) {
  if (n_sites < 2) throw ConfigError("chain needs at least two sites");
  if (!(mass > 0.0) || !(spring_k > 0.0)) throw ConfigError("chain needs mass, k > 0");
  const double omega0 = std::sqrt(spring_k / mass);
  std::vector<double> omega(n_sites - 1);
  for (std::size_t n = 1; n < n_sites; ++n) {
    omega[n - 1] =
        2.0 * omega0 * std::sin(static_cast<double>(n) * std::numbers::pi /
                                static_cast<double>(n_sites));
  }
  return omega;
}

// zero-point width of one harmonic mode
inline double zero_point_sigma(double mass, double omega) {
  if (!(mass > 0.0) || !(omega > 0.0)) throw ConfigError("zero_point_sigma needs mass, omega > 0");
  return std::sqrt(1.0 / (2.0 * mass * omega));
}

// Small-angle form for the n = 1 chain mode: with omega(1) ~ 2 omega0 pi / N
// the exact width tends to sqrt(N / (4 m omega0 pi)), which grows like
// sqrt(N). (Dividing by 4 keeps this the genuine asymptote of
// zero_point_sigma; quoting it without the 4 overstates the width twofold.)
inline double zero_point_sigma_approx_first_mode(std::size_t n_sites, double mass,
                                                 double spring_k) {
  if (n_sites < 2) throw ConfigError("chain needs at least two sites");
  if (!(mass > 0.0) || !(spring_k > 0.0)) throw ConfigError("chain needs mass, k > 0");
  const double omega0 = std::sqrt(spring_k / mass);
  return std::sqrt(static_cast<double>(n_sites) / (4.0 * mass * omega0 * std::numbers::pi));
}

struct ChainRow {
  std::size_t n_sites = 0;
  std::size_t mode = 1;
  double omega = 0.0;
  double sigma_exact = 0.0;
  double sigma_approx = 0.0;
};

// first-mode zero-point widths across a ladder of chain sizes
inline std::vector<ChainRow> chain_table(const std::vector<std::size_t>& sizes, double mass,
                                         double spring_k) {
  std::vector<ChainRow> rows;
  rows.reserve(sizes.size());
  for (std::size_t n_sites : sizes) {
    const auto omega = chain_frequencies(n_sites, mass, spring_k);
    ChainRow row;
    row.n_sites = n_sites;
    row.mode = 1;
    row.omega = omega[0];
    row.sigma_exact = zero_point_sigma(mass, omega[0]);
    row.sigma_approx = zero_point_sigma_approx_first_mode(n_sites, mass, spring_k);
    rows.push_back(row);
  }
  return rows;
}

// least-squares slope of y against x; used on (log N, log sigma) ladders
inline double fitted_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ConfigError("slope fit needs two samples");
  const auto n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw ConfigError("slope fit is degenerate");
  return (n * sxy - sx * sy) / denom;
}

}  // namespace wpk
