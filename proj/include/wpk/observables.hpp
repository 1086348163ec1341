#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>
#include <vector>

#include "wpk/errors.hpp"
#include "wpk/grid.hpp"
#include "wpk/wavefunction.hpp"

namespace wpk {

// probability density over the two leading (nuclear) axes; sum p dV = 1
struct MarginalDensity {
  GridSpec grid;
  std::vector<double> p;
};

// raw |psi|^2 over the axes that were not fixed; weight carries the slice's
// own integral so a consumer can normalize when it wants a conditional density
struct SliceField {
  GridSpec grid;
  std::vector<double> values;
  double weight = 0.0;
};

struct BondLengthStats {
  double mean = 0.0;
  double std_dev = 0.0;
  double mode = 0.0;
};

namespace detail {

// Locates `x` on the axis, tolerating roundoff at the scale of one part in
// 1e-6 of the spacing. Anything farther off is rejected with the two nearest
// grid points named, since "close to a grid point" usually means a config
// typo rather than a different grid.
inline std::size_t locate_coordinate(const AxisSpec& axis, double x, const std::string& label) {
  const auto xs = coordinates(axis);
  std::size_t best = 0;
  double best_d = std::abs(x - xs[0]);
  for (std::size_t j = 1; j < xs.size(); ++j) {
    const double d = std::abs(x - xs[j]);
    if (d < best_d) {
      best = j;
      best_d = d;
    }
  }
  if (best_d <= 1e-6 * axis.step) return best;

  std::size_t second = (best == 0) ? 1 : best - 1;
  if (best + 1 < xs.size() &&
      std::abs(x - xs[best + 1]) < std::abs(x - xs[second])) {
    second = best + 1;
  }
  std::ostringstream msg;
  msg << "coordinate " << x << " is not a grid point of axis " << label
      << "; nearest grid points are " << xs[std::min(best, second)] << " and "
      << xs[std::max(best, second)];
  throw ConfigError(msg.str());
}

}  // namespace detail

// |psi|^2 with the listed axes pinned to grid coordinates. The result is the
// raw probability density along the remaining axes, not renormalized, which
// is what the density-surface plots want.
inline SliceField conditional_slice(const WaveFunction& psi,
                                    const std::vector<std::pair<std::size_t, double>>& fixed) {
  validate_grid(psi.grid);
  if (fixed.empty()) throw ConfigError("conditional_slice needs at least one fixed axis");
  if (fixed.size() >= psi.grid.rank()) {
    throw ConfigError("conditional_slice must leave at least one free axis");
  }

  std::vector<bool> is_fixed(psi.grid.rank(), false);
  std::vector<std::size_t> fixed_index(psi.grid.rank(), 0);
  for (const auto& [axis, x] : fixed) {
    if (axis >= psi.grid.rank()) {
      throw ConfigError("conditional_slice: axis " + std::to_string(axis) + " out of range");
    }
    if (is_fixed[axis]) {
      throw ConfigError("conditional_slice: axis " + std::to_string(axis) + " fixed twice");
    }
    const std::string label =
        psi.grid.labels.empty() ? "#" + std::to_string(axis) : psi.grid.labels[axis];
    is_fixed[axis] = true;
    fixed_index[axis] = detail::locate_coordinate(psi.grid.axes[axis], x, label);
  }

  SliceField slice;
  double dv_free = 1.0;
  for (std::size_t r = 0; r < psi.grid.rank(); ++r) {
    if (is_fixed[r]) continue;
    slice.grid.axes.push_back(psi.grid.axes[r]);
    if (!psi.grid.labels.empty()) slice.grid.labels.push_back(psi.grid.labels[r]);
    dv_free *= psi.grid.axes[r].step;
  }
  slice.values.reserve(total_points(slice.grid));

  const auto strides = row_major_strides(psi.grid);
  std::size_t base = 0;
  for (std::size_t r = 0; r < psi.grid.rank(); ++r) {
    if (is_fixed[r]) base += fixed_index[r] * strides[r];
  }

  long double acc = 0.0L;
  IndexWalker walk(slice.grid);
  std::vector<std::size_t> free_axes;
  for (std::size_t r = 0; r < psi.grid.rank(); ++r) {
    if (!is_fixed[r]) free_axes.push_back(r);
  }
  const std::size_t n_free = total_points(slice.grid);
  for (std::size_t flat = 0; flat < n_free; ++flat, walk.advance()) {
    std::size_t src = base;
    for (std::size_t r = 0; r < free_axes.size(); ++r) src += walk[r] * strides[free_axes[r]];
    const double p = std::norm(psi.amplitudes[src]);
    slice.values.push_back(p);
    acc += static_cast<long double>(p);
  }
  slice.weight = static_cast<double>(acc) * dv_free;
  return slice;
}

// Integrates |psi|^2 over every axis beyond the first two, leaving the
// density of the leading coordinate pair. On the reduced molecular states the
// leading pair is the internuclear vector, so this is the bond density.
inline MarginalDensity nuclear_marginal(const WaveFunction& psi) {
  validate_grid(psi.grid);
  if (psi.grid.rank() < 2) throw ConfigError("nuclear_marginal needs at least two axes");

  MarginalDensity m;
  m.grid.axes = {psi.grid.axes[0], psi.grid.axes[1]};
  if (!psi.grid.labels.empty()) m.grid.labels = {psi.grid.labels[0], psi.grid.labels[1]};

  double dv_rest = 1.0;
  for (std::size_t r = 2; r < psi.grid.rank(); ++r) dv_rest *= psi.grid.axes[r].step;

  const std::size_t n01 = total_points(m.grid);
  const std::size_t n_rest = total_points(psi.grid) / n01;
  m.p.assign(n01, 0.0);
  for (std::size_t outer = 0; outer < n01; ++outer) {
    long double acc = 0.0L;
    const std::size_t base = outer * n_rest;
    for (std::size_t inner = 0; inner < n_rest; ++inner) {
      acc += static_cast<long double>(std::norm(psi.amplitudes[base + inner]));
    }
    m.p[outer] = static_cast<double>(acc) * dv_rest;
  }
  return m;
}

// Mean, population standard deviation and mode of |R| under the marginal.
// The mode is the |R| of the single most probable grid point; among exact
// probability ties the smallest |R| wins, then the lexicographically smallest
// index pair, so the answer never depends on iteration order.
inline BondLengthStats bond_length_stats(const MarginalDensity& m) {
  validate_grid(m.grid);
  if (m.grid.rank() != 2) throw ConfigError("bond_length_stats needs a two-axis marginal");
  if (m.p.size() != total_points(m.grid)) {
    throw ConfigError("marginal density is not sized to its grid");
  }

  const auto xs = coordinates(m.grid.axes[0]);
  const auto ys = coordinates(m.grid.axes[1]);
  const double dv = volume_element(m.grid);

  long double mean_acc = 0.0L, sq_acc = 0.0L;
  double best_p = -1.0, best_r = 0.0;
  std::size_t flat = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = 0; j < ys.size(); ++j, ++flat) {
      const double r = std::hypot(xs[i], ys[j]);
      const double w = m.p[flat] * dv;
      mean_acc += static_cast<long double>(r * w);
      sq_acc += static_cast<long double>(r * r * w);
      if (m.p[flat] > best_p || (m.p[flat] == best_p && r < best_r)) {
        best_p = m.p[flat];
        best_r = r;
      }
    }
  }

  BondLengthStats stats;
  stats.mean = static_cast<double>(mean_acc);
  const double var = static_cast<double>(sq_acc) - stats.mean * stats.mean;
  stats.std_dev = std::sqrt(std::max(var, 0.0));
  stats.mode = best_r;
  return stats;
}

}  // namespace wpk
