#pragma once

#include <cstddef>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "wpk/errors.hpp"

namespace wpk {

// One uniformly spaced axis. Coordinates are offset + j*step for
// j = 0..n_points-1; the DFT treats the axis as periodic, so there is no
// duplicated right endpoint.
struct AxisSpec {
  std::size_t n_points = 0;
  double step = 0.0;
  double offset = 0.0;

  bool operator==(const AxisSpec&) const = default;
};

// An axis of n points centered on the origin with no point at zero for even n,
// e.g. n = 32, step = 0.075 spans -1.1625 .. 1.1625 with closest points at
// +-step/2.
inline AxisSpec centered_axis(std::size_t n_points, double step) {
  return AxisSpec{n_points, step, -0.5 * static_cast<double>(n_points - 1) * step};
}

struct GridSpec {
  std::vector<AxisSpec> axes;
  // optional axis names ("R_x", "r_cy", ...); empty or same length as axes
  std::vector<std::string> labels;

  std::size_t rank() const { return axes.size(); }

  bool operator==(const GridSpec& other) const { return axes == other.axes; }
};

inline void validate_axis(const AxisSpec& a) {
  if (a.n_points < 2) {
    throw ConfigError("axis needs at least 2 points, got " + std::to_string(a.n_points));
  }
  if (!(a.step > 0.0)) {
    std::ostringstream msg;
    msg << "axis step must be positive, got " << a.step;
    throw ConfigError(msg.str());
  }
}

inline void validate_grid(const GridSpec& g) {
  if (g.axes.empty()) throw ConfigError("grid needs at least one axis");
  for (const auto& a : g.axes) validate_axis(a);
  if (!g.labels.empty() && g.labels.size() != g.axes.size()) {
    throw ConfigError("grid labels, when given, must match the axis count");
  }
}

inline std::size_t total_points(const GridSpec& g) {
  std::size_t n = 1;
  for (const auto& a : g.axes) n *= a.n_points;
  return n;
}

// volume element: product of the axis steps
inline double volume_element(const GridSpec& g) {
  double dv = 1.0;
  for (const auto& a : g.axes) dv *= a.step;
  return dv;
}

// row-major strides; the last axis is contiguous
inline std::vector<std::size_t> row_major_strides(const GridSpec& g) {
  std::vector<std::size_t> s(g.rank(), 1);
  for (std::size_t r = g.rank(); r-- > 1;) s[r - 1] = s[r] * g.axes[r].n_points;
  return s;
}

inline std::vector<double> coordinates(const AxisSpec& a) {
  validate_axis(a);
  std::vector<double> x(a.n_points);
  for (std::size_t j = 0; j < a.n_points; ++j) {
    x[j] = a.offset + static_cast<double>(j) * a.step;
  }
  return x;
}

// Wavenumbers in standard DFT ordering: k[j] = 2*pi*f/(n*step) with f = j for
// j < n/2 and f = j - n otherwise, so the positive frequencies come first and
// the largest magnitude is the Nyquist value pi/step. The axis offset does not
// enter; a constant phase per bin cancels in every multiply-then-invert use.
inline std::vector<double> wavenumbers(const AxisSpec& a) {
  validate_axis(a);
  const double base = 2.0 * std::numbers::pi / (static_cast<double>(a.n_points) * a.step);
  std::vector<double> k(a.n_points);
  for (std::size_t j = 0; j < a.n_points; ++j) {
    const auto f = (j < a.n_points / 2) ? static_cast<std::ptrdiff_t>(j)
                                        : static_cast<std::ptrdiff_t>(j) -
                                              static_cast<std::ptrdiff_t>(a.n_points);
    k[j] = base * static_cast<double>(f);
  }
  return k;
}

// Walks a row-major flat index as per-axis indices. Used by every loop that
// needs coordinates or per-axis factors alongside the flat element.
class IndexWalker {
 public:
  explicit IndexWalker(const GridSpec& g) : idx_(g.rank(), 0) {
    dims_.reserve(g.rank());
    for (const auto& a : g.axes) dims_.push_back(a.n_points);
  }

  const std::vector<std::size_t>& indices() const { return idx_; }
  std::size_t operator[](std::size_t axis) const { return idx_[axis]; }

  void advance() {
    for (std::size_t r = idx_.size(); r-- > 0;) {
      if (++idx_[r] < dims_[r]) return;
      idx_[r] = 0;
    }
  }

 private:
  std::vector<std::size_t> dims_;
  std::vector<std::size_t> idx_;
};

}  // namespace wpk
