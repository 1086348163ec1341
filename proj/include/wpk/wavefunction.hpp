#pragma once

#include <cmath>
#include <complex>
#include <cstdlib>
#include <new>
#include <sstream>
#include <vector>

#include "wpk/errors.hpp"
#include "wpk/grid.hpp"

namespace wpk {

using cdouble = std::complex<double>;

// 64-byte aligned storage so FFT plans can run on any amplitude buffer without
// copies and vectorized loops stay on full cache lines.
template <typename T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::size_t alignment = 64;

  AlignedAllocator() = default;
  template <typename U>
  AlignedAllocator(const AlignedAllocator<U>&) {}

  T* allocate(std::size_t n) {
    const std::size_t bytes = ((n * sizeof(T) + alignment - 1) / alignment) * alignment;
    void* p = std::aligned_alloc(alignment, bytes);
    if (!p) throw std::bad_alloc();
    return static_cast<T*>(p);
  }

  void deallocate(T* p, std::size_t) noexcept { std::free(p); }

  template <typename U>
  bool operator==(const AlignedAllocator<U>&) const {
    return true;
  }
};

using ComplexVector = std::vector<cdouble, AlignedAllocator<cdouble>>;
using RealVector = std::vector<double, AlignedAllocator<double>>;

// A complex amplitude tensor over a grid, stored row-major in axis order.
struct WaveFunction {
  GridSpec grid;
  ComplexVector amplitudes;
};

inline WaveFunction make_zero_state(const GridSpec& grid) {
  validate_grid(grid);
  WaveFunction psi;
  psi.grid = grid;
  psi.amplitudes.assign(total_points(grid), cdouble{0.0, 0.0});
  return psi;
}

inline void check_same_grid(const GridSpec& a, const GridSpec& b, const char* where) {
  if (!(a == b)) {
    throw ConfigError(std::string(where) + ": states live on different grids");
  }
}

// sqrt of sum |psi|^2 dV; the accumulator is long double so the 1e-12 norm
// contract survives million-element grids
inline double norm(const WaveFunction& psi) {
  long double acc = 0.0L;
  for (const auto& a : psi.amplitudes) acc += static_cast<long double>(std::norm(a));
  return static_cast<double>(std::sqrt(acc * static_cast<long double>(volume_element(psi.grid))));
}

// Scales psi to unit norm in place and returns the norm it had before.
// A state that has decayed to exactly zero cannot be rescued and errors out.
inline double normalize(WaveFunction& psi) {
  const double n = norm(psi);
  if (!(n > 0.0) || !std::isfinite(n)) {
    std::ostringstream msg;
    msg << "cannot normalize state with norm " << n;
    throw NumericError(msg.str());
  }
  const double inv = 1.0 / n;
  for (auto& a : psi.amplitudes) a *= inv;
  return n;
}

// sum conj(a) * b * dV over the common grid
inline cdouble inner_product(const WaveFunction& a, const WaveFunction& b) {
  check_same_grid(a.grid, b.grid, "inner_product");
  long double re = 0.0L;
  long double im = 0.0L;
  for (std::size_t i = 0; i < a.amplitudes.size(); ++i) {
    const cdouble t = std::conj(a.amplitudes[i]) * b.amplitudes[i];
    re += static_cast<long double>(t.real());
    im += static_cast<long double>(t.imag());
  }
  const long double dv = static_cast<long double>(volume_element(a.grid));
  return {static_cast<double>(re * dv), static_cast<double>(im * dv)};
}

// |<a|b>|^2 for unit-norm states; the standard overlap quality measure
inline double fidelity(const WaveFunction& a, const WaveFunction& b) {
  return std::norm(inner_product(a, b));
}

// Normalized isotropic Gaussian exp(-sum_i x_i^2 / (2 alpha^2)) over all axes.
// The usual featureless starting point: strictly positive, so it overlaps any
// nodeless ground state.
inline WaveFunction gaussian_initial(const GridSpec& grid, double alpha) {
  validate_grid(grid);
  if (!(alpha > 0.0)) {
    std::ostringstream msg;
    msg << "gaussian width must be positive, got " << alpha;
    throw ConfigError(msg.str());
  }
  WaveFunction psi = make_zero_state(grid);
  std::vector<std::vector<double>> coords;
  coords.reserve(grid.rank());
  for (const auto& a : grid.axes) coords.push_back(coordinates(a));

  const double inv_two_alpha_sq = 1.0 / (2.0 * alpha * alpha);
  IndexWalker walk(grid);
  for (std::size_t flat = 0; flat < psi.amplitudes.size(); ++flat, walk.advance()) {
    double r2 = 0.0;
    for (std::size_t r = 0; r < grid.rank(); ++r) {
      const double x = coords[r][walk[r]];
      r2 += x * x;
    }
    psi.amplitudes[flat] = std::exp(-r2 * inv_two_alpha_sq);
  }
  normalize(psi);
  return psi;
}

}  // namespace wpk
