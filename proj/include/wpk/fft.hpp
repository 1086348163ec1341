#pragma once

#include <fftw3.h>

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <string>

#include "wpk/errors.hpp"
#include "wpk/grid.hpp"
#include "wpk/wavefunction.hpp"

namespace wpk {

// Thread count for FFT plans, overridable through the WPK_THREADS environment
// variable. Defaults to 1; values below 1 or unparsable are rejected.
inline int thread_count() {
  const char* env = std::getenv("WPK_THREADS");
  if (!env || !*env) return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || v < 1 || v > 4096) {
    throw ConfigError(std::string("WPK_THREADS must be a small positive integer, got '") +
                      env + "'");
  }
  return static_cast<int>(v);
}

namespace detail {
inline void init_fftw_threads([[maybe_unused]] int n_threads) {
#ifdef WPK_HAVE_FFTW_THREADS
  static std::once_flag once;
  std::call_once(once, [] { fftw_init_threads(); });
  fftw_plan_with_nthreads(n_threads);
#endif
}
}  // namespace detail

// Plans and scratch buffers for the N-dimensional c2c transform of one grid
// geometry. All transforms are unnormalized:
//
//   forward   F[k] = sum_j f[j] exp(-2 pi i j.k / n)
//   backward  f[j] = sum_k F[k] exp(+2 pi i j.k / n)     (so fwd o bwd = N id)
//
// backward() divides by the total point count N, which makes forward() /
// backward() a round trip and gives Parseval the form
//   sum |f|^2 dV = (1/N) sum |F|^2 dV.
// Phases are indexed from the grid origin, not the physical offset; the
// constant per-bin phase cancels whenever a transform pair brackets a
// diagonal multiplication, which is the only way the engine uses it.
//
// Plans are created once with FFTW_MEASURE on engine-owned buffers (planning
// overwrites them), so execution never re-plans and never touches user memory.
class FftEngine {
 public:
  explicit FftEngine(const GridSpec& grid, int n_threads = 1) : grid_(grid) {
    validate_grid(grid);
    n_ = total_points(grid);
    std::vector<int> dims;
    dims.reserve(grid.rank());
    for (const auto& a : grid.axes) {
      if (a.n_points > static_cast<std::size_t>(std::numeric_limits<int>::max())) {
        throw ConfigError("axis too large for FFT planning");
      }
      dims.push_back(static_cast<int>(a.n_points));
    }
    a_.assign(n_, cdouble{0.0, 0.0});
    b_.assign(n_, cdouble{0.0, 0.0});
    detail::init_fftw_threads(n_threads);
    auto* pa = reinterpret_cast<fftw_complex*>(a_.data());
    auto* pb = reinterpret_cast<fftw_complex*>(b_.data());
    const int rank = static_cast<int>(dims.size());
    fwd_ = fftw_plan_dft(rank, dims.data(), pa, pa, FFTW_FORWARD, FFTW_MEASURE);
    bwd_ = fftw_plan_dft(rank, dims.data(), pa, pa, FFTW_BACKWARD, FFTW_MEASURE);
    bwd_a_to_b_ = fftw_plan_dft(rank, dims.data(), pa, pb, FFTW_BACKWARD, FFTW_MEASURE);
    if (!fwd_ || !bwd_ || !bwd_a_to_b_) throw NumericError("FFT planning failed");
  }

  FftEngine(const FftEngine&) = delete;
  FftEngine& operator=(const FftEngine&) = delete;

  ~FftEngine() {
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_destroy_plan(bwd_a_to_b_);
  }

  const GridSpec& grid() const { return grid_; }
  std::size_t size() const { return n_; }

  // engine scratch, raw DFT semantics; used directly by the propagator loop
  cdouble* buf_a() { return a_.data(); }
  cdouble* buf_b() { return b_.data(); }
  void execute_forward_a() { fftw_execute(fwd_); }
  void execute_backward_a() { fftw_execute(bwd_); }
  void execute_backward_a_to_b() { fftw_execute(bwd_a_to_b_); }

  // Convenience round-trip API on user vectors (copies through buf_a).
  void forward(ComplexVector& data) {
    check_size(data);
    std::copy(data.begin(), data.end(), a_.begin());
    execute_forward_a();
    std::copy(a_.begin(), a_.end(), data.begin());
  }

  void backward(ComplexVector& data) {
    check_size(data);
    std::copy(data.begin(), data.end(), a_.begin());
    execute_backward_a();
    const double inv_n = 1.0 / static_cast<double>(n_);
    for (std::size_t i = 0; i < n_; ++i) data[i] = a_[i] * inv_n;
  }

 private:
  void check_size(const ComplexVector& data) const {
    if (data.size() != n_) {
      throw ConfigError("FFT input size " + std::to_string(data.size()) +
                        " does not match grid with " + std::to_string(n_) + " points");
    }
  }

  GridSpec grid_;
  std::size_t n_ = 0;
  ComplexVector a_, b_;
  fftw_plan fwd_{}, bwd_{}, bwd_a_to_b_{};
};

}  // namespace wpk
