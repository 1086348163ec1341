#pragma once

#include <cmath>
#include <cstddef>
#include <sstream>
#include <vector>

#include "wpk/errors.hpp"
#include "wpk/fft.hpp"
#include "wpk/grid.hpp"
#include "wpk/hamiltonian.hpp"
#include "wpk/wavefunction.hpp"

namespace wpk {

struct PropagatorParams {
  double d_tau = 0.075;
  std::size_t max_steps = 100000;
  double energy_tol = 1e-10;         // relative change between energy checks
  std::size_t renormalize_every = 1;
  std::size_t energy_check_interval = 10;
};

struct TraceEntry {
  std::size_t step = 0;
  double energy = 0.0;
  double norm = 1.0;  // norm right before the renormalization at this step
};

struct PropagationReport {
  std::size_t steps_taken = 0;
  bool converged = false;
  double final_energy = 0.0;
  std::vector<TraceEntry> energy_trace;
  // worst |norm - 1| measured right after a renormalization; a health metric
  // for the rescaling arithmetic itself
  double max_norm_error = 0.0;
};

struct GroundStateResult {
  WaveFunction state;
  PropagationReport report;
};

inline void validate_params(const PropagatorParams& p) {
  if (!(p.d_tau > 0.0) || !std::isfinite(p.d_tau)) {
    throw ConfigError("imaginary-time step must be positive and finite");
  }
  if (p.max_steps == 0) throw ConfigError("max_steps must be at least 1");
  if (!(p.energy_tol > 0.0)) throw ConfigError("energy tolerance must be positive");
  if (p.renormalize_every == 0) throw ConfigError("renormalize_every must be at least 1");
  if (p.energy_check_interval == 0) throw ConfigError("energy_check_interval must be at least 1");
}

namespace detail {

// exp(-inv_mass[a] * k^2 * dt) per axis; the diagonal kinetic decay in k space
inline std::vector<std::vector<double>> kinetic_decay_factors(const HamiltonianModel& m,
                                                              double dt) {
  std::vector<std::vector<double>> f(m.grid.rank());
  for (std::size_t a = 0; a < m.grid.rank(); ++a) {
    const auto k = wavenumbers(m.grid.axes[a]);
    f[a].resize(k.size());
    for (std::size_t j = 0; j < k.size(); ++j) {
      f[a][j] = std::exp(-m.inv_mass[a] * k[j] * k[j] * dt);
    }
  }
  return f;
}

// dense product tensor of per-axis factors, row-major like the amplitudes
inline RealVector outer_product_tensor(const GridSpec& g,
                                       const std::vector<std::vector<double>>& per_axis) {
  RealVector w(total_points(g));
  IndexWalker walk(g);
  for (std::size_t flat = 0; flat < w.size(); ++flat, walk.advance()) {
    double v = 1.0;
    for (std::size_t r = 0; r < per_axis.size(); ++r) v *= per_axis[r][walk[r]];
    w[flat] = v;
  }
  return w;
}

// T(k) = sum_a inv_mass[a] * k_a^2 over the full grid
inline RealVector kinetic_weights(const HamiltonianModel& m) {
  std::vector<std::vector<double>> q(m.grid.rank());
  for (std::size_t a = 0; a < m.grid.rank(); ++a) {
    const auto k = wavenumbers(m.grid.axes[a]);
    q[a].resize(k.size());
    for (std::size_t j = 0; j < k.size(); ++j) q[a][j] = m.inv_mass[a] * k[j] * k[j];
  }
  RealVector w(total_points(m.grid), 0.0);
  IndexWalker walk(m.grid);
  for (std::size_t flat = 0; flat < w.size(); ++flat, walk.advance()) {
    double v = 0.0;
    for (std::size_t r = 0; r < q.size(); ++r) v += q[r][walk[r]];
    w[flat] = v;
  }
  return w;
}

}  // namespace detail

// exp(-T d_tau / 2) |psi>: forward transform, diagonal decay, back
inline WaveFunction kinetic_half_step(const WaveFunction& psi, const HamiltonianModel& model,
                                      double d_tau) {
  validate_model(model);
  check_same_grid(psi.grid, model.grid, "kinetic_half_step");
  if (!(d_tau > 0.0)) throw ConfigError("imaginary-time step must be positive");

  const auto factors = detail::kinetic_decay_factors(model, 0.5 * d_tau);
  FftEngine engine(model.grid, thread_count());
  WaveFunction out = psi;
  engine.forward(out.amplitudes);
  IndexWalker walk(model.grid);
  for (std::size_t flat = 0; flat < out.amplitudes.size(); ++flat, walk.advance()) {
    double w = 1.0;
    for (std::size_t r = 0; r < model.grid.rank(); ++r) w *= factors[r][walk[r]];
    out.amplitudes[flat] *= w;
  }
  engine.backward(out.amplitudes);
  return out;
}

// exp(-V d_tau) |psi>: diagonal in real space, no transform involved
inline WaveFunction potential_full_step(const WaveFunction& psi, const HamiltonianModel& model,
                                        double d_tau) {
  validate_model(model);
  check_same_grid(psi.grid, model.grid, "potential_full_step");
  if (!(d_tau > 0.0)) throw ConfigError("imaginary-time step must be positive");
  WaveFunction out = psi;
  for (std::size_t i = 0; i < out.amplitudes.size(); ++i) {
    out.amplitudes[i] *= std::exp(-model.potential[i] * d_tau);
  }
  return out;
}

// One second-order split step exp(-T dt/2) exp(-V dt) exp(-T dt/2); local
// error O(dt^3), so halving dt divides the fixed-horizon error by four. No
// renormalization here; callers decide when to rescale.
inline WaveFunction trotter_step(const WaveFunction& psi, const HamiltonianModel& model,
                                 double d_tau) {
  return kinetic_half_step(potential_full_step(kinetic_half_step(psi, model, d_tau), model, d_tau),
                           model, d_tau);
}

// <psi|H|psi> with the kinetic part summed in k space and the potential part
// in real space. Each part is divided by the matching norm, so a plane wave
// returns exactly its dispersion value regardless of scaling.
inline double energy(const WaveFunction& psi, const HamiltonianModel& model) {
  validate_model(model);
  check_same_grid(psi.grid, model.grid, "energy");

  long double v_acc = 0.0L, r_acc = 0.0L;
  for (std::size_t i = 0; i < psi.amplitudes.size(); ++i) {
    const long double p = std::norm(psi.amplitudes[i]);
    v_acc += static_cast<long double>(model.potential[i]) * p;
    r_acc += p;
  }
  if (!(r_acc > 0.0L)) throw NumericError("energy of a zero state is undefined");

  const RealVector t_k = detail::kinetic_weights(model);
  FftEngine engine(model.grid, thread_count());
  ComplexVector tilde = psi.amplitudes;
  engine.forward(tilde);
  long double t_acc = 0.0L, k_acc = 0.0L;
  for (std::size_t i = 0; i < tilde.size(); ++i) {
    const long double p = std::norm(tilde[i]);
    t_acc += static_cast<long double>(t_k[i]) * p;
    k_acc += p;
  }
  return static_cast<double>(t_acc / k_acc + v_acc / r_acc);
}

// Imaginary-time projection onto the ground state. The state stays in k space
// between potential applications, so each step costs one transform pair:
//
//   psi~ *= W_half; psi = ifft(psi~); psi *= exp(-V dt); psi~ = fft(psi); psi~ *= W_half
//
// with the DFT's 1/N folded into W_half. Renormalization is a scalar rescale
// and commutes with the diagonal factors, so cadence does not change the
// projected direction. Energy is evaluated every energy_check_interval steps
// and convergence means the relative change between consecutive checks fell
// below energy_tol.
inline GroundStateResult evolve_to_ground_state(const WaveFunction& psi0,
                                                const HamiltonianModel& model,
                                                const PropagatorParams& params) {
  validate_model(model);
  validate_params(params);
  check_same_grid(psi0.grid, model.grid, "evolve_to_ground_state");

  const std::size_t n = total_points(model.grid);
  const double inv_n = 1.0 / static_cast<double>(n);

  RealVector w_half =
      detail::outer_product_tensor(model.grid, detail::kinetic_decay_factors(model, 0.5 * params.d_tau));
  const double fold = std::pow(static_cast<double>(n), -0.5);  // applied twice per step
  for (auto& w : w_half) w *= fold;

  RealVector decay(n);
  for (std::size_t i = 0; i < n; ++i) decay[i] = std::exp(-model.potential[i] * params.d_tau);

  const RealVector t_k = detail::kinetic_weights(model);

  FftEngine engine(model.grid, thread_count());
  WaveFunction work = psi0;
  normalize(work);
  std::copy(work.amplitudes.begin(), work.amplitudes.end(), engine.buf_a());
  engine.execute_forward_a();

  cdouble* A = engine.buf_a();
  const cdouble* B = engine.buf_b();

  // sum |A|^2 * dV / N, i.e. the squared norm via Parseval
  const double dv = volume_element(model.grid);
  auto k_norm_sq = [&]() {
    long double acc = 0.0L;
    for (std::size_t i = 0; i < n; ++i) acc += static_cast<long double>(std::norm(A[i]));
    return static_cast<double>(acc) * dv * inv_n;
  };

  // <H> of the current (not necessarily unit-norm) state held in A
  auto evaluate_energy = [&]() {
    long double t_acc = 0.0L, p_acc = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
      const long double p = std::norm(A[i]);
      t_acc += static_cast<long double>(t_k[i]) * p;
      p_acc += p;
    }
    engine.execute_backward_a_to_b();  // B = N * psi in real space
    long double v_acc = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
      v_acc += static_cast<long double>(model.potential[i]) *
               static_cast<long double>(std::norm(B[i]));
    }
    // the volume element cancels between numerators and the norm
    return static_cast<double>((t_acc + v_acc * inv_n) / p_acc);
  };

  PropagationReport report;
  double e_prev = evaluate_energy();
  if (!std::isfinite(e_prev)) throw NumericError("initial energy is not finite");
  report.energy_trace.push_back({0, e_prev, 1.0});

  for (std::size_t step = 1; step <= params.max_steps; ++step) {
    for (std::size_t i = 0; i < n; ++i) A[i] *= w_half[i];
    engine.execute_backward_a();
    for (std::size_t i = 0; i < n; ++i) A[i] *= decay[i];
    engine.execute_forward_a();
    for (std::size_t i = 0; i < n; ++i) A[i] *= w_half[i];
    report.steps_taken = step;

    const bool renorm_now = (step % params.renormalize_every == 0);
    const bool check_now = (step % params.energy_check_interval == 0) || step == params.max_steps;

    double prenorm = 1.0;
    if (renorm_now || check_now) {
      prenorm = std::sqrt(k_norm_sq());
      if (!std::isfinite(prenorm)) {
        throw NumericError("state norm diverged at step " + std::to_string(step) +
                           "; d_tau is too large for this potential");
      }
      if (!(prenorm > 0.0)) {
        throw NumericError("state norm collapsed to zero at step " + std::to_string(step));
      }
    }
    if (renorm_now) {
      const double scale = 1.0 / prenorm;
      for (std::size_t i = 0; i < n; ++i) A[i] *= scale;
      const double audit = std::sqrt(k_norm_sq());
      report.max_norm_error = std::max(report.max_norm_error, std::abs(audit - 1.0));
    }
    if (check_now) {
      const double e = evaluate_energy();
      if (!std::isfinite(e)) {
        std::ostringstream msg;
        msg << "energy became non-finite at step " << step
            << "; d_tau is too large for this potential's depth";
        throw NumericError(msg.str());
      }
      report.energy_trace.push_back({step, e, prenorm});
      if (std::abs(e - e_prev) / std::max(std::abs(e), 1.0) < params.energy_tol) {
        report.converged = true;
        e_prev = e;
        break;
      }
      e_prev = e;
    }
  }

  report.final_energy = e_prev;
  engine.execute_backward_a();
  for (std::size_t i = 0; i < n; ++i) work.amplitudes[i] = A[i] * inv_n;
  normalize(work);
  return {std::move(work), std::move(report)};
}

}  // namespace wpk
