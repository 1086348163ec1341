#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>
#include <vector>

#include "wpk/errors.hpp"
#include "wpk/grid.hpp"
#include "wpk/hamiltonian.hpp"
#include "wpk/wavefunction.hpp"

namespace wpk {

// Brute-force reference route: materialize H as a dense matrix and
// diagonalize. Deliberately shares no transform code with the fast engine;
// the kinetic block is built from explicit DFT cosine sums so that the two
// paths can disagree when one of them is wrong.

// Exact Fourier differentiation matrix for one periodic axis, scaled by the
// kinetic coefficient: a circulant with first row
//   t[d] = (1/n) sum_m inv_mass * k_m^2 * cos(2 pi f_m d / n).
// Applying it to a discrete plane wave returns inv_mass * k^2 times the wave,
// the same dispersion the engine applies diagonally in k space.
inline Eigen::MatrixXd spectral_kinetic_matrix(const AxisSpec& axis, double inv_mass) {
  const auto k = wavenumbers(axis);
  const std::size_t n = axis.n_points;
  std::vector<double> t(n, 0.0);
  // the row is even in d (cosines of integer multiples of 2 pi), so compute
  // only half and mirror; this keeps the matrix symmetric to the last bit
  for (std::size_t d = 0; d <= n / 2; ++d) {
    long double acc = 0.0L;
    for (std::size_t m = 0; m < n; ++m) {
      const double f = (m < n / 2) ? static_cast<double>(m)
                                   : static_cast<double>(m) - static_cast<double>(n);
      const double phase = 2.0 * std::numbers::pi * f * static_cast<double>(d) /
                           static_cast<double>(n);
      acc += static_cast<long double>(inv_mass * k[m] * k[m] * std::cos(phase));
    }
    t[d] = static_cast<double>(acc / static_cast<long double>(n));
    t[(n - d) % n] = t[d];
  }
  Eigen::MatrixXd mat(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t l = 0; l < n; ++l) {
      mat(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l)) = t[(j + n - l) % n];
    }
  }
  return mat;
}

// Second-order finite-difference alternative. Much less accurate than the
// spectral matrix on coarse grids (errors at the 1e-3 level are normal); kept
// as an extra cross-check that does not share the plane-wave assumptions.
inline Eigen::MatrixXd fd_kinetic_matrix(const AxisSpec& axis, double inv_mass) {
  validate_axis(axis);
  const auto n = static_cast<Eigen::Index>(axis.n_points);
  const double c = inv_mass / (axis.step * axis.step);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    m(j, j) = 2.0 * c;
    m(j, (j + 1) % n) -= c;
    m(j, (j + n - 1) % n) -= c;
  }
  return m;
}

class DenseHamiltonian {
 public:
  static constexpr std::size_t max_dimension = 4096;

  explicit DenseHamiltonian(const HamiltonianModel& model) : model_(model) {
    validate_model(model_);
    const std::size_t n = total_points(model_.grid);
    if (n > max_dimension) {
      throw ConfigError("dense reference limited to " + std::to_string(max_dimension) +
                        " grid elements, got " + std::to_string(n));
    }
    const auto dim = static_cast<Eigen::Index>(n);
    h_ = Eigen::MatrixXd::Zero(dim, dim);

    // kinetic part: one circulant block per axis, embedded along its stride
    const auto strides = row_major_strides(model_.grid);
    for (std::size_t axis = 0; axis < model_.grid.rank(); ++axis) {
      const Eigen::MatrixXd k1d = spectral_kinetic_matrix(model_.grid.axes[axis],
                                                          model_.inv_mass[axis]);
      const std::size_t n_axis = model_.grid.axes[axis].n_points;
      const std::size_t stride = strides[axis];
      IndexWalker walk(model_.grid);
      for (std::size_t row = 0; row < n; ++row, walk.advance()) {
        const std::size_t i_axis = walk[axis];
        const std::size_t base = row - i_axis * stride;
        for (std::size_t l = 0; l < n_axis; ++l) {
          h_(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(base + l * stride)) +=
              k1d(static_cast<Eigen::Index>(i_axis), static_cast<Eigen::Index>(l));
        }
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      h_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) += model_.potential[i];
    }

    const double asym = (h_ - h_.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12) {
      std::ostringstream what;
      what << "dense Hamiltonian assembly lost symmetry: " << asym;
      throw NumericError(what.str());
    }
    h_ = ((h_ + h_.transpose()) * 0.5).eval();
  }

  const HamiltonianModel& model() const { return model_; }
  const Eigen::MatrixXd& matrix() const { return h_; }

  double ground_energy() const { return eig().eigenvalues()(0); }

  // Lowest eigenvector as a unit-norm state on the grid, sign fixed so the
  // largest-magnitude amplitude is positive.
  WaveFunction ground_state() const {
    Eigen::VectorXd v = eig().eigenvectors().col(0);
    Eigen::Index peak = 0;
    v.cwiseAbs().maxCoeff(&peak);
    if (v(peak) < 0.0) v = -v;
    WaveFunction psi = make_zero_state(model_.grid);
    const double scale = 1.0 / std::sqrt(volume_element(model_.grid));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      psi.amplitudes[static_cast<std::size_t>(i)] = v(i) * scale;
    }
    return psi;
  }

  // exp(-H tau) |psi0>, renormalized. The spectrum is shifted by E0 before
  // exponentiating, which changes only the global scale that renormalization
  // removes and keeps long tau from overflowing.
  WaveFunction imaginary_evolution(const WaveFunction& psi0, double tau) const {
    check_same_grid(psi0.grid, model_.grid, "imaginary_evolution");
    if (tau < 0.0) throw ConfigError("imaginary time must be nonnegative");
    const auto& solver = eig();
    const auto dim = static_cast<Eigen::Index>(psi0.amplitudes.size());
    Eigen::VectorXcd v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v(i) = psi0.amplitudes[static_cast<std::size_t>(i)];

    Eigen::VectorXcd c = solver.eigenvectors().transpose() * v;
    const double e0 = solver.eigenvalues()(0);
    for (Eigen::Index i = 0; i < dim; ++i) {
      c(i) *= std::exp(-(solver.eigenvalues()(i) - e0) * tau);
    }
    v = solver.eigenvectors() * c;

    WaveFunction out = make_zero_state(model_.grid);
    for (Eigen::Index i = 0; i < dim; ++i) out.amplitudes[static_cast<std::size_t>(i)] = v(i);
    normalize(out);
    return out;
  }

  // <psi|H|psi> for a unit-norm state; dense counterpart of the engine energy
  double expectation(const WaveFunction& psi) const {
    check_same_grid(psi.grid, model_.grid, "expectation");
    const auto dim = static_cast<Eigen::Index>(psi.amplitudes.size());
    Eigen::VectorXcd v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v(i) = psi.amplitudes[static_cast<std::size_t>(i)];
    const std::complex<double> e = v.dot(h_ * v) * volume_element(model_.grid);
    return e.real();
  }

 private:
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>& eig() const {
    if (!eig_) {
      eig_ = std::make_unique<Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>>(h_);
      if (eig_->info() != Eigen::Success) {
        throw NumericError("dense eigendecomposition failed to converge");
      }
    }
    return *eig_;
  }

  HamiltonianModel model_;
  Eigen::MatrixXd h_;
  mutable std::unique_ptr<Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>> eig_;
};

struct GroundState {
  double energy = 0.0;
  WaveFunction state;
};

inline GroundState exact_ground_state(const HamiltonianModel& model) {
  DenseHamiltonian h(model);
  return {h.ground_energy(), h.ground_state()};
}

inline WaveFunction exact_imaginary_evolution(const HamiltonianModel& model,
                                              const WaveFunction& psi0, double tau) {
  DenseHamiltonian h(model);
  return h.imaginary_evolution(psi0, tau);
}

}  // namespace wpk
