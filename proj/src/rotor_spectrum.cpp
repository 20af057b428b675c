#include "rotorsim/rotor_spectrum.hpp"

#include <cmath>
#include <vector>

namespace rotorsim {

Eigen::MatrixXd build_rotor_hamiltonian(double barrier_height, const FourierBasis& basis) {
  const int dim = basis.dimension();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (int a = 0; a < dim; ++a) {
    const double j = basis.momentum_at(a);
    h(a, a) = j * j + 0.5 * barrier_height;
    if (a + 1 < dim) {
      // (u/2) cos q couples j and j +/- 1 with <chi_j|cos q|chi_j'> = 1/2
      h(a, a + 1) = 0.25 * barrier_height;
      h(a + 1, a) = 0.25 * barrier_height;
    }
  }
  return h;
}

void fix_eigenvector_phases(Eigen::MatrixXcd& vectors) {
  for (int c = 0; c < vectors.cols(); ++c) {
    int lead = 0;
    double best = -1.0;
    for (int r = 0; r < vectors.rows(); ++r) {
      const double mag = std::abs(vectors(r, c));
      if (mag > best) {
        best = mag;
        lead = r;
      }
    }
    if (best <= 0.0) continue;
    const Complex rot = std::conj(vectors(lead, c)) / best;
    vectors.col(c) *= rot;
  }
}

RotorSpectrum RotorSpectrum::diagonalize(const Eigen::MatrixXd& hamiltonian,
                                         double barrier_height, const FourierBasis& basis) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hamiltonian);
  if (solver.info() != Eigen::Success)
    throw EigensolverError(static_cast<int>(hamiltonian.rows()));

  RotorSpectrum s;
  s.barrier_height_ = barrier_height;
  s.basis_ = basis;
  s.energies_ = solver.eigenvalues();
  s.coefficients_ = solver.eigenvectors().cast<Complex>();
  fix_eigenvector_phases(s.coefficients_);
  return s;
}

RotorSpectrum RotorSpectrum::solve(double barrier_height, const FourierBasis& basis) {
  return diagonalize(build_rotor_hamiltonian(barrier_height, basis), barrier_height, basis);
}

RotorSpectrum RotorSpectrum::free_rotor(const FourierBasis& basis) {
  const int dim = basis.dimension();
  RotorSpectrum s;
  s.barrier_height_ = 0.0;
  s.basis_ = basis;
  s.energies_.resize(dim);
  s.coefficients_ = Eigen::MatrixXcd::Zero(dim, dim);
  int level = 0;
  for (int j = 0; j <= basis.j_max; ++j) {
    for (int sign : {+1, -1}) {
      if (j == 0 && sign < 0) continue;
      s.energies_(level) = static_cast<double>(j) * j;
      s.coefficients_(basis.index_of(sign * j), level) = 1.0;
      ++level;
    }
  }
  return s;
}

RotorSpectrum::ValueDeriv RotorSpectrum::eval(int level, double angle) const {
  Complex value{0.0, 0.0};
  Complex deriv{0.0, 0.0};
  for (int a = 0; a < basis_.dimension(); ++a) {
    const int j = basis_.momentum_at(a);
    const Complex term = coefficients_(a, level) * fourier_mode(j, angle);
    value += term;
    deriv += Complex(0.0, static_cast<double>(j)) * term;
  }
  return {value, deriv};
}

void RotorSpectrum::eval_levels(double angle, int count, Complex* values,
                                Complex* derivs) const {
  const int jm = basis_.j_max;
  const int dim = basis_.dimension();
  thread_local std::vector<Complex> modes;
  modes.resize(dim);

  // chain from j = 0 upward; the negative branch is the exact conjugate
  const Complex step = std::polar(1.0, angle);
  const double norm = 1.0 / std::sqrt(two_pi);
  modes[basis_.index_of(0)] = Complex(norm, 0.0);
  for (int j = 1; j <= jm; ++j) {
    modes[basis_.index_of(j)] = modes[basis_.index_of(j - 1)] * step;
    modes[basis_.index_of(-j)] = std::conj(modes[basis_.index_of(j)]);
  }

  for (int m = 0; m < count; ++m) {
    Complex value{0.0, 0.0};
    Complex deriv{0.0, 0.0};
    for (int a = 0; a < dim; ++a) {
      const Complex term = coefficients_(a, m) * modes[a];
      value += term;
      deriv += Complex(0.0, static_cast<double>(basis_.momentum_at(a))) * term;
    }
    values[m] = value;
    derivs[m] = deriv;
  }
}

Eigen::MatrixXcd RotorSpectrum::shift_operator(int shift, int count) const {
  // <chi_j | e^{ilq} | chi_j'> = delta_{j, j'+l}
  Eigen::MatrixXcd op = Eigen::MatrixXcd::Zero(count, count);
  const int jm = basis_.j_max;
  for (int m = 0; m < count; ++m)
    for (int mp = 0; mp < count; ++mp) {
      Complex sum{0.0, 0.0};
      for (int jp = -jm; jp <= jm; ++jp) {
        const int j = jp + shift;
        if (j < -jm || j > jm) continue;
        sum += std::conj(coefficients_(basis_.index_of(j), m)) *
               coefficients_(basis_.index_of(jp), mp);
      }
      op(m, mp) = sum;
    }
  return op;
}

}  // namespace rotorsim
