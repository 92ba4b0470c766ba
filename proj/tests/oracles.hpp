#pragma once

#include <Eigen/Dense>
#include <complex>

// Independent reference implementations used only by tests. Nothing here
// shares a code path with the library kernels it checks: the exponential is a
// scaled-and-squared Taylor series, integrals are composite trapezoid sums,
// and the nuclear norm comes from the Gram eigenvalues.

namespace oracle {

using cxd = std::complex<double>;

/// e^A via Taylor series after scaling A below norm 1/4, then squaring back.
inline Eigen::MatrixXcd taylor_expm(const Eigen::MatrixXcd& a) {
  const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  double scale = 1.0;
  while (norm * scale > 0.25) {
    scale *= 0.5;
    ++squarings;
  }
  const Eigen::MatrixXcd s = a * scale;
  Eigen::MatrixXcd term = Eigen::MatrixXcd::Identity(a.rows(), a.cols());
  Eigen::MatrixXcd sum = term;
  for (int k = 1; k < 64; ++k) {
    term = (term * s) / double(k);
    sum += term;
    if (term.cwiseAbs().maxCoeff() < 1e-18) break;
  }
  for (int k = 0; k < squarings; ++k) sum = sum * sum;
  return sum;
}

/// Composite trapezoid approximation of the conjugation integral
/// int_0^{t_max} e^{i tau h} x e^{-i tau h} d tau (h Hermitian).
inline Eigen::MatrixXcd conjugation_integral(const Eigen::MatrixXcd& h,
                                             const Eigen::MatrixXcd& x, double t_max,
                                             int panels) {
  const double dt = t_max / panels;
  const Eigen::MatrixXcd e_step = taylor_expm(cxd(0.0, dt) * h);
  Eigen::MatrixXcd e = Eigen::MatrixXcd::Identity(h.rows(), h.cols());
  Eigen::MatrixXcd acc = 0.5 * x;
  for (int k = 1; k <= panels; ++k) {
    e = e * e_step;
    const Eigen::MatrixXcd f = e * x * e.adjoint();
    acc += (k == panels) ? 0.5 * f : f;
  }
  return acc * dt;
}

/// Kronecker product straight from its four-index definition.
inline Eigen::MatrixXcd kron_loop(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      for (Eigen::Index k = 0; k < b.rows(); ++k)
        for (Eigen::Index l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

/// Nuclear norm as Tr sqrt(A^dag A) via the Gram matrix eigenvalues.
inline double nuclear_norm_gram(const Eigen::MatrixXcd& a) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a.adjoint() * a);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    sum += std::sqrt(std::max(es.eigenvalues()(i), 0.0));
  return sum;
}

/// K = int_0^1 conj(e^{i tau B}) (x) e^{i tau B} d tau, so that
/// vec(int e^{i tau B} X e^{-i tau B} d tau) = K vec(X).
inline Eigen::MatrixXcd k_matrix(const Eigen::MatrixXcd& b, int panels) {
  const Eigen::Index n = b.rows();
  const double dt = 1.0 / panels;
  const Eigen::MatrixXcd e_step = taylor_expm(cxd(0.0, dt) * b);
  Eigen::MatrixXcd e = Eigen::MatrixXcd::Identity(n, n);
  Eigen::MatrixXcd acc = 0.5 * kron_loop(e.conjugate(), e);
  for (int k = 1; k <= panels; ++k) {
    e = e * e_step;
    const Eigen::MatrixXcd f = kron_loop(e.conjugate(), e);
    acc += (k == panels) ? 0.5 * f : f;
  }
  return acc * dt;
}

}  // namespace oracle
