#include "qcl/landscape.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qcl {

namespace {

// Smallest gap between eigenphases on the circle (sorted input descending).
double min_circular_gap(const Eigen::VectorXd& omega) {
  const Eigen::Index n = omega.size();
  if (n < 2) return 2.0 * std::numbers::pi;
  double gap = 2.0 * std::numbers::pi - (omega(0) - omega(n - 1));  // wrap-around
  for (Eigen::Index i = 0; i + 1 < n; ++i) gap = std::min(gap, omega(i) - omega(i + 1));
  return gap;
}

}  // namespace

Eigen::MatrixXcd gamma(const ControlSystem& sys, const TargetSpec& w,
                       const Eigen::MatrixXcd& u_total) {
  const int n = sys.dim();
  if (w.w.rows() != sys.n_a || w.w.cols() != sys.n_a)
    throw std::invalid_argument("gamma: target dimension must equal n_a");
  if (u_total.rows() != n || u_total.cols() != n)
    throw std::invalid_argument("gamma: propagator dimension must equal n_a * n_b");
  const Eigen::MatrixXcd r =
      kron(w.w, Eigen::MatrixXcd::Identity(sys.n_b, sys.n_b)).adjoint() * u_total;
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(sys.n_b, sys.n_b);
  for (int a = 0; a < sys.n_a; ++a)
    g += r.block(a * sys.n_b, a * sys.n_b, sys.n_b, sys.n_b);
  return g;
}

double fidelity(const Eigen::MatrixXcd& gamma, int n) {
  const double nuclear = svd(gamma).q.sum();
  const double root = nuclear / double(n);
  return root * root;
}

PhiOpt phi_opt(const Eigen::MatrixXcd& gamma) {
  const Svd dec = svd(gamma);
  PhiOpt out;
  out.matrix = dec.t_left * dec.t_right.adjoint();
  out.vector = hermitian_basis(int(gamma.rows())).coefficients(log_unitary(out.matrix));
  return out;
}

double j_extended(const ControlSystem& sys, const TargetSpec& w,
                  const Eigen::MatrixXcd& u_total, const Eigen::VectorXd& phi_vector) {
  const HermitianBasis basis = hermitian_basis(sys.n_b);
  const Eigen::MatrixXcd phi = expm_i_hermitian(basis.generator(phi_vector), -1.0);
  return (kron(w.w, phi).adjoint() * u_total).trace().real();
}

UObjSpectrum u_obj_spectrum(const ControlSystem& sys, const TargetSpec& w,
                            const Eigen::MatrixXcd& u_total, const Eigen::MatrixXcd& phi) {
  UObjSpectrum out;
  out.u_obj = kron(w.w, phi).adjoint() * u_total;
  UnitaryEig eig = eig_unitary(out.u_obj);
  out.omega = std::move(eig.phases);
  out.v = std::move(eig.vectors);
  out.degenerate = min_circular_gap(out.omega) < tol::degeneracy_gap;
  return out;
}

UObjSpectrum u_obj_and_omega(const ControlSystem& sys, const TargetSpec& w,
                             const Eigen::MatrixXcd& u_total,
                             const Eigen::VectorXd& phi_vector) {
  const HermitianBasis basis = hermitian_basis(sys.n_b);
  return u_obj_spectrum(sys, w, u_total,
                        expm_i_hermitian(basis.generator(phi_vector), -1.0));
}

double channel_fidelity(const Eigen::MatrixXcd& gamma, const Eigen::MatrixXcd& rho_bar,
                        int n_a) {
  if (rho_bar.rows() != gamma.rows() || rho_bar.cols() != gamma.cols())
    throw std::invalid_argument("channel_fidelity: dimension mismatch");
  if (!is_hermitian(rho_bar))
    throw std::invalid_argument("channel_fidelity: rho_bar not Hermitian");
  if (std::abs(rho_bar.trace().real() - 1.0) > 1e-10)
    throw std::invalid_argument("channel_fidelity: rho_bar trace must be 1");
  const Eigen::VectorXd evals =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(rho_bar).eigenvalues();
  if (evals.minCoeff() < -1e-10)
    throw std::invalid_argument("channel_fidelity: rho_bar not positive semidefinite");
  const double value = (gamma * rho_bar * gamma.adjoint()).trace().real();
  return value / (double(n_a) * double(n_a));
}

KinematicPoint kinematic_point(const Eigen::VectorXd& omega) {
  KinematicPoint p;
  p.omega = omega;
  p.j = omega.array().cos().sum();
  p.gradient = -omega.array().sin();
  p.hessian_diag = -omega.array().cos();
  return p;
}

LandscapeEval evaluate(const ControlSystem& sys, const TargetSpec& w,
                       const Eigen::MatrixXcd& u_total) {
  LandscapeEval out;
  out.gamma = gamma(sys, w, u_total);
  const Svd dec = svd(out.gamma);
  out.gamma_singular_values = dec.q;
  const double nuclear = dec.q.sum();
  const double root = nuclear / double(sys.dim());
  out.fidelity = root * root;
  out.phi_opt_matrix = dec.t_left * dec.t_right.adjoint();
  // Trace route, kept independent of the singular-value sum so the identity
  // J(c, phi_opt) = N sqrt(F) stays a cross-check.
  out.j_value = (out.phi_opt_matrix.adjoint() * out.gamma).trace().real();
  out.phi_opt_vector = hermitian_basis(sys.n_b).coefficients(log_unitary(out.phi_opt_matrix));
  UObjSpectrum spec = u_obj_spectrum(sys, w, u_total, out.phi_opt_matrix);
  out.u_obj = std::move(spec.u_obj);
  out.omega = std::move(spec.omega);
  out.v = std::move(spec.v);
  out.degenerate = spec.degenerate;
  return out;
}

}  // namespace qcl
