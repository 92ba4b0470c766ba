#pragma once

#include "qcl/propagate.hpp"

// Landscape evaluation. With R(c) = (W (x) I)^dag U(c) and Gamma(c) the sum of
// the N_A diagonal N_B x N_B blocks of R(c):
//   F(c)            = (||Gamma||_nuc / N)^2
//   J(c, phi)       = Re Tr[(W (x) e^{i B(phi)})^dag U(c)]
//   Phi_opt         = T_left T_right^dag from the SVD of Gamma
//   J(c, phi_opt)   = ||Gamma||_nuc = N sqrt(F)
// U_obj = (W (x) Phi)^dag U decomposes as V e^{i Omega} V^dag with spectral
// frequencies omega; J = sum_n cos(omega_n).

namespace qcl {

struct PhiOpt {
  Eigen::MatrixXcd matrix;  // unitary Phi_opt
  Eigen::VectorXd vector;   // phi_opt, coefficients of -i log Phi_opt in hermitian_basis
};

struct UObjSpectrum {
  Eigen::MatrixXcd u_obj;
  Eigen::VectorXd omega;  // descending, principal branch
  Eigen::MatrixXcd v;
  bool degenerate = false;  // min eigenphase gap (circular) < tol::degeneracy_gap
};

struct LandscapeEval {
  Eigen::MatrixXcd gamma;
  double fidelity = 0.0;  // F in [0, 1]
  double j_value = 0.0;   // J at phi_opt, equals N sqrt(F)
  Eigen::VectorXd gamma_singular_values;
  Eigen::MatrixXcd phi_opt_matrix;
  Eigen::VectorXd phi_opt_vector;
  Eigen::MatrixXcd u_obj;
  Eigen::VectorXd omega;
  Eigen::MatrixXcd v;
  bool degenerate = false;
};

struct KinematicPoint {
  Eigen::VectorXd omega;
  double j = 0.0;                 // sum cos(omega)
  Eigen::VectorXd gradient;       // -sin(omega)
  Eigen::VectorXd hessian_diag;   // -cos(omega)
};

/// Gamma(c) = sum_a [R(c)]_{aa block} for R = (W (x) I)^dag u_total.
Eigen::MatrixXcd gamma(const ControlSystem& sys, const TargetSpec& w,
                       const Eigen::MatrixXcd& u_total);

/// F = (sum of singular values of gamma / n)^2.
double fidelity(const Eigen::MatrixXcd& gamma, int n);

/// Maximizer of Re Tr(Phi^dag Gamma) over unitaries, plus its generator
/// coefficients. Non-unique when Gamma is rank-deficient; the SVD-derived
/// choice is returned as-is.
PhiOpt phi_opt(const Eigen::MatrixXcd& gamma);

/// J(c, phi) = Re Tr[(W (x) e^{i B(phi)})^dag u_total].
double j_extended(const ControlSystem& sys, const TargetSpec& w,
                  const Eigen::MatrixXcd& u_total, const Eigen::VectorXd& phi_vector);

/// U_obj and its spectral decomposition at the given phi.
UObjSpectrum u_obj_and_omega(const ControlSystem& sys, const TargetSpec& w,
                             const Eigen::MatrixXcd& u_total,
                             const Eigen::VectorXd& phi_vector);

/// As above but with an explicit unitary Phi (used at Phi_opt, where no
/// generator round-trip is needed).
UObjSpectrum u_obj_spectrum(const ControlSystem& sys, const TargetSpec& w,
                            const Eigen::MatrixXcd& u_total, const Eigen::MatrixXcd& phi);

/// Channel fidelity Tr(Gamma rho_bar Gamma^dag) / N_A^2 for a caller-supplied
/// bath density matrix; rejects non-density input.
double channel_fidelity(const Eigen::MatrixXcd& gamma, const Eigen::MatrixXcd& rho_bar,
                        int n_a);

/// Kinematic objective, gradient, and Hessian diagonal at the given omega.
KinematicPoint kinematic_point(const Eigen::VectorXd& omega);

/// Full landscape snapshot at phi_opt for the given total propagator.
LandscapeEval evaluate(const ControlSystem& sys, const TargetSpec& w,
                       const Eigen::MatrixXcd& u_total);

}  // namespace qcl
