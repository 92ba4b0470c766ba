#pragma once

#include "qcl/landscape.hpp"

// Analytic dynamic gradients of J(c, phi) = sum_n cos(omega_n) and of F(c).
// With U_obj = V e^{i Omega} V^dag and g(omega) = -sin(omega):
//   (G_c)_{ell m, n} = -v_{ell n}^dag Q_{ell m} v_{ell n},
//       Q_{ell m} = integral_0^delta e^{i t H_ell} (H_m (x) I) e^{-i t H_ell} dt,
//       V_ell = U_{ell+1} ... U_L V
//   (G_phi)_{b, n}  = -v_n^dag (I_A (x) Ptil_b) v_n,
//       Ptil_b = integral_0^1 e^{-i tau B(phi)} B_b e^{+i tau B(phi)} dtau
// grad J = G * g(omega) for the stacked G; since F = (J(c, phi_opt)/N)^2,
// grad_c F = (2 sqrt(F)/N) G_c g(omega) at phi_opt. The Ptil_b integrand runs backward (equal to Phi^dag P_b Phi for
// the forward integral P_b) so that grad_phi J matches finite differences of J
// at every phi; at phi_opt the two orientations give identical products.

namespace qcl {

struct GradientBundle {
  Eigen::MatrixXd g_c;         // (L*M) x N
  Eigen::MatrixXd g_phi;       // N_B^2 x N
  Eigen::MatrixXd g_stack;     // (L*M + N_B^2) x N, c-rows first
  Eigen::VectorXd kinematic;   // g(omega) = -sin(omega)
  Eigen::VectorXd grad_j_c;    // g_c * kinematic
  Eigen::VectorXd grad_j_phi;  // g_phi * kinematic
  Eigen::VectorXd grad_f_c;    // (2 sqrt(F)/N) * grad_j_c; equals grad_c F at phi_opt
  Eigen::VectorXd singular_values;    // of g_stack, descending
  Eigen::VectorXd singular_values_c;  // of g_c, descending
  bool degenerate = false;
};

// Landscape snapshot and gradients evaluated together at phi_opt(c).
struct OptPoint {
  LandscapeEval eval;
  GradientBundle grad;
};

struct GradF {
  Eigen::VectorXd grad;      // length L*M
  double fidelity = 0.0;
  bool fallback = false;     // finite differences used (F ~ 0 or degenerate spectrum)
  bool degenerate = false;
};

/// Q_{ell m} for one step Hamiltonian: spectral_integral over [0, delta] of the
/// embedded control h_m (x) I_{n_b}. Hermitian output.
Eigen::MatrixXcd q_integral(const Eigen::MatrixXcd& h_step, const Eigen::MatrixXcd& h_m,
                            double delta, int n_b);

/// Suffix products V_ell = U_{ell+1} ... U_L * V (V at ell = L-1 is V itself).
std::vector<Eigen::MatrixXcd> suffix_products(const Propagation& prop,
                                              const Eigen::MatrixXcd& v);

/// G_c rows in ControlVector flattening order. The propagation must carry the
/// same controls c (stale inputs rejected); v comes from u_obj_and_omega on the
/// same (c, phi). Entries are provably real; the imaginary residue is asserted
/// below tol::real_cast.
Eigen::MatrixXd g_c(const ControlSystem& sys, const Propagation& prop,
                    const ControlVector& c, const Eigen::MatrixXcd& v);

/// Forward rotation integrals P_b = integral_0^1 e^{+i tau B} B_b e^{-i tau B} dtau.
std::vector<Eigen::MatrixXcd> p_integral(const HermitianBasis& basis,
                                         const Eigen::VectorXd& phi_vector);

/// Backward rotation integrals Ptil_b (see header comment); the list g_phi consumes.
std::vector<Eigen::MatrixXcd> p_integral_backward(const HermitianBasis& basis,
                                                  const Eigen::VectorXd& phi_vector);

/// G_phi rows, one per basis element, from the backward integrals.
Eigen::MatrixXd g_phi(const Eigen::MatrixXcd& v,
                      const std::vector<Eigen::MatrixXcd>& p_backward_list, int n_a);

/// Full gradient bundle at an arbitrary (c, phi).
GradientBundle bundle(const ControlSystem& sys, const TargetSpec& w, const ControlVector& c,
                      const Eigen::VectorXd& phi_vector);

/// Landscape evaluation plus gradient bundle at phi_opt(c).
OptPoint bundle_at_opt(const ControlSystem& sys, const TargetSpec& w,
                       const ControlVector& c);

/// As above, reusing an existing propagation of the same controls (one full
/// propagate is the dominant cost of an optimizer iteration).
OptPoint bundle_at_opt(const ControlSystem& sys, const TargetSpec& w,
                       const Propagation& prop);

/// grad_c F at phi_opt. Falls back to central finite differences (with the
/// fallback flag set) when F <= 1e-12 or the U_obj spectrum is degenerate.
GradF grad_f(const ControlSystem& sys, const TargetSpec& w, const ControlVector& c);

/// Central finite differences of J over every coordinate of (c, phi).
Eigen::VectorXd finite_diff_j(const ControlSystem& sys, const TargetSpec& w,
                              const ControlVector& c, const Eigen::VectorXd& phi_vector,
                              double step);

/// Central finite differences of F over c.
Eigen::VectorXd finite_diff_f(const ControlSystem& sys, const TargetSpec& w,
                              const ControlVector& c, double step);

/// Same central differences evaluated incrementally from a finished
/// propagation: perturbing c_{ell m} changes only step ell, so each probe
/// re-exponentiates that one step between cached prefix/suffix products
/// instead of re-propagating the whole horizon. Agrees with the ControlVector
/// overload up to floating-point reassociation of the step products.
Eigen::VectorXd finite_diff_f(const ControlSystem& sys, const TargetSpec& w,
                              const Propagation& prop, double step);

/// Generic central-difference gradient of a scalar function, one coordinate at
/// a time: (f(x + step e_i) - f(x - step e_i)) / (2 step).
template <typename F>
Eigen::VectorXd central_difference(F&& f, const Eigen::VectorXd& x, double step) {
  Eigen::VectorXd grad(x.size());
  Eigen::VectorXd probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe(i) = x(i) + step;
    const double hi = f(probe);
    probe(i) = x(i) - step;
    const double lo = f(probe);
    probe(i) = x(i);
    grad(i) = (hi - lo) / (2.0 * step);
  }
  return grad;
}

}  // namespace qcl
