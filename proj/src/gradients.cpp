#include "qcl/gradients.hpp"

#include <cmath>
#include <stdexcept>

namespace qcl {

namespace {

// Sandwich values v_n^dag A v_n are provably real for Hermitian A; assert the
// float residue instead of silently dropping it.
double real_sandwich(const Eigen::VectorXcd& v, const Eigen::MatrixXcd& a) {
  const cxd value = v.dot(a * v);  // Eigen dot conjugates the left argument
  if (std::abs(value.imag()) > tol::real_cast * std::max(1.0, std::abs(value.real())))
    throw std::runtime_error("gradients: sandwich value has non-real residue");
  return value.real();
}

Eigen::VectorXd stack_singular_values(const Eigen::MatrixXd& m) {
  return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues();
}

GradientBundle assemble_bundle(const ControlSystem& sys, const Propagation& prop,
                               const ControlVector& c, const UObjSpectrum& spec,
                               const HermitianBasis& basis,
                               const Eigen::VectorXd& phi_vector, double fidelity_value) {
  GradientBundle out;
  out.degenerate = spec.degenerate;
  out.kinematic = -spec.omega.array().sin();
  out.g_c = g_c(sys, prop, c, spec.v);
  out.g_phi = g_phi(spec.v, p_integral_backward(basis, phi_vector), sys.n_a);
  out.g_stack.resize(out.g_c.rows() + out.g_phi.rows(), out.g_c.cols());
  out.g_stack << out.g_c, out.g_phi;
  out.grad_j_c = out.g_c * out.kinematic;
  out.grad_j_phi = out.g_phi * out.kinematic;
  out.grad_f_c = (2.0 * std::sqrt(fidelity_value) / double(sys.dim())) * out.grad_j_c;
  out.singular_values = stack_singular_values(out.g_stack);
  out.singular_values_c = stack_singular_values(out.g_c);
  return out;
}

}  // namespace

Eigen::MatrixXcd q_integral(const Eigen::MatrixXcd& h_step, const Eigen::MatrixXcd& h_m,
                            double delta, int n_b) {
  const Eigen::MatrixXcd embedded =
      kron(h_m, Eigen::MatrixXcd::Identity(n_b, n_b));
  if (embedded.rows() != h_step.rows())
    throw std::invalid_argument("q_integral: control dimension incompatible with step");
  return spectral_integral(h_step, embedded, delta);
}

std::vector<Eigen::MatrixXcd> suffix_products(const Propagation& prop,
                                              const Eigen::MatrixXcd& v) {
  const std::size_t n_steps = prop.steps.size();
  std::vector<Eigen::MatrixXcd> suffix(n_steps);
  if (n_steps == 0) return suffix;
  suffix[n_steps - 1] = v;  // V_L = V
  for (std::size_t ell = n_steps - 1; ell-- > 0;)
    suffix[ell] = prop.steps[ell + 1] * suffix[ell + 1];
  return suffix;
}

Eigen::MatrixXd g_c(const ControlSystem& sys, const Propagation& prop,
                    const ControlVector& c, const Eigen::MatrixXcd& v) {
  validate_controls(sys, c);
  if (prop.controls.size() != c.size() || prop.controls != c)
    throw std::invalid_argument("g_c: stale propagation (controls mismatch)");
  const int n = sys.dim();
  if (v.rows() != n || v.cols() != n)
    throw std::invalid_argument("g_c: eigenvector matrix dimension mismatch");
  const int n_steps = sys.horizon.intervals;
  const int n_controls = sys.n_controls();
  const double delta = sys.delta();
  const std::vector<Eigen::MatrixXcd> suffix = suffix_products(prop, v);
  const Eigen::MatrixXcd eye_b = Eigen::MatrixXcd::Identity(sys.n_b, sys.n_b);
  std::vector<Eigen::MatrixXcd> embedded;
  embedded.reserve(static_cast<std::size_t>(n_controls));
  for (const auto& hm : sys.controls) embedded.push_back(kron(hm, eye_b));
  Eigen::MatrixXd out(Eigen::Index(n_steps) * n_controls, n);
  for (int ell = 0; ell < n_steps; ++ell) {
    const Eigen::MatrixXcd& v_ell = suffix[static_cast<std::size_t>(ell)];
    for (int m = 0; m < n_controls; ++m) {
      const Eigen::MatrixXcd q = spectral_integral(
          prop.step_eigs[static_cast<std::size_t>(ell)],
          embedded[static_cast<std::size_t>(m)], delta);
      const Eigen::Index row = control_index(ell, m, n_controls);
      for (int col = 0; col < n; ++col)
        out(row, col) = -real_sandwich(v_ell.col(col), q);
    }
  }
  return out;
}

std::vector<Eigen::MatrixXcd> p_integral(const HermitianBasis& basis,
                                         const Eigen::VectorXd& phi_vector) {
  const HermitianEig eig = eig_hermitian(basis.generator(phi_vector));
  std::vector<Eigen::MatrixXcd> out;
  out.reserve(basis.elements.size());
  for (const auto& bb : basis.elements) out.push_back(spectral_integral(eig, bb, 1.0));
  return out;
}

std::vector<Eigen::MatrixXcd> p_integral_backward(const HermitianBasis& basis,
                                                  const Eigen::VectorXd& phi_vector) {
  const HermitianEig eig = eig_hermitian(-basis.generator(phi_vector));
  std::vector<Eigen::MatrixXcd> out;
  out.reserve(basis.elements.size());
  for (const auto& bb : basis.elements) out.push_back(spectral_integral(eig, bb, 1.0));
  return out;
}

Eigen::MatrixXd g_phi(const Eigen::MatrixXcd& v,
                      const std::vector<Eigen::MatrixXcd>& p_backward_list, int n_a) {
  if (p_backward_list.empty()) throw std::invalid_argument("g_phi: empty integral list");
  const Eigen::Index n_b = p_backward_list.front().rows();
  if (v.rows() != n_a * n_b)
    throw std::invalid_argument("g_phi: eigenvector matrix dimension mismatch");
  const Eigen::MatrixXcd eye_a = Eigen::MatrixXcd::Identity(n_a, n_a);
  Eigen::MatrixXd out(Eigen::Index(p_backward_list.size()), v.cols());
  for (std::size_t b = 0; b < p_backward_list.size(); ++b) {
    const Eigen::MatrixXcd embedded = kron(eye_a, p_backward_list[b]);
    for (Eigen::Index col = 0; col < v.cols(); ++col)
      out(Eigen::Index(b), col) = -real_sandwich(v.col(col), embedded);
  }
  return out;
}

GradientBundle bundle(const ControlSystem& sys, const TargetSpec& w, const ControlVector& c,
                      const Eigen::VectorXd& phi_vector) {
  const Propagation prop = propagate(sys, c);
  const HermitianBasis basis = hermitian_basis(sys.n_b);
  const UObjSpectrum spec = u_obj_spectrum(
      sys, w, prop.total, expm_i_hermitian(basis.generator(phi_vector), -1.0));
  const double f = fidelity(gamma(sys, w, prop.total), sys.dim());
  return assemble_bundle(sys, prop, c, spec, basis, phi_vector, f);
}

OptPoint bundle_at_opt(const ControlSystem& sys, const TargetSpec& w,
                       const ControlVector& c) {
  return bundle_at_opt(sys, w, propagate(sys, c));
}

OptPoint bundle_at_opt(const ControlSystem& sys, const TargetSpec& w,
                       const Propagation& prop) {
  OptPoint out;
  out.eval = evaluate(sys, w, prop.total);
  UObjSpectrum spec;
  spec.u_obj = out.eval.u_obj;
  spec.omega = out.eval.omega;
  spec.v = out.eval.v;
  spec.degenerate = out.eval.degenerate;
  out.grad = assemble_bundle(sys, prop, prop.controls, spec, hermitian_basis(sys.n_b),
                             out.eval.phi_opt_vector, out.eval.fidelity);
  return out;
}

GradF grad_f(const ControlSystem& sys, const TargetSpec& w, const ControlVector& c) {
  const Propagation prop = propagate(sys, c);
  const LandscapeEval eval = evaluate(sys, w, prop.total);
  GradF out;
  out.fidelity = eval.fidelity;
  out.degenerate = eval.degenerate;
  // sqrt(F) in the chain rule makes the analytic path singular at F ~ 0, and a
  // degenerate U_obj spectrum leaves individual eigenvector sandwiches
  // basis-dependent; fall back to finite differences in both regimes.
  if (eval.fidelity <= 1e-12 || eval.degenerate) {
    out.fallback = true;
    out.grad = finite_diff_f(sys, w, prop, 1e-5);
    return out;
  }
  const Eigen::MatrixXd gc = g_c(sys, prop, c, eval.v);
  const Eigen::VectorXd kinematic = -eval.omega.array().sin();
  out.grad = (2.0 * std::sqrt(eval.fidelity) / double(sys.dim())) * (gc * kinematic);
  return out;
}

Eigen::VectorXd finite_diff_j(const ControlSystem& sys, const TargetSpec& w,
                              const ControlVector& c, const Eigen::VectorXd& phi_vector,
                              double step) {
  if (!(step > 0.0)) throw std::invalid_argument("finite_diff_j: step must be > 0");
  const Eigen::Index n_c = c.size();
  Eigen::VectorXd x(n_c + phi_vector.size());
  x << c, phi_vector;
  auto j_of = [&](const Eigen::VectorXd& point) {
    return j_extended(sys, w, propagate(sys, point.head(n_c)).total, point.tail(phi_vector.size()));
  };
  return central_difference(j_of, x, step);
}

Eigen::VectorXd finite_diff_f(const ControlSystem& sys, const TargetSpec& w,
                              const ControlVector& c, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("finite_diff_f: step must be > 0");
  auto f_of = [&](const Eigen::VectorXd& point) {
    return fidelity(gamma(sys, w, propagate(sys, point).total), sys.dim());
  };
  return central_difference(f_of, c, step);
}

Eigen::VectorXd finite_diff_f(const ControlSystem& sys, const TargetSpec& w,
                              const Propagation& prop, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("finite_diff_f: step must be > 0");
  validate_controls(sys, prop.controls);
  const int n_steps = sys.horizon.intervals;
  const int n_controls = sys.n_controls();
  if (prop.steps.size() != static_cast<std::size_t>(n_steps) ||
      prop.step_hamiltonians.size() != static_cast<std::size_t>(n_steps))
    throw std::invalid_argument("finite_diff_f: propagation does not match system horizon");
  const int n = sys.dim();
  const double delta = sys.delta();
  // prefix[ell] = U_1 .. U_{ell-1}, suffix[ell] = U_{ell+1} .. U_L, so the
  // total with step ell replaced is prefix[ell] * U_ell' * suffix[ell].
  std::vector<Eigen::MatrixXcd> prefix(static_cast<std::size_t>(n_steps));
  std::vector<Eigen::MatrixXcd> suffix(static_cast<std::size_t>(n_steps));
  prefix[0] = Eigen::MatrixXcd::Identity(n, n);
  for (int ell = 1; ell < n_steps; ++ell)
    prefix[static_cast<std::size_t>(ell)] =
        prefix[static_cast<std::size_t>(ell - 1)] * prop.steps[static_cast<std::size_t>(ell - 1)];
  suffix[static_cast<std::size_t>(n_steps - 1)] = Eigen::MatrixXcd::Identity(n, n);
  for (int ell = n_steps - 2; ell >= 0; --ell)
    suffix[static_cast<std::size_t>(ell)] =
        prop.steps[static_cast<std::size_t>(ell + 1)] * suffix[static_cast<std::size_t>(ell + 1)];
  const Eigen::MatrixXcd eye_b = Eigen::MatrixXcd::Identity(sys.n_b, sys.n_b);
  std::vector<Eigen::MatrixXcd> embedded;
  embedded.reserve(static_cast<std::size_t>(n_controls));
  for (const auto& hm : sys.controls) embedded.push_back(kron(hm, eye_b));
  Eigen::VectorXd grad(prop.controls.size());
  for (int ell = 0; ell < n_steps; ++ell) {
    auto f_at = [&](int m, double sign) {
      const Eigen::MatrixXcd h = prop.step_hamiltonians[static_cast<std::size_t>(ell)] +
                                 (sign * step) * embedded[static_cast<std::size_t>(m)];
      const Eigen::MatrixXcd total = prefix[static_cast<std::size_t>(ell)] *
                                     (expm_i_hermitian(h, delta) *
                                      suffix[static_cast<std::size_t>(ell)]);
      return fidelity(gamma(sys, w, total), sys.dim());
    };
    for (int m = 0; m < n_controls; ++m)
      grad(control_index(ell, m, n_controls)) =
          (f_at(m, 1.0) - f_at(m, -1.0)) / (2.0 * step);
  }
  return grad;
}

}  // namespace qcl
