#include "qcl/propagate.hpp"

namespace qcl {

std::vector<Eigen::MatrixXcd> step_hamiltonians(const ControlSystem& sys,
                                                const ControlVector& c) {
  validate_controls(sys, c);
  const int n_controls = sys.n_controls();
  const Eigen::MatrixXcd eye_b = Eigen::MatrixXcd::Identity(sys.n_b, sys.n_b);
  std::vector<Eigen::MatrixXcd> embedded;
  embedded.reserve(static_cast<std::size_t>(n_controls));
  for (const auto& hm : sys.controls) embedded.push_back(kron(hm, eye_b));
  std::vector<Eigen::MatrixXcd> hams;
  hams.reserve(static_cast<std::size_t>(sys.horizon.intervals));
  for (int ell = 0; ell < sys.horizon.intervals; ++ell) {
    Eigen::MatrixXcd h = sys.h0;
    for (int m = 0; m < n_controls; ++m)
      h += c(control_index(ell, m, n_controls)) * embedded[static_cast<std::size_t>(m)];
    hams.push_back(std::move(h));
  }
  return hams;
}

Propagation propagate(const ControlSystem& sys, const ControlVector& c) {
  Propagation prop;
  prop.controls = c;
  prop.step_hamiltonians = step_hamiltonians(sys, c);
  prop.steps.reserve(prop.step_hamiltonians.size());
  prop.step_eigs.reserve(prop.step_hamiltonians.size());
  const double delta = sys.delta();
  for (const auto& h : prop.step_hamiltonians) {
    HermitianEig eig = eig_hermitian(h);
    // Same construction as expm_i_hermitian, sharing the eigendecomposition.
    const Eigen::VectorXcd phase =
        (cxd(0.0, -delta) * eig.values.cast<cxd>().array()).exp().matrix();
    prop.steps.push_back(eig.vectors * phase.asDiagonal() * eig.vectors.adjoint());
    prop.step_eigs.push_back(std::move(eig));
  }
  // U(c) = U_1 ... U_L accumulated right to left: U_L is applied first in time.
  Eigen::MatrixXcd total = Eigen::MatrixXcd::Identity(sys.dim(), sys.dim());
  for (auto it = prop.steps.rbegin(); it != prop.steps.rend(); ++it) total = *it * total;
  prop.total = std::move(total);
  return prop;
}

}  // namespace qcl
