#pragma once

#include <vector>

#include "qcl/model.hpp"

// Piecewise-constant time evolution. The total propagator is the ordered
// product U(c) = U_1 U_2 ... U_L with U_ell = e^{-i delta H_ell}: U_L acts
// first in time and is the rightmost matrix factor.

namespace qcl {

struct Propagation {
  std::vector<Eigen::MatrixXcd> steps;              // U_ell, ell = 0..L-1
  Eigen::MatrixXcd total;                           // U(c)
  std::vector<Eigen::MatrixXcd> step_hamiltonians;  // H_ell
  std::vector<HermitianEig> step_eigs;              // eig(H_ell), reused by gradients
  ControlVector controls;  // the c this propagation was built from
};

/// H_ell = H_0 + sum_m c_{ell m} (H_m (x) I_{N_B}).
std::vector<Eigen::MatrixXcd> step_hamiltonians(const ControlSystem& sys,
                                                const ControlVector& c);

/// Step unitaries and their ordered product (right-to-left accumulation).
Propagation propagate(const ControlSystem& sys, const ControlVector& c);

}  // namespace qcl
