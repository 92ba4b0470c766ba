#include "qcl/model.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace qcl {

namespace {

Eigen::Matrix2cd pauli(char axis) {
  Eigen::Matrix2cd s;
  switch (axis) {
    case 'x': s << 0, 1, 1, 0; break;
    case 'y': s << 0, cxd(0, -1), cxd(0, 1), 0; break;
    default:  s << 1, 0, 0, -1; break;
  }
  return s;
}

// sigma_s acting on bath spin q out of q_b (slot 0 leftmost).
Eigen::MatrixXcd bath_pauli(int q_b, int q, char axis) {
  Eigen::MatrixXcd op = Eigen::MatrixXcd::Identity(1, 1);
  for (int slot = 0; slot < q_b; ++slot) {
    const Eigen::MatrixXcd factor =
        slot == q ? Eigen::MatrixXcd(pauli(axis)) : Eigen::MatrixXcd::Identity(2, 2);
    op = kron(op, factor);
  }
  return op;
}

void validate_horizon(const Horizon& horizon) {
  if (horizon.intervals < 1)
    throw std::invalid_argument("ControlSystem: interval count L must be >= 1");
  if (!(horizon.t_final > 0.0))
    throw std::invalid_argument("ControlSystem: t_final must be > 0");
}

}  // namespace

double Rng::uniform() { return double(next() >> 11) * 0x1.0p-53; }

double Rng::gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  // Box-Muller with u1 bounded away from zero.
  double u1 = uniform();
  if (u1 < 1e-300) u1 = 1e-300;
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  have_spare_ = true;
  return radius * std::cos(angle);
}

Eigen::VectorXd Rng::gaussian_vector(Eigen::Index n) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = gaussian();
  return v;
}

Eigen::MatrixXcd Rng::complex_gaussian(Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXcd m(rows, cols);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = gaussian();
      const double im = gaussian();
      m(i, j) = cxd(re, im) * inv_sqrt2;
    }
  return m;
}

Eigen::MatrixXcd Rng::hermitian(Eigen::Index n) {
  const Eigen::MatrixXcd g = complex_gaussian(n, n);
  Eigen::MatrixXcd h = 0.5 * (g + g.adjoint());
  const Eigen::VectorXd evals =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(h).eigenvalues();
  const double norm = evals.cwiseAbs().maxCoeff();
  if (norm > 0.0) h /= norm;
  return h;
}

Eigen::MatrixXcd Rng::haar_unitary(Eigen::Index n) {
  const Eigen::MatrixXcd g = complex_gaussian(n, n);
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix the R-diagonal phases so the draw is Haar-distributed.
  for (Eigen::Index i = 0; i < n; ++i) {
    const cxd d = r(i, i);
    q.col(i) *= std::abs(d) > 0.0 ? d / std::abs(d) : cxd(1.0, 0.0);
  }
  return q;
}

ControlSystem build_central_spin(int q_b, const Eigen::VectorXd& couplings,
                                 Horizon horizon) {
  if (q_b < 1) throw std::invalid_argument("build_central_spin: q_b must be >= 1");
  if (couplings.size() != q_b)
    throw std::invalid_argument("build_central_spin: couplings length must equal q_b");
  validate_horizon(horizon);
  const int n_b = 1 << q_b;
  ControlSystem sys;
  sys.n_a = 2;
  sys.n_b = n_b;
  sys.horizon = horizon;
  sys.h0 = kron(pauli('y'), Eigen::MatrixXcd::Identity(n_b, n_b));
  for (int q = 0; q < q_b; ++q)
    for (char axis : {'x', 'y', 'z'})
      sys.h0 += couplings(q) * kron(pauli(axis), bath_pauli(q_b, q, axis));
  sys.controls = {pauli('z')};
  return sys;
}

ControlSystem build_random_bath(int n_b, std::uint64_t seed, Horizon horizon) {
  if (n_b < 1) throw std::invalid_argument("build_random_bath: n_b must be >= 1");
  validate_horizon(horizon);
  Rng rng(seed);
  ControlSystem sys;
  sys.n_a = 2;
  sys.n_b = n_b;
  sys.horizon = horizon;
  sys.h0 = kron(pauli('z'), rng.hermitian(n_b));
  sys.controls = {pauli('x')};
  return sys;
}

ControlSystem build_custom(const Eigen::MatrixXcd& h0,
                           const std::vector<Eigen::MatrixXcd>& controls, int n_a, int n_b,
                           Horizon horizon) {
  if (n_a < 1 || n_b < 1)
    throw std::invalid_argument("build_custom: dimensions must be >= 1");
  validate_horizon(horizon);
  const int n = n_a * n_b;
  if (h0.rows() != n || h0.cols() != n)
    throw std::invalid_argument("build_custom: h0 dimension must equal n_a * n_b");
  if (!is_hermitian(h0)) throw std::invalid_argument("build_custom: h0 not Hermitian");
  if (controls.empty()) throw std::invalid_argument("build_custom: need M >= 1 controls");
  for (const auto& hm : controls) {
    if (hm.rows() != n_a || hm.cols() != n_a)
      throw std::invalid_argument("build_custom: control dimension must equal n_a");
    if (!is_hermitian(hm))
      throw std::invalid_argument("build_custom: control not Hermitian");
  }
  ControlSystem sys;
  sys.n_a = n_a;
  sys.n_b = n_b;
  sys.h0 = h0;
  sys.controls = controls;
  sys.horizon = horizon;
  return sys;
}

TargetSpec random_target(int n_a, std::uint64_t seed) {
  if (n_a < 1) throw std::invalid_argument("random_target: n_a must be >= 1");
  Rng rng(seed);
  return {rng.haar_unitary(n_a)};
}

void validate_controls(const ControlSystem& sys, const ControlVector& c) {
  const Eigen::Index expected =
      Eigen::Index(sys.horizon.intervals) * Eigen::Index(sys.n_controls());
  if (c.size() != expected)
    throw std::invalid_argument("controls: expected length L*M");
  if (!c.allFinite()) throw std::invalid_argument("controls: non-finite entries");
}

}  // namespace qcl
