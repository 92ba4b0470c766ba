#include "qcl/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qcl {

namespace {

void require_square(const Eigen::MatrixXcd& x, const char* who) {
  if (x.rows() != x.cols())
    throw std::invalid_argument(std::string(who) + ": matrix must be square");
}

void require_finite(const Eigen::MatrixXcd& x, const char* who) {
  if (!x.allFinite())
    throw std::invalid_argument(std::string(who) + ": non-finite entries");
}

}  // namespace

bool is_hermitian(const Eigen::MatrixXcd& x) {
  if (x.rows() != x.cols() || !x.allFinite()) return false;
  const double scale = std::max(1.0, x.cwiseAbs().maxCoeff());
  return (x - x.adjoint()).cwiseAbs().maxCoeff() <= tol::hermitian_rel * scale;
}

bool is_unitary(const Eigen::MatrixXcd& x) {
  if (x.rows() != x.cols() || !x.allFinite()) return false;
  const Eigen::MatrixXcd gram = x.adjoint() * x;
  return (gram - Eigen::MatrixXcd::Identity(x.rows(), x.cols())).cwiseAbs().maxCoeff() <=
         tol::unitary_abs;
}

HermitianEig eig_hermitian(const Eigen::MatrixXcd& h) {
  require_square(h, "eig_hermitian");
  require_finite(h, "eig_hermitian");
  if (!is_hermitian(h)) throw std::invalid_argument("eig_hermitian: input not Hermitian");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eig_hermitian: eigensolver failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

Eigen::MatrixXcd expm_i_hermitian(const Eigen::MatrixXcd& h, double t) {
  const HermitianEig eig = eig_hermitian(h);
  const Eigen::VectorXcd phase =
      (cxd(0.0, -t) * eig.values.cast<cxd>().array()).exp().matrix();
  return eig.vectors * phase.asDiagonal() * eig.vectors.adjoint();
}

UnitaryEig eig_unitary(const Eigen::MatrixXcd& u) {
  require_square(u, "eig_unitary");
  require_finite(u, "eig_unitary");
  if (!is_unitary(u)) throw std::invalid_argument("eig_unitary: input not unitary");
  // A unitary matrix is normal, so its Schur form is diagonal and the Schur
  // vectors are eigenvectors.
  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(u);
  if (schur.info() != Eigen::Success)
    throw std::runtime_error("eig_unitary: Schur decomposition failed");
  const Eigen::Index n = u.rows();
  Eigen::VectorXd phases(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double w = std::arg(schur.matrixT()(i, i));  // arg yields (-pi, pi]
    if (w <= -std::numbers::pi) w = std::numbers::pi;
    phases(i) = w;
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return phases(a) > phases(b); });
  UnitaryEig out;
  out.phases.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.phases(i) = phases(order[static_cast<std::size_t>(i)]);
    out.vectors.col(i) = schur.matrixU().col(order[static_cast<std::size_t>(i)]);
  }
  return out;
}

Svd svd(const Eigen::MatrixXcd& a) {
  require_finite(a, "svd");
  Eigen::JacobiSVD<Eigen::MatrixXcd> solver(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return {solver.matrixU(), solver.singularValues(), solver.matrixV()};
}

Eigen::MatrixXcd spectral_integral(const Eigen::MatrixXcd& h, const Eigen::MatrixXcd& x,
                                   double t_max) {
  if (h.rows() != x.rows() || h.cols() != x.cols())
    throw std::invalid_argument("spectral_integral: dimension mismatch");
  return spectral_integral(eig_hermitian(h), x, t_max);
}

Eigen::MatrixXcd spectral_integral(const HermitianEig& eig, const Eigen::MatrixXcd& x,
                                   double t_max) {
  if (eig.vectors.rows() != x.rows() || eig.vectors.cols() != x.cols())
    throw std::invalid_argument("spectral_integral: dimension mismatch");
  if (!(t_max > 0.0)) throw std::invalid_argument("spectral_integral: t_max must be > 0");
  const Eigen::Index n = x.rows();
  const double gap_floor =
      tol::spectral_gap_rel * std::max(1.0, eig.values.cwiseAbs().maxCoeff());
  Eigen::MatrixXcd y = eig.vectors.adjoint() * x * eig.vectors;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = 0; k < n; ++k) {
      const double gap = eig.values(j) - eig.values(k);
      const cxd psi = std::abs(gap) <= gap_floor
                          ? cxd(t_max, 0.0)
                          : (std::exp(cxd(0.0, t_max * gap)) - 1.0) / cxd(0.0, gap);
      y(j, k) *= psi;
    }
  }
  return eig.vectors * y * eig.vectors.adjoint();
}

Eigen::MatrixXcd HermitianBasis::generator(const Eigen::VectorXd& phi) const {
  if (phi.size() != static_cast<Eigen::Index>(elements.size()))
    throw std::invalid_argument("HermitianBasis::generator: phi length mismatch");
  Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(dim, dim);
  for (Eigen::Index i = 0; i < phi.size(); ++i)
    b += phi(i) * elements[static_cast<std::size_t>(i)];
  return b;
}

Eigen::VectorXd HermitianBasis::coefficients(const Eigen::MatrixXcd& g) const {
  if (g.rows() != dim || g.cols() != dim)
    throw std::invalid_argument("HermitianBasis::coefficients: dimension mismatch");
  Eigen::VectorXd phi(static_cast<Eigen::Index>(elements.size()));
  for (std::size_t b = 0; b < elements.size(); ++b)
    phi(static_cast<Eigen::Index>(b)) = (elements[b].adjoint() * g).trace().real();
  return phi;
}

HermitianBasis hermitian_basis(int n) {
  if (n < 1) throw std::invalid_argument("hermitian_basis: n must be >= 1");
  HermitianBasis basis;
  basis.dim = n;
  basis.elements.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  basis.elements.push_back(Eigen::MatrixXcd::Identity(n, n) / std::sqrt(double(n)));
  for (int k = 1; k < n; ++k) {
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(n, n);
    for (int j = 0; j < k; ++j) d(j, j) = 1.0;
    d(k, k) = -double(k);
    basis.elements.push_back(d / std::sqrt(double(k) * double(k + 1)));
  }
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      Eigen::MatrixXcd sym = Eigen::MatrixXcd::Zero(n, n);
      sym(j, k) = inv_sqrt2;
      sym(k, j) = inv_sqrt2;
      basis.elements.push_back(sym);
      Eigen::MatrixXcd asym = Eigen::MatrixXcd::Zero(n, n);
      asym(j, k) = cxd(0.0, -inv_sqrt2);
      asym(k, j) = cxd(0.0, inv_sqrt2);
      basis.elements.push_back(asym);
    }
  }
  return basis;
}

Eigen::MatrixXcd log_unitary(const Eigen::MatrixXcd& u) {
  const UnitaryEig eig = eig_unitary(u);
  const Eigen::MatrixXcd g =
      eig.vectors * eig.phases.cast<cxd>().asDiagonal() * eig.vectors.adjoint();
  return 0.5 * (g + g.adjoint());  // symmetrize away float drift
}

}  // namespace qcl
