#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

// Dense complex linear-algebra kernel: Kronecker/vec algebra, Hermitian and
// unitary eigendecompositions, matrix exponentials and logarithms, SVD,
// spectral integral transforms, and Hermitian operator bases.
//
// Conventions fixed across the library:
//   - matrices are column-major (Eigen default), vec() stacks columns.
//   - unitary eigenphases use the principal branch (-pi, pi], ordered
//     descending.
//   - all tolerances live in qcl::tol and are referenced by name.

namespace qcl {

using cxd = std::complex<double>;

namespace tol {
// Hermiticity acceptance: ||X - X^dag||_max <= hermitian_rel * max(1, ||X||_max).
inline constexpr double hermitian_rel = 1e-12;
// Unitarity acceptance: ||X^dag X - I||_max <= unitary_abs.
inline constexpr double unitary_abs = 1e-10;
// Eigenvalue-gap threshold in spectral_integral, relative to max(1, ||lambda||_inf).
inline constexpr double spectral_gap_rel = 1e-12;
// Eigenphase gap below which spectral data is flagged degenerate.
inline constexpr double degeneracy_gap = 1e-8;
// Bound on the imaginary residue of provably-real quantities.
inline constexpr double real_cast = 1e-10;
}  // namespace tol

/// Kronecker product: (a (x) b)_{(i*p+k),(j*q+l)} = a_{ij} b_{kl} for b of shape p x q.
template <typename DerivedA, typename DerivedB>
auto kron(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b)
    -> Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, Eigen::Dynamic> {
  using Out = Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Out out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) =
          a(i, j) * b.template cast<typename DerivedA::Scalar>();
  return out;
}

/// Column-stacking vec operator; satisfies vec(AXB) = (B^T (x) A) vec(X).
template <typename Derived>
auto vec(const Eigen::MatrixBase<Derived>& a)
    -> Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> {
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> out(a.size());
  Eigen::Index pos = 0;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i) out(pos++) = a(i, j);
  return out;
}

/// True when ||x - x^dag||_max is within tol::hermitian_rel of the entry scale.
bool is_hermitian(const Eigen::MatrixXcd& x);

/// True when ||x^dag x - I||_max <= tol::unitary_abs.
bool is_unitary(const Eigen::MatrixXcd& x);

struct HermitianEig {
  Eigen::VectorXd values;    // ascending
  Eigen::MatrixXcd vectors;  // unitary, h = vectors * values.asDiagonal() * vectors^dag
};

struct UnitaryEig {
  Eigen::VectorXd phases;    // principal branch (-pi, pi], descending
  Eigen::MatrixXcd vectors;  // unitary, u = vectors * exp(i phases).asDiagonal() * vectors^dag
};

struct Svd {
  Eigen::MatrixXcd t_left;
  Eigen::VectorXd q;  // descending, nonnegative
  Eigen::MatrixXcd t_right;  // a = t_left * q.asDiagonal() * t_right^dag
};

/// Eigendecomposition of a Hermitian matrix; rejects non-Hermitian input.
HermitianEig eig_hermitian(const Eigen::MatrixXcd& h);

/// e^{-i t h} for Hermitian h, via eigendecomposition.
Eigen::MatrixXcd expm_i_hermitian(const Eigen::MatrixXcd& h, double t);

/// Spectral decomposition u = V e^{i Omega} V^dag of a unitary; rejects non-unitary input.
UnitaryEig eig_unitary(const Eigen::MatrixXcd& u);

/// Full singular value decomposition a = T_left diag(q) T_right^dag.
Svd svd(const Eigen::MatrixXcd& a);

/// integral_0^{t_max} e^{i tau h} x e^{-i tau h} dtau for Hermitian h.
/// With h = S L S^dag and Y = S^dag x S the result is S (Y o Psi) S^dag where
/// Psi_{jk} = (e^{i t_max (l_j - l_k)} - 1)/(i (l_j - l_k)), taken as t_max when
/// the gap is below tol::spectral_gap_rel relative to max(1, ||lambda||_inf).
Eigen::MatrixXcd spectral_integral(const Eigen::MatrixXcd& h, const Eigen::MatrixXcd& x,
                                   double t_max);

/// spectral_integral with the eigendecomposition of h precomputed, for callers
/// integrating many x against the same h.
Eigen::MatrixXcd spectral_integral(const HermitianEig& eig_h, const Eigen::MatrixXcd& x,
                                   double t_max);

// Orthonormal Hermitian operator basis (generalized Gell-Mann plus identity),
// Tr(B_a B_b) = delta_ab. Element order is fixed: index 0 is I/sqrt(n); indices
// 1..n-1 are the diagonal elements diag(1,..,1,-k,0,..)/sqrt(k(k+1)) with k
// leading ones; then for each index pair (j,k), j < k in lexicographic order,
// the symmetric element (E_jk + E_kj)/sqrt(2) followed by the antisymmetric
// element (-i E_jk + i E_kj)/sqrt(2).
struct HermitianBasis {
  int dim = 0;
  std::vector<Eigen::MatrixXcd> elements;  // n^2 entries

  /// B(phi) = sum_b phi_b B_b.
  Eigen::MatrixXcd generator(const Eigen::VectorXd& phi) const;
  /// Coefficients of a Hermitian g in this basis: phi_b = Re Tr(B_b g).
  Eigen::VectorXd coefficients(const Eigen::MatrixXcd& g) const;
};

/// Basis factory for dimension n >= 1.
HermitianBasis hermitian_basis(int n);

/// Hermitian G with e^{iG} = u, eigenphases on the principal branch (-pi, pi].
Eigen::MatrixXcd log_unitary(const Eigen::MatrixXcd& u);

}  // namespace qcl
