#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "qcl/linalg.hpp"

// Bipartite control systems: a drift Hamiltonian on A (x) B plus M control
// Hamiltonians acting on A only, evolved piecewise-constantly over L uniform
// intervals of width delta = T/L. Includes the two benchmark models (central
// spin, random dephasing bath), a generic constructor, and target draws.

namespace qcl {

// Control amplitudes c in R^{L*M}, flattened ell-major then m:
// c(control_index(ell, m, M)) = c_{ell m}, ell = 0..L-1, m = 0..M-1.
using ControlVector = Eigen::VectorXd;

inline Eigen::Index control_index(Eigen::Index ell, Eigen::Index m, Eigen::Index n_controls) {
  return ell * n_controls + m;
}

struct Horizon {
  int intervals = 1;      // L
  double t_final = 1.0;   // T
};

// Immutable after construction; shareable across concurrent evaluations.
struct ControlSystem {
  int n_a = 0;
  int n_b = 0;
  Eigen::MatrixXcd h0;                    // Hermitian, dimension n = n_a * n_b
  std::vector<Eigen::MatrixXcd> controls; // M Hermitian matrices of dimension n_a
  Horizon horizon;

  int dim() const { return n_a * n_b; }
  int n_controls() const { return static_cast<int>(controls.size()); }
  double delta() const { return horizon.t_final / horizon.intervals; }
};

struct TargetSpec {
  Eigen::MatrixXcd w;  // unitary on A
};

// Deterministic random source: mt19937_64 (output sequence pinned by the
// standard) with explicit uniform and Box-Muller transforms, so streams are
// identical across platforms and standard-library versions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform draw in [0, 1).
  double uniform();
  /// Standard normal draw (Box-Muller).
  double gaussian();
  /// Gaussian vector of length n.
  Eigen::VectorXd gaussian_vector(Eigen::Index n);
  /// Entrywise standard complex Gaussian (re + i*im)/sqrt(2).
  Eigen::MatrixXcd complex_gaussian(Eigen::Index rows, Eigen::Index cols);
  /// Random Hermitian: symmetrized complex Gaussian scaled to unit spectral norm.
  Eigen::MatrixXcd hermitian(Eigen::Index n);
  /// Haar-random unitary: QR of a complex Gaussian with the R-diagonal phase fix.
  Eigen::MatrixXcd haar_unitary(Eigen::Index n);

 private:
  std::uint64_t next() { return engine_(); }
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Central spin model: N_A = 2, N_B = 2^{q_b}, drift
/// H_0 = sigma_y (x) I + sum_q a_q sum_{s in {x,y,z}} sigma_s (x) sigma_s^{(q)},
/// single control H_1 = sigma_z. The system spin is the first tensor factor and
/// sigma_s^{(q)} acts on bath spin q (slot q of the bath factor, q = 0 leftmost).
ControlSystem build_central_spin(int q_b, const Eigen::VectorXd& couplings, Horizon horizon);

/// Random dephasing bath: N_A = 2, drift H_0 = sigma_z (x) B_z with B_z a seeded
/// random Hermitian of unit spectral norm, single control H_1 = sigma_x.
ControlSystem build_random_bath(int n_b, std::uint64_t seed, Horizon horizon);

/// Generic constructor; validates dimensions and Hermiticity. n_b = 1 gives the
/// closed-system reduction.
ControlSystem build_custom(const Eigen::MatrixXcd& h0,
                           const std::vector<Eigen::MatrixXcd>& controls, int n_a, int n_b,
                           Horizon horizon);

/// Haar-random target unitary on A, deterministic per seed.
TargetSpec random_target(int n_a, std::uint64_t seed);

/// Rejects controls of wrong length or with non-finite entries.
void validate_controls(const ControlSystem& sys, const ControlVector& c);

}  // namespace qcl
