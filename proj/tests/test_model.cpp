#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "qcl/landscape.hpp"
#include "qcl/model.hpp"
#include "qcl/propagate.hpp"

using namespace qcl;
using Eigen::MatrixXcd;
using Eigen::VectorXd;

namespace {

MatrixXcd pauli_x() { return (MatrixXcd(2, 2) << 0, 1, 1, 0).finished(); }
MatrixXcd pauli_y() { return (MatrixXcd(2, 2) << 0, cxd(0, -1), cxd(0, 1), 0).finished(); }
MatrixXcd pauli_z() { return (MatrixXcd(2, 2) << 1, 0, 0, -1).finished(); }

double max_abs(const MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

double spectral_norm(const MatrixXcd& m) {
  return Eigen::JacobiSVD<MatrixXcd>(m).singularValues()(0);
}

}  // namespace

TEST_CASE("control_index flattening is ell-major") {
  CHECK(control_index(0, 0, 3) == 0);
  CHECK(control_index(0, 2, 3) == 2);
  CHECK(control_index(1, 0, 3) == 3);
  CHECK(control_index(4, 1, 2) == 9);
}

TEST_CASE("central spin dimensions and structure") {
  const ControlSystem sys = build_central_spin(3, Eigen::Vector3d(1, 1, 1), {100, 20.0});
  CHECK(sys.n_a == 2);
  CHECK(sys.n_b == 8);
  CHECK(sys.dim() == 16);
  CHECK(sys.n_controls() == 1);
  CHECK(sys.delta() == doctest::Approx(0.2));
  CHECK(is_hermitian(sys.h0));
  CHECK(max_abs(sys.controls[0] - pauli_z()) == 0.0);
  CHECK(std::abs(sys.h0.trace()) <= 1e-14);  // traceless: SU(N) evolution

  CHECK_THROWS_AS(build_central_spin(0, VectorXd::Ones(0), {1, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(build_central_spin(2, VectorXd::Ones(3), {1, 1.0}), std::invalid_argument);
}

TEST_CASE("central spin drift matches the explicit formula") {
  const ControlSystem sys = build_central_spin(1, VectorXd::Constant(1, 0.5), {1, 1.0});
  const MatrixXcd i2 = MatrixXcd::Identity(2, 2);
  const MatrixXcd expected = kron(pauli_y(), i2) +
                             0.5 * (kron(pauli_x(), pauli_x()) + kron(pauli_y(), pauli_y()) +
                                    kron(pauli_z(), pauli_z()));
  CHECK(max_abs(sys.h0 - expected) <= 1e-14);
}

TEST_CASE("central spin with zero coupling decouples") {
  const ControlSystem sys = build_central_spin(1, VectorXd::Zero(1), {1, 1.0});
  CHECK(max_abs(sys.h0 - kron(pauli_y(), MatrixXcd::Identity(2, 2))) == 0.0);
}

TEST_CASE("zero coupling factorizes the propagator") {
  const Horizon horizon{6, 3.0};
  const ControlSystem sys = build_central_spin(2, VectorXd::Zero(2), horizon);
  Rng rng(7);
  const ControlVector c = rng.gaussian_vector(6);

  // The same controls drive the bare two-level system; its propagator is the
  // A-factor of the bipartite one, so the fidelity against it is exactly 1.
  const ControlSystem bare =
      build_custom(pauli_y(), {pauli_z()}, 2, 1, horizon);
  const TargetSpec w{propagate(bare, c).total};
  const Propagation prop = propagate(sys, c);
  CHECK(max_abs(prop.total - kron(w.w, MatrixXcd::Identity(4, 4))) <= 1e-10);
  CHECK(fidelity(gamma(sys, w, prop.total), sys.dim()) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("random bath structure and normalization") {
  const ControlSystem sys = build_random_bath(8, 5, {4, 1.0});
  CHECK(sys.n_a == 2);
  CHECK(sys.n_b == 8);
  CHECK(sys.dim() == 16);
  CHECK(is_hermitian(sys.h0));
  CHECK(max_abs(sys.controls[0] - pauli_x()) == 0.0);

  // H_0 = sigma_z (x) B_z: read B_z off the top-left block, check the sign
  // structure and unit spectral norm.
  const MatrixXcd bz = sys.h0.topLeftCorner(8, 8);
  CHECK(max_abs(sys.h0 - kron(pauli_z(), bz)) <= 1e-15);
  CHECK(std::abs(spectral_norm(bz) - 1.0) <= 1e-12);
}

TEST_CASE("random bath determinism and scalar case") {
  const ControlSystem a = build_random_bath(8, 5, {4, 1.0});
  const ControlSystem b = build_random_bath(8, 5, {4, 1.0});
  CHECK(a.h0 == b.h0);  // bit-for-bit
  const ControlSystem c = build_random_bath(8, 6, {4, 1.0});
  CHECK(max_abs(a.h0 - c.h0) > 1e-3);

  const ControlSystem scalar = build_random_bath(1, 3, {2, 1.0});
  CHECK(scalar.dim() == 2);
  CHECK(std::abs(std::abs(scalar.h0(0, 0).real()) - 1.0) <= 1e-12);
}

TEST_CASE("build_custom validates") {
  const MatrixXcd h0 = pauli_y();
  const std::vector<MatrixXcd> controls{pauli_z()};
  const ControlSystem closed = build_custom(h0, controls, 2, 1, {3, 1.0});
  CHECK(closed.dim() == 2);

  CHECK_THROWS_AS(build_custom(MatrixXcd::Identity(3, 3), controls, 2, 2, {1, 1.0}),
                  std::invalid_argument);
  MatrixXcd not_hermitian(2, 2);
  not_hermitian << 0, 1, 0, 0;
  CHECK_THROWS_AS(build_custom(kron(not_hermitian, MatrixXcd::Identity(2, 2)), controls, 2,
                               2, {1, 1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_custom(kron(pauli_z(), MatrixXcd::Identity(2, 2)),
                               {not_hermitian}, 2, 2, {1, 1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_custom(h0, controls, 2, 1, {0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(build_custom(h0, controls, 2, 1, {3, 0.0}), std::invalid_argument);
}

TEST_CASE("two-control system accepts length 2L control vectors") {
  const ControlSystem sys = build_custom(kron(pauli_y(), MatrixXcd::Identity(2, 2)),
                                         {pauli_z(), pauli_x()}, 2, 2, {3, 1.0});
  CHECK(sys.n_controls() == 2);
  Rng rng(9);
  const ControlVector c = rng.gaussian_vector(6);
  validate_controls(sys, c);
  const Propagation prop = propagate(sys, c);
  CHECK(is_unitary(prop.total));
  CHECK_THROWS_AS(validate_controls(sys, rng.gaussian_vector(5)), std::invalid_argument);
}

TEST_CASE("validate_controls rejects non-finite entries") {
  const ControlSystem sys = build_central_spin(1, VectorXd::Ones(1), {2, 1.0});
  ControlVector c = ControlVector::Zero(2);
  c(1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(validate_controls(sys, c), std::invalid_argument);
}

TEST_CASE("random_target is unitary and deterministic") {
  const TargetSpec w1 = random_target(2, 123);
  const TargetSpec w2 = random_target(2, 123);
  const TargetSpec w3 = random_target(2, 124);
  CHECK(is_unitary(w1.w));
  CHECK(w1.w == w2.w);
  CHECK(max_abs(w1.w - w3.w) > 1e-3);
  CHECK(is_unitary(random_target(5, 1).w));
}

TEST_CASE("random_target matches the Haar trace moment") {
  // For Haar measure E|Tr W|^2 = 1 at any dimension; check the empirical mean
  // over 10^4 samples against three standard errors.
  const int samples = 10000;
  double sum = 0.0, sum_sq = 0.0;
  for (int s = 0; s < samples; ++s) {
    const double t = std::norm(random_target(2, 1000 + s).w.trace());
    sum += t;
    sum_sq += t * t;
  }
  const double mean = sum / samples;
  const double var = sum_sq / samples - mean * mean;
  const double se = std::sqrt(var / samples);
  CHECK(std::abs(mean - 1.0) <= 3.0 * se);
}

TEST_CASE("rng streams are deterministic and well-ranged") {
  Rng a(99), b(99);
  for (int i = 0; i < 100; ++i) {
    const double u = a.uniform();
    CHECK(u == b.uniform());
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  Rng c(99);
  const VectorXd g1 = c.gaussian_vector(64);
  Rng d(99);
  const VectorXd g2 = d.gaussian_vector(64);
  CHECK(g1 == g2);
  CHECK(is_hermitian(Rng(5).hermitian(6)));
  CHECK(is_unitary(Rng(5).haar_unitary(6)));
}
