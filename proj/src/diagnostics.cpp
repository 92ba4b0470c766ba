#include "qcl/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qcl {

namespace {

constexpr double kCaseTol = 1e-8;
constexpr double kBorderlineFactor = 10.0;

// Largest pairwise residue |omega_i + omega_j| mod 2 pi after sorting, pairing
// the smallest phase with the largest.  Phases live on the circle, so a pair
// (pi, pi) is antisymmetric even though the naive sum is 2 pi.
double antisymmetry_error(const Eigen::VectorXd& omega) {
  std::vector<double> sorted(omega.data(), omega.data() + omega.size());
  std::sort(sorted.begin(), sorted.end());
  double err = 0.0;
  const std::size_t n = sorted.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double pair_sum = sorted[i] + sorted[n - 1 - i];
    err = std::max(err, std::abs(std::remainder(pair_sum, 2.0 * std::numbers::pi)));
  }
  return err;
}

}  // namespace

const char* to_string(LandscapeCase c) {
  switch (c) {
    case LandscapeCase::UN: return "UN";
    case LandscapeCase::SUN: return "SUN";
    case LandscapeCase::SYMMETRIC_SPECTRUM: return "SYMMETRIC_SPECTRUM";
    case LandscapeCase::CLOSED: return "CLOSED";
  }
  return "unknown";
}

RankReport numerical_rank(const Eigen::MatrixXd& m, double rel_tol) {
  if (!(rel_tol > 0.0)) throw std::invalid_argument("numerical_rank: rel_tol must be > 0");
  RankReport out;
  out.singular_values = Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues();
  const double sigma1 = out.singular_values.size() > 0 ? out.singular_values(0) : 0.0;
  out.threshold_used = rel_tol * sigma1;
  for (Eigen::Index i = 0; i < out.singular_values.size(); ++i)
    if (out.singular_values(i) > out.threshold_used) ++out.numerical_rank;
  return out;
}

CaseReport classify_case(const Eigen::MatrixXcd& u_obj, const Eigen::VectorXd& omega,
                         int n_b) {
  if (!is_unitary(u_obj)) throw std::invalid_argument("classify_case: U_obj not unitary");
  if (u_obj.rows() != omega.size())
    throw std::invalid_argument("classify_case: phase count does not match dimension");
  CaseReport out;
  out.sum_omega_mod_2pi = std::abs(std::remainder(omega.sum(), 2.0 * std::numbers::pi));
  out.antisym_err = antisymmetry_error(omega);
  if (n_b == 1) {
    out.primary = LandscapeCase::CLOSED;
    return out;
  }
  const bool special = out.sum_omega_mod_2pi <= kCaseTol;  // det U_obj = 1
  const bool antisym = out.antisym_err <= kCaseTol;
  if (special && antisym) {
    out.primary = LandscapeCase::SYMMETRIC_SPECTRUM;
    if (std::max(out.sum_omega_mod_2pi, out.antisym_err) > kCaseTol / kBorderlineFactor)
      out.borderline = LandscapeCase::SUN;
  } else if (special) {
    out.primary = LandscapeCase::SUN;
    if (out.antisym_err <= kCaseTol * kBorderlineFactor)
      out.borderline = LandscapeCase::SYMMETRIC_SPECTRUM;
    else if (out.sum_omega_mod_2pi > kCaseTol / kBorderlineFactor)
      out.borderline = LandscapeCase::UN;
  } else {
    out.primary = LandscapeCase::UN;
    if (out.sum_omega_mod_2pi <= kCaseTol * kBorderlineFactor)
      out.borderline = LandscapeCase::SUN;
  }
  return out;
}

int required_rank(LandscapeCase c, int n) {
  if (n < 1) throw std::invalid_argument("required_rank: n must be >= 1");
  switch (c) {
    case LandscapeCase::UN: return n;
    case LandscapeCase::SUN: return n - 1;
    case LandscapeCase::SYMMETRIC_SPECTRUM: return (n + 1) / 2;
    case LandscapeCase::CLOSED: return n;
  }
  throw std::invalid_argument("required_rank: unknown case");
}

RankReport rank_condition(const GradientBundle& bundle, const CaseReport& case_report,
                          int n, double rel_tol) {
  if (!(rel_tol > 0.0)) throw std::invalid_argument("rank_condition: rel_tol must be > 0");
  RankReport out;
  out.singular_values = bundle.singular_values;
  const double sigma1 = out.singular_values.size() > 0 ? out.singular_values(0) : 0.0;
  out.threshold_used = rel_tol * sigma1;
  for (Eigen::Index i = 0; i < out.singular_values.size(); ++i)
    if (out.singular_values(i) > out.threshold_used) ++out.numerical_rank;
  out.landscape_case = case_report.primary;
  out.borderline_case = case_report.borderline;
  out.required_rank = required_rank(case_report.primary, n);
  out.condition_met = out.numerical_rank >= out.required_rank;
  out.sum_omega_mod_2pi = case_report.sum_omega_mod_2pi;
  out.spectrum_antisymmetric = case_report.antisym_err <= kCaseTol;
  return out;
}

int closed_rank_identity(int g_c_rank, int n) { return std::min(g_c_rank + 1, n); }

double closed_rank_certificate(const Eigen::MatrixXd& g_c, double rel_tol) {
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(g_c, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double sigma1 = sv.size() > 0 ? sv(0) : 0.0;
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > rel_tol * sigma1) ++r;
  if (r == 0) return 0.0;
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(g_c.cols());
  const Eigen::VectorXd v1 = svd.matrixV().leftCols(r).transpose() * ones;
  Eigen::MatrixXd m = v1 * v1.transpose();
  m.diagonal() += sv.head(r).array().square().matrix();
  return v1.dot(m.ldlt().solve(v1));
}

PhiOptIdentityReport phiopt_identity_check(const LandscapeEval& eval,
                                           const GradientBundle& bundle) {
  PhiOptIdentityReport out;
  out.sin_sum_abs = std::abs(eval.omega.array().sin().sum());
  out.gphi_g_inf = bundle.grad_j_phi.size() > 0
                       ? bundle.grad_j_phi.lpNorm<Eigen::Infinity>()
                       : 0.0;
  out.pass = out.sin_sum_abs <= 1e-7 && out.gphi_g_inf <= 1e-7;
  return out;
}

GPhiBoundReport g_phi_bound_report(const Eigen::MatrixXcd& v, const HermitianBasis& basis,
                                   int n_a, double rel_tol) {
  const Eigen::Index n = v.cols();
  if (v.rows() != Eigen::Index(n_a) * basis.dim)
    throw std::invalid_argument("g_phi_bound_report: dimension mismatch");
  const Eigen::MatrixXcd eye_a = Eigen::MatrixXcd::Identity(n_a, n_a);
  GPhiBoundReport out;
  out.bound = Eigen::MatrixXd::Zero(n, n);
  for (const auto& bb : basis.elements) {
    const Eigen::MatrixXcd embedded = kron(eye_a, bb);
    Eigen::VectorXd z(n);
    for (Eigen::Index col = 0; col < n; ++col)
      z(col) = v.col(col).dot(embedded * v.col(col)).real();
    out.bound += z * z.transpose();
  }
  out.rank = numerical_rank(out.bound, rel_tol).numerical_rank;
  return out;
}

}  // namespace qcl
