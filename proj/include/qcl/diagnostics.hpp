#pragma once

#include <optional>

#include "qcl/gradients.hpp"

// Numerical rank estimation and the rank condition for trap-free search in its
// U(N), SU(N), symmetric-spectrum, and closed-system forms.

namespace qcl {

enum class LandscapeCase { UN, SUN, SYMMETRIC_SPECTRUM, CLOSED };

const char* to_string(LandscapeCase c);

struct CaseReport {
  LandscapeCase primary = LandscapeCase::UN;
  // Set when a discriminant lies within a factor 10 of its threshold; the
  // alternative classification the point is close to.
  std::optional<LandscapeCase> borderline;
  double sum_omega_mod_2pi = 0.0;  // distance of sum(omega) from a multiple of 2 pi
  double antisym_err = 0.0;        // max |omega_sorted + reverse(omega_sorted)|
};

struct RankReport {
  Eigen::VectorXd singular_values;  // descending
  int numerical_rank = 0;
  double threshold_used = 0.0;  // absolute cut: rel_tol * sigma_1
  LandscapeCase landscape_case = LandscapeCase::UN;
  std::optional<LandscapeCase> borderline_case;
  int required_rank = 0;
  bool condition_met = false;
  double sum_omega_mod_2pi = 0.0;
  bool spectrum_antisymmetric = false;
};

struct PhiOptIdentityReport {
  double sin_sum_abs = 0.0;  // |sum_n sin(omega_n)|
  double gphi_g_inf = 0.0;   // ||G_phi g(omega)||_inf
  bool pass = false;         // both <= 1e-7
};

/// Count of singular values above rel_tol * sigma_1 (zero matrix has rank 0).
RankReport numerical_rank(const Eigen::MatrixXd& m, double rel_tol);

/// Classification at tolerance 1e-8: CLOSED when n_b = 1; SYMMETRIC_SPECTRUM
/// when the sorted spectrum is antisymmetric and det U_obj = 1; SUN when only
/// the determinant condition holds; else UN.
CaseReport classify_case(const Eigen::MatrixXcd& u_obj, const Eigen::VectorXd& omega,
                         int n_b);

/// Rank needed for a trap-free search: N for UN, N-1 for SUN, ceil(N/2) for
/// SYMMETRIC_SPECTRUM; N for CLOSED (the stacked form of rank G_c >= N-1, via
/// the closed-system identity rank G_{c,phi} = min(rank G_c + 1, N)).
int required_rank(LandscapeCase c, int n);

/// Full report on a bundle computed at phi_opt.
RankReport rank_condition(const GradientBundle& bundle, const CaseReport& case_report,
                          int n, double rel_tol);

/// Closed-system stacked rank predicted from rank G_c.
int closed_rank_identity(int g_c_rank, int n);

/// Scalar certificate behind the closed-system rank identity: with G_c = U S V^T
/// truncated to numerical rank r and v = V^T 1 split as (v1, v2), returns
/// v1^T (S_r^2 + v1 v1^T)^{-1} v1, provably < 1.
double closed_rank_certificate(const Eigen::MatrixXd& g_c, double rel_tol);

/// Residuals of the phi_opt identities sum sin(omega) = 0 and G_phi g(omega) = 0.
PhiOptIdentityReport phiopt_identity_check(const LandscapeEval& eval,
                                           const GradientBundle& bundle);

// Lower-bound construction for the G_phi Gram matrix: sum_b z_b z_b^T with
// z_b(n) = v_n^dag (I_A (x) B_b) v_n. Reported for inspection only; no rank
// claim is asserted (establishing rank G_phi this way is open).
struct GPhiBoundReport {
  Eigen::MatrixXd bound;  // N x N
  int rank = 0;
};

GPhiBoundReport g_phi_bound_report(const Eigen::MatrixXcd& v, const HermitianBasis& basis,
                                   int n_a, double rel_tol);

}  // namespace qcl
