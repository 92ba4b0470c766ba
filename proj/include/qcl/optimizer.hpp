#pragma once

#include <string>

#include "qcl/gradients.hpp"

// Adaptive-step gradient ascent on F(c): c <- c + gamma * grad F, accepted only
// when F improves by more than improvement_floor; gamma grows on accept and
// shrinks on reject (with retry), clamped to [gamma_min, gamma_max].

namespace qcl {

struct AscentConfig {
  double gamma0 = 0.01;
  double grow = 2.0;
  double shrink = 0.5;
  int max_iters = 2000;
  int max_rejects_in_row = 60;
  double improvement_floor = 1e-12;
  bool record_gradient_spectra = false;
  double rank_tolerance = 1e-8;

  static constexpr double converged_tol = 1e-8;  // stop when 1 - F <= this
  static constexpr double gamma_min = 1e-12;
  static constexpr double gamma_max = 1e6;

  void validate() const;  // gamma0 > 0, grow > 1, 0 < shrink < 1, counts >= 1
};

enum class AscentStatus { converged, stalled, max_iters, saddle_at_bottom, aborted };

const char* to_string(AscentStatus s);

// One row per accepted iterate (iteration 0 is the starting point).
struct TraceRow {
  int iter = 0;
  double fidelity = 0.0;
  double one_minus_f = 0.0;
  double j_value = 0.0;
  double gamma = 0.0;      // step size that produced this iterate (0 at iter 0)
  double grad_norm = 0.0;  // ||grad_c F||_2 at this iterate
  int rank_gc = 0;
  int rank_gcphi = 0;
  bool degenerate = false;
  bool fallback_gradient = false;
  Eigen::VectorXd sv_gc;     // singular values of G_c at phi_opt
  Eigen::VectorXd sv_gcphi;  // singular values of G_{c,phi} at phi_opt
  ControlVector controls;    // the iterate itself, for offline re-evaluation
  // phi_opt identity residuals, recorded when record_gradient_spectra is set.
  double sin_sum_abs = 0.0;
  double gphi_g_inf = 0.0;
};

struct OptimizerTrace {
  std::vector<TraceRow> rows;
  AscentStatus status = AscentStatus::max_iters;
  ControlVector final_controls;
  int iterations = 0;      // accepted iterations performed
  std::string diagnostic;  // set on aborted
};

/// Gradient ascent from c0 (pass an empty vector for the zero start).
OptimizerTrace ascend(const ControlSystem& sys, const TargetSpec& w, ControlVector c0,
                      const AscentConfig& cfg);

}  // namespace qcl
