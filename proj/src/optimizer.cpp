#include "qcl/optimizer.hpp"

#include <cmath>
#include <stdexcept>

#include "qcl/diagnostics.hpp"

namespace qcl {

namespace {

// Rank as the count of singular values above rel_tol * sigma_1 (same cut as
// diagnostics::numerical_rank, reusing the singular values already computed).
int rank_from_singular_values(const Eigen::VectorXd& sv, double rel_tol) {
  if (sv.size() == 0) return 0;
  const double cut = rel_tol * sv(0);
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cut) ++rank;
  return rank;
}

}  // namespace

void AscentConfig::validate() const {
  if (!(gamma0 > 0.0) || !std::isfinite(gamma0))
    throw std::invalid_argument("ascent: gamma0 must be positive and finite");
  if (!(grow > 1.0)) throw std::invalid_argument("ascent: grow must exceed 1");
  if (!(shrink > 0.0) || !(shrink < 1.0))
    throw std::invalid_argument("ascent: shrink must lie in (0, 1)");
  if (max_iters < 1) throw std::invalid_argument("ascent: max_iters must be >= 1");
  if (max_rejects_in_row < 1)
    throw std::invalid_argument("ascent: max_rejects_in_row must be >= 1");
  if (!(improvement_floor >= 0.0))
    throw std::invalid_argument("ascent: improvement_floor must be >= 0");
  if (!(rank_tolerance > 0.0))
    throw std::invalid_argument("ascent: rank_tolerance must be > 0");
}

const char* to_string(AscentStatus s) {
  switch (s) {
    case AscentStatus::converged: return "converged";
    case AscentStatus::stalled: return "stalled";
    case AscentStatus::max_iters: return "max_iters";
    case AscentStatus::saddle_at_bottom: return "saddle_at_bottom";
    case AscentStatus::aborted: return "aborted";
  }
  return "unknown";
}

OptimizerTrace ascend(const ControlSystem& sys, const TargetSpec& w, ControlVector c0,
                      const AscentConfig& cfg) {
  cfg.validate();
  const Eigen::Index n_total = Eigen::Index(sys.horizon.intervals) * sys.n_controls();
  if (c0.size() == 0) c0 = ControlVector::Zero(n_total);
  validate_controls(sys, c0);

  OptimizerTrace out;
  ControlVector c = c0;
  Propagation prop = propagate(sys, c);
  double f = 0.0;
  Eigen::VectorXd grad;

  // Full diagnostics at an accepted iterate; returns the ascent direction.
  auto record = [&](int iter, double gamma_used) {
    const OptPoint pt = bundle_at_opt(sys, w, prop);
    const bool fallback = pt.eval.fidelity <= 1e-12 || pt.eval.degenerate;
    grad = fallback ? finite_diff_f(sys, w, prop, 1e-5) : pt.grad.grad_f_c;
    f = pt.eval.fidelity;

    TraceRow row;
    row.iter = iter;
    row.fidelity = f;
    row.one_minus_f = 1.0 - f;
    row.j_value = pt.eval.j_value;
    row.gamma = gamma_used;
    row.grad_norm = grad.norm();
    row.rank_gc = rank_from_singular_values(pt.grad.singular_values_c, cfg.rank_tolerance);
    row.rank_gcphi = rank_from_singular_values(pt.grad.singular_values, cfg.rank_tolerance);
    row.degenerate = pt.eval.degenerate;
    row.fallback_gradient = fallback;
    if (cfg.record_gradient_spectra) {
      row.sv_gc = pt.grad.singular_values_c;
      row.sv_gcphi = pt.grad.singular_values;
      row.controls = c;
      const PhiOptIdentityReport ids = phiopt_identity_check(pt.eval, pt.grad);
      row.sin_sum_abs = ids.sin_sum_abs;
      row.gphi_g_inf = ids.gphi_g_inf;
    }
    out.rows.push_back(std::move(row));
  };

  auto finished = [&](int accepted) -> bool {
    if (!std::isfinite(f) || !grad.allFinite()) {
      out.status = AscentStatus::aborted;
      out.diagnostic = "non-finite fidelity or gradient at iteration " + std::to_string(accepted);
      return true;
    }
    if (1.0 - f <= AscentConfig::converged_tol) {
      out.status = AscentStatus::converged;
      return true;
    }
    if (f <= 1e-12 && grad.norm() <= 1e-10) {
      out.status = AscentStatus::saddle_at_bottom;
      out.diagnostic = "gradient vanishes at the bottom of the landscape";
      return true;
    }
    return false;
  };

  record(0, 0.0);
  int accepted = 0;
  out.status = AscentStatus::max_iters;
  if (!finished(0)) {
    double gam = cfg.gamma0;
    int rejects = 0;
    while (accepted < cfg.max_iters) {
      const ControlVector trial = c + gam * grad;
      Propagation prop_trial = propagate(sys, trial);
      const double f_trial = fidelity(gamma(sys, w, prop_trial.total), sys.dim());
      if (!std::isfinite(f_trial)) {
        out.status = AscentStatus::aborted;
        out.diagnostic = "non-finite trial fidelity at iteration " + std::to_string(accepted + 1);
        break;
      }
      if (f_trial - f > cfg.improvement_floor) {
        c = trial;
        prop = std::move(prop_trial);
        ++accepted;
        record(accepted, gam);
        gam = std::min(gam * cfg.grow, AscentConfig::gamma_max);
        rejects = 0;
        if (finished(accepted)) break;
      } else {
        gam = std::max(gam * cfg.shrink, AscentConfig::gamma_min);
        if (++rejects >= cfg.max_rejects_in_row) {
          out.status = AscentStatus::stalled;
          break;
        }
      }
    }
  }

  out.final_controls = c;
  out.iterations = accepted;
  return out;
}

}  // namespace qcl
