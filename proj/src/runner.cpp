#include "qcl/runner.hpp"

#include <atomic>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <thread>

#include "json.hpp"

namespace qcl {

namespace {

using json = nlohmann::ordered_json;

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

ExperimentConfig load_with_overrides(const CliOptions& opt) {
  ExperimentConfig cfg = load_config(opt.config_path);
  if (opt.out_dir) cfg.run.out_dir = *opt.out_dir;
  if (opt.jobs) {
    if (*opt.jobs < 1) throw ConfigError("jobs must be >= 1");
    cfg.run.jobs = *opt.jobs;
  }
  if (opt.rank_tol) {
    if (!(*opt.rank_tol > 0.0)) throw ConfigError("rank tolerance must be > 0");
    cfg.ascent.rank_tolerance = *opt.rank_tol;
  }
  for (std::uint64_t& seed : cfg.run.seeds) seed += opt.seed_offset;
  return cfg;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

void write_trace(const std::filesystem::path& path, const OptimizerTrace& trace) {
  std::ofstream out = open_out(path);
  out << "iter,F,one_minus_F,J,gamma,grad_norm,rank_Gc,rank_Gcphi,degenerate\n";
  for (const TraceRow& row : trace.rows)
    out << row.iter << ',' << fmt17(row.fidelity) << ',' << fmt17(row.one_minus_f) << ','
        << fmt17(row.j_value) << ',' << fmt17(row.gamma) << ',' << fmt17(row.grad_norm)
        << ',' << row.rank_gc << ',' << row.rank_gcphi << ',' << int(row.degenerate)
        << '\n';
}

void write_spectra(const std::filesystem::path& path, const OptimizerTrace& trace) {
  std::ofstream out = open_out(path);
  out << "iter,matrix,index,sigma\n";
  for (const TraceRow& row : trace.rows) {
    for (Eigen::Index i = 0; i < row.sv_gc.size(); ++i)
      out << row.iter << ",Gc," << i << ',' << fmt17(row.sv_gc(i)) << '\n';
    for (Eigen::Index i = 0; i < row.sv_gcphi.size(); ++i)
      out << row.iter << ",Gcphi," << i << ',' << fmt17(row.sv_gcphi(i)) << '\n';
  }
}

void write_controls(const std::filesystem::path& path, const ControlVector& c) {
  std::ofstream out = open_out(path);
  out << "index,value\n";
  for (Eigen::Index i = 0; i < c.size(); ++i) out << i << ',' << fmt17(c(i)) << '\n';
}

// Most frequent value; ties resolve to the larger value (late-trajectory ranks
// are the ones of interest).
int modal_value(const std::vector<TraceRow>& rows, int TraceRow::* field) {
  std::map<int, int> counts;
  for (const TraceRow& row : rows) ++counts[row.*field];
  int best = 0;
  int best_count = 0;
  for (const auto& [value, count] : counts)
    if (count > best_count || (count == best_count && value > best)) {
      best = value;
      best_count = count;
    }
  return best;
}

struct SeedOutcome {
  std::uint64_t seed = 0;
  OptimizerTrace trace;
  std::string error;  // nonempty when the run threw
  std::string trace_file, spectra_file, controls_file;
};

SeedOutcome run_one_seed(const ExperimentConfig& cfg, std::uint64_t seed) {
  SeedOutcome out;
  out.seed = seed;
  const ControlSystem sys = build_system(cfg, seed);
  const TargetSpec w = build_target(cfg, sys, seed);
  const ControlVector c0 = initial_controls(cfg, sys, seed);
  AscentConfig ascent = cfg.ascent;
  ascent.record_gradient_spectra = ascent.record_gradient_spectra || cfg.run.emit_spectra;
  out.trace = ascend(sys, w, c0, ascent);

  const std::filesystem::path dir(cfg.run.out_dir);
  const std::string tag = "_seed" + std::to_string(seed) + ".csv";
  if (cfg.run.emit_trace) {
    const auto path = dir / ("trace" + tag);
    write_trace(path, out.trace);
    out.trace_file = path.string();
  }
  if (cfg.run.emit_spectra) {
    const auto path = dir / ("spectra" + tag);
    write_spectra(path, out.trace);
    out.spectra_file = path.string();
  }
  if (cfg.run.emit_controls) {
    const auto path = dir / ("controls" + tag);
    write_controls(path, out.trace.final_controls);
    out.controls_file = path.string();
  }
  return out;
}

// Scan-point report shared by both rankscan modes.
struct ScanRow {
  std::uint64_t seed = 0;
  int iter = -1;  // accepted-iteration index in trajectory mode
  double fidelity = 0.0;
  RankReport report;
  int rank_gc = 0;
};

ScanRow scan_point(const ControlSystem& sys, const TargetSpec& w, const ControlVector& c,
                   double rank_tol) {
  const OptPoint pt = bundle_at_opt(sys, w, c);
  const CaseReport cases = classify_case(pt.eval.u_obj, pt.eval.omega, sys.n_b);
  ScanRow row;
  row.fidelity = pt.eval.fidelity;
  row.report = rank_condition(pt.grad, cases, sys.dim(), rank_tol);
  const double sigma1 =
      pt.grad.singular_values_c.size() > 0 ? pt.grad.singular_values_c(0) : 0.0;
  for (Eigen::Index i = 0; i < pt.grad.singular_values_c.size(); ++i)
    if (pt.grad.singular_values_c(i) > rank_tol * sigma1) ++row.rank_gc;
  return row;
}

}  // namespace

int cmd_run(const CliOptions& opt) {
  ExperimentConfig cfg;
  try {
    cfg = load_with_overrides(opt);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_code::config_error;
  }

  try {
    std::filesystem::create_directories(cfg.run.out_dir);
    const std::size_t n_seeds = cfg.run.seeds.size();
    std::vector<SeedOutcome> outcomes(n_seeds);
    std::atomic<std::size_t> cursor{0};
    auto worker = [&] {
      for (;;) {
        const std::size_t i = cursor.fetch_add(1);
        if (i >= n_seeds) return;
        try {
          outcomes[i] = run_one_seed(cfg, cfg.run.seeds[i]);
        } catch (const std::exception& e) {
          outcomes[i].seed = cfg.run.seeds[i];
          outcomes[i].error = e.what();
        }
      }
    };
    const std::size_t n_threads =
        std::min<std::size_t>(static_cast<std::size_t>(cfg.run.jobs), n_seeds);
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool) t.join();

    bool failed = false;
    json runs = json::array();
    for (const SeedOutcome& outcome : outcomes) {
      json entry;
      entry["seed"] = outcome.seed;
      if (!outcome.error.empty()) {
        failed = true;
        entry["status"] = "error";
        entry["error"] = outcome.error;
        std::cerr << "seed " << outcome.seed << ": " << outcome.error << '\n';
        runs.push_back(std::move(entry));
        continue;
      }
      const OptimizerTrace& trace = outcome.trace;
      if (trace.status == AscentStatus::aborted) {
        failed = true;
        std::cerr << "seed " << outcome.seed << ": aborted: " << trace.diagnostic << '\n';
      }
      const TraceRow& last = trace.rows.back();
      entry["status"] = to_string(trace.status);
      entry["iterations"] = trace.iterations;
      entry["final_F"] = last.fidelity;
      entry["final_one_minus_F"] = last.one_minus_f;
      entry["final_J"] = last.j_value;
      entry["modal_rank_Gc"] = modal_value(trace.rows, &TraceRow::rank_gc);
      entry["modal_rank_Gcphi"] = modal_value(trace.rows, &TraceRow::rank_gcphi);
      if (!outcome.trace_file.empty()) entry["trace_file"] = outcome.trace_file;
      if (!outcome.spectra_file.empty()) entry["spectra_file"] = outcome.spectra_file;
      if (!outcome.controls_file.empty()) entry["controls_file"] = outcome.controls_file;
      runs.push_back(std::move(entry));
    }

    json summary;
    summary["command"] = "run";
    summary["config"] = opt.config_path;
    summary["out_dir"] = cfg.run.out_dir;
    summary["jobs"] = cfg.run.jobs;
    summary["rank_tolerance"] = cfg.ascent.rank_tolerance;
    summary["runs"] = std::move(runs);
    summary["ok"] = !failed;
    std::cout << summary.dump(2) << std::endl;
    return failed ? exit_code::numeric_failure : exit_code::ok;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code::numeric_failure;
  }
}

int cmd_gradcheck(const CliOptions& opt) {
  ExperimentConfig cfg;
  try {
    cfg = load_with_overrides(opt);
    if (opt.gradcheck_draws < 1) throw ConfigError("draws must be >= 1");
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_code::config_error;
  }

  try {
    constexpr double step = 1e-5;
    constexpr double bound = 1e-5;
    double max_err_j = 0.0;
    double max_err_f = 0.0;
    int skipped = 0;
    for (int draw = 0; draw < opt.gradcheck_draws; ++draw) {
      const std::uint64_t seed = cfg.run.seeds.front() + static_cast<std::uint64_t>(draw);
      const ControlSystem sys = build_system(cfg, seed);
      const TargetSpec w = build_target(cfg, sys, seed);
      Rng rng(seed + kStartSeedOffset);
      const Eigen::Index n_c = Eigen::Index(sys.horizon.intervals) * sys.n_controls();
      const ControlVector c = cfg.rankscan.amplitude * rng.gaussian_vector(n_c);
      const Eigen::VectorXd phi =
          cfg.rankscan.amplitude * rng.gaussian_vector(Eigen::Index(sys.n_b) * sys.n_b);

      const GradientBundle at_phi = bundle(sys, w, c, phi);
      if (at_phi.degenerate) {
        ++skipped;
        continue;
      }
      Eigen::VectorXd analytic(at_phi.grad_j_c.size() + at_phi.grad_j_phi.size());
      analytic << at_phi.grad_j_c, at_phi.grad_j_phi;
      const Eigen::VectorXd numeric = finite_diff_j(sys, w, c, phi, step);
      max_err_j = std::max(max_err_j,
                           (analytic - numeric).norm() / std::max(numeric.norm(), 1e-12));

      const GradF df = grad_f(sys, w, c);
      if (df.fallback) {
        ++skipped;
        continue;
      }
      const Eigen::VectorXd numeric_f = finite_diff_f(sys, w, c, step);
      max_err_f = std::max(max_err_f,
                           (df.grad - numeric_f).norm() / std::max(numeric_f.norm(), 1e-12));
    }

    const bool pass = max_err_j <= bound && max_err_f <= bound;
    json summary;
    summary["command"] = "gradcheck";
    summary["config"] = opt.config_path;
    summary["draws"] = opt.gradcheck_draws;
    summary["skipped_degenerate"] = skipped;
    summary["step"] = step;
    summary["max_rel_err_J"] = max_err_j;
    summary["max_rel_err_F"] = max_err_f;
    summary["bound"] = bound;
    summary["ok"] = pass;
    std::cout << summary.dump(2) << std::endl;
    return pass ? exit_code::ok : exit_code::bound_violation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code::numeric_failure;
  }
}

int cmd_rankscan(const CliOptions& opt) {
  ExperimentConfig cfg;
  try {
    cfg = load_with_overrides(opt);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_code::config_error;
  }

  try {
    std::filesystem::create_directories(cfg.run.out_dir);
    std::vector<ScanRow> rows;
    if (cfg.rankscan.mode == ScanMode::random_controls) {
      for (int draw = 0; draw < cfg.rankscan.draws; ++draw) {
        const std::uint64_t seed = cfg.run.seeds.front() + static_cast<std::uint64_t>(draw);
        const ControlSystem sys = build_system(cfg, seed);
        const TargetSpec w = build_target(cfg, sys, seed);
        Rng rng(seed + kStartSeedOffset);
        const Eigen::Index n_c = Eigen::Index(sys.horizon.intervals) * sys.n_controls();
        const ControlVector c = cfg.rankscan.amplitude * rng.gaussian_vector(n_c);
        ScanRow row = scan_point(sys, w, c, cfg.ascent.rank_tolerance);
        row.seed = seed;
        rows.push_back(std::move(row));
      }
    } else {  // trajectory: rank reports along one recorded ascent
      const std::uint64_t seed = cfg.run.seeds.front();
      const ControlSystem sys = build_system(cfg, seed);
      const TargetSpec w = build_target(cfg, sys, seed);
      AscentConfig ascent = cfg.ascent;
      ascent.record_gradient_spectra = true;  // stores the iterates
      const OptimizerTrace trace = ascend(sys, w, initial_controls(cfg, sys, seed), ascent);
      for (const TraceRow& tr : trace.rows) {
        ScanRow row = scan_point(sys, w, tr.controls, cfg.ascent.rank_tolerance);
        row.seed = seed;
        row.iter = tr.iter;
        rows.push_back(std::move(row));
      }
    }

    const std::filesystem::path path = std::filesystem::path(cfg.run.out_dir) / "rankscan.csv";
    std::ofstream out = open_out(path);
    out << "point,seed,iter,F,case,borderline,rank_Gc,rank_Gcphi,required_rank,"
           "condition_met,sum_omega_mod_2pi,antisymmetric\n";
    int all_met = 1;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const ScanRow& row = rows[i];
      const RankReport& rep = row.report;
      all_met = all_met && rep.condition_met;
      out << i << ',' << row.seed << ',' << row.iter << ',' << fmt17(row.fidelity) << ','
          << to_string(rep.landscape_case) << ','
          << (rep.borderline_case ? to_string(*rep.borderline_case) : "") << ','
          << row.rank_gc << ',' << rep.numerical_rank << ',' << rep.required_rank << ','
          << int(rep.condition_met) << ',' << fmt17(rep.sum_omega_mod_2pi) << ','
          << int(rep.spectrum_antisymmetric) << '\n';
    }

    json summary;
    summary["command"] = "rankscan";
    summary["config"] = opt.config_path;
    summary["mode"] =
        cfg.rankscan.mode == ScanMode::random_controls ? "random_controls" : "trajectory";
    summary["points"] = rows.size();
    summary["all_condition_met"] = bool(all_met);
    summary["output"] = path.string();
    summary["ok"] = true;
    std::cout << summary.dump(2) << std::endl;
    return exit_code::ok;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code::numeric_failure;
  }
}

}  // namespace qcl
