#pragma once

#include <optional>

#include "qcl/config.hpp"
#include "qcl/diagnostics.hpp"

// Command implementations behind the CLI: experiment runner, gradient
// verification, and rank scanning. Kept in the library so tests can drive
// them directly.

namespace qcl {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int config_error = 1;
inline constexpr int numeric_failure = 2;
inline constexpr int bound_violation = 3;
}  // namespace exit_code

struct CliOptions {
  std::string config_path;
  std::optional<std::string> out_dir;   // overrides run.out_dir
  std::optional<int> jobs;              // overrides run.jobs
  std::uint64_t seed_offset = 0;        // added to every configured seed
  std::optional<double> rank_tol;       // overrides ascent.rank_tolerance
  int gradcheck_draws = 20;
};

/// Run the configured ascents; write per-seed trace/spectra/controls files and
/// print a single JSON summary object to stdout.
int cmd_run(const CliOptions& opt);

/// Compare analytic gradients against finite differences on random (c, phi)
/// draws; nonzero exit when the worst relative error exceeds 1e-5.
int cmd_gradcheck(const CliOptions& opt);

/// Tabulate rank reports over random controls or along an ascent trajectory;
/// write rankscan.csv to the output directory.
int cmd_rankscan(const CliOptions& opt);

}  // namespace qcl
