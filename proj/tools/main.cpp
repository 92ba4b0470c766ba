// Command-line driver: run | gradcheck | rankscan over an experiment config.
#include "CLI11.hpp"
#include "qcl/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"bipartite control landscape toolkit"};
  app.require_subcommand(1);

  qcl::CliOptions opt;
  std::string out_dir;
  int jobs = 0;
  double rank_tol = 0.0;

  CLI::App* run = app.add_subcommand("run", "run the configured gradient ascents");
  CLI::App* gradcheck =
      app.add_subcommand("gradcheck", "verify analytic gradients against finite differences");
  CLI::App* rankscan =
      app.add_subcommand("rankscan", "tabulate gradient rank reports over sampled controls");
  for (CLI::App* cmd : {run, gradcheck, rankscan}) {
    cmd->add_option("--config", opt.config_path, "configuration file")->required();
    cmd->add_option("--out", out_dir, "output directory (overrides run.out_dir)");
    cmd->add_option("--jobs", jobs, "max concurrent seed runs (overrides run.jobs)");
    cmd->add_option("--seed-offset", opt.seed_offset, "offset added to every configured seed");
    cmd->add_option("--rank-tol", rank_tol, "relative tolerance for numerical rank");
  }
  gradcheck->add_option("--draws", opt.gradcheck_draws, "number of random draws");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : qcl::exit_code::config_error;
  }

  CLI::App* active = run->parsed() ? run : gradcheck->parsed() ? gradcheck : rankscan;
  if (active->count("--out")) opt.out_dir = out_dir;
  if (active->count("--jobs")) opt.jobs = jobs;
  if (active->count("--rank-tol")) opt.rank_tol = rank_tol;

  if (run->parsed()) return qcl::cmd_run(opt);
  if (gradcheck->parsed()) return qcl::cmd_gradcheck(opt);
  return qcl::cmd_rankscan(opt);
}
