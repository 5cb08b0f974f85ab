#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dramforge/config.hpp"
#include "dramforge/multi_chain.hpp"
#include "dramforge/postproc.hpp"
#include "dramforge/simulation.hpp"
#include "dramforge/text.hpp"

namespace dramforge::cli {

namespace fs = std::filesystem;

namespace {

// DRAMFORGE_OUT relocates outputs: <dir>/<file name of the prefix>.
std::string resolve_prefix(const std::string& prefix) {
  const char* dir = std::getenv("DRAMFORGE_OUT");
  if (dir == nullptr || *dir == '\0') return prefix;
  return (fs::path(dir) / fs::path(prefix).filename()).string();
}

int cmd_run(const std::string& config_path, const std::vector<std::string>& sets, bool resume_flag, bool force,
            std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    Overrides overrides;
    for (const auto& s : sets) overrides.push_back(parse_override(s));
    cfg = load_config(config_path, overrides);
  } catch (const ParseError& e) {
    err << "config error: " << e.what() << '\n';
    return config_error;
  }
  cfg.spec.output_prefix = resolve_prefix(cfg.spec.output_prefix);
  const fs::path parent = fs::path(cfg.spec.output_prefix).parent_path();
  if (!parent.empty()) {
    std::error_code ec;
    fs::create_directories(parent, ec);
  }

  RunOptions options;
  options.allow_resume = resume_flag;
  options.force = force;
  options.config_text = cfg.text;
  const TargetDensity target = make_density(cfg.target);

  if (cfg.spec.parallelism == Parallelism::multi_chain) {
    MultiChainOptions mc;
    mc.run = options;
    const auto result = run_multi_chain(cfg.spec, target, cfg.spec.num_workers, mc);
    for (std::size_t c = 0; c < result.chains.size(); ++c) {
      const auto& r = result.chains[c].report;
      out << "chain " << c + 1 << ": " << r.accepted_count << " unique states, acceptance "
          << text::format_real(r.mean_accept_rate) << ", ESS " << text::format_real(r.ess) << '\n';
    }
    out << "convergence: " << (result.convergence.flagged ? "NOT converged" : "converged") << '\n';
    for (const auto& w : result.convergence.warnings) out << "warning: " << w << '\n';
    return ok;
  }

  const auto result = run_sampler(cfg.spec, target, options);
  const auto& r = result.report;
  out << (result.resumed ? "resumed and completed " : "completed ") << cfg.spec.chain_size << " iterations\n";
  out << "unique states: " << r.accepted_count << ", acceptance rate: " << text::format_real(r.mean_accept_rate)
      << ", burn-in row: " << r.burnin_loc << '\n';
  out << "ESS: " << text::format_real(r.ess) << ", refined sample: " << r.refined_size << " states\n";
  if (r.parallel)
    out << "fork-join: fitted p " << text::format_real(r.parallel->fitted_p) << ", predicted optimal workers "
        << r.parallel->optimal_workers << '\n';
  for (const auto& p : {result.paths.chain, result.paths.restart, result.paths.sample, result.paths.report,
                        result.paths.progress})
    out << "  " << p.string() << '\n';
  return ok;
}

int cmd_postproc(const std::string& prefix, const std::string& what, std::ostream& out, std::ostream& err) {
  const auto kind = parse_export(what);
  if (!kind) {
    err << "unknown export '" << what << "' (expected stats, acf, covmat or contrib)\n";
    return config_error;
  }
  try {
    const auto files = export_postproc(resolve_prefix(prefix), *kind);
    out << files.csv.string() << '\n' << files.script.string() << '\n';
  } catch (const IoError& e) {
    err << "missing or unreadable outputs: " << e.what() << '\n';
    return config_error;
  } catch (const ParseError& e) {
    err << "missing or unreadable outputs: " << e.what() << '\n';
    return config_error;
  }
  return ok;
}

}  // namespace

int main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"dramforge: delayed-rejection adaptive Metropolis sampler"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> sets;
  bool resume_flag = false;
  bool force = false;
  auto* run = app.add_subcommand("run", "run or resume a simulation described by a config file");
  run->add_option("config", config_path, "configuration file")->required();
  run->add_option("--set", sets, "override a key, e.g. --set seed=11 or --set target.scale=20")->allow_extra_args(false);
  auto* resume_opt = run->add_flag("--resume", resume_flag, "continue incomplete outputs");
  run->add_flag("--force", force, "discard existing outputs and start over")->excludes(resume_opt);

  std::string prefix;
  std::string what;
  auto* post = app.add_subcommand("postproc", "export plot-ready data from finished outputs");
  post->add_option("prefix", prefix, "output prefix of a run")->required();
  post->add_option("--what", what, "stats, acf, covmat or contrib")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : config_error;
  }

  try {
    if (run->parsed()) return cmd_run(config_path, sets, resume_flag, force, out, err);
    return cmd_postproc(prefix, what, out, err);
  } catch (const ResumeRefused& e) {
    err << "refused: " << e.what() << '\n';
    return resume_refused;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return config_error;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << '\n';
    return runtime_error;
  }
}

}  // namespace dramforge::cli
