#include "dramforge/multi_chain.hpp"

#include <algorithm>
#include <exception>
#include <thread>

#include "dramforge/stats.hpp"
#include "dramforge/text.hpp"
#include "file_util.hpp"

namespace dramforge {

namespace {

std::vector<double> sorted_coordinate(const RefinedSample& s, int d) {
  std::vector<double> v;
  v.reserve(s.states.size());
  for (const auto& x : s.states) v.push_back(x[static_cast<std::size_t>(d)]);
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

ConvergenceReport check_convergence(const std::vector<RefinedSample>& samples, int ndim, double significance) {
  ConvergenceReport report;
  report.significance = significance;
  const int n = static_cast<int>(samples.size());
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      if (samples[a].states == samples[b].states && samples[a].logf == samples[b].logf)
        report.warnings.push_back("degenerate duplication: chains " + std::to_string(a + 1) + " and " +
                                  std::to_string(b + 1) + " produced identical samples");
      for (int d = 0; d < ndim; ++d) {
        const auto xa = sorted_coordinate(samples[static_cast<std::size_t>(a)], d);
        const auto xb = sorted_coordinate(samples[static_cast<std::size_t>(b)], d);
        PairwiseKs t{a + 1, b + 1, d + 1, 0.0, 1.0, 1.0};
        if (xa.size() >= 5 && xb.size() >= 5) {
          const auto ks = ks_two_sample(xa, xb);
          t.statistic = ks.statistic;
          t.p_value = ks.p_value;
        } else {
          report.warnings.push_back("chains " + std::to_string(a + 1) + " and " + std::to_string(b + 1) +
                                    " have too few refined states for a KS test");
        }
        report.tests.push_back(t);
      }
    }
  }
  const double m = static_cast<double>(std::max<std::size_t>(report.tests.size(), 1));
  for (auto& t : report.tests) {
    t.p_adjusted = std::min(1.0, t.p_value * m);
    if (t.p_adjusted < significance) report.flagged = true;
  }
  return report;
}

std::string chain_prefix(const std::string& prefix, int index) { return prefix + "_process_" + std::to_string(index); }

MultiChainOutputs run_multi_chain(const SimSpec& spec, const TargetDensity& target, int n_chains,
                                  const MultiChainOptions& options) {
  if (n_chains < 2) throw UsageError("multi-chain runs need at least two chains");
  if (!options.streams.empty() && static_cast<int>(options.streams.size()) != n_chains)
    throw UsageError("one stream per chain is required");
  if (!options.targets.empty() && static_cast<int>(options.targets.size()) != n_chains)
    throw UsageError("one target per chain is required");

  std::vector<SimSpec> specs;
  for (int c = 1; c <= n_chains; ++c) {
    SimSpec s = spec;
    s.parallelism = Parallelism::none;
    s.num_workers = 1;
    s.output_prefix = chain_prefix(spec.output_prefix, c);
    specs.push_back(std::move(s));
  }

  MultiChainOutputs out;
  out.chains.resize(static_cast<std::size_t>(n_chains));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n_chains));
  {
    std::vector<std::jthread> threads;
    for (int c = 0; c < n_chains; ++c) {
      threads.emplace_back([&, c] {
        const auto idx = static_cast<std::size_t>(c);
        try {
          RunOptions run = options.run;
          run.streams = {options.streams.empty() ? static_cast<std::uint64_t>(c + 1) : options.streams[idx]};
          const TargetDensity& t = options.targets.empty() ? target : *options.targets[idx];
          out.chains[idx] = run_sampler(specs[idx], t, run);
        } catch (...) {
          errors[idx] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<RefinedSample> samples;
  for (const auto& c : out.chains) samples.push_back(c.refined);
  out.convergence = check_convergence(samples, spec.ndim);
  files::write_all(spec.output_prefix + "_convergence.txt", format_convergence(out.convergence));
  return out;
}

std::string format_convergence(const ConvergenceReport& r) {
  std::string s = "chainA,chainB,dimension,ksStatistic,pValue,pAdjusted\n";
  for (const auto& t : r.tests) {
    s += std::to_string(t.chain_a) + "," + std::to_string(t.chain_b) + "," + std::to_string(t.dimension) + ",";
    s += text::format_real(t.statistic) + "," + text::format_real(t.p_value) + "," + text::format_real(t.p_adjusted) + "\n";
  }
  s += std::string("# converged = ") + (r.flagged ? "no" : "yes") + "\n";
  for (const auto& w : r.warnings) s += "# warning: " + w + "\n";
  return s;
}

}  // namespace dramforge
