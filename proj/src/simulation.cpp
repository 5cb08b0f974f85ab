#include "dramforge/simulation.hpp"

#include <filesystem>
#include <memory>

#include "dramforge/fork_join.hpp"

namespace dramforge {

namespace fs = std::filesystem;

namespace {

int rank_count(const SimSpec& spec) { return spec.parallelism == Parallelism::single_chain ? spec.num_workers : 1; }

std::vector<std::uint64_t> streams_for(const SimSpec& spec, const RunOptions& options) {
  const int ranks = rank_count(spec);
  if (!options.streams.empty()) {
    if (static_cast<int>(options.streams.size()) != ranks)
      throw UsageError("expected " + std::to_string(ranks) + " random streams, got " +
                       std::to_string(options.streams.size()));
    return options.streams;
  }
  std::vector<std::uint64_t> streams;
  for (int r = 1; r <= ranks; ++r) streams.push_back(static_cast<std::uint64_t>(r));
  return streams;
}

OutputPaths paths_for(const SimSpec& spec) { return OutputPaths::from_prefix(spec.output_prefix, spec.file_encoding); }

void remove_outputs(const OutputPaths& p) {
  for (const auto& path : {p.chain, p.restart, p.sample, p.report, p.progress}) {
    std::error_code ec;
    fs::remove(path, ec);
  }
}

ReportStats running_report(const SimSpec& spec, const std::string& config_text) {
  ReportStats r;
  r.spec = spec;
  r.status = "running";
  r.config_text = config_text;
  return r;
}

/// Everything the main loop touches besides the sampler state.
struct Session {
  const SimSpec& spec;
  const TargetDensity& target;
  const RunOptions& options;
  OutputPaths paths;
  SamplerState state;
  std::unique_ptr<ChainWriter> chain;
  std::unique_ptr<ProgressWriter> progress;
  std::unique_ptr<ForkJoinEngine> engine;
  std::int64_t next_checkpoint = 0;
  std::string config_text;
  bool resumed = false;
};

void checkpoint(Session& s) {
  // Write-ahead: the restart record reaches the disk before the rows it covers.
  write_restart_checkpoint(make_checkpoint(s.state, s.next_checkpoint++), s.paths.restart, s.spec.file_encoding);
  s.chain->flush();
  s.progress->flush();
}

ReportStats final_report(const Session& s, const SimulationOutputs& out) {
  ReportStats r = running_report(s.spec, s.config_text);
  r.status = "complete";
  const auto& chain = out.chain;
  r.accepted_count = static_cast<std::int64_t>(chain.rows.size());
  r.mean_accept_rate = chain.rows.empty() ? 0.0 : chain.rows.back().mean_accept_rate;
  r.burnin_loc = chain.rows.empty() ? 0 : chain.rows.back().burnin_loc;
  r.adaptation_count = s.state.proposal.adaptation_count;
  r.final_adaptation_measure = s.state.last_measure;
  r.iac_history = out.refined.iac_history;
  r.ess = effective_sample_size(chain, r.burnin_loc);
  r.refined_size = static_cast<std::int64_t>(out.refined.states.size());
  r.compact_bytes = chain_byte_size(chain, ChainFormat::compact, FileEncoding::ascii);
  r.verbose_bytes = chain_byte_size(chain, ChainFormat::verbose, FileEncoding::ascii);
  r.size_ratio = static_cast<double>(r.verbose_bytes) / static_cast<double>(r.compact_bytes);
  if (s.spec.parallelism == Parallelism::single_chain && out.contribution) {
    ParallelStats p;
    p.mode = Parallelism::single_chain;
    p.num_workers = s.spec.num_workers;
    p.measured_candidate_acceptance =
        s.engine && s.engine->candidates_evaluated() > 0
            ? static_cast<double>(s.engine->candidates_accepted()) / static_cast<double>(s.engine->candidates_evaluated())
            : 0.0;
    p.fitted_p = out.contribution->fitted_p;
    p.fit_distance = out.contribution->fit_distance;
    const auto model = make_speedup_model(p.fitted_p, p.num_workers);
    p.speedup = model.curve;
    p.optimal_workers = model.optimal_n;
    r.parallel = p;
  }
  return r;
}

SimulationOutputs drive(Session& s) {
  const auto& spec = s.spec;
  if (spec.parallelism == Parallelism::single_chain)
    s.engine = std::make_unique<ForkJoinEngine>(spec, s.target, spec.num_workers);

  SimulationOutputs out;
  out.paths = s.paths;
  out.resumed = s.resumed;
  auto& st = s.state;

  while (st.iteration < spec.chain_size) {
    if (s.options.interrupt_at_iteration && st.iteration >= *s.options.interrupt_at_iteration) {
      out.chain = st.chain;
      out.adaptation_history = st.adaptation_history;
      return out;  // rows not yet flushed are lost, exactly as in a kill
    }
    std::optional<ChainRow> row;
    if (s.engine) row = fork_join_cycle(st, *s.engine, spec).emitted;
    else row = step(st, s.target, spec);
    if (row) s.chain->append(*row);
    s.progress->observe(st.iteration, st.accepted_count, st.last_measure);
    if (adapt_if_due(st, spec)) checkpoint(s);
  }

  s.chain->append(finalize_chain(st));
  s.chain->flush();
  s.progress->flush();

  out.chain = st.chain;
  out.adaptation_history = st.adaptation_history;
  out.complete = true;
  const std::int64_t burnin = out.chain.rows.back().burnin_loc;
  out.refined = refine(out.chain, burnin);
  if (spec.parallelism == Parallelism::single_chain)
    out.contribution = fit_geometric(contribution_from_chain(out.chain, spec.num_workers));

  write_sample({spec.ndim, out.refined.logf, out.refined.states}, s.paths.sample);
  out.report = final_report(s, out);
  s.engine.reset();
  write_report(out.report, s.paths.report);
  return out;
}

}  // namespace

OutputState inspect_outputs(const SimSpec& spec) {
  const auto p = paths_for(spec);
  if (!fs::exists(p.chain) && !fs::exists(p.restart) && !fs::exists(p.report)) return OutputState::absent;
  try {
    if (!fs::exists(p.report) || !fs::exists(p.chain)) return OutputState::incomplete;
    const auto report = read_report(p.report);
    if (report.status != "complete") return OutputState::incomplete;
    const auto chain = read_chain_file(p.chain);
    if (chain.truncated || chain.rows.total_weight() != report.spec.chain_size) return OutputState::incomplete;
    return OutputState::complete;
  } catch (const Error&) {
    return OutputState::incomplete;
  }
}

RestartCheckpoint make_checkpoint(const SamplerState& s, std::int64_t index) {
  RestartCheckpoint c;
  c.checkpoint_index = index;
  c.iteration = s.iteration;
  c.rows_emitted = static_cast<std::int64_t>(s.chain.rows.size());
  c.accepted_count = s.accepted_count;
  c.pending_weight = s.pending_weight;
  c.current_logf = s.current_logf;
  c.current_dr_stage = s.current_stage;
  c.current_process_id = s.current_process_id;
  c.adaptation_measure = s.last_measure;
  c.proposal_mean = s.proposal.mean;
  c.proposal_cov = s.proposal.cov;
  c.proposal_scale = s.proposal.scale;
  c.proposal_epsilon = s.proposal.epsilon;
  c.proposal_sample_count = s.proposal.sample_count;
  c.proposal_adaptation_count = s.proposal.adaptation_count;
  c.current_state = s.current;
  c.rngs = s.rngs;
  return c;
}

SamplerState restore_sampler(const RestartCheckpoint& c, const CompactChain& rows, int ndim) {
  if (static_cast<std::int64_t>(rows.rows.size()) < c.rows_emitted)
    throw ResumeRefused("chain file holds fewer rows than the checkpoint requires");
  SamplerState s;
  s.current = c.current_state;
  s.current_logf = c.current_logf;
  s.current_stage = c.current_dr_stage;
  s.current_process_id = c.current_process_id;
  s.iteration = c.iteration;
  s.accepted_count = c.accepted_count;
  s.pending_weight = c.pending_weight;
  s.proposal = make_proposal(c.proposal_mean, c.proposal_cov, c.proposal_scale, c.proposal_epsilon);
  s.proposal.sample_count = c.proposal_sample_count;
  s.proposal.adaptation_count = c.proposal_adaptation_count;
  s.rngs = c.rngs;
  s.last_measure = c.adaptation_measure;
  s.iteration_at_adaptation = c.iteration;
  s.accepted_at_adaptation = c.accepted_count;
  s.burnin = BurninTracker(ndim);
  s.chain.ndim = ndim;
  s.chain.rows.assign(rows.rows.begin(), rows.rows.begin() + c.rows_emitted);
  for (const auto& r : s.chain.rows) s.burnin.push(r.logf);
  return s;
}

SimulationOutputs run_sampler(const SimSpec& spec, const TargetDensity& target, const RunOptions& options) {
  validate(spec);
  if (spec.parallelism == Parallelism::multi_chain)
    throw UsageError("multi_chain runs go through run_multi_chain");
  if (target.ndim() != spec.ndim)
    throw UsageError("target has " + std::to_string(target.ndim()) + " dimensions but ndim = " +
                     std::to_string(spec.ndim));

  const auto paths = paths_for(spec);
  if (!options.force) {
    switch (inspect_outputs(spec)) {
      case OutputState::complete:
        throw ResumeRefused("outputs for prefix '" + spec.output_prefix + "' are already complete");
      case OutputState::incomplete:
        if (!options.allow_resume)
          throw ResumeRefused("incomplete outputs exist for prefix '" + spec.output_prefix +
                              "'; resume them or start over with force");
        return resume(spec, target, options);
      case OutputState::absent:
        break;
    }
  }
  remove_outputs(paths);

  const auto streams = streams_for(spec, options);
  Session s{spec, target, options, paths, init_sampler(spec, target, streams), nullptr, nullptr, nullptr, 0,
            options.config_text, false};
  write_report(running_report(spec, options.config_text), paths.report);
  create_restart_file(paths.restart, spec.ndim, rank_count(spec), spec.file_encoding);
  s.chain = std::make_unique<ChainWriter>(paths.chain, spec.ndim, spec.chain_format, spec.file_encoding);
  s.progress = std::make_unique<ProgressWriter>(paths.progress, true);
  checkpoint(s);
  return drive(s);
}

SimulationOutputs resume(const SimSpec& spec, const TargetDensity& target, const RunOptions& options) {
  validate(spec);
  const auto paths = paths_for(spec);
  if (inspect_outputs(spec) == OutputState::complete)
    throw ResumeRefused("outputs for prefix '" + spec.output_prefix + "' are already complete");
  for (const auto& p : {paths.restart, paths.chain, paths.report})
    if (!fs::exists(p)) throw ResumeRefused("cannot resume: '" + p.string() + "' is missing");

  ReportStats previous;
  try {
    previous = read_report(paths.report);
  } catch (const ParseError& e) {
    throw ResumeRefused(std::string("cannot resume: unreadable report: ") + e.what());
  }
  const auto diff = spec_differences(previous.spec, spec);
  if (!diff.empty()) {
    std::string msg = "refusing to resume: the run settings differ from the interrupted run in";
    for (const auto& key : diff)
      msg += " " + key + " (was " + format_spec_value(previous.spec, key) + ", now " + format_spec_value(spec, key) + ")";
    throw ResumeRefused(msg);
  }

  const auto restart = read_restart(paths.restart);
  if (restart.checkpoints.empty()) throw ResumeRefused("cannot resume: the restart file holds no checkpoint");
  if (restart.ndim != spec.ndim) throw ResumeRefused("cannot resume: restart file dimension differs");
  const auto on_disk = read_chain_file(paths.chain);
  if (on_disk.rows.ndim != spec.ndim) throw ResumeRefused("cannot resume: chain file dimension differs");

  // A verbose file may end halfway through the repeats of its last state.
  CompactChain rows = recompact(on_disk.rows);
  std::int64_t usable = static_cast<std::int64_t>(rows.rows.size());
  if (spec.chain_format == ChainFormat::verbose && usable > 0) --usable;

  std::size_t chosen = restart.checkpoints.size();
  for (std::size_t i = restart.checkpoints.size(); i-- > 0;) {
    if (restart.checkpoints[i].rows_emitted <= usable) {
      chosen = i;
      break;
    }
  }
  if (chosen == restart.checkpoints.size()) throw ResumeRefused("cannot resume: no checkpoint matches the chain file");
  const auto& ckpt = restart.checkpoints[chosen];
  if (static_cast<int>(ckpt.rngs.size()) != rank_count(spec))
    throw ResumeRefused("cannot resume: checkpoint carries a different number of ranks");

  Session s{spec, target, options, paths, restore_sampler(ckpt, rows, spec.ndim), nullptr, nullptr, nullptr,
            ckpt.checkpoint_index + 1, options.config_text.empty() ? previous.config_text : options.config_text,
            true};
  for (std::size_t i = 1; i <= chosen; ++i)
    s.state.adaptation_history.push_back({restart.checkpoints[i].iteration, restart.checkpoints[i].adaptation_measure});

  rewrite_restart_file(paths.restart, spec.ndim,
                       std::vector<RestartCheckpoint>(restart.checkpoints.begin(),
                                                      restart.checkpoints.begin() + static_cast<std::ptrdiff_t>(chosen) + 1),
                       spec.file_encoding);
  s.chain = std::make_unique<ChainWriter>(paths.chain, s.state.chain, spec.chain_format, spec.file_encoding);
  ProgressWriter::truncate_after(paths.progress, ckpt.iteration);
  s.progress = std::make_unique<ProgressWriter>(paths.progress, false, ckpt.iteration);
  write_report(running_report(spec, s.config_text), paths.report);
  {
    std::error_code ec;
    fs::remove(paths.sample, ec);
  }
  return drive(s);
}

}  // namespace dramforge
