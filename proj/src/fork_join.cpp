#include "dramforge/fork_join.hpp"

#include <algorithm>

namespace dramforge {

InProcessTransport::InProcessTransport(int num_workers) {
  if (num_workers < 1) throw UsageError("transport needs at least one worker");
  for (int r = 0; r <= num_workers; ++r) boxes_.push_back(std::make_unique<Mailbox>());
}

void InProcessTransport::send(int to_rank, WorkerMsg msg) {
  if (to_rank < 0 || to_rank >= static_cast<int>(boxes_.size())) throw UsageError("no such rank");
  auto& box = *boxes_[static_cast<std::size_t>(to_rank)];
  {
    std::lock_guard lock(box.mutex);
    box.queue.push_back(std::move(msg));
  }
  box.ready.notify_one();
}

WorkerMsg InProcessTransport::receive(int rank) {
  if (rank < 0 || rank >= static_cast<int>(boxes_.size())) throw UsageError("no such rank");
  auto& box = *boxes_[static_cast<std::size_t>(rank)];
  std::unique_lock lock(box.mutex);
  box.ready.wait(lock, [&] { return !box.queue.empty(); });
  WorkerMsg msg = std::move(box.queue.front());
  box.queue.pop_front();
  return msg;
}

void run_worker(Transport& transport, int rank, const TargetDensity& target, const SimSpec& spec) {
  while (true) {
    WorkerMsg msg = transport.receive(rank);
    if (msg.kind == WorkerMsg::Kind::shutdown) return;
    WorkerMsg reply;
    reply.rank = rank;
    reply.kind = WorkerMsg::Kind::proposal_batch;
    reply.rng = msg.rng;
    try {
      const auto& head = *msg.head;
      reply.attempt = attempt_move(head.proposal, head.state, head.logf, target, spec, reply.rng, head.iteration + 1);
      reply.uniforms_consumed = reply.attempt.stages_tried;
    } catch (const std::exception& e) {
      reply.error = e.what();
    }
    transport.send(0, std::move(reply));
  }
}

int select_winner(std::span<const Attempt> attempts) noexcept {
  for (std::size_t i = 0; i < attempts.size(); ++i)
    if (attempts[i].accepted) return static_cast<int>(i) + 1;
  return 0;
}

ForkJoinEngine::ForkJoinEngine(const SimSpec& spec, const TargetDensity& target, int num_workers)
    : spec_(spec), num_workers_(num_workers), transport_(num_workers) {
  for (int r = 1; r <= num_workers_; ++r)
    threads_.emplace_back([this, r, &target] { run_worker(transport_, r, target, spec_); });
}

ForkJoinEngine::~ForkJoinEngine() {
  for (int r = 1; r <= num_workers_; ++r) {
    WorkerMsg msg;
    msg.kind = WorkerMsg::Kind::shutdown;
    msg.rank = r;
    transport_.send(r, std::move(msg));
  }
}

CycleOutcome ForkJoinEngine::cycle(SamplerState& s, int active) {
  if (active < 1 || active > num_workers_) throw UsageError("active worker count out of range");
  if (static_cast<int>(s.rngs.size()) < active) throw UsageError("sampler state lacks generators for every rank");

  auto head = std::make_shared<ChainHead>(ChainHead{s.current, s.current_logf, s.proposal, s.iteration});
  for (int r = 1; r <= active; ++r) {
    WorkerMsg msg;
    msg.rank = r;
    msg.kind = WorkerMsg::Kind::state_update;
    msg.head = head;
    msg.rng = s.rngs[static_cast<std::size_t>(r - 1)];
    transport_.send(r, std::move(msg));
  }

  std::vector<Attempt> attempts(static_cast<std::size_t>(active));
  std::string failure;
  for (int i = 0; i < active; ++i) {
    WorkerMsg reply = transport_.receive(0);
    const auto idx = static_cast<std::size_t>(reply.rank - 1);
    if (!reply.error.empty()) {
      if (failure.empty()) failure = "worker " + std::to_string(reply.rank) + ": " + reply.error;
      continue;
    }
    s.rngs[idx] = reply.rng;
    attempts[idx] = std::move(reply.attempt);
  }
  if (!failure.empty()) throw NumericalError(failure);

  evaluated_ += active;
  accepted_ += std::count_if(attempts.begin(), attempts.end(), [](const Attempt& a) { return a.accepted; });

  CycleOutcome out;
  out.active = active;
  out.winner = select_winner(attempts);
  if (out.winner > 0) {
    out.emitted = apply_verdict(s, attempts[static_cast<std::size_t>(out.winner - 1)], out.winner, out.winner - 1);
  } else {
    out.emitted = apply_verdict(s, attempts.back(), 1, active - 1);
  }
  return out;
}

int active_workers(const SamplerState& s, const SimSpec& spec, int num_workers) noexcept {
  const std::int64_t to_boundary = spec.adaptation_period - s.iteration % spec.adaptation_period;
  const std::int64_t remaining = spec.chain_size - s.iteration;
  return static_cast<int>(std::max<std::int64_t>(1, std::min<std::int64_t>({num_workers, to_boundary, remaining})));
}

CycleOutcome fork_join_cycle(SamplerState& s, ForkJoinEngine& engine, const SimSpec& spec) {
  return engine.cycle(s, active_workers(s, spec, engine.num_workers()));
}

}  // namespace dramforge
