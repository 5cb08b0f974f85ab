#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "dramforge/proposal.hpp"
#include "dramforge/sampler.hpp"

namespace dramforge {

/// Chain head broadcast to the workers at the start of a cycle. Shared
/// read-only between threads.
struct ChainHead {
  Point state;
  double logf = 0.0;
  ProposalState proposal;
  std::int64_t iteration = 0;
};

struct WorkerMsg {
  enum class Kind { state_update, proposal_batch, shutdown };

  int rank = 0;  // sender for proposal_batch, addressee otherwise
  Kind kind = Kind::shutdown;

  // state_update
  std::shared_ptr<const ChainHead> head;
  RngState rng;

  // proposal_batch (rng above carries the advanced generator)
  Attempt attempt;
  int uniforms_consumed = 0;
  std::string error;
};

/// Message-passing contract between the coordinator (rank 0) and workers
/// (ranks 1..num_workers). Delivery between any pair is in order.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual int num_workers() const noexcept = 0;
  virtual void send(int to_rank, WorkerMsg msg) = 0;
  /// Blocks until a message addressed to `rank` arrives.
  virtual WorkerMsg receive(int rank) = 0;
};

/// Mailboxes guarded by a mutex each; workers are threads of this process.
class InProcessTransport final : public Transport {
 public:
  explicit InProcessTransport(int num_workers);

  int num_workers() const noexcept override { return static_cast<int>(boxes_.size()) - 1; }
  void send(int to_rank, WorkerMsg msg) override;
  WorkerMsg receive(int rank) override;

 private:
  struct Mailbox {
    std::mutex mutex;
    std::condition_variable ready;
    std::deque<WorkerMsg> queue;
  };
  std::vector<std::unique_ptr<Mailbox>> boxes_;
};

/// Serves state_update messages until shutdown.
void run_worker(Transport& transport, int rank, const TargetDensity& target, const SimSpec& spec);

/// Lowest rank (1-based) whose attempt was accepted, or 0.
int select_winner(std::span<const Attempt> attempts) noexcept;

struct CycleOutcome {
  std::optional<ChainRow> emitted;
  int winner = 0;  // 0 when every active rank rejected
  int active = 0;
};

/// Coordinator side of fork-join sampling. Owns the worker threads; all
/// chain state stays with the caller's SamplerState.
class ForkJoinEngine {
 public:
  ForkJoinEngine(const SimSpec& spec, const TargetDensity& target, int num_workers);
  ~ForkJoinEngine();

  ForkJoinEngine(const ForkJoinEngine&) = delete;
  ForkJoinEngine& operator=(const ForkJoinEngine&) = delete;

  int num_workers() const noexcept { return num_workers_; }

  /// One round with ranks 1..active. The winner's acceptance counts as one
  /// step preceded by (winner - 1) rejections; without a winner the head
  /// gains `active` rejections.
  CycleOutcome cycle(SamplerState& state, int active);

  /// Every candidate evaluated by every rank, including those discarded
  /// because a lower rank won.
  std::int64_t candidates_evaluated() const noexcept { return evaluated_; }
  std::int64_t candidates_accepted() const noexcept { return accepted_; }

 private:
  SimSpec spec_;
  int num_workers_;
  InProcessTransport transport_;
  std::vector<std::jthread> threads_;
  std::int64_t evaluated_ = 0;
  std::int64_t accepted_ = 0;
};

/// Ranks that may run in the next cycle: stops at the next adaptation
/// boundary and at chain_size so that both are hit exactly.
int active_workers(const SamplerState& state, const SimSpec& spec, int num_workers) noexcept;

CycleOutcome fork_join_cycle(SamplerState& state, ForkJoinEngine& engine, const SimSpec& spec);

}  // namespace dramforge
