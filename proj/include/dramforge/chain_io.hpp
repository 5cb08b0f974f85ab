#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dramforge/chain.hpp"
#include "dramforge/sim_spec.hpp"

namespace dramforge {

/// Output file names derived from an output prefix.
struct OutputPaths {
  std::filesystem::path chain;
  std::filesystem::path restart;
  std::filesystem::path sample;
  std::filesystem::path report;
  std::filesystem::path progress;

  static OutputPaths from_prefix(const std::string& prefix, FileEncoding encoding);
};

/// Serialized chain file contents.
std::string encode_chain(const CompactChain& chain, ChainFormat format, FileEncoding encoding);

/// Exact size in bytes that write_chain would produce.
std::uintmax_t chain_byte_size(const CompactChain& chain, ChainFormat format, FileEncoding encoding);

void write_chain(const CompactChain& chain, const std::filesystem::path& path, ChainFormat format,
                 FileEncoding encoding);

/// Result of a tolerant chain read.
struct ChainFile {
  /// Complete rows as stored, before any re-compaction.
  CompactChain rows;
  FileEncoding encoding = FileEncoding::ascii;
  /// True when trailing bytes did not form a complete row.
  bool truncated = false;
};

/// Reads every complete row; the encoding is detected from the magic bytes.
/// Throws ParseError (with the line number for ascii) on malformed content.
ChainFile read_chain_file(const std::filesystem::path& path);

/// Reads a chain and re-compacts it, so verbose files come back compact.
CompactChain read_chain(const std::filesystem::path& path);

/// Incremental chain writer. Rows are buffered by `append` and reach the
/// file on `flush`; binary files get their row count patched on every flush.
class ChainWriter {
 public:
  /// Creates (truncating) the file and writes the header.
  ChainWriter(std::filesystem::path path, int ndim, ChainFormat format, FileEncoding encoding);

  /// Rewrites the file with exactly `existing`, then continues after it.
  ChainWriter(std::filesystem::path path, const CompactChain& existing, ChainFormat format, FileEncoding encoding);

  void append(const ChainRow& row);
  void flush();

  /// Rows on disk, counted as stored (verbose files count expanded rows).
  std::int64_t rows_on_disk() const noexcept { return rows_on_disk_; }

 private:
  std::filesystem::path path_;
  int ndim_;
  ChainFormat format_;
  FileEncoding encoding_;
  std::string pending_;
  std::int64_t pending_rows_ = 0;
  std::int64_t rows_on_disk_ = 0;
};

/// Refined sample as written to `<prefix>_sample.txt`.
struct SampleTable {
  int ndim = 0;
  std::vector<double> logf;
  std::vector<Point> states;

  friend bool operator==(const SampleTable&, const SampleTable&) = default;
};

void write_sample(const SampleTable& sample, const std::filesystem::path& path);
SampleTable read_sample(const std::filesystem::path& path);

/// Appends `iter, accepted, meanAccRate, adaptationMeasure, elapsed_seconds`
/// once per 1000 iterations.
class ProgressWriter {
 public:
  static constexpr std::int64_t kInterval = 1000;

  /// A fresh writer truncates the file; otherwise lines are appended and
  /// marks up to `iteration` are considered done.
  ProgressWriter(std::filesystem::path path, bool fresh, std::int64_t iteration = 0);

  /// Records every multiple of kInterval passed since the previous call.
  void observe(std::int64_t iteration, std::int64_t accepted, double adaptation_measure);
  void flush();

  /// Drops lines whose iteration exceeds `iteration` (used when resuming).
  static void truncate_after(const std::filesystem::path& path, std::int64_t iteration);

 private:
  std::filesystem::path path_;
  std::string pending_;
  std::int64_t next_mark_ = kInterval;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace dramforge
