#include "dramforge/chain_io.hpp"

#include <fstream>

#include "binary_io.hpp"
#include "dramforge/error.hpp"
#include "dramforge/text.hpp"
#include "file_util.hpp"

namespace dramforge {

namespace {

constexpr std::string_view kChainMagic = "DRMF";
constexpr std::uint32_t kChainVersion = 1;
constexpr std::size_t kBinaryHeaderSize = 4 + 4 + 4 + 8;
constexpr std::size_t kCountOffset = 12;

std::size_t binary_row_size(int ndim) { return 4 + 4 + 3 * 8 + 8 + 8 + 8 + 8 * static_cast<std::size_t>(ndim); }

std::string ascii_header(int ndim) {
  std::string s;
  for (const auto& name : chain_header(ndim)) {
    if (!s.empty()) s += ',';
    s += name;
  }
  s += '\n';
  return s;
}

std::string binary_header(int ndim, std::uint64_t count) {
  std::string s(kChainMagic);
  binary::put_u32(s, kChainVersion);
  binary::put_u32(s, static_cast<std::uint32_t>(ndim));
  binary::put_u64(s, count);
  return s;
}

void append_ascii_row(std::string& out, const ChainRow& r, std::int64_t weight) {
  out += std::to_string(r.process_id);
  out += ',';
  out += std::to_string(r.dr_stage);
  out += ',';
  text::append_real(out, r.mean_accept_rate);
  out += ',';
  text::append_real(out, r.adaptation_measure);
  out += ',';
  out += std::to_string(r.burnin_loc);
  out += ',';
  out += std::to_string(weight);
  out += ',';
  text::append_real(out, r.logf);
  for (double v : r.state) {
    out += ',';
    text::append_real(out, v);
  }
  out += '\n';
}

void append_binary_row(std::string& out, const ChainRow& r, std::int64_t weight) {
  binary::put_i32(out, r.process_id);
  binary::put_i32(out, r.dr_stage);
  binary::put_f64(out, r.mean_accept_rate);
  binary::put_f64(out, r.adaptation_measure);
  binary::put_f64(out, 0.0);  // reserved
  binary::put_i64(out, r.burnin_loc);
  binary::put_i64(out, weight);
  binary::put_f64(out, r.logf);
  for (double v : r.state) binary::put_f64(out, v);
}

/// Appends a row in the requested layout; returns the number of stored rows.
std::int64_t append_row(std::string& out, const ChainRow& r, ChainFormat format, FileEncoding encoding) {
  const auto put = encoding == FileEncoding::ascii ? append_ascii_row : append_binary_row;
  if (format == ChainFormat::compact) {
    put(out, r, r.weight);
    return 1;
  }
  for (std::int64_t i = 0; i < r.weight; ++i) put(out, r, 1);
  return r.weight;
}

std::uintmax_t ascii_row_size(const ChainRow& r, std::int64_t weight) {
  std::string tmp;
  append_ascii_row(tmp, r, weight);
  return tmp.size();
}

ChainFile read_binary_chain(const std::string& bytes, const std::filesystem::path& path) {
  if (bytes.size() < kBinaryHeaderSize) throw ParseError(path.string(), 1, "binary chain header is incomplete");
  binary::Reader in(bytes);
  in.raw(4);
  const auto version = in.u32();
  if (version != kChainVersion) throw ParseError(path.string(), 1, "unsupported chain version " + std::to_string(version));
  const int ndim = static_cast<int>(in.u32());
  if (ndim < 1) throw ParseError(path.string(), 1, "invalid dimension in chain header");
  const auto declared = in.u64();

  ChainFile out;
  out.encoding = FileEncoding::binary;
  out.rows.ndim = ndim;
  const auto row_size = binary_row_size(ndim);
  while (in.remaining() >= row_size) {
    ChainRow r;
    r.process_id = in.i32();
    r.dr_stage = in.i32();
    r.mean_accept_rate = in.f64();
    r.adaptation_measure = in.f64();
    in.f64();
    r.burnin_loc = in.i64();
    r.weight = in.i64();
    r.logf = in.f64();
    r.state.resize(static_cast<std::size_t>(ndim));
    for (auto& v : r.state) v = in.f64();
    out.rows.rows.push_back(std::move(r));
  }
  out.truncated = in.remaining() != 0 || declared > out.rows.rows.size();
  return out;
}

ChainFile read_ascii_chain(const std::string& contents, const std::filesystem::path& path) {
  ChainFile out;
  out.encoding = FileEncoding::ascii;
  auto eol = contents.find('\n');
  if (eol == std::string::npos) throw ParseError(path.string(), 1, "chain header line is missing or incomplete");
  const auto header = text::split(text::trim(std::string_view(contents).substr(0, eol)), ',');
  const int ndim = static_cast<int>(header.size()) - 7;
  if (ndim < 1) throw ParseError(path.string(), 1, "chain header has too few columns");
  const auto expected = chain_header(ndim);
  for (std::size_t i = 0; i < header.size(); ++i)
    if (text::trim(header[i]) != expected[i])
      throw ParseError(path.string(), 1, "unexpected column '" + std::string(header[i]) + "'");
  out.rows.ndim = ndim;

  std::size_t pos = eol + 1;
  std::int64_t line_no = 1;
  while (pos < contents.size()) {
    ++line_no;
    eol = contents.find('\n', pos);
    if (eol == std::string::npos) {
      out.truncated = true;
      break;
    }
    const auto line = text::trim(std::string_view(contents).substr(pos, eol - pos));
    pos = eol + 1;
    if (line.empty()) continue;
    const auto f = text::split(line, ',');
    if (f.size() != header.size())
      throw ParseError(path.string(), line_no,
                       "expected " + std::to_string(header.size()) + " columns, found " + std::to_string(f.size()));
    ChainRow r;
    std::int64_t pid = 0, stage = 0;
    bool ok = text::parse_int(f[0], pid) && text::parse_int(f[1], stage) &&
              text::parse_real(f[2], r.mean_accept_rate) && text::parse_real(f[3], r.adaptation_measure) &&
              text::parse_int(f[4], r.burnin_loc) && text::parse_int(f[5], r.weight) && text::parse_real(f[6], r.logf);
    r.state.resize(static_cast<std::size_t>(ndim));
    for (int d = 0; ok && d < ndim; ++d) ok = text::parse_real(f[7 + static_cast<std::size_t>(d)], r.state[static_cast<std::size_t>(d)]);
    if (!ok) throw ParseError(path.string(), line_no, "malformed chain row");
    if (r.weight < 1) throw ParseError(path.string(), line_no, "sample weight must be positive");
    r.process_id = static_cast<std::int32_t>(pid);
    r.dr_stage = static_cast<std::int32_t>(stage);
    out.rows.rows.push_back(std::move(r));
  }
  return out;
}

}  // namespace

OutputPaths OutputPaths::from_prefix(const std::string& prefix, FileEncoding encoding) {
  const std::string ext = encoding == FileEncoding::binary ? ".bin" : ".txt";
  return {prefix + "_chain" + ext, prefix + "_restart" + ext, prefix + "_sample.txt", prefix + "_report.txt",
          prefix + "_progress.txt"};
}

std::string encode_chain(const CompactChain& chain, ChainFormat format, FileEncoding encoding) {
  std::string body;
  std::int64_t stored = 0;
  for (const auto& r : chain.rows) stored += append_row(body, r, format, encoding);
  if (encoding == FileEncoding::ascii) return ascii_header(chain.ndim) + body;
  return binary_header(chain.ndim, static_cast<std::uint64_t>(stored)) + body;
}

std::uintmax_t chain_byte_size(const CompactChain& chain, ChainFormat format, FileEncoding encoding) {
  if (encoding == FileEncoding::binary) {
    const std::uintmax_t rows = format == ChainFormat::compact ? chain.rows.size()
                                                                : static_cast<std::uintmax_t>(chain.total_weight());
    return kBinaryHeaderSize + rows * binary_row_size(chain.ndim);
  }
  std::uintmax_t size = ascii_header(chain.ndim).size();
  for (const auto& r : chain.rows) {
    if (format == ChainFormat::compact) size += ascii_row_size(r, r.weight);
    else size += static_cast<std::uintmax_t>(r.weight) * ascii_row_size(r, 1);
  }
  return size;
}

void write_chain(const CompactChain& chain, const std::filesystem::path& path, ChainFormat format,
                 FileEncoding encoding) {
  files::write_all(path, encode_chain(chain, format, encoding));
}

ChainFile read_chain_file(const std::filesystem::path& path) {
  const auto bytes = files::read_all(path);
  if (bytes.starts_with(kChainMagic)) return read_binary_chain(bytes, path);
  return read_ascii_chain(bytes, path);
}

CompactChain read_chain(const std::filesystem::path& path) { return recompact(read_chain_file(path).rows); }

ChainWriter::ChainWriter(std::filesystem::path path, int ndim, ChainFormat format, FileEncoding encoding)
    : path_(std::move(path)), ndim_(ndim), format_(format), encoding_(encoding) {
  files::write_all(path_, encoding_ == FileEncoding::ascii ? ascii_header(ndim_) : binary_header(ndim_, 0));
}

ChainWriter::ChainWriter(std::filesystem::path path, const CompactChain& existing, ChainFormat format,
                         FileEncoding encoding)
    : path_(std::move(path)), ndim_(existing.ndim), format_(format), encoding_(encoding) {
  files::write_all(path_, encode_chain(existing, format_, encoding_));
  for (const auto& r : existing.rows) rows_on_disk_ += format_ == ChainFormat::compact ? 1 : r.weight;
}

void ChainWriter::append(const ChainRow& row) {
  if (static_cast<int>(row.state.size()) != ndim_) throw UsageError("chain row has the wrong dimension");
  pending_rows_ += append_row(pending_, row, format_, encoding_);
}

void ChainWriter::flush() {
  if (pending_.empty()) return;
  files::append(path_, pending_);
  rows_on_disk_ += pending_rows_;
  pending_.clear();
  pending_rows_ = 0;
  if (encoding_ == FileEncoding::binary) {
    std::fstream f(path_, std::ios::binary | std::ios::in | std::ios::out);
    if (!f) throw IoError("cannot reopen '" + path_.string() + "' to update the row count");
    std::string count;
    binary::put_u64(count, static_cast<std::uint64_t>(rows_on_disk_));
    f.seekp(static_cast<std::streamoff>(kCountOffset));
    f.write(count.data(), static_cast<std::streamsize>(count.size()));
    f.flush();
    if (!f) throw IoError("cannot update the row count of '" + path_.string() + "'");
  }
}

void write_sample(const SampleTable& sample, const std::filesystem::path& path) {
  if (sample.logf.size() != sample.states.size()) throw UsageError("sample has mismatched logf and state counts");
  std::string s = "logFunc";
  for (int d = 1; d <= sample.ndim; ++d) s += ",var" + std::to_string(d);
  s += '\n';
  for (std::size_t i = 0; i < sample.states.size(); ++i) {
    if (static_cast<int>(sample.states[i].size()) != sample.ndim) throw UsageError("sample state has the wrong dimension");
    text::append_real(s, sample.logf[i]);
    for (double v : sample.states[i]) {
      s += ',';
      text::append_real(s, v);
    }
    s += '\n';
  }
  files::write_all(path, s);
}

SampleTable read_sample(const std::filesystem::path& path) {
  const auto contents = files::read_all(path);
  std::size_t pos = 0;
  std::int64_t line_no = 0;
  SampleTable out;
  bool header_seen = false;
  while (pos < contents.size()) {
    ++line_no;
    auto eol = contents.find('\n', pos);
    if (eol == std::string::npos) eol = contents.size();
    const auto line = text::trim(std::string_view(contents).substr(pos, eol - pos));
    pos = eol + 1;
    if (line.empty()) continue;
    const auto f = text::split(line, ',');
    if (!header_seen) {
      if (f.size() < 2 || text::trim(f[0]) != "logFunc") throw ParseError(path.string(), line_no, "bad sample header");
      out.ndim = static_cast<int>(f.size()) - 1;
      header_seen = true;
      continue;
    }
    if (static_cast<int>(f.size()) != out.ndim + 1) throw ParseError(path.string(), line_no, "wrong column count");
    double logf = 0;
    Point x(static_cast<std::size_t>(out.ndim));
    bool ok = text::parse_real(f[0], logf);
    for (std::size_t d = 0; ok && d < x.size(); ++d) ok = text::parse_real(f[d + 1], x[d]);
    if (!ok) throw ParseError(path.string(), line_no, "malformed sample row");
    out.logf.push_back(logf);
    out.states.push_back(std::move(x));
  }
  if (!header_seen) throw ParseError(path.string(), 1, "sample file is empty");
  return out;
}

ProgressWriter::ProgressWriter(std::filesystem::path path, bool fresh, std::int64_t iteration)
    : path_(std::move(path)), start_(std::chrono::steady_clock::now()) {
  next_mark_ = (iteration / kInterval + 1) * kInterval;
  if (fresh) files::write_all(path_, "iter, accepted, meanAccRate, adaptationMeasure, elapsed_seconds\n");
}

void ProgressWriter::observe(std::int64_t iteration, std::int64_t accepted, double adaptation_measure) {
  if (iteration < next_mark_) return;
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  while (next_mark_ <= iteration) next_mark_ += kInterval;
  pending_ += std::to_string(iteration) + ", " + std::to_string(accepted) + ", " +
              text::format_real(static_cast<double>(accepted) / static_cast<double>(iteration)) + ", " +
              text::format_real(adaptation_measure) + ", " + text::format_real(elapsed) + "\n";
}

void ProgressWriter::flush() {
  if (pending_.empty()) return;
  files::append(path_, pending_);
  pending_.clear();
}

void ProgressWriter::truncate_after(const std::filesystem::path& path, std::int64_t iteration) {
  if (!std::filesystem::exists(path)) {
    files::write_all(path, "iter, accepted, meanAccRate, adaptationMeasure, elapsed_seconds\n");
    return;
  }
  const auto contents = files::read_all(path);
  std::string kept;
  std::size_t pos = 0;
  bool first = true;
  while (pos < contents.size()) {
    const auto eol = contents.find('\n', pos);
    if (eol == std::string::npos) break;
    const auto line = std::string_view(contents).substr(pos, eol - pos + 1);
    pos = eol + 1;
    if (first) {
      kept += line;
      first = false;
      continue;
    }
    std::int64_t it = 0;
    const auto comma = line.find(',');
    if (comma == std::string_view::npos || !text::parse_int(line.substr(0, comma), it) || it > iteration) break;
    kept += line;
  }
  files::write_all(path, kept);
}

}  // namespace dramforge
