#include "dramforge/checkpoint.hpp"

#include <map>

#include "binary_io.hpp"
#include "dramforge/text.hpp"
#include "file_util.hpp"

namespace dramforge {

namespace {

constexpr std::string_view kBinaryMagic = "DRMR";
constexpr std::uint32_t kVersion = 1;
constexpr std::string_view kAsciiBanner = "# dramforge restart file v1";

std::size_t record_size(int ndim, int ranks) {
  const auto n = static_cast<std::size_t>(ndim);
  return 8 * 5 + 8 + 4 + 4 + 8 * 3 + 8 * 2 + 8 * (2 * n + n * (n + 1) / 2) + static_cast<std::size_t>(ranks) * 25;
}

std::string rng_text(const RngState& r) {
  std::string s = std::to_string(r.state) + "," + std::to_string(r.stream_id) + ",";
  s += r.gauss_cache ? text::format_real(*r.gauss_cache) : "none";
  return s;
}

std::vector<double> upper_triangle(const Eigen::MatrixXd& m) {
  std::vector<double> out;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = i; j < m.cols(); ++j) out.push_back(m(i, j));
  return out;
}

Eigen::MatrixXd from_upper_triangle(const std::vector<double>& v, int n) {
  Eigen::MatrixXd m(n, n);
  std::size_t k = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) m(i, j) = m(j, i) = v[k++];
  return m;
}

void check_shape(const RestartCheckpoint& c) {
  const auto n = c.proposal_mean.size();
  if (c.proposal_cov.rows() != n || c.proposal_cov.cols() != n || static_cast<Eigen::Index>(c.current_state.size()) != n)
    throw UsageError("restart checkpoint has inconsistent dimensions");
  if (c.rngs.empty()) throw UsageError("restart checkpoint carries no generator state");
}

std::string encode_ascii(const RestartCheckpoint& c) {
  using text::format_real;
  std::string s;
  s += "checkpoint " + std::to_string(c.checkpoint_index) + "\n";
  s += "iteration = " + std::to_string(c.iteration) + "\n";
  s += "rows_emitted = " + std::to_string(c.rows_emitted) + "\n";
  s += "accepted_count = " + std::to_string(c.accepted_count) + "\n";
  s += "pending_weight = " + std::to_string(c.pending_weight) + "\n";
  s += "current_logf = " + format_real(c.current_logf) + "\n";
  s += "current_dr_stage = " + std::to_string(c.current_dr_stage) + "\n";
  s += "current_process_id = " + std::to_string(c.current_process_id) + "\n";
  s += "adaptation_measure = " + format_real(c.adaptation_measure) + "\n";
  s += "proposal.scale = " + format_real(c.proposal_scale) + "\n";
  s += "proposal.epsilon = " + format_real(c.proposal_epsilon) + "\n";
  s += "proposal.sample_count = " + std::to_string(c.proposal_sample_count) + "\n";
  s += "proposal.adaptation_count = " + std::to_string(c.proposal_adaptation_count) + "\n";
  s += "proposal.mean = " +
       text::format_real_list(std::vector<double>(c.proposal_mean.data(), c.proposal_mean.data() + c.proposal_mean.size())) +
       "\n";
  s += "proposal.cov_upper = " + text::format_real_list(upper_triangle(c.proposal_cov)) + "\n";
  s += "current_state = " + text::format_real_list(c.current_state) + "\n";
  for (std::size_t r = 0; r < c.rngs.size(); ++r) s += "rng." + std::to_string(r + 1) + " = " + rng_text(c.rngs[r]) + "\n";
  s += "end\n";
  return s;
}

std::string encode_binary(const RestartCheckpoint& c) {
  using namespace binary;
  std::string s;
  put_i64(s, c.checkpoint_index);
  put_i64(s, c.iteration);
  put_i64(s, c.rows_emitted);
  put_i64(s, c.accepted_count);
  put_i64(s, c.pending_weight);
  put_f64(s, c.current_logf);
  put_i32(s, c.current_dr_stage);
  put_i32(s, c.current_process_id);
  put_f64(s, c.adaptation_measure);
  put_f64(s, c.proposal_scale);
  put_f64(s, c.proposal_epsilon);
  put_i64(s, c.proposal_sample_count);
  put_i64(s, c.proposal_adaptation_count);
  for (Eigen::Index i = 0; i < c.proposal_mean.size(); ++i) put_f64(s, c.proposal_mean[i]);
  for (double v : upper_triangle(c.proposal_cov)) put_f64(s, v);
  for (double v : c.current_state) put_f64(s, v);
  for (const auto& r : c.rngs) {
    put_u64(s, r.state);
    put_u64(s, r.stream_id);
    put_u8(s, r.gauss_cache ? 1 : 0);
    put_f64(s, r.gauss_cache.value_or(0.0));
  }
  return s;
}

RestartCheckpoint decode_binary(binary::Reader& in, int ndim, int ranks) {
  RestartCheckpoint c;
  c.checkpoint_index = in.i64();
  c.iteration = in.i64();
  c.rows_emitted = in.i64();
  c.accepted_count = in.i64();
  c.pending_weight = in.i64();
  c.current_logf = in.f64();
  c.current_dr_stage = in.i32();
  c.current_process_id = in.i32();
  c.adaptation_measure = in.f64();
  c.proposal_scale = in.f64();
  c.proposal_epsilon = in.f64();
  c.proposal_sample_count = in.i64();
  c.proposal_adaptation_count = in.i64();
  c.proposal_mean.resize(ndim);
  for (int i = 0; i < ndim; ++i) c.proposal_mean[i] = in.f64();
  std::vector<double> upper(static_cast<std::size_t>(ndim * (ndim + 1) / 2));
  for (auto& v : upper) v = in.f64();
  c.proposal_cov = from_upper_triangle(upper, ndim);
  c.current_state.resize(static_cast<std::size_t>(ndim));
  for (auto& v : c.current_state) v = in.f64();
  for (int r = 0; r < ranks; ++r) {
    RngState g;
    g.state = in.u64();
    g.stream_id = in.u64();
    const bool has_gauss = in.u8() != 0;
    const double gauss = in.f64();
    if (has_gauss) g.gauss_cache = gauss;
    c.rngs.push_back(g);
  }
  return c;
}

RestartFile read_binary(const std::string& bytes, const std::filesystem::path& path) {
  binary::Reader in(bytes);
  if (in.remaining() < 16) throw ParseError(path.string(), 1, "binary restart header is incomplete");
  in.raw(4);
  const auto version = in.u32();
  if (version != kVersion) throw ParseError(path.string(), 1, "unsupported restart version " + std::to_string(version));
  RestartFile file;
  file.ndim = static_cast<int>(in.u32());
  const int ranks = static_cast<int>(in.u32());
  if (file.ndim < 1 || ranks < 1) throw ParseError(path.string(), 1, "invalid restart header");
  const auto size = record_size(file.ndim, ranks);
  while (in.remaining() >= size) file.checkpoints.push_back(decode_binary(in, file.ndim, ranks));
  file.truncated = in.remaining() != 0;
  return file;
}

std::int64_t need_int(const std::map<std::string, std::string>& kv, const std::string& key,
                      const std::filesystem::path& path, std::int64_t line) {
  auto it = kv.find(key);
  std::int64_t v = 0;
  if (it == kv.end() || !text::parse_int(it->second, v)) throw ParseError(path.string(), line, "missing or invalid '" + key + "'");
  return v;
}

double need_real(const std::map<std::string, std::string>& kv, const std::string& key,
                 const std::filesystem::path& path, std::int64_t line) {
  auto it = kv.find(key);
  double v = 0;
  if (it == kv.end() || !text::parse_real(it->second, v)) throw ParseError(path.string(), line, "missing or invalid '" + key + "'");
  return v;
}

std::vector<double> need_list(const std::map<std::string, std::string>& kv, const std::string& key, std::size_t n,
                              const std::filesystem::path& path, std::int64_t line) {
  auto it = kv.find(key);
  std::vector<double> v;
  if (it == kv.end() || !text::parse_real_list(it->second, v) || v.size() != n)
    throw ParseError(path.string(), line, "missing or invalid '" + key + "'");
  return v;
}

RestartCheckpoint decode_ascii(const std::map<std::string, std::string>& kv, std::int64_t index, int ndim,
                               const std::filesystem::path& path, std::int64_t line) {
  RestartCheckpoint c;
  const auto n = static_cast<std::size_t>(ndim);
  c.checkpoint_index = index;
  c.iteration = need_int(kv, "iteration", path, line);
  c.rows_emitted = need_int(kv, "rows_emitted", path, line);
  c.accepted_count = need_int(kv, "accepted_count", path, line);
  c.pending_weight = need_int(kv, "pending_weight", path, line);
  c.current_logf = need_real(kv, "current_logf", path, line);
  c.current_dr_stage = static_cast<std::int32_t>(need_int(kv, "current_dr_stage", path, line));
  c.current_process_id = static_cast<std::int32_t>(need_int(kv, "current_process_id", path, line));
  c.adaptation_measure = need_real(kv, "adaptation_measure", path, line);
  c.proposal_scale = need_real(kv, "proposal.scale", path, line);
  c.proposal_epsilon = need_real(kv, "proposal.epsilon", path, line);
  c.proposal_sample_count = need_int(kv, "proposal.sample_count", path, line);
  c.proposal_adaptation_count = need_int(kv, "proposal.adaptation_count", path, line);
  const auto mean = need_list(kv, "proposal.mean", n, path, line);
  c.proposal_mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), ndim);
  c.proposal_cov = from_upper_triangle(need_list(kv, "proposal.cov_upper", n * (n + 1) / 2, path, line), ndim);
  c.current_state = need_list(kv, "current_state", n, path, line);
  for (int r = 1;; ++r) {
    auto it = kv.find("rng." + std::to_string(r));
    if (it == kv.end()) break;
    const auto parts = text::split(it->second, ',');
    RngState g;
    if (parts.size() != 3 || !text::parse_uint(parts[0], g.state) || !text::parse_uint(parts[1], g.stream_id))
      throw ParseError(path.string(), line, "invalid generator state for rank " + std::to_string(r));
    if (text::trim(parts[2]) != "none") {
      double cache = 0;
      if (!text::parse_real(parts[2], cache)) throw ParseError(path.string(), line, "invalid Gaussian cache");
      g.gauss_cache = cache;
    }
    c.rngs.push_back(g);
  }
  if (c.rngs.empty()) throw ParseError(path.string(), line, "checkpoint has no generator state");
  return c;
}

RestartFile read_ascii(const std::string& contents, const std::filesystem::path& path) {
  RestartFile file;
  std::int64_t line_no = 0;
  std::size_t pos = 0;
  bool in_block = false;
  std::int64_t block_index = 0;
  std::int64_t block_line = 0;
  std::map<std::string, std::string> kv;
  while (pos < contents.size()) {
    const auto eol = contents.find('\n', pos);
    ++line_no;
    if (eol == std::string::npos) {
      // Interrupted mid-line: whatever block this belonged to is incomplete.
      file.truncated = true;
      break;
    }
    const auto line = text::trim(std::string_view(contents).substr(pos, eol - pos));
    pos = eol + 1;
    if (line.empty() || line.front() == '#') continue;
    if (!in_block) {
      if (line.starts_with("checkpoint ")) {
        if (!text::parse_int(line.substr(11), block_index))
          throw ParseError(path.string(), line_no, "invalid checkpoint index");
        in_block = true;
        block_line = line_no;
        kv.clear();
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) throw ParseError(path.string(), line_no, "expected 'key = value'");
      const auto key = text::trim(line.substr(0, eq));
      const auto value = text::trim(line.substr(eq + 1));
      std::int64_t v = 0;
      if (key == "ndim" && text::parse_int(value, v)) file.ndim = static_cast<int>(v);
      else if (key == "ranks" && text::parse_int(value, v)) continue;
      else throw ParseError(path.string(), line_no, "unexpected header line");
      continue;
    }
    if (line == "end") {
      if (file.ndim < 1) throw ParseError(path.string(), block_line, "restart file header lacks ndim");
      file.checkpoints.push_back(decode_ascii(kv, block_index, file.ndim, path, block_line));
      in_block = false;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(path.string(), line_no, "expected 'key = value'");
    kv[std::string(text::trim(line.substr(0, eq)))] = std::string(text::trim(line.substr(eq + 1)));
  }
  if (in_block) file.truncated = true;
  return file;
}

std::string header_bytes(int ndim, int ranks, FileEncoding encoding) {
  if (encoding == FileEncoding::binary) {
    std::string s(kBinaryMagic);
    binary::put_u32(s, kVersion);
    binary::put_u32(s, static_cast<std::uint32_t>(ndim));
    binary::put_u32(s, static_cast<std::uint32_t>(ranks));
    return s;
  }
  return std::string(kAsciiBanner) + "\nndim = " + std::to_string(ndim) + "\nranks = " + std::to_string(ranks) + "\n";
}

std::string encode(const RestartCheckpoint& c, FileEncoding encoding) {
  check_shape(c);
  return encoding == FileEncoding::binary ? encode_binary(c) : encode_ascii(c);
}

bool same_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.size() == 0 || a == b);
}

}  // namespace

bool operator==(const RestartCheckpoint& a, const RestartCheckpoint& b) {
  return a.checkpoint_index == b.checkpoint_index && a.iteration == b.iteration &&
         a.rows_emitted == b.rows_emitted && a.accepted_count == b.accepted_count &&
         a.pending_weight == b.pending_weight && a.current_logf == b.current_logf &&
         a.current_dr_stage == b.current_dr_stage && a.current_process_id == b.current_process_id &&
         a.adaptation_measure == b.adaptation_measure && same_matrix(a.proposal_mean, b.proposal_mean) &&
         same_matrix(a.proposal_cov, b.proposal_cov) && a.proposal_scale == b.proposal_scale &&
         a.proposal_epsilon == b.proposal_epsilon && a.proposal_sample_count == b.proposal_sample_count &&
         a.proposal_adaptation_count == b.proposal_adaptation_count && a.current_state == b.current_state &&
         a.rngs == b.rngs;
}

void create_restart_file(const std::filesystem::path& path, int ndim, int num_ranks, FileEncoding encoding) {
  files::write_all(path, header_bytes(ndim, num_ranks, encoding));
}

void write_restart_checkpoint(const RestartCheckpoint& ckpt, const std::filesystem::path& path,
                              FileEncoding encoding) {
  files::append(path, encode(ckpt, encoding));
}

RestartFile read_restart(const std::filesystem::path& path) {
  const auto bytes = files::read_all(path);
  if (bytes.starts_with(kBinaryMagic)) return read_binary(bytes, path);
  return read_ascii(bytes, path);
}

void rewrite_restart_file(const std::filesystem::path& path, int ndim,
                          const std::vector<RestartCheckpoint>& checkpoints, FileEncoding encoding) {
  const int ranks = checkpoints.empty() ? 1 : static_cast<int>(checkpoints.front().rngs.size());
  std::string contents = header_bytes(ndim, ranks, encoding);
  for (const auto& c : checkpoints) contents += encode(c, encoding);
  files::write_all(path, contents);
}

}  // namespace dramforge
