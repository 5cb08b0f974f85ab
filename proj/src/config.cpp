#include "dramforge/config.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "dramforge/error.hpp"
#include "dramforge/text.hpp"
#include "file_util.hpp"

namespace dramforge {

namespace {

struct Entry {
  std::string value;
  std::int64_t line = 0;
};

const std::vector<std::string>& target_keys() {
  static const std::vector<std::string> keys{"kind", "mean", "covariance", "scale", "weights", "means", "covariances"};
  return keys;
}

class TargetBuilder {
 public:
  TargetBuilder(const std::map<std::string, Entry>& entries, int ndim, const std::string& source)
      : entries_(entries), ndim_(ndim), source_(source) {}

  BuiltinTarget build() const {
    const std::string kind = has("kind") ? at("kind").value : "mvn";
    if (kind == "mvn") {
      allow({"kind", "mean", "covariance"});
      Eigen::VectorXd mean = has("mean") ? vector(at("mean")) : Eigen::VectorXd::Zero(ndim_);
      Eigen::MatrixXd cov = has("covariance") ? matrix(at("covariance")) : Eigen::MatrixXd::Identity(ndim_, ndim_);
      return guarded(at_or_kind("covariance"), [&] { return BuiltinTarget::mvn(mean, cov); });
    }
    if (kind == "rosenbrock") {
      allow({"kind", "scale"});
      double scale = 1.0;
      if (has("scale") && (!text::parse_real(at("scale").value, scale) || !(scale > 0.0)))
        fail(at("scale"), "scale must be a positive real");
      return guarded(at_or_kind("scale"), [&] { return BuiltinTarget::rosenbrock(ndim_, scale); });
    }
    if (kind == "gauss_mixture") {
      allow({"kind", "weights", "means", "covariances"});
      if (!has("weights") || !has("means")) fail(at_or_kind("weights"), "gauss_mixture needs weights and means");
      std::vector<double> weights;
      if (!text::parse_real_list(at("weights").value, weights)) fail(at("weights"), "weights must be comma-separated reals");
      std::vector<Eigen::VectorXd> means;
      for (auto part : text::split(at("means").value, ';')) means.push_back(vector({std::string(part), at("means").line}));
      std::vector<Eigen::MatrixXd> covs;
      const std::string cov_text = has("covariances") ? at("covariances").value : "identity";
      if (text::trim(cov_text) == "identity") {
        covs.assign(weights.size(), Eigen::MatrixXd::Identity(ndim_, ndim_));
      } else {
        const std::int64_t line = at("covariances").line;
        for (auto part : text::split(cov_text, ';')) covs.push_back(matrix({std::string(part), line}));
      }
      if (means.size() != weights.size() || covs.size() != weights.size())
        fail(at("weights"), "weights, means and covariances must list the same number of components");
      return guarded(at("weights"), [&] { return BuiltinTarget::gauss_mixture(weights, means, covs); });
    }
    fail(at("kind"), "unknown target kind '" + kind + "' (expected mvn, rosenbrock or gauss_mixture)");
  }

 private:
  bool has(const std::string& k) const { return entries_.contains(k); }
  const Entry& at(const std::string& k) const { return entries_.at(k); }
  Entry at_or_kind(const std::string& k) const {
    if (has(k)) return at(k);
    if (has("kind")) return at("kind");
    return {"", 0};
  }

  [[noreturn]] void fail(const Entry& e, const std::string& what) const { throw ParseError(source_, e.line, what); }

  void allow(std::initializer_list<std::string_view> keys) const {
    for (const auto& [k, e] : entries_)
      if (std::find(keys.begin(), keys.end(), k) == keys.end()) fail(e, "key '" + k + "' does not apply to this target");
  }

  template <class F>
  BuiltinTarget guarded(const Entry& e, F make) const {
    try {
      return make();
    } catch (const UsageError& err) {
      fail(e, err.what());
    }
  }

  Eigen::VectorXd vector(const Entry& e) const {
    std::vector<double> v;
    if (!text::parse_real_list(e.value, v) || static_cast<int>(v.size()) != ndim_)
      fail(e, "expected " + std::to_string(ndim_) + " comma-separated reals");
    return Eigen::Map<const Eigen::VectorXd>(v.data(), ndim_);
  }

  Eigen::MatrixXd matrix(const Entry& e) const {
    if (text::trim(e.value) == "identity") return Eigen::MatrixXd::Identity(ndim_, ndim_);
    std::vector<double> v;
    if (!text::parse_real_list(e.value, v) || static_cast<int>(v.size()) != ndim_ * ndim_)
      fail(e, "expected 'identity' or " + std::to_string(ndim_ * ndim_) + " row-major reals");
    Eigen::MatrixXd m(ndim_, ndim_);
    for (int i = 0; i < ndim_; ++i)
      for (int j = 0; j < ndim_; ++j) m(i, j) = v[static_cast<std::size_t>(i * ndim_ + j)];
    return m;
  }

  const std::map<std::string, Entry>& entries_;
  int ndim_;
  const std::string& source_;
};

}  // namespace

std::pair<std::string, std::string> parse_override(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0)
    throw ParseError("--set", 0, "expected key=value, got '" + std::string(assignment) + "'");
  return {std::string(text::trim(assignment.substr(0, eq))), std::string(text::trim(assignment.substr(eq + 1)))};
}

RunConfig parse_config(std::string_view contents, const std::string& source, const Overrides& overrides) {
  std::vector<std::pair<std::string, Entry>> spec_entries;
  std::map<std::string, Entry> target_entries;
  bool in_target = false;
  bool seen_target = false;

  std::int64_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= contents.size()) {
    ++line_no;
    auto eol = contents.find('\n', pos);
    if (eol == std::string_view::npos) eol = contents.size();
    auto line = contents.substr(pos, eol - pos);
    pos = eol + 1;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = text::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line != "[target]") throw ParseError(source, line_no, "unknown section '" + std::string(line) + "'");
      if (seen_target) throw ParseError(source, line_no, "duplicate [target] section");
      in_target = seen_target = true;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(source, line_no, "expected 'key = value'");
    const std::string key(text::trim(line.substr(0, eq)));
    const std::string value(text::trim(line.substr(eq + 1)));
    if (in_target) {
      if (std::find(target_keys().begin(), target_keys().end(), key) == target_keys().end())
        throw ParseError(source, line_no, "unknown target key '" + key + "'");
      if (target_entries.contains(key)) throw ParseError(source, line_no, "duplicate target key '" + key + "'");
      target_entries[key] = {value, line_no};
    } else {
      if (std::find(spec_keys().begin(), spec_keys().end(), key) == spec_keys().end())
        throw ParseError(source, line_no, "unknown key '" + key + "'");
      spec_entries.push_back({key, {value, line_no}});
    }
  }

  for (const auto& [key, value] : overrides) {
    if (key.starts_with("target.")) {
      const auto k = key.substr(7);
      if (std::find(target_keys().begin(), target_keys().end(), k) == target_keys().end())
        throw ParseError("--set", 0, "unknown target key '" + k + "'");
      target_entries[k] = {value, 0};
    } else {
      if (std::find(spec_keys().begin(), spec_keys().end(), key) == spec_keys().end())
        throw ParseError("--set", 0, "unknown key '" + key + "'");
      spec_entries.push_back({key, {value, 0}});
    }
  }

  const auto source_of = [&](std::int64_t line) { return line == 0 ? std::string("--set") : source; };

  // ndim first: several defaults depend on it.
  Entry ndim_entry{"", 0};
  bool have_ndim = false;
  for (const auto& [k, e] : spec_entries)
    if (k == "ndim") {
      ndim_entry = e;
      have_ndim = true;
    }
  if (!have_ndim) throw ParseError(source, 1, "missing required key 'ndim'");
  std::int64_t ndim = 0;
  if (!text::parse_int(ndim_entry.value, ndim) || ndim < 1 || ndim > 100000)
    throw ParseError(source_of(ndim_entry.line), ndim_entry.line, "ndim must be a positive integer");

  RunConfig cfg;
  cfg.text = std::string(contents);
  cfg.spec = SimSpec::defaults(static_cast<int>(ndim));
  std::map<std::string, std::int64_t> key_line{{"ndim", ndim_entry.line}};
  cfg.spec.user_keys.insert("ndim");
  for (const auto& [k, e] : spec_entries) {
    if (k == "ndim") continue;
    try {
      set_spec_value(cfg.spec, k, e.value);
    } catch (const UsageError& err) {
      throw ParseError(source_of(e.line), e.line, err.what());
    }
    cfg.spec.user_keys.insert(k);
    key_line[k] = e.line;
  }
  if (const auto v = find_violation(cfg.spec)) {
    const auto it = key_line.find(v->key);
    const std::int64_t line = it == key_line.end() ? ndim_entry.line : it->second;
    throw ParseError(source_of(line), line, v->message);
  }

  cfg.target = TargetBuilder(target_entries, cfg.spec.ndim, source).build();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path, const Overrides& overrides) {
  std::string contents;
  try {
    contents = files::read_all(path);
  } catch (const IoError& e) {
    throw ParseError(path.string(), 0, e.what());
  }
  return parse_config(contents, path.string(), overrides);
}

}  // namespace dramforge
