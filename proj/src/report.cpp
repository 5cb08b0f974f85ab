#include "dramforge/report.hpp"

#include "dramforge/error.hpp"
#include "dramforge/text.hpp"
#include "file_util.hpp"

namespace dramforge {

namespace {

constexpr std::string_view kBanner = "# dramforge simulation report";

void line(std::string& out, std::string_view key, std::string_view value) {
  out += key;
  out += " = ";
  out += value;
  out += '\n';
}

std::string real(double v) { return text::format_real(v); }

struct Cursor {
  const std::filesystem::path& path;
  std::int64_t line_no = 0;

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(path.string(), line_no, what); }

  double to_real(std::string_view v) const {
    double x = 0;
    if (!text::parse_real(v, x)) fail("expected a real number");
    return x;
  }
  std::int64_t to_int(std::string_view v) const {
    std::int64_t x = 0;
    if (!text::parse_int(v, x)) fail("expected an integer");
    return x;
  }
};

}  // namespace

std::string format_report(const ReportStats& s) {
  std::string out(kBanner);
  out += "\n\n";
  line(out, "status", s.status);

  out += "\n[spec]\n";
  for (const auto& key : spec_keys()) {
    out += key + " = " + format_spec_value(s.spec, key);
    out += s.spec.user_keys.contains(key) ? " [user]\n" : " [default]\n";
  }

  out += "\n[stats]\n";
  line(out, "AcceptedCount", std::to_string(s.accepted_count));
  line(out, "MeanAcceptanceRate", real(s.mean_accept_rate));
  line(out, "BurninLocation", std::to_string(s.burnin_loc));
  line(out, "AdaptationCount", std::to_string(s.adaptation_count));
  line(out, "FinalAdaptationMeasure", real(s.final_adaptation_measure));
  line(out, "IntegratedAutocorrelationTime", s.iac_history.empty() ? "none" : text::format_real_list(s.iac_history));
  line(out, "EffectiveSampleSize", real(s.ess));
  line(out, "RefinedSampleSize", std::to_string(s.refined_size));
  line(out, "CompactChainBytes", std::to_string(s.compact_bytes));
  line(out, "VerboseChainBytes", std::to_string(s.verbose_bytes));
  line(out, "VerboseToCompactSizeRatio", real(s.size_ratio));

  if (s.parallel) {
    const auto& p = *s.parallel;
    out += "\n[parallelism]\n";
    line(out, "Mode", to_string(p.mode));
    line(out, "NumWorkers", std::to_string(p.num_workers));
    line(out, "MeasuredCandidateAcceptance", real(p.measured_candidate_acceptance));
    line(out, "FittedGeometricP", real(p.fitted_p));
    line(out, "FitDistanceTV", real(p.fit_distance));
    for (std::size_t n = 0; n < p.speedup.size(); ++n)
      line(out, "PredictedSpeedup(" + std::to_string(n + 1) + ")", real(p.speedup[n]));
    line(out, "PredictedOptimalWorkers", std::to_string(p.optimal_workers));
  }

  out += "\n[config]\n";
  out += s.config_text;
  return out;
}

void write_report(const ReportStats& stats, const std::filesystem::path& path) {
  files::write_all(path, format_report(stats));
}

ReportStats read_report(const std::filesystem::path& path) {
  const auto contents = files::read_all(path);
  ReportStats s;
  Cursor cur{path};
  std::string section;
  bool spec_started = false;
  std::size_t pos = 0;

  while (pos < contents.size()) {
    ++cur.line_no;
    auto eol = contents.find('\n', pos);
    if (eol == std::string::npos) eol = contents.size();
    const auto raw = std::string_view(contents).substr(pos, eol - pos);
    pos = eol + 1;
    const auto ln = text::trim(raw);

    if (ln == "[config]") {
      s.config_text = pos < contents.size() ? contents.substr(pos) : std::string();
      break;
    }
    if (ln.empty() || ln.front() == '#') continue;
    if (ln.front() == '[') {
      section = std::string(ln.substr(1, ln.size() - 2));
      if (section == "parallelism") s.parallel.emplace();
      continue;
    }
    const auto eq = ln.find('=');
    if (eq == std::string_view::npos) cur.fail("expected 'key = value'");
    const std::string key(text::trim(ln.substr(0, eq)));
    auto value = text::trim(ln.substr(eq + 1));

    if (section.empty()) {
      if (key != "status") cur.fail("unknown key '" + key + "'");
      s.status = value;
    } else if (section == "spec") {
      bool user = false;
      if (value.ends_with("[user]")) {
        user = true;
        value = text::trim(value.substr(0, value.size() - 6));
      } else if (value.ends_with("[default]")) {
        value = text::trim(value.substr(0, value.size() - 9));
      } else {
        cur.fail("spec entry lacks its [user] or [default] marker");
      }
      try {
        if (key == "ndim") {
          s.spec = SimSpec::defaults(static_cast<int>(cur.to_int(value)));
          spec_started = true;
        } else {
          if (!spec_started) cur.fail("ndim must come first in the spec echo");
          set_spec_value(s.spec, key, value);
        }
      } catch (const UsageError& e) {
        cur.fail(e.what());
      }
      if (user) s.spec.user_keys.insert(key);
    } else if (section == "stats") {
      if (key == "AcceptedCount") s.accepted_count = cur.to_int(value);
      else if (key == "MeanAcceptanceRate") s.mean_accept_rate = cur.to_real(value);
      else if (key == "BurninLocation") s.burnin_loc = cur.to_int(value);
      else if (key == "AdaptationCount") s.adaptation_count = cur.to_int(value);
      else if (key == "FinalAdaptationMeasure") s.final_adaptation_measure = cur.to_real(value);
      else if (key == "IntegratedAutocorrelationTime") {
        s.iac_history.clear();
        if (value != "none" && !text::parse_real_list(value, s.iac_history)) cur.fail("expected a list of reals");
      } else if (key == "EffectiveSampleSize") s.ess = cur.to_real(value);
      else if (key == "RefinedSampleSize") s.refined_size = cur.to_int(value);
      else if (key == "CompactChainBytes") s.compact_bytes = static_cast<std::uintmax_t>(cur.to_int(value));
      else if (key == "VerboseChainBytes") s.verbose_bytes = static_cast<std::uintmax_t>(cur.to_int(value));
      else if (key == "VerboseToCompactSizeRatio") s.size_ratio = cur.to_real(value);
      else cur.fail("unknown statistic '" + key + "'");
    } else if (section == "parallelism") {
      auto& p = *s.parallel;
      if (key == "Mode") {
        if (value == "single_chain") p.mode = Parallelism::single_chain;
        else if (value == "multi_chain") p.mode = Parallelism::multi_chain;
        else if (value == "none") p.mode = Parallelism::none;
        else cur.fail("unknown parallelism mode");
      } else if (key == "NumWorkers") p.num_workers = static_cast<int>(cur.to_int(value));
      else if (key == "MeasuredCandidateAcceptance") p.measured_candidate_acceptance = cur.to_real(value);
      else if (key == "FittedGeometricP") p.fitted_p = cur.to_real(value);
      else if (key == "FitDistanceTV") p.fit_distance = cur.to_real(value);
      else if (key == "PredictedOptimalWorkers") p.optimal_workers = static_cast<int>(cur.to_int(value));
      else if (key.starts_with("PredictedSpeedup(") && key.ends_with(")")) {
        const auto n = cur.to_int(std::string_view(key).substr(17, key.size() - 18));
        if (n != static_cast<std::int64_t>(p.speedup.size()) + 1) cur.fail("speedup table out of order");
        p.speedup.push_back(cur.to_real(value));
      } else cur.fail("unknown parallelism entry '" + key + "'");
    } else {
      cur.fail("unknown section '" + section + "'");
    }
  }
  if (!spec_started) throw ParseError(path.string(), cur.line_no, "report has no spec echo");
  return s;
}

std::vector<std::string> spec_differences(const SimSpec& a, const SimSpec& b) {
  std::vector<std::string> diff;
  for (const auto& key : spec_keys())
    if (format_spec_value(a, key) != format_spec_value(b, key)) diff.push_back(key);
  return diff;
}

}  // namespace dramforge
