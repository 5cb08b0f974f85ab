#include "dramforge/sim_spec.hpp"

#include <cmath>

#include "dramforge/text.hpp"

namespace dramforge {

std::string_view to_string(ChainFormat f) noexcept {
  return f == ChainFormat::compact ? "compact" : "verbose";
}

std::string_view to_string(FileEncoding e) noexcept {
  return e == FileEncoding::ascii ? "ascii" : "binary";
}

std::string_view to_string(Parallelism p) noexcept {
  switch (p) {
    case Parallelism::none: return "none";
    case Parallelism::single_chain: return "single_chain";
    case Parallelism::multi_chain: return "multi_chain";
  }
  return "none";
}

SimSpec SimSpec::defaults(int ndim) {
  SimSpec spec;
  spec.ndim = ndim;
  if (ndim >= 1) {
    spec.start_point.assign(static_cast<std::size_t>(ndim), 0.0);
    spec.proposal_scale = 2.38 / std::sqrt(static_cast<double>(ndim));
    spec.adaptation_period = 100 * static_cast<std::int64_t>(ndim);
  }
  return spec;
}

const std::vector<std::string>& spec_keys() {
  static const std::vector<std::string> keys = {
      "ndim",
      "chain_size",
      "start_point",
      "seed",
      "output_prefix",
      "chain_format",
      "file_encoding",
      "adaptation_period",
      "greedy_adaptation_count",
      "dr_stage_count",
      "dr_scale_factor",
      "proposal_scale",
      "cov_epsilon",
      "parallelism",
      "num_workers",
      "target_acceptance_window",
  };
  return keys;
}

std::string format_spec_value(const SimSpec& s, std::string_view key) {
  using text::format_real;
  if (key == "ndim") return std::to_string(s.ndim);
  if (key == "chain_size") return std::to_string(s.chain_size);
  if (key == "start_point") return text::format_real_list(s.start_point);
  if (key == "seed") return std::to_string(s.seed);
  if (key == "output_prefix") return s.output_prefix;
  if (key == "chain_format") return std::string(to_string(s.chain_format));
  if (key == "file_encoding") return std::string(to_string(s.file_encoding));
  if (key == "adaptation_period") return std::to_string(s.adaptation_period);
  if (key == "greedy_adaptation_count") return std::to_string(s.greedy_adaptation_count);
  if (key == "dr_stage_count") return std::to_string(s.dr_stage_count);
  if (key == "dr_scale_factor") return format_real(s.dr_scale_factor);
  if (key == "proposal_scale") return format_real(s.proposal_scale);
  if (key == "cov_epsilon") return format_real(s.cov_epsilon);
  if (key == "parallelism") return std::string(to_string(s.parallelism));
  if (key == "num_workers") return std::to_string(s.num_workers);
  if (key == "target_acceptance_window") {
    if (!s.target_acceptance_window) return "none";
    return format_real(s.target_acceptance_window->first) + "," +
           format_real(s.target_acceptance_window->second);
  }
  throw UsageError("unknown settings key '" + std::string(key) + "'");
}

namespace {

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected) {
  throw UsageError("invalid value '" + std::string(value) + "' for '" + std::string(key) + "': expected " +
                   std::string(expected));
}

std::int64_t int_value(std::string_view key, std::string_view value) {
  std::int64_t v = 0;
  if (!text::parse_int(value, v)) bad_value(key, value, "an integer");
  return v;
}

int small_int_value(std::string_view key, std::string_view value) {
  const auto v = int_value(key, value);
  if (v < -1'000'000'000 || v > 1'000'000'000) bad_value(key, value, "an integer of moderate size");
  return static_cast<int>(v);
}

double real_value(std::string_view key, std::string_view value) {
  double v = 0;
  if (!text::parse_real(value, v)) bad_value(key, value, "a real number");
  return v;
}

}  // namespace

void set_spec_value(SimSpec& s, std::string_view key, std::string_view raw) {
  const auto value = text::trim(raw);
  if (key == "ndim") {
    s.ndim = small_int_value(key, value);
  } else if (key == "chain_size") {
    s.chain_size = int_value(key, value);
  } else if (key == "start_point") {
    if (!text::parse_real_list(value, s.start_point)) bad_value(key, value, "comma-separated reals");
  } else if (key == "seed") {
    if (!text::parse_uint(value, s.seed)) bad_value(key, value, "an unsigned 64-bit integer");
  } else if (key == "output_prefix") {
    s.output_prefix = std::string(value);
  } else if (key == "chain_format") {
    if (value == "compact") s.chain_format = ChainFormat::compact;
    else if (value == "verbose") s.chain_format = ChainFormat::verbose;
    else bad_value(key, value, "compact or verbose");
  } else if (key == "file_encoding") {
    if (value == "ascii") s.file_encoding = FileEncoding::ascii;
    else if (value == "binary") s.file_encoding = FileEncoding::binary;
    else bad_value(key, value, "ascii or binary");
  } else if (key == "adaptation_period") {
    s.adaptation_period = int_value(key, value);
  } else if (key == "greedy_adaptation_count") {
    s.greedy_adaptation_count = small_int_value(key, value);
  } else if (key == "dr_stage_count") {
    s.dr_stage_count = small_int_value(key, value);
  } else if (key == "dr_scale_factor") {
    s.dr_scale_factor = real_value(key, value);
  } else if (key == "proposal_scale") {
    s.proposal_scale = real_value(key, value);
  } else if (key == "cov_epsilon") {
    s.cov_epsilon = real_value(key, value);
  } else if (key == "parallelism") {
    if (value == "none") s.parallelism = Parallelism::none;
    else if (value == "single_chain") s.parallelism = Parallelism::single_chain;
    else if (value == "multi_chain") s.parallelism = Parallelism::multi_chain;
    else bad_value(key, value, "none, single_chain or multi_chain");
  } else if (key == "num_workers") {
    s.num_workers = small_int_value(key, value);
  } else if (key == "target_acceptance_window") {
    if (value == "none") {
      s.target_acceptance_window.reset();
      return;
    }
    std::vector<double> bounds;
    if (!text::parse_real_list(value, bounds) || bounds.size() != 2) bad_value(key, value, "none or 'low,high'");
    s.target_acceptance_window = std::pair{bounds[0], bounds[1]};
  } else {
    throw UsageError("unknown settings key '" + std::string(key) + "'");
  }
}

std::optional<SpecViolation> find_violation(const SimSpec& s) {
  auto fail = [](std::string key, std::string message) {
    return std::optional<SpecViolation>(SpecViolation{std::move(key), std::move(message)});
  };
  if (s.ndim < 1) return fail("ndim", "must be a positive integer");
  if (s.chain_size < 1) return fail("chain_size", "must be a positive integer");
  if (static_cast<int>(s.start_point.size()) != s.ndim)
    return fail("start_point", "must have exactly ndim = " + std::to_string(s.ndim) + " entries");
  for (double x : s.start_point)
    if (!std::isfinite(x)) return fail("start_point", "entries must be finite");
  if (s.output_prefix.empty()) return fail("output_prefix", "must not be empty");
  if (s.adaptation_period < 1) return fail("adaptation_period", "must be a positive integer");
  if (s.greedy_adaptation_count < 0) return fail("greedy_adaptation_count", "must be nonnegative");
  if (s.dr_stage_count < 0 || s.dr_stage_count > kMaxDelayedRejectionStages)
    return fail("dr_stage_count", "must be between 0 and " + std::to_string(kMaxDelayedRejectionStages));
  if (!(s.dr_scale_factor > 0.0 && s.dr_scale_factor < 1.0)) return fail("dr_scale_factor", "must lie in (0, 1)");
  if (!(s.proposal_scale > 0.0) || !std::isfinite(s.proposal_scale))
    return fail("proposal_scale", "must be a finite positive real");
  if (!(s.cov_epsilon > 0.0) || !std::isfinite(s.cov_epsilon))
    return fail("cov_epsilon", "must be a finite positive real");
  if (s.num_workers < 1) return fail("num_workers", "must be a positive integer");
  if (s.parallelism == Parallelism::multi_chain && s.num_workers < 2)
    return fail("num_workers", "multi_chain parallelism needs at least 2 chains");
  if (s.target_acceptance_window) {
    const auto [lo, hi] = *s.target_acceptance_window;
    if (!(lo > 0.0 && hi < 1.0 && lo < hi))
      return fail("target_acceptance_window", "needs 0 < low < high < 1");
  }
  return std::nullopt;
}

void validate(const SimSpec& spec) {
  if (auto v = find_violation(spec)) throw UsageError("invalid '" + v->key + "': " + v->message);
}

SimSpec build_spec(const std::vector<std::pair<std::string, std::string>>& assignments) {
  int ndim = 1;
  for (const auto& [key, value] : assignments) {
    if (key == "ndim") {
      SimSpec probe;
      set_spec_value(probe, key, value);
      ndim = probe.ndim;
    }
  }
  SimSpec spec = SimSpec::defaults(ndim);
  for (const auto& [key, value] : assignments) {
    set_spec_value(spec, key, value);
    spec.user_keys.insert(key);
  }
  return spec;
}

}  // namespace dramforge
