#include "dramforge/postproc.hpp"

#include <algorithm>
#include <cmath>

#include "dramforge/chain_io.hpp"
#include "dramforge/checkpoint.hpp"
#include "dramforge/contribution.hpp"
#include "dramforge/error.hpp"
#include "dramforge/refinement.hpp"
#include "dramforge/report.hpp"
#include "dramforge/text.hpp"
#include "file_util.hpp"

namespace dramforge {

namespace fs = std::filesystem;

namespace {

constexpr std::size_t kMaxExportLag = 200;

fs::path existing(const std::string& prefix, const std::string& stem) {
  for (const char* ext : {".txt", ".bin"}) {
    fs::path p = prefix + stem + ext;
    if (fs::exists(p)) return p;
  }
  throw IoError("no '" + prefix + stem + "' file (.txt or .bin) found");
}

std::vector<double> column(const CompactChain& c, std::size_t first, int coord, std::vector<std::int64_t>* weights) {
  std::vector<double> v;
  for (std::size_t i = first; i < c.rows.size(); ++i) {
    const auto& r = c.rows[i];
    v.push_back(coord < 0 ? r.logf : r.state[static_cast<std::size_t>(coord)]);
    if (weights) weights->push_back(r.weight);
  }
  return v;
}

std::string stats_csv(const std::string& prefix) {
  const auto chain = read_chain(existing(prefix, "_chain"));
  if (chain.rows.empty()) throw IoError("chain of '" + prefix + "' is empty");
  const auto burnin = chain.rows.back().burnin_loc;
  const auto refined = refine(chain, burnin);
  std::string s = "statistic,value\n";
  const auto add = [&](const std::string& k, const std::string& v) { s += k + "," + v + "\n"; };
  add("chainSize", std::to_string(chain.total_weight()));
  add("uniqueStates", std::to_string(chain.rows.size()));
  add("meanAcceptanceRate", text::format_real(chain.rows.back().mean_accept_rate));
  add("burninLocation", std::to_string(burnin));
  for (std::size_t i = 0; i < refined.iac_history.size(); ++i)
    add("integratedAutocorrelationTime_pass" + std::to_string(i + 1), text::format_real(refined.iac_history[i]));
  add("effectiveSampleSize", text::format_real(effective_sample_size(chain, burnin)));
  add("refinedSampleSize", std::to_string(refined.states.size()));
  return s;
}

std::string acf_csv(const std::string& prefix, int& ndim) {
  const auto chain = read_chain(existing(prefix, "_chain"));
  if (chain.rows.empty()) throw IoError("chain of '" + prefix + "' is empty");
  ndim = chain.ndim;
  const auto burnin = static_cast<std::size_t>(chain.rows.back().burnin_loc);
  const auto sample = read_sample(prefix + "_sample.txt");

  std::vector<std::vector<double>> chain_acf, sample_acf;
  for (int d = 0; d < ndim; ++d) {
    std::vector<std::int64_t> w;
    const auto v = column(chain, burnin, d, &w);
    std::int64_t total = 0;
    for (auto x : w) total += x;
    const auto lag = static_cast<std::size_t>(std::max<std::int64_t>(0, std::min<std::int64_t>(kMaxExportLag, total - 1)));
    chain_acf.push_back(total >= 2 ? weighted_acf(v, w, lag) : std::vector<double>{1.0});
    std::vector<double> x;
    for (const auto& p : sample.states) x.push_back(p[static_cast<std::size_t>(d)]);
    sample_acf.push_back(x.size() >= 2 ? acf(x, std::min(kMaxExportLag, x.size() - 1)) : std::vector<double>{1.0});
  }

  std::string s = "lag";
  for (int d = 1; d <= ndim; ++d) s += ",chain_var" + std::to_string(d);
  for (int d = 1; d <= ndim; ++d) s += ",sample_var" + std::to_string(d);
  s += '\n';
  std::size_t rows = 0;
  for (const auto& a : chain_acf) rows = std::max(rows, a.size());
  for (std::size_t k = 0; k < rows; ++k) {
    s += std::to_string(k);
    for (const auto* set : {&chain_acf, &sample_acf}) {
      for (const auto& a : *set) {
        s += ',';
        if (k < a.size()) text::append_real(s, a[k]);
      }
    }
    s += '\n';
  }
  return s;
}

std::string covmat_csv(const std::string& prefix, int& ndim) {
  const auto restart = read_restart(existing(prefix, "_restart"));
  ndim = restart.ndim;
  std::string s = "checkpoint,iteration,adaptationMeasure";
  for (int i = 1; i <= ndim; ++i)
    for (int j = i; j <= ndim; ++j) s += ",cov_" + std::to_string(i) + "_" + std::to_string(j);
  s += '\n';
  for (const auto& c : restart.checkpoints) {
    s += std::to_string(c.checkpoint_index) + "," + std::to_string(c.iteration) + ",";
    text::append_real(s, c.adaptation_measure);
    for (int i = 0; i < ndim; ++i)
      for (int j = i; j < ndim; ++j) {
        s += ',';
        text::append_real(s, c.proposal_cov(i, j));
      }
    s += '\n';
  }
  return s;
}

std::string contrib_csv(const std::string& prefix, ContributionStats& fit) {
  const auto report = read_report(prefix + "_report.txt");
  const auto chain = read_chain(existing(prefix, "_chain"));
  const int workers = report.spec.parallelism == Parallelism::single_chain ? report.spec.num_workers : 1;
  fit = contribution_from_chain(chain, workers);
  if (fit.accepted_steps() > 0) fit = fit_geometric(fit);
  const double q = 1.0 - fit.fitted_p;
  const double mass = 1.0 - std::pow(q, workers);
  const double total = static_cast<double>(std::max<std::int64_t>(1, fit.accepted_steps()));
  std::string s = "rank,count,empiricalProbability,geometricProbability\n";
  for (int k = 1; k <= workers; ++k) {
    const auto count = fit.counts[static_cast<std::size_t>(k - 1)];
    s += std::to_string(k) + "," + std::to_string(count) + ",";
    text::append_real(s, static_cast<double>(count) / total);
    s += ',';
    text::append_real(s, mass > 0.0 ? std::pow(q, k - 1) * fit.fitted_p / mass : 0.0);
    s += '\n';
  }
  return s;
}

std::string script(Export what, const fs::path& csv, int ndim, const ContributionStats& fit) {
  const std::string file = csv.filename().string();
  std::string s = "set datafile separator ','\nset key autotitle columnhead\nset grid\n";
  switch (what) {
    case Export::stats:
      s += "set style data histograms\nset style fill solid 0.6\nset xtics rotate by -45\n";
      s += "plot '" + file + "' using 2:xtic(1) title 'value'\n";
      break;
    case Export::acf:
      s += "set xlabel 'lag'\nset ylabel 'autocorrelation'\nplot \\\n";
      for (int d = 0; d < ndim; ++d) {
        s += "  '" + file + "' using 1:" + std::to_string(d + 2) + " with lines, \\\n";
        s += "  '" + file + "' using 1:" + std::to_string(ndim + d + 2) + " with points";
        s += d + 1 < ndim ? ", \\\n" : "\n";
      }
      break;
    case Export::covmat:
      s += "set xlabel 'checkpoint'\nset ylabel 'proposal covariance'\n";
      s += "plot for [c=4:" + std::to_string(3 + ndim * (ndim + 1) / 2) + "] '" + file + "' using 1:c with linespoints\n";
      break;
    case Export::contrib:
      s += "set xlabel 'rank'\nset ylabel 'probability'\nset logscale y\n";
      s += "set title sprintf('geometric fit p = %.4f, TV = %.4f', " + text::format_real(fit.fitted_p) + ", " +
           text::format_real(fit.fit_distance) + ")\n";
      s += "plot '" + file + "' using 1:3 with points pt 7, '" + file + "' using 1:4 with lines\n";
      break;
  }
  return s;
}

}  // namespace

std::optional<Export> parse_export(std::string_view name) noexcept {
  if (name == "stats") return Export::stats;
  if (name == "acf") return Export::acf;
  if (name == "covmat") return Export::covmat;
  if (name == "contrib") return Export::contrib;
  return std::nullopt;
}

std::string_view to_string(Export e) noexcept {
  switch (e) {
    case Export::stats: return "stats";
    case Export::acf: return "acf";
    case Export::covmat: return "covmat";
    case Export::contrib: return "contrib";
  }
  return "stats";
}

ExportFiles export_postproc(const std::string& prefix, Export what) {
  ExportFiles out{prefix + "_" + std::string(to_string(what)) + ".csv", prefix + "_" + std::string(to_string(what)) + ".gp"};
  int ndim = 1;
  ContributionStats fit;
  std::string csv;
  switch (what) {
    case Export::stats: csv = stats_csv(prefix); break;
    case Export::acf: csv = acf_csv(prefix, ndim); break;
    case Export::covmat: csv = covmat_csv(prefix, ndim); break;
    case Export::contrib: csv = contrib_csv(prefix, fit); break;
  }
  files::write_all(out.csv, csv);
  files::write_all(out.script, script(what, out.csv, ndim, fit));
  return out;
}

}  // namespace dramforge
