#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "fawb/automaton.hpp"
#include "fawb/error.hpp"
#include "fawb/generators.hpp"
#include "fawb/transform.hpp"

namespace fawb {

inline constexpr std::string_view kToolVersion = "0.1.0";
inline constexpr std::string_view kPipelineOrder =
    "compile -> remove_epsilon -> trim -> optimize_nfa -> trim -> determinize -> minimize_brzozowski "
    "(cross-checked with minimize_hopcroft)";
inline constexpr std::string_view kCountingRule =
    "state counts exclude unreachable states and the implicit dead state; nfa_states is the trimmed "
    "epsilon-free NFA";

enum class RowStatus { Ok, CapExceeded, MinimizerMismatch, NotEquivalent, Error };

inline std::string_view to_string(RowStatus s) {
  switch (s) {
    case RowStatus::Ok: return "ok";
    case RowStatus::CapExceeded: return "cap_exceeded";
    case RowStatus::MinimizerMismatch: return "minimizer_mismatch";
    case RowStatus::NotEquivalent: return "not_equivalent";
    case RowStatus::Error: return "error";
  }
  return "error";
}

struct StageTimes {
  double compile = 0, optimize = 0, determinize = 0, minimize = 0;
};

/// One pattern (per-pattern runs) or one merge step (incremental runs).
/// A count is empty when its stage did not complete.
struct ReportRow {
  int key = 0;
  double x = 0;  // pattern size or merge step
  std::optional<std::size_t> nfa_states, opt_nfa_states, dfa_states, mdfa_states;
  std::optional<std::size_t> nfa_max_fanout, mdfa_max_fanout;
  std::optional<StageTimes> times;
  RowStatus status = RowStatus::Ok;
  std::string detail;
  bool equivalence_checked = false;
};

struct ExperimentConfig {
  std::size_t cap = kDefaultStateCap;
  std::uint64_t seed = 0;
  /// Fraction of rows whose four automata are checked with equivalent().
  double verify_fraction = 1.0;
  bool cross_check_hopcroft = true;
  bool record_timings = false;
  unsigned jobs = 1;
};

namespace detail {

class Stopwatch {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

inline bool sampled_for_verification(const ExperimentConfig& cfg, int key) {
  if (cfg.verify_fraction >= 1.0) return true;
  if (cfg.verify_fraction <= 0.0) return false;
  SplitMix64 rng(cfg.seed ^ (0xa0761d6478bd642fULL * static_cast<std::uint64_t>(key + 1)));
  return rng.unit() < cfg.verify_fraction;
}

/// Runs the pipeline on an already built NFA. `build_seconds` is charged to the compile stage.
inline ReportRow run_pipeline(int key, double x, const Automaton& raw, double build_seconds,
                              const ExperimentConfig& cfg) {
  ReportRow row;
  row.key = key;
  row.x = x;
  StageTimes times;
  Stopwatch clock;
  const DeterminizeOptions dopts{cfg.cap};
  try {
    const Automaton nfa = trim(remove_epsilon(raw));
    times.compile = build_seconds + clock.lap();
    row.nfa_states = nfa.state_count;
    row.nfa_max_fanout = stats(nfa).max_fanout;

    const Automaton opt = trim(optimize_nfa(nfa));
    times.optimize = clock.lap();
    row.opt_nfa_states = opt.state_count;

    std::optional<Automaton> dfa, mdfa;
    try {
      dfa = determinize(opt, dopts);
      row.dfa_states = dfa->state_count;
    } catch (const CapExceeded& e) {
      row.status = RowStatus::CapExceeded;
      row.detail = e.what();
    }
    times.determinize = clock.lap();
    try {
      mdfa = minimize_brzozowski(opt, dopts);
      row.mdfa_states = mdfa->state_count;
      row.mdfa_max_fanout = stats(*mdfa).max_fanout;
    } catch (const CapExceeded& e) {
      row.status = RowStatus::CapExceeded;
      row.detail = e.what();
    }
    times.minimize = clock.lap();

    if (cfg.cross_check_hopcroft && dfa && mdfa && !isomorphic(minimize_hopcroft(*dfa), *mdfa)) {
      row.status = RowStatus::MinimizerMismatch;
      row.detail = "hopcroft and brzozowski results are not isomorphic";
    }
    if (row.status == RowStatus::Ok && sampled_for_verification(cfg, key)) {
      row.equivalence_checked = true;
      const bool same = equivalent(nfa, raw, dopts) && equivalent(nfa, opt, dopts) &&
                        equivalent(nfa, *dfa, dopts) && equivalent(nfa, *mdfa, dopts);
      if (!same) {
        row.status = RowStatus::NotEquivalent;
        row.detail = "pipeline stages accept different languages";
      }
    }
  } catch (const CapExceeded& e) {
    row.status = RowStatus::CapExceeded;
    row.detail = e.what();
  } catch (const std::exception& e) {
    row.status = RowStatus::Error;
    row.detail = e.what();
  }
  if (cfg.record_timings) row.times = times;
  return row;
}

/// Evaluates `count` independent rows, possibly on several threads; the
/// output order is the index order regardless of scheduling.
inline std::vector<ReportRow> run_rows(std::size_t count, unsigned jobs,
                                       const std::function<ReportRow(std::size_t)>& make) {
  std::vector<ReportRow> rows(count);
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) rows[i] = make(i);
    return rows;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  for (unsigned w = 0; w < std::min<std::size_t>(jobs, count); ++w)
    workers.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < count;) rows[i] = make(i);
    });
  for (auto& t : workers) t.join();
  return rows;
}

inline ReportRow build_failure_row(int key, double x, const std::exception& e) {
  ReportRow row;
  row.key = key;
  row.x = x;
  row.status = RowStatus::Error;
  row.detail = e.what();
  return row;
}

}  // namespace detail

/// One row per pattern, ordered by pattern id.
inline std::vector<ReportRow> per_pattern_experiment(std::vector<Pattern> ps, const ExperimentConfig& cfg = {}) {
  std::sort(ps.begin(), ps.end(), [](const Pattern& a, const Pattern& b) { return a.id < b.id; });
  return detail::run_rows(ps.size(), cfg.jobs, [&](std::size_t i) {
    const Pattern& p = ps[i];
    double x = 0;
    try {
      x = pattern_size(p);
      detail::Stopwatch clock;
      const Automaton nfa = build_pattern(p);
      return detail::run_pipeline(p.id, x, nfa, clock.lap(), cfg);
    } catch (const std::exception& e) {
      return detail::build_failure_row(p.id, x, e);
    }
  });
}

/// Row k (1-based) runs the pipeline on the merge of the first k patterns.
inline std::vector<ReportRow> incremental_merge_experiment(const std::vector<Pattern>& ps,
                                                           const ExperimentConfig& cfg = {}) {
  if (ps.size() < 2) throw std::invalid_argument("incremental_merge_experiment: needs at least 2 patterns");
  std::vector<Automaton> built;
  std::vector<int> ids;
  for (const auto& p : ps) {
    built.push_back(build_pattern(p));
    ids.push_back(p.id);
  }
  return detail::run_rows(ps.size(), cfg.jobs, [&](std::size_t i) {
    const std::size_t k = i + 1;
    detail::Stopwatch clock;
    const std::vector<Automaton> prefix(built.begin(), built.begin() + static_cast<std::ptrdiff_t>(k));
    const std::vector<int> prefix_ids(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(k));
    const Automaton merged = merge_patterns(prefix, prefix_ids);
    return detail::run_pipeline(static_cast<int>(k), static_cast<double>(k), merged, clock.lap(), cfg);
  });
}

enum class GrowthClass { Equal, Linear, Polynomial, Exponential };

inline std::string_view to_string(GrowthClass g) {
  switch (g) {
    case GrowthClass::Equal: return "equal";
    case GrowthClass::Linear: return "linear";
    case GrowthClass::Polynomial: return "polynomial";
    case GrowthClass::Exponential: return "exponential";
  }
  return "linear";
}

struct GrowthThresholds {
  double linear_low = 0.8;
  double polynomial_slope = 1.2;
  double r2_margin = 0.05;
};

struct LinearFit {
  double slope = 0, intercept = 0, r2 = 0;
};

/// Ordinary least squares of y on x.
inline LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LinearFit f;
  f.slope = sxx > 0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  double ssr = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    ssr += r * r;
  }
  f.r2 = syy > 0 ? 1.0 - ssr / syy : (ssr < 1e-12 ? 1.0 : 0.0);
  return f;
}

struct GrowthClassification {
  GrowthClass cls = GrowthClass::Linear;
  LinearFit loglog;   // log y vs log x
  LinearFit semilog;  // log y vs x
  std::optional<LinearFit> ratio;  // y / baseline vs x
  bool ratio_equal = false;
  /// Log-log slope fell under the linear band; the class is still Linear.
  bool below_linear_band = false;
};

/// Classifies how `y` grows with `x`.
///
/// Equal when a baseline is given and y equals it at every point;
/// Exponential when the semi-log fit has positive slope and beats the log-log
/// fit's R² by at least the margin; otherwise by log-log slope: above the
/// polynomial threshold is Polynomial, anything else (including sub-linear
/// and flat series) is Linear, with `below_linear_band` set when the slope
/// is under the linear band.
inline GrowthClassification classify_growth(const std::vector<double>& x, const std::vector<double>& y,
                                            const std::vector<double>& baseline = {},
                                            const GrowthThresholds& th = {}) {
  if (x.size() != y.size()) throw std::invalid_argument("classify_growth: x and y differ in length");
  if (x.size() < 4) throw Error("classify_growth: at least 4 points are required");
  for (std::size_t i = 1; i < x.size(); ++i)
    if (!(x[i] > x[i - 1])) throw Error("classify_growth: x must be strictly increasing");
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!(x[i] > 0) || !(y[i] > 0)) throw Error("classify_growth: values must be positive");

  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  GrowthClassification g;
  g.loglog = least_squares(lx, ly);
  g.semilog = least_squares(x, ly);
  if (!baseline.empty()) {
    if (baseline.size() != y.size()) throw std::invalid_argument("classify_growth: baseline length mismatch");
    std::vector<double> ratio;
    g.ratio_equal = true;
    for (std::size_t i = 0; i < y.size(); ++i) {
      ratio.push_back(y[i] / baseline[i]);
      g.ratio_equal = g.ratio_equal && y[i] == baseline[i];
    }
    g.ratio = least_squares(x, ratio);
  }
  if (g.ratio_equal) g.cls = GrowthClass::Equal;
  else if (g.semilog.slope > 0 && g.semilog.r2 - g.loglog.r2 >= th.r2_margin) g.cls = GrowthClass::Exponential;
  else if (g.loglog.slope > th.polynomial_slope) g.cls = GrowthClass::Polynomial;
  else g.cls = GrowthClass::Linear;
  g.below_linear_band = g.cls == GrowthClass::Linear && g.loglog.slope < th.linear_low;
  return g;
}

enum class Series { Nfa, OptNfa, Dfa, Mdfa };

inline std::string_view to_string(Series s) {
  switch (s) {
    case Series::Nfa: return "nfa_states";
    case Series::OptNfa: return "opt_nfa_states";
    case Series::Dfa: return "dfa_states";
    case Series::Mdfa: return "mdfa_states";
  }
  return "mdfa_states";
}

inline const std::optional<std::size_t>& series_value(const ReportRow& r, Series s) {
  switch (s) {
    case Series::Nfa: return r.nfa_states;
    case Series::OptNfa: return r.opt_nfa_states;
    case Series::Dfa: return r.dfa_states;
    case Series::Mdfa: return r.mdfa_states;
  }
  return r.mdfa_states;
}

/// Classifies one count column against the rows' x axis (pattern size or
/// merge step). Rows missing the value are skipped; rows sharing an x value
/// are averaged. For the DFA columns the optimized NFA column is the
/// baseline of the Equal test.
inline GrowthClassification classify_growth(const std::vector<ReportRow>& rows, Series series,
                                            const GrowthThresholds& th = {}) {
  std::map<double, std::tuple<double, double, std::size_t>> by_x;
  const bool with_baseline = series == Series::Dfa || series == Series::Mdfa;
  for (const auto& r : rows) {
    const auto& v = series_value(r, series);
    if (!v || (with_baseline && !r.opt_nfa_states)) continue;
    auto& [sum, base, n] = by_x[r.x];
    sum += static_cast<double>(*v);
    base += with_baseline ? static_cast<double>(*r.opt_nfa_states) : 0.0;
    ++n;
  }
  std::vector<double> x, y, baseline;
  for (const auto& [xv, acc] : by_x) {
    const auto& [sum, base, n] = acc;
    x.push_back(xv);
    y.push_back(sum / static_cast<double>(n));
    if (with_baseline) baseline.push_back(base / static_cast<double>(n));
  }
  return classify_growth(x, y, baseline, th);
}

struct RunManifest {
  std::string experiment;
  std::uint64_t seed = 0;
  std::size_t cap = kDefaultStateCap;
  double verify_fraction = 1.0;
  std::string start_kind;
  GrowthThresholds thresholds;
};

struct NamedGrowth {
  std::string series;
  GrowthClassification growth;
};

namespace detail {

inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string count_cell(const std::optional<std::size_t>& v, RowStatus status) {
  if (v) return std::to_string(*v);
  return status == RowStatus::CapExceeded ? "CAP_EXCEEDED" : "NA";
}

inline nlohmann::ordered_json fit_json(const LinearFit& f) {
  return {{"slope", f.slope}, {"intercept", f.intercept}, {"r2", f.r2}};
}

/// Writes to a sibling temp file, then renames over `path`.
inline void write_atomically(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out << contents;
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

}  // namespace detail

inline constexpr std::string_view kCsvHeader =
    "key,nfa_states,opt_nfa_states,dfa_states,mdfa_states,nfa_max_fanout,mdfa_max_fanout,"
    "t_compile_s,t_optimize_s,t_determinize_s,t_minimize_s,status";

inline std::string report_csv(const std::vector<ReportRow>& rows) {
  std::ostringstream out;
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.key << ',' << detail::count_cell(r.nfa_states, r.status) << ','
        << detail::count_cell(r.opt_nfa_states, r.status) << ',' << detail::count_cell(r.dfa_states, r.status)
        << ',' << detail::count_cell(r.mdfa_states, r.status) << ','
        << detail::count_cell(r.nfa_max_fanout, r.status) << ','
        << detail::count_cell(r.mdfa_max_fanout, r.status) << ',';
    if (r.times) {
      out << detail::format_double(r.times->compile) << ',' << detail::format_double(r.times->optimize) << ','
          << detail::format_double(r.times->determinize) << ',' << detail::format_double(r.times->minimize);
    } else {
      out << "NA,NA,NA,NA";
    }
    out << ',' << to_string(r.status) << '\n';
  }
  return out.str();
}

inline std::string report_plot_data(const std::vector<ReportRow>& rows) {
  std::ostringstream out;
  out << "key\tx\ty_nfa\ty_opt_nfa\ty_mdfa\tlog10_x\tlog10_y_opt_nfa\tlog10_y_mdfa\n";
  auto cell = [](const std::optional<std::size_t>& v) { return v ? std::to_string(*v) : std::string("NA"); };
  auto log_cell = [](const std::optional<std::size_t>& v) {
    return v && *v > 0 ? detail::format_double(std::log10(static_cast<double>(*v))) : std::string("NA");
  };
  for (const auto& r : rows) {
    out << r.key << '\t' << detail::format_double(r.x) << '\t' << cell(r.nfa_states) << '\t'
        << cell(r.opt_nfa_states) << '\t' << cell(r.mdfa_states) << '\t'
        << (r.x > 0 ? detail::format_double(std::log10(r.x)) : std::string("NA")) << '\t'
        << log_cell(r.opt_nfa_states) << '\t' << log_cell(r.mdfa_states) << '\n';
  }
  return out.str();
}

inline std::string report_manifest(const RunManifest& m, const std::vector<NamedGrowth>& growth) {
  nlohmann::ordered_json j;
  j["tool_version"] = kToolVersion;
  j["experiment"] = m.experiment;
  j["seed"] = m.seed;
  j["pipeline_order"] = kPipelineOrder;
  j["counting_rule"] = kCountingRule;
  j["determinization_cap"] = m.cap;
  j["verify_fraction"] = m.verify_fraction;
  j["start_kind"] = m.start_kind;
  j["thresholds"] = {{"linear_low", m.thresholds.linear_low},
                     {"polynomial_slope", m.thresholds.polynomial_slope},
                     {"r2_margin", m.thresholds.r2_margin}};
  auto& g = j["growth"] = nlohmann::ordered_json::array();
  for (const auto& [series, cls] : growth) {
    nlohmann::ordered_json e;
    e["series"] = series;
    e["class"] = to_string(cls.cls);
    e["loglog"] = detail::fit_json(cls.loglog);
    e["semilog"] = detail::fit_json(cls.semilog);
    if (cls.ratio) e["ratio"] = detail::fit_json(*cls.ratio);
    e["below_linear_band"] = cls.below_linear_band;
    g.push_back(std::move(e));
  }
  return j.dump(2) + "\n";
}

struct ReportPaths {
  std::filesystem::path csv, plot, manifest;
};

inline ReportPaths report_paths(const std::filesystem::path& csv) {
  auto stem = csv;
  stem.replace_extension();
  return {csv, stem.string() + ".plot.tsv", stem.string() + ".manifest.json"};
}

/// Writes the CSV at `destination` plus `<stem>.plot.tsv` and `<stem>.manifest.json`.
inline ReportPaths emit_report(const std::vector<ReportRow>& rows, const std::vector<NamedGrowth>& growth,
                               const RunManifest& manifest, const std::filesystem::path& destination) {
  const auto paths = report_paths(destination);
  detail::write_atomically(paths.csv, report_csv(rows));
  detail::write_atomically(paths.plot, report_plot_data(rows));
  detail::write_atomically(paths.manifest, report_manifest(manifest, growth));
  return paths;
}

/// Classifies every count column that has enough points; columns that
/// cannot be classified are left out.
inline std::vector<NamedGrowth> classify_all(const std::vector<ReportRow>& rows, const GrowthThresholds& th = {}) {
  std::vector<NamedGrowth> out;
  for (auto s : {Series::Nfa, Series::OptNfa, Series::Dfa, Series::Mdfa}) {
    try {
      out.push_back({std::string(to_string(s)), classify_growth(rows, s, th)});
    } catch (const Error&) {
    }
  }
  return out;
}

}  // namespace fawb
