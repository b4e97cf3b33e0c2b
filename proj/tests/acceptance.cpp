// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <fawb/experiment.hpp>
#include <fawb/generators.hpp>
#include <fawb/io.hpp>
#include <fawb/regex.hpp>
#include <fawb/simulate.hpp>
#include <fawb/transform.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

#include "process.hpp"

using namespace fawb;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int prec = 3) {
  std::ostringstream s;
  s.precision(prec);
  s << std::fixed << v;
  return s.str();
}

// Corpus shared by criteria 1 to 3.
struct CorpusItem {
  std::string name;
  Automaton raw;
};

std::vector<CorpusItem> build_corpus() {
  std::vector<CorpusItem> out;
  SplitMix64 rng(20240601);
  for (std::size_t i = 0; i < 500; ++i) {
    const std::size_t depth = 1 + i % 4;
    const std::size_t alphabet = 2 + (i / 4) % 7;
    const auto text = gen_random_regex(depth, alphabet, rng.next());
    const auto kind = i % 5 == 4 ? StartKind::AllInput : StartKind::StartOfData;
    out.push_back({"regex " + text, compile_regex(text, kind)});
  }
  for (std::size_t len = 2; len <= 8; ++len)
    for (std::size_t d = 0; d <= 2 && d <= len; ++d) {
      const auto words = gen_random_strings(2, len, len, 4, 1000 + len * 10 + d);
      for (std::size_t w = 0; w < words.size(); ++w) {
        const auto kind = w == 1 ? StartKind::AllInput : StartKind::StartOfData;
        for (auto mesh : {MeshKind::Hamming, MeshKind::Levenshtein}) {
          Pattern p{0, mesh == MeshKind::Hamming ? PatternSource{HammingSource{words[w], d}}
                                                 : PatternSource{LevenshteinSource{words[w], d}},
                    kind};
          out.push_back({std::string(mesh == MeshKind::Hamming ? "hamming " : "levenshtein ") + words[w] +
                             " d=" + std::to_string(d),
                         build_pattern(p)});
        }
      }
    }
  return out;
}

struct CorpusResults {
  std::size_t items = 0, checks = 0, equivalence_failures = 0;
  std::size_t iso_failures = 0;
  std::size_t oracle_checked = 0, oracle_failures = 0;
  double seconds = 0;
  std::string first_failure;
};

CorpusResults run_corpus() {
  CorpusResults r;
  const auto t0 = std::chrono::steady_clock::now();
  for (const auto& item : build_corpus()) {
    ++r.items;
    auto note = [&](const std::string& what) {
      if (r.first_failure.empty()) r.first_failure = item.name + ": " + what;
    };
    try {
      const auto nfa = trim(remove_epsilon(item.raw));
      const auto opt = trim(optimize_nfa(nfa));
      const auto dfa = determinize(nfa);
      const auto mdfa = minimize_brzozowski(opt);
      const auto hop = minimize_hopcroft(dfa);
      const std::pair<const char*, const Automaton*> stages[] = {
          {"nfa", &nfa}, {"opt", &opt}, {"dfa", &dfa}, {"mdfa", &mdfa}};
      for (const auto& [label, a] : stages) {
        ++r.checks;
        if (!equivalent(item.raw, *a)) {
          ++r.equivalence_failures;
          note(std::string("not equivalent to ") + label);
        }
      }
      if (!isomorphic(hop, mdfa)) {
        ++r.iso_failures;
        note("hopcroft and brzozowski differ");
      }
      if (dfa.state_count <= 512) {
        ++r.oracle_checked;
        const auto oracle = brute_force_minimal_states(dfa);
        if (oracle != mdfa.state_count || oracle != hop.state_count) {
          ++r.oracle_failures;
          note("oracle " + std::to_string(oracle) + " vs " + std::to_string(mdfa.state_count));
        }
      }
    } catch (const std::exception& e) {
      ++r.equivalence_failures;
      note(e.what());
    }
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

const CorpusResults& corpus() {
  static const CorpusResults r = run_corpus();
  return r;
}

Outcome c1_equivalence() {
  const auto& r = corpus();
  const bool pass = r.equivalence_failures == 0 && r.seconds < 60.0;
  std::string d = std::to_string(r.items) + " items, " + std::to_string(r.checks) + " checks, " +
                  std::to_string(r.equivalence_failures) + " failures, " + fmt(r.seconds, 1) + " s";
  if (!r.first_failure.empty()) d += "; first: " + r.first_failure;
  return {pass, d};
}

Outcome c2_cross_minimizer() {
  const auto& r = corpus();
  return {r.iso_failures == 0 && r.equivalence_failures == 0,
          std::to_string(r.items - r.iso_failures) + "/" + std::to_string(r.items) + " isomorphic"};
}

Outcome c3_minimality_oracle() {
  const auto& r = corpus();
  return {r.oracle_failures == 0 && r.oracle_checked > 0,
          std::to_string(r.oracle_checked - r.oracle_failures) + "/" + std::to_string(r.oracle_checked) +
              " DFAs of at most 512 states match the table-filling count"};
}

Outcome c4_exponential_family() {
  std::vector<double> x, y;
  bool exact = true;
  std::string counts;
  for (int n = 2; n <= 8; ++n) {
    const auto text = "(a|b)*a(a|b){" + std::to_string(n) + "}";
    const auto raw = compile_regex(text);
    const auto nfa = trim(remove_epsilon(raw));
    const auto mdfa = minimize_brzozowski(raw);
    const std::size_t want = std::size_t{1} << (n + 1);
    exact = exact && mdfa.state_count == want && brute_force_minimal_states(determinize(raw), 4096) == want;
    x.push_back(static_cast<double>(regex_size(text)));
    y.push_back(static_cast<double>(nfa.state_count));
    counts += (counts.empty() ? "" : " ") + std::to_string(mdfa.state_count);
  }
  const auto g = classify_growth(x, y);
  const bool band = g.loglog.slope >= 0.8 && g.loglog.slope <= 1.2;
  return {exact && band, "mdfa " + counts + "; nfa log-log slope " + fmt(g.loglog.slope) + " vs regex size"};
}

Outcome c5_hamming_parity() {
  auto ps = gen_mesh_set(MeshKind::Hamming, 50, 4, 12, 1, 4, 501);
  for (auto p : gen_mesh_set(MeshKind::Hamming, 50, 4, 12, 2, 4, 502)) {
    p.id += 50;
    ps.push_back(p);
  }
  ExperimentConfig cfg;
  cfg.seed = 5;
  cfg.jobs = 4;
  std::size_t equal = 0, ok = 0;
  for (const auto& r : per_pattern_experiment(ps, cfg)) {
    ok += r.status == RowStatus::Ok;
    equal += r.status == RowStatus::Ok && r.mdfa_states == r.opt_nfa_states;
  }
  return {equal == ps.size(), std::to_string(equal) + "/" + std::to_string(ps.size()) + " rows with mdfa = opt_nfa (" +
                                  std::to_string(ok) + " ok)"};
}

Outcome c6_levenshtein_growth() {
  std::vector<Pattern> ps;
  int id = 0;
  for (std::size_t len = 4; len <= 12; ++len)
    for (const auto& s : gen_random_strings(3, len, len, 4, 600 + len))
      ps.push_back({id++, LevenshteinSource{s, 1}, StartKind::AllInput});
  ExperimentConfig cfg;
  cfg.seed = 6;
  cfg.jobs = 4;
  const auto rows = per_pattern_experiment(ps, cfg);
  for (const auto& r : rows)
    if (r.status != RowStatus::Ok) return {false, "row " + std::to_string(r.key) + ": " + r.detail};
  const auto m = classify_growth(rows, Series::Mdfa);
  const auto o = classify_growth(rows, Series::OptNfa);
  const bool pass = m.cls == GrowthClass::Polynomial && m.loglog.slope > 1.2 && o.cls == GrowthClass::Linear &&
                    !o.below_linear_band;
  return {pass, "mdfa " + std::string(to_string(m.cls)) + " slope " + fmt(m.loglog.slope) + ", opt_nfa " +
                    std::string(to_string(o.cls)) + " slope " + fmt(o.loglog.slope)};
}

Outcome c7_merged_hamming() {
  std::vector<ReportRow> rows;
  ExperimentConfig cfg;
  cfg.seed = 7;
  cfg.jobs = 4;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto ps = gen_mesh_set(MeshKind::Hamming, 6, 12, 12, 6, 4, 700 + seed);
    for (const auto& r : incremental_merge_experiment(ps, cfg)) {
      if (r.status != RowStatus::Ok) return {false, "merge row failed: " + r.detail};
      rows.push_back(r);
    }
  }
  const auto m = classify_growth(rows, Series::Mdfa);
  const auto o = classify_growth(rows, Series::OptNfa);
  const bool pass = m.cls == GrowthClass::Exponential && o.cls == GrowthClass::Linear && !o.below_linear_band;
  std::string means;
  for (std::size_t k = 0; k < 6; ++k) {
    double sum = 0;
    for (std::size_t s = 0; s < 10; ++s) sum += static_cast<double>(*rows[s * 6 + k].mdfa_states);
    means += (k ? " " : "") + fmt(sum / 10, 0);
  }
  return {pass, "mdfa " + std::string(to_string(m.cls)) + " (semi-log R2 " + fmt(m.semilog.r2) + " vs log-log " +
                    fmt(m.loglog.r2) + ", margin " + fmt(m.semilog.r2 - m.loglog.r2) + "), opt_nfa " +
                    std::string(to_string(o.cls)) + " slope " + fmt(o.loglog.slope) + "; mean mdfa by k: " + means};
}

Outcome c8_dotstar_merge() {
  const auto ps = gen_dotstar(6, 2, 2, 4, 8, StartKind::AllInput);
  ExperimentConfig cfg;
  cfg.seed = 8;
  const auto merged = incremental_merge_experiment(ps, cfg);
  const auto single = per_pattern_experiment(ps, cfg);
  double sum = 0;
  std::string ratios;
  double at4 = 0;
  for (std::size_t k = 0; k < ps.size(); ++k) {
    if (merged[k].status != RowStatus::Ok || single[k].status != RowStatus::Ok) return {false, "row failed"};
    sum += static_cast<double>(*single[k].mdfa_states);
    const double ratio = static_cast<double>(*merged[k].mdfa_states) / sum;
    if (k == 3) at4 = ratio;
    ratios += (k ? " " : "") + fmt(ratio, 2);
  }
  return {at4 >= 1.5, "merged / sum of individual mdfa by k: " + ratios};
}

Outcome c9_active_rules() {
  const auto doc = json::parse(detail::read_file(FAWB_TEST_DATA_DIR "/active_rules_fixture.json"));
  std::vector<Automaton> rules;
  for (const auto& r : doc["rules"]) rules.push_back(automaton_from_json(r));
  const auto input = doc["input"].get<std::string>();
  const auto& exp = doc["expected"];
  const auto st = active_rule_frequency(rules, input);
  const double frac = exp["start_only_fraction"]["numerator"].get<double>() /
                      exp["start_only_fraction"]["denominator"].get<double>();
  const bool vec = st.per_cycle_rule_count == exp["per_cycle_rule_count"].get<std::vector<std::size_t>>() &&
                   st.min_active == exp["min_active"].get<std::size_t>() &&
                   st.max_active == exp["max_active"].get<std::size_t>();
  const bool fraction = st.start_only_fraction && std::abs(*st.start_only_fraction - frac) < 1e-12;
  std::string counts;
  for (auto c : st.per_cycle_rule_count) counts += std::to_string(c);
  return {vec && fraction, "per-cycle " + counts + ", start-only " +
                               (st.start_only_fraction ? fmt(*st.start_only_fraction, 6) : std::string("none")) + "%"};
}

Outcome c10_throughput() {
  const double a = throughput(1e9, 1.0);
  const double b = throughput(2e9, 0.5);
  return {a == 1.0 && b == 4.0, fmt(a, 1) + " Gbps, " + fmt(b, 1) + " Gbps"};
}

Outcome c11_determinism() {
  const std::string cli = test::shell_quote(FAWB_CLI_PATH);
  const std::vector<std::string> commands = {
      "generate dotstar --count 6 --alphabet 4 --seed 7 --start-kind all-input --out @/dotstar.json",
      "generate regex-set --count 30 --depth 4 --alphabet 6 --seed 7 --out @/regex.json",
      "generate hamming-set --count 12 --min-len 4 --max-len 10 -d 2 --alphabet 4 --seed 7 --out @/hamming.json",
      "generate levenshtein-set --count 12 --min-len 4 --max-len 8 -d 1 --alphabet 4 --seed 7 --out @/lev.json",
      "generate random -n 12 -r 1.25 -f 0.5 --alphabet 2 --seed 42 --out @/random.json",
      "report-per-pattern @/regex.json --seed 42 --jobs 4 --verify-fraction 0.5 --out @/per_regex.csv",
      "report-per-pattern @/hamming.json --seed 42 --out @/per_hamming.csv",
      "report-per-pattern @/lev.json --seed 42 --jobs 3 --out @/per_lev.csv",
      "report-merge @/dotstar.json --seed 42 --out @/merge_dotstar.csv",
      "minimize @/random.json --out @/random_min.json",
      "stats @/random_min.json --out @/random_stats.json",
  };
  std::vector<std::filesystem::path> dirs{test::fresh_dir("fawb_acceptance_a"), test::fresh_dir("fawb_acceptance_b")};
  for (const auto& dir : dirs)
    for (auto cmd : commands) {
      for (std::size_t at; (at = cmd.find('@')) != std::string::npos;) cmd.replace(at, 1, dir.string());
      const int rc = test::run_command(cli + " " + cmd + " > /dev/null");
      if (rc != 0) return {false, "exit " + std::to_string(rc) + " from: " + cmd};
    }
  std::size_t files = 0, identical = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dirs[0])) {
    ++files;
    const auto other = dirs[1] / entry.path().filename();
    identical += std::filesystem::exists(other) && test::read_bytes(entry.path()) == test::read_bytes(other);
  }
  return {files > 0 && identical == files,
          std::to_string(identical) + "/" + std::to_string(files) + " artifacts byte-identical across two runs"};
}

Outcome c12_random_density() {
  auto mean_dfa = [](double r) {
    double sum = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed)
      sum += static_cast<double>(determinize(gen_random_automaton({12, r, 0.5, 2, seed})).state_count);
    return sum / 20;
  };
  const double sparse = mean_dfa(1.25), dense = mean_dfa(2.5);
  return {sparse > dense, "mean DFA states r=1.25: " + fmt(sparse, 2) + ", r=2.5: " + fmt(dense, 2)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"equivalence suite", c1_equivalence},
      {"cross-minimizer isomorphism", c2_cross_minimizer},
      {"minimality oracle", c3_minimality_oracle},
      {"exponential blowup family", c4_exponential_family},
      {"hamming parity", c5_hamming_parity},
      {"levenshtein growth", c6_levenshtein_growth},
      {"merged hamming growth", c7_merged_hamming},
      {"dot-star merge cost", c8_dotstar_merge},
      {"active-rule golden fixture", c9_active_rules},
      {"throughput formula", c10_throughput},
      {"seeded determinism", c11_determinism},
      {"random density", c12_random_density},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << (i + 1 < 10 ? " " : "") << i + 1 << "  " << criteria[i].first
              << ": " << o.detail << " [" << fmt(s, 1) << " s]" << std::endl;
  }
  std::cout << criteria.size() - static_cast<std::size_t>(failed) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failed ? 1 : 0;
}
