// Command-line front end. Each subcommand loads documents, makes one library
// call and writes the result.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fawb/automaton.hpp"
#include "fawb/error.hpp"
#include "fawb/experiment.hpp"
#include "fawb/generators.hpp"
#include "fawb/io.hpp"
#include "fawb/regex.hpp"
#include "fawb/simulate.hpp"
#include "fawb/transform.hpp"

namespace fs = std::filesystem;
using namespace fawb;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

StartKind start_kind_flag(const std::string& text) {
  auto k = parse_start_kind(text);
  if (!k || *k == StartKind::None) throw UsageError("--start-kind must be start-of-data or all-input");
  return *k;
}

void write_text(const std::optional<std::string>& out, const std::string& text) {
  if (out) detail::write_atomically(*out, text);
  else std::cout << text;
}

void write_automaton(const std::optional<std::string>& out, const Automaton& a) {
  if (out) save_automaton(a, *out);
  else std::cout << automaton_to_json(a).dump(2) << '\n';
}

void write_patterns(const std::optional<std::string>& out, const PatternSetDocument& doc) {
  if (out) save_pattern_set(doc, *out);
  else std::cout << pattern_set_to_json(doc).dump(2) << '\n';
}

std::string read_input(const std::optional<std::string>& path, const std::optional<std::string>& text) {
  if (path && text) throw UsageError("give either --input or --text, not both");
  if (path) return detail::read_file(*path);
  if (text) return *text;
  throw UsageError("one of --input or --text is required");
}

struct ReportFlags {
  std::string patterns;
  std::uint64_t seed = 0;
  std::size_t cap = kDefaultStateCap;
  double verify_fraction = 1.0;
  unsigned jobs = 1;
  bool timings = false;
  bool no_hopcroft = false;
  GrowthThresholds thresholds;
  std::string out;
};

void add_report_flags(CLI::App* cmd, ReportFlags& f) {
  cmd->add_option("patterns", f.patterns, "pattern-set document")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "seed for the verification sample")->required();
  cmd->add_option("--cap", f.cap, "determinization state cap")->check(CLI::PositiveNumber);
  cmd->add_option("--verify-fraction", f.verify_fraction, "fraction of rows checked for equivalence")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--jobs", f.jobs, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_flag("--timings", f.timings, "record per-stage wall-clock times (output is then not reproducible)");
  cmd->add_flag("--no-hopcroft", f.no_hopcroft, "skip the Hopcroft cross-check");
  cmd->add_option("--linear-low", f.thresholds.linear_low, "lower log-log slope of the linear band");
  cmd->add_option("--poly-slope", f.thresholds.polynomial_slope, "log-log slope above which growth is polynomial");
  cmd->add_option("--r2-margin", f.thresholds.r2_margin, "semi-log over log-log R^2 margin for exponential");
  cmd->add_option("--out", f.out, "CSV path; plot data and manifest are written next to it")->required();
}

void run_report(const ReportFlags& f, bool merge) {
  const auto doc = load_pattern_set(f.patterns);
  ExperimentConfig cfg;
  cfg.cap = f.cap;
  cfg.seed = f.seed;
  cfg.verify_fraction = f.verify_fraction;
  cfg.cross_check_hopcroft = !f.no_hopcroft;
  cfg.record_timings = f.timings;
  cfg.jobs = f.jobs;
  const auto rows = merge ? incremental_merge_experiment(doc.patterns, cfg) : per_pattern_experiment(doc.patterns, cfg);
  RunManifest m;
  m.experiment = merge ? "incremental-merge" : "per-pattern";
  m.seed = f.seed;
  m.cap = f.cap;
  m.verify_fraction = f.verify_fraction;
  m.start_kind = std::string(to_string(doc.start_kind));
  m.thresholds = f.thresholds;
  const auto paths = emit_report(rows, classify_all(rows, f.thresholds), m, f.out);
  std::size_t failed = 0;
  for (const auto& r : rows) failed += r.status != RowStatus::Ok;
  std::cerr << rows.size() << " rows, " << failed << " not ok; wrote " << paths.csv.string() << ", "
            << paths.plot.string() << ", " << paths.manifest.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite automata workbench: compile, transform, simulate and measure automata."};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  std::optional<std::string> out;
  std::string start_kind = "start-of-data";
  std::size_t cap = kDefaultStateCap;

  // compile
  std::string regex_text;
  auto* compile = app.add_subcommand("compile", "compile a regex into an NFA document");
  compile->add_option("regex", regex_text, "regex text")->required();
  compile->add_option("--start-kind", start_kind, "start-of-data or all-input");
  compile->add_option("--out", out, "output document (default: stdout)");

  // generate
  auto* generate = app.add_subcommand("generate", "generate automata or pattern sets");
  generate->require_subcommand(1);
  std::uint64_t seed = 0;
  std::size_t count = 1, prefix_len = 2, suffix_len = 2, alphabet = 4, min_len = 4, max_len = 8, distance = 1,
              depth = 3;
  std::string pattern;
  RandomRecipe recipe;

  auto* g_dotstar = generate->add_subcommand("dotstar", "pattern set of P.*S regexes");
  g_dotstar->add_option("--count", count, "number of patterns")->required();
  g_dotstar->add_option("--prefix-len", prefix_len);
  g_dotstar->add_option("--suffix-len", suffix_len);
  g_dotstar->add_option("--alphabet", alphabet, "alphabet size");
  g_dotstar->add_option("--seed", seed)->required();

  auto* g_regex_set = generate->add_subcommand("regex-set", "pattern set of random regexes");
  g_regex_set->add_option("--count", count)->required();
  g_regex_set->add_option("--depth", depth);
  g_regex_set->add_option("--alphabet", alphabet, "alphabet size (at most 26)");
  g_regex_set->add_option("--seed", seed)->required();

  auto* g_hamming_set = generate->add_subcommand("hamming-set", "pattern set of Hamming meshes over random strings");
  auto* g_lev_set = generate->add_subcommand("levenshtein-set", "pattern set of Levenshtein meshes over random strings");
  for (auto* g : {g_hamming_set, g_lev_set}) {
    g->add_option("--count", count)->required();
    g->add_option("--min-len", min_len);
    g->add_option("--max-len", max_len);
    g->add_option("--distance,-d", distance);
    g->add_option("--alphabet", alphabet, "alphabet size");
    g->add_option("--seed", seed)->required();
  }

  auto* g_hamming = generate->add_subcommand("hamming", "Hamming mesh for one pattern");
  auto* g_lev = generate->add_subcommand("levenshtein", "Levenshtein mesh for one pattern");
  for (auto* g : {g_hamming, g_lev}) {
    g->add_option("pattern", pattern)->required();
    g->add_option("--distance,-d", distance)->required();
  }

  auto* g_random = generate->add_subcommand("random", "random automaton from a density recipe");
  g_random->add_option("--states,-n", recipe.n)->required();
  g_random->add_option("--density,-r", recipe.r)->required();
  g_random->add_option("--accept-density,-f", recipe.f);
  g_random->add_option("--alphabet", recipe.alphabet_size);
  g_random->add_option("--seed", recipe.seed)->required();

  for (auto* g : generate->get_subcommands({})) {
    g->add_option("--start-kind", start_kind, "start-of-data or all-input");
    g->add_option("--out", out, "output document (default: stdout)");
  }

  // single-automaton transforms
  std::string input_path, second_path;
  std::string minimizer = "brzozowski";
  auto* optimize = app.add_subcommand("optimize", "merge states with identical behaviour");
  auto* determinize_cmd = app.add_subcommand("determinize", "subset construction");
  auto* minimize = app.add_subcommand("minimize", "minimal DFA");
  auto* stats_cmd = app.add_subcommand("stats", "state, transition and fan-out summary");
  for (auto* c : {optimize, determinize_cmd, minimize, stats_cmd}) {
    c->add_option("automaton", input_path, "automaton document")->required()->check(CLI::ExistingFile);
    c->add_option("--out", out, "output path (default: stdout)");
  }
  for (auto* c : {determinize_cmd, minimize}) c->add_option("--cap", cap, "state cap")->check(CLI::PositiveNumber);
  minimize->add_option("--minimizer", minimizer)->check(CLI::IsMember({"brzozowski", "hopcroft"}));

  auto* components = app.add_subcommand("components", "split into connected components");
  components->add_option("automaton", input_path)->required()->check(CLI::ExistingFile);
  components->add_option("--out", out, "output directory")->required();

  std::vector<std::string> merge_inputs;
  auto* merge = app.add_subcommand("merge", "union of automata behind a shared start");
  merge->add_option("automata", merge_inputs, "automaton documents; pattern ids follow argument order")
      ->required()
      ->check(CLI::ExistingFile);
  merge->add_option("--out", out, "output document (default: stdout)");

  auto* equivalent_cmd = app.add_subcommand("equivalent", "language equivalence check");
  equivalent_cmd->add_option("a", input_path)->required()->check(CLI::ExistingFile);
  equivalent_cmd->add_option("b", second_path)->required()->check(CLI::ExistingFile);
  equivalent_cmd->add_option("--cap", cap)->check(CLI::PositiveNumber);

  std::optional<std::string> input_file, input_text;
  auto* simulate = app.add_subcommand("simulate", "run an automaton over an input and print the trace");
  auto* active = app.add_subcommand("active-rules", "per-cycle active-rule counts over the automaton's components");
  for (auto* c : {simulate, active}) {
    c->add_option("automaton", input_path)->required()->check(CLI::ExistingFile);
    c->add_option("--input", input_file, "input file (raw bytes)")->check(CLI::ExistingFile);
    c->add_option("--text", input_text, "input given inline");
    c->add_option("--out", out, "output path (default: stdout)");
  }

  ReportFlags per_flags, merge_flags;
  auto* report_per = app.add_subcommand("report-per-pattern", "pipeline counts for each pattern");
  add_report_flags(report_per, per_flags);
  auto* report_merge = app.add_subcommand("report-merge", "pipeline counts for growing merged prefixes of the set");
  add_report_flags(report_merge, merge_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*compile) {
      write_automaton(out, compile_regex(regex_text, start_kind_flag(start_kind)));
    } else if (*generate) {
      const auto kind = start_kind_flag(start_kind);
      if (*g_dotstar) {
        write_patterns(out, {seed, kind, gen_dotstar(count, prefix_len, suffix_len, alphabet, seed, kind)});
      } else if (*g_regex_set) {
        write_patterns(out, {seed, kind, gen_regex_set(count, depth, alphabet, seed, kind)});
      } else if (*g_hamming_set || *g_lev_set) {
        const auto mesh = *g_hamming_set ? MeshKind::Hamming : MeshKind::Levenshtein;
        write_patterns(out, {seed, kind, gen_mesh_set(mesh, count, min_len, max_len, distance, alphabet, seed, kind)});
      } else {
        PatternSource src;
        if (*g_hamming) src = HammingSource{pattern, distance};
        else if (*g_lev) src = LevenshteinSource{pattern, distance};
        else src = recipe;
        write_automaton(out, build_pattern({0, src, kind}));
      }
    } else if (*optimize) {
      write_automaton(out, optimize_nfa(load_automaton(input_path)));
    } else if (*determinize_cmd) {
      write_automaton(out, determinize(load_automaton(input_path), {cap}));
    } else if (*minimize) {
      const auto a = load_automaton(input_path);
      write_automaton(out, minimizer == "hopcroft" ? minimize_hopcroft(determinize(a, {cap}))
                                                   : minimize_brzozowski(a, {cap}));
    } else if (*stats_cmd) {
      write_text(out, stats_to_json(stats(load_automaton(input_path))).dump(2) + "\n");
    } else if (*components) {
      const auto parts = connected_components(load_automaton(input_path));
      fs::create_directories(*out);
      for (std::size_t i = 0; i < parts.size(); ++i)
        save_automaton(parts[i], fs::path(*out) / ("component_" + std::to_string(i) + ".json"));
      std::cerr << parts.size() << " components written to " << *out << '\n';
    } else if (*merge) {
      std::vector<Automaton> parts;
      for (const auto& p : merge_inputs) parts.push_back(load_automaton(p));
      write_automaton(out, merge_patterns(parts));
    } else if (*equivalent_cmd) {
      const bool same = equivalent(load_automaton(input_path), load_automaton(second_path), {cap});
      std::cout << (same ? "equivalent" : "not equivalent") << '\n';
      return same ? 0 : 1;
    } else if (*simulate) {
      const auto a = load_automaton(input_path);
      write_text(out, format_trace(run(a, read_input(input_file, input_text))));
    } else if (*active) {
      const auto parts = connected_components(load_automaton(input_path));
      write_text(out, active_rules_to_json(active_rule_frequency(parts, read_input(input_file, input_text))).dump(2) +
                          "\n");
    } else if (*report_per) {
      run_report(per_flags, false);
    } else if (*report_merge) {
      run_report(merge_flags, true);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
