// Prints NFA / optimized NFA / minimal DFA sizes for a few pattern families,
// then scans a short input with a merged rule set.

#include <fawb/experiment.hpp>
#include <fawb/generators.hpp>
#include <fawb/regex.hpp>
#include <fawb/simulate.hpp>
#include <fawb/transform.hpp>

#include <cstdio>

using namespace fawb;

namespace {

void row(const char* family, const std::string& label, const Automaton& raw) {
  const auto nfa = trim(remove_epsilon(raw));
  const auto opt = trim(optimize_nfa(nfa));
  const auto mdfa = minimize_brzozowski(opt);
  std::printf("%-12s %-22s %6zu %6zu %8zu\n", family, label.c_str(), nfa.state_count, opt.state_count,
              mdfa.state_count);
}

}  // namespace

int main() {
  std::printf("%-12s %-22s %6s %6s %8s\n", "family", "pattern", "nfa", "opt", "mdfa");
  for (int n = 2; n <= 8; n += 2) {
    const auto re = "(a|b)*a(a|b){" + std::to_string(n) + "}";
    row("last-k", re, compile_regex(re));
  }
  for (const char* p : {"abcd", "abcdefgh"}) {
    row("hamming", std::string(p) + " d=1", gen_hamming(p, 1));
    row("levenshtein", std::string(p) + " d=1", build_pattern({0, LevenshteinSource{p, 1}, StartKind::AllInput}));
  }

  std::vector<Automaton> rules;
  for (const auto& p : gen_dotstar(3, 2, 2, 4, 1, StartKind::AllInput)) rules.push_back(build_pattern(p));
  const auto merged = merge_patterns(rules);
  const std::string input = "abcadbcabddcbaacdb";
  const auto trace = run(merged, input);
  std::printf("\nmerged dot-star rules: %zu NFA states, %zu minimal DFA states\n", merged.state_count,
              minimize_brzozowski(merged).state_count);
  std::printf("scan of \"%s\": %zu reports\n", input.c_str(), trace.reports.size());
  for (const auto& r : trace.reports) std::printf("  cycle %zu: rule %d\n", r.cycle, r.pattern_id);
  const auto st = active_rule_frequency(rules, input);
  std::printf("active rules per cycle: min %zu, max %zu, start-only %.1f%%\n", st.min_active, st.max_active,
              st.start_only_fraction.value_or(0.0));
  return 0;
}
