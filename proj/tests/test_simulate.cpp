#include <fawb/generators.hpp>
#include <fawb/io.hpp>
#include <fawb/regex.hpp>
#include <fawb/simulate.hpp>
#include <fawb/transform.hpp>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace fawb;
using fawb::test::all_strings;
using fawb::test::chain;

namespace {

std::vector<std::size_t> report_cycles(const SimulationTrace& t) {
  std::vector<std::size_t> out;
  for (const auto& r : t.reports)
    if (out.empty() || out.back() != r.cycle) out.push_back(r.cycle);
  return out;
}

}  // namespace

TEST(Run, ExactMatchReportsAtLastCycle) {
  auto t = run(chain("ab"), "ab");
  EXPECT_EQ(t.cycles, 2u);
  ASSERT_EQ(t.reports.size(), 1u);
  EXPECT_EQ(t.reports[0].cycle, 1u);
  EXPECT_EQ(t.reports[0].state, 2u);
}

TEST(Run, AnchoredMiss) { EXPECT_TRUE(run(chain("ab"), "xab").reports.empty()); }

TEST(Run, AllInputHandTrace) {
  auto t = run(chain("ab", StartKind::AllInput), "xab");
  EXPECT_EQ(t.per_cycle_enabled, (std::vector<std::vector<StateId>>{{0}, {0}, {0, 1}}));
  EXPECT_EQ(t.per_cycle_active, (std::vector<std::vector<StateId>>{{}, {1}, {2}}));
  EXPECT_EQ(report_cycles(t), std::vector<std::size_t>{2});
}

TEST(Run, EmptyInput) {
  auto t = run(chain("ab"), "");
  EXPECT_EQ(t.cycles, 0u);
  EXPECT_TRUE(t.per_cycle_active.empty());
  EXPECT_EQ(t.initial_active, std::vector<StateId>{0});
}

TEST(Run, ReportedStatesAreAccepting) {
  auto a = merge_patterns({compile_regex("a+b"), compile_regex("b(a|b)")});
  auto t = run(a, "aabab");
  EXPECT_EQ(t.per_cycle_active.size(), t.cycles);
  for (const auto& r : t.reports) EXPECT_TRUE(a.is_accepting(r.state));
}

TEST(Run, DuplicateReportsCollapsedPerPattern) {
  auto a = merge_patterns({compile_regex("a|aa"), compile_regex("a")}, {7, 9});
  auto t = run(a, "a");
  ASSERT_EQ(t.reports.size(), 2u);
  EXPECT_EQ(t.reports[0].pattern_id, 7);
  EXPECT_EQ(t.reports[1].pattern_id, 9);
}

TEST(Run, PrefixSemanticsAgainstStdRegex) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const auto re = gen_random_regex(3, 2, seed);
    auto a = compile_regex(re);
    const std::regex ref(re);
    for (const auto& s : all_strings("abz", 6)) {
      if (s.empty()) continue;
      auto t = run(a, s);
      std::vector<std::size_t> expect;
      for (std::size_t i = 0; i < s.size(); ++i)
        if (std::regex_match(s.substr(0, i + 1), ref)) expect.push_back(i);
      ASSERT_EQ(report_cycles(t), expect) << re << " on " << s;
    }
  }
}

TEST(Run, DeterminizedReportsAtSameCycles) {
  SplitMix64 rng(4);
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto kind = seed % 2 ? StartKind::AllInput : StartKind::StartOfData;
    auto a = compile_regex(gen_random_regex(3, 3, seed), kind);
    auto d = determinize(a);
    for (int k = 0; k < 20; ++k) {
      std::string s;
      const auto len = rng.below(12);
      for (std::uint64_t i = 0; i < len; ++i) s.push_back(static_cast<char>('a' + rng.below(4)));
      ASSERT_EQ(report_cycles(run(a, s)), report_cycles(run(d, s))) << gen_random_regex(3, 3, seed) << " " << to_string(kind) << " on " << s;
    }
  }
}

TEST(Run, DfaHasAtMostOneActiveState) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto d = minimize_brzozowski(compile_regex(gen_random_regex(4, 3, seed)));
    auto t = run(d, "abcabcaabbccacbacb");
    for (const auto& s : t.per_cycle_active) EXPECT_LE(s.size(), 1u);
    for (const auto& s : t.per_cycle_enabled) EXPECT_LE(s.size(), 1u);
  }
}

TEST(Run, OperationCountLinear) {
  auto a = gen_levenshtein("abcab", 2);
  for (auto& [st, k] : a.starts) k = StartKind::AllInput;
  std::string unit = "abcabcbacbaabc";
  std::string s1, s2;
  for (int i = 0; i < 100; ++i) s1 += unit;
  s2 = s1 + s1;
  auto t1 = run(a, s1);
  auto t2 = run(a, s2);
  const double ratio = static_cast<double>(t2.operations) / static_cast<double>(t1.operations);
  EXPECT_NEAR(ratio, 2.0, 0.05);
  // bounded by |input| x |active set| work
  const auto fan = stats(a).max_fanout;
  std::size_t bound = t2.initial_active.size();
  for (std::size_t i = 0; i < t2.cycles; ++i)
    bound += t2.per_cycle_enabled[i].size() * (fan + 1) + t2.per_cycle_active[i].size();
  EXPECT_LE(t2.operations, bound);
}

TEST(ActiveRules, LiteralsAllInput) {
  std::vector<Automaton> rules;
  for (const char* w : {"ab", "cd", "ef"}) rules.push_back(chain(w, StartKind::AllInput));
  auto st = active_rule_frequency(rules, "ab");
  EXPECT_EQ(st.per_cycle_rule_count, (std::vector<std::size_t>{3, 3}));
  EXPECT_EQ(st.min_active, 3u);
  EXPECT_EQ(st.max_active, 3u);
}

TEST(ActiveRules, LiteralsStartOfData) {
  std::vector<Automaton> rules;
  for (const char* w : {"ab", "cd", "ef"}) rules.push_back(chain(w));
  auto st = active_rule_frequency(rules, "ab");
  EXPECT_EQ(st.per_cycle_rule_count, (std::vector<std::size_t>{3, 1}));
}

TEST(ActiveRules, EmptyInput) {
  auto st = active_rule_frequency({chain("ab")}, "");
  EXPECT_TRUE(st.per_cycle_rule_count.empty());
  EXPECT_FALSE(st.start_only_fraction.has_value());
}

TEST(ActiveRules, NeverMatchingAnchored) {
  std::vector<Automaton> rules;
  for (const char* w : {"xy", "zz", "qq", "pp"}) rules.push_back(chain(w));
  auto st = active_rule_frequency(rules, "abab");
  EXPECT_EQ(st.per_cycle_rule_count, (std::vector<std::size_t>{4, 0, 0, 0}));
  EXPECT_EQ(st.max_active, 4u);
  EXPECT_EQ(st.min_active, 0u);
}

TEST(StartOnly, NeverMatchingRuleIsAlwaysStalled) {
  EXPECT_DOUBLE_EQ(start_only_fraction({chain("zz", StartKind::AllInput)}, "aaaa"), 100.0);
}

TEST(StartOnly, MatchingRuleHandTrace) {
  // cycle 0 enables {0}; later cycles enable {0,1} or {0,1,2}
  EXPECT_DOUBLE_EQ(start_only_fraction({chain("aa", StartKind::AllInput)}, "aaaa"), 25.0);
}

TEST(StartOnly, MixedRulesSteadyStateHalf) {
  std::vector<Automaton> rules{chain("aa", StartKind::AllInput), chain("zz", StartKind::AllInput)};
  const std::string input = "aaaaaaaa";
  // steady-state cycles: skip the first cycle, where both rules sit on their start
  const double all = start_only_fraction(rules, input);
  EXPECT_DOUBLE_EQ(all, (100.0 + 50.0 * 7) / 8);
  auto st = active_rule_frequency(rules, input);
  EXPECT_DOUBLE_EQ(*st.start_only_fraction, all);
}

TEST(StartOnly, RejectsMultipleStarts) {
  auto a = chain("ab");
  a.starts[1] = StartKind::AllInput;
  a.deterministic = false;
  EXPECT_THROW((void)start_only_fraction({a}, "ab"), std::invalid_argument);
  EXPECT_FALSE(active_rule_frequency({a}, "ab").start_only_fraction.has_value());
}

TEST(StartOnly, Bounds) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::vector<Automaton> rules;
    for (int i = 0; i < 3; ++i)
      rules.push_back(compile_regex(gen_random_regex(2, 3, seed * 3 + i), i % 2 ? StartKind::AllInput : StartKind::StartOfData));
    auto st = active_rule_frequency(rules, "abcabccba");
    EXPECT_LE(st.min_active, st.max_active);
    EXPECT_LE(st.max_active, rules.size());
    ASSERT_TRUE(st.start_only_fraction.has_value());
    EXPECT_GE(*st.start_only_fraction, 0.0);
    EXPECT_LE(*st.start_only_fraction, 100.0);
  }
}

TEST(StartOnly, StartClosureCountsAsStart) {
  // merged rules reach their own start through the shared one
  const std::vector<Automaton> rules{chain("ab"), chain("cd", StartKind::AllInput), chain("ce", StartKind::AllInput)};
  const auto parts = connected_components(merge_patterns(rules));
  const std::string input = "abcdcecx";
  EXPECT_DOUBLE_EQ(start_only_fraction(parts, input), start_only_fraction(rules, input));
}

TEST(ActiveRules, GoldenFixture) {
  const auto doc = nlohmann::json::parse(detail::read_file(FAWB_TEST_DATA_DIR "/active_rules_fixture.json"));
  std::vector<Automaton> rules;
  for (const auto& r : doc["rules"]) rules.push_back(automaton_from_json(r));
  const auto input = doc["input"].get<std::string>();
  ASSERT_EQ(input.size(), 10u);
  const auto& exp = doc["expected"];
  auto st = active_rule_frequency(rules, input);
  EXPECT_EQ(st.per_cycle_rule_count, exp["per_cycle_rule_count"].get<std::vector<std::size_t>>());
  EXPECT_EQ(st.min_active, exp["min_active"].get<std::size_t>());
  EXPECT_EQ(st.max_active, exp["max_active"].get<std::size_t>());
  const double frac = exp["start_only_fraction"]["numerator"].get<double>() /
                      exp["start_only_fraction"]["denominator"].get<double>();
  ASSERT_TRUE(st.start_only_fraction.has_value());
  EXPECT_NEAR(*st.start_only_fraction, frac, 1e-12);
  const auto cycles = exp["report_cycles"].get<std::vector<std::vector<std::size_t>>>();
  for (std::size_t i = 0; i < rules.size(); ++i) EXPECT_EQ(report_cycles(run(rules[i], input)), cycles[i]) << i;
}

TEST(Throughput, Formula) {
  EXPECT_DOUBLE_EQ(throughput(1e9, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(throughput(2e9, 0.5), 4.0);
  EXPECT_DOUBLE_EQ(throughput(0, 1.0), 0.0);
  EXPECT_THROW((void)throughput(1e9, 0.0), std::invalid_argument);
  EXPECT_THROW((void)throughput(1e9, -1.0), std::invalid_argument);
}

TEST(Trace, LineFormat) {
  auto t = run(chain("ab", StartKind::AllInput), "xab");
  EXPECT_EQ(format_trace(t), "0\t0\t\n1\t1\t\n2\t1\t0:2\n");
}
