#pragma once
// Reference oracles for the test suite. Nothing here calls into the
// transform or simulate code paths.

#include <fawb/automaton.hpp>

#include <algorithm>
#include <cstddef>
#include <regex>
#include <set>
#include <string>
#include <vector>

namespace fawb::test {

// All strings over `alphabet` with length in [0, max_len], shortest first.
inline std::vector<std::string> all_strings(const std::string& alphabet, std::size_t max_len) {
  std::vector<std::string> out{""};
  std::vector<std::string> layer{""};
  for (std::size_t len = 1; len <= max_len; ++len) {
    std::vector<std::string> next;
    for (const auto& s : layer)
      for (char c : alphabet) next.push_back(s + c);
    out.insert(out.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  return out;
}

// Plain set-of-states acceptance check written straight from the definition.
class NaiveMatcher {
 public:
  explicit NaiveMatcher(const Automaton& a) : a_(a) {}

  bool accepts(const std::string& s) const {
    std::set<StateId> cur = closure(starts(true));
    for (unsigned char c : s) {
      std::set<StateId> next;
      for (const auto& e : a_.edges)
        if (cur.count(e.src) && e.cls.contains(c)) next.insert(e.dst);
      for (auto st : starts(false)) next.insert(st);
      cur = closure(next);
    }
    return std::any_of(cur.begin(), cur.end(), [&](StateId st) { return a_.accepts.count(st) != 0; });
  }

 private:
  std::set<StateId> starts(bool first) const {
    std::set<StateId> out;
    for (const auto& [st, k] : a_.starts)
      if (k == StartKind::AllInput || (first && k == StartKind::StartOfData)) out.insert(st);
    return out;
  }

  std::set<StateId> closure(std::set<StateId> s) const {
    bool grew = true;
    while (grew) {
      grew = false;
      for (const auto& e : a_.epsilon_edges)
        if (s.count(e.src) && s.insert(e.dst).second) grew = true;
    }
    return s;
  }

  Automaton a_;
};

inline std::set<std::string> language(const Automaton& a, const std::string& alphabet, std::size_t max_len) {
  NaiveMatcher m(a);
  std::set<std::string> out;
  for (const auto& s : all_strings(alphabet, max_len))
    if (m.accepts(s)) out.insert(s);
  return out;
}

inline bool std_regex_full_match(const std::string& pattern, const std::string& s) {
  return std::regex_match(s, std::regex(pattern, std::regex::ECMAScript));
}

inline std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

inline std::size_t hamming_distance(const std::string& a, const std::string& b) {
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
  return d;
}

inline Automaton chain(const std::string& word, StartKind kind = StartKind::StartOfData) {
  Automaton a;
  a.state_count = word.size() + 1;
  for (std::size_t i = 0; i < word.size(); ++i)
    a.add_edge(static_cast<StateId>(i), SymbolClass::single(static_cast<std::uint8_t>(word[i])),
               static_cast<StateId>(i + 1));
  a.starts[0] = kind;
  a.accepts.insert(static_cast<StateId>(word.size()));
  a.deterministic = kind == StartKind::StartOfData;
  return a;
}

}  // namespace fawb::test
