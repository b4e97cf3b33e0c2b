#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "fawb/error.hpp"
#include "fawb/symbol_class.hpp"

namespace fawb {

using StateId = std::uint32_t;

enum class StartKind : std::uint8_t { None, StartOfData, AllInput };

inline std::string_view to_string(StartKind k) {
  switch (k) {
    case StartKind::StartOfData: return "start-of-data";
    case StartKind::AllInput: return "all-input";
    case StartKind::None: break;
  }
  return "none";
}

inline std::optional<StartKind> parse_start_kind(std::string_view s) {
  if (s == "start-of-data") return StartKind::StartOfData;
  if (s == "all-input") return StartKind::AllInput;
  if (s == "none") return StartKind::None;
  return std::nullopt;
}

struct Edge {
  StateId src = 0;
  SymbolClass cls;
  StateId dst = 0;

  bool operator==(const Edge&) const = default;
  auto operator<=>(const Edge& o) const {
    return std::tie(src, cls, dst) <=> std::tie(o.src, o.cls, o.dst);
  }
};

struct EpsilonEdge {
  StateId src = 0;
  StateId dst = 0;

  bool operator==(const EpsilonEdge&) const = default;
  auto operator<=>(const EpsilonEdge&) const = default;
};

/// Edge-labeled finite automaton over the byte alphabet.
///
/// Values are treated as immutable once built; every operation in the library
/// takes automata by const reference and returns a fresh value.
struct Automaton {
  std::size_t state_count = 0;
  std::vector<Edge> edges;
  std::vector<EpsilonEdge> epsilon_edges;
  std::map<StateId, StartKind> starts;
  std::set<StateId> accepts;
  bool deterministic = false;
  /// Rule id per state; when present it must not be crossed by any edge.
  std::optional<std::vector<int>> component_labels;
  /// Pattern id reported by an accepting state (match attribution).
  std::map<StateId, int> report_ids;

  bool operator==(const Automaton&) const = default;

  StateId add_state() { return static_cast<StateId>(state_count++); }
  void add_edge(StateId src, const SymbolClass& cls, StateId dst) { edges.push_back({src, cls, dst}); }
  void add_epsilon(StateId src, StateId dst) { epsilon_edges.push_back({src, dst}); }

  bool is_accepting(StateId s) const { return accepts.count(s) != 0; }

  StartKind start_kind(StateId s) const {
    auto it = starts.find(s);
    return it == starts.end() ? StartKind::None : it->second;
  }

  std::optional<int> report_id(StateId s) const {
    if (auto it = report_ids.find(s); it != report_ids.end()) return it->second;
    if (component_labels && s < component_labels->size()) return (*component_labels)[s];
    return std::nullopt;
  }
};

struct StatsSummary {
  std::size_t state_count = 0;
  std::size_t transition_count = 0;
  std::size_t max_fanout = 0;
  double avg_fanout = 0.0;
  std::size_t accept_count = 0;
  std::size_t start_count = 0;

  bool operator==(const StatsSummary&) const = default;
};

/// Per-state outgoing edge and epsilon lists.
struct Adjacency {
  std::vector<std::vector<std::size_t>> out;  // indices into Automaton::edges
  std::vector<std::vector<StateId>> eps;

  explicit Adjacency(const Automaton& a) : out(a.state_count), eps(a.state_count) {
    for (std::size_t i = 0; i < a.edges.size(); ++i) out[a.edges[i].src].push_back(i);
    for (const auto& e : a.epsilon_edges) eps[e.src].push_back(e.dst);
  }
};

/// Lists every invariant violation of `a`; an empty list means the automaton is valid.
inline std::vector<std::string> validate(const Automaton& a) {
  std::vector<std::string> out;
  const std::size_t n = a.state_count;
  bool ranges_ok = true;
  for (const auto& e : a.edges) {
    if (e.src >= n) {
      out.emplace_back("edge source out of range");
      ranges_ok = false;
    }
    if (e.dst >= n) {
      out.emplace_back("edge target out of range");
      ranges_ok = false;
    }
    if (e.cls.empty()) out.emplace_back("empty symbol class on edge");
  }
  for (const auto& e : a.epsilon_edges) {
    if (e.src >= n || e.dst >= n) {
      out.emplace_back("epsilon edge endpoint out of range");
      ranges_ok = false;
    }
  }
  std::size_t live_starts = 0;
  for (const auto& [s, kind] : a.starts) {
    if (s >= n) out.emplace_back("start state out of range");
    if (kind != StartKind::None) ++live_starts;
  }
  if (live_starts == 0) out.emplace_back("no start state");
  for (auto s : a.accepts)
    if (s >= n) out.emplace_back("accept state out of range");
  for (const auto& [s, id] : a.report_ids)
    if (!a.accepts.count(s)) out.emplace_back("report id on non-accepting state " + std::to_string(s));

  if (a.deterministic) {
    if (!a.epsilon_edges.empty()) out.emplace_back("deterministic automaton has epsilon edges");
    std::size_t sod = 0, other = 0;
    for (const auto& [s, kind] : a.starts) {
      if (kind == StartKind::StartOfData) ++sod;
      else if (kind != StartKind::None) ++other;
    }
    if (sod != 1 || other != 0)
      out.emplace_back("deterministic automaton needs exactly one start-of-data start");
    if (ranges_ok) {
      std::vector<SymbolClass> seen(n);
      std::vector<bool> reported(n, false);
      for (const auto& e : a.edges) {
        if (seen[e.src].intersects(e.cls) && !reported[e.src]) {
          out.emplace_back("nondeterministic choice at state " + std::to_string(e.src));
          reported[e.src] = true;
        }
        seen[e.src] |= e.cls;
      }
    }
  }

  if (a.component_labels) {
    const auto& labels = *a.component_labels;
    if (labels.size() != n) {
      out.emplace_back("component label count does not match state count");
    } else if (ranges_ok) {
      for (const auto& e : a.edges)
        if (labels[e.src] != labels[e.dst]) out.emplace_back("edge crosses component labels");
      for (const auto& e : a.epsilon_edges)
        if (labels[e.src] != labels[e.dst]) out.emplace_back("epsilon edge crosses component labels");
    }
  }
  return out;
}

/// True when `a` satisfies the deterministic shape, whether or not the flag is set.
inline bool is_deterministic(const Automaton& a) {
  Automaton probe = a;
  probe.deterministic = true;
  return validate(probe).empty();
}

inline void require_valid(const Automaton& a, std::string_view op) {
  auto v = validate(a);
  if (!v.empty()) throw Error(std::string(op) + ": invalid automaton: " + v.front());
}

inline StatsSummary stats(const Automaton& a) {
  StatsSummary s;
  s.state_count = a.state_count;
  s.transition_count = a.edges.size() + a.epsilon_edges.size();
  std::vector<std::size_t> degree(a.state_count, 0);
  for (const auto& e : a.edges) ++degree[e.src];
  for (const auto& e : a.epsilon_edges) ++degree[e.src];
  for (auto d : degree) s.max_fanout = std::max(s.max_fanout, d);
  s.avg_fanout = a.state_count ? static_cast<double>(s.transition_count) / static_cast<double>(a.state_count) : 0.0;
  s.accept_count = a.accepts.size();
  for (const auto& [id, kind] : a.starts)
    if (kind != StartKind::None) ++s.start_count;
  return s;
}

/// Applies a state renumbering. `map[old]` is the new id; every old state must be mapped.
inline Automaton relabel(const Automaton& a, const std::vector<StateId>& map, std::size_t new_count) {
  Automaton r;
  r.state_count = new_count;
  r.deterministic = a.deterministic;
  r.edges.reserve(a.edges.size());
  for (const auto& e : a.edges) r.edges.push_back({map[e.src], e.cls, map[e.dst]});
  for (const auto& e : a.epsilon_edges) r.epsilon_edges.push_back({map[e.src], map[e.dst]});
  for (const auto& [s, k] : a.starts) r.starts[map[s]] = k;
  for (auto s : a.accepts) r.accepts.insert(map[s]);
  for (const auto& [s, id] : a.report_ids) r.report_ids[map[s]] = id;
  if (a.component_labels) {
    std::vector<int> labels(new_count, 0);
    for (std::size_t s = 0; s < a.state_count; ++s) labels[map[s]] = (*a.component_labels)[s];
    r.component_labels = std::move(labels);
  }
  std::sort(r.edges.begin(), r.edges.end());
  std::sort(r.epsilon_edges.begin(), r.epsilon_edges.end());
  return r;
}

/// Sorts edge lists so that two automata with the same structure compare equal.
inline Automaton normalized(Automaton a) {
  std::sort(a.edges.begin(), a.edges.end());
  std::sort(a.epsilon_edges.begin(), a.epsilon_edges.end());
  return a;
}

/// Equality that ignores edge list order.
inline bool structurally_equal(const Automaton& a, const Automaton& b) {
  return normalized(a) == normalized(b);
}

/// Renumbers states in breadth-first order from the starts (ascending old id).
///
/// At each state epsilon successors are visited first (ascending target), then
/// labeled edges in ascending (class, target) order. States that the search
/// does not reach keep their relative order after the reachable ones.
inline Automaton canonicalize(const Automaton& a) {
  constexpr StateId unset = ~StateId{0};
  const std::size_t n = a.state_count;
  std::vector<std::vector<StateId>> eps(n);
  std::vector<std::vector<std::pair<SymbolClass, StateId>>> out(n);
  for (const auto& e : a.epsilon_edges) eps[e.src].push_back(e.dst);
  for (const auto& e : a.edges) out[e.src].emplace_back(e.cls, e.dst);
  for (auto& v : eps) std::sort(v.begin(), v.end());
  for (auto& v : out) std::sort(v.begin(), v.end());

  std::vector<StateId> map(n, unset);
  StateId next = 0;
  std::deque<StateId> queue;
  auto visit = [&](StateId s) {
    if (map[s] != unset) return;
    map[s] = next++;
    queue.push_back(s);
  };
  for (const auto& [s, kind] : a.starts)
    if (kind != StartKind::None) visit(s);
  while (!queue.empty()) {
    const StateId s = queue.front();
    queue.pop_front();
    for (auto t : eps[s]) visit(t);
    for (const auto& [cls, t] : out[s]) visit(t);
  }
  for (StateId s = 0; s < n; ++s)
    if (map[s] == unset) map[s] = next++;
  return relabel(a, map, n);
}

namespace detail {

/// Rewrites a deterministic automaton so each (src, dst) pair has exactly one edge.
inline Automaton merge_parallel_edges(const Automaton& a) {
  std::map<std::pair<StateId, StateId>, SymbolClass> merged;
  for (const auto& e : a.edges) merged[{e.src, e.dst}] |= e.cls;
  Automaton r = a;
  r.edges.clear();
  for (const auto& [key, cls] : merged) r.edges.push_back({key.first, cls, key.second});
  return r;
}

inline Automaton strip_metadata(Automaton a) {
  a.component_labels.reset();
  a.report_ids.clear();
  return a;
}

}  // namespace detail

/// Isomorphism test for deterministic automata.
///
/// Parallel edges are merged first so that two spellings of the same
/// transition function compare equal; labels and report ids are ignored.
inline bool isomorphic(const Automaton& a, const Automaton& b) {
  if (!is_deterministic(a) || !is_deterministic(b))
    throw std::invalid_argument("isomorphic: inputs must be deterministic");
  if (a.state_count != b.state_count) return false;
  auto ca = canonicalize(detail::strip_metadata(detail::merge_parallel_edges(a)));
  auto cb = canonicalize(detail::strip_metadata(detail::merge_parallel_edges(b)));
  ca.deterministic = cb.deterministic = true;
  return ca == cb;
}

}  // namespace fawb
