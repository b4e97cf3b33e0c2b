#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "fawb/automaton.hpp"
#include "fawb/error.hpp"

namespace fawb {

inline constexpr std::size_t kDefaultStateCap = std::size_t{1} << 20;

struct DeterminizeOptions {
  std::size_t cap = kDefaultStateCap;
};

namespace detail {

/// Coarsest partition of the byte alphabet that every edge class is a union of.
struct BytePartition {
  std::array<std::uint16_t, 256> block_of{};
  std::vector<SymbolClass> members;  // bytes of each block

  std::size_t size() const { return members.size(); }

  template <class Classes>
  static BytePartition of(const Classes& classes) {
    BytePartition p;
    std::size_t blocks = 1;
    std::unordered_set<SymbolClass, SymbolClassHash> distinct(classes.begin(), classes.end());
    std::vector<int> remap;
    for (const auto& cls : distinct) {
      remap.assign(blocks * 2, -1);
      std::size_t next = 0;
      for (unsigned b = 0; b < 256; ++b) {
        const std::size_t key = p.block_of[b] * 2 + (cls.contains(static_cast<std::uint8_t>(b)) ? 1 : 0);
        if (remap[key] < 0) remap[key] = static_cast<int>(next++);
        p.block_of[b] = static_cast<std::uint16_t>(remap[key]);
      }
      blocks = next;
    }
    p.members.assign(blocks, SymbolClass{});
    for (unsigned b = 0; b < 256; ++b) p.members[p.block_of[b]].insert(static_cast<std::uint8_t>(b));
    return p;
  }

  /// Block ids whose bytes lie inside `cls`.
  std::vector<std::uint16_t> cover(const SymbolClass& cls) const {
    std::vector<std::uint16_t> ids;
    for (std::size_t k = 0; k < members.size(); ++k)
      if (cls.contains(members[k].first())) ids.push_back(static_cast<std::uint16_t>(k));
    return ids;
  }
};

inline std::vector<SymbolClass> edge_classes(const Automaton& a) {
  std::vector<SymbolClass> v;
  v.reserve(a.edges.size());
  for (const auto& e : a.edges) v.push_back(e.cls);
  return v;
}

/// Transition lists per (state, partition block).
struct BlockTransitions {
  BytePartition partition;
  // For every state: (block, dst) pairs.
  std::vector<std::vector<std::pair<std::uint16_t, StateId>>> moves;

  BlockTransitions(const Automaton& a, BytePartition p) : partition(std::move(p)), moves(a.state_count) {
    std::unordered_map<SymbolClass, std::vector<std::uint16_t>, SymbolClassHash> cache;
    for (const auto& e : a.edges) {
      auto it = cache.find(e.cls);
      if (it == cache.end()) it = cache.emplace(e.cls, partition.cover(e.cls)).first;
      for (auto blk : it->second) moves[e.src].emplace_back(blk, e.dst);
    }
  }
};

/// Extends `set` (sorted, unique on return) with everything reachable over epsilon edges.
inline void epsilon_close(const std::vector<std::vector<StateId>>& eps, std::vector<StateId>& set,
                          std::vector<std::uint32_t>& mark, std::uint32_t& epoch) {
  ++epoch;
  std::vector<StateId> stack;
  std::vector<StateId> out;
  for (auto s : set) {
    if (mark[s] == epoch) continue;
    mark[s] = epoch;
    stack.push_back(s);
  }
  while (!stack.empty()) {
    const StateId s = stack.back();
    stack.pop_back();
    out.push_back(s);
    for (auto t : eps[s]) {
      if (mark[t] == epoch) continue;
      mark[t] = epoch;
      stack.push_back(t);
    }
  }
  std::sort(out.begin(), out.end());
  set = std::move(out);
}

inline std::vector<std::vector<StateId>> epsilon_lists(const Automaton& a) {
  std::vector<std::vector<StateId>> eps(a.state_count);
  for (const auto& e : a.epsilon_edges) eps[e.src].push_back(e.dst);
  return eps;
}

struct VectorHash {
  std::size_t operator()(const std::vector<StateId>& v) const {
    std::size_t h = v.size();
    for (auto x : v) h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

/// States reachable from any start over labeled or epsilon edges.
inline std::vector<bool> reachable(const Automaton& a) {
  std::vector<std::vector<StateId>> succ(a.state_count);
  for (const auto& e : a.edges) succ[e.src].push_back(e.dst);
  for (const auto& e : a.epsilon_edges) succ[e.src].push_back(e.dst);
  std::vector<bool> seen(a.state_count, false);
  std::vector<StateId> stack;
  for (const auto& [s, k] : a.starts)
    if (k != StartKind::None && !seen[s]) {
      seen[s] = true;
      stack.push_back(s);
    }
  while (!stack.empty()) {
    const StateId s = stack.back();
    stack.pop_back();
    for (auto t : succ[s])
      if (!seen[t]) {
        seen[t] = true;
        stack.push_back(t);
      }
  }
  return seen;
}

/// Keeps only states flagged in `keep`, preserving their relative order.
inline Automaton restrict_states(const Automaton& a, const std::vector<bool>& keep) {
  constexpr StateId drop = ~StateId{0};
  std::vector<StateId> map(a.state_count, drop);
  StateId next = 0;
  for (StateId s = 0; s < a.state_count; ++s)
    if (keep[s]) map[s] = next++;
  Automaton r;
  r.state_count = next;
  r.deterministic = a.deterministic;
  for (const auto& e : a.edges)
    if (keep[e.src] && keep[e.dst]) r.edges.push_back({map[e.src], e.cls, map[e.dst]});
  for (const auto& e : a.epsilon_edges)
    if (keep[e.src] && keep[e.dst]) r.epsilon_edges.push_back({map[e.src], map[e.dst]});
  for (const auto& [s, k] : a.starts)
    if (keep[s]) r.starts[map[s]] = k;
  for (auto s : a.accepts)
    if (keep[s]) r.accepts.insert(map[s]);
  for (const auto& [s, id] : a.report_ids)
    if (keep[s]) r.report_ids[map[s]] = id;
  if (a.component_labels) {
    std::vector<int> labels;
    for (StateId s = 0; s < a.state_count; ++s)
      if (keep[s]) labels.push_back((*a.component_labels)[s]);
    r.component_labels = std::move(labels);
  }
  return r;
}

}  // namespace detail

/// Drops states that no start can reach.
inline Automaton trim(const Automaton& a) {
  auto keep = detail::reachable(a);
  if (std::all_of(keep.begin(), keep.end(), [](bool b) { return b; })) return a;
  return detail::restrict_states(a, keep);
}

/// Replaces AllInput starts by a fresh StartOfData state with a full-alphabet
/// self-loop and epsilon edges to each former AllInput state. Returns the
/// input unchanged when it has no AllInput start.
inline Automaton lower_all_input(const Automaton& a) {
  std::vector<StateId> all_input;
  for (const auto& [s, k] : a.starts)
    if (k == StartKind::AllInput) all_input.push_back(s);
  if (all_input.empty()) return a;
  Automaton r = a;
  r.deterministic = false;
  if (r.component_labels) r.component_labels.reset();
  const StateId hub = r.add_state();
  r.add_edge(hub, SymbolClass::all(), hub);
  for (auto s : all_input) {
    r.starts.erase(s);
    r.add_epsilon(hub, s);
  }
  r.starts[hub] = StartKind::StartOfData;
  return r;
}

/// Epsilon elimination by forward closure. No states are added; a state
/// accepts when its closure contains an accepting state.
inline Automaton remove_epsilon(const Automaton& a) {
  if (a.epsilon_edges.empty()) return a;
  const auto eps = detail::epsilon_lists(a);
  Adjacency adj(a);
  std::vector<std::uint32_t> mark(a.state_count, 0);
  std::uint32_t epoch = 0;
  Automaton r;
  r.state_count = a.state_count;
  r.starts = a.starts;
  r.component_labels = a.component_labels;
  std::set<Edge> edges;
  for (StateId q = 0; q < a.state_count; ++q) {
    std::vector<StateId> closure{q};
    detail::epsilon_close(eps, closure, mark, epoch);
    for (auto p : closure) {
      if (a.is_accepting(p)) {
        r.accepts.insert(q);
        if (auto id = a.report_ids.find(p); id != a.report_ids.end() && !r.report_ids.count(q))
          r.report_ids[q] = id->second;
      }
      for (auto ei : adj.out[p]) edges.insert({q, a.edges[ei].cls, a.edges[ei].dst});
    }
  }
  r.edges.assign(edges.begin(), edges.end());
  return r;
}

/// Reverses every edge; accepting states become StartOfData starts and starts
/// become accepting. AllInput starts are lowered first.
inline Automaton reverse(const Automaton& in) {
  const Automaton a = lower_all_input(in);
  Automaton r;
  r.state_count = a.state_count;
  r.component_labels = a.component_labels;
  for (const auto& e : a.edges) r.edges.push_back({e.dst, e.cls, e.src});
  for (const auto& e : a.epsilon_edges) r.epsilon_edges.push_back({e.dst, e.src});
  for (auto s : a.accepts) r.starts[s] = StartKind::StartOfData;
  for (const auto& [s, k] : a.starts)
    if (k != StartKind::None) r.accepts.insert(s);
  return r;
}

/// Subset-construction result with the NFA state set behind each DFA state.
struct Determinized {
  Automaton dfa;
  std::vector<std::vector<StateId>> subsets;
};

/// Subset construction over the coarsest byte partition of the input's edge
/// classes. Only reachable, non-empty subsets are materialized (the initial
/// subset is kept even when empty), so the result is a partial DFA with no
/// dead state. Each (src, dst) pair gets a single edge.
inline Determinized determinize_with_subsets(const Automaton& in, const DeterminizeOptions& opts = {}) {
  const Automaton a = lower_all_input(in);
  detail::BlockTransitions bt(a, detail::BytePartition::of(detail::edge_classes(a)));
  const auto eps = detail::epsilon_lists(a);
  const std::size_t blocks = bt.partition.size();
  std::vector<std::uint32_t> mark(a.state_count, 0);
  std::uint32_t epoch = 0;

  Determinized out;
  Automaton& d = out.dfa;
  std::unordered_map<std::vector<StateId>, StateId, detail::VectorHash> index;
  auto intern = [&](std::vector<StateId>&& set) -> StateId {
    auto it = index.find(set);
    if (it != index.end()) return it->second;
    if (out.subsets.size() >= opts.cap) throw CapExceeded(opts.cap);
    const StateId id = d.add_state();
    index.emplace(set, id);
    out.subsets.push_back(std::move(set));
    return id;
  };

  std::vector<StateId> init;
  for (const auto& [s, k] : a.starts)
    if (k == StartKind::StartOfData) init.push_back(s);
  detail::epsilon_close(eps, init, mark, epoch);
  d.starts[intern(std::move(init))] = StartKind::StartOfData;

  std::vector<std::vector<StateId>> targets(blocks);
  std::vector<std::uint16_t> touched;
  for (StateId cur = 0; cur < out.subsets.size(); ++cur) {
    touched.clear();
    for (auto q : out.subsets[cur]) {
      if (a.is_accepting(q)) d.accepts.insert(cur);
      for (const auto& [blk, dst] : bt.moves[q]) {
        if (targets[blk].empty()) touched.push_back(blk);
        targets[blk].push_back(dst);
      }
    }
    std::sort(touched.begin(), touched.end());
    std::map<StateId, SymbolClass> by_dst;
    for (auto blk : touched) {
      auto set = std::move(targets[blk]);
      targets[blk].clear();
      detail::epsilon_close(eps, set, mark, epoch);
      const StateId dst = intern(std::move(set));
      by_dst[dst] |= bt.partition.members[blk];
    }
    for (const auto& [dst, cls] : by_dst) d.add_edge(cur, cls, dst);
  }
  d.deterministic = true;
  return out;
}

inline Automaton determinize(const Automaton& a, const DeterminizeOptions& opts = {}) {
  return determinize_with_subsets(a, opts).dfa;
}

/// reverse, determinize, reverse, determinize. The result is the minimal
/// partial DFA (no dead state), renumbered canonically.
inline Automaton minimize_brzozowski(const Automaton& a, const DeterminizeOptions& opts = {}) {
  const Automaton once = determinize(reverse(a), opts);
  return canonicalize(determinize(reverse(once), opts));
}

/// Hopcroft partition refinement on a deterministic input.
///
/// The input is completed with one virtual dead state; the dead state's block
/// (every state that cannot reach acceptance) is dropped from the output.
inline Automaton minimize_hopcroft(const Automaton& in) {
  if (!is_deterministic(in)) throw std::invalid_argument("minimize_hopcroft: input must be deterministic");
  const Automaton a = trim(in);
  const std::size_t n = a.state_count;
  const std::size_t total = n + 1;
  const StateId dead = static_cast<StateId>(n);
  detail::BlockTransitions bt(a, detail::BytePartition::of(detail::edge_classes(a)));
  const std::size_t k = bt.partition.size();

  std::vector<StateId> delta(total * k, dead);
  for (StateId s = 0; s < n; ++s)
    for (const auto& [blk, dst] : bt.moves[s]) delta[s * k + blk] = dst;

  // Inverse transitions in CSR form, indexed by (symbol, target).
  std::vector<std::size_t> inv_start(k * total + 1, 0);
  for (StateId s = 0; s < total; ++s)
    for (std::size_t c = 0; c < k; ++c) ++inv_start[c * total + delta[s * k + c] + 1];
  std::partial_sum(inv_start.begin(), inv_start.end(), inv_start.begin());
  std::vector<StateId> inv(total * k);
  {
    auto fill = inv_start;
    for (StateId s = 0; s < total; ++s)
      for (std::size_t c = 0; c < k; ++c) inv[fill[c * total + delta[s * k + c]]++] = s;
  }

  // Partition as contiguous ranges of `elems`; blocks own [first, last).
  std::vector<StateId> elems(total), loc(total), block_of(total);
  std::vector<std::size_t> first, last, marked;
  {
    std::size_t pos = 0;
    for (int pass = 0; pass < 2; ++pass) {
      const std::size_t begin = pos;
      for (StateId s = 0; s < total; ++s) {
        const bool acc = s < n && a.is_accepting(s);
        if (acc == (pass == 0)) {
          elems[pos] = s;
          loc[s] = static_cast<StateId>(pos);
          ++pos;
        }
      }
      if (pos > begin) {
        for (std::size_t i = begin; i < pos; ++i) block_of[elems[i]] = static_cast<StateId>(first.size());
        first.push_back(begin);
        last.push_back(pos);
        marked.push_back(0);
      }
    }
  }

  std::vector<std::vector<bool>> in_work(first.size(), std::vector<bool>(k, false));
  std::deque<std::pair<std::size_t, std::size_t>> work;
  auto push = [&](std::size_t b, std::size_t c) {
    if (!in_work[b][c]) {
      in_work[b][c] = true;
      work.emplace_back(b, c);
    }
  };
  if (first.size() == 2) {
    const std::size_t smaller = (last[0] - first[0] <= last[1] - first[1]) ? 0 : 1;
    for (std::size_t c = 0; c < k; ++c) push(smaller, c);
  }

  std::vector<StateId> pre;
  std::vector<std::size_t> touched;
  while (!work.empty()) {
    const auto [b, c] = work.front();
    work.pop_front();
    in_work[b][c] = false;
    pre.clear();
    for (std::size_t i = first[b]; i < last[b]; ++i) {
      const StateId t = elems[i];
      for (std::size_t j = inv_start[c * total + t]; j < inv_start[c * total + t + 1]; ++j) pre.push_back(inv[j]);
    }
    touched.clear();
    for (auto s : pre) {
      const std::size_t y = block_of[s];
      const std::size_t pos = loc[s];
      const std::size_t boundary = first[y] + marked[y];
      if (pos < boundary) continue;  // already marked
      if (marked[y] == 0) touched.push_back(y);
      const StateId other = elems[boundary];
      std::swap(elems[pos], elems[boundary]);
      loc[other] = static_cast<StateId>(pos);
      loc[s] = static_cast<StateId>(boundary);
      ++marked[y];
    }
    for (auto y : touched) {
      const std::size_t m = marked[y];
      marked[y] = 0;
      if (m == last[y] - first[y]) continue;
      const std::size_t fresh = first.size();
      first.push_back(first[y]);
      last.push_back(first[y] + m);
      marked.push_back(0);
      first[y] += m;
      for (std::size_t i = first[fresh]; i < last[fresh]; ++i) block_of[elems[i]] = static_cast<StateId>(fresh);
      in_work.emplace_back(k, false);
      const bool fresh_smaller = (last[fresh] - first[fresh]) <= (last[y] - first[y]);
      for (std::size_t cc = 0; cc < k; ++cc) {
        if (in_work[y][cc]) push(fresh, cc);
        else push(fresh_smaller ? fresh : y, cc);
      }
    }
  }

  const std::size_t dead_block = block_of[dead];
  constexpr StateId none = ~StateId{0};
  std::vector<StateId> block_id(first.size(), none);
  Automaton r;
  StateId start_block = none;
  for (const auto& [s, kind] : a.starts) start_block = block_of[s];
  if (start_block == dead_block) {
    r.state_count = 1;
    r.starts[0] = StartKind::StartOfData;
    r.deterministic = true;
    return r;
  }
  for (std::size_t b = 0; b < first.size(); ++b)
    if (b != dead_block) block_id[b] = r.add_state();
  r.starts[block_id[start_block]] = StartKind::StartOfData;
  for (std::size_t b = 0; b < first.size(); ++b) {
    if (b == dead_block) continue;
    const StateId rep = elems[first[b]];
    if (a.is_accepting(rep)) r.accepts.insert(block_id[b]);
    std::map<StateId, SymbolClass> by_dst;
    for (std::size_t c = 0; c < k; ++c) {
      const std::size_t tb = block_of[delta[rep * k + c]];
      if (tb == dead_block) continue;
      by_dst[block_id[tb]] |= bt.partition.members[c];
    }
    for (const auto& [dst, cls] : by_dst) r.add_edge(block_id[b], cls, dst);
  }
  r.deterministic = true;
  return canonicalize(r);
}

/// Merges states with identical signatures until no two remain equal.
///
/// Signature: acceptance, start kind and the outgoing relation as a set of
/// (byte, target) pairs, compared after folding all classes that lead to the
/// same target into one. Incoming edges are redirected to the lowest-numbered
/// member of each group.
inline Automaton optimize_nfa(const Automaton& in) {
  Automaton a = remove_epsilon(in);
  bool changed_any = false;
  while (true) {
    using Signature = std::tuple<bool, StartKind, std::vector<std::pair<StateId, SymbolClass>>>;
    std::vector<std::map<StateId, SymbolClass>> folded(a.state_count);
    for (const auto& e : a.edges) folded[e.src][e.dst] |= e.cls;
    std::map<Signature, StateId> rep_of;
    std::vector<StateId> rep(a.state_count);
    bool merged = false;
    for (StateId s = 0; s < a.state_count; ++s) {
      Signature sig{a.is_accepting(s), a.start_kind(s), {folded[s].begin(), folded[s].end()}};
      auto [it, inserted] = rep_of.emplace(std::move(sig), s);
      rep[s] = it->second;
      merged |= !inserted;
    }
    if (!merged) break;
    changed_any = true;

    std::vector<StateId> map(a.state_count);
    StateId next = 0;
    for (StateId s = 0; s < a.state_count; ++s)
      if (rep[s] == s) map[s] = next++;
    for (StateId s = 0; s < a.state_count; ++s) map[s] = map[rep[s]];

    Automaton r;
    r.state_count = next;
    std::set<Edge> edges;
    for (const auto& e : a.edges) edges.insert({map[e.src], e.cls, map[e.dst]});
    r.edges.assign(edges.begin(), edges.end());
    for (const auto& [s, k] : a.starts) r.starts[map[s]] = k;
    for (auto s : a.accepts) r.accepts.insert(map[s]);
    for (const auto& [s, id] : a.report_ids)
      if (rep[s] == s) r.report_ids[map[s]] = id;
    if (a.component_labels) {
      const auto& labels = *a.component_labels;
      bool homogeneous = true;
      std::vector<int> out(next, 0);
      for (StateId s = 0; s < a.state_count; ++s) {
        if (labels[s] != labels[rep[s]]) homogeneous = false;
        out[map[s]] = labels[rep[s]];
      }
      if (homogeneous) r.component_labels = std::move(out);
    }
    a = std::move(r);
  }
  if (!changed_any) return a;
  a.deterministic = is_deterministic(a);
  return a;
}

/// Weakly connected components, each renumbered in ascending original order.
///
/// Each component's `component_labels` holds its rule id: the input's label
/// when it has labels, otherwise the report id of its first accepting state,
/// otherwise the component's position in the output.
inline std::vector<Automaton> connected_components(const Automaton& a) {
  std::vector<StateId> parent(a.state_count);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](StateId x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto unite = [&](StateId x, StateId y) {
    x = find(x);
    y = find(y);
    if (x != y) parent[std::max(x, y)] = std::min(x, y);
  };
  for (const auto& e : a.edges) unite(e.src, e.dst);
  for (const auto& e : a.epsilon_edges) unite(e.src, e.dst);

  std::map<StateId, std::size_t> order;
  for (StateId s = 0; s < a.state_count; ++s) order.emplace(find(s), order.size());
  std::vector<Automaton> out;
  out.reserve(order.size());
  for (const auto& [root, index] : order) {
    std::vector<bool> keep(a.state_count, false);
    for (StateId s = 0; s < a.state_count; ++s) keep[s] = find(s) == root;
    Automaton c = detail::restrict_states(a, keep);
    int label = static_cast<int>(index);
    if (a.component_labels) {
      for (StateId s = 0; s < a.state_count; ++s)
        if (keep[s]) {
          label = (*a.component_labels)[s];
          break;
        }
    } else if (!c.report_ids.empty()) {
      label = c.report_ids.begin()->second;
    }
    c.component_labels = std::vector<int>(c.state_count, label);
    c.deterministic = a.deterministic && is_deterministic(c);
    out.push_back(std::move(c));
  }
  return out;
}

/// Disjoint union behind a fresh shared StartOfData state (state 0).
///
/// StartOfData starts of the inputs become epsilon targets of the shared
/// start; AllInput starts stay AllInput. Accepting states record the id of
/// the pattern they came from (`ids[i]`, or `i` when ids are not given).
inline Automaton merge_patterns(const std::vector<Automaton>& ps, const std::vector<int>& ids = {}) {
  if (!ids.empty() && ids.size() != ps.size()) throw std::invalid_argument("merge_patterns: ids size mismatch");
  Automaton r;
  const StateId shared = r.add_state();
  r.starts[shared] = StartKind::StartOfData;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const Automaton& p = ps[i];
    const auto offset = static_cast<StateId>(r.state_count);
    r.state_count += p.state_count;
    for (const auto& e : p.edges) r.edges.push_back({e.src + offset, e.cls, e.dst + offset});
    for (const auto& e : p.epsilon_edges) r.epsilon_edges.push_back({e.src + offset, e.dst + offset});
    for (const auto& [s, k] : p.starts) {
      if (k == StartKind::StartOfData) r.add_epsilon(shared, s + offset);
      else if (k == StartKind::AllInput) r.starts[s + offset] = StartKind::AllInput;
    }
    const int pid = ids.empty() ? static_cast<int>(i) : ids[i];
    for (auto s : p.accepts) {
      r.accepts.insert(s + offset);
      r.report_ids[s + offset] = pid;
    }
  }
  return r;
}

/// Exact language equivalence: both sides are determinized, then the product
/// of the two partial DFAs is searched for a pair that disagrees on acceptance.
inline bool equivalent(const Automaton& a, const Automaton& b, const DeterminizeOptions& opts = {}) {
  const Automaton da = determinize(a, opts);
  const Automaton db = determinize(b, opts);
  auto classes = detail::edge_classes(da);
  auto more = detail::edge_classes(db);
  classes.insert(classes.end(), more.begin(), more.end());
  const auto partition = detail::BytePartition::of(classes);
  const std::size_t k = partition.size();
  constexpr std::uint32_t dead = ~std::uint32_t{0};

  auto table = [&](const Automaton& d) {
    std::vector<std::uint32_t> t(d.state_count * k, dead);
    detail::BlockTransitions bt(d, partition);
    for (StateId s = 0; s < d.state_count; ++s)
      for (const auto& [blk, dst] : bt.moves[s]) t[s * k + blk] = dst;
    return t;
  };
  const auto ta = table(da);
  const auto tb = table(db);
  auto accepting = [](const Automaton& d, std::uint32_t s) { return s != dead && d.is_accepting(s); };

  std::unordered_set<std::uint64_t> seen;
  std::deque<std::pair<std::uint32_t, std::uint32_t>> queue;
  auto visit = [&](std::uint32_t p, std::uint32_t q) {
    const std::uint64_t key = (static_cast<std::uint64_t>(p) << 32) | q;
    if (seen.insert(key).second) queue.emplace_back(p, q);
  };
  visit(da.starts.begin()->first, db.starts.begin()->first);
  while (!queue.empty()) {
    const auto [p, q] = queue.front();
    queue.pop_front();
    if (accepting(da, p) != accepting(db, q)) return false;
    if (p == dead && q == dead) continue;
    for (std::size_t c = 0; c < k; ++c) {
      const std::uint32_t np = p == dead ? dead : ta[p * k + c];
      const std::uint32_t nq = q == dead ? dead : tb[q * k + c];
      visit(np, nq);
    }
  }
  return true;
}

/// Table-filling (Myhill-Nerode pair marking) count of the live equivalence
/// classes of a deterministic automaton with at most `limit` states. This is
/// an independent check on the minimizers and shares none of their code.
inline std::size_t brute_force_minimal_states(const Automaton& a, std::size_t limit = 512) {
  if (!is_deterministic(a)) throw std::invalid_argument("brute_force_minimal_states: input must be deterministic");
  if (a.state_count > limit)
    throw std::invalid_argument("brute_force_minimal_states: more than " + std::to_string(limit) + " states");
  const std::size_t n = a.state_count;
  const std::size_t dead = n;
  const std::size_t total = n + 1;

  // Full byte table, then collapse bytes whose columns are identical.
  std::vector<std::array<std::size_t, 256>> table(total);
  for (auto& row : table) row.fill(dead);
  for (const auto& e : a.edges)
    for (unsigned b = 0; b < 256; ++b)
      if (e.cls.contains(static_cast<std::uint8_t>(b))) table[e.src][b] = e.dst;
  std::vector<unsigned> symbols;
  for (unsigned b = 0; b < 256; ++b) {
    bool duplicate = false;
    for (auto prev : symbols) {
      bool same = true;
      for (std::size_t s = 0; s < total && same; ++s) same = table[s][b] == table[s][prev];
      if (same) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) symbols.push_back(b);
  }

  const StateId start = a.starts.begin()->first;
  std::vector<bool> reach(total, false);
  std::vector<std::size_t> stack{start};
  reach[start] = true;
  while (!stack.empty()) {
    const auto s = stack.back();
    stack.pop_back();
    for (auto b : symbols) {
      const auto t = table[s][b];
      if (!reach[t]) {
        reach[t] = true;
        stack.push_back(t);
      }
    }
  }
  reach[dead] = true;

  auto accepting = [&](std::size_t s) { return s < n && a.is_accepting(static_cast<StateId>(s)); };
  std::vector<std::vector<bool>> distinct(total, std::vector<bool>(total, false));
  for (std::size_t p = 0; p < total; ++p)
    for (std::size_t q = 0; q < p; ++q)
      if (accepting(p) != accepting(q)) distinct[p][q] = distinct[q][p] = true;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t p = 0; p < total; ++p) {
      if (!reach[p]) continue;
      for (std::size_t q = 0; q < p; ++q) {
        if (!reach[q] || distinct[p][q]) continue;
        for (auto b : symbols) {
          if (distinct[table[p][b]][table[q][b]]) {
            distinct[p][q] = distinct[q][p] = true;
            changed = true;
            break;
          }
        }
      }
    }
  }

  std::size_t classes = 0;
  std::vector<std::size_t> reps;
  for (std::size_t s = 0; s < n; ++s) {
    if (!reach[s] || !distinct[s][dead]) continue;
    bool fresh = true;
    for (auto r : reps)
      if (!distinct[s][r]) {
        fresh = false;
        break;
      }
    if (fresh) {
      reps.push_back(s);
      ++classes;
    }
  }
  return std::max<std::size_t>(classes, 1);
}

}  // namespace fawb
