#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "fawb/automaton.hpp"

namespace fawb {

struct Report {
  std::size_t cycle = 0;
  StateId state = 0;
  int pattern_id = 0;
  bool operator==(const Report&) const = default;
};

/// Cycle t consumes input[t]. `per_cycle_enabled[t]` holds the states able
/// to consume input[t] (the carried-over set plus start activations);
/// `per_cycle_active[t]` holds the states active after consuming it.
struct SimulationTrace {
  std::size_t cycles = 0;
  std::vector<StateId> initial_active;
  std::vector<std::vector<StateId>> per_cycle_enabled;
  std::vector<std::vector<StateId>> per_cycle_active;
  std::vector<Report> reports;
  std::map<StateId, std::size_t> per_state_activation_count;
  /// Edge inspections plus epsilon-closure pops; grows with |input| x |active set|.
  std::size_t operations = 0;
};

struct ActiveRuleStats {
  std::vector<std::size_t> per_cycle_rule_count;
  std::size_t min_active = 0;
  std::size_t max_active = 0;
  /// Present when every component has exactly one start state.
  std::optional<double> start_only_fraction;
};

namespace detail {

class Stepper {
 public:
  Stepper(Automaton&&) = delete;
  explicit Stepper(const Automaton& a) : a_(a), adj_(a), mark_(a.state_count, 0) {
    for (const auto& [s, k] : a.starts) {
      if (k == StartKind::StartOfData) start_of_data_.push_back(s);
      if (k == StartKind::AllInput) all_input_.push_back(s);
    }
  }

  std::vector<StateId> initial(std::size_t& ops) {
    std::vector<StateId> set = start_of_data_;
    set.insert(set.end(), all_input_.begin(), all_input_.end());
    return close(std::move(set), ops);
  }

  std::vector<StateId> enable(const std::vector<StateId>& carried, std::size_t& ops) {
    if (all_input_.empty()) return carried;
    std::vector<StateId> set = carried;
    set.insert(set.end(), all_input_.begin(), all_input_.end());
    return close(std::move(set), ops);
  }

  std::vector<StateId> step(const std::vector<StateId>& enabled, std::uint8_t byte, std::size_t& ops) {
    std::vector<StateId> next;
    for (auto s : enabled)
      for (auto ei : adj_.out[s]) {
        ++ops;
        const Edge& e = a_.edges[ei];
        if (e.cls.contains(byte)) next.push_back(e.dst);
      }
    return close(std::move(next), ops);
  }

 private:
  std::vector<StateId> close(std::vector<StateId> set, std::size_t& ops) {
    ++epoch_;
    std::vector<StateId> stack, out;
    for (auto s : set)
      if (mark_[s] != epoch_) {
        mark_[s] = epoch_;
        stack.push_back(s);
      }
    while (!stack.empty()) {
      const StateId s = stack.back();
      stack.pop_back();
      ++ops;
      out.push_back(s);
      for (auto t : adj_.eps[s])
        if (mark_[t] != epoch_) {
          mark_[t] = epoch_;
          stack.push_back(t);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  const Automaton& a_;
  Adjacency adj_;
  std::vector<std::uint32_t> mark_;
  std::uint32_t epoch_ = 0;
  std::vector<StateId> start_of_data_;
  std::vector<StateId> all_input_;
};

inline std::span<const std::uint8_t> as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

}  // namespace detail

/// Multi-active-state simulation.
///
/// StartOfData states are active only before the first symbol; AllInput
/// states are re-enabled before every symbol. A report is emitted for each
/// cycle in which an accepting state is active after the step, at most once
/// per (cycle, pattern id); the lowest accepting state is kept. Accepting
/// states in the closure of the AllInput starts report every cycle, so a
/// nullable unanchored pattern agrees with its determinized form.
inline SimulationTrace run(const Automaton& a, std::span<const std::uint8_t> input) {
  detail::Stepper stepper(a);
  std::vector<StateId> empty_match;
  {
    std::size_t unused = 0;
    for (auto s : stepper.enable({}, unused))
      if (a.is_accepting(s)) empty_match.push_back(s);
  }
  SimulationTrace trace;
  trace.cycles = input.size();
  trace.initial_active = stepper.initial(trace.operations);
  std::vector<StateId> carried;
  for (std::size_t t = 0; t < input.size(); ++t) {
    auto enabled = t == 0 ? trace.initial_active : stepper.enable(carried, trace.operations);
    carried = stepper.step(enabled, input[t], trace.operations);
    std::map<int, StateId> reported;
    for (auto s : carried) {
      ++trace.per_state_activation_count[s];
      if (a.is_accepting(s)) reported.emplace(a.report_id(s).value_or(0), s);
    }
    for (auto s : empty_match) {
      auto [it, fresh] = reported.emplace(a.report_id(s).value_or(0), s);
      if (!fresh) it->second = std::min(it->second, s);
    }
    for (const auto& [pid, s] : reported) trace.reports.push_back({t, s, pid});
    trace.per_cycle_enabled.push_back(std::move(enabled));
    trace.per_cycle_active.push_back(carried);
  }
  return trace;
}

inline SimulationTrace run(const Automaton& a, std::string_view input) { return run(a, detail::as_bytes(input)); }

namespace detail {

inline StateId single_start(const Automaton& a, std::size_t index) {
  std::optional<StateId> start;
  for (const auto& [s, k] : a.starts) {
    if (k == StartKind::None) continue;
    if (start) throw std::invalid_argument("component " + std::to_string(index) + " has more than one start state");
    start = s;
  }
  if (!start) throw std::invalid_argument("component " + std::to_string(index) + " has no start state");
  return *start;
}

inline bool has_single_start(const Automaton& a) {
  std::size_t n = 0;
  for (const auto& [s, k] : a.starts) n += k != StartKind::None;
  return n == 1;
}

inline std::optional<double> start_only_from_traces(const std::vector<Automaton>& components,
                                                    const std::vector<SimulationTrace>& traces,
                                                    std::size_t cycles) {
  // a rule is start-only when nothing beyond its start closure is enabled
  for (std::size_t i = 0; i < components.size(); ++i) (void)single_start(components[i], i);
  double sum = 0.0;
  std::size_t counted = 0;
  for (std::size_t t = 0; t < cycles; ++t) {
    std::size_t active = 0, start_only = 0;
    for (std::size_t i = 0; i < components.size(); ++i) {
      const auto& enabled = traces[i].per_cycle_enabled[t];
      if (enabled.empty()) continue;
      ++active;
      if (enabled == traces[i].initial_active) ++start_only;
    }
    if (active == 0) continue;
    sum += 100.0 * static_cast<double>(start_only) / static_cast<double>(active);
    ++counted;
  }
  if (counted == 0) return std::nullopt;
  return sum / static_cast<double>(counted);
}

}  // namespace detail

/// Counts, per cycle, the rules with at least one enabled state (start
/// activations included) and the extremes over all cycles.
inline ActiveRuleStats active_rule_frequency(const std::vector<Automaton>& components,
                                             std::span<const std::uint8_t> input) {
  std::vector<SimulationTrace> traces;
  traces.reserve(components.size());
  for (const auto& c : components) traces.push_back(run(c, input));
  ActiveRuleStats st;
  for (std::size_t t = 0; t < input.size(); ++t) {
    std::size_t n = 0;
    for (const auto& tr : traces) n += !tr.per_cycle_enabled[t].empty();
    st.per_cycle_rule_count.push_back(n);
  }
  if (!st.per_cycle_rule_count.empty()) {
    auto [lo, hi] = std::minmax_element(st.per_cycle_rule_count.begin(), st.per_cycle_rule_count.end());
    st.min_active = *lo;
    st.max_active = *hi;
  }
  if (std::all_of(components.begin(), components.end(), detail::has_single_start))
    st.start_only_fraction = detail::start_only_from_traces(components, traces, input.size());
  return st;
}

inline ActiveRuleStats active_rule_frequency(const std::vector<Automaton>& components, std::string_view input) {
  return active_rule_frequency(components, detail::as_bytes(input));
}

/// Mean over cycles with at least one active rule of the percentage of
/// active rules whose only enabled state is their start state. Cycles with
/// no active rule are skipped; if every cycle is skipped the result is 0.
inline double start_only_fraction(const std::vector<Automaton>& components, std::span<const std::uint8_t> input) {
  for (std::size_t i = 0; i < components.size(); ++i) detail::single_start(components[i], i);
  std::vector<SimulationTrace> traces;
  for (const auto& c : components) traces.push_back(run(c, input));
  return detail::start_only_from_traces(components, traces, input.size()).value_or(0.0);
}

inline double start_only_fraction(const std::vector<Automaton>& components, std::string_view input) {
  return start_only_fraction(components, detail::as_bytes(input));
}

/// Scan throughput in Gbps: bits / 1e9 / seconds.
inline double throughput(double input_size_bits, double scan_time_seconds) {
  if (!(scan_time_seconds > 0.0)) throw std::invalid_argument("throughput: scan time must be positive");
  return input_size_bits / 1e9 / scan_time_seconds;
}

}  // namespace fawb
