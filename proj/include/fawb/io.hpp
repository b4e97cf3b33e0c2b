#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <iterator>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fawb/automaton.hpp"
#include "fawb/error.hpp"
#include "fawb/experiment.hpp"
#include "fawb/generators.hpp"
#include "fawb/simulate.hpp"
#include "fawb/symbol_class.hpp"

namespace fawb {

inline constexpr int kDocumentVersion = 1;

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace detail {

inline std::string child(const std::string& ptr, std::string_view key) { return ptr + "/" + std::string(key); }
inline std::string child(const std::string& ptr, std::size_t index) { return ptr + "/" + std::to_string(index); }

inline void require_object(const json& j, const std::string& ptr, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) throw SchemaError(ptr, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (auto k : allowed) known |= it.key() == k;
    if (!known) throw SchemaError(child(ptr, it.key()), "unknown field");
  }
}

inline const json& field(const json& j, const std::string& ptr, std::string_view key) {
  auto it = j.find(std::string(key));
  if (it == j.end()) throw SchemaError(child(ptr, key), "missing required field");
  return *it;
}

inline std::uint64_t as_unsigned(const json& j, const std::string& ptr) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0))
    throw SchemaError(ptr, "expected a non-negative integer");
  return j.get<std::uint64_t>();
}

inline std::int64_t as_integer(const json& j, const std::string& ptr) {
  if (!j.is_number_integer()) throw SchemaError(ptr, "expected an integer");
  return j.get<std::int64_t>();
}

inline double as_number(const json& j, const std::string& ptr) {
  if (!j.is_number()) throw SchemaError(ptr, "expected a number");
  return j.get<double>();
}

inline const std::string& as_string(const json& j, const std::string& ptr) {
  if (!j.is_string()) throw SchemaError(ptr, "expected a string");
  return j.get_ref<const std::string&>();
}

inline const json& as_array(const json& j, const std::string& ptr) {
  if (!j.is_array()) throw SchemaError(ptr, "expected an array");
  return j;
}

inline StateId as_state(const json& j, const std::string& ptr, std::size_t states) {
  const auto v = as_unsigned(j, ptr);
  if (v >= states) throw SchemaError(ptr, "state id out of range");
  return static_cast<StateId>(v);
}

inline void check_version(const json& j, const std::string& ptr) {
  const auto v = as_integer(field(j, ptr, "version"), child(ptr, "version"));
  if (v != kDocumentVersion)
    throw SchemaError(child(ptr, "version"),
                      "unsupported version " + std::to_string(v) + " (expected " + std::to_string(kDocumentVersion) + ")");
}

inline bool all_hex(std::string_view s) {
  for (char c : s)
    if (SymbolClass::hex_value(c) < 0) return false;
  return true;
}

/// Decodes an edge label: a character-set string or a 64-digit hex literal.
inline SymbolClass parse_class_text(const std::string& text, const std::string& ptr) {
  if (text.empty()) throw SchemaError(ptr, "empty symbol class");
  try {
    if (text.size() > 1 && text[0] != '[' && text[0] != '\\' && all_hex(text)) {
      if (text.size() != 64) throw SchemaError(ptr, "class literal length");
      return SymbolClass::from_hex(text);
    }
    return SymbolClass::parse(text);
  } catch (const ParseError& e) {
    throw SchemaError(ptr, e.what());
  }
}

inline json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(origin + ": " + e.what());
  }
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace detail

/// Decodes an AutomatonDocument.
inline Automaton automaton_from_json(const json& j) {
  const std::string root;
  detail::require_object(j, root,
                         {"version", "states", "deterministic", "starts", "accepts", "edges", "epsilon_edges",
                          "component_labels"});
  detail::check_version(j, root);
  Automaton a;
  a.state_count = detail::as_unsigned(detail::field(j, root, "states"), "/states");
  const std::size_t n = a.state_count;
  if (auto it = j.find("deterministic"); it != j.end()) {
    if (!it->is_boolean()) throw SchemaError("/deterministic", "expected a boolean");
    a.deterministic = it->get<bool>();
  }

  const auto& starts = detail::as_array(detail::field(j, root, "starts"), "/starts");
  for (std::size_t i = 0; i < starts.size(); ++i) {
    const auto ptr = detail::child("/starts", i);
    detail::require_object(starts[i], ptr, {"id", "kind"});
    const auto id = detail::as_state(detail::field(starts[i], ptr, "id"), ptr + "/id", n);
    const auto& kind_text = detail::as_string(detail::field(starts[i], ptr, "kind"), ptr + "/kind");
    const auto kind = parse_start_kind(kind_text);
    if (!kind) throw SchemaError(ptr + "/kind", "unknown start kind '" + kind_text + "'");
    if (!a.starts.emplace(id, *kind).second) throw SchemaError(ptr + "/id", "duplicate start state");
  }

  const auto& accepts = detail::as_array(detail::field(j, root, "accepts"), "/accepts");
  for (std::size_t i = 0; i < accepts.size(); ++i) {
    const auto ptr = detail::child("/accepts", i);
    StateId id;
    if (accepts[i].is_object()) {
      detail::require_object(accepts[i], ptr, {"id", "pattern_id"});
      id = detail::as_state(detail::field(accepts[i], ptr, "id"), ptr + "/id", n);
      if (auto p = accepts[i].find("pattern_id"); p != accepts[i].end())
        a.report_ids[id] = static_cast<int>(detail::as_integer(*p, ptr + "/pattern_id"));
    } else {
      id = detail::as_state(accepts[i], ptr, n);
    }
    if (!a.accepts.insert(id).second) throw SchemaError(ptr, "duplicate accept state");
  }

  const auto& edges = detail::as_array(detail::field(j, root, "edges"), "/edges");
  a.edges.reserve(edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto ptr = detail::child("/edges", i);
    detail::require_object(edges[i], ptr, {"src", "dst", "class"});
    const auto src = detail::as_state(detail::field(edges[i], ptr, "src"), ptr + "/src", n);
    const auto dst = detail::as_state(detail::field(edges[i], ptr, "dst"), ptr + "/dst", n);
    const auto& text = detail::as_string(detail::field(edges[i], ptr, "class"), ptr + "/class");
    a.edges.push_back({src, detail::parse_class_text(text, ptr + "/class"), dst});
  }

  if (auto it = j.find("epsilon_edges"); it != j.end()) {
    const auto& eps = detail::as_array(*it, "/epsilon_edges");
    for (std::size_t i = 0; i < eps.size(); ++i) {
      const auto ptr = detail::child("/epsilon_edges", i);
      detail::require_object(eps[i], ptr, {"src", "dst"});
      a.epsilon_edges.push_back({detail::as_state(detail::field(eps[i], ptr, "src"), ptr + "/src", n),
                                 detail::as_state(detail::field(eps[i], ptr, "dst"), ptr + "/dst", n)});
    }
  }

  if (auto it = j.find("component_labels"); it != j.end()) {
    const auto& labels = detail::as_array(*it, "/component_labels");
    if (labels.size() != n) throw SchemaError("/component_labels", "expected one label per state");
    std::vector<int> out;
    for (std::size_t i = 0; i < labels.size(); ++i)
      out.push_back(static_cast<int>(detail::as_integer(labels[i], detail::child("/component_labels", i))));
    a.component_labels = std::move(out);
  }
  return a;
}

inline ordered_json automaton_to_json(const Automaton& a) {
  ordered_json j;
  j["version"] = kDocumentVersion;
  j["states"] = a.state_count;
  j["deterministic"] = a.deterministic;
  auto& starts = j["starts"] = ordered_json::array();
  for (const auto& [s, k] : a.starts) starts.push_back({{"id", s}, {"kind", to_string(k)}});
  auto& accepts = j["accepts"] = ordered_json::array();
  for (auto s : a.accepts) {
    if (auto it = a.report_ids.find(s); it != a.report_ids.end())
      accepts.push_back({{"id", s}, {"pattern_id", it->second}});
    else
      accepts.push_back(s);
  }
  auto& edges = j["edges"] = ordered_json::array();
  for (const auto& e : a.edges) edges.push_back({{"src", e.src}, {"dst", e.dst}, {"class", e.cls.to_string()}});
  if (!a.epsilon_edges.empty()) {
    auto& eps = j["epsilon_edges"] = ordered_json::array();
    for (const auto& e : a.epsilon_edges) eps.push_back({{"src", e.src}, {"dst", e.dst}});
  }
  if (a.component_labels) j["component_labels"] = *a.component_labels;
  return j;
}

inline Automaton load_automaton(const std::filesystem::path& path) {
  try {
    return automaton_from_json(detail::parse_json_text(detail::read_file(path), path.string()));
  } catch (const SchemaError& e) {
    throw SchemaError(e.pointer(), e.detail(), path.string());
  }
}

inline void save_automaton(const Automaton& a, const std::filesystem::path& path) {
  detail::write_atomically(path, automaton_to_json(a).dump(2) + "\n");
}

/// A pattern set as stored on disk.
struct PatternSetDocument {
  std::optional<std::uint64_t> seed;
  StartKind start_kind = StartKind::StartOfData;
  std::vector<Pattern> patterns;
};

namespace detail {

inline std::string as_bytes_string(const json& j, const std::string& ptr) {
  const auto& s = as_string(j, ptr);
  if (s.empty()) throw SchemaError(ptr, "expected a non-empty string");
  return s;
}

inline Pattern pattern_from_json(const json& j, const std::string& ptr, StartKind default_kind) {
  require_object(j, ptr, {"id", "start_kind", "regex", "dotstar", "hamming", "levenshtein", "random"});
  Pattern p;
  p.id = static_cast<int>(as_integer(field(j, ptr, "id"), ptr + "/id"));
  p.start_kind = default_kind;
  if (auto it = j.find("start_kind"); it != j.end()) {
    const auto kind = parse_start_kind(as_string(*it, ptr + "/start_kind"));
    if (!kind || *kind == StartKind::None) throw SchemaError(ptr + "/start_kind", "invalid start kind");
    p.start_kind = *kind;
  }
  std::size_t sources = 0;
  if (auto it = j.find("regex"); it != j.end()) {
    ++sources;
    p.source = RegexSource{as_string(*it, ptr + "/regex")};
  }
  if (auto it = j.find("dotstar"); it != j.end()) {
    ++sources;
    const auto sp = ptr + "/dotstar";
    require_object(*it, sp, {"prefix", "suffix"});
    p.source = DotStarSource{as_bytes_string(field(*it, sp, "prefix"), sp + "/prefix"),
                             as_bytes_string(field(*it, sp, "suffix"), sp + "/suffix")};
  }
  for (const char* mesh : {"hamming", "levenshtein"}) {
    auto it = j.find(mesh);
    if (it == j.end()) continue;
    ++sources;
    const auto sp = ptr + "/" + mesh;
    require_object(*it, sp, {"pattern", "distance"});
    auto pattern = as_bytes_string(field(*it, sp, "pattern"), sp + "/pattern");
    const auto d = as_unsigned(field(*it, sp, "distance"), sp + "/distance");
    if (d > pattern.size()) throw SchemaError(sp + "/distance", "distance exceeds pattern length");
    if (std::string_view(mesh) == "hamming") p.source = HammingSource{std::move(pattern), d};
    else p.source = LevenshteinSource{std::move(pattern), d};
  }
  if (auto it = j.find("random"); it != j.end()) {
    ++sources;
    const auto sp = ptr + "/random";
    require_object(*it, sp, {"n", "r", "f", "alphabet_size", "seed"});
    RandomRecipe r;
    r.n = as_unsigned(field(*it, sp, "n"), sp + "/n");
    r.r = as_number(field(*it, sp, "r"), sp + "/r");
    r.f = as_number(field(*it, sp, "f"), sp + "/f");
    r.alphabet_size = as_unsigned(field(*it, sp, "alphabet_size"), sp + "/alphabet_size");
    r.seed = as_unsigned(field(*it, sp, "seed"), sp + "/seed");
    if (r.n < 1) throw SchemaError(sp + "/n", "must be >= 1");
    if (!(r.r > 0)) throw SchemaError(sp + "/r", "must be positive");
    if (!(r.f >= 0 && r.f <= 1)) throw SchemaError(sp + "/f", "must lie in [0, 1]");
    if (r.alphabet_size < 1 || r.alphabet_size > 256) throw SchemaError(sp + "/alphabet_size", "must be 1..256");
    p.source = r;
  }
  if (sources != 1) throw SchemaError(ptr, "expected exactly one pattern source");
  return p;
}

inline ordered_json pattern_to_json(const Pattern& p, StartKind set_kind) {
  ordered_json j;
  j["id"] = p.id;
  if (p.start_kind != set_kind) j["start_kind"] = to_string(p.start_kind);
  std::visit(
      [&](const auto& src) {
        using T = std::decay_t<decltype(src)>;
        if constexpr (std::is_same_v<T, RegexSource>) j["regex"] = src.text;
        else if constexpr (std::is_same_v<T, DotStarSource>)
          j["dotstar"] = {{"prefix", src.prefix}, {"suffix", src.suffix}};
        else if constexpr (std::is_same_v<T, HammingSource>)
          j["hamming"] = {{"pattern", src.pattern}, {"distance", src.distance}};
        else if constexpr (std::is_same_v<T, LevenshteinSource>)
          j["levenshtein"] = {{"pattern", src.pattern}, {"distance", src.distance}};
        else
          j["random"] = {{"n", src.n}, {"r", src.r}, {"f", src.f}, {"alphabet_size", src.alphabet_size},
                         {"seed", src.seed}};
      },
      p.source);
  return j;
}

}  // namespace detail

inline PatternSetDocument pattern_set_from_json(const json& j) {
  const std::string root;
  detail::require_object(j, root, {"version", "seed", "start_kind", "patterns"});
  detail::check_version(j, root);
  PatternSetDocument doc;
  if (auto it = j.find("seed"); it != j.end()) doc.seed = detail::as_unsigned(*it, "/seed");
  const auto& kind_text = detail::as_string(detail::field(j, root, "start_kind"), "/start_kind");
  const auto kind = parse_start_kind(kind_text);
  if (!kind || *kind == StartKind::None) throw SchemaError("/start_kind", "invalid start kind '" + kind_text + "'");
  doc.start_kind = *kind;
  const auto& patterns = detail::as_array(detail::field(j, root, "patterns"), "/patterns");
  std::set<int> ids;
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    const auto ptr = detail::child("/patterns", i);
    auto p = detail::pattern_from_json(patterns[i], ptr, doc.start_kind);
    if (!ids.insert(p.id).second) throw SchemaError(ptr + "/id", "duplicate pattern id " + std::to_string(p.id));
    doc.patterns.push_back(std::move(p));
  }
  return doc;
}

inline ordered_json pattern_set_to_json(const PatternSetDocument& doc) {
  ordered_json j;
  j["version"] = kDocumentVersion;
  if (doc.seed) j["seed"] = *doc.seed;
  j["start_kind"] = to_string(doc.start_kind);
  auto& ps = j["patterns"] = ordered_json::array();
  for (const auto& p : doc.patterns) ps.push_back(detail::pattern_to_json(p, doc.start_kind));
  return j;
}

inline PatternSetDocument load_pattern_set(const std::filesystem::path& path) {
  try {
    return pattern_set_from_json(detail::parse_json_text(detail::read_file(path), path.string()));
  } catch (const SchemaError& e) {
    throw SchemaError(e.pointer(), e.detail(), path.string());
  }
}

inline void save_pattern_set(const PatternSetDocument& doc, const std::filesystem::path& path) {
  detail::write_atomically(path, pattern_set_to_json(doc).dump(2) + "\n");
}

/// One line per cycle: `cycle<TAB>active_count<TAB>report_list`, where the
/// report list is comma-separated `pattern_id:state` pairs (empty when none).
inline std::string format_trace(const SimulationTrace& trace) {
  std::ostringstream out;
  std::size_t next_report = 0;
  for (std::size_t t = 0; t < trace.cycles; ++t) {
    out << t << '\t' << trace.per_cycle_active[t].size() << '\t';
    bool first = true;
    while (next_report < trace.reports.size() && trace.reports[next_report].cycle == t) {
      const auto& r = trace.reports[next_report++];
      if (!first) out << ',';
      out << r.pattern_id << ':' << r.state;
      first = false;
    }
    out << '\n';
  }
  return out.str();
}

inline ordered_json stats_to_json(const StatsSummary& s) {
  return {{"state_count", s.state_count},   {"transition_count", s.transition_count},
          {"max_fanout", s.max_fanout},     {"avg_fanout", s.avg_fanout},
          {"accept_count", s.accept_count}, {"start_count", s.start_count}};
}

inline ordered_json active_rules_to_json(const ActiveRuleStats& s) {
  ordered_json j;
  j["per_cycle_rule_count"] = s.per_cycle_rule_count;
  j["min_active"] = s.min_active;
  j["max_active"] = s.max_active;
  if (s.start_only_fraction) j["start_only_fraction"] = *s.start_only_fraction;
  else j["start_only_fraction"] = nullptr;
  return j;
}

}  // namespace fawb
