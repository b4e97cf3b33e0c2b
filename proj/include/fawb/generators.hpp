#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "fawb/automaton.hpp"
#include "fawb/regex.hpp"

namespace fawb {

/// splitmix64 (Steele, Lea and Flood). Every seeded generator in the library
/// draws from this stream so outputs are identical on every platform.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform integer in [0, bound) by rejection; bound must be positive.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (true) {
      const std::uint64_t x = next();
      if (x >= threshold) return x % bound;
    }
  }

  /// Uniform double in [0, 1) from the top 53 bits.
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

/// Symbol `i` of a generated alphabet: lowercase letters for alphabets of at
/// most 26 symbols, raw byte values otherwise.
inline std::uint8_t alphabet_symbol(std::size_t i, std::size_t alphabet_size) {
  return alphabet_size <= 26 ? static_cast<std::uint8_t>('a' + i) : static_cast<std::uint8_t>(i);
}

struct RegexSource {
  std::string text;
  bool operator==(const RegexSource&) const = default;
};

struct DotStarSource {
  std::string prefix;
  std::string suffix;
  bool operator==(const DotStarSource&) const = default;
};

struct HammingSource {
  std::string pattern;
  std::size_t distance = 0;
  bool operator==(const HammingSource&) const = default;
};

struct LevenshteinSource {
  std::string pattern;
  std::size_t distance = 0;
  bool operator==(const LevenshteinSource&) const = default;
};

/// Tabakov-Vardi style random automaton recipe.
struct RandomRecipe {
  std::size_t n = 1;           // states
  double r = 1.0;              // per-symbol transition density
  double f = 0.5;              // acceptance density
  std::size_t alphabet_size = 2;
  std::uint64_t seed = 0;
  bool operator==(const RandomRecipe&) const = default;
};

using PatternSource = std::variant<RegexSource, DotStarSource, HammingSource, LevenshteinSource, RandomRecipe>;

/// One rule of a pattern set.
struct Pattern {
  int id = 0;
  PatternSource source;
  StartKind start_kind = StartKind::StartOfData;
  bool operator==(const Pattern&) const = default;
};

namespace detail {

inline std::string escape_literal(std::string_view bytes) {
  std::string out;
  for (unsigned char b : bytes) append_literal_char(out, b);
  return out;
}

inline void set_single_start(Automaton& a, StartKind kind) {
  a.starts.clear();
  a.starts[0] = kind;
}

inline void require_pattern(std::string_view pattern, std::size_t d, const char* op) {
  if (pattern.empty()) throw std::invalid_argument(std::string(op) + ": pattern must be non-empty");
  if (d > pattern.size()) throw std::invalid_argument(std::string(op) + ": distance exceeds pattern length");
}

}  // namespace detail

inline std::string dotstar_regex(const DotStarSource& s) {
  return detail::escape_literal(s.prefix) + ".*" + detail::escape_literal(s.suffix);
}

/// `k` patterns of shape P.*S with P and S drawn from the first
/// `alphabet_size` symbols. Patterns are pairwise distinct and carry ids 0..k-1.
inline std::vector<Pattern> gen_dotstar(std::size_t k, std::size_t prefix_len, std::size_t suffix_len,
                                        std::size_t alphabet_size, std::uint64_t seed,
                                        StartKind start_kind = StartKind::StartOfData) {
  if (prefix_len < 1 || suffix_len < 1) throw std::invalid_argument("gen_dotstar: lengths must be >= 1");
  if (alphabet_size < 1 || alphabet_size > 256) throw std::invalid_argument("gen_dotstar: alphabet size out of range");
  const double space = std::pow(static_cast<double>(alphabet_size), static_cast<double>(prefix_len + suffix_len));
  if (static_cast<double>(k) > space) throw std::invalid_argument("gen_dotstar: not enough distinct patterns");
  SplitMix64 rng(seed);
  auto draw = [&](std::size_t len) {
    std::string s;
    for (std::size_t i = 0; i < len; ++i)
      s.push_back(static_cast<char>(alphabet_symbol(rng.below(alphabet_size), alphabet_size)));
    return s;
  };
  std::vector<Pattern> out;
  std::set<std::pair<std::string, std::string>> seen;
  while (out.size() < k) {
    DotStarSource src{draw(prefix_len), draw(suffix_len)};
    if (!seen.insert({src.prefix, src.suffix}).second) continue;
    out.push_back({static_cast<int>(out.size()), src, start_kind});
  }
  return out;
}

/// Hamming mesh: state (i, e) means i pattern bytes consumed with e
/// mismatches. Only reachable cells (e <= i) are materialized; state 0 is
/// (0, 0) and the result is deterministic and acyclic.
inline Automaton gen_hamming(std::string_view pattern, std::size_t d) {
  detail::require_pattern(pattern, d, "gen_hamming");
  const std::size_t m = pattern.size();
  std::vector<std::vector<StateId>> id(m + 1, std::vector<StateId>(d + 1, 0));
  Automaton a;
  for (std::size_t i = 0; i <= m; ++i)
    for (std::size_t e = 0; e <= std::min(i, d); ++e) id[i][e] = a.add_state();
  for (std::size_t i = 0; i < m; ++i) {
    const auto b = static_cast<std::uint8_t>(pattern[i]);
    for (std::size_t e = 0; e <= std::min(i, d); ++e) {
      a.add_edge(id[i][e], SymbolClass::single(b), id[i + 1][e]);
      if (e < d) a.add_edge(id[i][e], ~SymbolClass::single(b), id[i + 1][e + 1]);
    }
  }
  for (std::size_t e = 0; e <= std::min(m, d); ++e) a.accepts.insert(id[m][e]);
  detail::set_single_start(a, StartKind::StartOfData);
  a.deterministic = true;
  return a;
}

/// Levenshtein mesh over the full (m+1) x (d+1) grid: matches keep the error
/// row, substitutions and insertions consume any byte and move down one
/// row, deletions are epsilon edges moving diagonally down.
inline Automaton gen_levenshtein(std::string_view pattern, std::size_t d) {
  detail::require_pattern(pattern, d, "gen_levenshtein");
  const std::size_t m = pattern.size();
  auto id = [&](std::size_t i, std::size_t e) { return static_cast<StateId>(e * (m + 1) + i); };
  Automaton a;
  a.state_count = (m + 1) * (d + 1);
  for (std::size_t e = 0; e <= d; ++e) {
    for (std::size_t i = 0; i <= m; ++i) {
      if (i < m) a.add_edge(id(i, e), SymbolClass::single(static_cast<std::uint8_t>(pattern[i])), id(i + 1, e));
      if (e < d) {
        a.add_edge(id(i, e), SymbolClass::all(), id(i, e + 1));
        if (i < m) {
          a.add_edge(id(i, e), SymbolClass::all(), id(i + 1, e + 1));
          a.add_epsilon(id(i, e), id(i + 1, e + 1));
        }
      }
    }
    a.accepts.insert(id(m, e));
  }
  detail::set_single_start(a, StartKind::StartOfData);
  return a;
}

/// Random automaton: for every symbol exactly round(r*n) distinct (src, dst)
/// pairs, round(f*n) distinct accepting states, state 0 as the only start.
inline Automaton gen_random_automaton(const RandomRecipe& recipe) {
  const std::size_t n = recipe.n;
  if (n < 1) throw std::invalid_argument("gen_random_automaton: n must be >= 1");
  if (!(recipe.r > 0.0)) throw std::invalid_argument("gen_random_automaton: r must be positive");
  if (!(recipe.f >= 0.0 && recipe.f <= 1.0)) throw std::invalid_argument("gen_random_automaton: f must lie in [0, 1]");
  if (recipe.alphabet_size < 1 || recipe.alphabet_size > 256)
    throw std::invalid_argument("gen_random_automaton: alphabet size out of range");
  const auto per_symbol = static_cast<std::uint64_t>(std::llround(recipe.r * static_cast<double>(n)));
  const std::uint64_t pairs = static_cast<std::uint64_t>(n) * n;
  if (per_symbol > pairs) throw std::invalid_argument("gen_random_automaton: r*n exceeds n^2");
  const auto accept_count = static_cast<std::uint64_t>(std::llround(recipe.f * static_cast<double>(n)));

  SplitMix64 rng(recipe.seed);
  // Floyd's sampling of `count` distinct values from [0, universe).
  auto sample = [&](std::uint64_t count, std::uint64_t universe) {
    std::set<std::uint64_t> chosen;
    for (std::uint64_t j = universe - count; j < universe; ++j) {
      const std::uint64_t t = rng.below(j + 1);
      if (!chosen.insert(t).second) chosen.insert(j);
    }
    return chosen;
  };

  Automaton a;
  a.state_count = n;
  for (std::size_t sym = 0; sym < recipe.alphabet_size; ++sym) {
    const auto cls = SymbolClass::single(alphabet_symbol(sym, recipe.alphabet_size));
    for (auto p : sample(per_symbol, pairs))
      a.add_edge(static_cast<StateId>(p / n), cls, static_cast<StateId>(p % n));
  }
  for (auto s : sample(accept_count, n)) a.accepts.insert(static_cast<StateId>(s));
  detail::set_single_start(a, StartKind::StartOfData);
  return a;
}

/// Random regex text of nesting depth at most `depth` over the first
/// `alphabet_size` letters (at most 26).
inline std::string gen_random_regex(std::size_t depth, std::size_t alphabet_size, std::uint64_t seed) {
  if (alphabet_size < 1 || alphabet_size > 26) throw std::invalid_argument("gen_random_regex: alphabet size must be 1..26");
  SplitMix64 rng(seed);
  auto letter = [&]() { return static_cast<char>('a' + rng.below(alphabet_size)); };
  auto leaf = [&]() -> std::string {
    const auto pick = rng.below(10);
    if (pick < 7 || alphabet_size < 2) return std::string(1, letter());
    if (pick < 9) {
      std::set<char> members;
      const auto size = 2 + rng.below(std::min<std::size_t>(alphabet_size, 3) - 1);
      while (members.size() < size) members.insert(letter());
      return "[" + std::string(members.begin(), members.end()) + "]";
    }
    return ".";
  };
  auto gen = [&](auto& self, std::size_t d) -> std::string {
    if (d == 0) return leaf();
    switch (rng.below(8)) {
      case 0:
      case 1: {
        std::string s;
        const auto parts = 2 + rng.below(2);
        for (std::uint64_t i = 0; i < parts; ++i) s += self(self, d - 1);
        return s;
      }
      case 2: return "(" + self(self, d - 1) + "|" + self(self, d - 1) + ")";
      case 3: return "(" + self(self, d - 1) + ")*";
      case 4: return "(" + self(self, d - 1) + ")+";
      case 5: return "(" + self(self, d - 1) + ")?";
      case 6: {
        const auto lo = rng.below(3);
        const auto hi = lo + rng.below(2);
        return "(" + self(self, d - 1) + "){" + std::to_string(lo) + "," + std::to_string(hi) + "}";
      }
      default: return leaf();
    }
  };
  return gen(gen, depth);
}

/// `count` random byte strings with lengths in [min_len, max_len] over the
/// first `alphabet_size` symbols.
inline std::vector<std::string> gen_random_strings(std::size_t count, std::size_t min_len, std::size_t max_len,
                                                   std::size_t alphabet_size, std::uint64_t seed) {
  if (min_len > max_len) throw std::invalid_argument("gen_random_strings: min_len > max_len");
  SplitMix64 rng(seed);
  std::vector<std::string> out;
  for (std::size_t k = 0; k < count; ++k) {
    const auto len = min_len + rng.below(max_len - min_len + 1);
    std::string s;
    for (std::size_t i = 0; i < len; ++i)
      s.push_back(static_cast<char>(alphabet_symbol(rng.below(alphabet_size), alphabet_size)));
    out.push_back(std::move(s));
  }
  return out;
}

enum class MeshKind { Hamming, Levenshtein };

/// `count` mesh patterns over random strings (see gen_random_strings), ids
/// 0..count-1. The distance is clamped to each pattern's length.
inline std::vector<Pattern> gen_mesh_set(MeshKind kind, std::size_t count, std::size_t min_len, std::size_t max_len,
                                         std::size_t d, std::size_t alphabet_size, std::uint64_t seed,
                                         StartKind start_kind = StartKind::StartOfData) {
  if (min_len < 1) throw std::invalid_argument("gen_mesh_set: lengths must be >= 1");
  if (alphabet_size < 1 || alphabet_size > 256) throw std::invalid_argument("gen_mesh_set: alphabet size out of range");
  std::vector<Pattern> out;
  const auto strings = gen_random_strings(count, min_len, max_len, alphabet_size, seed);
  for (std::size_t i = 0; i < strings.size(); ++i) {
    const auto dist = std::min(d, strings[i].size());
    PatternSource src = kind == MeshKind::Hamming ? PatternSource{HammingSource{strings[i], dist}}
                                                  : PatternSource{LevenshteinSource{strings[i], dist}};
    out.push_back({static_cast<int>(i), std::move(src), start_kind});
  }
  return out;
}

/// `count` random regexes (see gen_random_regex), ids 0..count-1.
inline std::vector<Pattern> gen_regex_set(std::size_t count, std::size_t depth, std::size_t alphabet_size,
                                          std::uint64_t seed, StartKind start_kind = StartKind::StartOfData) {
  SplitMix64 rng(seed);
  std::vector<Pattern> out;
  for (std::size_t i = 0; i < count; ++i)
    out.push_back({static_cast<int>(i), RegexSource{gen_random_regex(depth, alphabet_size, rng.next())}, start_kind});
  return out;
}

/// Builds the NFA for one pattern, applying its start kind to the start state.
inline Automaton build_pattern(const Pattern& p) {
  Automaton a = std::visit(
      [&](const auto& src) -> Automaton {
        using T = std::decay_t<decltype(src)>;
        if constexpr (std::is_same_v<T, RegexSource>) return compile_regex(src.text, p.start_kind);
        else if constexpr (std::is_same_v<T, DotStarSource>) return compile_regex(dotstar_regex(src), p.start_kind);
        else if constexpr (std::is_same_v<T, HammingSource>) return gen_hamming(src.pattern, src.distance);
        else if constexpr (std::is_same_v<T, LevenshteinSource>) return gen_levenshtein(src.pattern, src.distance);
        else return gen_random_automaton(src);
      },
      p.source);
  detail::set_single_start(a, p.start_kind);
  if (p.start_kind != StartKind::StartOfData) a.deterministic = false;
  return a;
}

/// Size axis used when plotting per-pattern results.
inline double pattern_size(const Pattern& p) {
  return std::visit(
      [](const auto& src) -> double {
        using T = std::decay_t<decltype(src)>;
        if constexpr (std::is_same_v<T, RegexSource>) return static_cast<double>(regex_size(src.text));
        else if constexpr (std::is_same_v<T, DotStarSource>)
          return static_cast<double>(src.prefix.size() + src.suffix.size() + 1);
        else if constexpr (std::is_same_v<T, HammingSource> || std::is_same_v<T, LevenshteinSource>)
          return static_cast<double>(src.pattern.size());
        else return static_cast<double>(src.n);
      },
      p.source);
}

}  // namespace fawb
