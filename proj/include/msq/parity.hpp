#pragma once

#include <bit>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>

#include "msq/core.hpp"

namespace msq {

// n x n binary matrix, bit (row * n + col) set iff the cell is odd.
class ParityMatrix {
 public:
  ParityMatrix() = default;
  ParityMatrix(int order, std::uint64_t bits) : order_(order), bits_(bits) {
    if (order < 1 || order > max_order)
      throw Error(ErrorKind::invalid_order, "pattern order " + std::to_string(order) + " outside 1.." +
                                                std::to_string(max_order));
    const int cells = order * order;
    if (cells < 64 && (bits >> cells) != 0)
      throw Error(ErrorKind::malformed_pattern, "bits set beyond the grid");
  }

  int order() const noexcept { return order_; }
  int size() const noexcept { return order_ * order_; }
  std::uint64_t bits() const noexcept { return bits_; }
  bool at(int row, int col) const noexcept { return (bits_ >> (row * order_ + col)) & 1; }
  bool operator[](int index) const noexcept { return (bits_ >> index) & 1; }
  int popcount() const noexcept { return std::popcount(bits_); }

  ParityMatrix operator~() const {
    const int cells = size();
    const std::uint64_t mask = cells == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << cells) - 1;
    return {order_, ~bits_ & mask};
  }

  // Orders like the row-major 0/1 string.
  std::uint64_t lex_key() const noexcept {
    std::uint64_t key = 0;
    for (int k = 0; k < size(); ++k) key = (key << 1) | ((bits_ >> k) & 1);
    return key;
  }

  friend bool operator==(const ParityMatrix&, const ParityMatrix&) = default;

 private:
  int order_ = 0;
  std::uint64_t bits_ = 0;
};

inline ParityMatrix to_parity(const Square& sq) {
  std::uint64_t bits = 0;
  for (int k = 0; k < sq.size(); ++k)
    if (sq[k] & 1) bits |= std::uint64_t{1} << k;
  return {sq.order(), bits};
}

inline std::string pattern_string(const ParityMatrix& pm) {
  std::string out(pm.size(), '0');
  for (int k = 0; k < pm.size(); ++k)
    if (pm[k]) out[k] = '1';
  return out;
}

inline ParityMatrix parse_pattern(std::string_view text, int order) {
  if (order < 1 || order > max_order)
    throw Error(ErrorKind::invalid_order, "pattern order " + std::to_string(order) + " unsupported");
  if (static_cast<int>(text.size()) != order * order)
    throw Error(ErrorKind::malformed_pattern, "pattern '" + std::string(text) + "' has length " +
                                                  std::to_string(text.size()) + ", expected " +
                                                  std::to_string(order * order));
  std::uint64_t bits = 0;
  for (std::size_t k = 0; k < text.size(); ++k) {
    if (text[k] == '1') bits |= std::uint64_t{1} << k;
    else if (text[k] != '0')
      throw Error(ErrorKind::malformed_pattern, "pattern contains '" + std::string(1, text[k]) + "'");
  }
  return {order, bits};
}

// Order from a pattern length, which must be a perfect square.
inline int pattern_order(std::string_view text) {
  for (int n = 1; n <= max_order; ++n)
    if (static_cast<int>(text.size()) == n * n) return n;
  throw Error(ErrorKind::malformed_pattern, "pattern length " + std::to_string(text.size()) +
                                                " is not the area of a supported grid");
}

inline ParityMatrix apply_d4(const ParityMatrix& pm, D4Transform t) {
  const int n = pm.order();
  std::uint64_t bits = 0;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      if (pm[d4_source(t, n, r, c)]) bits |= std::uint64_t{1} << (r * n + c);
  return {n, bits};
}

inline ParityMatrix d4_canonical_pattern(const ParityMatrix& pm) {
  ParityMatrix best = pm;
  std::uint64_t best_key = pm.lex_key();
  for (D4Transform t : all_d4) {
    const ParityMatrix img = apply_d4(pm, t);
    const std::uint64_t key = img.lex_key();
    if (key < best_key) best = img, best_key = key;
  }
  return best;
}

// ---------------------------------------------------------------------------

enum class TallyMode { raw, d4_canonical };

constexpr std::string_view to_string(TallyMode m) { return m == TallyMode::raw ? "raw" : "class"; }

inline TallyMode parse_tally_mode(std::string_view name) {
  if (name == "raw") return TallyMode::raw;
  if (name == "class" || name == "d4-canonical") return TallyMode::d4_canonical;
  throw Error(ErrorKind::usage, "unknown tally mode '" + std::string(name) + "'");
}

struct PatternTally {
  TallyMode mode = TallyMode::raw;
  int order = 0;
  std::string family;
  std::map<std::string, std::uint64_t> entries;  // pattern string -> squares
  std::uint64_t total = 0;

  void add(const ParityMatrix& pm, std::uint64_t count = 1) {
    if (order == 0) order = pm.order();
    if (pm.order() != order)
      throw Error(ErrorKind::mixed_order, "pattern of order " + std::to_string(pm.order()) +
                                              " in a tally of order " + std::to_string(order));
    const ParityMatrix key = mode == TallyMode::raw ? pm : d4_canonical_pattern(pm);
    entries[pattern_string(key)] += count;
    total += count;
  }

  // Combines per-worker partial tallies; commutative and associative.
  void merge(const PatternTally& other) {
    for (const auto& [pattern, count] : other.entries) add(parse_pattern(pattern, other.order), count);
  }

  friend bool operator==(const PatternTally&, const PatternTally&) = default;
};

inline PatternTally tally_patterns(std::span<const Square> squares, TallyMode mode,
                                   std::string_view family = {}) {
  PatternTally tally;
  tally.mode = mode;
  tally.family = std::string(family);
  for (const Square& sq : squares) {
    if (tally.order != 0 && sq.order() != tally.order)
      throw Error(ErrorKind::mixed_order, "square of order " + std::to_string(sq.order()) +
                                              " after squares of order " + std::to_string(tally.order));
    tally.add(to_parity(sq));
  }
  return tally;
}

// Collapses a raw tally onto D4 classes.
inline PatternTally canonicalize(const PatternTally& raw) {
  PatternTally out;
  out.mode = TallyMode::d4_canonical;
  out.order = raw.order;
  out.family = raw.family;
  for (const auto& [pattern, count] : raw.entries) out.add(parse_pattern(pattern, raw.order), count);
  return out;
}

}  // namespace msq
