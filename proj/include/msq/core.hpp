#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "msq/error.hpp"

namespace msq {

inline constexpr int max_order = 8;
inline constexpr int max_cells = max_order * max_order;

constexpr long long magic_constant(int n) {
  if (n < 1) throw Error(ErrorKind::invalid_order, "order must be >= 1, got " + std::to_string(n));
  const long long m = n;
  return m * (m * m + 1) / 2;
}

// An order-n grid holding a permutation of 1..n*n, row-major.
class Square {
 public:
  Square() = default;

  Square(int order, std::span<const int> values) : order_(order) {
    if (order < 3 || order > max_order)
      throw Error(ErrorKind::invalid_order, "square order " + std::to_string(order) + " outside 3.." +
                                                std::to_string(max_order));
    const int cells = order * order;
    if (static_cast<int>(values.size()) != cells)
      throw Error(ErrorKind::malformed_square, "expected " + std::to_string(cells) + " cells, got " +
                                                   std::to_string(values.size()));
    std::uint64_t seen = 0;
    for (int k = 0; k < cells; ++k) {
      const int v = values[k];
      if (v < 1 || v > cells)
        throw Error(ErrorKind::malformed_square, "cell value " + std::to_string(v) + " out of range 1.." +
                                                     std::to_string(cells));
      const std::uint64_t bit = std::uint64_t{1} << (v - 1);
      if (seen & bit) throw Error(ErrorKind::malformed_square, "duplicate cell value " + std::to_string(v));
      seen |= bit;
      cells_[k] = static_cast<std::uint8_t>(v);
    }
  }

  Square(int order, std::initializer_list<int> values)
      : Square(order, std::span<const int>(values.begin(), values.size())) {}

  Square(std::initializer_list<std::initializer_list<int>> rows)
      : Square(static_cast<int>(rows.size()), flatten(rows)) {}

  int order() const noexcept { return order_; }
  int size() const noexcept { return order_ * order_; }
  int at(int row, int col) const noexcept { return cells_[row * order_ + col]; }
  int operator[](int index) const noexcept { return cells_[index]; }

  std::span<const std::uint8_t> cells() const noexcept {
    return {cells_.data(), static_cast<std::size_t>(size())};
  }

  std::vector<int> values() const { return {cells_.begin(), cells_.begin() + size()}; }

  // Bypasses validation; callers guarantee a permutation of 1..n*n.
  static Square from_trusted(int order, std::span<const std::uint8_t> values) {
    Square sq;
    sq.order_ = order;
    std::copy(values.begin(), values.end(), sq.cells_.begin());
    return sq;
  }

  friend bool operator==(const Square&, const Square&) = default;
  friend auto operator<=>(const Square&, const Square&) = default;

 private:
  static std::vector<int> flatten(std::initializer_list<std::initializer_list<int>> rows) {
    std::vector<int> out;
    for (const auto& r : rows) {
      if (r.size() != rows.size())
        throw Error(ErrorKind::malformed_square, "grid is not square");
      out.insert(out.end(), r.begin(), r.end());
    }
    return out;
  }

  int order_ = 0;
  std::array<std::uint8_t, max_cells> cells_{};
};

enum class Family { general, associative, ultra, franklin };

constexpr std::string_view to_string(Family f) {
  switch (f) {
    case Family::general: return "general";
    case Family::associative: return "associative";
    case Family::ultra: return "ultra";
    case Family::franklin: return "franklin";
  }
  return "unknown";
}

inline Family parse_family(std::string_view name) {
  if (name == "general") return Family::general;
  if (name == "associative") return Family::associative;
  if (name == "ultra") return Family::ultra;
  if (name == "franklin") return Family::franklin;
  throw Error(ErrorKind::unsupported_family, "unknown family '" + std::string(name) + "'");
}

// Which 2x2 windows a Franklin square must balance.
enum class BlockMode {
  aligned,      // the n*n/4 non-overlapping blocks
  overlapping,  // all (n-1)^2 windows inside the grid
  wrapped,      // all n^2 windows, torus wrap-around
};

constexpr std::string_view to_string(BlockMode m) {
  switch (m) {
    case BlockMode::aligned: return "aligned";
    case BlockMode::overlapping: return "overlapping";
    case BlockMode::wrapped: return "wrapped";
  }
  return "unknown";
}

inline BlockMode parse_block_mode(std::string_view name) {
  if (name == "aligned") return BlockMode::aligned;
  if (name == "overlapping") return BlockMode::overlapping;
  if (name == "wrapped") return BlockMode::wrapped;
  throw Error(ErrorKind::usage, "unknown block mode '" + std::string(name) + "'");
}

struct FranklinOptions {
  // Defaults reproduce the published order-8 corpus of 368,640 squares.
  bool main_diagonals = true;
  BlockMode blocks = BlockMode::wrapped;
  bool wrapped_bent_diagonals = true;

  friend bool operator==(const FranklinOptions&, const FranklinOptions&) = default;
};

struct FamilySpec {
  Family family = Family::general;
  int order = 4;
  FranklinOptions franklin{};

  friend bool operator==(const FamilySpec&, const FamilySpec&) = default;
};

constexpr bool is_supported(const FamilySpec& spec) {
  switch (spec.family) {
    case Family::general: return spec.order == 3 || spec.order == 4;
    case Family::associative: return spec.order == 4 || spec.order == 5;
    case Family::ultra: return spec.order == 5;
    case Family::franklin: return spec.order == 8;
  }
  return false;
}

inline void require_supported(const FamilySpec& spec) {
  if (!is_supported(spec))
    throw Error(ErrorKind::unsupported_family, "unsupported family/order pair (" +
                                                   std::string(to_string(spec.family)) + ", " +
                                                   std::to_string(spec.order) + ")");
}

// ---------------------------------------------------------------------------
// Dihedral group of the square

enum class D4Transform : std::uint8_t {
  identity,
  rot90,
  rot180,
  rot270,
  flip_horizontal,  // mirror left-right
  flip_vertical,    // mirror top-bottom
  flip_main_diagonal,
  flip_anti_diagonal,
};

inline constexpr std::array<D4Transform, 8> all_d4 = {
    D4Transform::identity,        D4Transform::rot90,         D4Transform::rot180,
    D4Transform::rot270,          D4Transform::flip_horizontal, D4Transform::flip_vertical,
    D4Transform::flip_main_diagonal, D4Transform::flip_anti_diagonal,
};

constexpr std::string_view to_string(D4Transform t) {
  switch (t) {
    case D4Transform::identity: return "identity";
    case D4Transform::rot90: return "rot90";
    case D4Transform::rot180: return "rot180";
    case D4Transform::rot270: return "rot270";
    case D4Transform::flip_horizontal: return "flip-horizontal";
    case D4Transform::flip_vertical: return "flip-vertical";
    case D4Transform::flip_main_diagonal: return "flip-main-diagonal";
    case D4Transform::flip_anti_diagonal: return "flip-anti-diagonal";
  }
  return "unknown";
}

// Source cell read by output cell (row, col) under t (rot90 is clockwise).
constexpr int d4_source(D4Transform t, int n, int row, int col) {
  const int m = n - 1;
  switch (t) {
    case D4Transform::identity: return row * n + col;
    case D4Transform::rot90: return (m - col) * n + row;
    case D4Transform::rot180: return (m - row) * n + (m - col);
    case D4Transform::rot270: return col * n + (m - row);
    case D4Transform::flip_horizontal: return row * n + (m - col);
    case D4Transform::flip_vertical: return (m - row) * n + col;
    case D4Transform::flip_main_diagonal: return col * n + row;
    case D4Transform::flip_anti_diagonal: return (m - col) * n + (m - row);
  }
  return row * n + col;
}

// Transform equal to applying `first` and then `second`.
inline D4Transform compose(D4Transform first, D4Transform second) {
  constexpr int n = 3;
  for (D4Transform c : all_d4) {
    bool same = true;
    for (int r = 0; r < n && same; ++r)
      for (int col = 0; col < n && same; ++col) {
        const int mid = d4_source(second, n, r, col);
        same = d4_source(first, n, mid / n, mid % n) == d4_source(c, n, r, col);
      }
    if (same) return c;
  }
  return D4Transform::identity;  // unreachable: D4 is closed
}

inline Square apply_d4(const Square& sq, D4Transform t) {
  const int n = sq.order();
  std::array<std::uint8_t, max_cells> out{};
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) out[r * n + c] = sq.cells()[d4_source(t, n, r, c)];
  return Square::from_trusted(n, {out.data(), static_cast<std::size_t>(n * n)});
}

// Orbit representative: the D4 image with the smallest row-major sequence.
inline Square frenicle_form(const Square& sq) {
  Square best = sq;
  for (D4Transform t : all_d4) {
    Square img = apply_d4(sq, t);
    if (std::lexicographical_compare(img.cells().begin(), img.cells().end(), best.cells().begin(),
                                     best.cells().end()))
      best = img;
  }
  return best;
}

// The D4 image whose top-left cell is the smallest corner and whose cell
// (0, tie) is smaller than (tie, 0). tie = 1 gives frenicle_form.
inline Square corner_form(const Square& sq, int tie) {
  const int n = sq.order();
  if (tie < 1 || tie >= n) throw Error(ErrorKind::usage, "tie cell must lie in 1.." + std::to_string(n - 1));
  for (D4Transform t : all_d4) {
    Square img = apply_d4(sq, t);
    const int corner = img.at(0, 0);
    if (corner <= img.at(0, n - 1) && corner <= img.at(n - 1, 0) && corner <= img.at(n - 1, n - 1) &&
        img.at(0, tie) < img.at(tie, 0))
      return img;
  }
  return sq;
}

inline Square complement(const Square& sq) {
  const int n = sq.order();
  const int top = n * n + 1;
  std::array<std::uint8_t, max_cells> out{};
  for (int k = 0; k < n * n; ++k) out[k] = static_cast<std::uint8_t>(top - sq[k]);
  return Square::from_trusted(n, {out.data(), static_cast<std::size_t>(n * n)});
}

// ---------------------------------------------------------------------------
// Predicates

inline bool is_magic(const Square& sq) {
  const int n = sq.order();
  const long long m = magic_constant(n);
  long long d1 = 0, d2 = 0;
  for (int i = 0; i < n; ++i) {
    long long row = 0, col = 0;
    for (int j = 0; j < n; ++j) {
      row += sq.at(i, j);
      col += sq.at(j, i);
    }
    if (row != m || col != m) return false;
    d1 += sq.at(i, i);
    d2 += sq.at(i, n - 1 - i);
  }
  return d1 == m && d2 == m;
}

inline bool is_associative(const Square& sq) {
  const int n = sq.order();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (sq.at(i, j) + sq.at(n - 1 - i, n - 1 - j) != n * n + 1) return false;
  return true;
}

inline bool is_pandiagonal(const Square& sq) {
  const int n = sq.order();
  const long long m = magic_constant(n);
  for (int shift = 0; shift < n; ++shift) {
    long long down = 0, up = 0;
    for (int i = 0; i < n; ++i) {
      down += sq.at(i, (i + shift) % n);
      up += sq.at(i, ((shift - i) % n + n) % n);
    }
    if (down != m || up != m) return false;
  }
  return true;
}

inline bool is_ultra(const Square& sq) { return is_associative(sq) && is_pandiagonal(sq); }

// Cells of one bent diagonal. orientation: 0 = V (arms rise toward both
// edges from a bottom apex), 1 = inverted V, 2 and 3 = the transposed pair.
// The first arm starts at row (or column) `shift`, wrapping cyclically.
inline std::vector<int> bent_diagonal(int n, int orientation, int shift) {
  std::vector<int> cells;
  cells.reserve(n);
  const int half = n / 2;
  for (int k = 0; k < n; ++k) {
    const int step = k < half ? k : n - 1 - k;
    const int offset = orientation % 2 == 0 ? shift + step : shift - step;
    const int along = ((offset % n) + n) % n;
    cells.push_back(orientation < 2 ? along * n + k : k * n + along);
  }
  return cells;
}

// True when the bent diagonal stays inside the grid without wrapping.
constexpr bool bent_diagonal_fits(int n, int orientation, int shift) {
  const int reach = n / 2 - 1;
  return orientation % 2 == 0 ? shift + reach <= n - 1 : shift - reach >= 0;
}

// Top-left corners of the 2x2 windows checked under `mode`.
inline std::vector<std::pair<int, int>> block_corners(int n, BlockMode mode) {
  std::vector<std::pair<int, int>> out;
  switch (mode) {
    case BlockMode::aligned:
      for (int i = 0; i < n; i += 2)
        for (int j = 0; j < n; j += 2) out.emplace_back(i, j);
      break;
    case BlockMode::overlapping:
      for (int i = 0; i + 1 < n; ++i)
        for (int j = 0; j + 1 < n; ++j) out.emplace_back(i, j);
      break;
    case BlockMode::wrapped:
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out.emplace_back(i, j);
      break;
  }
  return out;
}

inline bool is_franklin(const Square& sq, const FranklinOptions& opts) {
  const int n = sq.order();
  if (n % 4 != 0)
    throw Error(ErrorKind::unsupported_order,
                "Franklin properties need order divisible by 4, got " + std::to_string(n));
  const long long m = magic_constant(n);
  const int half = n / 2;
  for (int i = 0; i < n; ++i)
    for (int part = 0; part < 2; ++part) {
      long long row = 0, col = 0;
      for (int j = part * half; j < (part + 1) * half; ++j) {
        row += sq.at(i, j);
        col += sq.at(j, i);
      }
      if (2 * row != m || 2 * col != m) return false;
    }
  for (int orientation = 0; orientation < 4; ++orientation)
    for (int shift = 0; shift < n; ++shift) {
      if (!opts.wrapped_bent_diagonals && !bent_diagonal_fits(n, orientation, shift)) continue;
      long long sum = 0;
      for (int cell : bent_diagonal(n, orientation, shift)) sum += sq[cell];
      if (sum != m) return false;
    }
  for (auto [i, j] : block_corners(n, opts.blocks)) {
    const int i1 = (i + 1) % n, j1 = (j + 1) % n;
    const long long sum = sq.at(i, j) + sq.at(i, j1) + sq.at(i1, j) + sq.at(i1, j1);
    if (sum * n != 4 * m) return false;
  }
  if (opts.main_diagonals) {
    long long d1 = 0, d2 = 0;
    for (int i = 0; i < n; ++i) {
      d1 += sq.at(i, i);
      d2 += sq.at(i, n - 1 - i);
    }
    if (d1 != m || d2 != m) return false;
  }
  return true;
}

// Magic (when the family implies it) plus the family's defining predicate.
inline bool is_member(const Square& sq, const FamilySpec& spec) {
  if (sq.order() != spec.order) return false;
  switch (spec.family) {
    case Family::general: return is_magic(sq);
    case Family::associative: return is_magic(sq) && is_associative(sq);
    case Family::ultra: return is_magic(sq) && is_ultra(sq);
    case Family::franklin:
      return is_franklin(sq, spec.franklin) && (!spec.franklin.main_diagonals || is_magic(sq));
  }
  return false;
}

}  // namespace msq
