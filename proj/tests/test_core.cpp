#include <gtest/gtest.h>

#include <set>

#include "msq/core.hpp"
#include "oracles.hpp"

using namespace msq;

namespace {

const Square lo_shu{{2, 7, 6}, {9, 5, 1}, {4, 3, 8}};
const Square durer{{16, 3, 2, 13}, {5, 10, 11, 8}, {9, 6, 7, 12}, {4, 15, 14, 1}};
const Square pandiagonal5{{1, 15, 24, 8, 17}, {23, 7, 16, 5, 14}, {20, 4, 13, 22, 6},
                          {12, 21, 10, 19, 3}, {9, 18, 2, 11, 25}};
const Square franklin_1750{{52, 61, 4, 13, 20, 29, 36, 45}, {14, 3, 62, 51, 46, 35, 30, 19},
                           {53, 60, 5, 12, 21, 28, 37, 44}, {11, 6, 59, 54, 43, 38, 27, 22},
                           {55, 58, 7, 10, 23, 26, 39, 42}, {9, 8, 57, 56, 41, 40, 25, 24},
                           {50, 63, 2, 15, 18, 31, 34, 47}, {16, 1, 64, 49, 48, 33, 32, 17}};

oracle::Grid as_grid(const Square& sq) { return oracle::grid(sq.order(), sq.values()); }

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::usage;
}

}  // namespace

TEST(MagicConstant, ClosedForm) {
  EXPECT_EQ(magic_constant(3), 15);
  EXPECT_EQ(magic_constant(4), 34);
  EXPECT_EQ(magic_constant(5), 65);
  EXPECT_EQ(magic_constant(8), 260);
  EXPECT_EQ(kind_of([] { magic_constant(0); }), ErrorKind::invalid_order);
}

TEST(MagicConstant, Parity) {
  for (int n : {4, 8}) EXPECT_EQ(magic_constant(n) % 2, 0);
  for (int n : {3, 5}) EXPECT_EQ(magic_constant(n) % 2, 1);
}

TEST(Square, RejectsDuplicatesAndRange) {
  EXPECT_EQ(kind_of([] { Square({{2, 7, 6}, {9, 5, 1}, {4, 3, 9}}); }), ErrorKind::malformed_square);
  EXPECT_EQ(kind_of([] { Square({{2, 7, 6}, {9, 5, 1}, {4, 3, 10}}); }), ErrorKind::malformed_square);
  EXPECT_EQ(kind_of([] { Square({{1, 2}, {3, 4, 5}}); }), ErrorKind::malformed_square);
  EXPECT_NO_THROW(Square(3, std::vector<int>{2, 7, 6, 9, 5, 1, 4, 3, 8}));
}

TEST(Square, CellsAreAPermutation) {
  for (const Square& sq : {lo_shu, durer, pandiagonal5, franklin_1750}) {
    auto v = sq.values();
    std::sort(v.begin(), v.end());
    for (int k = 0; k < sq.size(); ++k) EXPECT_EQ(v[k], k + 1);
  }
}

TEST(Predicates, LoShu) {
  EXPECT_TRUE(is_magic(lo_shu));
  EXPECT_TRUE(is_associative(lo_shu));
  EXPECT_FALSE(is_pandiagonal(lo_shu));
  Square swapped{{7, 2, 6}, {9, 5, 1}, {4, 3, 8}};
  EXPECT_FALSE(is_magic(swapped));
}

TEST(Predicates, Durer) {
  EXPECT_TRUE(is_magic(durer));
  EXPECT_TRUE(is_associative(durer));
  EXPECT_FALSE(is_pandiagonal(durer));
  EXPECT_FALSE(oracle::pandiagonal(as_grid(durer)));
}

TEST(Predicates, PandiagonalFive) {
  ASSERT_TRUE(oracle::pandiagonal(as_grid(pandiagonal5)));
  EXPECT_TRUE(is_magic(pandiagonal5));
  EXPECT_TRUE(is_pandiagonal(pandiagonal5));
  EXPECT_EQ(is_associative(pandiagonal5), oracle::associative(as_grid(pandiagonal5)));
}

TEST(Predicates, AgreeWithOracleOnAllOrderFourSquares) {
  const auto all = oracle::all_magic_squares(4);
  ASSERT_EQ(all.size(), 7040u);
  int assoc = 0;
  for (const auto& cells : all) {
    const Square sq(4, cells);
    const auto g = oracle::grid(4, cells);
    ASSERT_TRUE(is_magic(sq));
    ASSERT_EQ(is_associative(sq), oracle::associative(g));
    ASSERT_EQ(is_pandiagonal(sq), oracle::pandiagonal(g));
    assoc += is_associative(sq);
  }
  EXPECT_EQ(assoc, 48 * 8);
}

namespace {

// Direct check of the historical square: every half-line is 130, every bent
// diagonal (all 32, shifted cyclically) is 260, every 2x2 window (wrapping)
// is 130.
bool franklin_by_hand(const Square& sq) {
  const int n = 8;
  for (int i = 0; i < n; ++i)
    for (int h = 0; h < 2; ++h) {
      int r = 0, c = 0;
      for (int k = 0; k < 4; ++k) r += sq.at(i, 4 * h + k), c += sq.at(4 * h + k, i);
      if (r != 130 || c != 130) return false;
    }
  for (int s = 0; s < n; ++s) {
    int sums[4] = {0, 0, 0, 0};
    for (int k = 0; k < n; ++k) {
      const int depth = k < 4 ? k : 7 - k;
      const int down = (s + depth) % n, up = (s - depth + n) % n;
      sums[0] += sq.at(down, k);
      sums[1] += sq.at(up, k);
      sums[2] += sq.at(k, down);
      sums[3] += sq.at(k, up);
    }
    for (int v : sums)
      if (v != 260) return false;
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (sq.at(i, j) + sq.at(i, (j + 1) % n) + sq.at((i + 1) % n, j) + sq.at((i + 1) % n, (j + 1) % n) != 130)
        return false;
  return true;
}

}  // namespace

TEST(Franklin, HistoricalSquare) {
  ASSERT_TRUE(franklin_by_hand(franklin_1750));
  FranklinOptions opts;
  opts.main_diagonals = false;
  EXPECT_TRUE(is_franklin(franklin_1750, opts));
  for (auto blocks : {BlockMode::aligned, BlockMode::overlapping, BlockMode::wrapped}) {
    opts.blocks = blocks;
    EXPECT_TRUE(is_franklin(franklin_1750, opts));
  }
  opts.main_diagonals = true;
  EXPECT_FALSE(is_franklin(franklin_1750, opts));
  EXPECT_FALSE(is_magic(franklin_1750));

  auto cells = franklin_1750.values();
  std::swap(cells[0], cells[9]);
  const Square swapped(8, cells);
  EXPECT_FALSE(franklin_by_hand(swapped));
  opts.main_diagonals = false;
  EXPECT_FALSE(is_franklin(swapped, opts));
}

TEST(Franklin, DurerAndOddOrders) {
  EXPECT_FALSE(is_franklin(durer, {}));
  EXPECT_EQ(kind_of([] { is_franklin(pandiagonal5, {}); }), ErrorKind::unsupported_order);
}

TEST(Franklin, Geometry) {
  EXPECT_EQ(block_corners(8, BlockMode::aligned).size(), 16u);
  EXPECT_EQ(block_corners(8, BlockMode::overlapping).size(), 49u);
  EXPECT_EQ(block_corners(8, BlockMode::wrapped).size(), 64u);
  for (int o = 0; o < 4; ++o)
    for (int s = 0; s < 8; ++s) {
      const auto cells = bent_diagonal(8, o, s);
      ASSERT_EQ(cells.size(), 8u);
      EXPECT_EQ(std::set<int>(cells.begin(), cells.end()).size(), 8u);
    }
}

TEST(D4, MatchesRotationMirrorOracle) {
  std::set<std::vector<int>> ours, theirs;
  for (auto t : all_d4) ours.insert(apply_d4(durer, t).values());
  for (const auto& g : oracle::orbit(as_grid(durer))) theirs.insert(oracle::flat(g));
  EXPECT_EQ(ours, theirs);
  EXPECT_EQ(ours.size(), 8u);
  EXPECT_EQ(apply_d4(lo_shu, D4Transform::identity), lo_shu);
  EXPECT_EQ(apply_d4(durer, D4Transform::rot90).values(), oracle::flat(oracle::rotate_cw(as_grid(durer))));
}

TEST(D4, GroupLaws) {
  for (auto a : all_d4) {
    EXPECT_EQ(compose(a, D4Transform::identity), a);
    EXPECT_EQ(compose(D4Transform::identity, a), a);
    int inverses = 0;
    for (auto b : all_d4) {
      const auto ab = compose(a, b);
      EXPECT_EQ(apply_d4(apply_d4(durer, a), b), apply_d4(durer, ab));
      inverses += ab == D4Transform::identity;
      for (auto c : all_d4) EXPECT_EQ(compose(compose(a, b), c), compose(a, compose(b, c)));
    }
    EXPECT_EQ(inverses, 1);
  }
}

TEST(D4, PredicatesInvariant) {
  for (const Square& sq : {lo_shu, durer, pandiagonal5}) {
    for (auto t : all_d4) {
      const Square img = apply_d4(sq, t);
      EXPECT_EQ(is_magic(img), is_magic(sq));
      EXPECT_EQ(is_associative(img), is_associative(sq));
      EXPECT_EQ(is_pandiagonal(img), is_pandiagonal(sq));
    }
  }
}

TEST(Frenicle, LexminOverOrbit) {
  EXPECT_EQ(frenicle_form(durer).values(), oracle::lexmin_image(durer.values(), 4));
  EXPECT_EQ(frenicle_form(frenicle_form(durer)), frenicle_form(durer));
  for (auto t : all_d4) EXPECT_EQ(frenicle_form(apply_d4(durer, t)), frenicle_form(durer));
  const Square min_lo_shu = frenicle_form(lo_shu);
  EXPECT_EQ(min_lo_shu.values(), (std::vector<int>{2, 7, 6, 9, 5, 1, 4, 3, 8}));
  EXPECT_EQ(frenicle_form(min_lo_shu), min_lo_shu);
}

TEST(Complement, Examples) {
  EXPECT_EQ(complement(lo_shu), (Square{{8, 3, 4}, {1, 5, 9}, {6, 7, 2}}));
  for (const Square& sq : {lo_shu, durer, pandiagonal5, franklin_1750}) {
    EXPECT_EQ(complement(complement(sq)), sq);
    EXPECT_EQ(is_magic(complement(sq)), is_magic(sq));
    EXPECT_EQ(is_associative(complement(sq)), is_associative(sq));
  }
}

TEST(Family, ParseAndSupport) {
  EXPECT_EQ(parse_family("ultra"), Family::ultra);
  EXPECT_EQ(kind_of([] { parse_family("bimagic"); }), ErrorKind::unsupported_family);
  EXPECT_TRUE(is_supported({Family::general, 4}));
  EXPECT_TRUE(is_supported({Family::franklin, 8}));
  EXPECT_FALSE(is_supported({Family::general, 6}));
  EXPECT_FALSE(is_supported({Family::ultra, 4}));
  EXPECT_EQ(kind_of([] { require_supported({Family::general, 6}); }), ErrorKind::unsupported_family);
  EXPECT_TRUE(is_member(pandiagonal5, {Family::general, 5}) || !is_magic(pandiagonal5));
  EXPECT_TRUE(is_member(durer, {Family::associative, 4}));
}
