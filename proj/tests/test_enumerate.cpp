#include <gtest/gtest.h>

#include <set>

#include "msq/enumerate.hpp"
#include "oracles.hpp"

using namespace msq;

namespace {

std::vector<std::vector<int>> values_of(const std::vector<Square>& squares) {
  std::vector<std::vector<int>> out;
  for (const auto& sq : squares) out.push_back(sq.values());
  return out;
}

// Orbit representatives by post-filtering the full oracle list.
std::vector<std::vector<int>> oracle_representatives(int n, bool need_associative) {
  std::vector<std::vector<int>> out;
  for (const auto& cells : oracle::all_magic_squares(n)) {
    if (need_associative && !oracle::associative(oracle::grid(n, cells))) continue;
    if (oracle::lexmin_image(cells, n) == cells) out.push_back(cells);
  }
  return out;
}

std::size_t count(FamilySpec spec) { return enumerate_family(spec).squares.size(); }

}  // namespace

TEST(Enumerate, SmallCorpusCounts) {
  EXPECT_EQ(count({Family::general, 3}), 1u);
  EXPECT_EQ(count({Family::general, 4}), 880u);
  EXPECT_EQ(count({Family::associative, 4}), 48u);
  EXPECT_EQ(count({Family::ultra, 5}), 16u);
}

TEST(Enumerate, AssociativeFive) { EXPECT_EQ(count({Family::associative, 5}), 48544u); }

TEST(Enumerate, MatchesPostFilteredOracle) {
  EXPECT_EQ(values_of(enumerate_family({Family::general, 3}).squares), oracle_representatives(3, false));
  EXPECT_EQ(values_of(enumerate_family({Family::general, 4}).squares), oracle_representatives(4, false));
  EXPECT_EQ(values_of(enumerate_family({Family::associative, 4}).squares), oracle_representatives(4, true));
}

TEST(Enumerate, SoundCanonicalSortedUnique) {
  for (FamilySpec spec : {FamilySpec{Family::general, 4}, FamilySpec{Family::associative, 5},
                          FamilySpec{Family::ultra, 5}}) {
    const auto squares = enumerate_family(spec).squares;
    std::set<std::vector<int>> seen;
    for (std::size_t k = 0; k < squares.size(); ++k) {
      const Square& sq = squares[k];
      ASSERT_TRUE(is_member(sq, spec));
      ASSERT_EQ(frenicle_form(sq), sq);
      ASSERT_TRUE(seen.insert(sq.values()).second);
      if (k) ASSERT_LT(squares[k - 1].values(), sq.values());
    }
  }
}

TEST(Enumerate, AssociativeClosedUnderComplement) {
  for (int n : {4, 5}) {
    const auto squares = enumerate_family({Family::associative, n}).squares;
    const std::set<Square> all(squares.begin(), squares.end());
    for (const auto& sq : squares) ASSERT_TRUE(all.count(frenicle_form(complement(sq))));
  }
}

TEST(Enumerate, UnsupportedPair) {
  try {
    enumerate_family({Family::general, 6});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::unsupported_family);
  }
}

TEST(Partition, GranularityOneIsRoot) {
  const auto tasks = partition_tasks(FamilySpec{Family::general, 4}, 1);
  ASSERT_EQ(tasks.size(), 1u);
  EXPECT_TRUE(tasks[0].prefix.empty());
}

TEST(Partition, TasksPartitionTheSolutions) {
  const FamilySpec spec{Family::general, 4};
  const auto plan = make_plan(spec);
  const auto full = values_of(enumerate_family(spec, {.granularity = 1}).squares);
  for (int g : {2, 3, 5, 1000}) {
    const auto tasks = partition_tasks(plan, g);
    std::set<std::vector<int>> prefixes;
    std::vector<std::vector<int>> merged;
    for (const auto& t : tasks) {
      EXPECT_TRUE(prefixes.insert(t.prefix).second);
      for (const auto& sq : run_task(plan, t)) merged.push_back(sq.values());
    }
    std::sort(merged.begin(), merged.end());
    EXPECT_EQ(merged, full) << "granularity " << g;
  }
}

TEST(Partition, WorkerCountDoesNotChangeOutput) {
  const FamilySpec spec{Family::associative, 5};
  const auto one = enumerate_family(spec, {.workers = 1}).squares;
  const auto four = enumerate_family(spec, {.workers = 4}).squares;
  EXPECT_EQ(one, four);
}

TEST(Checkpoint, BudgetThenResume) {
  const FamilySpec spec{Family::associative, 5};
  const auto full = enumerate_family(spec).squares;
  EnumerateOptions first;
  first.node_budget = 200000;
  std::vector<Square> collected;
  Checkpoint cp;
  try {
    enumerate_family(spec, first);
    FAIL() << "budget not enforced";
  } catch (const PartialResultError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::partial_result);
    cp = e.checkpoint();
    collected = e.squares();
  }
  ASSERT_FALSE(cp.completed.empty());
  EXPECT_EQ(cp.count, collected.size());
  EXPECT_LT(collected.size(), full.size());

  EnumerateOptions second;
  second.resume = &cp;
  const auto rest = enumerate_family(spec, second);
  EXPECT_EQ(rest.report.total_count, full.size());
  collected.insert(collected.end(), rest.squares.begin(), rest.squares.end());
  std::sort(collected.begin(), collected.end());
  EXPECT_EQ(collected, full);
}

TEST(Checkpoint, RejectsForeignCheckpoint) {
  Checkpoint cp;
  cp.spec = {Family::general, 4};
  cp.granularity = 2;
  EnumerateOptions opts;
  opts.resume = &cp;
  EXPECT_THROW(enumerate_family({Family::associative, 4}, opts), Error);
}

TEST(Plan, FranklinFreeDimension) {
  FamilySpec spec{Family::franklin, 8};
  EXPECT_EQ(make_plan(spec).branch_steps(), 8);
  spec.franklin.main_diagonals = false;
  EXPECT_EQ(make_plan(spec).branch_steps(), 9);
}

TEST(Plan, EveryCellPlacedOnce) {
  for (FamilySpec spec : {FamilySpec{Family::general, 4}, FamilySpec{Family::associative, 5},
                          FamilySpec{Family::franklin, 8}}) {
    const auto plan = make_plan(spec);
    std::set<int> cells;
    for (const auto& step : plan.steps) cells.insert(step.cell);
    EXPECT_EQ(static_cast<int>(cells.size()), spec.order * spec.order);
  }
}

TEST(Constraints, LinesOfFamilies) {
  EXPECT_EQ(family_constraints({Family::general, 4}).size(), 10u);
  const auto assoc = family_constraints({Family::associative, 5});
  EXPECT_EQ(assoc.size(), 12u + 12u + 1u);
  const auto orderings = frenicle_orderings(4);
  EXPECT_EQ(orderings.size(), 4u);
}
