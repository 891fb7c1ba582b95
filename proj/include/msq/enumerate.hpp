#pragma once

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "msq/core.hpp"

namespace msq {

// sum(cells) == target over 1-based cell values.
struct LinearConstraint {
  std::vector<int> cells;
  int target = 0;
};

// value(less) < value(greater); restricts the search to Frenicle forms.
struct CellOrdering {
  int less;
  int greater;
};

inline std::vector<LinearConstraint> family_constraints(const FamilySpec& spec) {
  require_supported(spec);
  const int n = spec.order;
  const int cells = n * n;
  const int m = static_cast<int>(magic_constant(n));
  std::vector<LinearConstraint> out;
  auto add = [&](std::vector<int> c, int target) { out.push_back({std::move(c), target}); };

  auto add_lines = [&] {
    for (int i = 0; i < n; ++i) {
      std::vector<int> row, col;
      for (int j = 0; j < n; ++j) {
        row.push_back(i * n + j);
        col.push_back(j * n + i);
      }
      add(row, m);
      add(col, m);
    }
  };
  auto add_main_diagonals = [&] {
    std::vector<int> d1, d2;
    for (int i = 0; i < n; ++i) {
      d1.push_back(i * n + i);
      d2.push_back(i * n + (n - 1 - i));
    }
    add(d1, m);
    add(d2, m);
  };
  auto add_pairs = [&] {
    for (int k = 0; k < cells / 2; ++k) add({k, cells - 1 - k}, cells + 1);
    if (cells % 2 == 1) add({cells / 2}, (cells + 1) / 2);
  };

  switch (spec.family) {
    case Family::general:
      add_lines();
      add_main_diagonals();
      break;
    case Family::associative:
      add_pairs();
      add_lines();
      add_main_diagonals();
      break;
    case Family::ultra:
      add_pairs();
      add_lines();
      for (int shift = 0; shift < n; ++shift) {
        std::vector<int> down, up;
        for (int i = 0; i < n; ++i) {
          down.push_back(i * n + (i + shift) % n);
          up.push_back(i * n + ((shift - i) % n + n) % n);
        }
        add(down, m);
        add(up, m);
      }
      break;
    case Family::franklin: {
      const auto& opts = spec.franklin;
      const int half = n / 2;
      for (auto [i, j] : block_corners(n, opts.blocks)) {
        const int i1 = (i + 1) % n, j1 = (j + 1) % n;
        add({i * n + j, i * n + j1, i1 * n + j, i1 * n + j1}, 4 * m / n);
      }
      for (int i = 0; i < n; ++i)
        for (int part = 0; part < 2; ++part) {
          std::vector<int> row, col;
          for (int j = part * half; j < (part + 1) * half; ++j) {
            row.push_back(i * n + j);
            col.push_back(j * n + i);
          }
          add(row, m / 2);
          add(col, m / 2);
        }
      for (int orientation = 0; orientation < 4; ++orientation)
        for (int shift = 0; shift < n; ++shift)
          if (opts.wrapped_bent_diagonals || bent_diagonal_fits(n, orientation, shift))
            add(bent_diagonal(n, orientation, shift), m);
      if (opts.main_diagonals) add_main_diagonals();
      break;
    }
  }
  return out;
}

// The Frenicle form puts the smallest corner top-left and orders its two
// neighbours; for distinct values this equals the lexicographic minimum.
inline std::vector<CellOrdering> frenicle_orderings(int n) {
  const int last = n * n - 1;
  return {{0, n - 1}, {0, last - (n - 1)}, {0, last}, {1, n}};
}

// ---------------------------------------------------------------------------
// Static search plan. Cells are visited in a fixed order; a step either
// branches over candidate values or derives its value from cells already
// placed, through an equation implied by the family's linear constraints.

// value = (constant - sum(coef * value[cell])) / divisor
struct AffineFormula {
  long long divisor = 1;
  long long constant = 0;
  std::vector<std::pair<int, long long>> terms;
};

struct SearchStep {
  int cell = 0;
  bool forced = false;
  AffineFormula formula;
  std::vector<std::pair<int, int>> touched;     // (constraint, unassigned cells left after this step)
  std::vector<std::pair<int, bool>> orderings;  // (other cell, this cell must be smaller)
  std::vector<int> lookahead;                   // forced steps whose formula reads this branch cell
};

struct SearchPlan {
  FamilySpec spec;
  int order = 0;
  int cells = 0;
  std::vector<LinearConstraint> constraints;
  std::vector<SearchStep> steps;

  int branch_steps() const {
    return static_cast<int>(std::count_if(steps.begin(), steps.end(),
                                          [](const SearchStep& s) { return !s.forced; }));
  }
};

namespace detail {

class Rational {
 public:
  Rational(long long num = 0, long long den = 1) : num_(num), den_(den) { normalize(); }

  long long num() const { return num_; }
  long long den() const { return den_; }
  bool zero() const { return num_ == 0; }

  friend Rational operator*(Rational a, Rational b) { return make(__int128(a.num_) * b.num_, __int128(a.den_) * b.den_); }
  friend Rational operator/(Rational a, Rational b) { return make(__int128(a.num_) * b.den_, __int128(a.den_) * b.num_); }
  friend Rational operator-(Rational a, Rational b) {
    return make(__int128(a.num_) * b.den_ - __int128(b.num_) * a.den_, __int128(a.den_) * b.den_);
  }

 private:
  static Rational make(__int128 num, __int128 den) {
    if (den < 0) num = -num, den = -den;
    __int128 a = num < 0 ? -num : num, b = den;
    while (b != 0) a = std::exchange(b, a % b);
    if (a > 1) num /= a, den /= a;
    constexpr __int128 limit = std::numeric_limits<long long>::max();
    if (num > limit || -num > limit || den > limit)
      throw Error(ErrorKind::integrity, "constraint elimination overflowed");
    Rational r;
    r.num_ = static_cast<long long>(num);
    r.den_ = static_cast<long long>(den);
    return r;
  }
  void normalize() {
    if (den_ < 0) num_ = -num_, den_ = -den_;
    const long long g = std::gcd(num_, den_);
    if (g > 1) num_ /= g, den_ /= g;
  }

  long long num_;
  long long den_;
};

// Cells whose value the constraints fix once every `known` cell is fixed.
inline std::vector<char> implied_cells(const std::vector<LinearConstraint>& cons, int cells,
                                       const std::vector<char>& known) {
  std::vector<std::vector<double>> rows(cons.size(), std::vector<double>(cells, 0.0));
  for (std::size_t c = 0; c < cons.size(); ++c)
    for (int cell : cons[c].cells)
      if (!known[cell]) rows[c][cell] = 1.0;
  constexpr double eps = 1e-9;
  std::vector<int> pivots;
  std::size_t r = 0;
  for (int col = 0; col < cells && r < rows.size(); ++col) {
    if (known[col]) continue;
    std::size_t p = r;
    for (std::size_t i = r + 1; i < rows.size(); ++i)
      if (std::abs(rows[i][col]) > std::abs(rows[p][col])) p = i;
    if (std::abs(rows[p][col]) < eps) continue;
    std::swap(rows[p], rows[r]);
    const double scale = rows[r][col];
    for (double& x : rows[r]) x /= scale;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == r || std::abs(rows[i][col]) < eps) continue;
      const double f = rows[i][col];
      for (int j = 0; j < cells; ++j) rows[i][j] -= f * rows[r][j];
    }
    pivots.push_back(col);
    ++r;
  }
  std::vector<char> out(cells, 0);
  for (std::size_t i = 0; i < pivots.size(); ++i) {
    bool unit = true;
    for (int j = 0; j < cells && unit; ++j)
      if (j != pivots[i] && std::abs(rows[i][j]) > eps) unit = false;
    if (unit) out[pivots[i]] = 1;
  }
  return out;
}

// Exact equation for each cell in `targets`, in terms of `known` cells only.
inline std::vector<AffineFormula> implied_formulas(const std::vector<LinearConstraint>& cons, int cells,
                                                   const std::vector<char>& known,
                                                   const std::vector<int>& targets) {
  const int width = cells + 1;  // last column holds the target sum
  std::vector<std::vector<Rational>> rows(cons.size(), std::vector<Rational>(width));
  for (std::size_t c = 0; c < cons.size(); ++c) {
    for (int cell : cons[c].cells) rows[c][cell] = Rational(1);
    rows[c][cells] = Rational(cons[c].target);
  }
  std::vector<int> pivot_row(cells, -1);
  std::size_t r = 0;
  for (int col = 0; col < cells && r < rows.size(); ++col) {
    if (known[col]) continue;
    std::size_t p = r;
    while (p < rows.size() && rows[p][col].zero()) ++p;
    if (p == rows.size()) continue;
    std::swap(rows[p], rows[r]);
    const Rational scale = rows[r][col];
    for (auto& x : rows[r]) x = x / scale;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == r || rows[i][col].zero()) continue;
      const Rational f = rows[i][col];
      for (int j = 0; j < width; ++j)
        if (!rows[r][j].zero()) rows[i][j] = rows[i][j] - f * rows[r][j];
    }
    pivot_row[col] = static_cast<int>(r);
    ++r;
  }
  std::vector<AffineFormula> out;
  for (int target : targets) {
    if (pivot_row[target] < 0) throw Error(ErrorKind::integrity, "cell is not implied by the constraints");
    const auto& row = rows[pivot_row[target]];
    long long lcm = 1;
    for (int j = 0; j < width; ++j) {
      if (j != target && j < cells && !known[j] && !row[j].zero())
        throw Error(ErrorKind::integrity, "cell is not implied by the constraints");
      if (!row[j].zero()) lcm = std::lcm(lcm, row[j].den());
    }
    AffineFormula f;
    f.divisor = lcm;
    f.constant = row[cells].num() * (lcm / row[cells].den());
    for (int j = 0; j < cells; ++j)
      if (known[j] && !row[j].zero()) f.terms.emplace_back(j, row[j].num() * (lcm / row[j].den()));
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace detail

// Branch cells are chosen greedily to maximise the number of cells they
// imply; implied cells follow their last branch cell immediately.
inline SearchPlan make_plan(const FamilySpec& spec) {
  SearchPlan plan;
  plan.spec = spec;
  plan.order = spec.order;
  plan.cells = spec.order * spec.order;
  plan.constraints = family_constraints(spec);
  const int cells = plan.cells;

  std::vector<SearchStep> steps;
  std::vector<char> known(cells, 0);
  int placed = 0;
  while (placed < cells) {
    int best = -1, best_gain = -1;
    for (int cell = 0; cell < cells; ++cell) {
      if (known[cell]) continue;
      auto trial = known;
      trial[cell] = 1;
      const auto implied = detail::implied_cells(plan.constraints, cells, trial);
      const int gain = static_cast<int>(std::count(implied.begin(), implied.end(), 1));
      if (gain > best_gain) best = cell, best_gain = gain;
    }
    SearchStep branch;
    branch.cell = best;
    steps.push_back(branch);
    known[best] = 1;
    ++placed;

    const auto implied = detail::implied_cells(plan.constraints, cells, known);
    std::vector<int> group;
    for (int cell = 0; cell < cells; ++cell)
      if (implied[cell]) group.push_back(cell);
    const auto formulas = detail::implied_formulas(plan.constraints, cells, known, group);
    for (std::size_t k = 0; k < group.size(); ++k) {
      SearchStep step;
      step.cell = group[k];
      step.forced = true;
      step.formula = formulas[k];
      steps.push_back(std::move(step));
      known[group[k]] = 1;
      ++placed;
    }
  }

  std::vector<int> position(cells);
  for (int s = 0; s < cells; ++s) position[steps[s].cell] = s;
  std::vector<int> open(plan.constraints.size());
  for (std::size_t c = 0; c < plan.constraints.size(); ++c)
    open[c] = static_cast<int>(plan.constraints[c].cells.size());
  const auto orderings = frenicle_orderings(plan.order);
  for (int s = 0; s < cells; ++s) {
    auto& step = steps[s];
    for (int c = 0; c < static_cast<int>(plan.constraints.size()); ++c) {
      const auto& cc = plan.constraints[c].cells;
      if (std::find(cc.begin(), cc.end(), step.cell) != cc.end()) step.touched.emplace_back(c, --open[c]);
    }
    for (const auto& o : orderings) {
      if (o.less == step.cell && position[o.greater] < s) step.orderings.emplace_back(o.greater, true);
      if (o.greater == step.cell && position[o.less] < s) step.orderings.emplace_back(o.less, false);
    }
  }
  for (int s = 0; s < cells; ++s) {
    if (steps[s].forced) continue;
    for (int t = s + 1; t < cells && steps[t].forced; ++t)
      for (auto [cell, coef] : steps[t].formula.terms)
        if (cell == steps[s].cell) steps[s].lookahead.push_back(t);
  }
  plan.steps = std::move(steps);
  return plan;
}

// ---------------------------------------------------------------------------

// A subtree of the search: the values of the first prefix.size() plan steps.
struct SearchTask {
  std::vector<int> prefix;
  friend bool operator==(const SearchTask&, const SearchTask&) = default;
};

struct Checkpoint {
  FamilySpec spec;
  int granularity = 1;
  std::vector<SearchTask> completed;
  std::uint64_t count = 0;
};

struct EnumerationReport {
  FamilySpec spec;
  std::uint64_t total_count = 0;
  double elapsed_seconds = 0.0;
  std::uint64_t nodes = 0;
  int workers = 1;
  int granularity = 1;
  std::size_t tasks = 0;
};

// Version tag of the orbit convention, recorded in output metadata.
inline constexpr std::string_view canonical_form_version = "lexmin-rowmajor-d4/1";

inline std::string config_fingerprint(const FamilySpec& spec) {
  std::string out = std::string(to_string(spec.family)) + "-" + std::to_string(spec.order) + ";" +
                    std::string(canonical_form_version);
  if (spec.family == Family::franklin) {
    out += ";diagonals=" + std::string(spec.franklin.main_diagonals ? "on" : "off");
    out += ";blocks=" + std::string(to_string(spec.franklin.blocks));
    out += ";bent=" + std::string(spec.franklin.wrapped_bent_diagonals ? "wrapped" : "inner");
  }
  return out;
}

class PartialResultError : public Error {
 public:
  PartialResultError(Checkpoint checkpoint, std::vector<Square> squares)
      : Error(ErrorKind::partial_result,
              "node budget exhausted after " + std::to_string(checkpoint.completed.size()) +
                  " completed tasks"),
        checkpoint_(std::move(checkpoint)),
        squares_(std::move(squares)) {}

  const Checkpoint& checkpoint() const noexcept { return checkpoint_; }
  // Squares found by the completed tasks, sorted.
  const std::vector<Square>& squares() const noexcept { return squares_; }

 private:
  Checkpoint checkpoint_;
  std::vector<Square> squares_;
};

namespace detail {

class Searcher {
 public:
  explicit Searcher(const SearchPlan& plan)
      : plan_(plan), top_(plan.cells), partial_(plan.constraints.size(), 0) {}

  std::uint64_t nodes() const noexcept { return nodes_; }

  // Calls visit(values) for every consistent assignment of steps [0, depth).
  template <typename Visit>
  void run(const std::vector<int>& prefix, int depth, Visit&& visit) {
    const int start = static_cast<int>(prefix.size());
    int s = 0;
    for (; s < start; ++s) {
      if (!admissible(s, prefix[s]) || !place(s, prefix[s])) break;
    }
    if (s == start) descend(start, std::min(depth, plan_.cells), visit);
    while (s > 0) unplace(--s);
  }

 private:
  bool admissible(int s, int v) const {
    if (v < 1 || v > top_ || (used_ >> (v - 1)) & 1) return false;
    const auto& step = plan_.steps[s];
    if (step.forced && (!implied_value(step.formula) || v != *implied_value(step.formula))) return false;
    for (auto [other, smaller] : step.orderings)
      if (smaller ? v > values_[other] : v < values_[other]) return false;
    return true;
  }

  std::optional<int> implied_value(const AffineFormula& f) const {
    long long num = f.constant;
    for (auto [cell, coef] : f.terms) num -= coef * values_[cell];
    if (num % f.divisor != 0) return std::nullopt;
    return static_cast<int>(num / f.divisor);
  }

  // Values x in `cand` for which (rest - coef * x) / divisor is an unused value.
  std::uint64_t implied_free(long long rest, long long coef, long long divisor, std::uint64_t cand) const {
    const std::uint64_t free = ~used_ & full_mask();
    if (coef == divisor || coef == -divisor) {
      if (rest % divisor != 0) return 0;
      const long long base = rest / divisor;
      // coef == -divisor: y = base + x, so x = y - base
      // coef == divisor:  y = base - x, so x = base - y (mirror the mask)
      const std::uint64_t mask = coef < 0 ? shift(free, -base) : shift(reverse_bits(free), base - 65);
      return mask & cand;
    }
    std::uint64_t out = 0;
    for (std::uint64_t rem = cand; rem; rem &= rem - 1) {
      const int x = std::countr_zero(rem) + 1;
      const long long num = rest - coef * x;
      if (num % divisor != 0) continue;
      const long long y = num / divisor;
      if (y >= 1 && y <= top_ && (free >> (y - 1)) & 1) out |= std::uint64_t{1} << (x - 1);
    }
    return out;
  }

  static std::uint64_t shift(std::uint64_t mask, long long by) {
    if (by >= 64 || by <= -64) return 0;
    return by >= 0 ? mask << by : mask >> -by;
  }

  static std::uint64_t reverse_bits(std::uint64_t x) {
    x = ((x >> 1) & 0x5555555555555555ULL) | ((x & 0x5555555555555555ULL) << 1);
    x = ((x >> 2) & 0x3333333333333333ULL) | ((x & 0x3333333333333333ULL) << 2);
    x = ((x >> 4) & 0x0F0F0F0F0F0F0F0FULL) | ((x & 0x0F0F0F0F0F0F0F0FULL) << 4);
    x = ((x >> 8) & 0x00FF00FF00FF00FFULL) | ((x & 0x00FF00FF00FF00FFULL) << 8);
    x = ((x >> 16) & 0x0000FFFF0000FFFFULL) | ((x & 0x0000FFFF0000FFFFULL) << 16);
    return (x >> 32) | (x << 32);
  }

  // Sum of the r smallest (largest) values still unused.
  int low_sum(int r) const {
    std::uint64_t free = ~used_ & full_mask();
    int sum = 0;
    while (r-- > 0) {
      sum += std::countr_zero(free) + 1;
      free &= free - 1;
    }
    return sum;
  }
  int high_sum(int r) const {
    std::uint64_t free = ~used_ & full_mask();
    int sum = 0;
    while (r-- > 0) {
      const int hi = 63 - std::countl_zero(free);
      sum += hi + 1;
      free &= ~(std::uint64_t{1} << hi);
    }
    return sum;
  }
  std::uint64_t full_mask() const {
    return top_ == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << top_) - 1;
  }

  // Assigns v to step s; false (with state restored) on a violated constraint.
  bool place(int s, int v) {
    const auto& step = plan_.steps[s];
    values_[step.cell] = v;
    used_ |= std::uint64_t{1} << (v - 1);
    for (auto [c, left] : step.touched) partial_[c] += v;
    for (auto [c, left] : step.touched) {
      const int need = plan_.constraints[c].target - partial_[c];
      if (left == 0 ? need != 0 : need < low_sum(left) || need > high_sum(left)) {
        unplace(s);
        return false;
      }
    }
    return true;
  }

  void unplace(int s) {
    const auto& step = plan_.steps[s];
    const int v = values_[step.cell];
    for (auto [c, left] : step.touched) partial_[c] -= v;
    used_ &= ~(std::uint64_t{1} << (v - 1));
  }

  template <typename Visit>
  void descend(int s, int depth, Visit& visit) {
    ++nodes_;
    if (s == depth) {
      visit(values_, plan_);
      return;
    }
    const auto& step = plan_.steps[s];
    if (step.forced) {
      const auto v = implied_value(step.formula);
      if (v && admissible(s, *v) && place(s, *v)) {
        descend(s + 1, depth, visit);
        unplace(s);
      }
      return;
    }
    int lo = 1, hi = top_;
    for (auto [other, smaller] : step.orderings) {
      if (smaller) hi = std::min(hi, values_[other] - 1);
      else lo = std::max(lo, values_[other] + 1);
    }
    for (auto [c, left] : step.touched) {
      const int need = plan_.constraints[c].target - partial_[c];
      if (left == 0) {
        lo = std::max(lo, need);
        hi = std::min(hi, need);
      } else {
        lo = std::max(lo, need - high_sum(left));
        hi = std::min(hi, need - low_sum(left));
      }
    }
    if (lo > hi) return;
    std::uint64_t cand = ~used_ & full_mask();
    cand &= hi == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << hi) - 1;
    cand &= ~((std::uint64_t{1} << (lo - 1)) - 1);
    for (int t : step.lookahead) {
      const auto& f = plan_.steps[t].formula;
      long long rest = f.constant, coef = 0;
      for (auto [cell, c] : f.terms) {
        if (cell == step.cell) coef = c;
        else rest -= c * values_[cell];
      }
      cand &= implied_free(rest, coef, f.divisor, cand);
      if (!cand) return;
    }
    while (cand) {
      const int v = std::countr_zero(cand) + 1;
      cand &= cand - 1;
      if (place(s, v)) {
        descend(s + 1, depth, visit);
        unplace(s);
      }
    }
  }

  const SearchPlan& plan_;
  int top_;
  std::vector<int> partial_;
  std::array<int, max_cells> values_{};
  std::uint64_t used_ = 0;
  std::uint64_t nodes_ = 0;
};

inline Square to_square(const std::array<int, max_cells>& values, int order) {
  std::array<std::uint8_t, max_cells> cells{};
  for (int k = 0; k < order * order; ++k) cells[k] = static_cast<std::uint8_t>(values[k]);
  return Square::from_trusted(order, {cells.data(), static_cast<std::size_t>(order * order)});
}

}  // namespace detail

// Disjoint subtrees covering the whole search. Granularity 1 is the single
// root task; granularity g > 1 fixes the first g plan steps (clamped to the
// plan depth).
inline std::vector<SearchTask> partition_tasks(const SearchPlan& plan, int granularity) {
  if (granularity < 1) throw Error(ErrorKind::usage, "granularity must be >= 1");
  if (granularity == 1) return {SearchTask{}};
  const int depth = std::min(granularity, plan.cells);
  std::vector<SearchTask> tasks;
  detail::Searcher searcher(plan);
  searcher.run({}, depth, [&](const std::array<int, max_cells>& values, const SearchPlan& p) {
    SearchTask task;
    for (int s = 0; s < depth; ++s) task.prefix.push_back(values[p.steps[s].cell]);
    tasks.push_back(std::move(task));
  });
  return tasks;
}

inline std::vector<SearchTask> partition_tasks(const FamilySpec& spec, int granularity) {
  return partition_tasks(make_plan(spec), granularity);
}

// Squares of one subtree, unsorted.
inline std::vector<Square> run_task(const SearchPlan& plan, const SearchTask& task,
                                    std::uint64_t* nodes = nullptr) {
  std::vector<Square> out;
  detail::Searcher searcher(plan);
  searcher.run(task.prefix, plan.cells, [&](const std::array<int, max_cells>& values, const SearchPlan& p) {
    out.push_back(detail::to_square(values, p.order));
  });
  if (nodes) *nodes += searcher.nodes();
  return out;
}

struct EnumerateOptions {
  int workers = 1;
  int granularity = 0;  // 0 = pick per family
  std::optional<std::uint64_t> node_budget;
  const Checkpoint* resume = nullptr;
};

inline int default_granularity(const SearchPlan& plan) {
  return std::min(plan.cells, plan.order <= 4 ? 2 : 6);
}

struct EnumerationResult {
  std::vector<Square> squares;  // Frenicle forms, ascending
  EnumerationReport report;
};

inline EnumerationResult enumerate_family(const FamilySpec& spec, const EnumerateOptions& options = {}) {
  const auto started = std::chrono::steady_clock::now();
  const SearchPlan plan = make_plan(spec);
  const int granularity = options.resume      ? options.resume->granularity
                          : options.granularity > 0 ? options.granularity
                                                    : default_granularity(plan);
  if (options.resume && !(options.resume->spec == spec))
    throw Error(ErrorKind::integrity, "checkpoint was written for a different family configuration");

  const auto tasks = partition_tasks(plan, granularity);
  std::vector<char> skip(tasks.size(), 0);
  std::uint64_t prior_count = 0;
  if (options.resume) {
    prior_count = options.resume->count;
    for (const auto& done : options.resume->completed) {
      auto it = std::find(tasks.begin(), tasks.end(), done);
      if (it == tasks.end()) throw Error(ErrorKind::integrity, "checkpoint task not part of this search");
      skip[it - tasks.begin()] = 1;
    }
  }

  std::vector<std::vector<Square>> results(tasks.size());
  std::vector<char> finished(tasks.size(), 0);
  std::atomic<std::size_t> next{0};
  std::atomic<std::uint64_t> nodes{0};
  std::atomic<bool> exhausted{false};

  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= tasks.size()) return;
      if (skip[k]) continue;
      if (options.node_budget && nodes.load() >= *options.node_budget) {
        exhausted = true;
        return;
      }
      std::uint64_t used = 0;
      results[k] = run_task(plan, tasks[k], &used);
      nodes += used;
      finished[k] = 1;
    }
  };
  const int workers = std::max(1, options.workers);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  std::vector<Square> squares;
  for (std::size_t k = 0; k < tasks.size(); ++k)
    if (finished[k]) squares.insert(squares.end(), results[k].begin(), results[k].end());
  std::sort(squares.begin(), squares.end(), [](const Square& a, const Square& b) {
    return std::lexicographical_compare(a.cells().begin(), a.cells().end(), b.cells().begin(),
                                        b.cells().end());
  });

  if (exhausted) {
    Checkpoint cp;
    cp.spec = spec;
    cp.granularity = granularity;
    cp.count = prior_count + squares.size();
    for (std::size_t k = 0; k < tasks.size(); ++k)
      if (finished[k] || skip[k]) cp.completed.push_back(tasks[k]);
    throw PartialResultError(std::move(cp), std::move(squares));
  }

  EnumerationResult result;
  result.report.spec = spec;
  result.report.total_count = prior_count + squares.size();
  result.report.nodes = nodes.load();
  result.report.workers = workers;
  result.report.granularity = granularity;
  result.report.tasks = tasks.size();
  result.report.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  result.squares = std::move(squares);
  return result;
}

}  // namespace msq
