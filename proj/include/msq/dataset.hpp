#pragma once

#include <span>
#include <string>
#include <vector>

#include "msq/core.hpp"
#include "msq/parity.hpp"
#include "msq/stats.hpp"

namespace msq {

// One row per square: its parity bits as 0/1 reals, multiplicity preserved.
inline DataMatrix parity_dataset(std::span<const Square> squares) {
  DataMatrix data;
  if (squares.empty()) return data;
  const int cells = squares.front().size();
  data.values = Matrix(squares.size(), static_cast<std::size_t>(cells));
  data.patterns.reserve(squares.size());
  for (std::size_t r = 0; r < squares.size(); ++r) {
    if (squares[r].size() != cells) throw Error(ErrorKind::mixed_order, "dataset rows differ in order");
    const auto pm = to_parity(squares[r]);
    for (int c = 0; c < cells; ++c) data.values(r, c) = pm[c] ? 1.0 : 0.0;
    data.patterns.push_back(pattern_string(pm));
  }
  return data;
}

// D4 class of each square's parity pattern, as the canonical pattern string.
inline std::vector<std::string> class_labels(std::span<const Square> squares) {
  std::vector<std::string> labels;
  labels.reserve(squares.size());
  for (const Square& sq : squares) labels.push_back(pattern_string(d4_canonical_pattern(to_parity(sq))));
  return labels;
}

}  // namespace msq
