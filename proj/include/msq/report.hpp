#pragma once

#include <algorithm>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "msq/dataset.hpp"
#include "msq/enumerate.hpp"
#include "msq/io.hpp"
#include "msq/parity.hpp"
#include "msq/reference.hpp"
#include "msq/stats.hpp"

namespace msq {

inline std::string corpus_key(const FamilySpec& spec) {
  return std::string(to_string(spec.family)) + "-" + std::to_string(spec.order);
}

// The six corpora in the order the summary tables list them.
inline std::vector<FamilySpec> standard_corpora() {
  return {{Family::general, 3}, {Family::associative, 4}, {Family::general, 4},
          {Family::ultra, 5},   {Family::associative, 5}, {Family::franklin, 8}};
}

// Orientation of the squares behind each published per-pattern table, as the
// tie cell of corner_form. Raw tallies depend on which orbit member stands for
// the orbit; class tallies do not.
inline std::optional<int> table_tie_cell(const FamilySpec& spec) {
  if (spec.family == Family::general && spec.order == 4) return 1;
  if (spec.family == Family::associative && spec.order == 5) return 4;
  if (spec.family == Family::franklin && spec.order == 8) return 2;
  return std::nullopt;
}

inline std::vector<Square> reoriented(std::span<const Square> squares, int tie) {
  std::vector<Square> out;
  out.reserve(squares.size());
  for (const Square& sq : squares) out.push_back(corner_form(sq, tie));
  return out;
}

// Default fraction of the projected bounding-box diagonal used as link distance.
inline constexpr double region_link_fraction = 0.05;

namespace detail {

inline std::vector<std::uint64_t> sorted_counts(const PatternTally& t) {
  std::vector<std::uint64_t> out;
  for (const auto& [p, c] : t.entries) out.push_back(c);
  std::sort(out.begin(), out.end());
  return out;
}

template <typename Range>
std::vector<std::uint64_t> sorted_copy(const Range& r) {
  std::vector<std::uint64_t> out(r.begin(), r.end());
  std::sort(out.begin(), out.end());
  return out;
}

inline std::optional<ParityMatrix> try_parse(std::string_view s, int order) {
  try {
    return parse_pattern(s, order);
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace detail

// Published class strings vs the enumerated D4 classes.
inline nlohmann::ordered_json reconcile_classes(const reference::PublishedClassRow& row,
                                                const PatternTally& classes) {
  nlohmann::ordered_json entries = nlohmann::ordered_json::array();
  std::size_t matched = 0;
  for (auto published : row.patterns) {
    nlohmann::ordered_json e;
    e["published"] = published;
    const auto pm = detail::try_parse(published, classes.order);
    if (!pm) {
      e["status"] = "malformed";
    } else {
      const auto canonical = pattern_string(d4_canonical_pattern(*pm));
      const auto it = classes.entries.find(canonical);
      e["canonical"] = canonical;
      if (it != classes.entries.end()) {
        e["status"] = "matched";
        e["count"] = it->second;
        ++matched;
      } else {
        e["status"] = "not-found";
      }
    }
    entries.push_back(e);
  }
  nlohmann::ordered_json j;
  j["corpus"] = row.corpus;
  j["published_squares"] = row.squares;
  j["enumerated_squares"] = classes.total;
  j["published_classes"] = row.classes;
  j["enumerated_classes"] = classes.entries.size();
  j["published_counts_sorted"] = detail::sorted_copy(row.counts);
  j["enumerated_counts_sorted"] = detail::sorted_counts(classes);
  j["count_multiset_equal"] = detail::sorted_copy(row.counts) == detail::sorted_counts(classes);
  j["strings_matched"] = matched;
  j["strings_listed"] = row.patterns.size();
  j["patterns"] = entries;
  return j;
}

// Published per-pattern raw counts vs the enumerated raw tally.
inline nlohmann::ordered_json reconcile_raw(std::string_view corpus,
                                            std::span<const reference::PublishedPattern> published,
                                            const PatternTally& raw) {
  nlohmann::ordered_json entries = nlohmann::ordered_json::array();
  std::size_t exact = 0, count_differs = 0, not_found = 0, malformed = 0;
  std::vector<std::uint64_t> published_counts;
  for (const auto& p : published) {
    published_counts.push_back(p.count);
    nlohmann::ordered_json e;
    e["published"] = p.pattern;
    e["published_count"] = p.count;
    if (!detail::try_parse(p.pattern, raw.order)) {
      e["status"] = "malformed";
      ++malformed;
    } else if (auto it = raw.entries.find(std::string(p.pattern)); it == raw.entries.end()) {
      e["status"] = "not-found";
      ++not_found;
    } else {
      e["enumerated_count"] = it->second;
      if (it->second == p.count) {
        e["status"] = "matched";
        ++exact;
      } else {
        e["status"] = "count-differs";
        ++count_differs;
      }
    }
    entries.push_back(e);
  }
  std::sort(published_counts.begin(), published_counts.end());
  nlohmann::ordered_json j;
  j["corpus"] = corpus;
  j["published_patterns"] = published.size();
  j["enumerated_patterns"] = raw.entries.size();
  j["matched"] = exact;
  j["count_differs"] = count_differs;
  j["not_found"] = not_found;
  j["malformed"] = malformed;
  j["count_multiset_equal"] = published_counts == detail::sorted_counts(raw);
  j["entries"] = entries;
  return j;
}

struct CorpusSummary {
  FamilySpec spec;
  std::uint64_t squares = 0;
  PatternTally classes;
  PatternTally raw;                  // as enumerated (Frenicle orientation)
  std::optional<int> table_tie;
  std::optional<PatternTally> table_raw;  // in the published table's orientation
  std::optional<PcaResult> pca;
};

inline CorpusSummary summarize_corpus(const FamilySpec& spec, std::span<const Square> squares, bool with_pca) {
  CorpusSummary s;
  s.spec = spec;
  s.squares = squares.size();
  s.raw = tally_patterns(squares, TallyMode::raw, to_string(spec.family));
  s.classes = canonicalize(s.raw);
  s.table_tie = table_tie_cell(spec);
  if (s.table_tie)
    s.table_raw = tally_patterns(reoriented(squares, *s.table_tie), TallyMode::raw, to_string(spec.family));
  if (with_pca && squares.size() >= 2) s.pca = pca_fit(parity_dataset(squares));
  return s;
}

inline nlohmann::ordered_json to_json(const CorpusSummary& s) {
  nlohmann::ordered_json j;
  j["corpus"] = corpus_key(s.spec);
  j["family"] = to_string(s.spec.family);
  j["order"] = s.spec.order;
  j["config"] = config_fingerprint(s.spec);
  j["squares"] = s.squares;
  j["unique_patterns"] = s.classes.entries.size();
  j["classes"] = to_json(s.classes)["entries"];
  j["distinct_raw_patterns"] = s.raw.entries.size();
  j["raw"] = to_json(s.raw)["entries"];
  if (s.table_raw) {
    j["table_orientation"] = {{"corner", "smallest corner at (0,0)"},
                              {"tie", "a(0," + std::to_string(*s.table_tie) + ") < a(" +
                                          std::to_string(*s.table_tie) + ",0)"}};
    j["table_raw"] = to_json(*s.table_raw)["entries"];
  }
  if (s.pca) {
    const auto& proj = s.pca->projection;
    const auto box = bounding_box(proj.points);
    const double link = region_link_fraction * box.diagonal();
    nlohmann::ordered_json p;
    p["rows"] = proj.size();
    p["distinct_points"] = distinct_points(proj.points).size();
    std::vector<double> top(s.pca->model.eigenvalues.begin(),
                            s.pca->model.eigenvalues.begin() +
                                std::min<std::size_t>(4, s.pca->model.eigenvalues.size()));
    p["leading_eigenvalues"] = top;
    p["total_variance"] = s.pca->model.total_variance;
    // Informative only: regions are connected components at the link distance.
    p["regions"] = {{"link_fraction", region_link_fraction},
                    {"link_distance", link},
                    {"components", link_clusters(proj.points, link)}};
    j["pca"] = p;
  }
  return j;
}

inline nlohmann::ordered_json build_report(std::span<const CorpusSummary> corpora) {
  nlohmann::ordered_json j;
  j["format"] = "msq-report/1";
  j["canonical_form"] = canonical_form_version;
  j["data_rows"] = "one row per square (pattern multiplicity preserved)";

  nlohmann::ordered_json summary = nlohmann::ordered_json::array();
  nlohmann::ordered_json table1 = nlohmann::ordered_json::array();
  nlohmann::ordered_json table2 = nlohmann::ordered_json::object();
  nlohmann::ordered_json recon_classes = nlohmann::ordered_json::array();
  nlohmann::ordered_json recon_raw = nlohmann::ordered_json::array();
  nlohmann::ordered_json details = nlohmann::ordered_json::array();

  for (const auto& s : corpora) {
    const auto key = corpus_key(s.spec);
    summary.push_back({{"corpus", key}, {"squares", s.squares}});
    table1.push_back({{"corpus", key},
                      {"squares", s.squares},
                      {"unique_patterns", s.classes.entries.size()},
                      {"classes", to_json(s.classes)["entries"]}});
    if (s.table_raw) {
      const auto& t = *s.table_raw;
      if (s.spec.family == Family::general) recon_raw.push_back(reconcile_raw(key, reference::raw_general_4, t));
      if (s.spec.family == Family::associative)
        recon_raw.push_back(reconcile_raw(key, reference::raw_associative_5, t));
      if (s.spec.family == Family::franklin) recon_raw.push_back(reconcile_raw(key, reference::raw_franklin_8, t));
      recon_raw.back()["tie_cell"] = *s.table_tie;
      table2[key] = to_json(t)["entries"];
    }
    for (const auto& row : reference::class_table)
      if (row.corpus == key) recon_classes.push_back(reconcile_classes(row, s.classes));
    if (s.spec.family == Family::franklin) {
      recon_classes.push_back({{"corpus", key},
                               {"published_classes", reference::franklin_class_count},
                               {"enumerated_classes", s.classes.entries.size()}});
    }
    details.push_back(to_json(s));
  }
  j["counts"] = summary;
  j["unique_patterns"] = table1;
  j["raw_patterns"] = table2;
  j["reconciliation"] = {{"classes", recon_classes}, {"raw", recon_raw}};
  j["corpora"] = details;
  return j;
}

}  // namespace msq
