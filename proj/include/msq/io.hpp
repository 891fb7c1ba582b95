#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "msq/core.hpp"
#include "msq/enumerate.hpp"
#include "msq/parity.hpp"
#include "msq/stats.hpp"

namespace msq {

inline constexpr std::string_view square_format_version = "v1";

// Shortest round-trip decimal, independent of the global locale.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

inline double parse_double(std::string_view text) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
    throw Error(ErrorKind::parse, "not a number: '" + std::string(text) + "'");
  return v;
}

namespace detail {

inline std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

inline std::optional<int> parse_int(std::string_view text) {
  int v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) return std::nullopt;
  return v;
}

inline std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  return out;
}

inline std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot read " + path.string());
  return in;
}

inline bool getline_lf(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Square files

struct SquareFile {
  int order = 0;
  std::string family;
  std::vector<Square> squares;
};

inline void write_squares(std::ostream& out, std::span<const Square> squares, int order,
                          std::string_view family) {
  out << "order=" << order << ",family=" << family << ",count=" << squares.size()
      << ",format=" << square_format_version << '\n';
  for (const Square& sq : squares) {
    if (sq.order() != order)
      throw Error(ErrorKind::mixed_order, "square of order " + std::to_string(sq.order()) +
                                              " in a file of order " + std::to_string(order));
    std::string line;
    for (int k = 0; k < sq.size(); ++k) {
      if (k) line += ',';
      line += std::to_string(sq[k]);
    }
    out << line << '\n';
  }
}

inline void write_squares(const std::filesystem::path& path, std::span<const Square> squares, int order,
                          std::string_view family) {
  auto out = detail::open_out(path);
  write_squares(out, squares, order, family);
  if (!out) throw Error(ErrorKind::io, "write failed: " + path.string());
}

inline SquareFile read_squares(std::istream& in) {
  SquareFile file;
  std::string line;
  if (!detail::getline_lf(in, line)) throw Error(ErrorKind::parse, "line 1: missing header");
  std::size_t declared = 0;
  bool have_order = false, have_count = false, have_format = false;
  for (auto field : detail::split(line, ',')) {
    const auto eq = field.find('=');
    if (eq == std::string_view::npos) throw Error(ErrorKind::parse, "line 1: malformed header field");
    const auto key = field.substr(0, eq), value = field.substr(eq + 1);
    if (key == "order") {
      const auto v = detail::parse_int(value);
      if (!v) throw Error(ErrorKind::parse, "line 1: bad order");
      file.order = *v;
      have_order = true;
    } else if (key == "family") {
      file.family = std::string(value);
    } else if (key == "count") {
      const auto v = detail::parse_int(value);
      if (!v || *v < 0) throw Error(ErrorKind::parse, "line 1: bad count");
      declared = static_cast<std::size_t>(*v);
      have_count = true;
    } else if (key == "format") {
      if (value != square_format_version)
        throw Error(ErrorKind::parse, "line 1: unsupported format '" + std::string(value) + "'");
      have_format = true;
    }
  }
  if (!have_order || !have_count || !have_format)
    throw Error(ErrorKind::parse, "line 1: header needs order, count and format");

  std::vector<int> values;
  for (std::size_t lineno = 2; detail::getline_lf(in, line); ++lineno) {
    if (line.empty() && in.peek() == std::char_traits<char>::eof()) break;
    values.clear();
    for (auto tok : detail::split(line, ',')) {
      const auto v = detail::parse_int(tok);
      if (!v) throw Error(ErrorKind::parse, "line " + std::to_string(lineno) + ": bad integer '" +
                                                std::string(tok) + "'");
      values.push_back(*v);
    }
    try {
      file.squares.emplace_back(file.order, values);
    } catch (const Error& e) {
      throw Error(ErrorKind::parse, "line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (file.squares.size() != declared)
    throw Error(ErrorKind::integrity, "header declares " + std::to_string(declared) + " squares, found " +
                                          std::to_string(file.squares.size()));
  return file;
}

inline SquareFile read_squares(const std::filesystem::path& path) {
  auto in = detail::open_in(path);
  return read_squares(in);
}

// ---------------------------------------------------------------------------
// External corpora: one square per line, comma / space / semicolon / tab
// separated, optional v1 header.

struct IngestReport {
  std::string source;
  std::size_t parsed = 0;
  std::vector<std::pair<std::size_t, std::string>> rejected;  // (line number, reason)
  std::size_t distinct = 0;
};

struct IngestResult {
  std::vector<Square> squares;  // Frenicle forms, deduplicated, ascending
  IngestReport report;
};

inline IngestResult ingest_external(std::istream& in, const FamilySpec& expected, std::string source = "-") {
  IngestResult out;
  out.report.source = std::move(source);
  std::vector<Square> accepted;
  std::string line;
  std::size_t records = 0;
  for (std::size_t lineno = 1; detail::getline_lf(in, line); ++lineno) {
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (lineno == 1 && line.rfind("order=", 0) == 0) continue;
    ++records;
    std::vector<int> values;
    std::string reason;
    std::string_view rest = line;
    while (!rest.empty() && reason.empty()) {
      const auto start = rest.find_first_not_of(" \t,;");
      if (start == std::string_view::npos) break;
      rest.remove_prefix(start);
      const auto end = rest.find_first_of(" \t,;");
      const auto tok = rest.substr(0, end);
      const auto v = detail::parse_int(tok);
      if (!v) reason = "bad integer '" + std::string(tok) + "'";
      else values.push_back(*v);
      rest.remove_prefix(end == std::string_view::npos ? rest.size() : end);
    }
    if (reason.empty() && static_cast<int>(values.size()) != expected.order * expected.order)
      reason = "expected " + std::to_string(expected.order * expected.order) + " values, found " +
               std::to_string(values.size());
    if (reason.empty()) {
      try {
        Square sq(expected.order, values);
        if (is_member(sq, expected)) accepted.push_back(frenicle_form(sq));
        else reason = "not a " + std::string(to_string(expected.family)) + " square";
      } catch (const Error& e) {
        reason = e.what();
      }
    }
    if (!reason.empty()) out.report.rejected.emplace_back(lineno, reason);
  }
  out.report.parsed = accepted.size();
  if (records > 0 && out.report.rejected.size() * 2 > records)
    throw Error(ErrorKind::format_mismatch, std::to_string(out.report.rejected.size()) + " of " +
                                                std::to_string(records) +
                                                " lines rejected; wrong family or order?");
  std::sort(accepted.begin(), accepted.end());
  accepted.erase(std::unique(accepted.begin(), accepted.end()), accepted.end());
  out.report.distinct = accepted.size();
  out.squares = std::move(accepted);
  return out;
}

inline IngestResult ingest_external(const std::filesystem::path& path, const FamilySpec& expected) {
  auto in = detail::open_in(path);
  return ingest_external(in, expected, path.string());
}

inline nlohmann::json to_json(const IngestReport& r) {
  nlohmann::json rejected = nlohmann::json::array();
  for (const auto& [line, reason] : r.rejected) rejected.push_back({{"line", line}, {"reason", reason}});
  return {{"source", r.source}, {"parsed", r.parsed}, {"rejected", rejected}, {"distinct", r.distinct}};
}

// ---------------------------------------------------------------------------
// Tallies

inline nlohmann::ordered_json to_json(const PatternTally& t) {
  nlohmann::ordered_json entries = nlohmann::ordered_json::array();
  for (const auto& [pattern, count] : t.entries) entries.push_back({{"pattern", pattern}, {"count", count}});
  nlohmann::ordered_json j;
  j["mode"] = to_string(t.mode);
  j["order"] = t.order;
  j["family"] = t.family;
  j["total"] = t.total;
  j["entries"] = entries;
  return j;
}

inline PatternTally tally_from_json(const nlohmann::json& j) {
  try {
    PatternTally t;
    t.mode = parse_tally_mode(j.at("mode").get<std::string>());
    t.order = j.at("order").get<int>();
    t.family = j.at("family").get<std::string>();
    for (const auto& e : j.at("entries")) {
      const auto pattern = e.at("pattern").get<std::string>();
      parse_pattern(pattern, t.order);
      t.entries[pattern] += e.at("count").get<std::uint64_t>();
    }
    t.total = j.at("total").get<std::uint64_t>();
    std::uint64_t sum = 0;
    for (const auto& [p, c] : t.entries) sum += c;
    if (sum != t.total)
      throw Error(ErrorKind::integrity, "tally total " + std::to_string(t.total) + " != entry sum " +
                                            std::to_string(sum));
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse, std::string("tally json: ") + e.what());
  }
}

inline void write_tally_csv(std::ostream& out, const PatternTally& t) {
  out << "pattern,count\n";
  for (const auto& [pattern, count] : t.entries) out << pattern << ',' << count << '\n';
}

inline PatternTally read_tally_csv(std::istream& in, TallyMode mode, std::string family = {}) {
  PatternTally t;
  t.mode = mode;
  t.family = std::move(family);
  std::string line;
  if (!detail::getline_lf(in, line) || line != "pattern,count")
    throw Error(ErrorKind::parse, "line 1: expected header 'pattern,count'");
  for (std::size_t lineno = 2; detail::getline_lf(in, line); ++lineno) {
    const auto fields = detail::split(line, ',');
    const auto count = fields.size() == 2 ? detail::parse_int(fields[1]) : std::nullopt;
    if (!count || *count < 0) throw Error(ErrorKind::parse, "line " + std::to_string(lineno) + ": bad row");
    const auto pm = parse_pattern(fields[0], pattern_order(fields[0]));
    if (t.order == 0) t.order = pm.order();
    if (pm.order() != t.order) throw Error(ErrorKind::mixed_order, "line " + std::to_string(lineno));
    t.entries[std::string(fields[0])] += static_cast<std::uint64_t>(*count);
    t.total += static_cast<std::uint64_t>(*count);
  }
  return t;
}

// ---------------------------------------------------------------------------
// Projections and models

inline void write_projection_csv(std::ostream& out, const ProjectionSet& p) {
  out << "pattern,label,axis1,axis2\n";
  for (std::size_t i = 0; i < p.size(); ++i) {
    out << (i < p.patterns.size() ? p.patterns[i] : std::string{}) << ','
        << (i < p.labels.size() ? p.labels[i] : std::string{}) << ',' << format_double(p.points[i][0]) << ','
        << format_double(p.points[i][1]) << '\n';
  }
}

inline ProjectionSet read_projection_csv(std::istream& in) {
  ProjectionSet p;
  std::string line;
  if (!detail::getline_lf(in, line) || line != "pattern,label,axis1,axis2")
    throw Error(ErrorKind::parse, "line 1: expected header 'pattern,label,axis1,axis2'");
  for (std::size_t lineno = 2; detail::getline_lf(in, line); ++lineno) {
    const auto f = detail::split(line, ',');
    if (f.size() != 4) throw Error(ErrorKind::parse, "line " + std::to_string(lineno) + ": expected 4 fields");
    try {
      p.points.push_back({parse_double(f[2]), parse_double(f[3])});
    } catch (const Error& e) {
      throw Error(ErrorKind::parse, "line " + std::to_string(lineno) + ": " + e.what());
    }
    p.patterns.emplace_back(f[0]);
    p.labels.emplace_back(f[1]);
  }
  return p;
}

inline nlohmann::ordered_json matrix_json(const Matrix& m) {
  nlohmann::ordered_json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  j["data"] = m.data();
  return j;
}

inline nlohmann::ordered_json to_json(const PcaModel& m) {
  nlohmann::ordered_json j;
  j["kind"] = "pca";
  j["mean"] = m.mean;
  j["eigenvalues"] = m.eigenvalues;
  j["total_variance"] = m.total_variance;
  j["components"] = matrix_json(m.components);
  return j;
}

inline nlohmann::ordered_json to_json(const LdaModel& m) {
  nlohmann::ordered_json j;
  j["kind"] = "lda";
  j["classes"] = m.classes;
  j["mean"] = m.mean;
  j["class_means"] = matrix_json(m.class_means);
  j["within_scatter"] = matrix_json(m.within);
  j["between_scatter"] = matrix_json(m.between);
  j["eigenvalues"] = m.eigenvalues;
  j["components"] = matrix_json(m.directions);
  std::vector<bool> flags(m.null_direction.begin(), m.null_direction.end());
  j["null_direction"] = flags;
  j["within_retained_rank"] = m.retained_rank;
  j["within_regularized"] = m.within_regularized;
  return j;
}

// ---------------------------------------------------------------------------
// Enumeration metadata

inline nlohmann::ordered_json to_json(const EnumerationReport& r) {
  nlohmann::ordered_json j;
  j["family"] = to_string(r.spec.family);
  j["order"] = r.spec.order;
  j["total_count"] = r.total_count;
  j["config"] = config_fingerprint(r.spec);
  if (r.spec.family == Family::franklin) {
    j["franklin"] = {{"main_diagonals", r.spec.franklin.main_diagonals},
                     {"blocks", to_string(r.spec.franklin.blocks)},
                     {"wrapped_bent_diagonals", r.spec.franklin.wrapped_bent_diagonals}};
  }
  j["canonical_form"] = canonical_form_version;
  j["granularity"] = r.granularity;
  j["tasks"] = r.tasks;
  // Timing and worker count vary between runs; kept out of the byte-stable fields.
  return j;
}

inline FamilySpec spec_from_json(const nlohmann::json& j) {
  FamilySpec spec;
  spec.family = parse_family(j.at("family").get<std::string>());
  spec.order = j.at("order").get<int>();
  if (j.contains("franklin")) {
    const auto& f = j.at("franklin");
    spec.franklin.main_diagonals = f.at("main_diagonals").get<bool>();
    spec.franklin.blocks = parse_block_mode(f.at("blocks").get<std::string>());
    spec.franklin.wrapped_bent_diagonals = f.at("wrapped_bent_diagonals").get<bool>();
  }
  return spec;
}

inline nlohmann::ordered_json to_json(const Checkpoint& cp) {
  nlohmann::ordered_json j;
  j["family"] = to_string(cp.spec.family);
  j["order"] = cp.spec.order;
  j["franklin"] = {{"main_diagonals", cp.spec.franklin.main_diagonals},
                   {"blocks", to_string(cp.spec.franklin.blocks)},
                   {"wrapped_bent_diagonals", cp.spec.franklin.wrapped_bent_diagonals}};
  j["granularity"] = cp.granularity;
  j["count"] = cp.count;
  nlohmann::ordered_json done = nlohmann::ordered_json::array();
  for (const auto& t : cp.completed) done.push_back(t.prefix);
  j["completed"] = done;
  return j;
}

inline Checkpoint checkpoint_from_json(const nlohmann::json& j) {
  try {
    Checkpoint cp;
    cp.spec = spec_from_json(j);
    cp.granularity = j.at("granularity").get<int>();
    cp.count = j.at("count").get<std::uint64_t>();
    for (const auto& t : j.at("completed")) cp.completed.push_back({t.get<std::vector<int>>()});
    return cp;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse, std::string("checkpoint json: ") + e.what());
  }
}

template <typename Json>
void write_json(const std::filesystem::path& path, const Json& j) {
  auto out = detail::open_out(path);
  out << j.dump(2) << '\n';
}

inline nlohmann::json read_json(const std::filesystem::path& path) {
  auto in = detail::open_in(path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse, path.string() + ": " + e.what());
  }
}

}  // namespace msq
