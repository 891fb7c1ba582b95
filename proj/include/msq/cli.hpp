#pragma once

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "msq/msq.hpp"

namespace msq {

namespace cli {

namespace fs = std::filesystem;

struct Options {
  std::string family;
  int order = 0;
  std::vector<std::string> inputs;
  std::string out;
  std::string svg;
  std::string mode = "class";
  int workers = 1;
  int granularity = 0;
  std::string franklin_diagonals = "on";
  std::string franklin_blocks = "wrapped";
  std::string franklin_bent = "wrapped";

  std::string csv;
  std::string model;
  std::string heatmap;
  std::string figures;
  std::string report;
  std::string checkpoint;
  std::string resume;
  std::uint64_t node_budget = 0;
  int bins = 40;
  int tie_cell = 0;

  std::string kind = "pattern";
  std::string pattern;
  int cell_px = 10;
  std::string repeat = "1x1";
  std::string color0 = RenderSpec{}.color0;
  std::string color1 = RenderSpec{}.color1;
  int axis = 1;
  bool overlay = false;
  bool skip_franklin = false;
};

inline bool parse_switch(const std::string& v, std::string_view flag) {
  if (v == "on") return true;
  if (v == "off") return false;
  throw Error(ErrorKind::usage, std::string(flag) + " expects on|off, got '" + v + "'");
}

inline FamilySpec spec_of(const Options& o) {
  if (o.family.empty() || o.order == 0) throw Error(ErrorKind::usage, "--family and --order are required");
  FamilySpec spec;
  spec.family = parse_family(o.family);
  spec.order = o.order;
  spec.franklin.main_diagonals = parse_switch(o.franklin_diagonals, "--franklin-diagonals");
  spec.franklin.blocks = parse_block_mode(o.franklin_blocks);
  if (o.franklin_bent != "wrapped" && o.franklin_bent != "inner")
    throw Error(ErrorKind::usage, "--franklin-bent expects wrapped|inner");
  spec.franklin.wrapped_bent_diagonals = o.franklin_bent == "wrapped";
  require_supported(spec);
  return spec;
}

inline std::string cache_name(const FamilySpec& spec) {
  std::string name = corpus_key(spec);
  if (spec.family == Family::franklin) {
    name += spec.franklin.main_diagonals ? "-diag-on" : "-diag-off";
    name += "-" + std::string(to_string(spec.franklin.blocks));
    name += spec.franklin.wrapped_bent_diagonals ? "-bentwrapped" : "-bentinner";
  }
  return name + ".sq";
}

// Squares for spec: from MSQ_CACHE_DIR when cached, else enumerated (and cached).
inline std::vector<Square> corpus(const FamilySpec& spec, int workers, std::ostream& log) {
  const char* dir = std::getenv("MSQ_CACHE_DIR");
  if (dir && *dir) {
    const fs::path path = fs::path(dir) / cache_name(spec);
    if (fs::exists(path)) {
      auto file = read_squares(path);
      if (file.order != spec.order || file.family != to_string(spec.family))
        throw Error(ErrorKind::integrity, "cache file " + path.string() + " holds a different corpus");
      return std::move(file.squares);
    }
    EnumerateOptions eo;
    eo.workers = workers;
    auto result = enumerate_family(spec, eo);
    write_squares(path, result.squares, spec.order, to_string(spec.family));
    log << "cached " << result.squares.size() << " squares in " << path.string() << '\n';
    return std::move(result.squares);
  }
  EnumerateOptions eo;
  eo.workers = workers;
  return enumerate_family(spec, eo).squares;
}

struct Corpus {
  FamilySpec spec;
  std::vector<Square> squares;
};

inline Corpus load_input(const Options& o, std::ostream& log) {
  if (o.inputs.empty()) {
    const auto spec = spec_of(o);
    return {spec, corpus(spec, o.workers, log)};
  }
  Corpus c;
  bool first = true;
  for (const auto& path : o.inputs) {
    auto file = read_squares(fs::path(path));
    if (first) {
      c.spec.order = file.order;
      try {
        c.spec.family = parse_family(file.family);
      } catch (const Error&) {
        c.spec.family = Family::general;
      }
      first = false;
    } else if (file.order != c.spec.order) {
      throw Error(ErrorKind::mixed_order, path + " has order " + std::to_string(file.order));
    }
    c.squares.insert(c.squares.end(), file.squares.begin(), file.squares.end());
  }
  return c;
}

inline void write_text(const std::string& path, const std::string& text) {
  auto out = detail::open_out(path);
  out << text;
  if (!out) throw Error(ErrorKind::io, "write failed: " + path);
}

inline std::string projection_csv(const ProjectionSet& p) {
  std::ostringstream s;
  write_projection_csv(s, p);
  return s.str();
}

inline std::pair<int, int> parse_repeat(const std::string& text) {
  const auto x = text.find('x');
  const auto r = x == std::string::npos ? std::nullopt : detail::parse_int(std::string_view(text).substr(0, x));
  const auto c = x == std::string::npos ? std::nullopt : detail::parse_int(std::string_view(text).substr(x + 1));
  if (!r || !c) throw Error(ErrorKind::usage, "--repeat expects ROWSxCOLS, got '" + text + "'");
  return {*r, *c};
}

inline std::vector<double> axis_values(const ProjectionSet& p, int axis) {
  std::vector<double> v;
  v.reserve(p.size());
  for (const auto& pt : p.points) v.push_back(pt[axis - 1]);
  return v;
}

// ---------------------------------------------------------------------------

inline int cmd_enumerate(const Options& o, std::ostream& out, std::ostream& log) {
  const auto spec = spec_of(o);
  EnumerateOptions eo;
  eo.workers = o.workers;
  eo.granularity = o.granularity;
  if (o.node_budget) eo.node_budget = o.node_budget;
  Checkpoint resume;
  std::vector<Square> earlier;
  if (!o.resume.empty()) {
    resume = checkpoint_from_json(read_json(o.resume));
    eo.resume = &resume;
    const fs::path partial = o.resume + ".partial.sq";
    if (fs::exists(partial)) earlier = read_squares(partial).squares;
  }
  EnumerationResult result;
  try {
    result = enumerate_family(spec, eo);
  } catch (const PartialResultError& e) {
    if (o.checkpoint.empty()) throw;
    auto cp = e.checkpoint();
    auto squares = e.squares();
    squares.insert(squares.end(), earlier.begin(), earlier.end());
    std::sort(squares.begin(), squares.end());
    write_json(o.checkpoint, to_json(cp));
    write_squares(fs::path(o.checkpoint + ".partial.sq"), squares, spec.order, to_string(spec.family));
    log << "node budget exhausted; checkpoint written to " << o.checkpoint << " (" << cp.count << " squares so far)\n";
    return 1;
  }
  if (!earlier.empty()) {
    result.squares.insert(result.squares.end(), earlier.begin(), earlier.end());
    std::sort(result.squares.begin(), result.squares.end());
  }
  result.report.total_count = result.squares.size();
  if (!o.out.empty()) {
    write_squares(fs::path(o.out), result.squares, spec.order, to_string(spec.family));
    write_json(o.report.empty() ? o.out + ".json" : o.report, to_json(result.report));
  }
  out << corpus_key(spec) << " count=" << result.squares.size() << '\n';
  log << "enumerated in " << result.report.elapsed_seconds << " s, " << result.report.nodes << " nodes, "
      << result.report.tasks << " tasks\n";
  return 0;
}

inline int cmd_patterns(const Options& o, std::ostream& out, std::ostream& log) {
  auto c = load_input(o, log);
  if (o.tie_cell > 0) c.squares = reoriented(c.squares, o.tie_cell);
  const auto tally = tally_patterns(c.squares, parse_tally_mode(o.mode), to_string(c.spec.family));
  if (!o.out.empty()) write_json(o.out, to_json(tally));
  if (!o.csv.empty()) {
    std::ostringstream s;
    write_tally_csv(s, tally);
    write_text(o.csv, s.str());
  }
  if (o.out.empty() && o.csv.empty()) write_tally_csv(out, tally);
  else out << "patterns=" << tally.entries.size() << " total=" << tally.total << '\n';
  return 0;
}

inline int cmd_pca(const Options& o, std::ostream& out, std::ostream& log) {
  const auto c = load_input(o, log);
  auto fit = pca_fit(parity_dataset(c.squares));
  fit.projection.labels = class_labels(c.squares);
  if (!o.out.empty()) write_text(o.out, projection_csv(fit.projection));
  if (!o.model.empty()) write_json(o.model, to_json(fit.model));
  RenderSpec rs;
  rs.x_label = "PC1";
  rs.y_label = "PC2";
  rs.title = "PCA " + corpus_key(c.spec);
  if (!o.svg.empty()) {
    rs.kind = RenderKind::scatter;
    write_text(o.svg, render_svg(rs, fit.projection));
  }
  if (!o.heatmap.empty()) {
    rs.kind = RenderKind::heatmap;
    write_text(o.heatmap, render_svg(rs, fit.projection));
  }
  out << "rows=" << fit.projection.size() << " distinct_points=" << distinct_points(fit.projection.points).size()
      << '\n';
  return 0;
}

inline int cmd_lda(const Options& o, std::ostream& out, std::ostream& log) {
  const auto c = load_input(o, log);
  const auto labels = class_labels(c.squares);
  const auto fit = lda_fit(parity_dataset(c.squares), labels);
  if (!o.out.empty()) write_text(o.out, projection_csv(fit.projection));
  if (!o.model.empty()) write_json(o.model, to_json(fit.model));
  RenderSpec rs;
  rs.x_label = "LDA1";
  rs.y_label = "LDA2";
  rs.title = "LDA " + corpus_key(c.spec);
  if (!o.svg.empty()) {
    rs.kind = RenderKind::scatter;
    write_text(o.svg, render_svg(rs, fit.projection));
  }
  if (!o.heatmap.empty()) {
    rs.kind = RenderKind::heatmap;
    write_text(o.heatmap, render_svg(rs, fit.projection));
  }
  if (!o.figures.empty()) {
    const fs::path dir(o.figures);
    rs.kind = RenderKind::scatter;
    write_text((dir / "lda_scatter.svg").string(), render_svg(rs, fit.projection));
    rs.kind = RenderKind::heatmap;
    write_text((dir / "lda_heatmap.svg").string(), render_svg(rs, fit.projection));
    for (int axis = 1; axis <= 2; ++axis) {
      const auto values = axis_values(fit.projection, axis);
      HistogramPlot plot{histogram(values, o.bins), std::nullopt};
      try {
        plot.overlay = normal_overlay(values);
      } catch (const Error&) {
        // constant axis: plot bars only
      }
      RenderSpec hs;
      hs.kind = RenderKind::histogram;
      hs.title = "LDA" + std::to_string(axis) + " " + corpus_key(c.spec);
      hs.x_label = "LDA" + std::to_string(axis);
      hs.y_label = "squares";
      write_text((dir / ("lda" + std::to_string(axis) + "_histogram.svg")).string(), render_svg(hs, plot));
    }
  }
  out << "rows=" << fit.projection.size() << " classes=" << fit.model.classes.size()
      << " positive_eigenvalues=" << positive_eigenvalue_count(fit.model.eigenvalues) << '\n';
  return 0;
}

inline int cmd_render(const Options& o, std::ostream& out, std::ostream& log) {
  (void)log;
  RenderSpec rs;
  rs.kind = parse_render_kind(o.kind);
  rs.cell_px = o.cell_px;
  rs.color0 = o.color0;
  rs.color1 = o.color1;
  std::tie(rs.repeat_rows, rs.repeat_cols) = parse_repeat(o.repeat);
  if (rs.kind == RenderKind::tiling && o.repeat == "1x1") rs.repeat_rows = rs.repeat_cols = 4;
  const std::string target = !o.out.empty() ? o.out : o.svg;

  std::string svg;
  if (rs.kind == RenderKind::pattern || rs.kind == RenderKind::tiling) {
    if (o.pattern.empty()) throw Error(ErrorKind::usage, "--pattern is required for pattern and tiling renders");
    svg = render_svg(rs, parse_pattern(o.pattern, pattern_order(o.pattern)));
  } else {
    if (o.inputs.size() != 1) throw Error(ErrorKind::usage, "--in PROJECTION.csv is required");
    auto in = detail::open_in(o.inputs.front());
    const auto projection = read_projection_csv(in);
    if (rs.kind == RenderKind::histogram) {
      if (o.axis != 1 && o.axis != 2) throw Error(ErrorKind::usage, "--axis must be 1 or 2");
      const auto values = axis_values(projection, o.axis);
      HistogramPlot plot{histogram(values, o.bins), std::nullopt};
      if (o.overlay) plot.overlay = normal_overlay(values);
      rs.x_label = "axis " + std::to_string(o.axis);
      rs.y_label = "count";
      svg = render_svg(rs, plot);
    } else {
      svg = render_svg(rs, projection);
    }
  }
  if (target.empty()) out << svg;
  else write_text(target, svg);
  return 0;
}

inline int cmd_ingest(const Options& o, std::ostream& out, std::ostream& log) {
  (void)log;
  if (o.inputs.size() != 1) throw Error(ErrorKind::usage, "ingest takes exactly one --in file");
  const auto spec = spec_of(o);
  const auto result = ingest_external(fs::path(o.inputs.front()), spec);
  if (!o.out.empty()) write_squares(fs::path(o.out), result.squares, spec.order, to_string(spec.family));
  if (!o.report.empty()) write_json(o.report, to_json(result.report));
  out << "parsed=" << result.report.parsed << " rejected=" << result.report.rejected.size()
      << " distinct=" << result.report.distinct << '\n';
  return 0;
}

inline int cmd_report(const Options& o, std::ostream& out, std::ostream& log) {
  std::vector<CorpusSummary> summaries;
  for (auto spec : standard_corpora()) {
    if (spec.family == Family::franklin && o.skip_franklin) continue;
    const auto squares = corpus(spec, o.workers, log);
    const bool with_pca = spec.order >= 4 && !(spec.family == Family::associative && spec.order == 4);
    summaries.push_back(summarize_corpus(spec, squares, with_pca));
  }
  const auto report = build_report(summaries);
  if (!o.out.empty()) write_json(o.out, report);
  else out << report.dump(2) << '\n';
  for (const auto& s : summaries)
    log << corpus_key(s.spec) << ": " << s.squares << " squares, " << s.classes.entries.size() << " classes, "
        << s.raw.entries.size() << " raw patterns\n";
  return 0;
}

}  // namespace cli

// Entry point behind the msq executable. Exit codes: 0 success, 1 runtime
// failure, 2 usage.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  cli::Options o;
  CLI::App app{"Magic square enumeration, parity patterns, PCA and LDA", "msq"};
  app.require_subcommand(1);

  auto add_family = [&](CLI::App* sub) {
    sub->add_option("--family", o.family, "general | associative | ultra | franklin");
    sub->add_option("--order", o.order, "square order");
    sub->add_option("--workers", o.workers, "parallel enumeration workers")->check(CLI::PositiveNumber);
    sub->add_option("--franklin-diagonals", o.franklin_diagonals, "on | off");
    sub->add_option("--franklin-blocks", o.franklin_blocks, "aligned | overlapping | wrapped");
    sub->add_option("--franklin-bent", o.franklin_bent, "wrapped | inner");
  };

  auto* enumerate = app.add_subcommand("enumerate", "enumerate one family, one square per D4 orbit");
  add_family(enumerate);
  enumerate->add_option("--out", o.out, "square file to write");
  enumerate->add_option("--report", o.report, "enumeration report JSON (default OUT.json)");
  enumerate->add_option("--granularity", o.granularity, "task split depth")->check(CLI::PositiveNumber);
  enumerate->add_option("--node-budget", o.node_budget, "stop after this many search nodes");
  enumerate->add_option("--checkpoint", o.checkpoint, "where to save progress when the budget runs out");
  enumerate->add_option("--resume", o.resume, "checkpoint to resume from");

  auto* patterns = app.add_subcommand("patterns", "tally parity patterns");
  add_family(patterns);
  patterns->add_option("--in", o.inputs, "square files");
  patterns->add_option("--mode", o.mode, "raw | class")->check(CLI::IsMember({"raw", "class"}));
  patterns->add_option("--out", o.out, "tally JSON");
  patterns->add_option("--csv", o.csv, "tally CSV");
  patterns->add_option("--tie-cell", o.tie_cell,
                       "reorient each square first: smallest corner top-left, a(0,K) < a(K,0)");

  auto* pca = app.add_subcommand("pca", "principal component analysis of parity patterns");
  add_family(pca);
  pca->add_option("--in", o.inputs, "square files");
  pca->add_option("--out", o.out, "projection CSV");
  pca->add_option("--model", o.model, "model JSON");
  pca->add_option("--svg", o.svg, "scatter plot");
  pca->add_option("--heatmap", o.heatmap, "density heatmap");

  auto* lda = app.add_subcommand("lda", "linear discriminant analysis over D4 pattern classes");
  add_family(lda);
  lda->add_option("--in", o.inputs, "square files");
  lda->add_option("--out", o.out, "projection CSV");
  lda->add_option("--model", o.model, "model JSON");
  lda->add_option("--svg", o.svg, "scatter plot");
  lda->add_option("--heatmap", o.heatmap, "density heatmap");
  lda->add_option("--figures", o.figures, "directory for scatter, heatmap and histogram figures");
  lda->add_option("--bins", o.bins, "histogram bins")->check(CLI::PositiveNumber);

  auto* render = app.add_subcommand("render", "render a pattern, tiling or projection as SVG");
  render->add_option("--kind", o.kind, "pattern | tiling | scatter | heatmap | histogram");
  render->add_option("--pattern", o.pattern, "0/1 pattern string");
  render->add_option("--in", o.inputs, "projection CSV");
  render->add_option("--out", o.out, "SVG file");
  render->add_option("--svg", o.svg, "SVG file");
  render->add_option("--cell", o.cell_px, "cell size in px");
  render->add_option("--repeat", o.repeat, "tiling repeats ROWSxCOLS");
  render->add_option("--color0", o.color0, "colour of even cells");
  render->add_option("--color1", o.color1, "colour of odd cells");
  render->add_option("--axis", o.axis, "histogram axis (1 or 2)");
  render->add_option("--bins", o.bins, "histogram bins")->check(CLI::PositiveNumber);
  render->add_flag("--overlay", o.overlay, "overlay a fitted normal density");

  auto* ingest = app.add_subcommand("ingest", "validate and canonicalize an external square list");
  add_family(ingest);
  ingest->add_option("--in", o.inputs, "external square list");
  ingest->add_option("--out", o.out, "canonical square file");
  ingest->add_option("--report", o.report, "ingest report JSON");

  auto* report = app.add_subcommand("report", "summary tables for all corpora as JSON");
  report->add_option("--out", o.out, "report JSON");
  report->add_option("--workers", o.workers, "parallel enumeration workers")->check(CLI::PositiveNumber);
  report->add_flag("--skip-franklin", o.skip_franklin, "leave out the order-8 Franklin corpus");

  std::vector<std::string> argv_store{"msq"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    if (enumerate->parsed()) return cli::cmd_enumerate(o, out, err);
    if (patterns->parsed()) return cli::cmd_patterns(o, out, err);
    if (pca->parsed()) return cli::cmd_pca(o, out, err);
    if (lda->parsed()) return cli::cmd_lda(o, out, err);
    if (render->parsed()) return cli::cmd_render(o, out, err);
    if (ingest->parsed()) return cli::cmd_ingest(o, out, err);
    if (report->parsed()) return cli::cmd_report(o, out, err);
  } catch (const Error& e) {
    err << "msq: " << e.what() << '\n';
    const bool usage = e.kind() == ErrorKind::usage || e.kind() == ErrorKind::unsupported_family;
    return usage ? 2 : 1;
  } catch (const std::exception& e) {
    err << "msq: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace msq
