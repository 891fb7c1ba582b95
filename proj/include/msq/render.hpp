#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "msq/parity.hpp"
#include "msq/stats.hpp"

namespace msq {

enum class RenderKind { pattern, tiling, scatter, heatmap, histogram };

constexpr std::string_view to_string(RenderKind k) {
  switch (k) {
    case RenderKind::pattern: return "pattern";
    case RenderKind::tiling: return "tiling";
    case RenderKind::scatter: return "scatter";
    case RenderKind::heatmap: return "heatmap";
    case RenderKind::histogram: return "histogram";
  }
  return "unknown";
}

inline RenderKind parse_render_kind(std::string_view name) {
  for (auto k : {RenderKind::pattern, RenderKind::tiling, RenderKind::scatter, RenderKind::heatmap,
                 RenderKind::histogram})
    if (name == to_string(k)) return k;
  throw Error(ErrorKind::usage, "unknown render kind '" + std::string(name) + "'");
}

struct RenderSpec {
  RenderKind kind = RenderKind::pattern;
  int cell_px = 10;
  std::string color0 = "#f2efe6";  // even cells / low density
  std::string color1 = "#1d2b45";  // odd cells / high density
  int repeat_rows = 1;
  int repeat_cols = 1;
  int width = 640;  // plot kinds only
  int height = 640;
  int heatmap_grid = 64;
  std::string title;
  std::string x_label = "axis 1";
  std::string y_label = "axis 2";
};

struct HistogramPlot {
  Histogram histogram;
  std::optional<NormalOverlay> overlay;
};

using RenderData = std::variant<ParityMatrix, ProjectionSet, HistogramPlot>;

namespace detail {

inline std::string num(double v) {
  char buf[48];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 2);
  std::string s(buf, res.ptr);
  if (s == "-0.00") s = "0.00";
  return s;
}

inline std::string escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string svg_open(int w, int h) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(w) + "\" height=\"" +
         std::to_string(h) + "\" viewBox=\"0 0 " + std::to_string(w) + " " + std::to_string(h) + "\">\n";
}

inline constexpr std::array<std::string_view, 16> palette = {
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf", "#393b79", "#637939", "#8c6d31", "#843c39", "#7b4173", "#3182bd",
};

inline std::array<int, 3> parse_hex(std::string_view color) {
  if (color.size() != 7 || color[0] != '#')
    throw Error(ErrorKind::render_spec, "colour must be #rrggbb, got '" + std::string(color) + "'");
  std::array<int, 3> rgb{};
  for (int i = 0; i < 3; ++i) {
    const auto part = color.substr(1 + 2 * i, 2);
    const auto res = std::from_chars(part.data(), part.data() + 2, rgb[i], 16);
    if (res.ec != std::errc{} || res.ptr != part.data() + 2)
      throw Error(ErrorKind::render_spec, "bad colour '" + std::string(color) + "'");
  }
  return rgb;
}

inline std::string blend(const std::array<int, 3>& a, const std::array<int, 3>& b, double t) {
  static constexpr char hex[] = "0123456789abcdef";
  std::string out = "#";
  for (int i = 0; i < 3; ++i) {
    const int v = static_cast<int>(a[i] + (b[i] - a[i]) * t + 0.5);
    out += hex[(v >> 4) & 15];
    out += hex[v & 15];
  }
  return out;
}

inline void validate(const RenderSpec& spec) {
  if (spec.repeat_rows < 1 || spec.repeat_cols < 1)
    throw Error(ErrorKind::render_spec, "repeat counts must be >= 1");
  if (spec.cell_px < 1) throw Error(ErrorKind::render_spec, "cell size must be >= 1 px");
  if (spec.width < 100 || spec.height < 100) throw Error(ErrorKind::render_spec, "plot area too small");
  if (parse_hex(spec.color0) == parse_hex(spec.color1))
    throw Error(ErrorKind::render_spec, "the two colours must differ");
}

inline std::string grid_svg(const RenderSpec& spec, const ParityMatrix& pm, int rows, int cols) {
  const int n = pm.order(), cell = spec.cell_px;
  std::string svg = svg_open(n * cell * cols, n * cell * rows);
  for (int tr = 0; tr < rows; ++tr)
    for (int tc = 0; tc < cols; ++tc)
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
          svg += "<rect x=\"" + std::to_string((tc * n + c) * cell) + "\" y=\"" +
                 std::to_string((tr * n + r) * cell) + "\" width=\"" + std::to_string(cell) + "\" height=\"" +
                 std::to_string(cell) + "\" fill=\"" + (pm.at(r, c) ? spec.color1 : spec.color0) + "\"/>\n";
        }
  svg += "</svg>\n";
  return svg;
}

struct PlotFrame {
  double left, top, right, bottom;
  BoundingBox box;

  double sx(double x) const {
    return box.max_x > box.min_x ? left + (x - box.min_x) / (box.max_x - box.min_x) * (right - left)
                                 : (left + right) / 2;
  }
  double sy(double y) const {
    return box.max_y > box.min_y ? bottom - (y - box.min_y) / (box.max_y - box.min_y) * (bottom - top)
                                 : (top + bottom) / 2;
  }
};

inline std::string axes(const RenderSpec& spec, const PlotFrame& f) {
  std::string svg;
  svg += "<line x1=\"" + num(f.left) + "\" y1=\"" + num(f.bottom) + "\" x2=\"" + num(f.right) + "\" y2=\"" +
         num(f.bottom) + "\" stroke=\"#444\"/>\n";
  svg += "<line x1=\"" + num(f.left) + "\" y1=\"" + num(f.top) + "\" x2=\"" + num(f.left) + "\" y2=\"" +
         num(f.bottom) + "\" stroke=\"#444\"/>\n";
  svg += "<text x=\"" + num((f.left + f.right) / 2) + "\" y=\"" + num(f.bottom + 32) +
         "\" font-size=\"12\" text-anchor=\"middle\">" + escape(spec.x_label) + "</text>\n";
  svg += "<text x=\"14\" y=\"" + num((f.top + f.bottom) / 2) + "\" font-size=\"12\" text-anchor=\"middle\" "
         "transform=\"rotate(-90 14 " + num((f.top + f.bottom) / 2) + ")\">" + escape(spec.y_label) + "</text>\n";
  svg += "<text x=\"" + num(f.left) + "\" y=\"" + num(f.bottom + 16) + "\" font-size=\"10\">" +
         num(f.box.min_x) + "</text>\n";
  svg += "<text x=\"" + num(f.right) + "\" y=\"" + num(f.bottom + 16) + "\" font-size=\"10\" text-anchor=\"end\">" +
         num(f.box.max_x) + "</text>\n";
  if (!spec.title.empty())
    svg += "<text x=\"" + num((f.left + f.right) / 2) + "\" y=\"20\" font-size=\"14\" text-anchor=\"middle\">" +
           escape(spec.title) + "</text>\n";
  return svg;
}

inline std::string scatter_svg(const RenderSpec& spec, const ProjectionSet& p) {
  PlotFrame f{50, 40, spec.width - 20.0, spec.height - 50.0, bounding_box(p.points)};
  std::map<std::string, std::size_t> colour_of;
  for (const auto& l : p.labels) colour_of.emplace(l, 0);
  std::size_t next = 0;
  for (auto& [label, idx] : colour_of) idx = next++;

  std::string svg = svg_open(spec.width, spec.height);
  svg += axes(spec, f);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto colour = p.labels.empty() ? palette[0] : palette[colour_of[p.labels[i]] % palette.size()];
    svg += "<circle cx=\"" + num(f.sx(p.points[i][0])) + "\" cy=\"" + num(f.sy(p.points[i][1])) +
           "\" r=\"3\" fill=\"" + std::string(colour) + "\" fill-opacity=\"0.5\"/>\n";
  }
  svg += "</svg>\n";
  return svg;
}

inline std::string heatmap_svg(const RenderSpec& spec, const ProjectionSet& p) {
  const int grid = spec.heatmap_grid;
  const auto cells = density_grid(p.points, grid);
  std::uint64_t peak = 0;
  for (const auto& row : cells)
    for (auto c : row) peak = std::max(peak, c);
  const auto lo = parse_hex(spec.color0), hi = parse_hex(spec.color1);
  PlotFrame f{50, 40, spec.width - 20.0, spec.height - 50.0, bounding_box(p.points)};
  const double cw = (f.right - f.left) / grid, ch = (f.bottom - f.top) / grid;

  std::string svg = svg_open(spec.width, spec.height);
  svg += axes(spec, f);
  for (int r = 0; r < grid; ++r)
    for (int c = 0; c < grid; ++c) {
      const auto count = cells[r][c];
      const double t = peak ? static_cast<double>(count) / static_cast<double>(peak) : 0.0;
      svg += "<rect x=\"" + num(f.left + c * cw) + "\" y=\"" + num(f.bottom - (r + 1) * ch) + "\" width=\"" +
             num(cw) + "\" height=\"" + num(ch) + "\" fill=\"" + blend(lo, hi, t) + "\" data-count=\"" +
             std::to_string(count) + "\"/>\n";
    }
  svg += "</svg>\n";
  return svg;
}

inline std::string histogram_svg(const RenderSpec& spec, const HistogramPlot& plot) {
  const auto& h = plot.histogram;
  std::uint64_t total = 0, peak = 0;
  for (auto c : h.counts) total += c, peak = std::max(peak, c);
  double lo = h.edges.front(), hi = h.edges.back();
  double top_y = static_cast<double>(peak);
  const double bin_width = h.counts.size() ? (hi - lo) / static_cast<double>(h.counts.size()) : 0.0;
  std::vector<std::array<double, 2>> curve;
  if (plot.overlay) {
    lo = std::min(lo, plot.overlay->x.front());
    hi = std::max(hi, plot.overlay->x.back());
    const double scale = static_cast<double>(total) * (bin_width > 0 ? bin_width : 1.0);
    for (std::size_t i = 0; i < plot.overlay->x.size(); ++i) {
      curve.push_back({plot.overlay->x[i], plot.overlay->density[i] * scale});
      top_y = std::max(top_y, curve.back()[1]);
    }
  }
  PlotFrame f{50, 40, spec.width - 20.0, spec.height - 50.0, {lo, hi, 0.0, top_y > 0 ? top_y : 1.0}};

  std::string svg = svg_open(spec.width, spec.height);
  svg += axes(spec, f);
  for (std::size_t b = 0; b < h.counts.size(); ++b) {
    const double x0 = f.sx(h.edges[b]), x1 = f.sx(h.edges[b + 1]);
    const double y = f.sy(static_cast<double>(h.counts[b]));
    svg += "<rect x=\"" + num(x0) + "\" y=\"" + num(y) + "\" width=\"" + num(std::max(x1 - x0, 1.0)) +
           "\" height=\"" + num(f.bottom - y) + "\" fill=\"" + spec.color1 + "\" data-count=\"" +
           std::to_string(h.counts[b]) + "\"/>\n";
  }
  if (!curve.empty()) {
    svg += "<polyline fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < curve.size(); ++i) {
      if (i) svg += ' ';
      svg += num(f.sx(curve[i][0])) + "," + num(f.sy(curve[i][1]));
    }
    svg += "\"/>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace detail

inline std::string render_svg(const RenderSpec& spec, const RenderData& data) {
  detail::validate(spec);
  auto mismatch = [&] {
    return Error(ErrorKind::render_spec, "data does not match render kind '" + std::string(to_string(spec.kind)) + "'");
  };
  switch (spec.kind) {
    case RenderKind::pattern:
    case RenderKind::tiling: {
      const auto* pm = std::get_if<ParityMatrix>(&data);
      if (!pm) throw mismatch();
      return spec.kind == RenderKind::pattern ? detail::grid_svg(spec, *pm, 1, 1)
                                              : detail::grid_svg(spec, *pm, spec.repeat_rows, spec.repeat_cols);
    }
    case RenderKind::scatter:
    case RenderKind::heatmap: {
      const auto* p = std::get_if<ProjectionSet>(&data);
      if (!p) throw mismatch();
      return spec.kind == RenderKind::scatter ? detail::scatter_svg(spec, *p) : detail::heatmap_svg(spec, *p);
    }
    case RenderKind::histogram: {
      const auto* h = std::get_if<HistogramPlot>(&data);
      if (!h) throw mismatch();
      return detail::histogram_svg(spec, *h);
    }
  }
  throw mismatch();
}

}  // namespace msq
